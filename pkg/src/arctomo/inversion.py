"""
Reconstruction of a spherical function from fixed-length arc integrals.

The data ``g(Q_m) = A f(Q_m, psi)`` are expanded into rotational Fourier
coefficients with the quadrature formed by the measurement rotations and
weights; each spherical coefficient then follows from

    f_n^k = c_n * sum_j P_n^j(0) s_j(psi) g_n^{j,k} / sum_j P_n^j(0)^2 s_j(psi)^2

with filter factors ``c_n``.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ._util import atomic_write_text
from .arcs import ArcMeasurements, arc_weights, forward_spectral
from .errors import DomainError, ExactnessWarning
from .quadrature import gauss_legendre_s2
from .rotation import rotational_analyze_values
from .spectral import mu_squared
from .sphere import SphericalCoeffs, evaluate, sh_index, sh_size


@dataclass(frozen=True)
class FilterSpec:
    """Spectral filter: ``none``, ``cutoff`` at degree ``cutoff``, or ``tikhonov`` with ``tau``."""

    kind: str = "none"
    cutoff: int | None = None
    tau: float | None = None

    def __post_init__(self):
        if self.kind not in ("none", "cutoff", "tikhonov"):
            raise ValueError(f"unknown filter kind {self.kind!r}")
        if self.kind == "cutoff" and (self.cutoff is None or self.cutoff < 0):
            raise ValueError("cutoff filter needs a degree >= 0")
        if self.kind == "tikhonov" and (self.tau is None or not self.tau >= 0.0):
            raise ValueError("tikhonov filter needs tau >= 0")

    @classmethod
    def parse(cls, text):
        """Parse ``none``, ``cutoff:<N>`` or ``tikhonov:<tau>``."""
        kind, _, arg = text.strip().partition(":")
        kind = kind.lower()
        if kind == "none" and not arg:
            return cls()
        if kind == "cutoff" and arg:
            return cls("cutoff", cutoff=int(arg))
        if kind == "tikhonov" and arg:
            return cls("tikhonov", tau=float(arg))
        raise ValueError(f"bad filter spec {text!r}; use none, cutoff:<N> or tikhonov:<tau>")

    def as_dict(self):
        d = {"kind": self.kind}
        if self.kind == "cutoff":
            d["cutoff"] = self.cutoff
        if self.kind == "tikhonov":
            d["tau"] = self.tau
        return d


def filter_coefficients(filt, n, psi):
    """Filter factor ``c_n``."""
    if filt.kind == "none":
        return 1.0
    if filt.kind == "cutoff":
        return 1.0 if n <= filt.cutoff else 0.0
    m2 = mu_squared(n, psi)
    if filt.tau == 0.0:
        return 1.0
    return m2 / (m2 + filt.tau)


@dataclass(frozen=True, eq=False)
class ReconstructionReport:
    coeffs: SphericalCoeffs
    rmse: float | None
    residual_norm: float
    settings: dict = field(default_factory=dict)

    def to_json_obj(self):
        return {"coeffs": self.coeffs.to_json_obj(), "rmse": self.rmse,
                "residual_norm": self.residual_norm, **self.settings}

    def to_json(self):
        return json.dumps(self.to_json_obj(), indent=1)

    def write(self, path):
        atomic_write_text(path, self.to_json() + "\n")

    @classmethod
    def from_json(cls, text):
        obj = json.loads(text)
        coeffs = SphericalCoeffs.from_json_obj(obj.pop("coeffs"))
        rmse = obj.pop("rmse")
        resid = obj.pop("residual_norm")
        return cls(coeffs, rmse, resid, obj)


def invert(meas, nmax, filt=None, truth=None, rmse_quad=None):
    """Reconstruct spherical coefficients up to ``nmax`` from arc measurements.

    Parameters
    ----------
    meas : ArcMeasurements
        values at the nodes of an SO(3) quadrature; exact recovery of a
        degree-``nmax`` function needs exactness ``2*nmax``
    nmax : int
    filt : FilterSpec, optional
    truth : SphericalCoeffs, optional
        reference used to fill in the report's RMSE
    rmse_quad : QuadratureS2, optional
        rule for the RMSE; defaults to one exact for the squared error

    Returns
    -------
    ReconstructionReport
    """
    filt = filt or FilterSpec()
    psi = meas.psi
    if not 0.0 < psi < math.pi:
        raise DomainError(f"psi must lie in (0, pi), got {psi}")
    if meas.exactness is not None and meas.exactness < 2 * nmax:
        warnings.warn(f"measurement rule exact to degree {meas.exactness} < 2*nmax = {2 * nmax}",
                      ExactnessWarning, stacklevel=2)
    ghat = rotational_analyze_values(meas.values, meas.weights, meas.rotations, nmax)
    a = arc_weights(nmax, psi)
    out = np.zeros(sh_size(nmax), dtype=complex)
    for n in range(nmax + 1):
        denom = float(np.dot(a[n], a[n]))
        c = filter_coefficients(filt, n, psi)
        if c == 0.0:
            continue
        out[n * n:(n + 1) * (n + 1)] = c * (a[n] @ ghat.block(n)) / denom
    coeffs = SphericalCoeffs(nmax, out)
    predicted = forward_spectral(coeffs, meas.rotations, psi)
    residual = float(np.sqrt(np.sum(meas.weights * np.abs(predicted - meas.values) ** 2)))
    err = None
    if truth is not None:
        err = rmse(truth, coeffs, rmse_quad)
    settings = {
        "nmax": nmax,
        "psi": psi,
        "filter": filt.as_dict(),
        "quadrature": {"nodes": len(meas), "exactness": meas.exactness},
        "noise_sigma": meas.noise_sigma,
        "seed": meas.noise_seed,
    }
    return ReconstructionReport(coeffs, err, residual, settings)


def add_noise(meas, sigma, seed):
    """Add white Gaussian noise of standard deviation ``sigma``.

    Real-valued data get real noise; complex data get independent noise in
    both parts.  Deterministic for a given ``seed``.
    """
    if sigma < 0.0:
        raise ValueError("sigma must be >= 0")
    rng = np.random.default_rng(seed)
    values = np.array(meas.values)
    if sigma > 0.0:
        if meas.is_real():
            values = values + rng.normal(0.0, sigma, values.size)
        else:
            values = values + rng.normal(0.0, sigma, values.size) + 1j * rng.normal(0.0, sigma, values.size)
    return meas.with_values(values, noise_sigma=sigma, noise_seed=seed)


def rmse(f_true, f_est, quad=None):
    """Area-normalized L2 distance ``sqrt((1/4pi) sum_m w_m |f_true - f_est|^2)``.

    Without a rule, one exact for the squared difference is used.
    """
    nmax = max(f_true.nmax, f_est.nmax)
    diff = f_true.truncate(nmax).coeffs - f_est.truncate(nmax).coeffs
    if quad is None:
        quad = gauss_legendre_s2(2 * nmax)
    values = evaluate(SphericalCoeffs(nmax, diff), quad.nodes)
    return float(math.sqrt(np.sum(quad.weights * np.abs(values) ** 2) / (4.0 * math.pi)))


def make_phantom(kind, nmax, seed):
    """Random real-valued test function.

    ``bandlimited`` draws standard complex Gaussian coefficients; ``smooth``
    additionally scales degree ``n`` by ``1/(n+1)``.
    """
    if kind not in ("smooth", "bandlimited"):
        raise ValueError("kind must be 'smooth' or 'bandlimited'")
    if nmax < 0:
        raise ValueError("nmax must be >= 0")
    rng = np.random.default_rng(seed)
    c = np.zeros(sh_size(nmax), dtype=complex)
    for n in range(nmax + 1):
        scale = 1.0 / (n + 1) if kind == "smooth" else 1.0
        c[sh_index(n, 0)] = scale * rng.normal()
        for k in range(1, n + 1):
            v = scale * (rng.normal() + 1j * rng.normal()) / math.sqrt(2.0)
            c[sh_index(n, k)] = v
            c[sh_index(n, -k)] = (-1) ** k * np.conj(v)
    return SphericalCoeffs(nmax, c)


def simulate(coeffs, quad, psi):
    """Exact arc measurements of a band-limited function at the nodes of ``quad``."""
    return ArcMeasurements.from_quadrature(quad, psi, forward_spectral(coeffs, quad.nodes, psi))
