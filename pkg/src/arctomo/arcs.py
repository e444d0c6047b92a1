r"""
Great-circle arcs and the arc transform.

An arc is given by a rotation ``Q`` and a half-length ``psi``: it is the
preimage under ``Q`` of the equatorial arc :math:`\{e_\rho : |\rho| \le \psi\}`
with :math:`e_\rho = (\cos\rho, \sin\rho, 0)`.  The arc transform of ``f`` is

.. math::
    \mathcal A f(Q, \psi) = \int_{-\psi}^{\psi} f(Q^{-1} e_\rho)\, d\rho.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from ._util import atomic_write_text, format_float
from .errors import AntipodalError, DegenerateError, DomainError, MeasurementFormatError
from .rotation import (EulerRotation, RotationalCoeffs, as_eulers, euler_to_matrix,
                       matrix_to_euler, rotational_synthesize)
from .sphere import angles_to_xyz, as_points, legendre_at_zero_row


def equator_point(rho):
    """Points ``(cos rho, sin rho, 0)`` for an array of angles."""
    rho = np.asarray(rho, dtype=float)
    return np.stack([np.cos(rho), np.sin(rho), np.zeros_like(rho)], axis=-1)


@dataclass(frozen=True)
class Arc:
    """Great-circle arc of length ``2*half_length`` in canonical position under ``rotation``."""

    rotation: EulerRotation
    half_length: float

    def __post_init__(self):
        if not 0.0 <= self.half_length <= math.pi:
            raise DomainError(f"half_length must lie in [0, pi], got {self.half_length}")

    def points(self, rho):
        """Arc points ``Q^{-1} e_rho``."""
        return equator_point(rho) @ self.rotation.matrix()

    def endpoints(self):
        p = self.points(np.array([-self.half_length, self.half_length]))
        return p[0], p[1]


def arc_from_endpoints(xi, zeta):
    """Arc from ``xi`` to ``zeta`` along the shortest geodesic.

    The rotation has rows ``m``, ``n x m`` and ``n``, where ``m`` is the
    normalized midpoint and ``n`` the normalized ``xi x zeta``, so that
    ``Q xi = e_{-psi}`` and ``Q zeta = e_{psi}``.
    """
    xi = as_points(xi)[0]
    zeta = as_points(zeta)[0]
    xi = xi / np.linalg.norm(xi)
    zeta = zeta / np.linalg.norm(zeta)
    dot = float(np.clip(xi @ zeta, -1.0, 1.0))
    if dot <= -1.0 + 1e-9:
        raise AntipodalError("endpoints are antipodal; the shortest arc is not unique")
    if np.max(np.abs(xi - zeta)) <= 1e-12:
        raise DegenerateError("endpoints coincide")
    mid = xi + zeta
    mid /= np.linalg.norm(mid)
    normal = np.cross(xi, zeta)
    normal /= np.linalg.norm(normal)
    q = np.array([mid, np.cross(normal, mid), normal])
    # half the angle between the endpoints, robust for nearby points
    psi = math.atan2(np.linalg.norm(np.cross(xi, zeta)), dot) / 2.0
    return Arc(matrix_to_euler(q), psi)


def s_factor(j, psi):
    """``int_{-psi}^{psi} exp(i j rho) d rho``: ``2 psi`` for ``j = 0``, else ``2 sin(j psi)/j``."""
    j = np.asarray(j)
    psi = np.asarray(psi, dtype=float)
    jf = np.where(j == 0, 1, j).astype(float)
    out = np.where(j == 0, 2.0 * psi, 2.0 * np.sin(jf * psi) / jf)
    return out if out.ndim else float(out)


def forward_quadrature(f, arc, K):
    """Arc integral by the ``K``-node midpoint rule.

    ``f`` maps an ``(K, 3)`` array of unit vectors to values.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    psi = arc.half_length
    rho = (2.0 * np.arange(1, K + 1) - 1.0 - K) / K * psi
    values = np.asarray(f(arc.points(rho)))
    return complex(2.0 * psi / K * np.sum(values))


def arc_weights(nmax, psi):
    """Per-degree vectors ``P_n^j(0) s_j(psi)`` for ``j = -n..n``."""
    return [legendre_at_zero_row(n) * s_factor(np.arange(-n, n + 1), psi)
            for n in range(nmax + 1)]


def arc_rotational_coeffs(coeffs, psi):
    """Rotational coefficients of ``Q -> A f(Q, psi)`` for a band-limited ``f``."""
    w = arc_weights(coeffs.nmax, psi)
    return RotationalCoeffs.from_blocks(
        [np.outer(w[n], coeffs.degree_block(n)) for n in range(coeffs.nmax + 1)])


def forward_spectral(coeffs, rotations, psi):
    """Arc transform of a band-limited function at many rotations.

    Direct summation of ``sum_n sum_{j,k} f_n^k P_n^j(0) s_j(psi) D_n^{j,k}(Q)``.
    """
    if not 0.0 <= psi <= math.pi:
        raise DomainError(f"psi must lie in [0, pi], got {psi}")
    return rotational_synthesize(arc_rotational_coeffs(coeffs, psi), rotations)


def fixed_point_transform(f, phi, theta, K):
    """Integral of ``f`` along the meridian from the north pole to ``xi(phi, theta)``.

    ``K``-node midpoint rule in the polar angle.
    """
    if not 0.0 <= theta <= math.pi:
        raise DomainError(f"theta must lie in [0, pi], got {theta}")
    if K < 1:
        raise ValueError("K must be >= 1")
    if theta == 0.0:
        return 0.0
    rho = (np.arange(1, K + 1) - 0.5) * theta / K
    values = np.asarray(f(angles_to_xyz(np.full(K, phi), rho)))
    return complex(theta / K * np.sum(values))


def fixed_point_arc(phi, theta):
    """The arc from the north pole to ``xi(phi, theta)`` as ``(Q, psi)``."""
    return Arc(EulerRotation(theta / 2.0, math.pi / 2.0, 1.5 * math.pi - phi), theta / 2.0)


def fixed_point_invert(bf, phi, theta, h):
    """Recover ``f(xi(phi, theta))`` from meridian integrals by a central difference.

    ``bf`` is a function of ``(phi, theta)``.  Error is ``O(h^2)`` for smooth ``f``.
    """
    if not (0.0 < h <= theta <= math.pi - h):
        raise DomainError(f"need 0 < h <= theta <= pi - h, got h={h}, theta={theta}")
    return (bf(phi, theta + h) - bf(phi, theta - h)) / (2.0 * h)


def arc_polyline(arc, segments):
    """``segments + 1`` points along the arc, endpoints included."""
    if segments < 1:
        raise ValueError("segments must be >= 1")
    return arc.points(np.linspace(-arc.half_length, arc.half_length, segments + 1))


def write_polylines(path, polylines):
    """Write polylines as ``x,y,z`` rows with a blank line between arcs."""
    chunks = []
    for pts in polylines:
        chunks.append("".join(",".join(format_float(v) for v in p) + "\n" for p in pts))
    atomic_write_text(path, "\n".join(chunks))


def read_polylines(path):
    with open(path, encoding="utf-8") as fh:
        blocks = fh.read().split("\n\n")
    return [np.array([[float(v) for v in line.split(",")] for line in b.splitlines() if line.strip()])
            for b in blocks if b.strip()]


# ---------------------------------------------------------------------------
# Measurements


@dataclass(frozen=True, eq=False)
class ArcMeasurements:
    """Arc integrals of one half-length ``psi`` at weighted rotations.

    ``exactness`` is the degree of the SO(3) rule formed by the rotations and
    weights, when known.  ``noise_sigma`` and ``noise_seed`` record added noise.
    """

    psi: float
    rotations: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    exactness: int | None = None
    noise_sigma: float | None = None
    noise_seed: int | None = None

    def __post_init__(self):
        if not 0.0 <= self.psi <= math.pi:
            raise DomainError(f"psi must lie in [0, pi], got {self.psi}")
        rot = as_eulers(self.rotations)
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        v = np.asarray(self.values, dtype=complex).reshape(-1)
        if not rot.shape[0] == w.size == v.size:
            raise ValueError("rotations, weights and values must have equal length")
        for name, arr in (("rotations", rot), ("weights", w), ("values", v)):
            arr = np.array(arr)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self):
        return self.values.size

    @classmethod
    def from_quadrature(cls, quad, psi, values):
        return cls(psi, quad.nodes, quad.weights, values, exactness=quad.exactness)

    def with_values(self, values, **meta):
        kw = dict(exactness=self.exactness, noise_sigma=self.noise_sigma, noise_seed=self.noise_seed)
        kw.update(meta)
        return ArcMeasurements(self.psi, self.rotations, self.weights, values, **kw)

    def is_real(self, tol=1e-12):
        return bool(np.all(np.abs(self.values.imag) <= tol))

    def arcs(self):
        return [Arc(EulerRotation(*map(float, r)), self.psi) for r in self.rotations]


def write_measurements(path, meas):
    """Write the measurement CSV: header ``# psi=...`` then
    ``alpha,beta,gamma,weight,value_re,value_im`` rows."""
    head = f"# psi={format_float(meas.psi)}"
    if meas.exactness is not None:
        head += f" exactness={meas.exactness}"
    if meas.noise_sigma is not None:
        head += f" noise_sigma={format_float(meas.noise_sigma)}"
    if meas.noise_seed is not None:
        head += f" noise_seed={meas.noise_seed}"
    rows = np.column_stack([meas.rotations, meas.weights, meas.values.real, meas.values.imag])
    body = "".join(",".join(format_float(x) for x in row) + "\n" for row in rows)
    atomic_write_text(path, head + "\n" + body)


_KV = re.compile(r"(\w+)\s*=\s*(\S+)")


def read_measurements(path):
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].lstrip().startswith("#"):
        raise MeasurementFormatError(f"{path}:1: expected header '# psi=<float>'")
    meta = dict(_KV.findall(lines[0]))
    if "psi" not in meta:
        raise MeasurementFormatError(f"{path}:1: header lacks psi")
    try:
        psi = float(meta["psi"])
        exactness = int(meta["exactness"]) if "exactness" in meta else None
        sigma = float(meta["noise_sigma"]) if "noise_sigma" in meta else None
        seed = int(meta["noise_seed"]) if "noise_seed" in meta else None
    except ValueError:
        raise MeasurementFormatError(f"{path}:1: malformed header value") from None
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split(",")
        if len(parts) != 6:
            raise MeasurementFormatError(f"{path}:{lineno}: expected 6 values, got {len(parts)}")
        try:
            rows.append([float(p) for p in parts])
        except ValueError:
            raise MeasurementFormatError(f"{path}:{lineno}: malformed number") from None
    if not rows:
        raise MeasurementFormatError(f"{path}: no measurement rows")
    arr = np.array(rows)
    if np.any(arr[:, 3] <= 0.0):
        raise MeasurementFormatError(f"{path}: weights must be positive")
    values = np.empty(arr.shape[0], dtype=complex)
    values.real = arr[:, 4]
    values.imag = arr[:, 5]
    return ArcMeasurements(psi, arr[:, :3], arr[:, 3], values,
                           exactness=exactness, noise_sigma=sigma, noise_seed=seed)
