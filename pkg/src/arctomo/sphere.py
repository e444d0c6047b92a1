r"""
Harmonic analysis on the unit sphere.

Points are unit vectors :math:`\xi = (\cos\varphi\sin\vartheta,
\sin\varphi\sin\vartheta, \cos\vartheta)` with azimuth :math:`\varphi` and
polar angle :math:`\vartheta`.  Spherical harmonics are

.. math::
    Y_n^k(\xi(\varphi, \vartheta)) = \tilde P_n^k(\cos\vartheta) e^{ik\varphi}

where :math:`\tilde P_n^k` are the :math:`L^2`-normalized associated Legendre
functions carrying the Condon--Shortley phase, so that
:math:`\tilde P_n^{-k} = (-1)^k \tilde P_n^k`.

Coefficient arrays are flat, degree-major: the entry for :math:`(n, k)` sits at
``n*n + n + k``.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ExactnessWarning

FOUR_PI = 4.0 * math.pi


def sh_index(n, k):
    """Flat index of degree ``n`` and order ``k``."""
    return n * n + n + k


def sh_size(nmax):
    """Number of coefficients up to degree ``nmax``."""
    return (nmax + 1) ** 2


@dataclass(frozen=True)
class Direction:
    """Unit vector on the sphere; normalized on construction."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        r = math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)
        if r == 0.0 or not math.isfinite(r):
            raise DomainError("direction must be a finite non-zero vector")
        object.__setattr__(self, "x", self.x / r)
        object.__setattr__(self, "y", self.y / r)
        object.__setattr__(self, "z", self.z / r)

    def __array__(self, dtype=None, copy=None):
        return np.array([self.x, self.y, self.z], dtype=dtype)

    @classmethod
    def from_angles(cls, phi, theta):
        return cls(*angles_to_xyz(phi, theta))

    def angles(self):
        phi, theta = xyz_to_angles(np.array([self.x, self.y, self.z]))
        return SphericalAngles(float(phi), float(theta))


@dataclass(frozen=True)
class SphericalAngles:
    """Azimuth ``phi`` in [0, 2pi) and polar angle ``theta`` in [0, pi]."""

    phi: float
    theta: float

    def direction(self):
        return Direction.from_angles(self.phi, self.theta)


def angles_to_xyz(phi, theta):
    """Unit vectors of shape ``(..., 3)`` from azimuth and polar angle."""
    phi = np.asarray(phi, dtype=float)
    theta = np.asarray(theta, dtype=float)
    st = np.sin(theta)
    return np.stack([np.cos(phi) * st, np.sin(phi) * st, np.cos(theta)], axis=-1)


def xyz_to_angles(xyz):
    """Azimuth and polar angle of points of shape ``(..., 3)``.

    At the poles the azimuth is set to 0.
    """
    xyz = np.asarray(xyz, dtype=float)
    x, y, z = xyz[..., 0], xyz[..., 1], xyz[..., 2]
    rho = np.hypot(x, y)
    theta = np.arctan2(rho, z)
    phi = np.where(rho > 0.0, np.mod(np.arctan2(y, x), 2.0 * math.pi), 0.0)
    # mod can round 2pi - tiny up to exactly 2pi
    phi = np.where(phi >= 2.0 * math.pi, 0.0, phi)
    return phi, theta


def as_points(points):
    """Coerce a Direction, a sequence of Directions or an array to ``(M, 3)``."""
    if isinstance(points, Direction):
        return np.asarray(points)[None, :]
    if isinstance(points, (list, tuple)) and points and isinstance(points[0], Direction):
        return np.array([np.asarray(p) for p in points])
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.shape[-1] != 3:
        raise ValueError("points must have shape (M, 3)")
    return arr


# ---------------------------------------------------------------------------
# Legendre functions


def _check_t(t):
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1.0) or np.any(~np.isfinite(t)):
        raise DomainError("Legendre argument must satisfy |t| <= 1")
    return t


def legendre_table(nmax, t):
    """Normalized associated Legendre functions up to degree ``nmax``.

    Parameters
    ----------
    nmax : int
        maximum degree
    t : array_like
        arguments in [-1, 1], typically ``cos(theta)``

    Returns
    -------
    ndarray
        shape ``t.shape + ((nmax+1)**2,)``, flat index ``n*n + n + k``,
        negative orders filled by the Condon--Shortley sign rule
    """
    t = _check_t(t)
    # sin(theta) from t without cancellation near |t| = 1
    s = np.sqrt((1.0 - t) * (1.0 + t))
    out = np.zeros(t.shape + (sh_size(nmax),))
    pmm = np.full(t.shape, 1.0 / math.sqrt(FOUR_PI))
    for m in range(nmax + 1):
        if m > 0:
            pmm = -math.sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * pmm
        out[..., sh_index(m, m)] = pmm
        if m == nmax:
            break
        p1 = math.sqrt(2.0 * m + 3.0) * t * pmm
        out[..., sh_index(m + 1, m)] = p1
        p0 = pmm
        for n in range(m + 2, nmax + 1):
            a = math.sqrt((4.0 * n * n - 1.0) / (n * n - m * m))
            b = math.sqrt((2.0 * n + 1.0) * ((n - 1.0) ** 2 - m * m)
                          / ((2.0 * n - 3.0) * (n * n - m * m)))
            p0, p1 = p1, a * t * p1 - b * p0
            out[..., sh_index(n, m)] = p1
    for n in range(1, nmax + 1):
        for m in range(1, n + 1):
            sign = -1.0 if m % 2 else 1.0
            out[..., sh_index(n, -m)] = sign * out[..., sh_index(n, m)]
    return out


def legendre_normalized(n, k, t):
    """Normalized associated Legendre function of degree ``n``, order ``k``.

    Includes the Condon--Shortley phase.  Vectorized over ``t``.
    """
    if n < 0 or abs(k) > n:
        raise DomainError(f"need 0 <= |k| <= n, got n={n}, k={k}")
    t = _check_t(t)
    m = abs(k)
    s = np.sqrt((1.0 - t) * (1.0 + t))
    p = np.full(t.shape, 1.0 / math.sqrt(FOUR_PI))
    for i in range(1, m + 1):
        p = -math.sqrt((2.0 * i + 1.0) / (2.0 * i)) * s * p
    if n > m:
        p0, p = p, math.sqrt(2.0 * m + 3.0) * t * p
        for i in range(m + 2, n + 1):
            a = math.sqrt((4.0 * i * i - 1.0) / (i * i - m * m))
            b = math.sqrt((2.0 * i + 1.0) * ((i - 1.0) ** 2 - m * m)
                          / ((2.0 * i - 3.0) * (i * i - m * m)))
            p0, p = p, a * t * p - b * p0
    if k < 0 and m % 2:
        p = -p
    return p if p.ndim else float(p)


def _log_dfact_ratio(p):
    # log of (2p-1)!! / (2p)!!
    if p == 0:
        return 0.0
    return math.lgamma(p + 0.5) - math.lgamma(p + 1.0) - 0.5 * math.log(math.pi)


def _check_order(n, j):
    if n < 0 or abs(j) > n:
        raise DomainError(f"need 0 <= |j| <= n, got n={n}, j={j}")


def legendre_at_zero_sq(n, j):
    """Square of :func:`legendre_at_zero`, without the square root."""
    _check_order(n, j)
    if (n + j) % 2:
        return 0.0
    r = math.exp(_log_dfact_ratio((n - j) // 2) + _log_dfact_ratio((n + j) // 2))
    return (2.0 * n + 1.0) / FOUR_PI * r


def legendre_at_zero(n, j):
    """Closed-form value of the normalized Legendre function at ``t = 0``.

    Exactly zero when ``n + j`` is odd.  The double-factorial ratio is
    accumulated in log space, so large degrees do not overflow.
    """
    _check_order(n, j)
    if (n + j) % 2:
        return 0.0
    sign = -1.0 if ((n + j) // 2) % 2 else 1.0
    return sign * math.sqrt(legendre_at_zero_sq(n, j))


def legendre_at_zero_row(n):
    """Values at zero for orders ``j = -n..n`` as an array of length 2n+1."""
    return np.array([legendre_at_zero(n, j) for j in range(-n, n + 1)])


def legendre_at_zero_sq_row(n):
    return np.array([legendre_at_zero_sq(n, j) for j in range(-n, n + 1)])


# ---------------------------------------------------------------------------
# Spherical harmonics


def sph_harm_table(nmax, points):
    """All spherical harmonics up to ``nmax`` at points of shape ``(M, 3)``.

    Returns a complex array of shape ``(M, (nmax+1)**2)``.
    """
    pts = as_points(points)
    phi, theta = xyz_to_angles(pts)
    plm = legendre_table(nmax, np.clip(np.cos(theta), -1.0, 1.0))
    ks = np.concatenate([np.arange(-n, n + 1) for n in range(nmax + 1)])
    return plm * np.exp(1j * phi[:, None] * ks[None, :])


def sph_harm(n, k, direction):
    """Spherical harmonic of degree ``n`` and order ``k`` at one direction."""
    if n < 0 or abs(k) > n:
        raise DomainError(f"need 0 <= |k| <= n, got n={n}, k={k}")
    phi, theta = xyz_to_angles(np.asarray(direction, dtype=float))
    p = legendre_normalized(n, k, float(np.clip(np.cos(theta), -1.0, 1.0)))
    return complex(p * np.exp(1j * k * float(phi)))


@dataclass(frozen=True, eq=False)
class SphericalCoeffs:
    """Spherical Fourier coefficients up to degree ``nmax``.

    ``coeffs`` is flat with the entry for ``(n, k)`` at ``n*n + n + k``.
    """

    nmax: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).reshape(-1)
        if self.nmax < 0 or c.size != sh_size(self.nmax):
            raise ValueError(f"expected {sh_size(self.nmax)} coefficients, got {c.size}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zeros(cls, nmax):
        return cls(nmax, np.zeros(sh_size(nmax), dtype=complex))

    @classmethod
    def from_dict(cls, nmax, values):
        """Build from ``{(n, k): value}``; missing entries are zero."""
        c = np.zeros(sh_size(nmax), dtype=complex)
        for (n, k), v in values.items():
            c[sh_index(n, k)] = v
        return cls(nmax, c)

    def __getitem__(self, nk):
        n, k = nk
        if not 0 <= n <= self.nmax or abs(k) > n:
            raise IndexError(f"(n, k) = {nk} out of range")
        return complex(self.coeffs[sh_index(n, k)])

    def degree_block(self, n):
        """Coefficients of degree ``n`` for ``k = -n..n``."""
        return self.coeffs[n * n:(n + 1) * (n + 1)]

    def truncate(self, nmax):
        """Coefficients up to ``nmax``, zero-padded if ``nmax`` is larger."""
        c = np.zeros(sh_size(nmax), dtype=complex)
        m = min(sh_size(nmax), self.coeffs.size)
        c[:m] = self.coeffs[:m]
        return SphericalCoeffs(nmax, c)

    def with_coeffs(self, coeffs):
        return SphericalCoeffs(self.nmax, coeffs)

    def reality_defect(self):
        """Max deviation from the symmetry of a real-valued function."""
        worst = 0.0
        for n in range(self.nmax + 1):
            for k in range(1, n + 1):
                a = self.coeffs[sh_index(n, -k)]
                b = (-1) ** k * np.conj(self.coeffs[sh_index(n, k)])
                worst = max(worst, abs(a - b))
            worst = max(worst, abs(self.coeffs[sh_index(n, 0)].imag))
        return worst

    def to_json_obj(self):
        entries = []
        for n in range(self.nmax + 1):
            for k in range(-n, n + 1):
                v = self.coeffs[sh_index(n, k)]
                entries.append({"n": n, "k": k, "re": float(v.real), "im": float(v.imag)})
        return {"nmax": self.nmax, "coeffs": entries}

    @classmethod
    def from_json_obj(cls, obj):
        nmax = int(obj["nmax"])
        c = np.zeros(sh_size(nmax), dtype=complex)
        seen = set()
        for e in obj["coeffs"]:
            n, k = int(e["n"]), int(e["k"])
            if not 0 <= n <= nmax or abs(k) > n:
                raise ValueError(f"coefficient index (n={n}, k={k}) out of range")
            c[sh_index(n, k)] = complex(float(e["re"]), float(e["im"]))
            seen.add((n, k))
        if len(seen) != sh_size(nmax):
            raise ValueError(f"expected {sh_size(nmax)} coefficient entries, got {len(seen)}")
        return cls(nmax, c)

    def to_json(self):
        return json.dumps(self.to_json_obj(), indent=1)

    @classmethod
    def from_json(cls, text):
        return cls.from_json_obj(json.loads(text))


def evaluate(coeffs, points):
    """Evaluate a spherical Fourier series at one or many points.

    Returns a complex scalar for a single Direction, otherwise an array.
    """
    scalar = isinstance(points, Direction)
    pts = as_points(points)
    values = sph_harm_table(coeffs.nmax, pts) @ coeffs.coeffs
    return complex(values[0]) if scalar else values


def analyze(f, quad, nmax):
    """Spherical Fourier coefficients of ``f`` by quadrature.

    Parameters
    ----------
    f : callable or array_like
        function of an ``(M, 3)`` array of unit vectors, or its values at the
        quadrature nodes
    quad : QuadratureS2
    nmax : int

    Exact for functions of degree ``nmax`` when the rule integrates degree
    ``2*nmax``; otherwise an :class:`ExactnessWarning` is issued.
    """
    if quad.exactness < 2 * nmax:
        warnings.warn(f"S2 rule exact to degree {quad.exactness} < 2*nmax = {2 * nmax}",
                      ExactnessWarning, stacklevel=2)
    values = np.asarray(f(quad.nodes) if callable(f) else f, dtype=complex)
    y = sph_harm_table(nmax, quad.nodes)
    return SphericalCoeffs(nmax, np.conj(y).T @ (quad.weights * values))
