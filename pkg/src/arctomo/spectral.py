r"""
Singular values and singular functions of the arc transform.

For the transform on all arcs, with data in :math:`L^2(SO(3)\times[0,\pi])`,
the singular values depend only on the degree ``n``:

.. math::
    \sigma_n^2 = \frac{32\pi^3}{2n+1}\Big(\frac{\pi^2}{3}|\tilde P_n^0(0)|^2
    + \sum_{j=1}^n \frac{|\tilde P_n^j(0)|^2}{j^2}\Big).

For arcs of a fixed half-length :math:`\psi`,

.. math::
    \mu_n(\psi)^2 = \frac{8\pi^2}{2n+1}\sum_{j=-n}^n
    |\tilde P_n^j(0)|^2 s_j(\psi)^2.

All sums over ``j`` are accumulated with :func:`math.fsum`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._util import atomic_write_text, format_float
from .arcs import s_factor
from .errors import DomainError, SingularValueError
from .rotation import as_eulers, wigner_d_blocks
from .sphere import legendre_at_zero_row, legendre_at_zero_sq, legendre_at_zero_sq_row

PI = math.pi

SIGMA_EVEN_LOWER = math.sqrt(16.0 * PI ** 3 / 3.0)
SIGMA_EVEN_UPPER = math.sqrt(8.0 * PI ** 4 / 3.0 + 4.0 * PI ** 2)
SIGMA_ODD_LOWER = 4.0 * math.sqrt(PI)
SIGMA_ODD_UPPER = 2.0 * PI * math.sqrt(4.0 / math.sqrt(3.0) + 1.0)


def sigma(n):
    """Singular value of degree ``n`` of the arc transform on all arcs."""
    if n < 0:
        raise DomainError("degree must be >= 0")
    terms = [PI ** 2 / 3.0 * legendre_at_zero_sq(n, 0)]
    terms += [legendre_at_zero_sq(n, j) / (j * j) for j in range(1, n + 1)]
    return math.sqrt(32.0 * PI ** 3 / (2 * n + 1) * math.fsum(terms))


def sigma_bounds(n):
    """Lower and upper bound for ``sigma(n) * sqrt(n + 1)``."""
    if n % 2 == 0:
        return SIGMA_EVEN_LOWER, SIGMA_EVEN_UPPER
    return SIGMA_ODD_LOWER, SIGMA_ODD_UPPER


def _check_psi(psi):
    if not 0.0 <= psi <= PI:
        raise DomainError(f"psi must lie in [0, pi], got {psi}")


def mu_squared(n, psi):
    if n < 0:
        raise DomainError("degree must be >= 0")
    _check_psi(psi)
    j = np.arange(-n, n + 1)
    terms = legendre_at_zero_sq_row(n) * s_factor(j, psi) ** 2
    return 8.0 * PI ** 2 / (2 * n + 1) * math.fsum(terms.tolist())


def mu(n, psi):
    """Singular value of degree ``n`` of the transform on arcs of half-length ``psi``."""
    return math.sqrt(mu_squared(n, psi))


def normalized_mu2(n, psi):
    """``(2n+1)/4 * mu_n(psi)^2``: the quantity whose limit :func:`mu_limit` gives.

    This is ``(4m-1)/4 mu^2`` for ``n = 2m-1`` and ``(4m+1)/4 mu^2`` for ``n = 2m``.
    """
    return (2 * n + 1) / 4.0 * mu_squared(n, psi)


def mu_limit(parity, psi):
    """Large-degree limit of :func:`normalized_mu2` for odd or even degrees.

    Both parities tend to ``4 pi psi`` on ``[0, pi/2]``; beyond ``pi/2`` the odd
    limit is ``4 pi^2 - 4 pi psi`` and the even one ``12 pi psi - 4 pi^2``.
    """
    _check_psi(psi)
    if parity not in ("odd", "even"):
        raise ValueError("parity must be 'odd' or 'even'")
    if psi <= PI / 2.0:
        return 4.0 * PI * psi
    if parity == "odd":
        return 4.0 * PI ** 2 - 4.0 * PI * psi
    return 12.0 * PI * psi - 4.0 * PI ** 2


def parity_of(n):
    return "odd" if n % 2 else "even"


def wallis_sequence(mmax):
    """``u(m) = ((2m)!!/(2m-1)!!)^2 / (2m+1)`` for ``m = 0..mmax``.

    Built from the ratio ``u(m)/u(m-1) = (2m)^2/((2m)^2 - 1)``; increases
    towards ``pi/2``.
    """
    m = np.arange(1, mmax + 1, dtype=float)
    ratios = (2.0 * m) ** 2 / ((2.0 * m) ** 2 - 1.0)
    return np.concatenate([[1.0], np.cumprod(ratios)])


# ---------------------------------------------------------------------------
# Singular functions


def singular_function_E(n, k, rotations, psi):
    """``E_n^k(Q, psi) = sum_j D_n^{j,k}(Q) P_n^j(0) s_j(psi)``, the arc transform of ``Y_n^k``.

    ``psi`` may be a scalar or an array broadcast against the rotations.
    """
    if n < 0 or abs(k) > n:
        raise DomainError(f"need 0 <= |k| <= n, got n={n}, k={k}")
    scalar = np.ndim(rotations) == 1 or hasattr(rotations, "alpha")
    e = as_eulers(rotations)
    psi = np.broadcast_to(np.asarray(psi, dtype=float), (e.shape[0],))
    if np.any(psi < 0.0) or np.any(psi > PI):
        raise DomainError("psi must lie in [0, pi]")
    js = np.arange(-n, n + 1)
    for deg, blk in wigner_d_blocks(n, e[:, 1]):
        if deg == n:
            d = blk[:, :, k + n]
    weights = legendre_at_zero_row(n)[None, :] * s_factor(js[None, :], psi[:, None])
    out = np.exp(-1j * k * e[:, 2]) * np.sum(np.exp(-1j * np.outer(e[:, 0], js)) * d * weights, axis=1)
    return complex(out[0]) if scalar else out


def singular_function_Z(n, k, rotations, psi):
    """Normalized singular function ``E_n^k(., psi) / mu_n(psi)`` for fixed ``psi``."""
    m = mu(n, psi)
    if m < 1e-14:
        raise SingularValueError(f"mu_{n}({psi}) = {m:.3g} vanishes")
    return singular_function_E(n, k, rotations, psi) / m


# ---------------------------------------------------------------------------
# Tables


@dataclass(frozen=True, eq=False)
class SingularValueTable:
    """Singular values for ``n = 0..nmax`` in ``full`` or ``fixed`` mode."""

    nmax: int
    mode: str
    values: np.ndarray = field(repr=False)
    psi: float | None = None

    def __post_init__(self):
        if self.mode not in ("full", "fixed"):
            raise ValueError("mode must be 'full' or 'fixed'")
        if self.mode == "fixed" and self.psi is None:
            raise ValueError("fixed mode needs psi")

    def normalized(self):
        """``sigma_n sqrt(n+1)`` (full) or ``(n+1/2) mu_n^2`` (fixed)."""
        n = np.arange(self.nmax + 1)
        if self.mode == "full":
            return self.values * np.sqrt(n + 1.0)
        return (n + 0.5) * self.values ** 2

    def limits(self):
        """Large-degree limit of ``(n+1/2) mu_n^2`` per row (fixed mode)."""
        return np.array([2.0 * mu_limit(parity_of(n), self.psi) for n in range(self.nmax + 1)])

    def to_csv(self):
        n = np.arange(self.nmax + 1)
        norm = self.normalized()
        if self.mode == "full":
            lines = ["n,sigma,normalized_sigma"]
            lines += [f"{i},{format_float(v)},{format_float(w)}" for i, v, w in zip(n, self.values, norm)]
        else:
            lim = self.limits()
            lines = ["n,psi,mu,normalized_mu2,limit"]
            lines += [f"{i},{format_float(self.psi)},{format_float(v)},{format_float(w)},{format_float(L)}"
                      for i, v, w, L in zip(n, self.values, norm, lim)]
        return "\n".join(lines) + "\n"

    def write_csv(self, path):
        atomic_write_text(path, self.to_csv())


def singular_value_table(nmax, mode="full", psi=None):
    if mode == "full":
        return SingularValueTable(nmax, "full", np.array([sigma(n) for n in range(nmax + 1)]))
    if psi is None:
        raise ValueError("fixed mode needs psi")
    return SingularValueTable(nmax, "fixed", np.array([mu(n, psi) for n in range(nmax + 1)]), psi)
