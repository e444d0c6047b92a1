r"""
Rotations in zyz Euler angles, Wigner functions and Fourier analysis on SO(3).

A rotation is :math:`Q(\alpha, \beta, \gamma) = R_3(\alpha) R_2(\beta)
R_3(\gamma)` and the Wigner D-functions are

.. math::
    D_n^{k,j}(Q) = e^{-ik\alpha} d_n^{k,j}(\cos\beta) e^{-ij\gamma},

so that :math:`Y_n^k(Q^{-1}\xi) = \sum_j D_n^{j,k}(Q) Y_n^j(\xi)`.

Rotational coefficients are stored flat, ordered by degree ``n``, then the
first order ``j`` (tied to alpha), then the second order ``k`` (tied to
gamma).  Within degree ``n`` the block is a ``(2n+1, 2n+1)`` array indexed
``[j + n, k + n]``.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ._util import ordered_map
from .errors import DomainError, ExactnessWarning

TWO_PI = 2.0 * math.pi
EIGHT_PI2 = 8.0 * math.pi ** 2


@dataclass(frozen=True)
class EulerRotation:
    """zyz Euler angles in radians."""

    alpha: float
    beta: float
    gamma: float

    def __array__(self, dtype=None, copy=None):
        return np.array([self.alpha, self.beta, self.gamma], dtype=dtype)

    def matrix(self):
        return euler_to_matrix(self)

    def inverse_apply(self, points):
        """Apply ``Q^{-1}`` to points of shape ``(..., 3)``."""
        return np.asarray(points, dtype=float) @ self.matrix()


def as_eulers(rotations):
    """Coerce rotations to an ``(M, 3)`` array of Euler angles."""
    if isinstance(rotations, EulerRotation):
        return np.asarray(rotations, dtype=float)[None, :]
    if isinstance(rotations, (list, tuple)) and rotations and isinstance(rotations[0], EulerRotation):
        return np.array([np.asarray(r, dtype=float) for r in rotations])
    arr = np.asarray(rotations, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.shape[-1] != 3:
        raise ValueError("Euler angles must have shape (M, 3)")
    return arr


def rot_z(angle):
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rot_y(angle):
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def euler_to_matrix(r):
    """Rotation matrix ``R3(alpha) R2(beta) R3(gamma)``.

    Accepts an :class:`EulerRotation` (returns ``(3, 3)``) or an ``(M, 3)``
    array of angles (returns ``(M, 3, 3)``).
    """
    if isinstance(r, EulerRotation):
        return euler_to_matrix(np.asarray(r, dtype=float)[None, :])[0]
    e = np.asarray(r, dtype=float)
    a, b, g = e[..., 0], e[..., 1], e[..., 2]
    ca, sa, cb, sb, cg, sg = np.cos(a), np.sin(a), np.cos(b), np.sin(b), np.cos(g), np.sin(g)
    m = np.empty(e.shape[:-1] + (3, 3))
    m[..., 0, 0] = ca * cb * cg - sa * sg
    m[..., 0, 1] = -ca * cb * sg - sa * cg
    m[..., 0, 2] = ca * sb
    m[..., 1, 0] = sa * cb * cg + ca * sg
    m[..., 1, 1] = -sa * cb * sg + ca * cg
    m[..., 1, 2] = sa * sb
    m[..., 2, 0] = -sb * cg
    m[..., 2, 1] = sb * sg
    m[..., 2, 2] = cb
    return m


def is_rotation(m, tol=1e-12):
    m = np.asarray(m, dtype=float)
    return (m.shape == (3, 3)
            and np.max(np.abs(m.T @ m - np.eye(3))) <= tol
            and abs(np.linalg.det(m) - 1.0) <= tol)


def _wrap(angle):
    a = math.fmod(angle, TWO_PI)
    if a < 0.0:
        a += TWO_PI
    return 0.0 if a >= TWO_PI else a


def matrix_to_euler(m, tol=1e-8):
    """zyz Euler angles of a rotation matrix.

    In the gimbal cases ``beta`` in {0, pi} the angle ``gamma`` is set to 0
    and ``alpha`` absorbs the remaining rotation about the z-axis.
    """
    m = np.asarray(m, dtype=float)
    if not is_rotation(m, tol):
        raise DomainError("matrix is not a rotation (orthogonality or determinant check failed)")
    sb = math.hypot(m[2, 0], m[2, 1])
    beta = math.atan2(sb, m[2, 2])
    if sb < 1e-12:
        if m[2, 2] > 0.0:
            return EulerRotation(_wrap(math.atan2(m[1, 0], m[0, 0])), 0.0, 0.0)
        return EulerRotation(_wrap(math.atan2(-m[1, 0], -m[0, 0])), math.pi, 0.0)
    alpha = math.atan2(m[1, 2], m[0, 2])
    gamma = math.atan2(m[2, 1], -m[2, 0])
    return EulerRotation(_wrap(alpha), beta, _wrap(gamma))


# ---------------------------------------------------------------------------
# Wigner d-functions


def _seed_values(n, a, b, c, s):
    """d_n^{a,b} for entries with max(|a|,|b|) == n (single-term sum).

    ``a``, ``b`` are integer arrays, ``c = cos(beta/2)``, ``s = sin(beta/2)``.
    Returns shape ``c.shape + a.shape``.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    s0 = np.maximum(0, b - a)
    lg = np.vectorize(lambda x: math.lgamma(x + 1.0), otypes=[float])
    logp = (0.5 * (lg(n + a) + lg(n - a) + lg(n + b) + lg(n - b))
            - lg(n + b - s0) - lg(s0) - lg(a - b + s0) - lg(n - a - s0))
    sign = np.where((a - b + s0) % 2, -1.0, 1.0)
    pc = 2 * n + b - a - 2 * s0
    ps = a - b + 2 * s0
    c = np.asarray(c, dtype=float)[..., None]
    s = np.asarray(s, dtype=float)[..., None]
    return sign * np.exp(logp) * c ** pc * s ** ps


def _boundary(n):
    """Orders (a, b) with max(|a|, |b|) == n, and their block positions."""
    rng = np.arange(-n, n + 1)
    aa, bb = np.meshgrid(rng, rng, indexing="ij")
    mask = np.maximum(np.abs(aa), np.abs(bb)) == n
    return aa[mask], bb[mask], mask


def wigner_d_blocks(nmax, beta):
    """Yield ``(n, block)`` for ``n = 0..nmax``.

    ``block`` has shape ``beta.shape + (2n+1, 2n+1)`` with
    ``block[..., a+n, b+n] = d_n^{a,b}(cos beta)``.  Each degree follows from
    the two previous ones by the three-term recurrence in ``n``; entries first
    appearing at degree ``n`` are seeded from the closed single-term formula
    in half-angle form.
    """
    beta = np.asarray(beta, dtype=float)
    t = np.cos(beta)
    c = np.cos(0.5 * beta)
    s = np.sin(0.5 * beta)
    cur = np.ones(beta.shape + (1, 1))
    prev = None
    yield 0, cur
    for n in range(0, nmax):
        m = n + 1
        nxt = np.empty(beta.shape + (2 * m + 1, 2 * m + 1))
        if n == 0:
            nxt[..., 1, 1] = t
        else:
            rng = np.arange(-n, n + 1, dtype=float)
            a = rng[:, None]
            b = rng[None, :]
            den = n * np.sqrt(((n + 1.0) ** 2 - a * a) * ((n + 1.0) ** 2 - b * b))
            c1 = (2 * n + 1.0) * n * (n + 1.0) / den
            c0 = -(2 * n + 1.0) * a * b / den
            c2 = (n + 1.0) * np.sqrt(np.maximum(n * n - a * a, 0.0) * np.maximum(n * n - b * b, 0.0)) / den
            inner = (c1 * t[..., None, None] + c0) * cur
            inner[..., 1:-1, 1:-1] -= c2[1:-1, 1:-1] * prev
            nxt[..., 1:-1, 1:-1] = inner
        ab, bb, mask = _boundary(m)
        nxt[..., mask] = _seed_values(m, ab, bb, c, s)
        prev, cur = cur, nxt
        yield m, cur


def _wigner_d_beta(n, k, j, beta):
    if n < 0 or abs(k) > n or abs(j) > n:
        raise DomainError(f"need |k|, |j| <= n, got n={n}, k={k}, j={j}")
    beta = np.asarray(beta, dtype=float)
    c = np.cos(0.5 * beta)
    s = np.sin(0.5 * beta)
    t = np.cos(beta)
    lo = max(abs(k), abs(j))
    cur = _seed_values(lo, np.array(k), np.array(j), c, s)[..., 0]
    prev = np.zeros_like(cur)
    for i in range(lo, n):
        if i == 0:
            prev, cur = cur, t * cur
            continue
        den = i * math.sqrt(((i + 1.0) ** 2 - k * k) * ((i + 1.0) ** 2 - j * j))
        c1 = (2 * i + 1.0) * (i * (i + 1.0) * t - k * j) / den
        c2 = (i + 1.0) * math.sqrt((i * i - k * k) * (i * i - j * j)) / den
        prev, cur = cur, c1 * cur - c2 * prev
    return cur


def wigner_d(n, k, j, t):
    """Wigner d-function ``d_n^{k,j}(t)`` with ``t = cos(beta)``."""
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1.0):
        raise DomainError("Wigner d argument must satisfy |t| <= 1")
    out = _wigner_d_beta(n, k, j, np.arccos(t))
    return out if out.ndim else float(out)


def wigner_D(n, k, j, r):
    """Wigner D-function ``D_n^{k,j}`` at a rotation."""
    e = as_eulers(r)
    a, b, g = e[:, 0], e[:, 1], e[:, 2]
    out = np.exp(-1j * k * a) * _wigner_d_beta(n, k, j, b) * np.exp(-1j * j * g)
    return complex(out[0]) if isinstance(r, EulerRotation) or np.ndim(r) == 1 else out


def wigner_D_matrix(n, r):
    """``(2n+1, 2n+1)`` matrix of ``D_n^{a,b}(r)`` indexed ``[a+n, b+n]``."""
    e = as_eulers(r)[0]
    for deg, blk in wigner_d_blocks(n, np.array([e[1]])):
        if deg == n:
            orders = np.arange(-n, n + 1)
            return (np.exp(-1j * orders * e[0])[:, None] * blk[0]
                    * np.exp(-1j * orders * e[2])[None, :])
    raise AssertionError("unreachable")


def so3_offset(n):
    """Flat offset of degree ``n`` in rotational coefficient storage."""
    return n * (2 * n - 1) * (2 * n + 1) // 3


def so3_size(nmax):
    return so3_offset(nmax + 1)


def so3_index(n, j, k):
    return so3_offset(n) + (j + n) * (2 * n + 1) + (k + n)


def wigner_D_table(nmax, rotations):
    """All ``D_n^{j,k}`` with ``n <= nmax`` at ``M`` rotations.

    Returns a complex array of shape ``(M, so3_size(nmax))`` in the flat
    coefficient order.
    """
    e = as_eulers(rotations)
    out = np.empty((e.shape[0], so3_size(nmax)), dtype=complex)
    for n, blk in wigner_d_blocks(nmax, e[:, 1]):
        orders = np.arange(-n, n + 1)
        ea = np.exp(-1j * np.outer(e[:, 0], orders))
        eg = np.exp(-1j * np.outer(e[:, 2], orders))
        d = ea[:, :, None] * blk * eg[:, None, :]
        out[:, so3_offset(n):so3_offset(n + 1)] = d.reshape(e.shape[0], -1)
    return out


@dataclass(frozen=True, eq=False)
class RotationalCoeffs:
    """Rotational Fourier coefficients up to degree ``nmax``."""

    nmax: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).reshape(-1)
        if self.nmax < 0 or c.size != so3_size(self.nmax):
            raise ValueError(f"expected {so3_size(self.nmax)} coefficients, got {c.size}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_blocks(cls, blocks):
        nmax = len(blocks) - 1
        return cls(nmax, np.concatenate([np.asarray(b, dtype=complex).reshape(-1) for b in blocks]))

    def __getitem__(self, njk):
        n, j, k = njk
        if not 0 <= n <= self.nmax or abs(j) > n or abs(k) > n:
            raise IndexError(f"(n, j, k) = {njk} out of range")
        return complex(self.coeffs[so3_index(n, j, k)])

    def block(self, n):
        """Degree-``n`` coefficients as a ``(2n+1, 2n+1)`` array ``[j+n, k+n]``."""
        return self.coeffs[so3_offset(n):so3_offset(n + 1)].reshape(2 * n + 1, 2 * n + 1)

    def to_json_obj(self):
        entries = []
        for n in range(self.nmax + 1):
            blk = self.block(n)
            for j in range(-n, n + 1):
                for k in range(-n, n + 1):
                    v = blk[j + n, k + n]
                    entries.append({"n": n, "j": j, "k": k,
                                    "re": float(v.real), "im": float(v.imag)})
        return {"nmax": self.nmax, "coeffs": entries}

    @classmethod
    def from_json_obj(cls, obj):
        nmax = int(obj["nmax"])
        c = np.zeros(so3_size(nmax), dtype=complex)
        count = 0
        for e in obj["coeffs"]:
            n, j, k = int(e["n"]), int(e["j"]), int(e["k"])
            if not 0 <= n <= nmax or abs(j) > n or abs(k) > n:
                raise ValueError(f"coefficient index (n={n}, j={j}, k={k}) out of range")
            c[so3_index(n, j, k)] = complex(float(e["re"]), float(e["im"]))
            count += 1
        if count != so3_size(nmax):
            raise ValueError(f"expected {so3_size(nmax)} coefficient entries, got {count}")
        return cls(nmax, c)

    def to_json(self):
        return json.dumps(self.to_json_obj(), indent=1)

    @classmethod
    def from_json(cls, text):
        return cls.from_json_obj(json.loads(text))


# ---------------------------------------------------------------------------
# Transforms on SO(3) by direct summation, grouped by distinct beta


class _BetaGroups:
    def __init__(self, eulers, nmax):
        self.eulers = eulers
        self.ubeta, inv = np.unique(eulers[:, 1], return_inverse=True)
        self.inv = inv.reshape(-1)
        self.order = np.argsort(self.inv, kind="stable")
        counts = np.bincount(self.inv, minlength=self.ubeta.size)
        self.starts = np.concatenate([[0], np.cumsum(counts)])
        width = 2 * nmax + 1
        self.beta_chunk = max(1, (1 << 19) // (width * width))
        self.node_chunk = max(1, (1 << 20) // (width * width))

    def chunks(self):
        nb = self.ubeta.size
        return [(b0, min(b0 + self.beta_chunk, nb)) for b0 in range(0, nb, self.beta_chunk)]

    def node_slices(self, b0, b1):
        lo, hi = self.starts[b0], self.starts[b1]
        for i in range(lo, hi, self.node_chunk):
            yield self.order[i:min(i + self.node_chunk, hi)]


def rotational_synthesize(coeffs, rotations):
    """Evaluate ``sum_n sum_{j,k} g_n^{j,k} D_n^{j,k}`` at the given rotations."""
    e = as_eulers(rotations)
    nmax = coeffs.nmax
    width = 2 * nmax + 1
    orders = np.arange(-nmax, nmax + 1)
    groups = _BetaGroups(e, nmax)
    blocks = [coeffs.block(n) for n in range(nmax + 1)]

    def task(span):
        b0, b1 = span
        h = np.zeros((b1 - b0, width, width), dtype=complex)
        for n, blk in wigner_d_blocks(nmax, groups.ubeta[b0:b1]):
            sl = slice(nmax - n, nmax + n + 1)
            h[:, sl, sl] += blk * blocks[n]
        parts = []
        for idx in groups.node_slices(b0, b1):
            ea = np.exp(-1j * np.outer(e[idx, 0], orders))
            eg = np.exp(-1j * np.outer(e[idx, 2], orders))
            row = np.matmul(ea[:, None, :], h[groups.inv[idx] - b0])[:, 0, :]
            parts.append((idx, np.sum(row * eg, axis=1)))
        return parts

    out = np.zeros(e.shape[0], dtype=complex)
    for parts in ordered_map(task, groups.chunks()):
        for idx, vals in parts:
            out[idx] = vals
    return out


def rotational_analyze_values(values, weights, rotations, nmax):
    r"""Rotational Fourier coefficients from values at quadrature nodes.

    .. math::
        \hat g_n^{j,k} = \frac{2n+1}{8\pi^2} \sum_m w_m g(Q_m)
        \overline{D_n^{j,k}(Q_m)}
    """
    e = as_eulers(rotations)
    a = np.asarray(weights, dtype=float) * np.asarray(values, dtype=complex)
    width = 2 * nmax + 1
    orders = np.arange(-nmax, nmax + 1)
    groups = _BetaGroups(e, nmax)

    def task(span):
        b0, b1 = span
        g = np.zeros((b1 - b0, width, width), dtype=complex)
        for idx in groups.node_slices(b0, b1):
            ea = a[idx, None] * np.exp(1j * np.outer(e[idx, 0], orders))
            eg = np.exp(1j * np.outer(e[idx, 2], orders))
            outer = ea[:, :, None] * eg[:, None, :]
            gid = groups.inv[idx]
            starts = np.concatenate([[0], np.flatnonzero(np.diff(gid)) + 1])
            g[gid[starts] - b0] += np.add.reduceat(outer, starts, axis=0)
        res = []
        for n, blk in wigner_d_blocks(nmax, groups.ubeta[b0:b1]):
            sl = slice(nmax - n, nmax + n + 1)
            res.append(np.sum(blk * g[:, sl, sl], axis=0))
        return res

    total = [np.zeros((2 * n + 1, 2 * n + 1), dtype=complex) for n in range(nmax + 1)]
    for res in ordered_map(task, groups.chunks()):
        for n in range(nmax + 1):
            total[n] += res[n]
    return RotationalCoeffs.from_blocks(
        [(2 * n + 1) / EIGHT_PI2 * total[n] for n in range(nmax + 1)])


def rotational_analyze(g, quad, nmax):
    """Rotational Fourier coefficients of ``g`` by an SO(3) quadrature rule.

    ``g`` is a function of an ``(M, 3)`` array of Euler angles or its values
    at the nodes.  Exact for functions of degree ``nmax`` when the rule is
    exact to degree ``2*nmax``; otherwise an :class:`ExactnessWarning` is
    issued.
    """
    if quad.exactness < 2 * nmax:
        warnings.warn(f"SO(3) rule exact to degree {quad.exactness} < 2*nmax = {2 * nmax}",
                      ExactnessWarning, stacklevel=2)
    values = g(quad.nodes) if callable(g) else g
    return rotational_analyze_values(values, quad.weights, quad.nodes, nmax)
