"""
Quadrature rules on the sphere and on SO(3).

Rules carry a declared exactness degree: an S2 rule of exactness ``N``
integrates every spherical harmonic of degree ``<= N``; an SO(3) rule of
exactness ``N`` integrates every Wigner D-function of degree ``<= N``.

Node files are plain text::

    # type=so3 exactness=16
    alpha,beta,gamma,weight
    ...

or, for the sphere, ``# type=s2 exactness=N`` followed by rows
``phi,theta,weight``.  Angles are in radians.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from ._util import atomic_write_text, format_float
from .errors import QuadratureFormatError
from .rotation import EIGHT_PI2, as_eulers, wigner_D_table
from .sphere import angles_to_xyz, as_points, sph_harm_table, xyz_to_angles


def _frozen(arr):
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


def _check_weights(weights):
    if weights.ndim != 1 or weights.size == 0:
        raise ValueError("weights must be a non-empty 1-d array")
    if np.any(weights <= 0.0) or np.any(~np.isfinite(weights)):
        raise ValueError("quadrature weights must be positive and finite")


@dataclass(frozen=True, eq=False)
class QuadratureS2:
    """Nodes on the sphere as ``(M, 3)`` unit vectors with positive weights."""

    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    exactness: int
    # (phi, theta) as given, when built from angles
    source_angles: tuple | None = field(default=None, repr=False)

    def __post_init__(self):
        nodes = as_points(self.nodes)
        nodes = nodes / np.linalg.norm(nodes, axis=1, keepdims=True)
        weights = np.asarray(self.weights, dtype=float).reshape(-1)
        _check_weights(weights)
        if nodes.shape[0] != weights.size:
            raise ValueError("number of nodes and weights differ")
        object.__setattr__(self, "nodes", _frozen(nodes))
        object.__setattr__(self, "weights", _frozen(weights))

    @classmethod
    def from_angles(cls, phi, theta, weights, exactness):
        phi = _frozen(np.ravel(phi))
        theta = _frozen(np.ravel(theta))
        return cls(angles_to_xyz(phi, theta), weights, exactness, (phi, theta))

    def __len__(self):
        return self.weights.size

    def angles(self):
        if self.source_angles is not None:
            return self.source_angles
        return xyz_to_angles(self.nodes)

    def integrate(self, values):
        return np.sum(self.weights * np.asarray(values))


@dataclass(frozen=True, eq=False)
class QuadratureSO3:
    """Nodes on SO(3) as ``(M, 3)`` zyz Euler angles with positive weights."""

    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    exactness: int

    def __post_init__(self):
        nodes = as_eulers(self.nodes)
        weights = np.asarray(self.weights, dtype=float).reshape(-1)
        _check_weights(weights)
        if nodes.shape[0] != weights.size:
            raise ValueError("number of nodes and weights differ")
        object.__setattr__(self, "nodes", _frozen(nodes))
        object.__setattr__(self, "weights", _frozen(weights))

    def __len__(self):
        return self.weights.size

    def integrate(self, values):
        return np.sum(self.weights * np.asarray(values))


def trapezoid_nodes(n):
    """``n`` equispaced nodes on [0, 2pi) with weights ``2pi/n``.

    Exact for trigonometric polynomials of degree ``n - 1``.
    """
    return 2.0 * math.pi * np.arange(n) / n, np.full(n, 2.0 * math.pi / n)


def _gl_count(degree):
    return (degree + 2) // 2


def gauss_legendre_s2(degree):
    """Gauss--Legendre in ``cos(theta)`` times a trapezoidal rule in ``phi``.

    Uses ``ceil((degree+1)/2)`` polar and ``degree+1`` azimuthal nodes.
    """
    if degree < 0:
        raise ValueError("degree must be >= 0")
    t, wt = np.polynomial.legendre.leggauss(_gl_count(degree))
    phi, wp = trapezoid_nodes(degree + 1)
    theta = np.arccos(t)
    pp, tt = np.meshgrid(phi, theta, indexing="ij")
    w = np.outer(wp, wt)
    return QuadratureS2.from_angles(pp.ravel(), tt.ravel(), w.ravel(), degree)


def gauss_legendre_so3(degree):
    """Tensor-product rule on SO(3).

    Trapezoidal in alpha and gamma (``degree+1`` nodes each) and
    Gauss--Legendre in ``cos(beta)`` (``ceil((degree+1)/2)`` nodes), giving
    ``(degree+1)**2 * ceil((degree+1)/2)`` nodes in total.
    """
    if degree < 0:
        raise ValueError("degree must be >= 0")
    t, wt = np.polynomial.legendre.leggauss(_gl_count(degree))
    ang, wa = trapezoid_nodes(degree + 1)
    beta = np.arccos(t)
    aa, bb, gg = np.meshgrid(ang, beta, ang, indexing="ij")
    w = wa[:, None, None] * wt[None, :, None] * wa[None, None, :]
    nodes = np.stack([aa.ravel(), bb.ravel(), gg.ravel()], axis=1)
    return QuadratureSO3(nodes, w.ravel(), degree)


def s1_x_s2_so3(s2quad, degree):
    """Product of a trapezoidal rule in alpha with a rule on the sphere.

    Each sphere node with azimuth ``phi`` and polar angle ``theta`` becomes
    ``beta = theta`` and ``gamma = phi``; alpha takes ``degree+1`` equispaced
    values.
    """
    if s2quad.exactness < degree:
        raise ValueError(f"S2 rule exact to degree {s2quad.exactness} < requested {degree}")
    phi, theta = s2quad.angles()
    ang, wa = trapezoid_nodes(degree + 1)
    aa = np.repeat(ang, phi.size)
    nodes = np.stack([aa, np.tile(theta, ang.size), np.tile(phi, ang.size)], axis=1)
    weights = np.repeat(wa, phi.size) * np.tile(s2quad.weights, ang.size)
    return QuadratureSO3(nodes, weights, degree)


@dataclass(frozen=True)
class ExactnessReport:
    """Largest deviation of the quadrature Gram matrix from the identity."""

    max_residual: float
    nmax: int
    declared_exactness: int
    nodes: int

    def passed(self, tol=1e-10):
        return self.max_residual < tol


def verify_exactness(quad, nmax):
    """Orthonormality residual of the basis up to degree ``nmax`` under ``quad``.

    The basis is normalized (``Y_n^k`` on the sphere, ``sqrt((2n+1)/8pi^2)
    D_n^{j,k}`` on SO(3)) so that an exact rule gives the identity Gram
    matrix.  For ``nmax = 0`` the residual is the relative error of the total
    weight.
    """
    if isinstance(quad, QuadratureSO3):
        v = wigner_D_table(nmax, quad.nodes)
        scale = np.concatenate([np.full((2 * n + 1) ** 2, math.sqrt((2 * n + 1) / EIGHT_PI2))
                                for n in range(nmax + 1)])
        v = v * scale[None, :]
    elif isinstance(quad, QuadratureS2):
        v = sph_harm_table(nmax, quad.nodes)
    else:
        raise TypeError("expected QuadratureS2 or QuadratureSO3")
    gram = (np.conj(v) * quad.weights[:, None]).T @ v
    resid = float(np.max(np.abs(gram - np.eye(gram.shape[0]))))
    return ExactnessReport(resid, nmax, quad.exactness, len(quad))


# ---------------------------------------------------------------------------
# Node files

_HEADER = re.compile(r"^#\s*type\s*=\s*(so3|s2)\s+exactness\s*=\s*(-?\d+)\s*$")


def _format_rows(rows):
    return "".join(",".join(format_float(x) for x in row) + "\n" for row in rows)


def save_nodes(quad, path):
    """Write a rule in the node-file format; floats round-trip exactly."""
    if isinstance(quad, QuadratureSO3):
        head = f"# type=so3 exactness={quad.exactness}\n"
        rows = np.column_stack([quad.nodes, quad.weights])
    else:
        phi, theta = quad.angles()
        head = f"# type=s2 exactness={quad.exactness}\n"
        rows = np.column_stack([phi, theta, quad.weights])
    atomic_write_text(path, head + _format_rows(rows))


def load_nodes(path):
    """Read a node file and return a :class:`QuadratureS2` or :class:`QuadratureSO3`."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise QuadratureFormatError(f"{path}: empty file")
    m = _HEADER.match(lines[0].strip())
    if not m:
        raise QuadratureFormatError(
            f"{path}:1: expected header '# type=so3|s2 exactness=<int>'")
    kind, exactness = m.group(1), int(m.group(2))
    ncol = 4 if kind == "so3" else 3
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split(",")
        if len(parts) != ncol:
            raise QuadratureFormatError(
                f"{path}:{lineno}: expected {ncol} comma-separated values, got {len(parts)}")
        try:
            row = [float(p) for p in parts]
        except ValueError:
            raise QuadratureFormatError(f"{path}:{lineno}: malformed number in {line!r}") from None
        if not all(math.isfinite(x) for x in row):
            raise QuadratureFormatError(f"{path}:{lineno}: non-finite value")
        if row[-1] <= 0.0:
            raise QuadratureFormatError(f"{path}:{lineno}: weight must be positive, got {row[-1]}")
        rows.append(row)
    if not rows:
        raise QuadratureFormatError(f"{path}: no nodes")
    arr = np.array(rows)
    if kind == "so3":
        return QuadratureSO3(arr[:, :3], arr[:, 3], exactness)
    return QuadratureS2.from_angles(arr[:, 0], arr[:, 1], arr[:, 2], exactness)


def load_so3_nodes(path):
    quad = load_nodes(path)
    if not isinstance(quad, QuadratureSO3):
        raise QuadratureFormatError(f"{path}: expected type=so3")
    return quad


def load_s2_nodes(path):
    quad = load_nodes(path)
    if not isinstance(quad, QuadratureS2):
        raise QuadratureFormatError(f"{path}: expected type=s2")
    return quad
