import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arctomo.arcs import (Arc, ArcMeasurements, arc_from_endpoints, arc_polyline,
                          equator_point, fixed_point_arc, fixed_point_invert,
                          fixed_point_transform, forward_quadrature, forward_spectral,
                          read_measurements, read_polylines, s_factor, write_measurements,
                          write_polylines)
from arctomo.errors import AntipodalError, DegenerateError, DomainError, MeasurementFormatError
from arctomo.inversion import make_phantom
from arctomo.quadrature import gauss_legendre_so3
from arctomo.rotation import EulerRotation, euler_to_matrix, matrix_to_euler
from arctomo.spectral import mu_squared, sigma
from arctomo.sphere import SphericalCoeffs, angles_to_xyz, evaluate

from conftest import random_points, random_rotations


def _richardson(f, arc, k):
    return (4 * forward_quadrature(f, arc, 2 * k) - forward_quadrature(f, arc, k)) / 3


def test_s_factor():
    assert s_factor(0, 0.7) == pytest.approx(1.4)
    assert s_factor(3, 0.7) == pytest.approx(2 * math.sin(2.1) / 3)
    assert s_factor(-3, 0.7) == s_factor(3, 0.7)
    np.testing.assert_allclose(s_factor(np.arange(-2, 3), math.pi)[[0, 1, 3, 4]], 0.0, atol=1e-15)


def test_spectral_matches_extrapolated_quadrature(rng):
    c = make_phantom("bandlimited", 8, 11)
    f = lambda x: evaluate(c, x)
    for r in random_rotations(rng, 10):
        psi = float(rng.uniform(0.05, math.pi))
        arc = Arc(EulerRotation(*r), psi)
        ref = _richardson(f, arc, 4000)
        assert abs(forward_spectral(c, r, psi)[0] - ref) < 1e-10


def test_constant_function_integrates_to_arc_length(rng):
    c = SphericalCoeffs.from_dict(0, {(0, 0): 3.0 * math.sqrt(4 * math.pi)})
    rots = random_rotations(rng, 10)
    np.testing.assert_allclose(forward_spectral(c, rots, 0.9), 2 * 0.9 * 3.0, atol=1e-13)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.floats(0.01, math.pi))
def test_reversed_arc_gives_same_integral(seed, psi):
    rng = np.random.default_rng(seed)
    c = make_phantom("smooth", 6, seed)
    r = random_rotations(rng, 1)[0]
    # rotation by pi about the x-axis maps e_rho to e_{-rho}
    flip = np.diag([1.0, -1.0, -1.0])
    r2 = np.asarray(matrix_to_euler(flip @ euler_to_matrix(EulerRotation(*r)))).reshape(1, 3)
    assert abs(forward_spectral(c, r, psi)[0] - forward_spectral(c, r2, psi)[0]) < 1e-11


def test_full_circle_is_scaled_funk_radon(rng):
    c = make_phantom("bandlimited", 6, 2)
    for r in random_rotations(rng, 5):
        e = EulerRotation(*r)
        rho = 2 * math.pi * np.arange(400) / 400
        mean = np.mean(evaluate(c, e.inverse_apply(equator_point(rho))))
        assert forward_spectral(c, r, math.pi)[0] == pytest.approx(2 * math.pi * mean, abs=1e-11)


def test_norm_identity_over_half_lengths():
    # integrating mu_n(psi)^2 over [0, pi] gives sigma_n^2
    for n in (0, 1, 4, 7):
        total = mp.quad(lambda p: mu_squared(n, float(p)), [0, math.pi / 2, math.pi])
        assert float(total) == pytest.approx(sigma(n) ** 2, rel=1e-10)


def test_mu_is_norm_of_transformed_harmonic():
    q = gauss_legendre_so3(16)
    for n, k in [(2, 1), (5, -3)]:
        c = SphericalCoeffs.from_dict(n, {(n, k): 1.0})
        g = forward_spectral(c, q.nodes, 1.1)
        assert np.sum(q.weights * np.abs(g) ** 2) == pytest.approx(mu_squared(n, 1.1), rel=1e-11)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_arc_from_endpoints(seed):
    rng = np.random.default_rng(seed)
    xi, zeta = random_points(rng, 2)
    if xi @ zeta < -1 + 1e-6:
        return
    arc = arc_from_endpoints(xi, zeta)
    a, b = arc.endpoints()
    np.testing.assert_allclose(a, xi, atol=1e-10)
    np.testing.assert_allclose(b, zeta, atol=1e-10)
    assert 2 * arc.half_length == pytest.approx(math.acos(np.clip(xi @ zeta, -1, 1)), abs=1e-9)


def test_arc_from_endpoints_errors():
    with pytest.raises(AntipodalError):
        arc_from_endpoints([0, 0, 1], [0, 0, -1])
    with pytest.raises(DegenerateError):
        arc_from_endpoints([1, 0, 0], [1, 0, 0])


def test_arc_from_nearby_endpoints():
    arc = arc_from_endpoints([1, 0, 0], [1, 1e-7, 0])
    assert arc.half_length == pytest.approx(0.5e-7, rel=1e-6)


def test_arc_validates_half_length():
    with pytest.raises(DomainError):
        Arc(EulerRotation(0, 0, 0), 3.5)


def test_fixed_point_arc_runs_from_north_pole():
    phi, theta = 0.8, 1.9
    arc = fixed_point_arc(phi, theta)
    ends = arc.endpoints()
    target = angles_to_xyz(phi, theta)
    north = np.array([0.0, 0.0, 1.0])
    assert any(np.allclose(p, north, atol=1e-12) for p in ends)
    assert any(np.allclose(p, target, atol=1e-12) for p in ends)


@settings(max_examples=20, deadline=None)
@given(st.floats(0, 2 * math.pi), st.floats(0.05, math.pi))
def test_meridian_integral_equals_arc_transform(phi, theta):
    c = make_phantom("smooth", 5, 4)
    f = lambda x: evaluate(c, x)
    arc = fixed_point_arc(phi, theta)
    spec = forward_spectral(c, np.asarray(arc.rotation), arc.half_length)[0]
    quad = fixed_point_transform(f, phi, theta, 4000)
    quad2 = fixed_point_transform(f, phi, theta, 8000)
    assert abs(spec - (4 * quad2 - quad) / 3) < 1e-10


def test_fixed_point_transform_zero_length():
    assert fixed_point_transform(lambda x: np.ones(len(x)), 0.3, 0.0, 10) == 0.0


def test_fixed_point_invert_recovers_values():
    c = make_phantom("smooth", 4, 9)
    f = lambda x: evaluate(c, x)
    bf = lambda p, t: fixed_point_transform(f, p, t, 2000)
    est = fixed_point_invert(bf, 1.0, 1.2, 1e-3)
    assert est == pytest.approx(evaluate(c, angles_to_xyz(1.0, 1.2)[None])[0], abs=1e-5)
    with pytest.raises(DomainError):
        fixed_point_invert(bf, 1.0, 0.01, 0.1)


def test_polylines_round_trip(tmp_path):
    q = gauss_legendre_so3(2)
    lines = [arc_polyline(Arc(EulerRotation(*r), 0.2), 8) for r in q.nodes]
    path = tmp_path / "arcs.csv"
    write_polylines(path, lines)
    back = read_polylines(path)
    assert len(back) == len(q)
    assert all(np.array_equal(a, b) for a, b in zip(lines, back))
    np.testing.assert_allclose(np.linalg.norm(back[0], axis=1), 1.0)


def test_measurements_round_trip(tmp_path, rng):
    rots = random_rotations(rng, 7)
    vals = rng.normal(size=7) + 1j * rng.normal(size=7)
    vals[0] = complex(0.0, -0.0)
    meas = ArcMeasurements(0.7, rots, rng.uniform(0.1, 1, 7), vals, exactness=3,
                           noise_sigma=0.1, noise_seed=5)
    path = tmp_path / "m.csv"
    write_measurements(path, meas)
    back = read_measurements(path)
    assert back.psi == 0.7 and back.exactness == 3
    assert back.noise_sigma == 0.1 and back.noise_seed == 5
    assert np.array_equal(back.rotations, meas.rotations)
    assert np.array_equal(back.weights, meas.weights)
    assert np.array_equal(back.values.view(float), meas.values.view(float))


def test_measurements_parse_errors(tmp_path):
    path = tmp_path / "m.csv"
    path.write_text("0,0,0,1,0,0\n")
    with pytest.raises(MeasurementFormatError):
        read_measurements(path)
    path.write_text("# psi=0.5\n0,0,0,1,0\n")
    with pytest.raises(MeasurementFormatError, match=":2:"):
        read_measurements(path)
