import json
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arctomo.errors import DomainError, ExactnessWarning
from arctomo.inversion import (FilterSpec, ReconstructionReport, add_noise, filter_coefficients,
                               invert, make_phantom, rmse, simulate)
from arctomo.quadrature import gauss_legendre_so3
from arctomo.sphere import SphericalCoeffs


@pytest.fixture(scope="module")
def rule():
    return gauss_legendre_so3(12)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10 ** 6), st.floats(0.05, math.pi - 0.05))
def test_exact_data_round_trip(seed, psi):
    q = gauss_legendre_so3(12)
    c = make_phantom("bandlimited", 6, seed)
    rep = invert(simulate(c, q, psi), 6, truth=c)
    assert np.max(np.abs(rep.coeffs.coeffs - c.coeffs)) < 1e-10
    assert rep.rmse < 1e-10 and rep.residual_norm < 1e-9


def test_filter_parse():
    assert FilterSpec.parse("none") == FilterSpec()
    assert FilterSpec.parse("cutoff:5") == FilterSpec("cutoff", cutoff=5)
    assert FilterSpec.parse("tikhonov:0.01").tau == 0.01
    for bad in ("pinsker", "cutoff", "tikhonov:x", "none:3"):
        with pytest.raises(ValueError):
            FilterSpec.parse(bad)


def test_filter_factors():
    f = FilterSpec("tikhonov", tau=1.0)
    c = [filter_coefficients(f, n, 0.7) for n in range(10)]
    assert all(0 < x < 1 for x in c)
    assert filter_coefficients(FilterSpec("tikhonov", tau=0.0), 3, 0.7) == 1.0
    assert filter_coefficients(FilterSpec("cutoff", cutoff=2), 3, 0.7) == 0.0


def test_cutoff_zeroes_high_degrees(rule):
    c = make_phantom("smooth", 6, 1)
    rep = invert(simulate(c, rule, 0.7), 6, FilterSpec("cutoff", cutoff=3))
    assert np.all(rep.coeffs.coeffs[16:] == 0)
    np.testing.assert_allclose(rep.coeffs.coeffs[:16], c.coeffs[:16], atol=1e-10)


def test_tikhonov_shrinks_towards_zero(rule):
    c = make_phantom("smooth", 6, 1)
    rep = invert(simulate(c, rule, 0.7), 6, FilterSpec("tikhonov", tau=10.0))
    assert np.linalg.norm(rep.coeffs.coeffs) < np.linalg.norm(c.coeffs)


def test_invert_rejects_full_circles(rule):
    meas = simulate(make_phantom("smooth", 2, 0), rule, math.pi)
    with pytest.raises(DomainError):
        invert(meas, 2)


def test_invert_warns_on_coarse_rule():
    q = gauss_legendre_so3(6)
    meas = simulate(make_phantom("smooth", 4, 0), q, 0.7)
    with pytest.warns(ExactnessWarning):
        invert(meas, 4)


def test_noise_is_deterministic_and_recorded(rule):
    meas = simulate(make_phantom("smooth", 4, 0), rule, 0.7)
    a = add_noise(meas, 0.2, 9)
    b = add_noise(meas, 0.2, 9)
    assert np.array_equal(a.values, b.values)
    assert a.noise_sigma == 0.2 and a.noise_seed == 9
    assert np.all(a.values.imag == meas.values.imag)
    assert np.std((a.values - meas.values).real) == pytest.approx(0.2, rel=0.05)
    z = add_noise(meas, 0.0, 9)
    assert np.array_equal(z.values, meas.values)
    with pytest.raises(ValueError):
        add_noise(meas, -1.0, 0)


def test_rmse_definition():
    one = SphericalCoeffs.from_dict(0, {(0, 0): math.sqrt(4 * math.pi)})
    zero = SphericalCoeffs.zeros(3)
    assert rmse(one, zero) == pytest.approx(1.0, rel=1e-14)
    assert rmse(one, one) == 0.0


def test_report_json_round_trip(rule, tmp_path):
    c = make_phantom("smooth", 3, 2)
    meas = add_noise(simulate(c, rule, 0.7), 0.1, 4)
    rep = invert(meas, 3, FilterSpec.parse("tikhonov:0.5"), truth=c)
    path = tmp_path / "r.json"
    rep.write(path)
    obj = json.loads(path.read_text())
    assert obj["filter"] == {"kind": "tikhonov", "tau": 0.5}
    assert obj["seed"] == 4 and obj["noise_sigma"] == 0.1
    assert obj["quadrature"] == {"nodes": len(rule), "exactness": 12}
    back = ReconstructionReport.from_json(path.read_text())
    assert np.array_equal(back.coeffs.coeffs, rep.coeffs.coeffs)
    assert back.rmse == rep.rmse


def test_phantom_determinism_and_decay():
    a = make_phantom("smooth", 10, 7)
    assert np.array_equal(a.coeffs, make_phantom("smooth", 10, 7).coeffs)
    assert not np.array_equal(a.coeffs, make_phantom("smooth", 10, 8).coeffs)
    with pytest.raises(ValueError):
        make_phantom("blobs", 3, 0)
