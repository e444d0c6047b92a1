import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arctomo.errors import DomainError, SingularValueError
from arctomo.quadrature import gauss_legendre_so3
from arctomo.spectral import (mu, mu_limit, mu_squared, normalized_mu2, sigma, sigma_bounds,
                              singular_function_E, singular_function_Z, singular_value_table,
                              wallis_sequence)
from arctomo.sphere import legendre_at_zero_sq


def _sigma_oracle(n):
    # exact double-factorial values, 50 digits
    mp.mp.dps = 50

    def p0sq(n, j):
        if (n + j) % 2:
            return mp.mpf(0)
        a, b = (n - j) // 2, (n + j) // 2
        r = lambda p: mp.fac2(2 * p - 1) / mp.fac2(2 * p) if p else mp.mpf(1)
        return (2 * n + 1) / (4 * mp.pi) * r(a) * r(b)

    s = mp.pi ** 2 / 3 * p0sq(n, 0) + mp.fsum(p0sq(n, j) / j ** 2 for j in range(1, n + 1))
    return float(mp.sqrt(32 * mp.pi ** 3 / (2 * n + 1) * s))


def test_low_degree_closed_forms():
    assert sigma(0) == pytest.approx(math.sqrt(8 * math.pi ** 4 / 3), rel=1e-15)
    assert sigma(1) == pytest.approx(2 * math.pi, rel=1e-15)


@pytest.mark.parametrize("n", [0, 1, 2, 3, 10, 51, 200])
def test_sigma_matches_high_precision(n):
    assert sigma(n) == pytest.approx(_sigma_oracle(n), rel=1e-13)


def test_sigma_bounds_hold():
    for n in range(120):
        lo, hi = sigma_bounds(n)
        assert lo <= sigma(n) * math.sqrt(n + 1) <= hi


def test_legendre_zero_bounds():
    for n in range(80):
        for j in range(-n, n + 1):
            if (n + j) % 2 == 0:
                v = legendre_at_zero_sq(n, j)
                root = math.sqrt((n + 1) ** 2 - j * j)
                assert (2 * n + 1) / (2 * math.pi ** 2 * root) <= v <= (2 * n + 1) / (4 * math.pi * root)


@pytest.mark.parametrize("psi", [0.1, 0.7, 1.5, 2.0, 3.0])
def test_fixed_length_low_degrees(psi):
    assert (0.5 * mu(0, psi) ** 2) == pytest.approx(4 * math.pi * psi ** 2, rel=1e-13)
    assert (1.5 * mu(1, psi) ** 2) == pytest.approx(12 * math.pi * math.sin(psi) ** 2, rel=1e-13)


def test_odd_singular_values_vanish_for_full_circles():
    for n in range(1, 40, 2):
        assert mu(n, math.pi) < 1e-12
    with pytest.raises(SingularValueError):
        singular_function_Z(3, 1, np.zeros(3), math.pi)


def test_normalized_mu2_approaches_limit():
    for psi in (0.5, 2.5):
        for n in (400, 401):
            par = "odd" if n % 2 else "even"
            assert normalized_mu2(n, psi) == pytest.approx(mu_limit(par, psi), rel=0.02)


def test_mu_limit_is_continuous_at_quarter_circle():
    a = mu_limit("odd", math.pi / 2)
    assert mu_limit("even", math.pi / 2 + 1e-12) == pytest.approx(a)
    assert mu_limit("odd", math.pi / 2 + 1e-12) == pytest.approx(a)


def test_domain_errors():
    with pytest.raises(DomainError):
        mu(2, -0.1)
    with pytest.raises(DomainError):
        sigma(-1)
    with pytest.raises(ValueError):
        mu_limit("both", 1.0)


def test_wallis_sequence():
    u = wallis_sequence(2000)
    assert u[0] == 1.0 and u[1] == pytest.approx(4 / 3)
    assert np.all(np.diff(u) > 0) and np.all(u < math.pi / 2)
    assert u[-1] == pytest.approx(math.pi / 2, rel=1e-3)


def test_singular_functions_orthonormal():
    q = gauss_legendre_so3(12)
    psi = 1.3
    z = [singular_function_Z(n, k, q.nodes, psi) for n, k in [(0, 0), (2, 1), (3, -2), (5, 0), (6, 6)]]
    gram = np.array([[np.sum(q.weights * np.conj(a) * b) for b in z] for a in z])
    np.testing.assert_allclose(gram, np.eye(len(z)), atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 8), st.floats(0.0, math.pi))
def test_singular_function_scalar_and_array(n, psi):
    k = n // 2
    one = singular_function_E(n, k, [0.1, 0.2, 0.3], psi)
    arr = singular_function_E(n, k, np.array([[0.1, 0.2, 0.3]] * 2), psi)
    assert isinstance(one, complex) and arr.shape == (2,)
    assert arr[0] == pytest.approx(one, abs=1e-14)
    assert mu_squared(n, psi) >= 0.0


def test_table_csv_full():
    t = singular_value_table(3, "full")
    lines = t.to_csv().splitlines()
    assert lines[0] == "n,sigma,normalized_sigma"
    assert len(lines) == 5
    n1 = [float(x) for x in lines[2].split(",")]
    assert n1[1] == pytest.approx(2 * math.pi) and n1[2] == pytest.approx(2 * math.pi * math.sqrt(2))


def test_table_csv_fixed(tmp_path):
    t = singular_value_table(64, "fixed", 0.7)
    path = tmp_path / "sv.csv"
    t.write_csv(path)
    rows = path.read_text().splitlines()
    assert rows[0] == "n,psi,mu,normalized_mu2,limit"
    assert len(rows) == 66
    row0 = [float(x) for x in rows[1].split(",")]
    assert row0[3] == pytest.approx(4 * math.pi * 0.49, rel=1e-13)
    assert row0[4] == pytest.approx(8 * math.pi * 0.7)


def test_fixed_table_needs_psi():
    with pytest.raises(ValueError):
        singular_value_table(3, "fixed")
