import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ired.core import (
    DifferentiatorConfig,
    DifferentiatorState,
    compute_coefficients,
    signed_power,
    signed_power_zero,
)

TABLE = {
    1: [F(1), F(1, 2), F(1, 3), F(1, 4), F(1, 5), F(1, 6), F(1, 7)],
    2: [0, 1, 1, F(11, 12), F(5, 6), F(137, 180), F(7, 10)],
    3: [0, 0, 1, F(3, 2), F(7, 4), F(15, 8), F(29, 15)],
    4: [0, 0, 0, 1, 2, F(17, 6), F(7, 2)],
    5: [0, 0, 0, 0, 1, F(5, 2), F(25, 6)],
    6: [0, 0, 0, 0, 0, 1, 3],
}


def stirling_unsigned(n, k):
    s = [[0] * (n + 1) for _ in range(n + 1)]
    s[0][0] = 1
    for a in range(1, n + 1):
        for b in range(1, a + 1):
            s[a][b] = s[a - 1][b - 1] + (a - 1) * s[a - 1][b]
    return s[n][k]


def test_table_entries_exact():
    c = compute_coefficients(6)
    for i, row in TABLE.items():
        for j, expected in enumerate(row, start=1):
            assert c(i, j) == F(expected), (i, j)


@pytest.mark.parametrize("m", range(1, 9))
def test_coefficients_match_stirling_closed_form(m):
    # backward-difference derivative weights: c(i,j) = i!/j! |s(j,i)|
    c = compute_coefficients(m)
    for j in range(1, m + 2):
        for i in range(1, j + 1):
            assert c(i, j) == F(math.factorial(i) * stirling_unsigned(j, i), math.factorial(j))


@given(st.integers(1, 12))
def test_coefficient_structure(m):
    c = compute_coefficients(m)
    for j in range(1, m + 2):
        assert c(j, j) == 1
        assert c(1, j) == F(1, j)
        assert c(j + 1, j) == 0


def test_output_matrix_is_unit_upper_triangular():
    C = compute_coefficients(4).output_matrix()
    assert np.allclose(np.diag(C), 1.0)
    assert np.allclose(np.tril(C, -1), 0.0)


def test_invalid_order():
    with pytest.raises(ValueError):
        compute_coefficients(0)


@given(st.floats(-1e6, 1e6), st.floats(0.01, 5))
def test_signed_power_is_odd(y, p):
    assert signed_power(-y, p) == -signed_power(y, p)
    assert signed_power(y, p) == pytest.approx(np.sign(y) * abs(y) ** p)


def test_signed_power_examples():
    assert signed_power(-8.0, 1 / 3) == pytest.approx(-2.0)
    assert signed_power(0.0, 0.5) == 0.0
    with pytest.raises(ValueError):
        signed_power(1.0, 0.0)


def test_signed_power_zero_is_set_valued():
    assert signed_power_zero(3.0).lo == signed_power_zero(3.0).hi == 1.0
    assert -1.0 in signed_power_zero(-2.0) and 1.0 not in signed_power_zero(-2.0)
    zero = signed_power_zero(0.0)
    assert -1.0 in zero and 0.3 in zero and 1.0 in zero


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(m=0, L=1, T=0.1, lambdas=(1.1,)),
        dict(m=1, L=0, T=0.1, lambdas=(2, 1.1)),
        dict(m=1, L=1, T=-0.1, lambdas=(2, 1.1)),
        dict(m=1, L=1, T=0.1, lambdas=(2,)),
        dict(m=1, L=1, T=0.1, lambdas=(2, -1)),
        dict(m=1, L=1, T=0.1, lambdas=(2, 1.1), R=-1e-3),
    ],
)
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        DifferentiatorConfig(**kwargs)


def test_config_derived_quantities():
    cfg = DifferentiatorConfig(3, 2.0, 0.1, (3, 4.16, 3.06, 1.1), R=5e-7)
    assert cfg.n == 4
    assert cfg.sliding_threshold() == pytest.approx(1.1 * 2 * 1e-4)
    assert cfg.equivalent_noise() == pytest.approx(5e-7 * 2 * 1e-4)


def test_state_roundtrip_and_validation():
    s = DifferentiatorState(np.array([1.0, -2.5, 3e-9]), k=7)
    assert DifferentiatorState.from_list(s.to_list()).to_list() == s.to_list()
    c = s.copy()
    c.z[0] = 99
    assert s.z[0] == 1.0
    with pytest.raises(ValueError):
        DifferentiatorState(np.array([np.nan, 0.0]))
