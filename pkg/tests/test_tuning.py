import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ired.core import DifferentiatorConfig, compute_coefficients
from ired.tuning import (
    InvalidTuningParameter,
    check_gain_conditions,
    compute_constants,
    exactness_bound,
    noisy_bound,
    structural_constants,
    tune_gains,
)

THIRD_ORDER = DifferentiatorConfig(3, 2.0, 0.1, (3.0, 4.16, 3.06, 1.1), R=5e-7)


def test_first_order_constants_at_default_a():
    _, alpha, beta, gamma, mu = structural_constants(1, (1.5,))
    assert beta == pytest.approx((1.0, 1.75))
    assert gamma == pytest.approx((2.0, 2.0, 8.0))
    assert mu == pytest.approx((14.0,))
    assert alpha == pytest.approx((0.0, 0.75))


def test_mu1_closed_form_on_samples():
    rng = np.random.default_rng(8)
    for a in rng.uniform(1.0 + 1e-6, 2.0 - 1e-6, size=50):
        mu1 = structural_constants(1, (a,))[4][0]
        assert mu1 == pytest.approx((2 * a + 4) / (a - 1), rel=1e-12)


def test_mu1_infimum():
    mu1 = structural_constants(1, (2 - 1e-6,))[4][0]
    assert 8 < mu1 < 8 + 1e-4


def test_second_order_recursion_by_hand():
    a = (1.2, 1.7)
    _, alpha, beta, gamma, mu = structural_constants(2, a)
    b2 = 1 + a[0] / 2
    g2 = 2 / (2 - a[0]) * 2
    b3 = math.sqrt(b2**2 + a[1] / g2**2)
    g3 = math.sqrt(2 / (2 - a[1])) * g2
    assert beta == pytest.approx((1.0, b2, b3))
    assert gamma == pytest.approx((2.0, 2.0, g2, g3))
    assert mu[1] == pytest.approx(1.5 * g2**2 / 2 * b3 / (a[1] - 1))
    assert alpha == pytest.approx((0.0, a[0] / 2, a[1] / g2**2))


@pytest.mark.parametrize("a", [(1.0,), (2.0,), (1.5, 1.5)])
def test_a_validation(a):
    with pytest.raises(InvalidTuningParameter):
        structural_constants(1, a)


def product_rule(m, lam_last, mu_bar):
    inner = [math.prod(mu_bar[:k]) for k in range(0, m + 1)]
    total = math.prod(inner[1:])
    return tuple(
        lam_last ** (j / (m + 1)) * math.prod(inner[m - j + 1 : m + 1]) / total ** (j / (m + 1))
        for j in range(1, m + 1)
    ) + (lam_last,)


@given(st.integers(1, 5), st.floats(1.01, 20.0), st.floats(1.001, 3.0))
def test_tuning_matches_product_formula(m, lam_last, factor):
    mu = structural_constants(m)[4]
    mu_bar = tuple(factor * v for v in mu)
    assert tune_gains(m, lam_last, mu_bar) == pytest.approx(product_rule(m, lam_last, mu_bar), rel=1e-9)


def test_tuned_gains_always_pass_random_sweep():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        m = int(rng.integers(1, 6))
        a = tuple(rng.uniform(1.05, 1.95, size=m))
        mu = structural_constants(m, a)[4]
        mu_bar = tuple(v * rng.uniform(1.001, 2.0) for v in mu)
        lam_last = float(rng.uniform(1.001, 10.0))
        gains = tune_gains(m, lam_last, mu_bar, a)
        cfg = DifferentiatorConfig(m, 1.0, 0.1, gains)
        assert check_gain_conditions(cfg, compute_constants(m, a, cfg)).passed


def test_mu_bar_nine_first_order():
    # needs a_1 > 13/7 so that mu_1 < 9
    gains = tune_gains(1, 1.1, (9.0,), (1.9,))
    assert gains[0] == pytest.approx(3.146, abs=5e-4)
    cfg = DifferentiatorConfig(1, 1.0, 0.1, gains)
    assert check_gain_conditions(cfg, compute_constants(1, (1.9,), cfg)).passed
    with pytest.raises(InvalidTuningParameter):
        tune_gains(1, 1.1, (9.0,))  # default a gives mu_1 = 14


@pytest.mark.parametrize("lam_last", [1.0, 0.5, -2.0])
def test_lambda_last_must_exceed_one(lam_last):
    with pytest.raises(InvalidTuningParameter):
        tune_gains(2, lam_last)


def test_gain_check_first_order_examples():
    c = compute_constants(1, (1.5,), DifferentiatorConfig(1, 1.0, 0.1, (4.0, 1.1)))
    # lambda_1^2 > mu_1 lambda_2 requires lambda_1 > sqrt(15.4)
    assert not check_gain_conditions(DifferentiatorConfig(1, 1.0, 0.1, (3.9, 1.1)), c).passed
    assert check_gain_conditions(DifferentiatorConfig(1, 1.0, 0.1, (4.0, 1.1)), c).passed
    report = check_gain_conditions(DifferentiatorConfig(1, 1.0, 0.1, (10.0, 0.9)), c)
    assert not report.last_gain_ok and not report.passed


def test_reference_third_order_gains_fail_sufficient_conditions():
    for a in np.linspace(1.05, 1.95, 19):
        a_vec = (a,) * 3
        report = check_gain_conditions(THIRD_ORDER, compute_constants(3, a_vec, THIRD_ORDER))
        assert not report.passed


def test_n_bar_behaviour():
    cfg = DifferentiatorConfig(1, 1.0, 0.1, (4.0, 1.1))
    c = compute_constants(1, None, cfg)
    # p = 0 term: L T^2/(2 beta_2^2 gamma_2^2) (0.1)^2; p = 1 term: L T^2/(2 gamma_2^2) (0.1/4)^2
    b2, g2 = 1.75, 8.0
    expected = min(0.01 / (2 * b2**2 * g2**2) * 0.01, 0.01 / (2 * g2**2) * (0.1 / 4) ** 2)
    assert c.N_bar == pytest.approx(expected)
    assert compute_constants(1, None, DifferentiatorConfig(1, 1.0, 0.1, (4.0, 1.0))).N_bar == 0.0


@given(st.integers(1, 4), st.floats(1.01, 5.0), st.floats(0.01, 1.0), st.floats(0.1, 10))
def test_n_bar_positive_and_scales_with_L_T(m, lam_last, T, L):
    gains = tune_gains(m, lam_last)
    nb = compute_constants(m, None, DifferentiatorConfig(m, L, T, gains)).N_bar
    nb1 = compute_constants(m, None, DifferentiatorConfig(m, 1.0, 1.0, gains)).N_bar
    assert nb > 0
    assert nb == pytest.approx(nb1 * L * T ** (m + 1), rel=1e-9)


def test_d_first_order_by_hand():
    cfg = DifferentiatorConfig(1, 1.0, 0.1, (4.0, 1.1))
    c = compute_constants(1, None, cfg)
    # single term p = 1: beta_1 gamma_2 / 2^{1/2} * lambda_1 c(1,1)/(1 * c(1,2))
    assert c.d == pytest.approx((8.0 / math.sqrt(2) * 4.0 * 2.0,))


def test_kappa_and_psi_shapes():
    c = compute_constants(3, None, THIRD_ORDER)
    assert len(c.kappa) == 5 and len(c.psi) == 4
    lam = (1.0,) + THIRD_ORDER.lambdas + (1.0,)
    assert c.kappa[0] == pytest.approx(lam[5] / lam[4])
    assert c.kappa[4] == pytest.approx(lam[1] / lam[0])
    assert c.psi[0] == pytest.approx((c.beta[3] * c.gamma[4] / 2**0.25) ** 4)


def test_exactness_bound_values():
    # third-order sine scenario: M = 17/16, T = 0.1
    M = 17 / 16
    assert exactness_bound(1, 3, M, 0.1) == pytest.approx(2.65625e-4)
    assert exactness_bound(2, 3, M, 0.1) == pytest.approx(11 / 12 * M * 0.01)
    assert exactness_bound(3, 3, M, 0.1) == pytest.approx(1.5 * M * 0.1)
    assert exactness_bound(1, 1, 1.0, 0.2) == pytest.approx(0.1)
    with pytest.raises(ValueError):
        exactness_bound(0, 2, 1.0, 0.1)


@given(st.integers(1, 4), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_noisy_bound_reduces_and_is_monotone(m, N1, N2):
    cfg = DifferentiatorConfig(m, 1.0, 0.1, tune_gains(m, 1.2))
    c = compute_constants(m, None, cfg)
    lo, hi = sorted((N1, N2))
    for i in range(1, m + 1):
        assert noisy_bound(i, m, 1.0, 0.1, 0.0, c) == pytest.approx(exactness_bound(i, m, 1.0, 0.1))
        assert noisy_bound(i, m, 1.0, 0.1, lo, c) <= noisy_bound(i, m, 1.0, 0.1, hi, c)


def test_coefficients_feed_bounds():
    coeffs = compute_coefficients(2)
    assert exactness_bound(1, 2, 3.0, 0.5, coeffs) == pytest.approx(float(coeffs(1, 3)) * 3.0 * 0.25)


@given(
    st.integers(1, 5),
    st.floats(1.01, 10.0),
    st.lists(st.floats(1.05, 1.95), min_size=5, max_size=5),
)
def test_psi_is_dominated_by_d(m, lam_last, a_all):
    # psi_{m-p+1} c(i, m-p+1) <= binom(m-i+1, p) c(i, m+1) d_i^p
    a = tuple(a_all[:m])
    cfg = DifferentiatorConfig(m, 1.0, 0.1, tune_gains(m, lam_last, None, a))
    c = compute_constants(m, a, cfg)
    coeffs = compute_coefficients(m)
    for i in range(1, m + 1):
        for p in range(1, m - i + 2):
            lhs = c.psi[m - p + 1] * float(coeffs(i, m - p + 1))
            rhs = math.comb(m - i + 1, p) * float(coeffs(i, m + 1)) * c.d[i - 1] ** p
            assert lhs <= rhs * (1 + 1e-12)
