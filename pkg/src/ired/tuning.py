"""Stability constants, gain conditions, the tuning rule and error bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import CoefficientTable, DifferentiatorConfig, binomial, compute_coefficients

DEFAULT_A = 1.5
DEFAULT_MU_MARGIN = 1.1


class InvalidTuningParameter(ValueError):
    pass


@dataclass(frozen=True)
class TuningConstants:
    """Recursively defined constants for an order-m differentiator.

    Sequences are stored with their natural 1-based index mapped to
    position 0 except where noted: ``gamma`` and ``psi`` and ``kappa`` start
    at index 0 (gamma_0, psi_0, kappa_0).
    """

    m: int
    a: tuple[float, ...]  # a_1..a_m
    alpha: tuple[float, ...]  # alpha_1..alpha_{m+1}, alpha_1 = 0
    beta: tuple[float, ...]  # beta_1..beta_{m+1}
    gamma: tuple[float, ...]  # gamma_0..gamma_{m+1}
    mu: tuple[float, ...]  # mu_1..mu_m
    d: tuple[float, ...]  # d_1..d_m
    psi: tuple[float, ...]  # psi_0..psi_m
    N_bar: float
    kappa: tuple[float, ...]  # kappa_0..kappa_{m+1}

    def beta_(self, j: int) -> float:
        return self.beta[j - 1]

    def gamma_(self, j: int) -> float:
        return self.gamma[j]

    def alpha_(self, j: int) -> float:
        return self.alpha[j - 1]


def _validate_a(m: int, a: Sequence[float] | None) -> tuple[float, ...]:
    if a is None:
        a = (DEFAULT_A,) * m
    a = tuple(float(v) for v in a)
    if len(a) != m:
        raise InvalidTuningParameter(f"need {m} values a_j, got {len(a)}")
    for j, v in enumerate(a, start=1):
        if not 1 < v < 2:
            raise InvalidTuningParameter(f"a_{j}={v} must lie strictly inside (1, 2)")
    return a


def structural_constants(m: int, a: Sequence[float] | None = None):
    """beta, gamma, mu and alpha; these depend on m and a only."""
    a = _validate_a(m, a)
    beta = [1.0]  # beta_1
    gamma = [2.0, 2.0]  # gamma_0, gamma_1
    mu = []
    for j in range(1, m + 1):
        aj = a[j - 1]
        bj, gj = beta[j - 1], gamma[j]
        beta.append((bj**j + aj / gj**j) ** (1.0 / j))
        gamma.append((2.0 / (2.0 - aj)) ** (1.0 / j) * gj)
        mu.append((j + 1) / j * gj**j / gamma[j - 1] ** (j - 1) * beta[j] / (aj - 1.0))
    alpha = [0.0] + [a[j - 2] / gamma[j - 1] ** (j - 1) for j in range(2, m + 2)]
    return a, tuple(alpha), tuple(beta), tuple(gamma), tuple(mu)


def compute_constants(
    m: int, a: Sequence[float] | None, config: DifferentiatorConfig
) -> TuningConstants:
    if config.m != m:
        raise ValueError(f"config order {config.m} does not match m={m}")
    a, alpha, beta, gamma, mu = structural_constants(m, a)
    coeffs = compute_coefficients(m)
    n = m + 1
    lam = (1.0,) + config.lambdas  # lam[0] = lambda_0 = 1
    L, T = config.L, config.T
    g_n = gamma[n]
    root2 = 2.0 ** (1.0 / n)

    d = []
    for i in range(1, m + 1):
        cin = float(coeffs(i, n))
        best = 0.0
        for p in range(1, m - i + 2):
            ratio = lam[m - p + 1] * float(coeffs(i, m - p + 1)) / (binomial(m - i + 1, p) * cin)
            best = max(best, beta[p - 1] * g_n / root2 * ratio ** (1.0 / p))
        d.append(best)

    psi = tuple(lam[i] * (beta[n - i - 1] * g_n / root2) ** (n - i) for i in range(0, m + 1))

    lam_last = config.lambdas[-1]
    if lam_last <= 1:
        N_bar = 0.0
    else:
        N_bar = min(
            L * T**n / (2.0**m * beta[m - p] ** n * g_n**n)
            * ((lam_last - 1.0) / lam[p]) ** (n / (m - p + 1))
            for p in range(0, m + 1)
        )

    lam_ext = (1.0,) + config.lambdas + (1.0,)  # lambda_0 .. lambda_{n+1}
    kappa = tuple(lam_ext[n - j + 1] / lam_ext[n - j] for j in range(0, n + 1))

    return TuningConstants(
        m=m,
        a=a,
        alpha=alpha,
        beta=beta,
        gamma=gamma,
        mu=mu,
        d=tuple(d),
        psi=psi,
        N_bar=N_bar,
        kappa=kappa,
    )


@dataclass(frozen=True)
class GainReport:
    """Outcome of the stability conditions; margins are lhs - rhs."""

    last_gain_margin: float
    ratio_margins: tuple[float, ...]

    @property
    def last_gain_ok(self) -> bool:
        return self.last_gain_margin > 0

    @property
    def ratio_ok(self) -> tuple[bool, ...]:
        return tuple(v > 0 for v in self.ratio_margins)

    @property
    def passed(self) -> bool:
        return self.last_gain_ok and all(self.ratio_ok)


def check_gain_conditions(config: DifferentiatorConfig, constants: TuningConstants) -> GainReport:
    """lambda_{m+1} > 1 and lambda_{m-j+1}/lambda_{m-j} > mu_j lambda_{m-j+2}/lambda_{m-j+1}."""
    m = config.m
    if constants.m != m:
        raise ValueError("constants were computed for a different order")
    lam = (1.0,) + config.lambdas
    margins = []
    for j in range(1, m + 1):
        lhs = lam[m - j + 1] / lam[m - j]
        rhs = lam[m - j + 2] / lam[m - j + 1] * constants.mu[j - 1]
        margins.append(lhs - rhs)
    return GainReport(config.lambdas[-1] - 1.0, tuple(margins))


def tune_gains(
    m: int,
    lambda_last: float,
    mu_bar: Sequence[float] | None = None,
    a: Sequence[float] | None = None,
) -> tuple[float, ...]:
    """Gains lambda_1..lambda_{m+1} from the product tuning rule.

    ``mu_bar`` defaults to 1.1 times the structural mu_j for the given (or
    default) ``a``; every mu_bar_j must strictly exceed mu_j.
    """
    if not lambda_last > 1:
        raise InvalidTuningParameter(f"lambda_last={lambda_last} must exceed 1")
    _, _, _, _, mu = structural_constants(m, a)
    if mu_bar is None:
        mu_bar = tuple(DEFAULT_MU_MARGIN * v for v in mu)
    mu_bar = tuple(float(v) for v in mu_bar)
    if len(mu_bar) != m:
        raise InvalidTuningParameter(f"need {m} values mu_bar, got {len(mu_bar)}")
    for j, (mb, mj) in enumerate(zip(mu_bar, mu), start=1):
        if not mb > mj:
            raise InvalidTuningParameter(f"mu_bar_{j}={mb} must exceed mu_{j}={mj}")

    # inner[k] = prod_{i=1}^{k} mu_bar_i, worked in logs to keep large m finite
    log_mu = np.log(mu_bar)
    log_inner = np.concatenate([[0.0], np.cumsum(log_mu)])  # log_inner[k], k = 0..m
    log_total = float(np.sum(log_inner[1:]))
    gains = []
    for j in range(1, m + 1):
        log_num = float(np.sum(log_inner[m - j + 1 : m + 1]))
        gains.append(
            math.exp(j / (m + 1) * math.log(lambda_last) + log_num - j / (m + 1) * log_total)
        )
    gains.append(float(lambda_last))
    return tuple(gains)


def exactness_bound(i: int, m: int, M: float, T: float, coeffs: CoefficientTable | None = None) -> float:
    """Noise-free worst-case error c(i, m+1) M T^{m+1-i} of output i."""
    if not 1 <= i <= m:
        raise ValueError(f"output index {i} outside 1..{m}")
    if M < 0:
        raise ValueError("M must be nonnegative")
    coeffs = coeffs or compute_coefficients(m)
    return float(coeffs(i, m + 1)) * M * T ** (m + 1 - i)


def noisy_bound(
    i: int,
    m: int,
    L: float,
    T: float,
    N: float,
    constants: TuningConstants,
    coeffs: CoefficientTable | None = None,
) -> float:
    """Ultimate error bound c(i,m+1) L (T + d_i (N/L)^{1/(m+1)})^{m+1-i}."""
    if not 1 <= i <= m:
        raise ValueError(f"output index {i} outside 1..{m}")
    if N < 0:
        raise ValueError("N must be nonnegative")
    coeffs = coeffs or compute_coefficients(m)
    return float(coeffs(i, m + 1)) * L * (T + constants.d[i - 1] * (N / L) ** (1.0 / (m + 1))) ** (m + 1 - i)
