"""Positive root of the monotone step polynomial.

Each non-sliding implicit step reduces to finding r > 0 with

    r^{m+1} + lambda_1 r^m + ... + lambda_m r + lambda_{m+1} = rhs,

where rhs = |b_k| / (L T^{m+1}) > lambda_{m+1}. The left side is strictly
increasing on r > 0, so a bracket [0, hi] always exists and Newton's method
can be safeguarded by bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

MAX_ITER = 200


class IterationLimitExceeded(RuntimeError):
    """The root solve did not meet its residual contract within the budget."""


@dataclass(frozen=True)
class ResolventProblem:
    m: int
    lambdas: tuple[float, ...]
    rhs: float
    R: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "lambdas", tuple(float(v) for v in self.lambdas))
        if len(self.lambdas) != self.m + 1:
            raise ValueError(f"expected {self.m + 1} gains, got {len(self.lambdas)}")
        if not all(v > 0 for v in self.lambdas):
            raise ValueError("gains must be positive")
        if not self.rhs > self.lambdas[-1]:
            raise ValueError(
                f"rhs={self.rhs!r} must exceed lambda_last={self.lambdas[-1]!r} "
                "(smaller values belong to the sliding branch)"
            )
        if self.R < 0:
            raise ValueError("R must be nonnegative")


def _poly_and_slope(lambdas: Sequence[float], rhs: float, r: float) -> tuple[float, float]:
    # Horner on [1, lambda_1, ..., lambda_{m+1}] with the constant shifted by rhs.
    p = 1.0
    dp = 0.0
    for lam in lambdas:
        dp = dp * r + p
        p = p * r + lam
    return p - rhs, dp


def residual(lambdas: Sequence[float], rhs: float, r: float) -> float:
    return _poly_and_slope(lambdas, rhs, r)[0]


def solve_resolvent(problem: ResolventProblem, max_iter: int = MAX_ITER) -> float:
    """Return r_hat > 0 with |poly(r_hat) - rhs| <= R.

    With ``R == 0`` (or an R below the rounding floor of the polynomial)
    iteration stops once the bracket is a few ulps wide or the polynomial
    evaluates to exactly zero.
    """
    lambdas, rhs, R = problem.lambdas, problem.rhs, problem.R
    n = problem.m + 1

    lo = 0.0
    hi = max(1.0, rhs ** (1.0 / n))
    while residual(lambdas, rhs, hi) < 0:
        hi *= 2.0

    r = min(rhs ** (1.0 / n), hi)
    for _ in range(max_iter):
        f, df = _poly_and_slope(lambdas, rhs, r)
        if R > 0 and abs(f) <= R and r > 0:
            return r
        if f == 0 and r > 0:
            return r
        if f < 0:
            lo = r
        else:
            hi = r
        if hi - lo <= 4 * math.ulp(hi):
            # bracket collapsed; an R below the rounding floor degrades to R = 0
            return hi if lo == 0 else 0.5 * (lo + hi)

        step = r - f / df if df > 0 else math.nan
        r = step if lo < step < hi else 0.5 * (lo + hi)

    raise IterationLimitExceeded(
        f"resolvent solve failed: m={problem.m}, rhs={rhs!r}, R={R!r}, "
        f"bracket=[{lo!r}, {hi!r}]"
    )
