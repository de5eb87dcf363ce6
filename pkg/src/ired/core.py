"""Domain types, output-map coefficients and scalar helpers.

Indices follow the usual 1-based convention of the differentiator equations
(``z_1 .. z_{m+1}``, ``c(i, j)``); internally everything is stored 0-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class DifferentiatorConfig:
    """Parameters shared by every differentiator in this package.

    ``lambdas`` holds the gains lambda_1 .. lambda_{m+1}; ``R`` is the
    residual tolerance of the per-step root solve (0 means "solve to
    machine precision").
    """

    m: int
    L: float
    T: float
    lambdas: tuple[float, ...]
    R: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "lambdas", tuple(float(v) for v in self.lambdas))
        if int(self.m) != self.m or self.m < 1:
            raise ValueError(f"order m must be a positive integer, got {self.m!r}")
        if not (self.L > 0 and math.isfinite(self.L)):
            raise ValueError(f"L must be positive and finite, got {self.L!r}")
        if not (self.T > 0 and math.isfinite(self.T)):
            raise ValueError(f"T must be positive and finite, got {self.T!r}")
        if len(self.lambdas) != self.m + 1:
            raise ValueError(
                f"expected {self.m + 1} gains for order {self.m}, got {len(self.lambdas)}"
            )
        if not all(lam > 0 and math.isfinite(lam) for lam in self.lambdas):
            raise ValueError(f"all gains must be positive, got {self.lambdas}")
        if not (self.R >= 0 and math.isfinite(self.R)):
            raise ValueError(f"R must be nonnegative, got {self.R!r}")

    @property
    def n(self) -> int:
        return self.m + 1

    def sliding_threshold(self) -> float:
        """lambda_{m+1} L T^{m+1}: the |b_k| level below which a step slides."""
        return self.lambdas[-1] * self.L * self.T ** (self.m + 1)

    def equivalent_noise(self) -> float:
        """Worst-case input perturbation R L T^{m+1} caused by the inexact solve."""
        return self.R * self.L * self.T ** (self.m + 1)


@dataclass
class DifferentiatorState:
    """State vector ``z`` plus its time index ``k``.

    ``z`` holds z_{., k}: the state after consuming u_{k-1}. The next sample
    to feed is therefore u_k. A fresh state defaults to k = 0 (nothing
    consumed); states matched to a signal start at k = 1.
    """

    z: np.ndarray
    k: int = 0

    def __post_init__(self):
        self.z = np.array(self.z, dtype=float)
        if self.z.ndim != 1:
            raise ValueError("state must be a flat vector")
        if not np.all(np.isfinite(self.z)):
            raise ValueError(f"state contains non-finite entries: {self.z}")
        if self.k < 0:
            raise ValueError("step counter must be nonnegative")

    def copy(self) -> "DifferentiatorState":
        return DifferentiatorState(self.z.copy(), self.k)

    def to_list(self) -> list[float]:
        """Flat serialization ``[k, z_1, ..., z_n]`` for checkpointing."""
        return [float(self.k), *map(float, self.z)]

    @classmethod
    def from_list(cls, values: Sequence[float]) -> "DifferentiatorState":
        return cls(np.asarray(values[1:], dtype=float), int(values[0]))


@dataclass(frozen=True)
class StepOutput:
    y: np.ndarray
    sliding: bool
    rho_hat: float = 0.0
    b: float = 0.0
    epsilon_bound: float = 0.0


@dataclass(frozen=True)
class CoefficientTable:
    """Exact rational coefficients c(i, j) for 0 <= i, j <= m + 1."""

    m: int
    c: dict[tuple[int, int], Fraction] = field(repr=False)

    def __call__(self, i: int, j: int) -> Fraction:
        if i > j:
            return Fraction(0)
        return self.c[(i, j)]

    def as_float(self, i: int, j: int) -> float:
        return float(self(i, j))

    def output_matrix(self) -> np.ndarray:
        """Upper triangular ``C[i-1, j-1] = c(i, j)`` for i, j = 1..m (float)."""
        m = self.m
        C = np.zeros((m, m))
        for i in range(1, m + 1):
            for j in range(i, m + 1):
                C[i - 1, j - 1] = float(self(i, j))
        return C


@lru_cache(maxsize=None)
def compute_coefficients(m: int) -> CoefficientTable:
    """Evaluate c(i, j) = ((j-1) c(i, j-1) + i c(i-1, j-1)) / j exactly.

    The table covers 0 <= i <= j <= m + 1, which is everything the order-m
    output map and its error bounds need.
    """
    if int(m) != m or m < 1:
        raise ValueError(f"order m must be a positive integer, got {m!r}")
    size = m + 1
    c: dict[tuple[int, int], Fraction] = {(0, 0): Fraction(1)}
    for j in range(1, size + 1):
        c[(0, j)] = Fraction(0)
    for i in range(1, size + 1):
        c[(i, 0)] = Fraction(0)
    for j in range(1, size + 1):
        for i in range(1, j + 1):
            prev_same = c[(i, j - 1)] if i <= j - 1 else Fraction(0)
            prev_diag = c[(i - 1, j - 1)]
            c[(i, j)] = ((j - 1) * prev_same + i * prev_diag) / j
    return CoefficientTable(m, c)


def signed_power(y, p):
    """|y|^p sign(y), elementwise; ``p`` must be positive."""
    if p <= 0:
        raise ValueError("signed_power needs p > 0; use signed_power_zero for p = 0")
    y = np.asarray(y, dtype=float)
    out = np.sign(y) * np.abs(y) ** float(p)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __contains__(self, v: float) -> bool:
        return self.lo <= v <= self.hi


def signed_power_zero(y: float) -> Interval:
    """Set-valued sign: ``{sign(y)}`` for y != 0 and ``[-1, 1]`` at zero."""
    if y == 0:
        return Interval(-1.0, 1.0)
    s = math.copysign(1.0, y)
    return Interval(s, s)


def binomial(n: int, k: int) -> int:
    return math.comb(n, k)
