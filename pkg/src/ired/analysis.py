"""Error-system diagnostics built from the analytic signal.

The divided-difference table is the reference the differentiator states
track: ``x_{i,k} = z_{i,k} - g(i, k)``. It is computed from the signal alone
and never from a differentiator run.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import DifferentiatorConfig, DifferentiatorState
from .tuning import TuningConstants


class IndexOutOfWindow(IndexError):
    pass


@dataclass(frozen=True)
class DividedDifferenceTable:
    """g(i, k) for i = 1..m+2 and k = 1..k_max, stored as ``values[i-1, k-1]``."""

    m: int
    T: float
    values: np.ndarray

    @property
    def k_max(self) -> int:
        return self.values.shape[1]

    def __call__(self, i: int, k: int) -> float:
        if not 1 <= k <= self.k_max:
            raise IndexOutOfWindow(f"k={k} outside 1..{self.k_max}")
        if not 1 <= i <= self.m + 2:
            raise IndexError(f"i={i} outside 1..{self.m + 2}")
        return float(self.values[i - 1, k - 1])

    def column(self, k: int) -> np.ndarray:
        """g(1..m+1, k): the reference for the differentiator state z_{., k}."""
        if not 1 <= k <= self.k_max:
            raise IndexOutOfWindow(f"k={k} outside 1..{self.k_max}")
        return self.values[: self.m + 1, k - 1].copy()

    def delta(self, k: int) -> float:
        """g(m+2, k), the divided difference bounded by L."""
        return self(self.m + 2, k)


def divided_differences(signal, m: int, T: float, k_max: int) -> DividedDifferenceTable:
    """Backward divided differences of the sampled, extended signal.

    g(1, k+1) = fbar(kT) and g(i+1, k+1) = (g(i, k+1) - g(i, k)) / T, where
    fbar continues the signal to t < 0 by its degree-m Taylor polynomial.
    """
    depth = m + 1
    # samples fbar(jT) for j = -depth .. k_max-1; g(1, k) = fbar((k-1)T)
    j = np.arange(-depth, k_max)
    rows = [np.asarray(signal.extended(j * T, m), dtype=float)]
    for _ in range(depth):
        prev = rows[-1]
        rows.append(np.concatenate([[np.nan], np.diff(prev) / T]))
    values = np.stack([r[depth:] for r in rows])
    return DividedDifferenceTable(m, T, values)


def error_states(z: DifferentiatorState | np.ndarray, table: DividedDifferenceTable, k: int) -> np.ndarray:
    """x_i = z_i - g(i, k) for the state z_{., k}."""
    zz = z.z if isinstance(z, DifferentiatorState) else np.asarray(z, dtype=float)
    if zz.shape != (table.m + 1,):
        raise ValueError(f"state dimension {zz.shape} does not match order {table.m}")
    return zz - table.column(k)


def in_invariant_set(x: Sequence[float], config: DifferentiatorConfig) -> bool:
    """Membership in the set 2^{n-i+1} T^{i-1} |x_i| <= L T^n (lambda_n - 1)."""
    x = np.asarray(x, dtype=float)
    n, L, T = config.n, config.L, config.T
    rhs = L * T**n * (config.lambdas[-1] - 1.0)
    i = np.arange(1, n + 1)
    lhs = 2.0 ** (n - i + 1) * T ** (i - 1) * np.abs(x)
    return bool(np.all(lhs <= rhs))


@dataclass(frozen=True)
class LyapunovEvaluator:
    n: int
    alpha: tuple[float, ...]  # alpha_1..alpha_n (alpha_1 unused)
    lambdas: tuple[float, ...]  # lambda_1..lambda_n
    L: float

    @classmethod
    def from_constants(cls, config: DifferentiatorConfig, constants: TuningConstants) -> "LyapunovEvaluator":
        return cls(config.n, constants.alpha, config.lambdas, config.L)

    def transform(self, x: Sequence[float]) -> np.ndarray:
        """xi_j = x_{n-j+1} / (lambda_{n-j} L), lambda_0 = 1."""
        x = np.asarray(x, dtype=float)
        lam = (1.0,) + tuple(self.lambdas)
        n = self.n
        return np.array([x[n - j] / (lam[n - j] * self.L) for j in range(1, n + 1)])

    def values(self, xi: Sequence[float]) -> np.ndarray:
        """V_1..V_n at the transformed state."""
        xi = np.asarray(xi, dtype=float)
        V = np.empty(self.n)
        V[0] = abs(xi[0])
        for j in range(2, self.n + 1):
            s = np.sign(xi[j - 1]) * abs(xi[j - 1]) ** ((j - 1) / j)
            term = self.alpha[j - 1] ** (-1.0 / (j - 1)) * abs(s - xi[j - 2]) ** (1.0 / (j - 1))
            V[j - 1] = max(V[j - 2], term)
        return V


def lyapunov(evaluator: LyapunovEvaluator, x: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    """Return (V_1..V_n, xi) for the error state x."""
    xi = evaluator.transform(x)
    return evaluator.values(xi), xi
