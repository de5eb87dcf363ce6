"""Sample-by-sample implicit differentiators.

All instances expose ``step(u) -> StepOutput`` and keep their state in a
:class:`~ired.core.DifferentiatorState`. Formulas in comments use the
1-based indices of the difference equations; arrays are 0-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import (
    CoefficientTable,
    DifferentiatorConfig,
    DifferentiatorState,
    StepOutput,
    compute_coefficients,
)
from .resolvent import ResolventProblem, solve_resolvent

_EPS = np.finfo(float).eps


class ResidualCheckFailed(RuntimeError):
    """Back-substituted state violates the implicit step equations."""


def _spow_int(rho: float, p: int) -> float:
    # |rho|^p sign(rho) for integer p >= 1
    return math.copysign(abs(rho) ** p, rho)


def _outputs(z_new: np.ndarray, coeffs: CoefficientTable, T: float, offset: int) -> np.ndarray:
    """y_i = sum_{j=i}^{m} T^{j-i} c(i,j) z_{offset+j+1}."""
    m = coeffs.m
    y = np.empty(m)
    for i in range(1, m + 1):
        acc = 0.0
        for j in range(i, m + 1):
            acc += T ** (j - i) * coeffs.as_float(i, j) * z_new[offset + j]
        y[i - 1] = acc
    return y


class Ired:
    """Implicit robust exact differentiator of order ``config.m``.

    The implicit step is evaluated in explicit form: compute
    ``b_k = u_k - sum_i T^{i-1} z_{i,k}``, decide the sliding branch, solve
    the resolvent polynomial otherwise, then update z_{m+1} down to z_1.
    """

    def __init__(self, config: DifferentiatorConfig, state: DifferentiatorState | None = None):
        self.config = config
        self.coeffs = compute_coefficients(config.m)
        if state is None:
            state = DifferentiatorState(np.zeros(config.m + 1))
        if state.z.shape != (config.m + 1,):
            raise ValueError(f"state must have {config.m + 1} entries, got {state.z.shape}")
        self.state = state
        self._powers = config.T ** np.arange(config.m + 1)

    @property
    def m(self) -> int:
        return self.config.m

    def b(self, u: float) -> float:
        return float(u - np.dot(self._powers, self.state.z))

    def step(self, u: float) -> StepOutput:
        if not math.isfinite(u):
            raise ValueError(f"input sample must be finite, got {u!r}")
        cfg = self.config
        m, L, T, lam = cfg.m, cfg.L, cfg.T, cfg.lambdas
        z = self.state.z
        b = self.b(u)
        LTn = L * T ** (m + 1)

        z_new = np.empty_like(z)
        if abs(b) <= lam[m] * LTn:
            sliding = True
            rho = 0.0
            z_new[m] = z[m] + b / T**m
        else:
            sliding = False
            r = solve_resolvent(ResolventProblem(m, lam, abs(b) / LTn, cfg.R))
            rho = math.copysign(r, b)
            z_new[m] = z[m] + lam[m] * L * T * math.copysign(1.0, b)
        for i in range(m, 0, -1):  # 1-based i = m .. 1
            z_new[i - 1] = (
                z[i - 1] + T * z_new[i] + lam[i - 1] * L * T ** (m - i + 2) * _spow_int(rho, m - i + 1)
            )

        self.state.z = z_new
        self.state.k += 1
        return StepOutput(
            y=_outputs(z_new, self.coeffs, T, 0),
            sliding=sliding,
            rho_hat=rho,
            b=b,
            epsilon_bound=0.0 if sliding else cfg.equivalent_noise(),
        )


class Istd(Ired):
    """Implicit super-twisting differentiator: the first-order IRED.

    Its injection uses ``lambda_1 L^{1/2} T |e|^{1/2}``, so it coincides with
    ``Ired`` for ``m = 1`` (output ``y_1 = z_{2,k+1}`` since c(1,1) = 1).
    """

    def __init__(self, config: DifferentiatorConfig, state: DifferentiatorState | None = None):
        if config.m != 1:
            raise ValueError("the super-twisting differentiator is first order")
        super().__init__(config, state)


class FilteringIred:
    """Implicit robust exact filtering differentiator.

    ``q`` filtering stages precede the ``m + 1`` differentiator stages; the
    chain has ``q + m + 1`` states driven by ``z_1`` and the input enters at
    stage ``q``. ``config.lambdas`` must hold ``q + m + 1`` gains; ``config.m``
    is the differentiation order.
    """

    def __init__(self, config: DifferentiatorConfig, q: int, state: DifferentiatorState | None = None):
        # config.m / config.lambdas describe the filter chain; see from_gains()
        if int(q) != q or q < 1:
            raise ValueError(f"filtering order q must be a positive integer, got {q!r}")
        self.q = q
        self.config = config
        self.m = config.m - q
        if self.m < 1:
            raise ValueError("config order must equal q + m with m >= 1")
        self.coeffs = compute_coefficients(self.m)
        n_states = q + self.m + 1
        if state is None:
            state = DifferentiatorState(np.zeros(n_states))
        if state.z.shape != (n_states,):
            raise ValueError(f"state must have {n_states} entries, got {state.z.shape}")
        self.state = state
        self._powers = config.T ** np.arange(n_states)

    @classmethod
    def from_gains(
        cls,
        q: int,
        m: int,
        L: float,
        T: float,
        lambdas: Sequence[float],
        R: float = 0.0,
        state: DifferentiatorState | None = None,
    ) -> "FilteringIred":
        if len(lambdas) != q + m + 1:
            raise ValueError(f"need {q + m + 1} gains for q={q}, m={m}, got {len(lambdas)}")
        return cls(DifferentiatorConfig(q + m, L, T, tuple(lambdas), R), q, state)

    def b(self, u: float) -> float:
        return float(np.dot(self._powers, self.state.z) - self.config.T**self.q * u)

    def step(self, u: float) -> StepOutput:
        if not math.isfinite(u):
            raise ValueError(f"input sample must be finite, got {u!r}")
        cfg = self.config
        N, L, T, lam, q = cfg.m + 1, cfg.L, cfg.T, cfg.lambdas, self.q
        z = self.state.z
        b = self.b(u)
        LTN = L * T**N

        # Substituting the chain into the z_1 equation gives
        #   L T^N (|rho|^N sign + sum_i lambda_i |rho|^{N-i} sign + lambda_N Sign(rho)) = b
        # with rho = L^{-1/N} T^{-1} |z_{1,k+1}|^{1/N} sign(z_{1,k+1}).
        z_new = np.empty_like(z)
        if abs(b) <= lam[N - 1] * LTN:
            sliding = True
            rho = 0.0
            z_new[N - 1] = z[N - 1] - b / T ** (N - 1)
        else:
            sliding = False
            r = solve_resolvent(ResolventProblem(N - 1, lam, abs(b) / LTN, cfg.R))
            rho = math.copysign(r, b)
            z_new[N - 1] = z[N - 1] - lam[N - 1] * L * T * math.copysign(1.0, b)
        for i in range(N - 1, 0, -1):  # 1-based i = N-1 .. 1
            z_new[i - 1] = (
                z[i - 1] + T * z_new[i] - lam[i - 1] * L * T ** (N - i + 1) * _spow_int(rho, N - i)
            )
            if i == q:
                z_new[i - 1] -= T * u

        self._check_residual(z, z_new, u, rho, sliding)
        self.state.z = z_new
        self.state.k += 1
        return StepOutput(
            y=_outputs(z_new, self.coeffs, T, q),
            sliding=sliding,
            rho_hat=rho,
            b=b,
            epsilon_bound=0.0 if sliding else cfg.equivalent_noise(),
        )

    def _check_residual(self, z, z_new, u, rho, sliding) -> None:
        # The implicit equations demand z_{1,k+1} = L T^N |rho|^N sign(rho);
        # the inexact root shows up here as a mismatch of at most R (scaled).
        cfg = self.config
        N, L, T = cfg.m + 1, cfg.L, cfg.T
        LTN = L * T**N
        implied = LTN * _spow_int(rho, N)
        scale = float(np.sum(np.abs(self._powers * z)) + T**self.q * abs(u) + abs(implied))
        tol = cfg.R + 64 * _EPS * scale / LTN
        mismatch = abs(z_new[0] - implied) / LTN
        if mismatch > tol:
            raise ResidualCheckFailed(
                f"step {self.state.k}: z_1 mismatch {mismatch:.3e} > {tol:.3e}"
                f" (sliding={sliding})"
            )
        if sliding:
            sel = (z[N - 1] - z_new[N - 1]) / (cfg.lambdas[N - 1] * L * T)
            if abs(sel) > 1 + 64 * _EPS * (1 + scale / LTN):
                raise ResidualCheckFailed(f"step {self.state.k}: sign selection {sel} outside [-1, 1]")


@dataclass
class _BaselineBase:
    L: float
    T: float
    lambdas: tuple[float, ...]
    state: DifferentiatorState | None = None

    n_states = 0

    def __post_init__(self):
        self.lambdas = tuple(float(v) for v in self.lambdas)
        if len(self.lambdas) != self.n_states:
            raise ValueError(f"{type(self).__name__} needs {self.n_states} gains")
        if not all(v > 0 for v in self.lambdas):
            raise ValueError("gains must be positive")
        if not (self.L > 0 and self.T > 0):
            raise ValueError("L and T must be positive")
        if self.state is None:
            self.state = DifferentiatorState(np.zeros(self.n_states))
        if self.state.z.shape != (self.n_states,):
            raise ValueError(f"state must have {self.n_states} entries")

    @property
    def m(self) -> int:
        return self.n_states - 1


@dataclass
class Hidd1(_BaselineBase):
    """First-order homogeneous implicit discrete-time differentiator.

    z1' = z1 + T z2 + T l1 L^{1/2} |e|^{1/2} sign(e) + l2 L T^2 xi / 2
    z2' = z2 + T l2 L xi,   xi in Sign(e),   e = u - z1',   y1 = z2'

    In the sliding branch the selection ``xi`` is forced by e = 0, so no
    selection rule beyond the implicit equations is needed.
    """

    n_states = 2

    def step(self, u: float) -> StepOutput:
        L, T = self.L, self.T
        l1, l2 = self.lambdas
        z1, z2 = self.state.z
        b = u - z1 - T * z2
        thresh = l2 * L * T**2 / 2
        if abs(b) <= thresh:
            sliding = True
            xi = b / thresh
            e = 0.0
        else:
            sliding = False
            xi = math.copysign(1.0, b)
            # s = sqrt|e| solves s^2 + T l1 sqrt(L) s - (|b| - thresh) = 0
            p = T * l1 * math.sqrt(L)
            c = abs(b) - thresh
            s = 2 * c / (p + math.sqrt(p * p + 4 * c))
            e = math.copysign(s * s, b)
        z2_new = z2 + T * l2 * L * xi
        z1_new = u - e
        self.state.z = np.array([z1_new, z2_new])
        self.state.k += 1
        return StepOutput(y=np.array([z2_new]), sliding=sliding, rho_hat=e, b=b)


@dataclass
class IhddFamily(_BaselineBase):
    """Second-order family containing the I-HDD (c = 1) and I-AO-STD (c = 0).

    z1' = z1 + T l1 L^{1/3} [e]^{2/3} + T z2' + c T^2 z3' / 2
    z2' = z2 + T l2 L^{2/3} [e]^{1/3} + T z3'
    z3' in z3 + T l3 L Sign(e),   e = u - z1',   y = (z2', z3')

    Requires c > -2 so that the scalar inclusion for e stays monotone.
    For c = -1 the sliding solution family is not unique; this
    implementation picks the selection forced by e = 0 at each step.
    """

    c: float = 1.0
    n_states = 3

    def __post_init__(self):
        super().__post_init__()
        if not self.c > -2:
            raise ValueError("IhddFamily requires c > -2")

    def step(self, u: float) -> StepOutput:
        L, T, c = self.L, self.T, self.c
        l1, l2, l3 = self.lambdas
        z1, z2, z3 = self.state.z
        w = 1 + c / 2
        # e + l1 L T^3 rho^2 + l2 L T^3 rho + w l3 L T^3 xi = b,  e = L T^3 rho^3
        b = u - (z1 + T * z2 + w * T**2 * z3)
        LT3 = L * T**3
        if abs(b) <= w * l3 * LT3:
            sliding = True
            rho = 0.0
            xi = b / (w * l3 * LT3)
        else:
            sliding = False
            r = solve_resolvent(ResolventProblem(2, (l1, l2, w * l3), abs(b) / LT3, 0.0))
            rho = math.copysign(r, b)
            xi = math.copysign(1.0, b)
        z3_new = z3 + T * l3 * L * xi
        z2_new = z2 + l2 * L * T**2 * rho + T * z3_new
        z1_new = z1 + l1 * L * T**3 * _spow_int(rho, 2) + T * z2_new + c * T**2 / 2 * z3_new
        self.state.z = np.array([z1_new, z2_new, z3_new])
        self.state.k += 1
        return StepOutput(y=np.array([z2_new, z3_new]), sliding=sliding, rho_hat=rho, b=b)


def init_from_derivatives(
    config: DifferentiatorConfig, f0: float, derivs: Sequence[float]
) -> DifferentiatorState:
    """State whose error coordinates vanish for a signal with these initial derivatives.

    Solves ``sum_{j>=i} c(i,j) T^j z_{j+1} = T^i f^(i)(0)`` (unit upper
    triangular) by back substitution; z_1 = f(0). The result is z_{., 1},
    i.e. u_0 = f(0) counts as consumed and the next sample is u_1.
    """
    m, T = config.m, config.T
    if len(derivs) != m:
        raise ValueError(f"need {m} derivatives, got {len(derivs)}")
    coeffs = compute_coefficients(m)
    scaled = np.array([T ** (i + 1) * float(d) for i, d in enumerate(derivs)])
    w = np.zeros(m)  # w_j = T^j z_{j+1}
    for i in range(m, 0, -1):
        acc = scaled[i - 1]
        for j in range(i + 1, m + 1):
            acc -= coeffs.as_float(i, j) * w[j - 1]
        w[i - 1] = acc
    z = np.empty(m + 1)
    z[0] = f0
    z[1:] = w / T ** np.arange(1, m + 1)
    return DifferentiatorState(z, k=1)
