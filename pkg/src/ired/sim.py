"""Test signals, noise, the simulation loop and run records."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .core import compute_coefficients


@dataclass(frozen=True)
class Sinusoid:
    """amplitude * sin(omega t + phase)"""

    amplitude: float
    omega: float
    phase: float = 0.0


@dataclass(frozen=True)
class SignalModel:
    """Polynomial plus sum of sinusoids, with analytic derivatives.

    ``poly`` holds ascending coefficients. ``kind`` is informational.
    """

    kind: str
    poly: tuple[float, ...] = ()
    sinusoids: tuple[Sinusoid, ...] = ()
    params: dict = field(default_factory=dict, compare=False)

    @classmethod
    def polynomial(cls, coefficients: Sequence[float]) -> "SignalModel":
        return cls("polynomial", tuple(float(c) for c in coefficients))

    @classmethod
    def sin_minus_coshalf(cls) -> "SignalModel":
        """f(t) = sin t - cos(t/2)."""
        return cls(
            "sin_minus_coshalf",
            (),
            (Sinusoid(1.0, 1.0, 0.0), Sinusoid(1.0, 0.5, -math.pi / 2)),
        )

    @classmethod
    def monomial_worst_case(cls, M: float, m: int) -> "SignalModel":
        """f(t) = M t^{m+1} / (m+1)!, which attains the noise-free error bound."""
        coeffs = [0.0] * (m + 1) + [M / math.factorial(m + 1)]
        return cls("monomial_worst_case", tuple(coeffs), (), {"M": M, "m": m})

    @classmethod
    def mixture(cls, coefficients: Sequence[float], sinusoids: Sequence[Sinusoid]) -> "SignalModel":
        return cls("mixture", tuple(float(c) for c in coefficients), tuple(sinusoids))

    def derivative(self, order: int, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for p, c in enumerate(self.poly):
            if p >= order and c != 0.0:
                out = out + c * math.perm(p, order) * t ** (p - order)
        for s in self.sinusoids:
            out = out + s.amplitude * s.omega**order * np.sin(s.omega * t + s.phase + order * math.pi / 2)
        return float(out) if out.ndim == 0 else out

    def __call__(self, t):
        return self.derivative(0, t)

    def extended(self, t, m: int):
        """Signal for t >= 0, its degree-m Taylor polynomial at 0 for t < 0."""
        t = np.asarray(t, dtype=float)
        taylor = np.zeros_like(t)
        for j in range(m + 1):
            taylor = taylor + self.derivative(j, 0.0) * t**j / math.factorial(j)
        out = np.where(t >= 0, self.derivative(0, np.maximum(t, 0.0)), taylor)
        return float(out) if out.ndim == 0 else out

    def derivative_bound(self, order: int) -> float:
        """Certified sup over t >= 0 of |f^(order)(t)| (inf if unbounded)."""
        degree = max((p for p, c in enumerate(self.poly) if c != 0.0), default=-1)
        if degree > order:
            return math.inf
        bound = sum(abs(s.amplitude) * abs(s.omega) ** order for s in self.sinusoids)
        if degree == order:
            bound += abs(self.poly[order]) * math.factorial(order)
        return bound

    def lipschitz_bound(self, m: int) -> float:
        """Bound on |f^(m+1)|, i.e. the Lipschitz constant of f^(m)."""
        return self.derivative_bound(m + 1)


@dataclass
class NoiseModel:
    """Bounded measurement noise.

    ``uniform`` draws i.i.d. samples from [-N, N] with numpy's PCG64 bit
    generator seeded by the given 64-bit integer, so records reproduce
    bit-exactly for a given seed.
    """

    kind: str = "none"
    N: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("none", "uniform"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.N < 0:
            raise ValueError("noise bound must be nonnegative")
        if self.kind == "none":
            self.N = 0.0

    def samples(self, steps: int) -> np.ndarray:
        if self.kind == "none" or self.N == 0.0:
            return np.zeros(steps)
        rng = np.random.Generator(np.random.PCG64(self.seed))
        eta = rng.uniform(-self.N, self.N, size=steps)
        return np.clip(eta, -self.N, self.N)


class SimulationError(RuntimeError):
    def __init__(self, k: int, cause: Exception):
        super().__init__(f"step {k}: {cause}")
        self.k = k
        self.cause = cause


@dataclass
class RunRecord:
    m: int
    T: float
    k: np.ndarray
    t: np.ndarray
    u: np.ndarray
    eta: np.ndarray
    z: np.ndarray  # (steps, n_states)
    y: np.ndarray  # (steps, m)
    sliding: np.ndarray
    true: np.ndarray  # (steps, m): f^(i)(kT)
    bound: np.ndarray  # (steps, m)

    @property
    def errors(self) -> np.ndarray:
        return self.y - self.true

    def __len__(self) -> int:
        return len(self.k)

    def columns(self) -> list[str]:
        n_states = self.z.shape[1]
        return (
            ["k", "t", "u", "eta"]
            + [f"z{i}" for i in range(1, n_states + 1)]
            + [f"y{i}" for i in range(1, self.m + 1)]
            + ["sliding"]
            + [f"f{i}" for i in range(1, self.m + 1)]
            + [f"e{i}" for i in range(1, self.m + 1)]
            + [f"bound{i}" for i in range(1, self.m + 1)]
        )

    def rows(self):
        err = self.errors
        for r in range(len(self)):
            yield (
                [int(self.k[r]), float(self.t[r]), float(self.u[r]), float(self.eta[r])]
                + [float(v) for v in self.z[r]]
                + [float(v) for v in self.y[r]]
                + [int(bool(self.sliding[r]))]
                + [float(v) for v in self.true[r]]
                + [float(v) for v in err[r]]
                + [float(v) for v in self.bound[r]]
            )

    def to_csv(self, fh=None) -> str | None:
        """Header row plus one row per step; floats use repr so they round-trip."""
        buf = fh if fh is not None else io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns())
        for row in self.rows():
            w.writerow([repr(v) if isinstance(v, float) else v for v in row])
        if fh is None:
            return buf.getvalue()
        return None

    def to_kv(self, fh=None) -> str | None:
        """One line per step of space-separated key=value pairs."""
        buf = fh if fh is not None else io.StringIO()
        cols = self.columns()
        for row in self.rows():
            buf.write(" ".join(f"{c}={v!r}" for c, v in zip(cols, row)) + "\n")
        if fh is None:
            return buf.getvalue()
        return None

    def tail(self, fraction: float = 0.25, minimum: int = 50) -> slice:
        """Index slice of the steady-state window (last 25%, at least 50 steps)."""
        n = len(self)
        size = min(n, max(minimum, int(math.ceil(fraction * n))))
        return slice(n - size, n)


def read_csv(text: str) -> dict[str, np.ndarray]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    data = [[float(v) for v in row] for row in reader]
    arr = np.array(data, dtype=float).reshape(-1, len(header))
    return {h: arr[:, i] for i, h in enumerate(header)}


def run(
    diff,
    signal: SignalModel,
    noise: NoiseModel | None = None,
    steps: int = 600,
    bound: Callable[[int], float] | Sequence[float] | None = None,
) -> RunRecord:
    """Feed u_k = f(kT) + eta_k through ``diff`` for ``steps`` samples.

    Sampling starts at the state's time index (k = 0 for a fresh state, so
    k = 0..steps-1). Row k records the outputs y_{., k} estimating f^(i)(kT).

    ``bound`` gives the reference error bound per output index (callable of
    i or a sequence); by default the noise-free bound c(i,m+1) M T^{m+1-i}
    with M the signal's certified bound on f^(m+1).
    """
    noise = noise or NoiseModel()
    m = diff.m
    T = diff.config.T if hasattr(diff, "config") else diff.T
    k0 = diff.state.k
    k = np.arange(k0, k0 + steps)
    t = k * T
    eta = noise.samples(k0 + steps)[k0:]
    u = np.asarray(signal(t), dtype=float).reshape(steps) + eta
    n_states = diff.state.z.shape[0]
    Z = np.empty((steps, n_states))
    Y = np.empty((steps, m))
    S = np.zeros(steps, dtype=bool)
    for idx in range(steps):
        try:
            out = diff.step(float(u[idx]))
        except Exception as exc:  # attach the step index
            raise SimulationError(int(k[idx]), exc) from exc
        Z[idx] = diff.state.z
        Y[idx] = out.y
        S[idx] = out.sliding
    true = np.stack([np.asarray(signal.derivative(i, t), dtype=float).reshape(steps) for i in range(1, m + 1)], axis=1) if steps else np.empty((0, m))

    if bound is None:
        coeffs = compute_coefficients(m)
        M = signal.lipschitz_bound(m)
        bvals = [float(coeffs(i, m + 1)) * M * T ** (m + 1 - i) for i in range(1, m + 1)]
    elif callable(bound):
        bvals = [bound(i) for i in range(1, m + 1)]
    else:
        bvals = list(bound)
    B = np.tile(np.asarray(bvals, dtype=float), (steps, 1))
    return RunRecord(m, T, k, t, u, eta, Z, Y, S, true, B)


def convergence_step(
    record: RunRecord,
    bound: Callable[[int], float] | Sequence[float] | None = None,
    rtol: float = 1e-9,
    atol: float = 0.0,
) -> int | None:
    """First step k* with |e_i(k)| <= bound_i (1 + rtol) + atol for all k >= k*.

    Returns None when the last step still violates the bound.
    """
    n = len(record)
    if n == 0:
        return 0
    if bound is None:
        B = record.bound
    elif callable(bound):
        B = np.tile([bound(i) for i in range(1, record.m + 1)], (n, 1))
    else:
        B = np.tile(np.asarray(bound, dtype=float), (n, 1))
    ok = np.all(np.abs(record.errors) <= B * (1 + rtol) + atol, axis=1)
    if not ok[-1]:
        return None
    bad = np.flatnonzero(~ok)
    return 0 if bad.size == 0 else int(bad[-1]) + 1
