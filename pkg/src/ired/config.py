"""TOML run configuration: schema, validation and object construction.

Example (the shipped third-order sine scenario)::

    [differentiator]
    kind = "ired"            # ired | filtering_ired | hidd1 | ihdd | istd
    m = 3
    L = 2.0
    T = 0.1
    lambdas = [3.0, 4.16, 3.06, 1.1]
    R = 5e-7

    [signal]
    kind = "sin_minus_coshalf"

    [noise]
    kind = "none"

    [run]
    steps = 600

Every table and key is optional except ``differentiator.m/L/T`` and
``signal.kind``; unknown keys are rejected.
"""

from __future__ import annotations

import re
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .core import DifferentiatorConfig
from .differentiators import FilteringIred, Hidd1, IhddFamily, Ired, Istd, init_from_derivatives
from .sim import NoiseModel, SignalModel, Sinusoid
from .tuning import tune_gains

DEFAULT_CONFIG = Path(__file__).with_name("configs") / "third_order_sine.toml"

KINDS = ("ired", "filtering_ired", "hidd1", "ihdd", "istd")
SIGNALS = ("sin_minus_coshalf", "polynomial", "monomial_worst_case", "mixture")

_SCHEMA = {
    "differentiator": {"kind", "m", "L", "T", "lambdas", "lambda_last", "a", "mu_bar", "R", "q", "c", "init"},
    "signal": {"kind", "coefficients", "M", "sinusoids"},
    "noise": {"kind", "N", "seed"},
    "run": {"steps"},
    "output": {"path", "format"},
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    kind: str
    m: int
    L: float
    T: float
    lambdas: tuple[float, ...] | None = None
    lambda_last: float = 1.1
    a: tuple[float, ...] | None = None
    mu_bar: tuple[float, ...] | None = None
    R: float = 0.0
    q: int = 1
    c: float = 1.0
    init: str = "zero"
    signal: SignalModel = field(default_factory=SignalModel.sin_minus_coshalf)
    noise: NoiseModel = field(default_factory=NoiseModel)
    steps: int = 600
    output_path: str | None = None
    output_format: str = "csv"

    def n_gains(self, kind: str | None = None) -> int:
        kind = kind or self.kind
        if kind == "filtering_ired":
            return self.q + self.m + 1
        return self.m + 1

    def order_supported(self, kind: str) -> bool:
        return {"hidd1": 1, "istd": 1, "ihdd": 2}.get(kind, self.m) == self.m

    def gains(self, kind: str | None = None) -> tuple[float, ...]:
        kind = kind or self.kind
        n = self.n_gains(kind)
        if self.lambdas is not None:
            if len(self.lambdas) != n:
                raise ConfigError(f"differentiator.lambdas: expected {n} gains for {kind}, got {len(self.lambdas)}")
            return self.lambdas
        return tune_gains(n - 1, self.lambda_last, self.mu_bar, self.a)

    def differentiator_config(self) -> DifferentiatorConfig:
        return DifferentiatorConfig(self.m, self.L, self.T, self.gains("ired"), self.R)

    def build(self, kind: str | None = None, c: float | None = None, q: int | None = None):
        """Instantiate the differentiator of ``kind`` (default: configured kind)."""
        kind = kind or self.kind
        if not self.order_supported(kind):
            raise ConfigError(f"{kind} does not support order m={self.m}")
        L, T = self.L, self.T
        if kind in ("ired", "istd"):
            cfg = DifferentiatorConfig(self.m, L, T, self.gains(kind), self.R)
            state = None
            if self.init == "matched":
                state = init_from_derivatives(
                    cfg, self.signal(0.0), [self.signal.derivative(i, 0.0) for i in range(1, self.m + 1)]
                )
            return (Ired if kind == "ired" else Istd)(cfg, state)
        if kind == "filtering_ired":
            q = self.q if q is None else q
            gains = self.gains(kind) if q == self.q else tune_gains(q + self.m, self.lambda_last)
            return FilteringIred.from_gains(q, self.m, L, T, gains, self.R)
        if kind == "hidd1":
            return Hidd1(L, T, self.gains(kind))
        if kind == "ihdd":
            return IhddFamily(L, T, self.gains(kind), c=self.c if c is None else c)
        raise ConfigError(f"unknown differentiator kind {kind!r}")


def _check_keys(section: str, table: Any) -> None:
    if not isinstance(table, dict):
        raise ConfigError(f"[{section}] must be a table")
    unknown = set(table) - _SCHEMA[section]
    if unknown:
        raise ConfigError(f"[{section}]: unknown key(s) {', '.join(sorted(unknown))}")


def _num(table: dict, key: str, section: str, default=None, kind=float):
    if key not in table:
        if default is None:
            raise ConfigError(f"{section}.{key}: required")
        return default
    v = table[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{section}.{key}: expected a number, got {v!r}")
    if kind is int and int(v) != v:
        raise ConfigError(f"{section}.{key}: expected an integer, got {v!r}")
    return kind(v)


def _seq(table: dict, key: str, section: str):
    if key not in table:
        return None
    v = table[key]
    if not isinstance(v, list) or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v):
        raise ConfigError(f"{section}.{key}: expected a list of numbers")
    return tuple(float(x) for x in v)


def _signal(table: dict, m: int) -> SignalModel:
    _check_keys("signal", table)
    kind = table.get("kind")
    if kind not in SIGNALS:
        raise ConfigError(f"signal.kind: expected one of {SIGNALS}, got {kind!r}")
    if kind == "sin_minus_coshalf":
        return SignalModel.sin_minus_coshalf()
    if kind == "monomial_worst_case":
        return SignalModel.monomial_worst_case(_num(table, "M", "signal"), m)
    coeffs = _seq(table, "coefficients", "signal") or ()
    if kind == "polynomial":
        if not coeffs:
            raise ConfigError("signal.coefficients: required for polynomial signals")
        return SignalModel.polynomial(coeffs)
    sins = []
    for idx, s in enumerate(table.get("sinusoids", [])):
        if not isinstance(s, dict) or set(s) - {"amplitude", "omega", "phase"}:
            raise ConfigError(f"signal.sinusoids[{idx}]: expected keys amplitude, omega, phase")
        sins.append(Sinusoid(float(s["amplitude"]), float(s["omega"]), float(s.get("phase", 0.0))))
    return SignalModel.mixture(coeffs, sins)


def parse_config(data: dict) -> RunConfig:
    unknown = set(data) - set(_SCHEMA)
    if unknown:
        raise ConfigError(f"unknown section(s) {', '.join(sorted(unknown))}")
    for name in _SCHEMA:
        _check_keys(name, data.get(name, {}))
    d = data.get("differentiator", {})
    kind = d.get("kind", "ired")
    if kind not in KINDS:
        raise ConfigError(f"differentiator.kind: expected one of {KINDS}, got {kind!r}")
    m = _num(d, "m", "differentiator", kind=int)
    L = _num(d, "L", "differentiator")
    T = _num(d, "T", "differentiator")
    init = d.get("init", "zero")
    if init not in ("zero", "matched"):
        raise ConfigError(f"differentiator.init: expected 'zero' or 'matched', got {init!r}")
    if "signal" not in data:
        raise ConfigError("[signal]: required")
    noise_t = data.get("noise", {})
    noise_kind = noise_t.get("kind", "none")
    if noise_kind not in ("none", "uniform"):
        raise ConfigError(f"noise.kind: expected 'none' or 'uniform', got {noise_kind!r}")
    noise = NoiseModel(
        noise_kind,
        _num(noise_t, "N", "noise", 0.0),
        _num(noise_t, "seed", "noise", 0, kind=int),
    )
    out = data.get("output", {})
    fmt = out.get("format", "csv")
    if fmt not in ("csv", "kv"):
        raise ConfigError(f"output.format: expected 'csv' or 'kv', got {fmt!r}")
    steps = _num(data.get("run", {}), "steps", "run", 600, kind=int)
    if steps < 0:
        raise ConfigError("run.steps: must be nonnegative")

    cfg = RunConfig(
        kind=kind,
        m=m,
        L=L,
        T=T,
        lambdas=_seq(d, "lambdas", "differentiator"),
        lambda_last=_num(d, "lambda_last", "differentiator", 1.1),
        a=_seq(d, "a", "differentiator"),
        mu_bar=_seq(d, "mu_bar", "differentiator"),
        R=_num(d, "R", "differentiator", 0.0),
        q=_num(d, "q", "differentiator", 1, kind=int),
        c=_num(d, "c", "differentiator", 1.0),
        init=init,
        signal=_signal(data["signal"], m),
        noise=noise,
        steps=steps,
        output_path=out.get("path"),
        output_format=fmt,
    )
    try:
        # validates m, L, T, R and the gain vector against DifferentiatorConfig
        if cfg.order_supported(kind):
            gains = cfg.gains()
            if kind == "filtering_ired":
                DifferentiatorConfig(m + cfg.q, L, T, gains, cfg.R)
            else:
                DifferentiatorConfig(m, L, T, gains, cfg.R)
        else:
            raise ConfigError(f"differentiator.kind: {kind} does not support order m={m}")
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"[differentiator]: {exc}") from exc
    return cfg


def load_config(path: str | Path) -> RunConfig:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from exc
    return parse_config(data)


_KIND_RE = re.compile(r"^\s*(ired|filtering_ired|hidd1|ihdd|istd)\s*(?:\(\s*([-+0-9.eE]+)\s*\))?\s*$")


def parse_kind(label: str) -> tuple[str, float | None]:
    """``"ihdd(1)"`` -> ("ihdd", 1.0); ``"filtering_ired(2)"`` -> ("filtering_ired", 2.0)."""
    match = _KIND_RE.match(label)
    if not match:
        raise ConfigError(f"unknown differentiator kind {label!r}")
    arg = match.group(2)
    return match.group(1), None if arg is None else float(arg)
