"""Command-line front end: ``ired {tune,run,bounds,compare}``.

Exit status: 0 success, 2 configuration error, 3 tuning condition failed,
4 solver failure during a run.
"""

from __future__ import annotations

import argparse
import csv
import re
import sys
from typing import Sequence

import numpy as np

from .config import DEFAULT_CONFIG, ConfigError, RunConfig, load_config, parse_kind
from .core import DifferentiatorConfig
from .sim import RunRecord, SimulationError, convergence_step, run
from .tuning import (
    InvalidTuningParameter,
    check_gain_conditions,
    compute_constants,
    exactness_bound,
    noisy_bound,
    structural_constants,
    tune_gains,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_TUNING = 3
EXIT_SOLVER = 4

# noise-free polynomial runs have a zero bound; this absorbs float rounding
CONVERGENCE_ATOL = 1e-9


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _kinds(text: str) -> list[str]:
    return [k.strip() for k in re.split(r"[,;]", text) if k.strip()]


def _kv(out, **items) -> None:
    for key, value in items.items():
        out.write(f"{key}={value}\n")


def _fmt(values) -> str:
    return ",".join(repr(float(v)) for v in values)


def cmd_tune(args) -> int:
    out = sys.stdout
    try:
        gains = tune_gains(args.m, args.lambda_last, args.mu_bar, args.a)
        _, _, _, _, mu = structural_constants(args.m, args.a)
    except InvalidTuningParameter as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_TUNING
    cfg = DifferentiatorConfig(args.m, args.L, args.T, gains)
    constants = compute_constants(args.m, args.a, cfg)
    report = check_gain_conditions(cfg, constants)
    _kv(
        out,
        m=args.m,
        lambdas=_fmt(gains),
        mu=_fmt(mu),
        last_gain_margin=repr(report.last_gain_margin),
        ratio_margins=_fmt(report.ratio_margins),
        N_bar=repr(constants.N_bar),
        passed=str(report.passed).lower(),
    )
    return EXIT_OK if report.passed else EXIT_TUNING


def _active_bounds(rc: RunConfig, diff) -> list[float]:
    m = diff.m
    if rc.noise.N > 0 and rc.kind in ("ired", "istd"):
        cfg = diff.config
        constants = compute_constants(m, rc.a, cfg)
        N_eff = rc.noise.N + cfg.equivalent_noise()
        return [noisy_bound(i, m, cfg.L, cfg.T, N_eff, constants) for i in range(1, m + 1)]
    M = rc.signal.lipschitz_bound(m)
    return [exactness_bound(i, m, M, rc.T) for i in range(1, m + 1)]


def _apply_overrides(rc: RunConfig, args) -> RunConfig:
    if getattr(args, "seed", None) is not None:
        rc.noise.seed = args.seed
    if getattr(args, "steps", None) is not None:
        rc.steps = args.steps
    if getattr(args, "format", None) is not None:
        rc.output_format = args.format
    if getattr(args, "out", None) is not None:
        rc.output_path = args.out
    return rc


def summarize(record: RunRecord) -> dict[str, str]:
    rows = len(record)
    summary = {"rows": str(rows)}
    if rows == 0:
        summary.update(converged="true", convergence_step="0", sliding_fraction="nan")
        return summary
    tail = record.tail()
    err = np.abs(record.errors[tail])
    k_star = convergence_step(record, atol=CONVERGENCE_ATOL)
    summary["converged"] = str(k_star is not None).lower()
    summary["convergence_step"] = "none" if k_star is None else str(int(record.k[k_star]))
    for i in range(record.m):
        summary[f"tail_max_e{i + 1}"] = repr(float(err[:, i].max()))
        summary[f"bound{i + 1}"] = repr(float(record.bound[0, i]))
    summary["sliding_fraction"] = repr(float(np.mean(record.sliding)))
    return summary


def _write_record(record: RunRecord, rc: RunConfig) -> None:
    writer = record.to_csv if rc.output_format == "csv" else record.to_kv
    if rc.output_path:
        with open(rc.output_path, "w", newline="") as fh:
            writer(fh)


def cmd_run(args) -> int:
    out = sys.stdout
    try:
        rc = _apply_overrides(load_config(args.config), args)
        diff = rc.build()
        bounds = _active_bounds(rc, diff)
    except (ConfigError, InvalidTuningParameter) as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG
    try:
        record = run(diff, rc.signal, rc.noise, rc.steps, bounds)
    except SimulationError as exc:
        sys.stderr.write(f"solver failure at {exc}\n")
        return EXIT_SOLVER
    _write_record(record, rc)
    _kv(out, kind=rc.kind, **summarize(record))
    return EXIT_OK


def cmd_bounds(args) -> int:
    out = sys.stdout
    try:
        cfg = DifferentiatorConfig(args.m, args.L, args.T, args.lambdas)
        constants = compute_constants(args.m, args.a, cfg)
    except (ValueError, InvalidTuningParameter) as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["i", "N", "exactness_bound", "noisy_bound", "N_bar", "N_le_N_bar"])
    for N in args.N:
        for i in range(1, args.m + 1):
            w.writerow(
                [
                    i,
                    repr(N),
                    repr(exactness_bound(i, args.m, args.L, args.T)),
                    repr(noisy_bound(i, args.m, args.L, args.T, N, constants)),
                    repr(constants.N_bar),
                    str(N <= constants.N_bar).lower(),
                ]
            )
    return EXIT_OK


def compare_runs(rc: RunConfig, kinds: Sequence[str]):
    """Run each kind on the configured scenario; returns (records, skipped)."""
    records: dict[str, RunRecord] = {}
    skipped: list[str] = []
    for label in kinds:
        kind, arg = parse_kind(label)
        if not rc.order_supported(kind):
            skipped.append(label)
            continue
        if kind == "ihdd":
            diff = rc.build(kind, c=arg)
        elif kind == "filtering_ired":
            diff = rc.build(kind, q=int(arg) if arg is not None else None)
        else:
            diff = rc.build(kind)
        records[label] = run(diff, rc.signal, rc.noise, rc.steps)
    return records, skipped


def write_compare_csv(records: dict[str, RunRecord], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    if not records:
        w.writerow(["k", "t", "u", "eta"])
        return
    first = next(iter(records.values()))
    m = first.m
    header = ["k", "t", "u", "eta"] + [f"f{i}" for i in range(1, m + 1)]
    for name in records:
        header += [f"{name}_y{i}" for i in range(1, m + 1)]
        header += [f"{name}_e{i}" for i in range(1, m + 1)]
        header += [f"{name}_sliding"]
    w.writerow(header)
    for r in range(len(first)):
        row = [int(first.k[r]), repr(float(first.t[r])), repr(float(first.u[r])), repr(float(first.eta[r]))]
        row += [repr(float(v)) for v in first.true[r]]
        for rec in records.values():
            row += [repr(float(v)) for v in rec.y[r]]
            row += [repr(float(v)) for v in rec.errors[r]]
            row += [int(bool(rec.sliding[r]))]
        w.writerow(row)


def cmd_compare(args) -> int:
    out = sys.stdout
    try:
        rc = _apply_overrides(load_config(args.config), args)
        records, skipped = compare_runs(rc, args.kinds)
    except (ConfigError, InvalidTuningParameter) as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG
    except SimulationError as exc:
        sys.stderr.write(f"solver failure at {exc}\n")
        return EXIT_SOLVER
    if rc.output_path:
        with open(rc.output_path, "w", newline="") as fh:
            write_compare_csv(records, fh)
    for name, rec in records.items():
        for key, value in summarize(rec).items():
            out.write(f"{name}.{key}={value}\n")
    _kv(out, skipped=",".join(skipped))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ired", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tune", help="generate gains with the product tuning rule")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--lambda-last", type=float, required=True)
    p.add_argument("--a", type=_floats, default=None, help="a_1..a_m in (1, 2); default 1.5")
    p.add_argument("--mu-bar", type=_floats, default=None, help="mu_bar_1..mu_bar_m; default 1.1 mu_j")
    p.add_argument("--L", type=float, default=1.0, help="only used for N_bar")
    p.add_argument("--T", type=float, default=0.1, help="only used for N_bar")
    p.set_defaults(func=cmd_tune)

    for name, func, help_ in (
        ("run", cmd_run, "simulate one differentiator from a config file"),
        ("compare", cmd_compare, "run several differentiators on one scenario"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", default=str(DEFAULT_CONFIG))
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--steps", type=int, default=None)
        p.add_argument("--out", default=None)
        p.add_argument("--format", choices=("csv", "kv"), default=None)
        p.set_defaults(func=func)
        if name == "compare":
            p.add_argument("--kinds", type=_kinds, required=True,
                           help="comma-separated kinds, e.g. 'ired,hidd1' or 'ihdd(1),ihdd(0)'")

    p = sub.add_parser("bounds", help="tabulate error bounds over a noise grid")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--L", type=float, required=True)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--lambdas", type=_floats, required=True)
    p.add_argument("--N", type=_floats, default=(0.0,))
    p.add_argument("--a", type=_floats, default=None)
    p.set_defaults(func=cmd_bounds)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
