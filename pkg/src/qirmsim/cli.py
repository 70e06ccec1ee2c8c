"""Command-line entry point: validate configs, run scenarios and sweeps,
emit metrics and trace CSV files.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import re
import sys
from pathlib import Path

from . import metrics as metrics_mod
from . import runner
from .model import STRATEGIES, ScenarioConfig, read_config, validate, write_config

_VALUE_RE = re.compile(r"^\s*([0-9.eE+-]+)\s*(mb|kb|gb)?\s*$", re.IGNORECASE)


def parse_value(text: str) -> float:
    """A sweep value with an optional unit suffix, normalized to mega
    units (MB for load, Mb/s for rate)."""
    m = _VALUE_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse value {text!r}")
    value = float(m.group(1))
    suffix = (m.group(2) or "mb").lower()
    scale = {"kb": 1e-3, "mb": 1.0, "gb": 1e3}[suffix]
    return value * scale


def _load_config(args) -> ScenarioConfig:
    cfg = read_config(args.config) if args.config else ScenarioConfig()
    seed = getattr(args, "seed", None)
    if seed is None and "QIRM_SEED" in os.environ:
        seed = int(os.environ["QIRM_SEED"])
    if seed is not None:
        cfg = dataclasses.replace(cfg, seed=seed)
    return cfg


def _check(cfg: ScenarioConfig) -> None:
    violations = validate(cfg)
    if violations:
        for v in violations:
            print(f"config error: {v}", file=sys.stderr)
        raise SystemExit(2)


def cmd_validate(args) -> int:
    cfg = _load_config(args)
    violations = validate(cfg)
    if violations:
        for v in violations:
            print(f"config error: {v}", file=sys.stderr)
        return 2
    print("config ok")
    return 0


def cmd_run(args) -> int:
    cfg = _load_config(args)
    _check(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    result = runner.run_scenario(cfg, collect_trace=True)
    report = result.report
    metrics_mod.export_metrics([report], out / "metrics.csv")
    metrics_mod.export_trace(result.trace_rows, out / "trace.csv")
    write_config(cfg, out / "scenario.cfg")
    eff = report.query_efficiency
    delay = "-" if report.avg_delay_s is None else f"{report.avg_delay_s:.3f}s"
    print(
        f"{cfg.strategy}: {report.total_queries} queries, efficiency {eff:.3f}, "
        f"avg delay {delay}, utilization {report.bw_utilization:.3f}"
    )
    print(f"wrote {out / 'metrics.csv'} and {out / 'trace.csv'}")
    return 0


def cmd_trace(args) -> int:
    cfg = _load_config(args)
    _check(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    result = runner.run_scenario(cfg, collect_trace=True)
    metrics_mod.export_trace(result.trace_rows, out / "trace.csv")
    print(f"wrote {len(result.trace_rows)} events to {out / 'trace.csv'}")
    return 0


def cmd_sweep(args) -> int:
    cfg = _load_config(args)
    _check(cfg)
    try:
        values = [parse_value(v) for v in args.values.split(",") if v.strip()]
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    strategies = [s.strip() for s in args.strategies.split(",") if s.strip()]
    for s in strategies:
        if s not in STRATEGIES:
            print(
                f"error: unknown strategy {s!r}; choose from {', '.join(STRATEGIES)}",
                file=sys.stderr,
            )
            return 2
    if not values or not strategies:
        print("error: sweep needs at least one value and one strategy", file=sys.stderr)
        return 2
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    reports = runner.run_sweep(
        cfg, args.param, values, strategies, args.seeds, jobs=args.jobs
    )
    metrics_mod.export_metrics(reports, out / "metrics.csv")
    print(
        f"ran {len(reports)} cells ({len(values)} values x {len(strategies)} "
        f"strategies x {args.seeds} seeds); wrote {out / 'metrics.csv'}"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qirmsim",
        description="Discrete-event simulator of a QoS-aware P2P replica "
        "placement and query routing overlay.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a single scenario")
    p_run.add_argument("--config", help="scenario file (defaults apply if omitted)")
    p_run.add_argument("--seed", type=int, help="override the scenario seed")
    p_run.add_argument("--out", default="out", help="output directory (default: out)")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="run an experiment grid")
    p_sweep.add_argument("--config", help="base scenario file")
    p_sweep.add_argument("--seed", type=int, help="override the base seed")
    p_sweep.add_argument(
        "--param", required=True, choices=["load", "rate"], help="swept parameter"
    )
    p_sweep.add_argument(
        "--values",
        required=True,
        help="comma list; unit suffixes allowed, e.g. 2,3,4,5 or 250kb,500kb,1mb",
    )
    p_sweep.add_argument(
        "--strategies",
        default="qirm,random_flood",
        help="comma list of strategies (default: qirm,random_flood)",
    )
    p_sweep.add_argument(
        "--seeds", type=int, default=5, help="seeds per cell (default: 5)"
    )
    p_sweep.add_argument(
        "--jobs", type=int, default=1, help="parallel worker processes (default: 1)"
    )
    p_sweep.add_argument("--out", default="out", help="output directory (default: out)")
    p_sweep.set_defaults(func=cmd_sweep)

    p_val = sub.add_parser("validate", help="check a scenario file")
    p_val.add_argument("--config", help="scenario file (defaults apply if omitted)")
    p_val.set_defaults(func=cmd_validate)

    p_trace = sub.add_parser("trace", help="run a scenario, keep only the event trace")
    p_trace.add_argument("--config", help="scenario file")
    p_trace.add_argument("--seed", type=int, help="override the scenario seed")
    p_trace.add_argument("--out", default="out", help="output directory (default: out)")
    p_trace.set_defaults(func=cmd_trace)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
