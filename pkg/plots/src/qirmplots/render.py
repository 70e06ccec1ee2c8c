"""Render the six experiment figures from a sweep metrics.csv.

One line per strategy; each point is the mean over seeds with a standard
deviation error bar. The input file may mix load-sweep and rate-sweep
rows; each figure draws from the rows of its own sweep parameter.
"""

from __future__ import annotations

import argparse
import csv
import sys
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

EXPECTED_COLUMNS = [
    "strategy",
    "param_name",
    "param_value",
    "seed",
    "avg_delay_s",
    "throughput_Bps",
    "throughput_pps",
    "query_efficiency",
    "bw_utilization",
    "local_hits",
    "strong_hits",
    "fallbacks",
    "unserved",
]

# figure name, sweep parameter, metric column, axis labels, y scale
FIGURES = [
    ("load_vs_delay", "load", "avg_delay_s", "content size (MB)", "mean delay (s)", 1.0),
    ("load_vs_throughput", "load", "throughput_Bps", "content size (MB)", "delivery rate (MB/s)", 1e-6),
    ("rate_vs_efficiency", "rate", "query_efficiency", "offered rate (Mb/s per node)", "query efficiency", 1.0),
    ("rate_vs_delay", "rate", "avg_delay_s", "offered rate (Mb/s per node)", "mean delay (s)", 1.0),
    ("rate_vs_throughput", "rate", "throughput_Bps", "offered rate (Mb/s per node)", "delivery rate (MB/s)", 1e-6),
    ("rate_vs_utilization", "rate", "bw_utilization", "offered rate (Mb/s per node)", "bandwidth utilization", 1.0),
]


class SchemaError(ValueError):
    pass


def read_rows(path: str | Path) -> list[dict]:
    """Parse metrics.csv, checking that every expected column is present."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in EXPECTED_COLUMNS if c not in header]
        if missing:
            raise SchemaError(f"metrics.csv is missing column(s): {', '.join(missing)}")
        rows = []
        for raw in reader:
            rows.append(
                {
                    "strategy": raw["strategy"],
                    "param_name": raw["param_name"],
                    "param_value": float(raw["param_value"]),
                    "avg_delay_s": float(raw["avg_delay_s"]) if raw["avg_delay_s"] else None,
                    "throughput_Bps": float(raw["throughput_Bps"]),
                    "query_efficiency": float(raw["query_efficiency"]),
                    "bw_utilization": float(raw["bw_utilization"]),
                }
            )
        return rows


def series_for(rows: list[dict], param: str, metric: str):
    """Per strategy: sweep values with seed means and standard deviations."""
    grouped: dict[str, dict[float, list[float]]] = defaultdict(lambda: defaultdict(list))
    for row in rows:
        if row["param_name"] != param or row[metric] is None:
            continue
        grouped[row["strategy"]][row["param_value"]].append(row[metric])
    series = {}
    for strategy in sorted(grouped):
        values = sorted(grouped[strategy])
        means = [float(np.mean(grouped[strategy][v])) for v in values]
        stds = [float(np.std(grouped[strategy][v])) for v in values]
        series[strategy] = (values, means, stds)
    return series


def render(in_path: str | Path, out_dir: str | Path, fmt: str = "png") -> list[tuple[str, int, Path]]:
    """Write the six figures; returns (figure name, line count, path) per
    file. A header-only CSV renders nothing."""
    if fmt not in ("png", "svg"):
        raise ValueError(f"unsupported format {fmt!r}; choose png or svg")
    rows = read_rows(in_path)
    if not rows:
        print("warning: metrics.csv has no data rows; nothing to render", file=sys.stderr)
        return []
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, param, metric, xlabel, ylabel, scale in FIGURES:
        series = series_for(rows, param, metric)
        fig, ax = plt.subplots(figsize=(5.5, 3.8))
        for strategy, (values, means, stds) in series.items():
            ax.errorbar(
                values,
                [m * scale for m in means],
                yerr=[s * scale for s in stds],
                marker="o",
                capsize=3,
                label=strategy,
            )
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.grid(True, alpha=0.3)
        if series:
            ax.legend()
        else:
            ax.text(0.5, 0.5, f"no {param}-sweep rows", ha="center", va="center",
                    transform=ax.transAxes)
            print(f"warning: no rows for the {param} sweep; {name} is empty", file=sys.stderr)
        fig.tight_layout()
        path = out / f"{name}.{fmt}"
        fig.savefig(path)
        plt.close(fig)
        written.append((name, len(series), path))
    return written


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="qirm-plots", description="Render experiment figures from sweep metrics."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render the six figures")
    p.add_argument("--in", dest="in_path", required=True, help="metrics.csv from a sweep")
    p.add_argument("--out", required=True, help="output directory for the figures")
    p.add_argument("--format", choices=["png", "svg"], default="png")
    args = parser.parse_args(argv)

    try:
        written = render(args.in_path, args.out, args.format)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for name, lines, path in written:
        print(f"wrote {path} ({lines} strategies)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
