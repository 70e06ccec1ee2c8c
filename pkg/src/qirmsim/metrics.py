"""Per-run metric computation and CSV export/import.

Delay is the mean sojourn of served queries. Throughput is the aggregate
delivery rate clients experienced: delivered payload over the summed
delivery times of remotely served queries (bytes/s, and 1 KB segments/s).
Query efficiency is the fraction of issued queries served before the
client's patience window or the end of the run. Bandwidth utilization is
how much of the requesting clients' access capacity deliveries actually
achieved: payload bits over sojourn, relative to the client downlink,
averaged over remotely served queries.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence

from .model import (
    RES_FALLBACK,
    RES_LOCAL,
    RES_STRONG,
    RES_UNSERVED,
    ContentItem,
    MetricsReport,
    Query,
)
from .simnet import KB, MB, BandwidthLedger, LinkSpec

METRICS_COLUMNS = [
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

TRACE_COLUMNS = ["time", "event", "node", "peer", "content", "qid", "cls", "value"]


def finalize(
    records: Sequence[Query],
    ledger: BandwidthLedger,
    catalog: Sequence[ContentItem],
    kw2cid: dict[str, int],
    links: Sequence[LinkSpec],
) -> MetricsReport:
    """Reduce a finished run's query records and byte ledger to a report."""
    counts = {RES_LOCAL: 0, RES_STRONG: 0, RES_FALLBACK: 0, RES_UNSERVED: 0}
    delay_sum = 0.0
    served = 0
    remote = 0
    remote_bytes = 0.0
    remote_packets = 0
    remote_sojourn = 0.0
    util_sum = 0.0
    for q in records:
        counts[q.resolution] += 1
        if q.resolution == RES_UNSERVED:
            continue
        served += 1
        sojourn = q.completed_at - q.issued_at
        delay_sum += sojourn
        if q.resolution == RES_LOCAL:
            continue
        remote += 1
        nbytes = catalog[kw2cid[q.ckwd]].size * MB
        remote_bytes += nbytes
        remote_packets += math.ceil(nbytes / KB)
        remote_sojourn += sojourn
        util_sum += nbytes * 8.0 / (sojourn * links[q.nid].down_capacity * MB)

    total = len(records)
    assert sum(counts.values()) == total, "resolution counts must partition queries"
    report = MetricsReport(
        avg_delay_s=(delay_sum / served) if served else None,
        throughput_Bps=(remote_bytes / remote_sojourn) if remote_sojourn > 0 else 0.0,
        throughput_pps=(remote_packets / remote_sojourn) if remote_sojourn > 0 else 0.0,
        query_efficiency=(served / total) if total else 0.0,
        bw_utilization=(util_sum / remote) if remote else 0.0,
        local_hits=counts[RES_LOCAL],
        strong_hits=counts[RES_STRONG],
        fallbacks=counts[RES_FALLBACK],
        unserved=counts[RES_UNSERVED],
    )
    return report


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def export_metrics(reports: Sequence[MetricsReport], path: str | Path) -> None:
    """Write metrics.csv: one row per run, full-precision numbers, stable
    column order."""
    lines = [",".join(METRICS_COLUMNS)]
    for r in reports:
        lines.append(
            ",".join(
                [
                    r.strategy,
                    r.param_name,
                    _fmt(float(r.param_value)),
                    str(r.seed),
                    _fmt(r.avg_delay_s),
                    _fmt(r.throughput_Bps),
                    _fmt(r.throughput_pps),
                    _fmt(r.query_efficiency),
                    _fmt(r.bw_utilization),
                    str(r.local_hits),
                    str(r.strong_hits),
                    str(r.fallbacks),
                    str(r.unserved),
                ]
            )
        )
    Path(path).write_text("\n".join(lines) + "\n")


def parse_metrics(path: str | Path) -> list[MetricsReport]:
    """Read metrics.csv back into reports (lossless round trip)."""
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0].split(",") != METRICS_COLUMNS:
        raise ValueError(f"{path}: unrecognized metrics.csv header")
    reports = []
    for line in lines[1:]:
        f = line.split(",")
        reports.append(
            MetricsReport(
                strategy=f[0],
                param_name=f[1],
                param_value=float(f[2]),
                seed=int(f[3]),
                avg_delay_s=float(f[4]) if f[4] else None,
                throughput_Bps=float(f[5]),
                throughput_pps=float(f[6]),
                query_efficiency=float(f[7]),
                bw_utilization=float(f[8]),
                local_hits=int(f[9]),
                strong_hits=int(f[10]),
                fallbacks=int(f[11]),
                unserved=int(f[12]),
            )
        )
    return reports


def export_trace(rows: Sequence[tuple], path: str | Path) -> None:
    """Write trace.csv sorted by time (stable for simultaneous events)."""
    ordered = sorted(rows, key=lambda r: r[0])
    lines = [",".join(TRACE_COLUMNS)]
    for time, event, node, peer, content, qid, cls, value in ordered:
        lines.append(
            ",".join(
                [
                    repr(float(time)),
                    event,
                    "" if node is None else str(node),
                    "" if peer is None else str(peer),
                    "" if content is None else str(content),
                    "" if qid is None else str(qid),
                    cls,
                    _fmt(value),
                ]
            )
        )
    Path(path).write_text("\n".join(lines) + "\n")


def parse_trace(path: str | Path) -> list[tuple]:
    """Read trace.csv back into typed rows."""
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0].split(",") != TRACE_COLUMNS:
        raise ValueError(f"{path}: unrecognized trace.csv header")
    rows = []
    for line in lines[1:]:
        f = line.split(",")
        rows.append(
            (
                float(f[0]),
                f[1],
                int(f[2]) if f[2] else None,
                int(f[3]) if f[3] else None,
                int(f[4]) if f[4] else None,
                int(f[5]) if f[5] else None,
                f[6],
                float(f[7]) if f[7] else None,
            )
        )
    return rows
