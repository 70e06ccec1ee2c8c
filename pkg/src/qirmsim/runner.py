"""Scenario orchestration: builds the population, drives the event loop
for the chosen strategy, and reduces a run to metrics and trace rows.

Sweeps fan independent scenario cells out to worker processes; results
are ordered by grid index so parallel and sequential execution produce
identical artifacts.
"""

from __future__ import annotations

import dataclasses
import multiprocessing
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import metrics as metrics_mod
from . import placement, search, workload
from .model import (
    RES_FALLBACK,
    RES_LOCAL,
    RES_STRONG,
    RES_UNSERVED,
    STRATEGY_ORIGIN_ONLY,
    STRATEGY_QIRM,
    STRATEGY_RANDOM_FLOOD,
    ContentItem,
    MetricsReport,
    NodeSpec,
    Query,
    ScenarioConfig,
    validate,
)
from .simnet import (
    KB,
    MB,
    BandwidthLedger,
    Engine,
    LinkSpec,
    TransferScheduler,
    transfer_time,
)

EV_ARRIVAL = "ARRIVAL"
EV_EPOCH = "EPOCH"
EV_PUSH_START = "PUSH_START"
EV_PUSH_DONE = "PUSH_DONE"


@dataclass
class SimResult:
    report: MetricsReport
    records: list[Query]
    trace_rows: list[tuple]
    sim: "Simulation"


class Simulation:
    """One deterministic run of a scenario.

    State is owned by the single-threaded event loop; population, links,
    catalog and the query stream may be injected for hand-built tests.
    """

    def __init__(
        self,
        cfg: ScenarioConfig,
        nodes: Optional[list[NodeSpec]] = None,
        links: Optional[list[LinkSpec]] = None,
        catalog: Optional[list[ContentItem]] = None,
        queries: Optional[list[Query]] = None,
        collect_trace: bool = False,
    ):
        violations = validate(cfg)
        if violations:
            raise ValueError("invalid config: " + "; ".join(violations))
        self.cfg = cfg
        rng = np.random.default_rng(cfg.seed)
        if nodes is None:
            nodes, links, catalog = workload.generate_nodes(cfg, rng)
        if queries is None:
            queries = workload.generate_queries(cfg, rng)
        assert links is not None and catalog is not None
        self.nodes = nodes
        self.links = links
        self.catalog = catalog
        self.records = queries
        self.kw2cid = {c.ckwd: c.id for c in catalog}

        self.engine = Engine(seed=cfg.seed)
        self.engine.rng = rng  # one generator; all stochastic draws flow through it
        self.ledger = BandwidthLedger(cfg.report_interval or cfg.duration, len(self.nodes))
        self.transfers = TransferScheduler(self.links)
        self.strong_ids = sorted(n.id for n in self.nodes if n.cluster == "S")
        self.strong_set = set(self.strong_ids)
        self.profiles = [search.Profile(n.id, cfg.t_window) for n in self.nodes]
        self.counter = placement.AccessCounter([c.ckwd for c in catalog])
        self.directory: dict[int, list[tuple[int, float, float]]] = {}
        self.payload_useful_bytes = 0.0
        self._push_ready: dict[int, float] = {}
        self._anchor_pending: dict[int, tuple[int, int]] = {}
        self.promotion_enabled = cfg.strategy == STRATEGY_QIRM
        self.record_profiles = cfg.strategy == STRATEGY_QIRM
        self.warmup_end = cfg.warmup_frac * cfg.duration
        self._trace: Optional[list[tuple]] = [] if collect_trace else None
        self._ctrl_mb = cfg.control_packet_kb * KB / MB
        self._ctrl_bytes = cfg.control_packet_kb * KB
        # unloaded one-way control times, indexed [src][dst]
        self._ctrl_oneway = [
            [
                transfer_time(0.0, ls, ld, cfg.control_packet_kb) if ls is not ld else 0.0
                for ld in self.links
            ]
            for ls in self.links
        ]

    # -- plumbing used by the search module ------------------------------

    def trace(self, time, event, node, peer, content, qid, cls, value) -> None:
        if self._trace is not None:
            self._trace.append((time, event, node, peer, content, qid, cls, value))

    def schedule(self, fire_at: float, kind: str, payload: tuple) -> None:
        self.engine.schedule(fire_at, kind, payload)

    def deadline(self, query, size_mb: float) -> float:
        """When the requesting client gives up on a query, scaled by the
        payload it is waiting for."""
        return query.issued_at + self.cfg.patience_s_per_mb * size_mb

    def control_one_way(self, src: int, dst: int) -> float:
        return self._ctrl_oneway[src][dst]

    def control_rtt(self, a: int, b: int) -> float:
        return self._ctrl_oneway[a][b] + self._ctrl_oneway[b][a]

    def charge_control(self, src: int, dst: int, now: float) -> None:
        self.ledger.charge(src, self._ctrl_bytes, "up", now)
        self.ledger.charge(dst, self._ctrl_bytes, "down", now)

    def broadcast_control(self, sender: int, now: float) -> None:
        """One control packet from sender to every other node."""
        others = len(self.nodes) - 1
        self.ledger.charge(sender, self._ctrl_bytes * others, "up", now)
        for node in self.nodes:
            if node.id != sender:
                self.ledger.charge(node.id, self._ctrl_bytes, "down", now)

    def schedule_replica_push(self, cid: int, host: int) -> None:
        """Replication runs at quarter duty cycle per origin uplink, and
        only books the link when its slot comes up, so a placement epoch
        cannot starve concurrent query traffic."""
        origin = self.catalog[cid].origin
        size = self.catalog[cid].size
        serialization = size * 8.0 / self.links[origin].up_capacity
        ready = max(self.engine.now, self._push_ready.get(origin, 0.0))
        self._push_ready[origin] = ready + 4.0 * serialization
        self.engine.schedule(ready, EV_PUSH_START, (cid, host))

    def schedule_replica_pushes(self, cid: int, others: list[int], anchor: int) -> None:
        """Push a content's copies with the anchor strictly last: it ships
        only after every other copy has landed, so the designated host
        always ends up holding the freshest replica."""
        if others:
            self._anchor_pending[cid] = (len(others), anchor)
            for host in others:
                self.schedule_replica_push(cid, host)
        else:
            self.schedule_replica_push(cid, anchor)

    def _on_push_start(self, cid: int, host: int) -> None:
        origin = self.catalog[cid].origin
        booking = self.transfers.reserve(origin, host, self.engine.now, self.catalog[cid].size)
        self.engine.schedule(booking[2], EV_PUSH_DONE, (cid, host))

    # -- event handlers ---------------------------------------------------

    def _dispatch(self, engine: Engine, kind: str, payload: tuple) -> None:
        if kind == EV_ARRIVAL:
            self._on_arrival(payload[0])
        elif kind == search.EV_DECISION:
            qid, cid, targets, acks = payload
            search.decide(self, self.records[qid], cid, targets, acks)
        elif kind == search.EV_COMPLETE:
            qid, cid, server, res_kind = payload
            search.complete(self, self.records[qid], cid, server, res_kind)
        elif kind == EV_PUSH_START:
            self._on_push_start(*payload)
        elif kind == EV_PUSH_DONE:
            self._on_push_done(*payload)
        elif kind == EV_EPOCH:
            self._on_epoch()

    def _on_arrival(self, qid: int) -> None:
        query = self.records[qid]
        strategy = self.cfg.strategy
        if strategy == STRATEGY_QIRM:
            if self.engine.now < self.warmup_end:
                placement.register_query(self.counter, query)
            search.resolve(self, query)
        elif strategy == STRATEGY_RANDOM_FLOOD:
            self._flood_resolve(query)
        else:
            self._origin_resolve(query)

    def _on_push_done(self, cid: int, host: int) -> None:
        now = self.engine.now
        size = self.catalog[cid].size
        origin = self.catalog[cid].origin
        self.ledger.charge(origin, size * MB, "up", now)
        self.ledger.charge(host, size * MB, "down", now)
        node = self.nodes[host]
        node.cache.insert(cid, now)
        self.directory.setdefault(cid, []).append((host, node.weight, now))
        self.trace(now, "PLACE", host, origin, cid, None, self.catalog[cid].cls, node.weight)
        pending = self._anchor_pending.get(cid)
        if pending is not None:
            remaining, anchor = pending
            if remaining <= 1:
                del self._anchor_pending[cid]
                self.schedule_replica_push(cid, anchor)
            else:
                self._anchor_pending[cid] = (remaining - 1, anchor)

    def _on_epoch(self) -> None:
        now = self.engine.now
        if self.cfg.strategy == STRATEGY_QIRM:
            classes = placement.classify(self.counter, self.cfg.a_min, self.catalog)
            for content in self.catalog:
                content.cls = classes[content.id]
            weak = {n.id for n in self.nodes if n.id not in self.strong_set}
            plan = placement.build_plan(
                classes,
                self.strong_set,
                weak,
                self.nodes,
                self.counter,
                self.catalog,
                self.cfg.a_min,
                now,
            )
            placement.apply_plan(plan, self)
            for message in placement.broadcast_placement(plan, self.nodes):
                # announcements fan out from the message's first content origin
                sender = self.catalog[message.content_ids[0]].origin
                self.broadcast_control(sender, now)
        elif self.cfg.strategy == STRATEGY_RANDOM_FLOOD:
            plan = placement.baseline_place(
                self.cfg.strategy, self.catalog, self.nodes, self.engine.rng, now
            )
            placement.apply_plan(plan, self)

    # -- baseline query paths ---------------------------------------------

    def _flood_resolve(self, query: Query) -> None:
        """random_flood: request every other node, no profiles, no caching."""
        now = self.engine.now
        cid = self.kw2cid.get(query.ckwd)
        if cid is None:
            query.resolution = RES_UNSERVED
            self.trace(now, "QUERY", query.nid, None, None, query.qid, "unknown", None)
            return
        self.trace(now, "QUERY", query.nid, None, cid, query.qid, "", None)
        client = self.nodes[query.nid]
        if client.holds(cid):
            if cid in client.cache:
                client.cache.touch(cid)
            query.resolution = RES_LOCAL
            query.completed_at = now
            query.served_by = client.id
            return
        acks = []
        worst_rtt = 0.0
        for node in self.nodes:
            if node.id == client.id:
                continue
            rtt = self.control_rtt(client.id, node.id)
            if rtt > worst_rtt:
                worst_rtt = rtt
            self.charge_control(client.id, node.id, now)
            ack = search.handle_request(node, cid)
            if ack is not None:
                self.charge_control(node.id, client.id, now)
                acks.append(ack)
                self.trace(now + rtt, "ACK", node.id, client.id, cid, query.qid, "", ack.ts)
        targets = tuple(n.id for n in self.nodes if n.id != client.id)
        self.schedule(
            now + worst_rtt, search.EV_DECISION, (query.qid, cid, targets, tuple(acks))
        )

    def _origin_resolve(self, query: Query) -> None:
        """origin_only: every miss goes straight to the content's origin."""
        now = self.engine.now
        cid = self.kw2cid.get(query.ckwd)
        if cid is None:
            query.resolution = RES_UNSERVED
            self.trace(now, "QUERY", query.nid, None, None, query.qid, "unknown", None)
            return
        self.trace(now, "QUERY", query.nid, None, cid, query.qid, "", None)
        client = self.nodes[query.nid]
        if client.holds(cid):
            query.resolution = RES_LOCAL
            query.completed_at = now
            query.served_by = client.id
            return
        search.start_fallback(self, query, cid)

    # -- run ----------------------------------------------------------------

    def run(self) -> SimResult:
        cfg = self.cfg
        for q in self.records:
            self.engine.schedule(q.issued_at, EV_ARRIVAL, (q.qid,))
        if cfg.strategy in (STRATEGY_QIRM, STRATEGY_RANDOM_FLOOD):
            self.engine.schedule(self.warmup_end, EV_EPOCH, ())
        self.engine.handler = self._dispatch
        self.engine.run_until(cfg.duration)
        for q in self.records:
            if q.resolution is None:
                q.resolution = RES_UNSERVED
        report = metrics_mod.finalize(
            self.records, self.ledger, self.catalog, self.kw2cid, self.links
        )
        report.strategy = cfg.strategy
        report.seed = cfg.seed
        return SimResult(
            report=report,
            records=self.records,
            trace_rows=self._trace if self._trace is not None else [],
            sim=self,
        )


def run_scenario(
    cfg: ScenarioConfig,
    collect_trace: bool = False,
    **inject,
) -> SimResult:
    return Simulation(cfg, collect_trace=collect_trace, **inject).run()


@dataclass(frozen=True)
class SweepCell:
    param_name: str
    param_value: float
    strategy: str
    seed: int
    cfg: ScenarioConfig


def sweep_cells(
    base: ScenarioConfig,
    parameter: str,
    values: list[float],
    strategies: list[str],
    n_seeds: int,
) -> list[SweepCell]:
    """The full experiment grid; seeds repeat across values and
    strategies so comparisons are paired."""
    cells = []
    for cfg_value, value in zip(workload.sweep(base, parameter, values, "paired"), values):
        for strategy in strategies:
            for k in range(n_seeds):
                cfg = dataclasses.replace(
                    cfg_value, strategy=strategy, seed=base.seed + k
                )
                cells.append(SweepCell(parameter, value, strategy, base.seed + k, cfg))
    return cells


def _run_cell(cell: SweepCell) -> MetricsReport:
    report = Simulation(cell.cfg).run().report
    report.param_name = cell.param_name
    report.param_value = cell.param_value
    return report


def run_sweep(
    base: ScenarioConfig,
    parameter: str,
    values: list[float],
    strategies: list[str],
    n_seeds: int,
    jobs: int = 1,
) -> list[MetricsReport]:
    """Run the grid, optionally in parallel; output order and content are
    independent of the worker count."""
    cells = sweep_cells(base, parameter, values, strategies, n_seeds)
    if jobs > 1 and len(cells) > 1:
        with multiprocessing.Pool(min(jobs, len(cells))) as pool:
            return pool.map(_run_cell, cells)
    return [_run_cell(cell) for cell in cells]
