"""Access-pattern driven replica placement plus the baseline strategies.

Queries registered during the warm-up epoch classify contents: counts at
or above a_min are class1 and go to strong-cluster nodes, the rest are
class2 and get a single weak-cluster copy. Copy counts for class1 grow
with demand (ceil(n / a_min)), bounded by cluster size and free cache
slots. Hosts are picked in descending weight order, never the origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .model import (
    CLASS1,
    CLASS2,
    STRATEGY_ORIGIN_ONLY,
    STRATEGY_RANDOM_FLOOD,
    ContentItem,
    NodeSpec,
    PlacementMessage,
    Query,
)


class AccessCounter:
    """Per-keyword access counts n(Q) registered at the query server."""

    def __init__(self, known_keywords: Sequence[str]):
        self.counts: dict[str, int] = {}
        self._known = set(known_keywords)

    def get(self, ckwd: str) -> int:
        return self.counts.get(ckwd, 0)


def register_query(counter: AccessCounter, query: Query) -> AccessCounter:
    """Count one access for the query's keyword; unknown keywords are
    left to the search path to report as unserved."""
    if query.ckwd in counter._known:
        counter.counts[query.ckwd] = counter.counts.get(query.ckwd, 0) + 1
    return counter


def classify(
    counter: AccessCounter, a_min: int, catalog: Sequence[ContentItem]
) -> dict[int, str]:
    """Class of every catalog content: class1 iff its count reached a_min."""
    if a_min < 1:
        raise ValueError("a_min must be >= 1")
    return {
        c.id: CLASS1 if counter.get(c.ckwd) >= a_min else CLASS2 for c in catalog
    }


@dataclass
class PlacementPlan:
    """Replica hosts per content, computed at one epoch."""

    assignments: dict[int, list[int]] = field(default_factory=dict)
    epoch: float = 0.0
    warnings: list[str] = field(default_factory=list)

    def replica_count(self) -> int:
        return sum(len(hosts) for hosts in self.assignments.values())


def build_plan(
    classes: dict[int, str],
    strong: set[int],
    weak: set[int],
    nodes: Sequence[NodeSpec],
    counter: AccessCounter,
    catalog: Sequence[ContentItem],
    a_min: int,
    epoch: float,
) -> PlacementPlan:
    """Assign replica hosts for every content.

    Contents are processed hottest first so demand wins cache slots;
    within a content, hosts are the heaviest eligible nodes with free
    slots. class1 goes only to strong nodes, class2 only to weak ones.
    """
    plan = PlacementPlan(epoch=epoch)
    strong_ranked = _ranked(strong, nodes)
    weak_ranked = _ranked(weak, nodes)
    free = {n.id: n.cache.free_slots() for n in nodes}

    order = sorted(catalog, key=lambda c: (-counter.get(c.ckwd), c.id))
    assignments: dict[int, list[int]] = {}
    # first copies for everyone before demand-scaled extras, so a few hot
    # contents cannot exhaust the cluster's slots and strand the tail
    for content in order:
        cls = classes[content.id]
        ranked = strong_ranked if cls == CLASS1 else weak_ranked
        if cls == CLASS1 and not strong_ranked:
            plan.warnings.append(
                f"content {content.id} is class1 but the strong cluster is "
                "empty; queries will fall back to its origin"
            )
            assignments[content.id] = []
            continue
        assignments[content.id] = _take_hosts(ranked, content.origin, free, 1, [])
    for content in order:
        if classes[content.id] != CLASS1:
            continue
        hosts = assignments[content.id]
        copies = max(1, math.ceil(counter.get(content.ckwd) / a_min))
        if copies > len(hosts):
            hosts.extend(
                _take_hosts(strong_ranked, content.origin, free, copies - len(hosts), hosts)
            )
        if not hosts:
            plan.warnings.append(
                f"content {content.id} is class1 but no strong node has free "
                "cache slots; queries will fall back to its origin"
            )
    plan.assignments = {c.id: assignments[c.id] for c in order}
    return plan


def _take_hosts(
    ranked: list[int],
    origin: int,
    free: dict[int, int],
    wanted: int,
    taken: list[int],
) -> list[int]:
    picked: list[int] = []
    for nid in ranked:
        if len(picked) >= wanted:
            break
        if nid == origin or free[nid] <= 0 or nid in taken:
            continue
        picked.append(nid)
        free[nid] -= 1
    return picked


def apply_plan(plan: PlacementPlan, sim) -> list[tuple[int, int]]:
    """Schedule the replica pushes of a plan on a simulation.

    Each copy is a data transfer origin -> host on the access links; the
    host stores the copy (and the directory records it) when the transfer
    completes. A content's pushes run serially from its origin, so the
    host pushed last holds the freshest copy and wins ack selection among
    the hosts clients contact (the fanout lowest ids). That anchor slot
    rotates across those hosts, spreading hot keywords over distinct
    servers instead of funneling them all to one node.
    """
    pushes: list[tuple[int, int]] = []
    anchored: dict[int, int] = {}
    fanout = sim.cfg.fanout
    for cid, hosts in plan.assignments.items():
        if not hosts:
            continue
        contacted = sorted(hosts)[: min(fanout, len(hosts))]
        best_bw = max(sim.nodes[h].bw for h in contacted)
        capable = [h for h in contacted if sim.nodes[h].bw >= 0.5 * best_bw]
        anchor = min(capable, key=lambda h: (anchored.get(h, 0), h))
        anchored[anchor] = anchored.get(anchor, 0) + 1
        others = [h for h in hosts if h != anchor]
        sim.schedule_replica_pushes(cid, others, anchor)
        pushes.extend((cid, h) for h in others + [anchor])
    return pushes


def broadcast_placement(
    plan: PlacementPlan, nodes: Sequence[NodeSpec]
) -> list[PlacementMessage]:
    """One {Nid, Clid, c1, c2...} message per assigned node."""
    per_node: dict[int, list[int]] = {}
    for cid, hosts in plan.assignments.items():
        for host in hosts:
            per_node.setdefault(host, []).append(cid)
    return [
        PlacementMessage(nid, nodes[nid].cluster, tuple(per_node[nid]))
        for nid in sorted(per_node)
    ]


def baseline_place(
    strategy: str,
    catalog: Sequence[ContentItem],
    nodes: Sequence[NodeSpec],
    rng: np.random.Generator,
    epoch: float = 0.0,
) -> PlacementPlan:
    """Placement for the comparison strategies.

    random_flood puts each content on one uniformly random node with a
    free slot; origin_only places nothing.
    """
    if strategy not in (STRATEGY_RANDOM_FLOOD, STRATEGY_ORIGIN_ONLY):
        raise ValueError(f"unknown baseline strategy {strategy!r}")
    plan = PlacementPlan(epoch=epoch)
    if strategy == STRATEGY_ORIGIN_ONLY:
        return plan
    free = {n.id: n.cache.free_slots() for n in nodes}
    for content in catalog:
        eligible = [n.id for n in nodes if free[n.id] > 0]
        if not eligible:
            plan.warnings.append(f"no free slot anywhere for content {content.id}")
            plan.assignments[content.id] = []
            continue
        host = eligible[int(rng.integers(len(eligible)))]
        free[host] -= 1
        plan.assignments[content.id] = [host]
    return plan


def _ranked(ids: set[int], nodes: Sequence[NodeSpec]) -> list[int]:
    return sorted(ids, key=lambda nid: (-nodes[nid].weight, nid))
