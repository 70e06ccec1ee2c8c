"""Query resolution: profile-scored target selection, request/ack/confirm
exchange with the strong cluster, origin fallback, and the caching plus
promotion path that grows the strong cluster.

A requester keeps a profile of how its recent queries fared per contacted
neighbor and routes the next query for a keyword to the top scorers; with
no usable history it broadcasts to the whole strong cluster. The best
acking holder is the one with the freshest copy, then the highest weight.
"""

from __future__ import annotations

import bisect
from collections import OrderedDict
from typing import Optional, Sequence

from . import _kernels as K
from .model import (
    RES_FALLBACK,
    RES_LOCAL,
    RES_STRONG,
    RES_UNSERVED,
    STRONG,
    Ack,
    NodeSpec,
    PlacementMessage,
    ProfileEntry,
    Query,
)

# event kinds used by the simulation loop
EV_QUERY = "QUERY"
EV_DECISION = "DECISION"
EV_COMPLETE = "COMPLETE"


class Profile:
    """A node's rolling window of per-neighbor query outcomes.

    Entries are unique per (neighbor, query) with the latest write
    winning, and anything older than the horizon is pruned.
    """

    def __init__(self, owner: int, t_window: float):
        self.owner = owner
        self.t_window = t_window
        self._entries: OrderedDict[tuple[int, int], tuple[ProfileEntry, str]] = OrderedDict()
        self._by_kw: dict[str, dict[int, list[ProfileEntry]]] = {}

    @property
    def entries(self) -> list[ProfileEntry]:
        return [entry for entry, _kw in self._entries.values()]

    def __len__(self) -> int:
        return len(self._entries)

    def add(self, entry: ProfileEntry, ckwd: str) -> None:
        key = (entry.ni, entry.qid)
        old = self._entries.pop(key, None)
        if old is not None:
            self._remove_indexed(*old)
        self._entries[key] = (entry, ckwd)
        self._by_kw.setdefault(ckwd, {}).setdefault(entry.ni, []).append(entry)

    def neighbors_for(self, ckwd: str) -> dict[int, list[ProfileEntry]]:
        return self._by_kw.get(ckwd, {})

    def prune(self, now: float, t_window: Optional[float] = None) -> None:
        """Drop entries older than the horizon (age exactly t_window is
        kept); insertion order of survivors is preserved."""
        window = self.t_window if t_window is None else t_window
        cutoff = now - window
        entries = self._entries
        while entries:
            key = next(iter(entries))
            entry, ckwd = entries[key]
            if entry.recorded_at >= cutoff:
                break
            del entries[key]
            self._remove_indexed(entry, ckwd)

    def _remove_indexed(self, entry: ProfileEntry, ckwd: str) -> None:
        per_node = self._by_kw[ckwd]
        rows = per_node[entry.ni]
        rows.remove(entry)
        if not rows:
            del per_node[entry.ni]


def score(profile: Profile, neighbor: int, ckwd: str, alpha: float) -> float:
    """Sum of nor**alpha over the neighbor's matching hits in the profile
    window; a zero-result hit contributes nothing at any alpha."""
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    rows = profile.neighbors_for(ckwd).get(neighbor)
    if not rows:
        return 0.0
    return K.score_sum([e.nor for e in rows if e.qhit > 0], alpha)


def select_targets(
    scores: dict[int, float], strong_ids: Sequence[int], fanout: int
) -> list[int]:
    """Targets for the strong-cluster phase.

    With any positive score the top-fanout strong nodes are contacted
    (ties by ascending id); with no history at all the whole strong
    cluster is, so a cold start can still find replicas.
    """
    if fanout < 1:
        raise ValueError("fanout must be >= 1")
    if not strong_ids:
        return []
    if not any(scores.get(nid, 0.0) > 0.0 for nid in strong_ids):
        return list(strong_ids)
    ids = list(strong_ids)
    return K.top_k_by_score(ids, [scores.get(nid, 0.0) for nid in ids], fanout)


def handle_request(node: NodeSpec, content_id: int) -> Optional[Ack]:
    """Ack a request if this node holds the content; the origin copy
    carries timestamp 0, a replica the time it was stored."""
    if content_id == node.owned_content:
        return Ack(node.id, 0.0, node.weight)
    if content_id in node.cache:
        return Ack(node.id, node.cache.stored_at(content_id), node.weight)
    return None


def select_best(acks: Sequence[Ack]) -> int:
    """The responder with the lexicographically largest (ts, w, -id):
    freshest copy, then heaviest node, then lowest id."""
    if not acks:
        raise ValueError("select_best requires at least one ack")
    i = K.best_ack_index(
        [a.ts for a in acks], [a.w for a in acks], [a.responder for a in acks]
    )
    return acks[i].responder


def resolve(sim, query: Query) -> None:
    """Start resolving a query: local lookup, else the strong-cluster
    request round, else origin fallback. Later phases run as events."""
    now = sim.engine.now
    cid = sim.kw2cid.get(query.ckwd)
    if cid is None:
        query.resolution = RES_UNSERVED
        sim.trace(now, EV_QUERY, query.nid, None, None, query.qid, "unknown", None)
        return
    sim.trace(now, EV_QUERY, query.nid, None, cid, query.qid, "", None)
    client = sim.nodes[query.nid]
    if client.holds(cid):
        if cid in client.cache:
            client.cache.touch(cid)
        query.resolution = RES_LOCAL
        query.completed_at = now
        query.served_by = client.id
        return

    profile = sim.profiles[client.id]
    profile.prune(now)
    candidates = [nid for nid in sim.strong_ids if nid != client.id]
    scores: dict[int, float] = {}
    alpha = sim.cfg.alpha
    for ni, rows in profile.neighbors_for(query.ckwd).items():
        if ni not in sim.strong_set or ni == client.id:
            continue
        s = K.score_sum([e.nor for e in rows if e.qhit > 0], alpha)
        if s > 0.0:
            scores[ni] = s
    targets = select_targets(scores, candidates, sim.cfg.fanout)
    if not targets:
        start_fallback(sim, query, cid)
        return

    acks = []
    worst_rtt = 0.0
    for t in targets:
        rtt = sim.control_rtt(client.id, t)
        if rtt > worst_rtt:
            worst_rtt = rtt
        sim.charge_control(client.id, t, now)
        ack = handle_request(sim.nodes[t], cid)
        if ack is not None:
            sim.charge_control(t, client.id, now)
            acks.append(ack)
            sim.trace(now + rtt, "ACK", t, client.id, cid, query.qid, "", ack.ts)
    sim.schedule(
        now + worst_rtt, EV_DECISION, (query.qid, cid, tuple(targets), tuple(acks))
    )


def decide(sim, query: Query, cid: int, targets: tuple, acks: tuple) -> None:
    """Ack-collection deadline reached: record the outcome per contacted
    target, then confirm the best holder or fall back to the origin."""
    now = sim.engine.now
    if sim.record_profiles:
        profile = sim.profiles[query.nid]
        acked = {a.responder for a in acks}
        for t in targets:
            hit = 1 if t in acked else 0
            profile.add(ProfileEntry(t, query.qid, hit, hit, now), query.ckwd)
    if not acks:
        start_fallback(sim, query, cid)
        return
    best = select_best(acks)
    sim.charge_control(query.nid, best, now)
    confirm_at = now + sim.control_one_way(query.nid, best)
    size = sim.catalog[cid].size
    booking = sim.transfers.reserve(
        best, query.nid, confirm_at, size, deadline=sim.deadline(query, size)
    )
    if booking is None:
        # a copy that cannot arrive within the client's patience is not
        # available from the strong cluster: direct the request to the
        # origin server instead
        if sim.promotion_enabled and best != sim.catalog[cid].origin:
            start_fallback(sim, query, cid)
        else:
            query.resolution = RES_UNSERVED
            sim.trace(now, "DATA", best, query.nid, cid, query.qid, "abandon", None)
        return
    sim.trace(confirm_at, "CONFIRM", query.nid, best, cid, query.qid, "", None)
    origin = sim.catalog[cid].origin
    kind = RES_FALLBACK if best == origin else RES_STRONG
    sim.schedule(booking[2], EV_COMPLETE, (query.qid, cid, best, kind))


def start_fallback(sim, query: Query, cid: int) -> None:
    """Direct the request to the content's origin server."""
    now = sim.engine.now
    origin = sim.catalog[cid].origin
    sim.charge_control(query.nid, origin, now)
    ready = now + sim.control_one_way(query.nid, origin)
    sim.trace(now, "FALLBACK", query.nid, origin, cid, query.qid, "", None)
    size = sim.catalog[cid].size
    booking = sim.transfers.reserve(
        origin, query.nid, ready, size, deadline=sim.deadline(query, size)
    )
    if booking is None:
        query.resolution = RES_UNSERVED
        sim.trace(now, "DATA", origin, query.nid, cid, query.qid, "abandon", None)
        return
    sim.schedule(booking[2], EV_COMPLETE, (query.qid, cid, origin, RES_FALLBACK))


def complete(sim, query: Query, cid: int, server: int, kind: str) -> None:
    """Data arrived: charge the transfer, record the outcome, and run the
    caching/promotion path after a fallback delivery."""
    now = sim.engine.now
    nbytes = sim.catalog[cid].size * 1_000_000
    sim.ledger.charge(server, nbytes, "up", now)
    sim.ledger.charge(query.nid, nbytes, "down", now)
    if now > sim.deadline(query, sim.catalog[cid].size):  # bookings respect the deadline
        query.resolution = RES_UNSERVED
        sim.trace(now, "DATA", server, query.nid, cid, query.qid, "late", sim.catalog[cid].size)
        return
    query.resolution = kind
    query.completed_at = now
    query.served_by = server
    sim.payload_useful_bytes += nbytes
    server_node = sim.nodes[server]
    if cid in server_node.cache:
        server_node.cache.touch(cid)
    sim.trace(now, "DATA", server, query.nid, cid, query.qid, "ok", sim.catalog[cid].size)
    if kind == RES_FALLBACK and sim.promotion_enabled:
        maybe_cache_and_promote(sim, sim.nodes[query.nid], cid, now)


def maybe_cache_and_promote(
    sim, client: NodeSpec, cid: int, now: float
) -> list[PlacementMessage]:
    """After a fallback delivery, a client with more memory and bandwidth
    than the weakest strong node caches the copy, becomes strong, and
    announces {Nid, "S", [content]}. An empty strong cluster admits any
    client."""
    strong = sim.strong_ids
    if strong:
        nodes = sim.nodes
        min_mz = min(nodes[i].mz for i in strong)
        min_bw = min(nodes[i].bw for i in strong)
    else:
        min_mz = min_bw = 0.0
    if client.mz <= min_mz or client.bw <= min_bw:
        return []
    client.cache.insert(cid, now)
    sim.directory.setdefault(cid, []).append((client.id, client.weight, now))
    if client.cluster != STRONG:
        client.cluster = STRONG
        bisect.insort(sim.strong_ids, client.id)
        sim.strong_set.add(client.id)
        sim.trace(now, "PROMOTE", client.id, None, cid, None, STRONG, client.weight)
    sim.broadcast_control(client.id, now)
    return [PlacementMessage(client.id, STRONG, (cid,))]


def profile_prune(profile: Profile, now: float, t_window: float) -> Profile:
    """Drop entries older than t_window; order of survivors preserved."""
    profile.prune(now, t_window)
    return profile
