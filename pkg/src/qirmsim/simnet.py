"""Deterministic discrete-event engine and the access-link network model.

Only access links constrain traffic; routers are infinite-capacity. Data
transfers queue FIFO per link direction, control packets cost latency
plus a fixed packet size but never queue. All byte accounting flows
through the bandwidth ledger.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import _kernels as K

MB = 1_000_000  # bytes; content sizes and rates use decimal units
KB = 1_000  # bytes; control packets and throughput segments

UP = "up"
DOWN = "down"


@dataclass(frozen=True)
class LinkSpec:
    """A peer's asymmetric access link."""

    node: int
    up_capacity: float  # Mb/s
    down_capacity: float  # Mb/s
    base_delay_ms: float  # one-way latency contribution of this link

    def __post_init__(self):
        if self.up_capacity <= 0 or self.down_capacity <= 0:
            raise ValueError("link capacities must be strictly positive")
        if self.base_delay_ms < 0:
            raise ValueError("link delay must be non-negative")


def one_way_delay(src: LinkSpec, dst: LinkSpec) -> float:
    """End-to-end one-way delay in seconds; symmetric by construction."""
    return (src.base_delay_ms + dst.base_delay_ms) / 1000.0


def transfer_time(
    size_mb: float,
    src: LinkSpec,
    dst: LinkSpec,
    control_packet_kb: float = 1.0,
) -> float:
    """Unloaded transfer duration: propagation plus serialization over the
    slower of the sender uplink and receiver downlink.

    A zero size means a control packet of ``control_packet_kb``.
    """
    if size_mb < 0:
        raise ValueError("size must be non-negative")
    if size_mb == 0:
        size_mb = control_packet_kb * KB / MB
    bottleneck = min(src.up_capacity, dst.down_capacity)
    return one_way_delay(src, dst) + size_mb * 8.0 / bottleneck


@dataclass(frozen=True)
class Event:
    fire_at: float
    seq: int
    kind: str
    payload: tuple = ()


class Engine:
    """Event queue dispatching in (fire_at, seq) order.

    The sequence number makes simultaneous events fire in insertion
    order, so a run is a pure function of (scenario, seed).
    """

    def __init__(self, seed: int = 0):
        self.now = 0.0
        self.rng = np.random.default_rng(seed)
        self._heap: list[tuple[float, int, str, tuple]] = []
        self._seq = 0
        self.handler: Optional[Callable[[Engine, str, tuple], None]] = None

    def schedule(self, fire_at: float, kind: str, payload: tuple = ()) -> Event:
        if fire_at < self.now:
            raise ValueError(f"cannot schedule into the past ({fire_at} < {self.now})")
        ev = Event(fire_at, self._seq, kind, payload)
        heapq.heappush(self._heap, (fire_at, self._seq, kind, payload))
        self._seq += 1
        return ev

    def run_until(self, t_end: float) -> list[Event]:
        """Dispatch events through t_end; returns the ordered event log."""
        log: list[Event] = []
        heap = self._heap
        while heap and heap[0][0] <= t_end:
            fire_at, seq, kind, payload = heapq.heappop(heap)
            self.now = fire_at
            log.append(Event(fire_at, seq, kind, payload))
            if self.handler is not None:
                self.handler(self, kind, payload)
        self.now = t_end
        return log

    def pending(self) -> int:
        return len(self._heap)


class BandwidthLedger:
    """Per-node, per-direction byte accounting in reporting intervals.

    Utilization of a node over an interval is bits moved over capacity;
    values above 1 are reported clamped and logged as oversubscription
    warnings.
    """

    def __init__(self, interval: float, n_nodes: int):
        if interval <= 0:
            raise ValueError("reporting interval must be positive")
        self.interval = interval
        self.n_nodes = n_nodes
        self.sent: dict[int, list[float]] = {}
        self.received: dict[int, list[float]] = {}
        self.total_bytes = 0.0
        self.warnings: list[str] = []

    def charge(self, node: int, nbytes: float, direction: str, now: float) -> None:
        if nbytes < 0:
            raise ValueError("bytes must be non-negative")
        bucket = int(now / self.interval)
        book = self.sent if direction == UP else self.received
        row = book.get(bucket)
        if row is None:
            row = book[bucket] = [0.0] * self.n_nodes
        row[node] += nbytes
        self.total_bytes += nbytes

    def utilization(self, node: int, direction: str, capacity_mb_s: float) -> float:
        """Mean utilization of one link direction across used intervals,
        clamped to [0, 1]."""
        book = self.sent if direction == UP else self.received
        if not book:
            return 0.0
        total = sum(row[node] for row in book.values())
        if total == 0.0:
            return 0.0
        raw = total * 8.0 / (capacity_mb_s * MB * self.interval * len(book))
        if raw > 1.0:
            self.warnings.append(
                f"node {node} {direction}link oversubscribed: utilization {raw:.3f}"
            )
            return 1.0
        return raw

    def bytes_moved(self, node: int, direction: str) -> float:
        book = self.sent if direction == UP else self.received
        return sum(row[node] for row in book.values())


class TransferScheduler:
    """FIFO reservation of data transfers on access links.

    A transfer occupies the sender uplink and receiver downlink serially;
    concurrent transfers on a link queue rather than share capacity.
    """

    def __init__(self, links: list[LinkSpec]):
        self.links = links
        self.up_free = [0.0] * len(links)
        self.down_free = [0.0] * len(links)

    def reserve(
        self, src: int, dst: int, ready_at: float, size_mb: float,
        deadline: Optional[float] = None,
    ) -> Optional[tuple[float, float, float]]:
        """Book a transfer; returns (start, bottleneck_release, arrival).

        Each link direction is held for its own serialization time, so a
        slow receiver cannot head-of-line-block a fast sender. With a
        deadline, the transfer is only booked if it can arrive in time; a
        hopeless request returns None and leaves the links untouched (the
        requester abandons instead of queueing dead work).
        """
        ls, ld = self.links[src], self.links[dst]
        start, up_end, down_end, arrive = K.fifo_reserve(
            ready_at,
            self.up_free[src],
            self.down_free[dst],
            size_mb,
            ls.up_capacity,
            ld.down_capacity,
            one_way_delay(ls, ld),
        )
        if deadline is not None and arrive > deadline:
            return None
        self.up_free[src] = up_end
        self.down_free[dst] = down_end
        return start, max(up_end, down_end), arrive
