"""Domain types shared by every module: nodes, contents, queries, profiles,
scenario configuration and the metrics report.

No protocol logic lives here.
"""

from __future__ import annotations

import dataclasses
from collections import OrderedDict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

# Cluster tags
STRONG = "S"
WEAK = "W"

# Content classes
CLASS1 = "class1"
CLASS2 = "class2"
UNCLASSIFIED = "unclassified"

# Query resolutions
RES_LOCAL = "local_hit"
RES_STRONG = "strong_hit"
RES_FALLBACK = "server_fallback"
RES_UNSERVED = "unserved"
RESOLUTIONS = (RES_LOCAL, RES_STRONG, RES_FALLBACK, RES_UNSERVED)

# Strategies
STRATEGY_QIRM = "qirm"
STRATEGY_RANDOM_FLOOD = "random_flood"
STRATEGY_ORIGIN_ONLY = "origin_only"
STRATEGIES = (STRATEGY_QIRM, STRATEGY_RANDOM_FLOOD, STRATEGY_ORIGIN_ONLY)


class ReplicaCache:
    """LRU cache of replicated content ids, capacity k slots.

    Each slot remembers when its copy was stored; the stored timestamp is
    what a node advertises when it acknowledges a query.
    """

    __slots__ = ("k", "_slots")

    def __init__(self, k: int):
        if k < 1:
            raise ValueError("cache capacity must be >= 1")
        self.k = k
        self._slots: OrderedDict[int, float] = OrderedDict()

    def __len__(self) -> int:
        return len(self._slots)

    def __contains__(self, content_id: int) -> bool:
        return content_id in self._slots

    def contents(self) -> list[int]:
        return list(self._slots)

    def stored_at(self, content_id: int) -> float:
        return self._slots[content_id]

    def free_slots(self) -> int:
        return self.k - len(self._slots)

    def touch(self, content_id: int) -> None:
        self._slots.move_to_end(content_id)

    def insert(self, content_id: int, now: float) -> Optional[int]:
        """Store a copy, evicting the least recently used slot if full.

        Returns the evicted content id, if any. Re-inserting an already
        cached id refreshes its timestamp and recency.
        """
        evicted = None
        if content_id in self._slots:
            self._slots.move_to_end(content_id)
        elif len(self._slots) >= self.k:
            evicted, _ = self._slots.popitem(last=False)
        self._slots[content_id] = now
        return evicted


@dataclass
class NodeSpec:
    """A peer's QoS parameters, derived weight and replica storage."""

    id: int
    bw: float  # available (upload) bandwidth, Mb/s
    sp: float  # CPU speed, normalized units
    mz: float  # memory size, MB
    al: float  # access latency, ms
    weight: float = 0.0
    cluster: str = WEAK
    cache: ReplicaCache = None  # type: ignore[assignment]
    owned_content: Optional[int] = None

    def __post_init__(self):
        for name in ("bw", "sp", "mz", "al"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.cache is None:
            self.cache = ReplicaCache(10)

    def holds(self, content_id: int) -> bool:
        return content_id == self.owned_content or content_id in self.cache


@dataclass
class ContentItem:
    """A catalog object served by its origin node."""

    id: int
    ckwd: str
    size: float  # MB
    origin: int
    cls: str = UNCLASSIFIED


@dataclass
class Query:
    """A client request for a keyword, with its lifecycle record."""

    qid: int
    nid: int
    ckwd: str
    issued_at: float
    resolution: Optional[str] = None
    completed_at: Optional[float] = None
    served_by: Optional[int] = None


@dataclass(frozen=True)
class ProfileEntry:
    """One neighbor-history row observed by a requesting node."""

    ni: int
    qid: int
    qhit: int
    nor: int
    recorded_at: float


@dataclass(frozen=True)
class Ack:
    """A responder's claim that it holds the requested item."""

    responder: int
    ts: float  # timestamp of the responder's copy
    w: float  # responder's weight


@dataclass(frozen=True)
class PlacementMessage:
    """Replication/promotion announcement {Nid, Clid, c1, c2, ...}."""

    nid: int
    clid: str
    content_ids: tuple[int, ...]


@dataclass
class ScenarioConfig:
    """All protocol constants plus workload and topology parameters.

    ``catalog_size`` 0 means "one content per node". Rate-sweep values in
    Mb/s are translated to ``query_rate`` by the workload module.
    """

    n_nodes: int = 50
    k_cache_slots: int = 10
    beta: float = 3.6
    a_min: int = 5
    alpha: float = 1.0
    t_window: float = 60.0
    fanout: int = 3
    normalize_weights: bool = True
    catalog_size: int = 0
    zipf_s: float = 0.8
    query_rate: float = 15.0  # queries/s, whole overlay
    content_size_range: tuple[float, float] = (2.0, 5.0)  # MB
    duration: float = 667.0  # s
    seed: int = 1
    strategy: str = STRATEGY_QIRM
    # topology / link model
    bw_range: tuple[float, float] = (1.0, 100.0)  # uplink Mb/s
    down_up_ratio: float = 2.0
    sp_range: tuple[float, float] = (1.0, 10.0)
    mz_range: tuple[float, float] = (64.0, 1024.0)  # MB
    al_range: tuple[float, float] = (2.0, 10.0)  # ms
    control_packet_kb: float = 1.0
    # run shape
    warmup_frac: float = 0.1
    patience_s_per_mb: float = 0.8  # client abandon window, scaled by content size
    report_interval: float = 0.0  # s per bandwidth bucket; 0 = whole run


@dataclass
class MetricsReport:
    """The four per-run metrics plus resolution counts."""

    avg_delay_s: Optional[float]
    throughput_Bps: float
    throughput_pps: float
    query_efficiency: float
    bw_utilization: float
    local_hits: int
    strong_hits: int
    fallbacks: int
    unserved: int
    # run identity, filled by the experiment runner
    strategy: str = ""
    param_name: str = ""
    param_value: float = 0.0
    seed: int = 0

    @property
    def total_queries(self) -> int:
        return self.local_hits + self.strong_hits + self.fallbacks + self.unserved


def validate(config: ScenarioConfig) -> list[str]:
    """Return one human-readable violation per broken config invariant."""
    v: list[str] = []
    if config.beta <= 0:
        v.append("beta > 0 violated")
    if config.a_min < 1:
        v.append("a_min ≥ 1 violated")
    if config.alpha < 0:
        v.append("alpha ≥ 0 violated")
    if config.fanout < 1:
        v.append("fanout ≥ 1 violated")
    if config.duration <= 0:
        v.append("duration > 0 violated")
    if config.n_nodes < 2:
        v.append("n_nodes ≥ 2 violated")
    if config.k_cache_slots < 1:
        v.append("k_cache_slots ≥ 1 violated")
    if config.catalog_size < 0 or config.catalog_size > config.n_nodes:
        v.append("catalog_size must be 0 (one per node) or in 1..n_nodes")
    if config.zipf_s < 0:
        v.append("zipf_s ≥ 0 violated")
    if config.query_rate <= 0:
        v.append("query_rate > 0 violated")
    if config.t_window <= 0:
        v.append("t_window > 0 violated")
    if not 0 <= config.warmup_frac < 1:
        v.append("warmup_frac must lie in [0, 1)")
    if config.patience_s_per_mb <= 0:
        v.append("patience_s_per_mb > 0 violated")
    if config.control_packet_kb < 0:
        v.append("control_packet_kb ≥ 0 violated")
    if config.down_up_ratio <= 0:
        v.append("down_up_ratio > 0 violated")
    if config.report_interval < 0:
        v.append("report_interval ≥ 0 violated")
    if config.strategy not in STRATEGIES:
        v.append(f"strategy must be one of {', '.join(STRATEGIES)}")
    for name in ("content_size_range", "bw_range", "sp_range", "mz_range", "al_range"):
        lo, hi = getattr(config, name)
        if lo <= 0 or hi < lo:
            v.append(f"{name} must satisfy 0 < lo ≤ hi")
    return v


_TUPLE_FIELDS = {"content_size_range", "bw_range", "sp_range", "mz_range", "al_range"}


def write_config(config: ScenarioConfig, path: str | Path) -> None:
    """Serialize a config to the flat key/value scenario file format."""
    lines = ["# scenario configuration (key = value per line)"]
    for f in dataclasses.fields(config):
        value = getattr(config, f.name)
        if f.name in _TUPLE_FIELDS:
            text = f"{value[0]!r},{value[1]!r}"
        elif isinstance(value, bool):
            text = "true" if value else "false"
        elif isinstance(value, float):
            text = repr(value)
        else:
            text = str(value)
        lines.append(f"{f.name} = {text}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_config(path: str | Path) -> ScenarioConfig:
    """Parse a scenario file; keys omitted from the file keep their defaults."""
    values: dict[str, object] = {}
    fields = {f.name: f for f in dataclasses.fields(ScenarioConfig)}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, text = line.partition("=")
        key, text = key.strip(), text.strip()
        if key not in fields:
            raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
        values[key] = _parse_field(key, text)
    return ScenarioConfig(**values)  # type: ignore[arg-type]


def _parse_field(key: str, text: str):
    if key in _TUPLE_FIELDS:
        parts = text.split(",")
        if len(parts) != 2:
            raise ValueError(f"{key} expects 'lo,hi', got {text!r}")
        return (float(parts[0]), float(parts[1]))
    if key == "normalize_weights":
        if text.lower() not in ("true", "false"):
            raise ValueError(f"{key} expects true/false, got {text!r}")
        return text.lower() == "true"
    if key == "strategy":
        return text
    if key in ("n_nodes", "k_cache_slots", "a_min", "fanout", "catalog_size", "seed"):
        return int(text)
    return float(text)
