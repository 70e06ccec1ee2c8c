"""Node population, content catalog and timed query stream generation,
plus the experiment sweep builder. Everything is a pure function of
(config, rng state).
"""

from __future__ import annotations

import dataclasses

import numpy as np

from . import clustering
from .model import ContentItem, NodeSpec, Query, ReplicaCache, ScenarioConfig
from .simnet import LinkSpec

SWEEP_PARAMS = ("load", "rate")


def catalog_size(config: ScenarioConfig) -> int:
    return config.catalog_size if config.catalog_size else config.n_nodes


def generate_nodes(
    config: ScenarioConfig, rng: np.random.Generator
) -> tuple[list[NodeSpec], list[LinkSpec], list[ContentItem]]:
    """Draw the node population, its access links and the catalog.

    Uplink bandwidth, CPU speed, memory and access latency are uniform in
    the configured ranges; the downlink is the uplink scaled by
    down_up_ratio. Node i (i < catalog size) originates content i, whose
    size is uniform in content_size_range. Weights and the strong/weak
    partition are assigned at generation time.
    """
    n = config.n_nodes
    if n < 2:
        raise ValueError("need at least 2 nodes")
    for name in ("bw_range", "sp_range", "mz_range", "al_range", "content_size_range"):
        lo, hi = getattr(config, name)
        if lo <= 0 or hi < lo:
            raise ValueError(f"invalid {name}: ({lo}, {hi})")
    n_contents = catalog_size(config)

    # ids run in descending uplink order: deterministic tie-breaks (sorting,
    # ack selection, target choice) then prefer capable peers
    bw = -np.sort(-rng.uniform(*config.bw_range, n))
    sp = rng.uniform(*config.sp_range, n)
    mz = rng.uniform(*config.mz_range, n)
    al = rng.uniform(*config.al_range, n)
    sizes = rng.uniform(*config.content_size_range, n_contents)
    # which node originates which content is independent of capability
    origins = rng.permutation(n)[:n_contents]

    owned = {int(origins[c]): c for c in range(n_contents)}
    nodes = [
        NodeSpec(
            id=i,
            bw=float(bw[i]),
            sp=float(sp[i]),
            mz=float(mz[i]),
            al=float(al[i]),
            cache=ReplicaCache(config.k_cache_slots),
            owned_content=owned.get(i),
        )
        for i in range(n)
    ]
    links = [
        LinkSpec(i, float(bw[i]), float(bw[i]) * config.down_up_ratio, float(al[i]))
        for i in range(n)
    ]
    catalog = [
        ContentItem(id=c, ckwd=f"kw{c}", size=float(sizes[c]), origin=int(origins[c]))
        for c in range(n_contents)
    ]

    clustering.assign_weights(nodes, config.normalize_weights)
    strong, _weak = clustering.partition(clustering.weight_vector(nodes), config.beta)
    clustering.tag_clusters(nodes, strong)
    return nodes, links, catalog


def zipf_probabilities(n: int, s: float) -> np.ndarray:
    """Rank popularity p(r) proportional to 1/r**s, ranks 1..n."""
    ranks = np.arange(1, n + 1, dtype=float)
    p = ranks**-s
    return p / p.sum()


def generate_queries(config: ScenarioConfig, rng: np.random.Generator) -> list[Query]:
    """Poisson query arrivals over the run; requesters uniform over
    nodes, keywords Zipf over the catalog; sorted by issue time."""
    if config.query_rate <= 0 or config.duration <= 0:
        raise ValueError("query_rate and duration must be positive")
    n_queries = int(rng.poisson(config.query_rate * config.duration))
    times = np.sort(rng.uniform(0.0, config.duration, n_queries))
    requesters = rng.integers(0, config.n_nodes, n_queries)
    n_contents = catalog_size(config)
    contents = rng.choice(
        n_contents, n_queries, p=zipf_probabilities(n_contents, config.zipf_s)
    )
    return [
        Query(
            qid=i,
            nid=int(requesters[i]),
            ckwd=f"kw{int(contents[i])}",
            issued_at=float(times[i]),
        )
        for i in range(n_queries)
    ]


def rate_to_query_rate(rate_mb_s: float, config: ScenarioConfig) -> float:
    """Offered per-node query traffic (Mb/s) to whole-overlay queries/s.

    Each node requesting ``rate`` of content of the mean catalog size
    issues rate/size queries per second, times n_nodes overall.
    """
    lo, hi = config.content_size_range
    mean_size = (lo + hi) / 2.0
    return config.n_nodes * rate_mb_s / mean_size


def sweep(
    base: ScenarioConfig,
    parameter: str,
    values: list[float],
    seed_mode: str = "offset",
) -> list[ScenarioConfig]:
    """One config per sweep value, differing from base only in the swept
    field; seeds offset by index, or repeated for paired comparison."""
    if parameter not in SWEEP_PARAMS:
        raise ValueError(f"unknown sweep parameter {parameter!r}; use load or rate")
    if not values:
        raise ValueError("sweep needs at least one value")
    if seed_mode not in ("offset", "paired"):
        raise ValueError("seed_mode must be 'offset' or 'paired'")
    configs = []
    for i, value in enumerate(values):
        seed = base.seed + i if seed_mode == "offset" else base.seed
        if parameter == "load":
            cfg = dataclasses.replace(
                base, content_size_range=(value, value), seed=seed
            )
        else:
            cfg = dataclasses.replace(
                base, query_rate=rate_to_query_rate(value, base), seed=seed
            )
        configs.append(cfg)
    return configs
