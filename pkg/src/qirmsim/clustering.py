"""Node weighting and the strong/weak cluster partition.

The weight of a node is (bw + sp + mz) / al. The raw formula mixes units;
normalize mode divides each parameter by its population maximum first so
the threshold beta is scale-free. Nodes with weight >= beta form the
strong cluster.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

from . import _kernels as K
from .model import STRONG, WEAK, NodeSpec


def node_weight(
    bw: float,
    sp: float,
    mz: float,
    al: float,
    normalize: bool = False,
    maxima: Optional[tuple[float, float, float, float]] = None,
) -> float:
    """Weight of a node from its four QoS parameters.

    In normalize mode ``maxima`` supplies the per-parameter population
    maxima (bw, sp, mz, al).
    """
    if bw <= 0 or sp <= 0 or mz <= 0 or al <= 0:
        raise ValueError("all node parameters must be strictly positive")
    if not normalize:
        return K.raw_weight(bw, sp, mz, al)
    if maxima is None:
        raise ValueError("normalize mode requires per-parameter maxima")
    bw_m, sp_m, mz_m, al_m = maxima
    if bw_m <= 0 or sp_m <= 0 or mz_m <= 0 or al_m <= 0:
        raise ValueError("maxima must be strictly positive")
    return K.raw_weight(bw / bw_m, sp / sp_m, mz / mz_m, al / al_m)


def assign_weights(nodes: Sequence[NodeSpec], normalize: bool = False) -> None:
    """Compute and store the weight of every node in the population."""
    if not nodes:
        raise ValueError("node population must be non-empty")
    weights = K.weights_batch(
        [n.bw for n in nodes],
        [n.sp for n in nodes],
        [n.mz for n in nodes],
        [n.al for n in nodes],
        normalize,
    )
    for node, w in zip(nodes, weights):
        node.weight = w


def weight_vector(nodes: Sequence[NodeSpec]) -> list[tuple[int, float]]:
    """(node id, weight) pairs sorted by descending weight, ties by
    ascending id."""
    if not nodes:
        raise ValueError("node population must be non-empty")
    pairs = [(n.id, n.weight) for n in nodes]
    pairs.sort(key=lambda p: (-p[1], p[0]))
    return pairs


def partition(
    vector: Iterable[tuple[int, float]], beta: float
) -> tuple[set[int], set[int]]:
    """Split a weight vector into (strong, weak) id sets; weight == beta
    is strong."""
    if beta <= 0:
        raise ValueError("beta must be strictly positive")
    strong: set[int] = set()
    weak: set[int] = set()
    for nid, w in vector:
        (strong if w >= beta else weak).add(nid)
    return strong, weak


def tag_clusters(nodes: Sequence[NodeSpec], strong: set[int]) -> None:
    for node in nodes:
        node.cluster = STRONG if node.id in strong else WEAK
