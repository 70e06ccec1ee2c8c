"""Pure-Python reference implementation of the hot inner-loop kernels.

The compiled backend in _speedups.pyx mirrors these functions exactly,
including arithmetic order, so simulation results are bit-identical
whichever backend is selected.
"""

from __future__ import annotations

BACKEND = "pure"


def raw_weight(bw: float, sp: float, mz: float, al: float) -> float:
    """Node weight (bw + sp + mz) / al."""
    return (bw + sp + mz) / al


def weights_batch(bw, sp, mz, al, normalize: bool) -> list[float]:
    """Weights for a node population; optionally scale each parameter by
    its population maximum first."""
    n = len(bw)
    if not normalize:
        return [(bw[i] + sp[i] + mz[i]) / al[i] for i in range(n)]
    bw_m = max(bw)
    sp_m = max(sp)
    mz_m = max(mz)
    al_m = max(al)
    return [
        (bw[i] / bw_m + sp[i] / sp_m + mz[i] / mz_m) / (al[i] / al_m)
        for i in range(n)
    ]


def score_sum(nors, alpha: float) -> float:
    """Sum of nor**alpha over positive result counts (0**0 counts as 0)."""
    total = 0.0
    if alpha == 1.0:
        for v in nors:
            if v > 0:
                total += v
    elif alpha == 0.0:
        for v in nors:
            if v > 0:
                total += 1.0
    else:
        for v in nors:
            if v > 0:
                total += v**alpha
    return total


def best_ack_index(ts, ws, ids) -> int:
    """Index of the ack maximizing (timestamp, weight, -node id)."""
    best = 0
    b_ts = ts[0]
    b_w = ws[0]
    b_id = ids[0]
    for i in range(1, len(ts)):
        t = ts[i]
        if t < b_ts:
            continue
        if t > b_ts:
            best, b_ts, b_w, b_id = i, t, ws[i], ids[i]
            continue
        w = ws[i]
        if w < b_w:
            continue
        if w > b_w or ids[i] < b_id:
            best, b_ts, b_w, b_id = i, t, w, ids[i]
    return best


def top_k_by_score(ids, scores, k: int) -> list[int]:
    """The k ids with the highest scores; ties broken by ascending id."""
    order = sorted(range(len(ids)), key=lambda i: (-scores[i], ids[i]))
    return [ids[i] for i in order[:k]]


def fifo_reserve(ready, free_up, free_down, size_mb, up_cap, down_cap, prop_s):
    """Serial-transfer reservation over a sender uplink / receiver downlink
    pair: each direction is busy for its own serialization time, while the
    payload arrives after the bottleneck of the two.

    Returns (start, up_release, down_release, arrival).
    """
    start = ready
    if free_up > start:
        start = free_up
    if free_down > start:
        start = free_down
    up_end = start + size_mb * 8.0 / up_cap
    down_end = start + size_mb * 8.0 / down_cap
    slower = up_end if up_end > down_end else down_end
    return start, up_end, down_end, slower + prop_s
