# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementation of the hot inner-loop kernels.

Must stay arithmetically identical to pure.py (same operation order) so
both backends produce bit-identical simulations.
"""

from libc.math cimport pow

BACKEND = "cython"


cpdef double raw_weight(double bw, double sp, double mz, double al):
    return (bw + sp + mz) / al


cpdef list weights_batch(list bw, list sp, list mz, list al, bint normalize):
    cdef Py_ssize_t i, n = len(bw)
    cdef double bw_m, sp_m, mz_m, al_m, v
    cdef list out = []
    if not normalize:
        for i in range(n):
            out.append((<double> bw[i] + <double> sp[i] + <double> mz[i]) / <double> al[i])
        return out
    bw_m = bw[0]
    sp_m = sp[0]
    mz_m = mz[0]
    al_m = al[0]
    for i in range(1, n):
        v = bw[i]
        if v > bw_m:
            bw_m = v
        v = sp[i]
        if v > sp_m:
            sp_m = v
        v = mz[i]
        if v > mz_m:
            mz_m = v
        v = al[i]
        if v > al_m:
            al_m = v
    for i in range(n):
        out.append(
            (<double> bw[i] / bw_m + <double> sp[i] / sp_m + <double> mz[i] / mz_m)
            / (<double> al[i] / al_m)
        )
    return out


cpdef double score_sum(list nors, double alpha):
    cdef Py_ssize_t i, n = len(nors)
    cdef double total = 0.0
    cdef double v
    if alpha == 1.0:
        for i in range(n):
            v = nors[i]
            if v > 0:
                total += v
    elif alpha == 0.0:
        for i in range(n):
            v = nors[i]
            if v > 0:
                total += 1.0
    else:
        for i in range(n):
            v = nors[i]
            if v > 0:
                total += pow(v, alpha)
    return total


cpdef Py_ssize_t best_ack_index(list ts, list ws, list ids):
    cdef Py_ssize_t i, n = len(ts)
    cdef Py_ssize_t best = 0
    cdef double b_ts = ts[0]
    cdef double b_w = ws[0]
    cdef long b_id = ids[0]
    cdef double t, w
    cdef long nid
    for i in range(1, n):
        t = ts[i]
        if t < b_ts:
            continue
        if t > b_ts:
            best = i
            b_ts = t
            b_w = ws[i]
            b_id = ids[i]
            continue
        w = ws[i]
        if w < b_w:
            continue
        nid = ids[i]
        if w > b_w or nid < b_id:
            best = i
            b_ts = t
            b_w = w
            b_id = nid
    return best


def top_k_by_score(ids, scores, k):
    order = sorted(range(len(ids)), key=lambda i: (-scores[i], ids[i]))
    return [ids[i] for i in order[:k]]


cpdef tuple fifo_reserve(double ready, double free_up, double free_down,
                         double size_mb, double up_cap, double down_cap,
                         double prop_s):
    cdef double start = ready
    cdef double up_end, down_end, slower
    if free_up > start:
        start = free_up
    if free_down > start:
        start = free_down
    up_end = start + size_mb * 8.0 / up_cap
    down_end = start + size_mb * 8.0 / down_cap
    slower = up_end if up_end > down_end else down_end
    return start, up_end, down_end, slower + prop_s
