"""Kernel backend selection: compiled extension when built, pure Python
otherwise. Set QIRMSIM_PURE=1 to force the pure backend."""

import os

if os.environ.get("QIRMSIM_PURE"):
    from . import pure as impl
else:
    try:
        from . import _speedups as impl  # type: ignore[attr-defined]
    except ImportError:
        from . import pure as impl

BACKEND = impl.BACKEND
raw_weight = impl.raw_weight
weights_batch = impl.weights_batch
score_sum = impl.score_sum
best_ack_index = impl.best_ack_index
top_k_by_score = impl.top_k_by_score
fifo_reserve = impl.fifo_reserve
