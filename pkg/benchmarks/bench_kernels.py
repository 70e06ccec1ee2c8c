"""Benchmark the compiled kernels against the pure-Python fallback.

Times each kernel on synthetic hot-loop workloads, then runs the same
scenario end to end under both backends (the pure side in a subprocess
with QIRMSIM_PURE=1) and checks the outputs match byte for byte.

Usage: python benchmarks/bench_kernels.py [--repeats N]
"""

from __future__ import annotations

import argparse
import os
import random
import subprocess
import sys
import time

from qirmsim._kernels import pure

try:
    from qirmsim._kernels import _speedups
except ImportError:
    _speedups = None


def timeit(fn, args_iter, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        for args in args_iter:
            fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def kernel_workloads(rng: random.Random):
    weights = [
        (
            [rng.uniform(1, 100) for _ in range(50)],
            [rng.uniform(1, 10) for _ in range(50)],
            [rng.uniform(64, 1024) for _ in range(50)],
            [rng.uniform(1, 50) for _ in range(50)],
            True,
        )
        for _ in range(200)
    ]
    scores = [
        ([float(rng.randint(0, 8)) for _ in range(rng.randint(1, 12))], rng.choice([0.0, 1.0, 1.7]))
        for _ in range(20000)
    ]
    acks = []
    for _ in range(20000):
        m = rng.randint(1, 12)
        acks.append(
            (
                [rng.uniform(0, 100) for _ in range(m)],
                [rng.uniform(0.1, 40) for _ in range(m)],
                rng.sample(range(100), m),
            )
        )
    reserves = [
        (
            rng.uniform(0, 500),
            rng.uniform(0, 500),
            rng.uniform(0, 500),
            rng.uniform(0.5, 5),
            rng.uniform(1, 100),
            rng.uniform(2, 200),
            rng.uniform(0, 0.05),
        )
        for _ in range(50000)
    ]
    return {
        "weights_batch": weights,
        "score_sum": scores,
        "best_ack_index": acks,
        "fifo_reserve": reserves,
    }


def end_to_end(pure_mode: bool) -> tuple[float, str]:
    env = dict(os.environ)
    env.pop("QIRMSIM_PURE", None)
    if pure_mode:
        env["QIRMSIM_PURE"] = "1"
    code = (
        "import time, qirmsim\n"
        "cfg = qirmsim.ScenarioConfig(seed=3)\n"
        "t0 = time.perf_counter()\n"
        "r = qirmsim.run_scenario(cfg).report\n"
        "dt = time.perf_counter() - t0\n"
        "print(qirmsim.KERNEL_BACKEND)\n"
        "print(dt)\n"
        "print(repr((r.avg_delay_s, r.throughput_Bps, r.query_efficiency,"
        " r.bw_utilization, r.local_hits, r.strong_hits, r.fallbacks, r.unserved)))\n"
    )
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True
    ).stdout.splitlines()
    assert out[0] == ("pure" if pure_mode else "cython"), out[0]
    return float(out[1]), out[2]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    if _speedups is None:
        print("compiled kernels not built; run pip install -e . first")
        return 1

    rng = random.Random(99)
    workloads = kernel_workloads(rng)
    print(f"{'kernel':>16} {'pure':>10} {'cython':>10} {'speedup':>8}")
    for name, batch in workloads.items():
        t_pure = timeit(getattr(pure, name), batch, args.repeats)
        t_cy = timeit(getattr(_speedups, name), batch, args.repeats)
        print(f"{name:>16} {t_pure * 1e3:9.1f}ms {t_cy * 1e3:9.1f}ms {t_pure / t_cy:7.2f}x")

    print("\nend-to-end scenario (50 nodes, ~10k queries):")
    t_cy, rep_cy = end_to_end(pure_mode=False)
    t_pure, rep_pure = end_to_end(pure_mode=True)
    print(f"{'full run':>16} {t_pure:9.2f}s {t_cy:9.2f}s {t_pure / t_cy:7.2f}x")
    if rep_cy == rep_pure:
        print("backend outputs are identical")
        return 0
    print("WARNING: backends disagree!")
    print(" cython:", rep_cy)
    print(" pure:  ", rep_pure)
    return 1


if __name__ == "__main__":
    raise SystemExit(main())
