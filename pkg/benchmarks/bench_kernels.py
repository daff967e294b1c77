"""Compare the numba and numpy scoring backends on synthetic batches.

Usage: python3 benchmarks/bench_kernels.py [--repeats N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from sheetstack.analytics.kernels import numba_available, score_batch


def make_batch(rng, n_series, mean_len=12):
    lengths = rng.integers(6, mean_len * 2, size=n_series)
    offsets = np.zeros(n_series + 1, dtype=np.int64)
    offsets[1:] = np.cumsum(lengths)
    total = int(offsets[-1])
    xs = np.empty(total)
    ys = np.empty(total)
    for i, n in enumerate(lengths):
        lo, hi = int(offsets[i]), int(offsets[i + 1])
        x = np.sort(rng.choice(np.arange(3 * n), size=n, replace=False)).astype(float)
        xs[lo:hi] = x
        ys[lo:hi] = rng.normal(0, 4) * x + rng.normal(0, 30) + rng.normal(0, 2, int(n))
    return xs, ys, offsets


def bench(backend, xs, ys, offsets, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        score_batch(xs, ys, offsets, backend=backend)
        best = min(best, time.perf_counter() - start)
    return best


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    backends = ["numpy"]
    if numba_available():
        backends.insert(0, "numba")
    else:
        print("numba not importable; benchmarking numpy only")

    rng = np.random.default_rng(7)
    sizes = [100, 1_000, 10_000, 100_000]
    batches = {n: make_batch(rng, n) for n in sizes}

    # warm both paths (jit compile, allocator) outside the timed region
    for backend in backends:
        score_batch(*batches[sizes[0]], backend=backend)

    header = f"{'series':>8} {'points':>9}"
    for backend in backends:
        header += f" {backend + ' (ms)':>12}"
    if len(backends) == 2:
        header += f" {'speedup':>8}"
    print(header)
    for n in sizes:
        xs, ys, offsets = batches[n]
        row = f"{n:>8} {len(xs):>9}"
        times = []
        for backend in backends:
            t = bench(backend, xs, ys, offsets, args.repeats)
            times.append(t)
            row += f" {t * 1000:>12.3f}"
        if len(times) == 2:
            row += f" {times[1] / times[0]:>7.1f}x"
        print(row)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
