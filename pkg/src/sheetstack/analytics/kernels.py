"""Batched per-series scoring kernels.

One flattened pass computes, for every series: OLS slope/intercept, MSE,
per-point Cook's distance, and the argmax distance. Two interchangeable
implementations exist — a numba-jitted loop and a pure numpy twin — picked
via SHEETSTACK_BACKEND (auto | numba | numpy).
"""

from __future__ import annotations

import os

import numpy as np

# Relative residual threshold under which a fit counts as exact and all
# Cook's distances are defined as zero. Scaled by TSS plus mean squared
# value so constant series (TSS = 0) are covered too.
PERFECT_FIT_RTOL = 1e-20


def _score_loop(xs, ys, offsets, m, b, mse, cook, mcd_idx):
    # Shared body for the jitted and (if numba is absent) interpreted path.
    # Assumes every series has n >= 3 and distinct x values.
    n_series = offsets.shape[0] - 1
    for s in range(n_series):
        lo = offsets[s]
        hi = offsets[s + 1]
        n = hi - lo
        sx = 0.0
        sy = 0.0
        for i in range(lo, hi):
            sx += xs[i]
            sy += ys[i]
        xbar = sx / n
        ybar = sy / n
        sxx = 0.0
        sxy = 0.0
        tss = 0.0
        syy_raw = 0.0
        for i in range(lo, hi):
            dx = xs[i] - xbar
            dy = ys[i] - ybar
            sxx += dx * dx
            sxy += dx * dy
            tss += dy * dy
            syy_raw += ys[i] * ys[i]
        slope = sxy / sxx
        intercept = ybar - slope * xbar
        sse = 0.0
        for i in range(lo, hi):
            e = ys[i] - (slope * xs[i] + intercept)
            sse += e * e
        m[s] = slope
        b[s] = intercept
        mse[s] = sse / n
        if sse <= PERFECT_FIT_RTOL * (tss + syy_raw / n):
            for i in range(lo, hi):
                cook[i] = 0.0
        else:
            s2 = sse / (n - 2)
            for i in range(lo, hi):
                dx = xs[i] - xbar
                h = 1.0 / n + dx * dx / sxx
                e = ys[i] - (slope * xs[i] + intercept)
                cook[i] = (e * e / (2.0 * s2)) * (h / ((1.0 - h) * (1.0 - h)))
        best = cook[lo]
        best_i = lo
        for i in range(lo + 1, hi):
            if cook[i] > best:
                best = cook[i]
                best_i = i
        mcd_idx[s] = best_i


try:
    from numba import njit

    _score_loop_numba = njit(cache=True)(_score_loop)
except ImportError:  # pragma: no cover - exercised via SHEETSTACK_BACKEND=numpy
    _score_loop_numba = None


def _score_numpy(xs, ys, offsets):
    starts = offsets[:-1]
    reps = np.diff(offsets)
    n = reps.astype(np.float64)
    xbar = np.add.reduceat(xs, starts) / n
    ybar = np.add.reduceat(ys, starts) / n
    dx = xs - np.repeat(xbar, reps)
    dy = ys - np.repeat(ybar, reps)
    sxx = np.add.reduceat(dx * dx, starts)
    sxy = np.add.reduceat(dx * dy, starts)
    tss = np.add.reduceat(dy * dy, starts)
    syy_raw = np.add.reduceat(ys * ys, starts)
    m = sxy / sxx
    b = ybar - m * xbar
    resid = ys - (np.repeat(m, reps) * xs + np.repeat(b, reps))
    sse = np.add.reduceat(resid * resid, starts)
    mse = sse / n

    s2 = sse / (n - 2.0)
    perfect = sse <= PERFECT_FIT_RTOL * (tss + syy_raw / n)
    safe_s2 = np.where(s2 > 0.0, s2, 1.0)
    h = 1.0 / np.repeat(n, reps) + dx * dx / np.repeat(sxx, reps)
    cook = (resid * resid / (2.0 * np.repeat(safe_s2, reps))) * (h / (1.0 - h) ** 2)
    cook[np.repeat(perfect, reps)] = 0.0

    maxes = np.maximum.reduceat(cook, starts)
    idx = np.arange(cook.shape[0], dtype=np.int64)
    candidates = np.where(cook == np.repeat(maxes, reps), idx, cook.shape[0])
    mcd_idx = np.minimum.reduceat(candidates, starts)
    return m, b, mse, cook, mcd_idx


def numba_available() -> bool:
    return _score_loop_numba is not None


def resolve_backend(name: str | None = None) -> str:
    requested = (name or os.environ.get("SHEETSTACK_BACKEND", "") or "auto").lower()
    if requested == "auto":
        return "numba" if numba_available() else "numpy"
    if requested == "numba":
        if not numba_available():
            raise RuntimeError("numba backend requested but numba is not importable")
        return "numba"
    if requested == "numpy":
        return "numpy"
    raise ValueError(f"unknown backend {requested!r} (use auto, numba, or numpy)")


def score_batch(xs, ys, offsets, backend: str | None = None):
    """Score flattened series; returns (m, b, mse, cook, mcd_idx).

    xs/ys hold all points back to back; offsets (len = n_series + 1) bounds
    each series. mcd_idx indexes into the flat arrays.
    """
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    ys = np.ascontiguousarray(ys, dtype=np.float64)
    offsets = np.ascontiguousarray(offsets, dtype=np.int64)
    n_series = offsets.shape[0] - 1
    if n_series == 0:
        empty = np.empty(0, dtype=np.float64)
        return empty, empty.copy(), empty.copy(), empty.copy(), np.empty(0, dtype=np.int64)
    if resolve_backend(backend) == "numpy":
        return _score_numpy(xs, ys, offsets)
    m = np.empty(n_series, dtype=np.float64)
    b = np.empty(n_series, dtype=np.float64)
    mse = np.empty(n_series, dtype=np.float64)
    cook = np.empty(xs.shape[0], dtype=np.float64)
    mcd_idx = np.empty(n_series, dtype=np.int64)
    _score_loop_numba(xs, ys, offsets, m, b, mse, cook, mcd_idx)
    return m, b, mse, cook, mcd_idx


def minmax_scale(ys: np.ndarray) -> np.ndarray:
    """Min-max scale one series to [0, 1]; constant series scale to all zeros."""
    ys = np.asarray(ys, dtype=np.float64)
    lo = ys.min()
    span = ys.max() - lo
    if span == 0.0:
        return np.zeros_like(ys)
    return (ys - lo) / span
