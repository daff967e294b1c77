"""Series scoring: trend fits, influence, short-series stats, deltas, novelty.

Series with six or more points get an OLS fit plus per-point Cook's
distances; series of two to five points get mean/variance only. Every
series may additionally carry a latest-two delta.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateSeries, TooShort
from ..timeseries import TimeSeries, _key_rows
from .kernels import minmax_scale, resolve_backend, score_batch

REGRESSION_MIN_POINTS = 6
SHORT_MIN_POINTS = 2


@dataclass(frozen=True)
class RegressionStats:
    m: float
    b: float
    mse: float
    cook: tuple[float, ...]
    mcd_point: tuple[int, float, float]  # (ordinal, value, distance)

    @property
    def mcd(self) -> float:
        return self.mcd_point[2]


@dataclass(frozen=True)
class ShortStats:
    mean: float
    variance: float  # population form


@dataclass(frozen=True)
class DeltaStat:
    squared_diff: float
    from_ordinal: int
    to_ordinal: int
    from_value: float
    to_value: float


@dataclass(frozen=True)
class NoveltyReport:
    new_keys: tuple[tuple[str, ...], ...]
    new_attributes: tuple[str, ...]

    def __bool__(self) -> bool:
        return bool(self.new_keys or self.new_attributes)


@dataclass(frozen=True)
class SeriesScore:
    """Everything known about one series; unavailable parts are None."""

    regression: RegressionStats | None = None
    short: ShortStats | None = None
    delta: DeltaStat | None = None


def _xy(series: TimeSeries, normalize: bool) -> tuple[np.ndarray, np.ndarray]:
    xs = np.asarray(series.ordinals(), dtype=np.float64)
    ys = np.asarray(series.values(), dtype=np.float64)
    return xs, (minmax_scale(ys) if normalize else ys)


def fit_ols(series: TimeSeries, normalize: bool = False) -> RegressionStats:
    """Least-squares trend over point ordinals; requires >= 6 points."""
    if series.n < REGRESSION_MIN_POINTS:
        raise DegenerateSeries(
            f"{series.n} points; regression needs >= {REGRESSION_MIN_POINTS}"
        )
    xs, ys = _xy(series, normalize)
    m, b, mse, cook, mcd_idx = score_batch(xs, ys, np.array([0, len(xs)]))
    j = int(mcd_idx[0])
    return RegressionStats(
        m=float(m[0]),
        b=float(b[0]),
        mse=float(mse[0]),
        cook=tuple(float(c) for c in cook),
        mcd_point=(series.points[j].ordinal, float(ys[j]), float(cook[j])),
    )


def cook_distance(
    series: TimeSeries, fit: RegressionStats, normalize: bool = False
) -> tuple[float, ...]:
    """Per-point Cook's distances for a given fit (p = 2, s2 = SSE/(n-2))."""
    xs, ys = _xy(series, normalize)
    n = len(xs)
    resid = ys - (fit.m * xs + fit.b)
    sse = float(resid @ resid)
    tss = float(((ys - ys.mean()) ** 2).sum())
    if sse <= 1e-20 * (tss + float(ys @ ys) / n):
        return tuple(0.0 for _ in range(n))
    s2 = sse / (n - 2)
    xbar = xs.mean()
    sxx = float(((xs - xbar) ** 2).sum())
    h = 1.0 / n + (xs - xbar) ** 2 / sxx
    d = (resid**2 / (2.0 * s2)) * (h / (1.0 - h) ** 2)
    return tuple(float(v) for v in d)


def short_stats(series: TimeSeries) -> ShortStats:
    """Mean and population variance for series of 2..5 points."""
    if series.n < SHORT_MIN_POINTS:
        raise TooShort(f"{series.n} points; need >= {SHORT_MIN_POINTS}")
    if series.n >= REGRESSION_MIN_POINTS:
        raise DegenerateSeries(f"{series.n} points; route to fit_ols")
    ys = np.asarray(series.values(), dtype=np.float64)
    return ShortStats(mean=float(ys.mean()), variance=float(ys.var()))


def latest_delta(series: TimeSeries, window_ordinals) -> DeltaStat | None:
    """Squared change between the window's two newest sheets, if both present."""
    if len(window_ordinals) < 2:
        return None
    prev_o, last_o = sorted(window_ordinals)[-2:]
    by_ordinal = {p.ordinal: p for p in series.points}
    if prev_o not in by_ordinal or last_o not in by_ordinal:
        return None
    a = by_ordinal[prev_o].value
    b = by_ordinal[last_o].value
    return DeltaStat(
        squared_diff=float(b - a) ** 2,
        from_ordinal=prev_o,
        to_ordinal=last_o,
        from_value=a,
        to_value=b,
    )


def detect_novelty(sheets) -> NoveltyReport:
    """Keys and header names present in the latest sheet but in no earlier one.

    A one-sheet window reports everything as new (the baseline feed).
    """
    sheets = sorted(sheets, key=lambda sh: sh.ordinal)
    if not sheets:
        return NoveltyReport((), ())
    latest, prior = sheets[-1], sheets[:-1]
    prior_keys: set[tuple[str, ...]] = set()
    prior_attrs: set[str] = set()
    for sh in prior:
        prior_keys.update(_key_rows(sh.table, sh.profile.keys))
        prior_attrs.update(sh.table.header)
    latest_keys = set(_key_rows(latest.table, latest.profile.keys))
    return NoveltyReport(
        new_keys=tuple(sorted(latest_keys - prior_keys)),
        new_attributes=tuple(sorted(set(latest.table.header) - prior_attrs)),
    )


def score_window(
    population: dict,
    window_ordinals,
    normalize: bool = False,
    backend: str | None = None,
) -> dict:
    """Score a whole series population in one batched kernel call."""
    scores: dict = {}
    eligible = sorted(
        (s for s in population.values() if s.n >= REGRESSION_MIN_POINTS),
        key=lambda s: s.id.sort_key(),
    )
    regressions: dict = {}
    if eligible:
        offsets = np.zeros(len(eligible) + 1, dtype=np.int64)
        for i, s in enumerate(eligible):
            offsets[i + 1] = offsets[i] + s.n
        xs = np.empty(offsets[-1], dtype=np.float64)
        ys = np.empty(offsets[-1], dtype=np.float64)
        for i, s in enumerate(eligible):
            lo, hi = offsets[i], offsets[i + 1]
            sx, sy = _xy(s, normalize)
            xs[lo:hi] = sx
            ys[lo:hi] = sy
        m, b, mse, cook, mcd_idx = score_batch(xs, ys, offsets, backend=backend)
        for i, s in enumerate(eligible):
            lo, hi = int(offsets[i]), int(offsets[i + 1])
            j = int(mcd_idx[i])
            regressions[s.id] = RegressionStats(
                m=float(m[i]),
                b=float(b[i]),
                mse=float(mse[i]),
                cook=tuple(float(c) for c in cook[lo:hi]),
                mcd_point=(s.points[j - lo].ordinal, float(ys[j]), float(cook[j])),
            )
    for sid, series in population.items():
        short = None
        if SHORT_MIN_POINTS <= series.n < REGRESSION_MIN_POINTS:
            short = short_stats(series)
        scores[sid] = SeriesScore(
            regression=regressions.get(sid),
            short=short,
            delta=latest_delta(series, window_ordinals),
        )
    return scores


__all__ = [
    "RegressionStats",
    "ShortStats",
    "DeltaStat",
    "NoveltyReport",
    "SeriesScore",
    "fit_ols",
    "cook_distance",
    "short_stats",
    "latest_delta",
    "detect_novelty",
    "score_window",
    "score_batch",
    "resolve_backend",
    "minmax_scale",
]
