"""Coverage time series for two ranked result lists and stopping rules.

At depth ``n`` each engine has returned ``N1[n]`` and ``N2[n]`` unique
articles, ``R[n]`` of them common to both. Treating the two prefixes as a
capture and a recapture gives::

    T[n] = N1[n] * N2[n] / max(R[n], 1)     estimated literature size
    C[n] = (N1[n] + N2[n] - R[n]) / T[n]    fraction of it seen so far

Turning points of ``C`` are candidate places to stop searching: a local
minimum means later results repeat what the other engine already showed, a
local maximum means the engines start to diverge.
"""

from dataclasses import dataclass
from enum import Enum
import csv
import io

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import check_non_negative_real, check_odd_window, check_positive_int
from .exceptions import EmptyList, WindowTooLarge
from .records import RankedList, normalize_key

DEFAULT_MAX_N = 500
DEFAULT_WINDOW = 5
DEFAULT_PROMINENCE_FRACTION = 0.05
MIN_CLASSIFY_LENGTH = 50
QUADRATIC_BAND = (1.8, 2.2)
TERMINAL_COVERAGE = 0.1

SERIES_COLUMNS = ("n", "N1", "N2", "R", "T", "C")


@dataclass(frozen=True)
class CoverageSeries:
    """Per-depth arrays; index ``i`` holds depth ``n = i + 1``."""

    N1: np.ndarray
    N2: np.ndarray
    R: np.ndarray
    T: np.ndarray
    C: np.ndarray

    @property
    def max_n(self):
        return len(self.C)

    @property
    def n(self):
        return np.arange(1, self.max_n + 1)

    @classmethod
    def from_counts(cls, N1, N2, R):
        N1 = np.asarray(N1, dtype=np.int64)
        N2 = np.asarray(N2, dtype=np.int64)
        R = np.asarray(R, dtype=np.int64)
        T = (N1 * N2).astype(float) / np.maximum(R, 1)
        C = (N1 + N2 - R).astype(float) / T
        for arr in (N1, N2, R, T, C):
            arr.setflags(write=False)
        return cls(N1, N2, R, T, C)

    def rows(self):
        for i in range(self.max_n):
            yield (i + 1, int(self.N1[i]), int(self.N2[i]), int(self.R[i]), float(self.T[i]), float(self.C[i]))

    def to_csv(self, fh=None):
        buf = io.StringIO(newline="")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(SERIES_COLUMNS)
        for n, n1, n2, r, t, c in self.rows():
            writer.writerow([n, n1, n2, r, repr(t), repr(c)])
        text = buf.getvalue()
        if fh is not None:
            fh.write(text)
        return text


class ExtremumKind(str, Enum):
    LOCAL_MIN = "LocalMin"
    LOCAL_MAX = "LocalMax"


@dataclass(frozen=True)
class StoppingPoint:
    n: int
    kind: ExtremumKind
    c_value: float
    prominence: float = 0.0

    def to_dict(self):
        return {"n": self.n, "kind": self.kind.value, "c_value": self.c_value, "prominence": self.prominence}


class KeywordType(str, Enum):
    TYPE_I = "TypeI"
    TYPE_II = "TypeII"
    TYPE_III = "TypeIII"
    TYPE_IV = "TypeIV"


@dataclass(frozen=True)
class KeywordClass:
    kind: KeywordType
    stopping_points: tuple = ()
    rationale: str = ""
    loglog_slope: float = None

    def to_dict(self):
        return {
            "class": self.kind.value,
            "stopping_points": [p.to_dict() for p in self.stopping_points],
            "rationale": self.rationale,
            "loglog_slope": self.loglog_slope,
        }


def _keys(ranked):
    return [normalize_key(rec) for rec in ranked.entries]


def build_series(list1, list2, max_n=DEFAULT_MAX_N):
    """Coverage series over depths ``1..max_n``.

    Duplicates inside one list (same title and author family names) are
    counted once. The ``R >= 1`` floor is applied only when computing ``T``.
    The series stops at the end of the longer list if that comes first.
    """
    max_n = check_positive_int(max_n, "max_n")
    for name, lst in (("list1", list1), ("list2", list2)):
        if not isinstance(lst, RankedList):
            raise TypeError(f"{name} must be a RankedList")
        if len(lst) == 0:
            raise EmptyList(f"{name} is empty")
    keys1, keys2 = _keys(list1), _keys(list2)
    max_n = min(max_n, max(len(keys1), len(keys2)))
    seen1, seen2 = set(), set()
    N1 = np.zeros(max_n, dtype=np.int64)
    N2 = np.zeros(max_n, dtype=np.int64)
    R = np.zeros(max_n, dtype=np.int64)
    common = 0
    for i in range(max_n):
        # a newly seen key becomes common once the other list has seen it too
        if i < len(keys1) and keys1[i] not in seen1:
            seen1.add(keys1[i])
            common += keys1[i] in seen2
        if i < len(keys2) and keys2[i] not in seen2:
            seen2.add(keys2[i])
            common += keys2[i] in seen1
        N1[i], N2[i], R[i] = len(seen1), len(seen2), common
    return CoverageSeries.from_counts(N1, N2, R)


def smooth(values, window):
    """Centred moving average; the window shrinks at the ends."""
    values = np.asarray(values, dtype=float)
    half = window // 2
    csum = np.concatenate(([0.0], np.cumsum(values)))
    idx = np.arange(len(values))
    lo = np.maximum(idx - half, 0)
    hi = np.minimum(idx + half + 1, len(values))
    return (csum[hi] - csum[lo]) / (hi - lo)


def _raw_extrema(y):
    """Strict interior extrema of ``y``; flat runs count once (at their first
    index) when both neighbours lie on the same side."""
    out = []
    n = len(y)
    i = 1
    while i < n - 1:
        j = i
        while j + 1 < n and y[j + 1] == y[i]:
            j += 1
        if j >= n - 1:
            break
        left, right = y[i - 1], y[j + 1]
        if left > y[i] and right > y[i]:
            out.append((i, ExtremumKind.LOCAL_MIN))
        elif left < y[i] and right < y[i]:
            out.append((i, ExtremumKind.LOCAL_MAX))
        i = j + 1
    return out


def stopping_points(series, window=DEFAULT_WINDOW, min_prominence=None):
    """Turning points of the smoothed coverage curve.

    The prominence of an extremum is the smaller of its height differences to
    the nearest opposite-kind extremum on each side, using the series end
    value where no such extremum exists. Points below ``min_prominence``
    (default: 5% of the range of ``C``) are dropped.
    """
    window = check_odd_window(window)
    if window >= series.max_n:
        raise WindowTooLarge(f"window {window} must be smaller than max_n {series.max_n}")
    y = smooth(series.C, window)
    if min_prominence is None:
        min_prominence = DEFAULT_PROMINENCE_FRACTION * float(np.ptp(series.C))
    min_prominence = check_non_negative_real(min_prominence, "min_prominence")
    extrema = _raw_extrema(y)
    points = []
    for k, (i, kind) in enumerate(extrema):
        left = next((y[j] for j, kd in reversed(extrema[:k]) if kd != kind), y[0])
        right = next((y[j] for j, kd in extrema[k + 1:] if kd != kind), y[-1])
        prominence = min(abs(y[i] - left), abs(y[i] - right))
        if prominence >= min_prominence and prominence > 0:
            points.append(StoppingPoint(i + 1, kind, float(y[i]), float(prominence)))
    return points


def information_gain(series):
    """First difference of coverage: entry ``k`` is ``C[k+2] - C[k+1]``
    in 1-based depths."""
    if series.max_n < 2:
        raise WindowTooLarge("information gain needs max_n >= 2")
    return np.diff(series.C)


def loglog_slope(series, start_fraction=0.5):
    """Least-squares slope of ``log T`` against ``log n`` over the tail."""
    n = series.n.astype(float)
    start = int(np.floor(series.max_n * start_fraction))
    x = np.log(n[start:])
    y = np.log(series.T[start:])
    if len(x) < 2:
        return float("nan")
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def classify_keyword(
    series,
    window=DEFAULT_WINDOW,
    min_prominence=None,
    terminal_threshold=TERMINAL_COVERAGE,
    quadratic_band=QUADRATIC_BAND,
):
    """Assign the coverage curve to one of four shapes.

    TypeII has both a minimum and a maximum, TypeIII only a minimum, TypeI
    has no turning point and decays to zero while ``T`` grows quadratically;
    everything else is TypeIV. The first matching rule wins in that order.
    """
    if series.max_n < MIN_CLASSIFY_LENGTH:
        return KeywordClass(KeywordType.TYPE_IV, (), "insufficient data")
    if np.array_equal(series.R, series.N1) and np.array_equal(series.R, series.N2):
        return KeywordClass(KeywordType.TYPE_IV, (), "degenerate: identical inputs")
    points = tuple(stopping_points(series, window, min_prominence))
    mins = [p for p in points if p.kind is ExtremumKind.LOCAL_MIN]
    maxs = [p for p in points if p.kind is ExtremumKind.LOCAL_MAX]
    slope = loglog_slope(series)
    if mins and maxs:
        return KeywordClass(
            KeywordType.TYPE_II, points,
            f"local minimum at n={mins[0].n} and local maximum at n={maxs[0].n}", slope,
        )
    if mins:
        return KeywordClass(
            KeywordType.TYPE_III, points, f"local minimum at n={mins[0].n}, no maximum", slope
        )
    half = series.max_n // 2
    tail = smooth(series.C, window)[half:]
    decreasing = bool(np.all(np.diff(tail) <= 0)) and tail[-1] < tail[0]
    small = float(series.C[-1]) < terminal_threshold
    quadratic = quadratic_band[0] <= slope <= quadratic_band[1]
    if not points and decreasing and small and quadratic:
        return KeywordClass(
            KeywordType.TYPE_I, points,
            f"coverage decays to {series.C[-1]:.4g}; log-log slope of T is {slope:.3f}", slope,
        )
    reasons = []
    if points:
        reasons.append(f"only local maxima at n={[p.n for p in points]}")
    if not decreasing:
        reasons.append("tail of C not decreasing")
    if not small:
        reasons.append(f"terminal C {series.C[-1]:.4g} >= {terminal_threshold}")
    if not quadratic:
        reasons.append(f"log-log slope of T {slope:.3f} outside {list(quadratic_band)}")
    return KeywordClass(
        KeywordType.TYPE_IV, points, "no significant feature: " + "; ".join(reasons), slope
    )


class CoverageAnalyzer(BaseEstimator):
    """Fit two ranked result lists and expose the coverage analysis.

    Parameters
    ----------
    max_n : int
        Depth of the series (results past the end of a list add nothing).
    window : int
        Odd smoothing window for turning-point detection.
    min_prominence : float or None
        Absolute prominence threshold; ``None`` means 5% of the range of C.
    terminal_threshold : float
        Terminal coverage below which a decaying curve counts as TypeI.

    Attributes
    ----------
    series_ : CoverageSeries
    stopping_points_ : list of StoppingPoint
    keyword_class_ : KeywordClass
    information_gain_ : ndarray
    """

    def __init__(self, max_n=DEFAULT_MAX_N, window=DEFAULT_WINDOW, min_prominence=None,
                 terminal_threshold=TERMINAL_COVERAGE):
        self.max_n = max_n
        self.window = window
        self.min_prominence = min_prominence
        self.terminal_threshold = terminal_threshold

    def fit(self, list1, list2):
        self.series_ = build_series(list1, list2, self.max_n)
        if self.window < self.series_.max_n:
            self.stopping_points_ = stopping_points(self.series_, self.window, self.min_prominence)
        else:
            self.stopping_points_ = []
        self.keyword_class_ = classify_keyword(
            self.series_, self.window, self.min_prominence, self.terminal_threshold
        )
        self.information_gain_ = (
            information_gain(self.series_) if self.series_.max_n >= 2 else np.array([])
        )
        return self

    def transform(self, X=None):
        """Series as an array with columns ``n, N1, N2, R, T, C``."""
        s = self.series_
        return np.column_stack([s.n, s.N1, s.N2, s.R, s.T, s.C]).astype(float)
