"""Similarity between truncated rankings.

The central object is the overlap curve ``R(j)``: how many ids the top-``j``
prefixes of two rankings share. Identical rankings trace the line ``y = x``,
rankings with nothing in common trace ``y = 0``. The similarity ``S`` is the
squared distance of ``R`` from the ideal line, normalised by the distance of
the zero line::

    S = 1 - sum_j (j - R(j))^2 / sum_j j^2        j = 0..N

Because early disagreements depress every later prefix, ``S`` weighs the top
of the ranking more heavily than the bottom.
"""

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .exceptions import DegenerateInput, DuplicateIds, LengthMismatch, InvalidParams


@dataclass(frozen=True)
class TruncatedRanking:
    """Ordered top-N list of distinct entity ids."""

    ids: tuple

    def __post_init__(self):
        ids = tuple(self.ids)
        if not ids:
            raise InvalidParams("a truncated ranking needs at least one id")
        if len(set(ids)) != len(ids):
            seen, dups = set(), []
            for x in ids:
                if x in seen:
                    dups.append(x)
                seen.add(x)
            raise DuplicateIds(f"ranking contains duplicate ids: {dups[:5]!r}")
        object.__setattr__(self, "ids", ids)

    @property
    def N(self):
        return len(self.ids)

    def __len__(self):
        return len(self.ids)

    def __iter__(self):
        return iter(self.ids)

    def positions(self):
        return {x: i for i, x in enumerate(self.ids)}


@dataclass(frozen=True)
class KendallResult:
    tau: float
    concordant: int
    discordant: int
    defined: bool

    def __float__(self):
        return self.tau


def as_ranking(q):
    return q if isinstance(q, TruncatedRanking) else TruncatedRanking(tuple(q))


def _same_length(q1, q2):
    q1, q2 = as_ranking(q1), as_ranking(q2)
    if q1.N != q2.N:
        raise LengthMismatch(f"rankings differ in length: {q1.N} vs {q2.N}")
    return q1, q2


def overlap_curve(q1, q2):
    """Return ``R`` as an int array of length ``N + 1`` (``R[0] == 0``)."""
    q1, q2 = _same_length(q1, q2)
    n = q1.N
    pos2 = q2.positions()
    # a shared id enters both prefixes once j passes its later position
    joins = np.zeros(n + 1, dtype=np.int64)
    for i, x in enumerate(q1.ids):
        p = pos2.get(x)
        if p is not None:
            joins[max(i, p) + 1] += 1
    return np.cumsum(joins)


def squared_error(xs, ys):
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    return float(np.sum((xs - ys) ** 2))


def similarity_from_curve(curve):
    curve = np.asarray(curve, dtype=np.int64)
    n = len(curve) - 1
    ideal = np.arange(n + 1, dtype=np.int64)
    # integer sums are exact; E(I, Z) = N(N+1)(2N+1)/6
    err = int(np.sum((ideal - curve) ** 2))
    worst = n * (n + 1) * (2 * n + 1) // 6
    return 1.0 - err / worst


def similarity_s(q1, q2):
    """Squared-error similarity of two equal-length truncated rankings, in [0, 1].

    >>> similarity_s("abcd", "abcd")
    1.0
    >>> similarity_s("abcd", "wxyz")
    0.0
    """
    return similarity_from_curve(overlap_curve(q1, q2))


def _count_concordant(order2, chunk=2048):
    """Concordant pairs in a sequence of second-ranking positions that is
    already sorted by first-ranking position."""
    p = np.asarray(order2)
    k = len(p)
    concordant = 0
    for start in range(0, k, chunk):
        block = p[start:start + chunk]
        # pairs (i, j) with i < j: j > i is concordant iff p[j] > p[i]
        greater = block[:, None] < p[None, :]
        cols = np.arange(k)[None, :]
        rows = np.arange(start, start + len(block))[:, None]
        concordant += int(np.count_nonzero(greater & (cols > rows)))
    return concordant


def kendall_tau_truncated(q1, q2):
    """Kendall tau over the pairs whose members appear in both rankings.

    Pairs with an element missing from either ranking carry no information
    and are skipped. When fewer than two ids are shared the result is
    ``tau = 0`` with ``defined = False``.
    """
    q1, q2 = as_ranking(q1), as_ranking(q2)
    pos2 = q2.positions()
    order2 = [pos2[x] for x in q1.ids if x in pos2]
    k = len(order2)
    total = k * (k - 1) // 2
    if total == 0:
        return KendallResult(0.0, 0, 0, False)
    concordant = _count_concordant(order2)
    discordant = total - concordant
    return KendallResult((concordant - discordant) / total, concordant, discordant, True)


def normalized_overlap(q1, q2):
    q1, q2 = _same_length(q1, q2)
    return len(set(q1.ids) & set(q2.ids)) / q1.N


def pearson(xs, ys):
    """Sample Pearson correlation; raises ``DegenerateInput`` on constant input."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise LengthMismatch(f"pearson needs two equal-length 1-D sequences, got {x.shape} and {y.shape}")
    if len(x) < 2:
        raise DegenerateInput("pearson needs at least two observations")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateInput("pearson is undefined for a constant sequence")
    r = float(dx @ dy) / np.sqrt(sxx * syy)
    return float(np.clip(r, -1.0, 1.0))


def compare(q1, q2):
    """All measures for one pair, as a plain dict."""
    q1, q2 = _same_length(q1, q2)
    tau = kendall_tau_truncated(q1, q2)
    return {
        "s": similarity_s(q1, q2),
        "kendall": tau.tau,
        "kendall_defined": tau.defined,
        "overlap": normalized_overlap(q1, q2),
        "n": q1.N,
    }


class RankingSimilarity(TransformerMixin, BaseEstimator):
    """Score rankings against a fitted reference ranking.

    ``fit`` stores the reference; ``transform`` maps each ranking to the row
    ``[s, kendall, overlap]``.

    Parameters
    ----------
    top_k : int or None
        Truncate both reference and inputs to this length first.
    """

    def __init__(self, top_k=None):
        self.top_k = top_k

    def _cut(self, q):
        ids = tuple(q)
        if self.top_k is not None:
            ids = ids[: self.top_k]
        return TruncatedRanking(ids)

    def fit(self, X, y=None):
        self.reference_ = self._cut(X)
        self.n_ = self.reference_.N
        return self

    def transform(self, X):
        if not hasattr(self, "reference_"):
            raise InvalidParams("RankingSimilarity is not fitted yet")
        rows = []
        for q in X:
            q = self._cut(q)
            tau = kendall_tau_truncated(self.reference_, q)
            rows.append(
                [similarity_s(self.reference_, q), tau.tau, normalized_overlap(self.reference_, q)]
            )
        return np.asarray(rows, dtype=float).reshape(-1, 3)

    def score(self, X, y=None):
        return float(np.mean(self.transform(X)[:, 0]))
