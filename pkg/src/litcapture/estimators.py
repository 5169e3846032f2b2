"""Closed-population mark-and-recapture estimators.

Two estimators are provided:

* Petersen (two samples)::

      N = n1 * n2 / r
      sd = sqrt((n1 + 1)(n2 + 1)(n1 - r)(n2 - r) / ((r + 1)^2 (r + 2)))

* Schnabel (many samples)::

      N = sum(n_i * m_i) / sum(r_i)
      sd = sqrt(sum(r_i) / sum(n_i * m_i)^2)

The Schnabel dispersion is kept exactly as written above. Dimensionally it is
the standard error of ``1 / N`` rather than of ``N``; callers wanting an
interval for ``N`` itself should transform it themselves.
"""

from dataclasses import dataclass
from enum import Enum
import math

from sklearn.base import BaseEstimator

from ._validation import check_count
from .exceptions import InvalidCounts, InvalidParams, InvalidSequence, ZeroRecapture


class Method(str, Enum):
    PETERSEN = "Petersen"
    SCHNABEL = "Schnabel"


@dataclass(frozen=True)
class PopulationEstimate:
    point: float
    stddev: float
    method: Method

    def to_dict(self):
        return {"method": self.method.value, "point": self.point, "stddev": self.stddev}


@dataclass(frozen=True)
class CaptureSample:
    """One sampling occasion.

    ``n`` animals caught, ``r`` of them already marked, ``m`` marked animals
    at large before this occasion.
    """

    n: int
    r: int
    m: int

    def __post_init__(self):
        for name in ("n", "r", "m"):
            object.__setattr__(self, name, check_count(getattr(self, name), name))
        if self.r > self.n:
            raise InvalidCounts(f"recaptures r={self.r} exceed captures n={self.n}")
        if self.r > self.m:
            raise InvalidCounts(f"recaptures r={self.r} exceed marked population m={self.m}")


def petersen_estimate(n1, n2, r):
    """Two-sample Petersen estimate of a closed population.

    Parameters
    ----------
    n1, n2 : int
        Number of distinct individuals caught in the first and second sample.
    r : int
        Number caught in both samples.

    Returns
    -------
    PopulationEstimate

    Raises
    ------
    ZeroRecapture
        If ``r == 0``; the estimate is unbounded.
    InvalidCounts
        If ``r`` exceeds either sample size or a count is not a non-negative
        integer.

    Examples
    --------
    >>> est = petersen_estimate(43, 55, 20)
    >>> est.point
    118.25
    >>> round(est.stddev, 3)
    14.298
    """
    n1 = check_count(n1, "n1")
    n2 = check_count(n2, "n2")
    r = check_count(r, "r")
    if r == 0:
        raise ZeroRecapture("no recaptures (r = 0): the Petersen estimate is undefined")
    if r > min(n1, n2):
        raise InvalidCounts(f"r={r} cannot exceed min(n1, n2)={min(n1, n2)}")
    point = float(n1 * n2) / float(r)
    var = (
        float(n1 + 1) * float(n2 + 1) * float(n1 - r) * float(n2 - r)
        / (float(r + 1) ** 2 * float(r + 2))
    )
    return PopulationEstimate(point, math.sqrt(var), Method.PETERSEN)


def samples_from_capture_sets(captures):
    """Turn raw capture sets into ``CaptureSample`` counts.

    An individual counts as marked from the first occasion it is caught
    onwards; marks are never lost.

    >>> samples_from_capture_sets([{"a", "b"}, {"b", "c"}])
    [CaptureSample(n=2, r=0, m=0), CaptureSample(n=2, r=1, m=2)]
    """
    captures = [set(c) for c in captures]
    if not captures:
        raise InvalidSequence("at least one capture set is required")
    marked = set()
    samples = []
    for caught in captures:
        samples.append(CaptureSample(n=len(caught), r=len(caught & marked), m=len(marked)))
        marked |= caught
    return samples


def _coerce_sample(s):
    if isinstance(s, CaptureSample):
        return s
    if isinstance(s, dict):
        return CaptureSample(n=s["n"], r=s["r"], m=s["m"])
    n, r, m = s
    return CaptureSample(n=n, r=r, m=m)


def schnabel_estimate(samples):
    """Multi-sample Schnabel index.

    ``samples`` is an ordered sequence of ``CaptureSample`` (or ``(n, r, m)``
    tuples). The first occasion must have ``m = r = 0`` and ``m`` may never
    decrease.
    """
    try:
        samples = [_coerce_sample(s) for s in samples]
    except InvalidCounts as exc:
        raise InvalidSequence(str(exc)) from exc
    if len(samples) < 2:
        raise InvalidSequence(f"need at least 2 samples, got {len(samples)}")
    first = samples[0]
    if first.m != 0 or first.r != 0:
        raise InvalidSequence("first sample must have m = 0 and r = 0")
    for i in range(1, len(samples)):
        if samples[i].m < samples[i - 1].m:
            raise InvalidSequence(
                f"marked count decreases at sample {i + 1}: "
                f"{samples[i - 1].m} -> {samples[i].m}"
            )
    sum_r = sum(s.r for s in samples)
    sum_nm = sum(s.n * s.m for s in samples)
    if sum_r == 0:
        raise ZeroRecapture("no recaptures across all samples: the Schnabel index is undefined")
    if sum_nm == 0:
        raise InvalidSequence("sum of n_i * m_i is zero")
    point = float(sum_nm) / float(sum_r)
    stddev = math.sqrt(float(sum_r) / float(sum_nm) ** 2)
    return PopulationEstimate(point, stddev, Method.SCHNABEL)


class CaptureRecaptureEstimator(BaseEstimator):
    """Estimate a population size from a sequence of capture sets.

    Parameters
    ----------
    method : {"schnabel", "petersen"}
        ``"petersen"`` requires exactly two capture sets.

    Attributes
    ----------
    samples_ : list of CaptureSample
    estimate_ : PopulationEstimate
    population_ : float
    stddev_ : float
    """

    def __init__(self, method="schnabel"):
        self.method = method

    def fit(self, X, y=None):
        method = str(self.method).lower()
        if method not in ("schnabel", "petersen"):
            raise InvalidParams(f"unknown method {self.method!r}")
        self.samples_ = samples_from_capture_sets(X)
        if method == "petersen":
            if len(self.samples_) != 2:
                raise InvalidSequence("petersen needs exactly two capture sets")
            first, second = self.samples_
            self.estimate_ = petersen_estimate(first.n, second.n, second.r)
        else:
            self.estimate_ = schnabel_estimate(self.samples_)
        self.population_ = self.estimate_.point
        self.stddev_ = self.estimate_.stddev
        return self
