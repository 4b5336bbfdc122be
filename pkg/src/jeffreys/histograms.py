"""Histogram data model: positive histograms, frequency histograms, weighted sets.

A histogram is a vector of strictly positive bin values; a frequency
histogram additionally lives on the probability simplex (bins sum to one).
All types are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import ValidationError

#: |sum - 1| accepted as exactly normalized.
SIMPLEX_ATOL = 1e-12
#: |sum - 1| repaired by silent renormalization; anything worse is rejected.
RENORMALIZE_ATOL = 1e-6
#: Base scale of the additive smoothing applied to histograms with empty bins.
DEFAULT_EPSILON_SCALE = 1e-10


def _as_bins(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValidationError(f"histogram bins must be one-dimensional, got shape {arr.shape}")
    if arr.size < 1:
        raise ValidationError("histogram needs at least one bin")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("histogram bins must be finite")
    return arr


def smooth_bins(values, epsilon_scale: float = DEFAULT_EPSILON_SCALE) -> np.ndarray:
    """Add a small epsilon to every bin when any bin is zero.

    The epsilon is ``epsilon_scale * max(1, total / d)`` so it tracks the
    mass scale of the histogram.  Histograms without empty bins pass
    through unchanged; negative bins are rejected.
    """
    arr = _as_bins(values)
    if np.any(arr < 0.0):
        raise ValidationError("histogram bins must be non-negative")
    if np.all(arr > 0.0):
        return arr
    epsilon = epsilon_scale * max(1.0, float(arr.sum()) / arr.size)
    return arr + epsilon


@dataclass(frozen=True, eq=False)
class Histogram:
    """A positive histogram: ``d`` strictly positive bin values."""

    bins: np.ndarray

    def __post_init__(self):
        arr = _as_bins(self.bins)
        if np.any(arr <= 0.0):
            raise ValidationError(
                "histogram bins must be strictly positive; smooth empty bins first "
                "(see smooth_bins)"
            )
        arr.flags.writeable = False
        object.__setattr__(self, "bins", arr)

    @property
    def d(self) -> int:
        return self.bins.size

    @property
    def total(self) -> float:
        """Cumulative sum of the bin values."""
        return float(self.bins.sum())

    def normalized(self) -> "FrequencyHistogram":
        return FrequencyHistogram(self.bins / self.bins.sum())


class FrequencyHistogram(Histogram):
    """A histogram on the probability simplex: bins sum to one.

    Inputs whose sum deviates from one by at most ``RENORMALIZE_ATOL`` are
    renormalized silently (serialization rounding); larger deviations are
    rejected as genuinely unnormalized data.
    """

    def __post_init__(self):
        super().__post_init__()
        total = float(self.bins.sum())
        defect = abs(total - 1.0)
        if defect > RENORMALIZE_ATOL:
            raise ValidationError(
                f"frequency histogram bins must sum to 1, got {total!r}"
            )
        if defect > SIMPLEX_ATOL:
            arr = self.bins / total
            arr.flags.writeable = False
            object.__setattr__(self, "bins", arr)


@dataclass(frozen=True, eq=False)
class WeightedHistogramSet:
    """``n`` histograms of common dimension with positive weights summing to one."""

    histograms: tuple[Histogram, ...]
    weights: np.ndarray

    def __post_init__(self):
        members = tuple(self.histograms)
        if len(members) < 1:
            raise ValidationError("a weighted histogram set needs at least one member")
        d = members[0].d
        for j, h in enumerate(members):
            if not isinstance(h, Histogram):
                raise ValidationError(f"member {j} is not a Histogram")
            if h.d != d:
                raise ValidationError(
                    f"member {j} has {h.d} bins, expected {d} (all members must share d)"
                )
        w = np.array(self.weights, dtype=np.float64)
        if w.shape != (len(members),):
            raise ValidationError(
                f"weights must have shape ({len(members)},), got {w.shape}"
            )
        if not np.all(np.isfinite(w)) or np.any(w <= 0.0):
            raise ValidationError("weights must be finite and strictly positive")
        total = float(w.sum())
        if abs(total - 1.0) > RENORMALIZE_ATOL:
            raise ValidationError(f"weights must sum to 1, got {total!r}")
        if abs(total - 1.0) > SIMPLEX_ATOL:
            w = w / total
        w.flags.writeable = False
        object.__setattr__(self, "histograms", members)
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_rows(cls, rows, weights=None, frequency: bool = False) -> "WeightedHistogramSet":
        """Build a set from an ``(n, d)`` array-like of bin rows.

        ``weights=None`` assigns uniform weights ``1/n``.  With
        ``frequency=True`` the rows are validated as simplex members.
        """
        matrix = np.asarray(rows, dtype=np.float64)
        if matrix.ndim != 2:
            raise ValidationError(f"rows must be two-dimensional, got shape {matrix.shape}")
        make = FrequencyHistogram if frequency else Histogram
        members = tuple(make(row) for row in matrix)
        if weights is None:
            weights = np.full(len(members), 1.0 / len(members))
        return cls(members, weights)

    @property
    def n(self) -> int:
        return len(self.histograms)

    @property
    def d(self) -> int:
        return self.histograms[0].d

    @cached_property
    def matrix(self) -> np.ndarray:
        """The members stacked into an ``(n, d)`` array."""
        m = np.vstack([h.bins for h in self.histograms])
        m.flags.writeable = False
        return m

    def is_frequency(self) -> bool:
        return all(isinstance(h, FrequencyHistogram) for h in self.histograms)

    def as_frequency(self) -> "WeightedHistogramSet":
        """Return the same set with every member validated on the simplex.

        Members whose sum is within ``RENORMALIZE_ATOL`` of one are
        accepted (and renormalized); anything else raises.
        """
        if self.is_frequency():
            return self
        members = tuple(
            h if isinstance(h, FrequencyHistogram) else FrequencyHistogram(h.bins)
            for h in self.histograms
        )
        return WeightedHistogramSet(members, self.weights)


def cumulative_sum(h: Histogram) -> float:
    """Total mass ``w_h`` of a histogram."""
    return h.total


def normalize(h: Histogram) -> FrequencyHistogram:
    """Project a positive histogram onto the simplex by dividing by its mass."""
    return h.normalized()


def weighted_arithmetic_mean(s: WeightedHistogramSet) -> Histogram:
    """Coordinate-wise weighted arithmetic mean of the members."""
    return Histogram(s.weights @ s.matrix)


def weighted_geometric_mean(s: WeightedHistogramSet) -> Histogram:
    """Coordinate-wise weighted geometric mean, accumulated in log domain.

    Log-domain accumulation avoids underflow in long products of sub-unit
    bins.
    """
    return Histogram(np.exp(s.weights @ np.log(s.matrix)))


def normalized_means(s: WeightedHistogramSet) -> tuple[FrequencyHistogram, FrequencyHistogram]:
    """Normalized weighted arithmetic and geometric means of a frequency set.

    The arithmetic mean of simplex members is already on the simplex; the
    geometric mean is renormalized onto it.
    """
    sf = s.as_frequency()
    arith = FrequencyHistogram(sf.weights @ sf.matrix)
    geom = weighted_geometric_mean(sf).normalized()
    return arith, geom
