"""Finite unions of closed intervals on the real line."""
import dataclasses
import math
from typing import Iterable, Iterator, List, Sequence, Tuple

import numpy as np

from aperiodic_spectra import errors

Interval = Tuple[float, float]


def _normalize(intervals: Iterable[Sequence[float]]) -> Tuple[Interval, ...]:
    """Sort the intervals and merge the ones that overlap or touch."""
    ordered = sorted((float(left), float(right)) for left, right in intervals)
    merged: List[Interval] = []
    for left, right in ordered:
        if right < left or math.isnan(left) or math.isnan(right):
            raise errors.PreconditionError(f"[{left}, {right}] is not an interval")
        if merged and left <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], right))
        else:
            merged.append((left, right))
    return tuple(merged)


@dataclasses.dataclass(frozen=True)
class IntervalUnion:
    """Sorted, pairwise disjoint closed intervals.

    Construct through :meth:`from_intervals`, which normalizes its
    input; normalizing a normalized union changes nothing.

    Example:
        >>> IntervalUnion.from_intervals([(2, 3), (0, 1), (0.5, 1.5)]).intervals
        ((0.0, 1.5), (2.0, 3.0))
    """

    intervals: Tuple[Interval, ...] = ()

    @classmethod
    def from_intervals(cls, intervals: Iterable[Sequence[float]]) -> "IntervalUnion":
        """Normalize arbitrary closed intervals into a union."""
        return cls(_normalize(intervals))

    def __iter__(self) -> Iterator[Interval]:
        """Iterate over the intervals in increasing order."""
        return iter(self.intervals)

    def __len__(self) -> int:
        """The number of connected components."""
        return len(self.intervals)

    def __bool__(self) -> bool:
        """Whether the union is nonempty."""
        return bool(self.intervals)

    def measure(self) -> float:
        """The total length."""
        return math.fsum(right - left for left, right in self.intervals)

    def widths(self) -> List[float]:
        """The length of every component."""
        return [right - left for left, right in self.intervals]

    def contains(self, point: float) -> bool:
        """Whether ``point`` lies in the union."""
        return any(left <= point <= right for left, right in self.intervals)

    def distance_to(self, point: float) -> float:
        """The distance from ``point`` to the union."""
        if not self.intervals:
            return math.inf
        return min(
            max(left - point, 0.0, point - right) for left, right in self.intervals
        )

    def intersection(self, other: "IntervalUnion") -> "IntervalUnion":
        """The points in both unions."""
        result: List[Interval] = []
        i = j = 0
        while i < len(self.intervals) and j < len(other.intervals):
            left = max(self.intervals[i][0], other.intervals[j][0])
            right = min(self.intervals[i][1], other.intervals[j][1])
            if left <= right:
                result.append((left, right))
            if self.intervals[i][1] < other.intervals[j][1]:
                i += 1
            else:
                j += 1
        return IntervalUnion.from_intervals(result)

    def union(self, other: "IntervalUnion") -> "IntervalUnion":
        """The points in either union."""
        return IntervalUnion.from_intervals(self.intervals + other.intervals)

    def intersects(self, other: "IntervalUnion") -> bool:
        """Whether the unions share a point."""
        return bool(self.intersection(other))

    def _gap_midpoints(self) -> List[float]:
        """The midpoints of the gaps between consecutive components."""
        return [
            0.5 * (right + left)
            for (_, right), (left, _) in zip(self.intervals, self.intervals[1:])
        ]

    def _directed_hausdorff(self, other: "IntervalUnion") -> float:
        """``sup`` over this union of the distance to ``other``."""
        candidates = [point for interval in self.intervals for point in interval]
        candidates += [
            point for point in other._gap_midpoints() if self.contains(point)
        ]
        return max(other.distance_to(point) for point in candidates)

    def hausdorff_distance(self, other: "IntervalUnion") -> float:
        """The Hausdorff distance between the two unions.

        The distance to a union of intervals is piecewise linear, so it
        peaks at an endpoint or at the midpoint of a gap.
        """
        if not self.intervals and not other.intervals:
            return 0.0
        if not self.intervals or not other.intervals:
            return math.inf
        return max(self._directed_hausdorff(other), other._directed_hausdorff(self))

    def symmetric_difference_measure(self, other: "IntervalUnion") -> float:
        """The length of the points in exactly one of the unions."""
        shared = self.intersection(other).measure()
        return max(self.measure() + other.measure() - 2.0 * shared, 0.0)

    def as_lists(self) -> List[List[float]]:
        """The intervals as ``[[l, r], ...]`` for export."""
        return [[left, right] for left, right in self.intervals]


def from_points(points: Sequence[float], radius: float) -> IntervalUnion:
    """The union of the closed balls of ``radius`` around ``points``."""
    centers = np.asarray(points, dtype=np.float64)
    return IntervalUnion.from_intervals(zip(centers - radius, centers + radius))
