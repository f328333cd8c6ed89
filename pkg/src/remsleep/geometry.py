"""
Point geometry and the point-set distances used to match a live set of UE positions against REM entry tags.

All metrics accept sets of different cardinality and are computed from the full |a|x|b| distance matrix. At the
scale we care about (tens of UEs) a brute-force scan is both the reference algorithm and fast enough.
"""
import enum
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, List, Sequence, Union

import numpy as np
from scipy.spatial.distance import cdist


@dataclass(frozen=True)
class Position:
    """A point in the simulation plane, in meters."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"Position coordinates must be finite, got ({self.x}, {self.y})")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=np.float64)


class PositionSet:
    """
    An unordered, non-empty collection of 2-D positions backed by a read-only ``(n, 2)`` float64 array.

    Order carries no meaning for any metric, but it is preserved so that callers can line positions up with the UEs
    they came from.
    """

    __slots__ = ("_points",)

    def __init__(self, points: Union["PositionSet", np.ndarray, Sequence[Sequence[float]], Sequence[Position]]):
        if isinstance(points, PositionSet):
            arr = points._points
        elif len(points) > 0 and isinstance(points[0], Position):  # type: ignore[index]
            arr = np.stack([p.as_array() for p in points])  # type: ignore[union-attr]
        else:
            arr = np.array(points, dtype=np.float64)

        if arr.size == 0:
            raise ValueError("PositionSet must contain at least one position")
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError(f"PositionSet needs an (n, 2) array of coordinates, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("PositionSet coordinates must be finite")

        if arr.flags.writeable:
            arr.setflags(write=False)
        self._points = arr

    @property
    def points(self) -> np.ndarray:
        return self._points

    def __len__(self) -> int:
        return self._points.shape[0]

    def __iter__(self) -> Iterator[Position]:
        for x, y in self._points:
            yield Position(float(x), float(y))

    def __eq__(self, other) -> bool:
        if not isinstance(other, PositionSet):
            return NotImplemented
        return np.array_equal(self._points, other._points)

    def __hash__(self):
        return hash(self._points.tobytes())

    def __repr__(self):
        return f"PositionSet(n={len(self)}, centroid=({self.centroid()[0]:.2f}, {self.centroid()[1]:.2f}))"

    def centroid(self) -> np.ndarray:
        return self._points.mean(axis=0)

    def translate(self, dx: float, dy: float) -> "PositionSet":
        return PositionSet(self._points + np.array([dx, dy]))

    def subset(self, indices: Iterable[int]) -> "PositionSet":
        return PositionSet(self._points[np.asarray(list(indices), dtype=np.int64)])

    def to_list(self) -> List[List[float]]:
        return [[float(x), float(y)] for x, y in self._points]

    @staticmethod
    def from_list(raw: Sequence[Sequence[float]]) -> "PositionSet":
        return PositionSet(np.asarray(raw, dtype=np.float64))


class MetricKind(str, enum.Enum):
    HAUSDORFF = "hausdorff"
    MEAN = "mean"
    AVERAGE = "average"
    SUM_OF_MINIMUMS = "som"

    @staticmethod
    def parse(name: Union[str, "MetricKind"]) -> "MetricKind":
        """Accepts enum values, enum names, and a few common aliases, case-insensitively."""
        if isinstance(name, MetricKind):
            return name
        key = name.strip().lower().replace("-", "_")
        try:
            return _METRIC_ALIASES[key]
        except KeyError:
            valid = ", ".join(sorted(_METRIC_ALIASES))
            raise ValueError(f"Unknown distance metric {name!r}. Valid names: {valid}") from None


_METRIC_ALIASES = {
    "hausdorff": MetricKind.HAUSDORFF,
    "hd": MetricKind.HAUSDORFF,
    "mean": MetricKind.MEAN,
    "mean_distance": MetricKind.MEAN,
    "average": MetricKind.AVERAGE,
    "avg": MetricKind.AVERAGE,
    "average_distance": MetricKind.AVERAGE,
    "som": MetricKind.SUM_OF_MINIMUMS,
    "sum_of_minimums": MetricKind.SUM_OF_MINIMUMS,
}


PositionSetLike = Union[PositionSet, np.ndarray, Sequence[Sequence[float]]]


def _as_set(points: PositionSetLike) -> PositionSet:
    if isinstance(points, PositionSet):
        return points
    return PositionSet(points)


def euclidean(a: Position, b: Position) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def pairwise_distances(a: PositionSetLike, b: PositionSetLike) -> np.ndarray:
    """Returns the ``(|a|, |b|)`` matrix of Euclidean distances."""
    return cdist(_as_set(a).points, _as_set(b).points, metric="euclidean")


def directed_hausdorff(a: PositionSetLike, b: PositionSetLike) -> float:
    """max over points of ``a`` of the distance to the nearest point of ``b``"""
    return float(pairwise_distances(a, b).min(axis=1).max())


def hausdorff(a: PositionSetLike, b: PositionSetLike) -> float:
    d = pairwise_distances(a, b)
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def mean_distance(a: PositionSetLike, b: PositionSetLike) -> float:
    """Distance between the centroids of the two sets."""
    ca = _as_set(a).centroid()
    cb = _as_set(b).centroid()
    return float(math.hypot(*(ca - cb)))


def average_distance(a: PositionSetLike, b: PositionSetLike) -> float:
    """
    Mean of all pairwise distances. Unlike the other metrics this is not zero when a set is compared with itself.
    """
    return float(pairwise_distances(a, b).mean())


def sum_of_minimums(a: PositionSetLike, b: PositionSetLike) -> float:
    """
    Average of the two directed mean nearest-neighbor distances. Behaves like Hausdorff with the max replaced by a
    mean, so a single outlying UE moves it by at most its own share.
    """
    d = pairwise_distances(a, b)
    return float(0.5 * (d.min(axis=1).mean() + d.min(axis=0).mean()))


_METRICS = {
    MetricKind.HAUSDORFF: hausdorff,
    MetricKind.MEAN: mean_distance,
    MetricKind.AVERAGE: average_distance,
    MetricKind.SUM_OF_MINIMUMS: sum_of_minimums,
}


def set_distance(kind: Union[MetricKind, str], a: PositionSetLike, b: PositionSetLike) -> float:
    return _METRICS[MetricKind.parse(kind)](a, b)
