import math

import numpy as np
import pytest

from remsleep.geometry import (
    MetricKind,
    Position,
    PositionSet,
    average_distance,
    directed_hausdorff,
    euclidean,
    hausdorff,
    mean_distance,
    set_distance,
    sum_of_minimums,
)


TWO_A = PositionSet([[0, 0], [10, 0]])
TWO_B = PositionSet([[0, 0], [0, 10]])


def test_euclidean():
    assert euclidean(Position(0, 0), Position(0, 0)) == 0
    assert euclidean(Position(0, 0), Position(3, 4)) == 5
    assert euclidean(Position(1, 1), Position(4, 5)) == 5


def test_position_rejects_non_finite():
    with pytest.raises(ValueError):
        Position(math.nan, 0.0)
    with pytest.raises(ValueError):
        Position(0.0, math.inf)


def test_position_set_rejects_empty_and_bad_shapes():
    with pytest.raises(ValueError):
        PositionSet([])
    with pytest.raises(ValueError):
        PositionSet(np.zeros((3, 3)))
    with pytest.raises(ValueError):
        PositionSet([[0.0, math.nan]])


def test_position_set_is_read_only():
    s = PositionSet(np.array([[1.0, 2.0]]))
    with pytest.raises(ValueError):
        s.points[0, 0] = 5.0


def test_position_set_accepts_positions():
    s = PositionSet([Position(1, 2), Position(3, 4)])
    assert s.to_list() == [[1.0, 2.0], [3.0, 4.0]]
    assert list(s) == [Position(1, 2), Position(3, 4)]
    np.testing.assert_array_equal(s.points[1], Position(3, 4).as_array())
    assert Position(3, 4).as_array().dtype == np.float64


def test_worked_examples():
    assert directed_hausdorff(TWO_A, TWO_B) == pytest.approx(10, abs=1e-12)
    assert hausdorff(TWO_A, TWO_B) == pytest.approx(10, abs=1e-12)
    assert mean_distance(TWO_A, TWO_B) == pytest.approx(math.sqrt(50), abs=1e-12)
    assert average_distance(TWO_A, TWO_B) == pytest.approx((0 + 10 + 10 + math.sqrt(200)) / 4, abs=1e-12)
    assert average_distance(TWO_A, TWO_B) == pytest.approx(8.5355, abs=1e-4)
    assert sum_of_minimums(TWO_A, TWO_B) == pytest.approx(5, abs=1e-12)


def test_unequal_cardinalities():
    single = PositionSet([[0, 0]])
    pair = PositionSet([[0, 0], [0, 2]])
    assert directed_hausdorff(single, pair) == 0
    assert directed_hausdorff(pair, single) == 2
    assert hausdorff(single, pair) == 2
    assert sum_of_minimums(single, pair) == pytest.approx(0.5, abs=1e-12)
    assert mean_distance(PositionSet([[0, 0], [2, 0]]), PositionSet([[1, 0]])) == 0


def test_subset_has_zero_directed_hausdorff():
    b = PositionSet([[0, 0], [5, 5], [7, 1]])
    assert directed_hausdorff(b.subset([0, 2]), b) == 0


def test_singletons():
    a = PositionSet([[0, 0]])
    b = PositionSet([[3, 4]])
    assert directed_hausdorff(a, b) == 5
    assert set_distance(MetricKind.SUM_OF_MINIMUMS, a, b) == 5
    assert set_distance(MetricKind.AVERAGE, a, b) == 5
    assert set_distance("hausdorff", a, a) == 0


def test_average_distance_of_a_set_with_itself_is_not_zero():
    assert average_distance(TWO_A, TWO_A) == 5


def test_metric_kind_parse():
    assert MetricKind.parse("SoM") is MetricKind.SUM_OF_MINIMUMS
    assert MetricKind.parse("sum-of-minimums") is MetricKind.SUM_OF_MINIMUMS
    assert MetricKind.parse("avg") is MetricKind.AVERAGE
    assert MetricKind.parse(MetricKind.MEAN) is MetricKind.MEAN
    with pytest.raises(ValueError, match="Unknown distance metric"):
        MetricKind.parse("chamfer")


def _naive(kind: MetricKind, a: np.ndarray, b: np.ndarray) -> float:
    def d(p, q):
        return math.sqrt((p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2)

    if kind == MetricKind.HAUSDORFF:
        ab = max(min(d(p, q) for q in b) for p in a)
        ba = max(min(d(q, p) for p in a) for q in b)
        return max(ab, ba)
    if kind == MetricKind.MEAN:
        ca = (sum(p[0] for p in a) / len(a), sum(p[1] for p in a) / len(a))
        cb = (sum(q[0] for q in b) / len(b), sum(q[1] for q in b) / len(b))
        return d(ca, cb)
    if kind == MetricKind.AVERAGE:
        return sum(d(p, q) for p in a for q in b) / (len(a) * len(b))
    ab = sum(min(d(p, q) for q in b) for p in a) / len(a)
    ba = sum(min(d(q, p) for p in a) for q in b) / len(b)
    return 0.5 * (ab + ba)


def _random_pair(rng, max_size=60, scale=1000.0):
    a = rng.uniform(0, scale, size=(int(rng.integers(1, max_size + 1)), 2))
    b = rng.uniform(0, scale, size=(int(rng.integers(1, max_size + 1)), 2))
    return a, b


def test_metrics_match_naive_reference():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        a, b = _random_pair(rng)
        kind = list(MetricKind)[int(rng.integers(len(MetricKind)))]
        expected = _naive(kind, a, b)
        assert set_distance(kind, a, b) == pytest.approx(expected, rel=1e-9, abs=1e-9)


@pytest.mark.parametrize("kind", list(MetricKind))
def test_metric_properties(kind):
    rng = np.random.default_rng(1)
    for _ in range(1000):
        a, b = _random_pair(rng, max_size=20)
        ab = set_distance(kind, a, b)
        assert ab >= 0
        assert ab == pytest.approx(set_distance(kind, b, a), rel=1e-9, abs=1e-9)

        dx, dy = rng.uniform(-500, 500, size=2)
        moved_a, moved_b = PositionSet(a).translate(dx, dy), PositionSet(b).translate(dx, dy)
        np.testing.assert_allclose(moved_a.centroid(), a.mean(axis=0) + [dx, dy])
        assert set_distance(kind, moved_a, moved_b) == pytest.approx(ab, rel=1e-9, abs=1e-7)


def test_identity_of_indiscernibles():
    rng = np.random.default_rng(2)
    for _ in range(100):
        a = rng.uniform(0, 100, size=(int(rng.integers(2, 30)), 2))
        assert hausdorff(a, a) == 0
        assert sum_of_minimums(a, a) == 0
        assert mean_distance(a, a) == 0
        assert average_distance(a, a) > 0


def test_hausdorff_dominates_sum_of_minimums():
    rng = np.random.default_rng(3)
    for _ in range(1000):
        a, b = _random_pair(rng, max_size=20)
        assert hausdorff(a, b) >= sum_of_minimums(a, b) - 1e-12


def test_single_outlier_moves_hausdorff_far_more_than_sum_of_minimums():
    rng = np.random.default_rng(4)
    a = rng.uniform(0, 100, size=(40, 2))
    b = a + rng.normal(0, 0.5, size=a.shape)
    delta = 1000.0
    moved = b.copy()
    moved[0, 0] += delta

    som_change = abs(sum_of_minimums(a, moved) - sum_of_minimums(a, b))
    hd_change = abs(hausdorff(a, moved) - hausdorff(a, b))
    assert som_change <= delta * (1 / (2 * 40) + 1 / 2)
    assert hd_change > 0.8 * delta
    assert som_change < 0.1 * hd_change
