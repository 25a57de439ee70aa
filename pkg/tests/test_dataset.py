"""Neighbor smoothing and counting against brute-force oracles."""

import math

import numpy as np
import pytest

from nrbo.dataset import (
    ObservationSet,
    Trial,
    best_raw,
    neighbor_count,
    neighbor_filter,
    smooth,
)
from nrbo.errors import DomainError, StateError


def _make_obs(points, values, iterations=None):
    n = len(values)
    iterations = iterations or [0] * n
    return ObservationSet(
        Trial(point=np.asarray(points[i], dtype=float), raw_value=values[i],
              iteration=iterations[i])
        for i in range(n)
    )


def _smooth_oracle(points, values, radius):
    """O(n^2) pairwise-distance reference for the smoothing operation.

    Uses math.fsum so the neighbor mean is the exactly rounded sum divided
    by the count, independent of accumulation order.
    """
    points = np.asarray(points, dtype=float)
    values = np.asarray(values, dtype=float)
    out = np.empty_like(values)
    for j in range(len(points)):
        members = [
            values[k]
            for k in range(len(points))
            if np.linalg.norm(points[j] - points[k]) <= radius
        ]
        out[j] = math.fsum(members) / len(members)
    return out


def _count_oracle(points, query, radius):
    return sum(
        1 for p in points if np.linalg.norm(np.asarray(p) - query) <= radius
    )


class TestNeighborFilter:
    def test_self_is_neighbor_at_any_radius(self):
        p = np.array([0.3, 0.4])
        assert neighbor_filter(p, p, 0.0) == 1

    def test_345_triangle_boundary_inclusive(self):
        a = np.array([0.0, 0.0])
        b = np.array([0.3, 0.4])
        assert neighbor_filter(a, b, 0.5) == 1

    def test_just_inside_radius_excluded(self):
        a = np.array([0.0, 0.0])
        b = np.array([0.3, 0.4])
        assert neighbor_filter(a, b, 0.49) == 0

    def test_dimension_mismatch(self):
        with pytest.raises(DomainError):
            neighbor_filter(np.array([0.1]), np.array([0.1, 0.2]), 1.0)

    def test_negative_radius(self):
        with pytest.raises(DomainError):
            neighbor_filter(np.array([0.1]), np.array([0.1]), -0.1)


class TestSmooth:
    def test_single_trial_self_only(self):
        obs = _make_obs([[0.5, 0.5]], [7.0])
        for radius in (0.0, 0.3, 10.0):
            np.testing.assert_array_equal(smooth(obs, radius).values, [7.0])

    def test_coincident_points_average(self):
        obs = _make_obs([[0.2, 0.2], [0.2, 0.2]], [0.0, 2.0])
        np.testing.assert_array_equal(smooth(obs, 0.1).values, [1.0, 1.0])

    def test_matches_bruteforce_oracle_exactly(self):
        rng = np.random.default_rng(11)
        points = rng.random((5, 2))
        values = rng.standard_normal(5)
        got = smooth(_make_obs(points, values), 0.3).values
        np.testing.assert_array_equal(got, _smooth_oracle(points, values, 0.3))

    def test_oracle_on_larger_random_sets(self):
        rng = np.random.default_rng(12)
        for trial in range(10):
            n = int(rng.integers(2, 40))
            d = int(rng.integers(1, 4))
            points = rng.random((n, d))
            values = rng.standard_normal(n)
            radius = float(rng.uniform(0.0, 0.6))
            got = smooth(_make_obs(points, values), radius).values
            np.testing.assert_array_equal(got, _smooth_oracle(points, values, radius))

    def test_shift_equivariance(self):
        rng = np.random.default_rng(13)
        points = rng.random((20, 2))
        values = rng.standard_normal(20)
        base = smooth(_make_obs(points, values), 0.25).values
        shifted = smooth(_make_obs(points, values + 5.5), 0.25).values
        np.testing.assert_allclose(shifted, base + 5.5, rtol=0, atol=1e-12)

    def test_weighted_average_bounds(self):
        rng = np.random.default_rng(14)
        points = rng.random((30, 2))
        values = rng.standard_normal(30)
        smoothed = smooth(_make_obs(points, values), 0.2).values
        assert np.all(smoothed >= values.min()) and np.all(smoothed <= values.max())

    def test_radius_zero_is_identity_on_distinct_points(self):
        rng = np.random.default_rng(15)
        points = rng.random((25, 3))
        values = rng.standard_normal(25)
        np.testing.assert_array_equal(
            smooth(_make_obs(points, values), 0.0).values, values
        )

    def test_variance_reduction_on_iid_noise(self):
        # y = const + noise; smoothing averages neighbors so the sample
        # variance should not grow. Checked over many seeds statistically.
        wins = 0
        for seed in range(20):
            rng = np.random.default_rng(seed)
            points = rng.random((60, 2))
            values = 3.0 + rng.standard_normal(60)
            smoothed = smooth(_make_obs(points, values), 0.15).values
            if smoothed.var() <= values.var():
                wins += 1
        assert wins >= 18

    def test_empty_set_rejected(self):
        with pytest.raises(StateError):
            smooth(ObservationSet(), 0.1)

    def test_preserves_point_order(self):
        rng = np.random.default_rng(16)
        points = rng.random((10, 2))
        values = rng.standard_normal(10)
        out = smooth(_make_obs(points, values), 0.2)
        np.testing.assert_array_equal(out.points, points)


class TestNeighborCount:
    def test_empty_set(self):
        assert neighbor_count(ObservationSet(), np.array([0.5, 0.5]), 0.3) == 0

    def test_far_query(self):
        obs = _make_obs([[0.0, 0.0], [0.1, 0.0]], [1.0, 2.0])
        assert neighbor_count(obs, np.array([0.9, 0.9]), 0.2) == 0

    def test_query_on_stored_trial_counts_it(self):
        obs = _make_obs([[0.4, 0.4]], [1.0])
        assert neighbor_count(obs, np.array([0.4, 0.4]), 0.0) == 1

    def test_matches_linear_scan_oracle(self):
        rng = np.random.default_rng(17)
        points = rng.random((20, 2))
        obs = _make_obs(points, rng.standard_normal(20))
        for _ in range(10):
            query = rng.random(2)
            assert neighbor_count(obs, query, 0.25) == _count_oracle(points, query, 0.25)

    def test_monotone_in_radius(self):
        rng = np.random.default_rng(18)
        points = rng.random((30, 2))
        obs = _make_obs(points, rng.standard_normal(30))
        query = rng.random(2)
        counts = [neighbor_count(obs, query, r) for r in np.linspace(0, 1.5, 25)]
        assert all(a <= b for a, b in zip(counts, counts[1:]))


class TestBestRaw:
    def test_minimum_wins(self):
        obs = _make_obs([[0.1], [0.2], [0.3]], [3.0, 1.0, 2.0])
        assert best_raw(obs).raw_value == 1.0

    def test_tie_goes_to_earlier_trial(self):
        obs = _make_obs([[0.1], [0.2]], [2.0, 2.0], iterations=[0, 1])
        assert best_raw(obs).iteration == 0

    def test_matches_scan_oracle(self):
        rng = np.random.default_rng(19)
        values = rng.standard_normal(100).tolist()
        points = rng.random((100, 2))
        obs = _make_obs(points, values)
        assert best_raw(obs).raw_value == min(values)

    def test_empty_rejected(self):
        with pytest.raises(StateError):
            best_raw(ObservationSet())


class TestObservationSet:
    def test_iteration_order_enforced(self):
        obs = _make_obs([[0.1]], [1.0], iterations=[3])
        with pytest.raises(DomainError):
            obs.append(Trial(point=np.array([0.2]), raw_value=1.0, iteration=2))

    def test_nonfinite_value_rejected(self):
        with pytest.raises(DomainError):
            Trial(point=np.array([0.1]), raw_value=float("nan"), iteration=0)
