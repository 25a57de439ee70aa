"""Search-space normalization, grids and sampling."""

import numpy as np
import pytest

from nrbo.errors import BudgetError, DomainError
from nrbo.space import Dimension, SearchSpace, unit_space


@pytest.fixture
def mixed_space():
    return SearchSpace(
        dims=(
            Dimension("rate", 1.0, 100.0, scale="log10"),
            Dimension("width", 0.0, 10.0),
        )
    )


class TestDimension:
    def test_rejects_inverted_bounds(self):
        with pytest.raises(DomainError):
            Dimension("bad", 2.0, 1.0)

    def test_log_scale_needs_positive_lower(self):
        with pytest.raises(DomainError):
            Dimension("bad", 0.0, 1.0, scale="log10")

    def test_unknown_scale(self):
        with pytest.raises(DomainError):
            Dimension("bad", 0.0, 1.0, scale="log2")


class TestNormalize:
    def test_linear_midpoint(self):
        space = SearchSpace(dims=(Dimension("x", 0.0, 10.0),))
        assert space.normalize(np.array([5.0]))[0] == pytest.approx(0.5)

    def test_log_midpoint(self):
        space = SearchSpace(dims=(Dimension("x", 1.0, 100.0, scale="log10"),))
        assert space.normalize(np.array([10.0]))[0] == pytest.approx(0.5)

    def test_lower_bound_maps_to_zero(self):
        space = SearchSpace(dims=(Dimension("x", 0.0, 10.0),))
        assert space.normalize(np.array([0.0]))[0] == 0.0

    def test_out_of_bounds_names_dimension(self, mixed_space):
        with pytest.raises(DomainError, match="width"):
            mixed_space.normalize(np.array([10.0, 11.0]))

    def test_wrong_length(self, mixed_space):
        with pytest.raises(DomainError):
            mixed_space.normalize(np.array([1.0]))


class TestDenormalize:
    def test_zero_gives_lower(self):
        space = SearchSpace(dims=(Dimension("x", 0.0, 10.0),))
        assert space.denormalize(np.array([0.0]))[0] == 0.0

    def test_one_gives_upper_log(self):
        space = SearchSpace(dims=(Dimension("x", 1.0, 100.0, scale="log10"),))
        assert space.denormalize(np.array([1.0]))[0] == pytest.approx(100.0)

    def test_round_trip_single_value(self):
        space = SearchSpace(dims=(Dimension("x", 0.0, 10.0),))
        raw = np.array([3.7])
        back = space.denormalize(space.normalize(raw))
        np.testing.assert_allclose(back, raw, rtol=1e-12)

    def test_round_trip_randomized(self, mixed_space):
        rng = np.random.default_rng(7)
        for _ in range(200):
            raw = np.array(
                [10.0 ** rng.uniform(0.0, 2.0), rng.uniform(0.0, 10.0)]
            )
            back = mixed_space.denormalize(mixed_space.normalize(raw))
            np.testing.assert_allclose(back, raw, rtol=1e-12)

    def test_normalized_coordinates_in_unit_cube(self, mixed_space):
        rng = np.random.default_rng(8)
        for _ in range(100):
            raw = np.array([10.0 ** rng.uniform(0.0, 2.0), rng.uniform(0.0, 10.0)])
            p = mixed_space.normalize(raw)
            assert np.all(p >= 0.0) and np.all(p <= 1.0)


class TestMeshgrid:
    def test_1d_three_points(self):
        grid = unit_space(1).meshgrid(3)
        np.testing.assert_array_equal(grid, [[0.0], [0.5], [1.0]])

    def test_2d_corners(self):
        grid = unit_space(2).meshgrid(2)
        expect = [[0, 0], [0, 1], [1, 0], [1, 1]]
        np.testing.assert_array_equal(grid, expect)

    def test_3d_counting_and_values(self):
        grid = unit_space(3).meshgrid(10)
        assert grid.shape == (1000, 3)
        allowed = np.linspace(0.0, 1.0, 10)
        for col in grid.T:
            assert np.all(np.isin(col, allowed))

    def test_last_axis_varies_fastest(self):
        grid = unit_space(2).meshgrid(3)
        # first three rows share the first coordinate
        assert np.all(grid[:3, 0] == 0.0)
        np.testing.assert_array_equal(grid[:3, 1], [0.0, 0.5, 1.0])

    def test_no_duplicates_and_endpoints(self):
        grid = unit_space(2).meshgrid(7)
        assert len(np.unique(grid, axis=0)) == len(grid)
        for axis in range(2):
            assert 0.0 in grid[:, axis] and 1.0 in grid[:, axis]

    def test_cap_exceeded(self):
        with pytest.raises(BudgetError, match="random"):
            unit_space(4).meshgrid(30, cap=100_000)

    def test_points_per_dim_minimum(self):
        with pytest.raises(DomainError):
            unit_space(1).meshgrid(1)


class TestSampleUniform:
    def test_deterministic_under_seed(self):
        space = unit_space(3)
        a = space.sample_uniform(5, rng_seed=123)
        b = space.sample_uniform(5, rng_seed=123)
        np.testing.assert_array_equal(a, b)

    def test_changes_under_different_seed(self):
        space = unit_space(3)
        a = space.sample_uniform(5, rng_seed=1)
        b = space.sample_uniform(5, rng_seed=2)
        assert not np.array_equal(a, b)

    def test_law_of_large_numbers(self):
        space = unit_space(1)
        pts = space.sample_uniform(10_000, rng_seed=0)
        assert abs(pts.mean() - 0.5) < 0.02

    def test_zero_count_rejected(self):
        with pytest.raises(DomainError):
            unit_space(1).sample_uniform(0, rng_seed=0)


def test_duplicate_names_rejected():
    with pytest.raises(DomainError):
        SearchSpace(dims=(Dimension("x", 0, 1), Dimension("x", 0, 2)))
