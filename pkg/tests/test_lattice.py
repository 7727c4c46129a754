import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from latrelay.errors import (
    DimensionMismatch,
    EnumerationBudgetExceeded,
    NotNested,
)
from latrelay.lattice import (
    ConstructionALattice,
    enumerate_codebook,
    integer_lattice,
    is_sublattice,
    mod_lattice,
    nearest_point,
    sample_uniform_voronoi,
    second_moment,
)
from conftest import brute_force_nearest, second_moment_quadrature


def _rand_lattice(rng, p=None, n=None):
    p = p or int(rng.choice([3, 5]))
    n = n or int(rng.choice([2, 3]))
    k = int(rng.integers(0, n + 1))
    rows = _rand_rows(rng, p, n, k)
    return ConstructionALattice(p, rows, gamma=float(rng.uniform(0.5, 2.0)), n=n)


def _rand_rows(rng, p, n, k):
    while True:
        rows = rng.integers(0, p, size=(k, n))
        lat = None
        try:
            lat = ConstructionALattice(p, rows, gamma=1.0, n=n)
        except ValueError:
            continue
        return lat.rows


class TestNearestPoint:
    def test_integer_lattice_rounding(self):
        lat = integer_lattice(2)
        assert np.allclose(nearest_point(lat, [0.6, -1.2]), [1.0, -1.0])

    def test_zero_is_fixed(self, small_lattice):
        assert np.allclose(nearest_point(small_lattice, np.zeros(2)), 0.0)

    def test_construction_a_example(self, small_lattice):
        got = nearest_point(small_lattice, [1.4, 0.9])
        want = brute_force_nearest(small_lattice, [1.4, 0.9])
        assert np.allclose(got, want, atol=1e-9)

    def test_matches_brute_force_many(self):
        rng = np.random.default_rng(2024)
        for _ in range(60):
            lat = _rand_lattice(rng)
            for _ in range(4):
                y = rng.uniform(-2 * lat.gamma * lat.p, 2 * lat.gamma * lat.p,
                                size=lat.n)
                got = lat.nearest(y)
                want = brute_force_nearest(lat, y)
                assert np.allclose(got, want, atol=1e-9), (lat.to_record(), y)

    def test_tie_break_lexicographic(self):
        # midpoint of a cell edge of Z^2: candidates (0,0) and (1,0)
        lat = integer_lattice(2)
        assert np.allclose(lat.nearest([0.5, 0.0]), [0.0, 0.0])
        assert np.allclose(lat.nearest([0.5, 0.5]), [0.0, 0.0])

    def test_dimension_mismatch(self, small_lattice):
        with pytest.raises(DimensionMismatch):
            small_lattice.nearest(np.zeros(3))

    def test_enumeration_budget(self):
        rng = np.random.default_rng(0)
        rows = _rand_rows(rng, 5, 4, 3)
        lat = ConstructionALattice(5, rows, gamma=1.0, n=4, enum_budget=10)
        with pytest.raises(EnumerationBudgetExceeded):
            lat.nearest(np.full(4, 0.3))


class TestModLattice:
    def test_integer_lattice(self):
        lat = integer_lattice(2)
        assert np.allclose(mod_lattice(lat, [0.6, -1.2]), [-0.4, -0.2])

    def test_lattice_point_maps_to_zero(self, small_lattice):
        t = small_lattice.gamma * np.array([4.0, 1.0])   # (1,1) + 3*(1,0)
        assert np.allclose(mod_lattice(small_lattice, t), 0.0, atol=1e-9)

    def test_consistency_with_nearest(self, small_lattice):
        y = np.array([1.4, 0.9])
        r = mod_lattice(small_lattice, y)
        assert np.allclose(r, y - brute_force_nearest(small_lattice, y),
                           atol=1e-9)

    @given(st.lists(st.floats(-8, 8), min_size=2, max_size=2),
           st.integers(0, 10_000))
    @settings(max_examples=60, deadline=None)
    def test_idempotent(self, coords, seed):
        rng = np.random.default_rng(seed)
        lat = _rand_lattice(rng, n=2)
        r = lat.mod(np.array(coords))
        assert np.allclose(lat.mod(r), r, atol=1e-9)

    @given(st.lists(st.floats(-8, 8), min_size=2, max_size=2),
           st.integers(0, 10_000))
    @settings(max_examples=60, deadline=None)
    def test_centro_symmetry(self, coords, seed):
        # Q(x) = 0 implies Q(-x) = 0 away from cell boundaries
        rng = np.random.default_rng(seed)
        lat = _rand_lattice(rng, n=2)
        r = lat.mod(np.array(coords))
        boundary = np.allclose(lat.mod(-r), -r, atol=1e-9)
        assert boundary or np.linalg.norm(lat.mod(-r) + r) < 1e-6


class TestVolumeAndConstruction:
    def test_volume_exact(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            lat = _rand_lattice(rng)
            assert lat.volume == pytest.approx(
                lat.gamma ** lat.n * lat.p ** (lat.n - lat.k), rel=1e-12)

    def test_rank_zero_is_scaled_pZn(self):
        lat = ConstructionALattice(3, np.zeros((0, 2), dtype=int),
                                   gamma=0.5, n=2)
        assert np.allclose(lat.nearest([1.6, -1.4]), [1.5, -1.5])

    def test_rank_n_is_scaled_Zn(self):
        lat = ConstructionALattice(3, np.eye(2, dtype=int), gamma=2.0, n=2)
        assert np.allclose(lat.nearest([2.9, -0.8]), [2.0, 0.0])

    def test_record_round_trip(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            lat = _rand_lattice(rng)
            back = ConstructionALattice.from_record(lat.to_record())
            assert back.p == lat.p and back.k == lat.k and back.n == lat.n
            assert back.gamma == pytest.approx(lat.gamma, rel=1e-12)
            assert np.array_equal(back.rows, lat.rows)


class TestSecondMoment:
    def test_unit_interval(self):
        lat = integer_lattice(1)
        est = second_moment(lat, 20_000, seed=1)
        se = (1 / 12) / np.sqrt(20_000)   # rough scale of the estimator sd
        assert abs(est - 1 / 12) < 3 * 4 * se

    def test_scaling(self):
        g = 1.7
        est = second_moment(integer_lattice(1, gamma=g), 20_000, seed=1)
        assert est == pytest.approx(g * g / 12, rel=0.05)

    def test_against_grid_quadrature(self, small_lattice):
        mc = second_moment(small_lattice, 40_000, seed=3)
        quad = second_moment_quadrature(small_lattice, grid=140)
        assert mc == pytest.approx(quad, rel=0.05)

    def test_cubic_cell_exact(self):
        lat = ConstructionALattice(3, np.zeros((0, 2), dtype=int),
                                   gamma=1.0, n=2)
        assert lat.second_moment_exact() == pytest.approx(9 / 12, rel=1e-12)
        assert second_moment(lat, 30_000, seed=7) == pytest.approx(
            9 / 12, rel=0.05)


class TestIsSublattice:
    def test_pZn_inside_every_construction_a(self):
        rng = np.random.default_rng(21)
        for _ in range(10):
            lat = _rand_lattice(rng)
            coarse = ConstructionALattice(lat.p, np.zeros((0, lat.n), dtype=int),
                                          gamma=lat.gamma, n=lat.n)
            assert is_sublattice(coarse, lat)

    def test_direction_matters(self):
        fine = integer_lattice(2)
        coarse = integer_lattice(2, gamma=2.0)
        assert is_sublattice(coarse, fine)
        assert not is_sublattice(fine, coarse)

    def test_prefix_rows_nested_and_oracle(self):
        p, n = 3, 2
        rows = np.array([[1, 2], [0, 1]])
        fine = ConstructionALattice(p, rows, gamma=1.0, n=n)
        coarse = ConstructionALattice(p, rows[:1], gamma=1.0, n=n)
        assert is_sublattice(coarse, fine)
        # oracle: every coarse point in a box is a fine point
        for c in range(p):
            for m in itertools.product(range(-2, 3), repeat=n):
                pt = (c * rows[0]) % p + p * np.array(m)
                assert np.allclose(fine.nearest(pt.astype(float)), pt,
                                   atol=1e-9)


class TestVoronoiSampling:
    def test_integer_lattice_is_uniform_box(self):
        rng = np.random.default_rng(4)
        lat = integer_lattice(2)
        pts = np.array([sample_uniform_voronoi(lat, rng) for _ in range(2000)])
        assert np.all(np.abs(pts) <= 0.5 + 1e-12)
        assert np.max(np.abs(pts.mean(axis=0))) < 4 * 0.29 / np.sqrt(2000)

    def test_acceptance_condition(self):
        rng = np.random.default_rng(9)
        for _ in range(8):
            lat = _rand_lattice(rng, n=2)
            for _ in range(50):
                u = sample_uniform_voronoi(lat, rng)
                assert np.allclose(lat.nearest(u), 0.0, atol=1e-9)

    def test_mean_zero(self, small_lattice):
        rng = np.random.default_rng(17)
        pts = np.array([sample_uniform_voronoi(small_lattice, rng)
                        for _ in range(20_000)])
        sd = np.sqrt(small_lattice.second_moment_exact()
                     or second_moment(small_lattice, 5000, 0))
        assert np.max(np.abs(pts.mean(axis=0))) < 4 * sd / np.sqrt(20_000)


class TestEnumerateCodebook:
    def test_identical_pair_single_entry(self, small_lattice):
        entries = enumerate_codebook(small_lattice, small_lattice)
        assert len(entries) == 1
        assert np.allclose(entries[0].t, 0.0)

    def test_pZn_in_Zn_counts(self):
        coarse = integer_lattice(2, gamma=3.0)
        fine = integer_lattice(2)
        entries = enumerate_codebook(coarse, fine)
        assert len(entries) == 9

    def test_p3_chain_three_entries(self, small_lattice):
        coarse = small_lattice.with_rank(0)
        entries = enumerate_codebook(coarse, small_lattice)
        assert len(entries) == 3
        rate = np.log2(len(entries)) / 2
        assert rate == pytest.approx(0.5 * np.log2(3), rel=1e-12)

    def test_entries_in_coarse_cell_and_bijective(self):
        rng = np.random.default_rng(31)
        for _ in range(10):
            fine = _rand_lattice(rng, n=2)
            coarse = fine.with_rank(0)
            entries = enumerate_codebook(coarse, fine)
            assert len(entries) == fine.p ** fine.k
            seen = set()
            for e in entries:
                assert np.allclose(coarse.nearest(e.t), 0.0, atol=1e-9)
                seen.add(tuple(np.round(e.t / fine.gamma, 9)))
            assert len(seen) == len(entries)
            assert [e.w for e in entries] == list(range(1, len(entries) + 1))

    def test_not_nested_raises(self):
        with pytest.raises(NotNested):
            enumerate_codebook(integer_lattice(2), integer_lattice(2, gamma=2.0))
