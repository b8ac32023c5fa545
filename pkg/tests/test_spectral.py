from __future__ import annotations

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from hrvkit import (
    AllZeroLevelError,
    BadBandwidthError,
    KTooLargeError,
    NoMassError,
    NotInSimplexError,
    SampleMatrix,
    SpectralAtoms,
    TransformedAtoms,
    density_estimate,
    estimate_spectral_rank,
    estimate_spectral_standard,
    phi,
    transform_T,
    transform_T_inverse,
    transform_measure,
)

from oracles import oracle_spectral_rank, oracle_spectral_standard


def _random_atoms(rng, level=None, d=None, m=None) -> SpectralAtoms:
    d = d or int(rng.integers(2, 5))
    level = level or int(rng.integers(1, d + 1))
    m = m or int(rng.integers(1, 9))
    raw = rng.uniform(0.01, 5.0, size=(m, d))
    idx = d - level
    pts = raw / np.partition(raw, idx, axis=1)[:, idx][:, None]
    w = rng.uniform(0.1, 1.0, m)
    return SpectralAtoms(level=level, points=pts, weights=w / w.sum())


class TestStandardEstimator:
    def test_worked_example(self):
        sm = SampleMatrix(np.array([[4.0, 2.0], [2.0, 1.0], [1.0, 4.0], [0.5, 0.2]]))
        atoms = estimate_spectral_standard(sm, 2, 2)
        # threshold is 1 (second largest of the per-row minima), rows 1-3 kept
        assert_array_equal(atoms.points, [[2.0, 1.0], [2.0, 1.0], [1.0, 4.0]])
        assert_allclose(atoms.weights, [1 / 3] * 3)

    def test_single_row(self):
        sm = SampleMatrix(np.array([[3.0, 7.0]]))
        atoms = estimate_spectral_standard(sm, 2, 1)
        assert_array_equal(atoms.points, [[1.0, 7.0 / 3.0]])
        assert_array_equal(atoms.weights, [1.0])

    def test_identical_rows_single_location(self):
        sm = SampleMatrix(np.tile([2.0, 6.0], (5, 1)))
        atoms = estimate_spectral_standard(sm, 1, 2)
        assert np.unique(atoms.points, axis=0).shape[0] == 1
        assert_allclose(atoms.weights.sum(), 1.0)

    def test_level_component_exactly_one(self, rng):
        sm = SampleMatrix(rng.pareto(1.0, (200, 3)) + 1.0)
        for level in (1, 2, 3):
            atoms = estimate_spectral_standard(sm, level, 50)
            lth = np.partition(atoms.points, 3 - level, axis=1)[:, 3 - level]
            assert (lth == 1.0).all()

    def test_scale_invariance(self, rng):
        z = rng.pareto(1.0, (100, 2)) + 1.0
        a = estimate_spectral_standard(SampleMatrix(z), 2, 20)
        exact = estimate_spectral_standard(SampleMatrix(128.0 * z), 2, 20)
        assert_array_equal(a.points, exact.points)  # power-of-two scaling is lossless
        assert_array_equal(a.weights, exact.weights)
        close = estimate_spectral_standard(SampleMatrix(123.5 * z), 2, 20)
        assert_allclose(close.points, a.points, rtol=1e-12)
        assert_allclose(close.weights, a.weights, rtol=1e-12)

    def test_all_zero_level(self):
        sm = SampleMatrix(np.array([[1.0, 0.0], [0.5, 0.0], [2.0, 3.0]]))
        with pytest.raises(AllZeroLevelError):
            estimate_spectral_standard(sm, 2, 2)

    def test_k_too_large(self, small_matrix):
        with pytest.raises(KTooLargeError):
            estimate_spectral_standard(small_matrix, 2, 4)

    def test_matches_oracle(self, rng):
        z = rng.integers(1, 12, size=(15, 3)).astype(float)
        sm = SampleMatrix(z)
        atoms = estimate_spectral_standard(sm, 2, 5)
        pts, w = oracle_spectral_standard(z, 2, 5)
        assert_array_equal(atoms.points, pts)
        assert_allclose(atoms.weights, w)


class TestRankEstimator:
    def test_worked_example_k1(self, small_matrix):
        atoms = estimate_spectral_rank(small_matrix, 2, 1)
        assert_array_equal(atoms.points, [[1.0, 1.0]])
        assert_array_equal(atoms.weights, [1.0])

    def test_worked_example_k2(self, small_matrix):
        atoms = estimate_spectral_rank(small_matrix, 2, 2)
        assert_array_equal(atoms.points, [[1.0, 1.0], [1.0, 1.0]])
        assert_allclose(atoms.weights, [0.5, 0.5])

    def test_single_row_all_ones(self):
        sm = SampleMatrix(np.array([[3.0, 7.0]]))
        atoms = estimate_spectral_rank(sm, 1, 1)
        assert_array_equal(atoms.points, [[1.0, 1.0]])

    def test_monotone_invariance(self, rng):
        z = rng.random((40, 3))
        sm = SampleMatrix(z)
        mapped = SampleMatrix(np.column_stack([z[:, 0] ** 3, 5 * z[:, 1], np.expm1(z[:, 2])]))
        a = estimate_spectral_rank(sm, 2, 10)
        b = estimate_spectral_rank(mapped, 2, 10)
        assert_array_equal(a.points, b.points)
        assert_array_equal(a.weights, b.weights)

    def test_matches_oracle(self, rng):
        z = rng.integers(0, 9, size=(12, 3)).astype(float)
        sm = SampleMatrix(z)
        atoms = estimate_spectral_rank(sm, 2, 4)
        pts, w = oracle_spectral_rank(z, 2, 4)
        assert_array_equal(atoms.points, pts)
        assert_allclose(atoms.weights, w)


class TestPhi:
    def test_interior_point(self):
        assert_allclose(phi([0.5, 0.3], 2), 0.3)

    def test_corner(self):
        assert phi([0.0, 0.0], 2) == 0.0

    def test_two_components(self):
        assert_allclose(phi([0.3], 1), 0.7)

    def test_outside_simplex(self):
        with pytest.raises(NotInSimplexError):
            phi([0.9, 0.3], 2)
        with pytest.raises(NotInSimplexError):
            phi([-0.1], 1)


class TestTransforms:
    def test_forward(self):
        assert_allclose(transform_T([2.0, 1.0, 0.5], 2), [2 / 7, 1 / 7])

    def test_forward_infinite_sentinel(self):
        assert_array_equal(transform_T([np.inf, 1.0, 1.0], 2), [0.0, 0.0])

    def test_forward_symmetric_pair(self):
        assert_allclose(transform_T([1.0, 1.0], 2), [0.5])

    def test_inverse(self):
        assert_allclose(transform_T_inverse([2 / 7, 1 / 7], 2), [2.0, 1.0, 0.5])

    def test_inverse_sentinel_all_ones(self):
        # phi vanishes at the corner, hitting the all-ones escape hatch
        assert_array_equal(transform_T_inverse([0.0, 0.0], 2), [1.0, 1.0, 1.0])

    def test_inverse_two_components(self):
        assert_array_equal(transform_T_inverse([0.5], 2), [1.0, 1.0])

    def test_forward_requires_unit_level(self):
        with pytest.raises(Exception):
            transform_T([2.0, 3.0, 0.5], 2)

    def test_round_trip_spot(self, rng):
        for _ in range(100):
            d = int(rng.integers(2, 5))
            level = int(rng.integers(1, d + 1))
            raw = rng.uniform(0.05, 4.0, d)
            theta = raw / np.partition(raw, d - level)[d - level]
            back = transform_T_inverse(transform_T(theta, level), level)
            assert_allclose(back, theta, atol=1e-12)


class TestTransformMeasure:
    def test_pushforward_example(self):
        atoms = SpectralAtoms(level=2, points=np.array([[2.0, 1.0, 0.5]]), weights=np.array([1.0]))
        tr = transform_measure(atoms)
        assert_allclose(tr.points, [[2 / 7, 1 / 7]])
        assert not tr.sentinel.any()

    def test_infinite_atom_flagged(self):
        atoms = SpectralAtoms(
            level=2,
            points=np.array([[np.inf, 1.0, 1.0], [1.0, 1.0, 0.5]]),
            weights=np.array([0.25, 0.75]),
        )
        tr = transform_measure(atoms)
        assert tr.sentinel.tolist() == [True, False]
        assert tr.sentinel_mass == 0.25
        assert_array_equal(tr.points[0], [0.0, 0.0])

    def test_weight_conservation(self, rng):
        for _ in range(25):
            atoms = _random_atoms(rng)
            tr = transform_measure(atoms)
            assert_allclose(tr.weights.sum(), 1.0, atol=1e-12)
            assert_array_equal(tr.weights, atoms.weights)


class TestDensity:
    def test_single_atom_peak(self):
        tr = TransformedAtoms(
            level=2, dim=2, points=np.array([[0.5]]), weights=np.array([1.0]),
            sentinel=np.array([False]),
        )
        curve = density_estimate(tr, bandwidth=0.03)
        assert abs(curve.grid[np.argmax(curve.values)] - 0.5) < 0.01
        assert abs(curve.integral() - 1.0) < 0.02

    def test_uniform_atoms_flat(self):
        pts = np.linspace(0.0, 1.0, 401)[:, None]
        tr = TransformedAtoms(
            level=2, dim=2, points=pts, weights=np.full(401, 1 / 401),
            sentinel=np.zeros(401, bool),
        )
        curve = density_estimate(tr, bandwidth=0.05)
        assert np.ptp(curve.values) < 0.1
        assert abs(curve.integral() - 1.0) < 0.02

    def test_integral_near_one_auto_bandwidth(self, rng):
        for _ in range(10):
            atoms = _random_atoms(rng, d=2, m=40)
            curve = density_estimate(transform_measure(atoms))
            assert abs(curve.integral() - 1.0) < 0.02

    def test_triangle_density_integrates(self, rng):
        atoms = _random_atoms(rng, d=3, m=60)
        curve = density_estimate(transform_measure(atoms), grid_size=96)
        assert abs(curve.integral() - 1.0) < 0.02
        assert curve.grid.shape[1] == 2

    def test_bad_bandwidth(self, rng):
        tr = transform_measure(_random_atoms(rng, d=2, m=5))
        for bw in (0.0, -1.0, np.nan):
            with pytest.raises(BadBandwidthError):
                density_estimate(tr, bandwidth=bw)

    def test_no_mass_when_all_sentinel(self):
        tr = TransformedAtoms(
            level=2, dim=2, points=np.array([[0.0]]), weights=np.array([1.0]),
            sentinel=np.array([True]),
        )
        with pytest.raises(NoMassError):
            density_estimate(tr)

    def test_dimension_guard(self, rng):
        tr = transform_measure(_random_atoms(rng, d=4, m=5))
        with pytest.raises(Exception):
            density_estimate(tr)


class TestAtomValidation:
    def test_weights_must_sum_to_one(self):
        with pytest.raises(Exception):
            SpectralAtoms(level=1, points=np.array([[1.0, 0.5]]), weights=np.array([0.5]))

    def test_level_component_enforced(self):
        with pytest.raises(Exception):
            SpectralAtoms(level=2, points=np.array([[0.25, 1.0]]), weights=np.array([1.0]))
