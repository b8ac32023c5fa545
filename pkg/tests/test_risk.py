from __future__ import annotations

import warnings

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.integrate import quad

from hrvkit import (
    BadThresholdError,
    DegenerateMassWarning,
    DetectionConfig,
    ExtrapolationWarning,
    GeneratorSpec,
    SampleMatrix,
    SpectralAtoms,
    TailFit,
    example_dataset,
    inverse_rank_matrix,
    joint_exceedance_hr,
    joint_exceedance_semiparam,
    linear_combination_risk,
    marginal_scale_rank,
    marginal_tail_probability,
    noncompliance_probability,
    pareto_radial_integral,
    pareto_sample,
    rank_transform,
    sequential_hrv_search,
)
from hrvkit.risk import MarginalScales

from oracles import (
    MC_SUM_EXCEEDANCE_100,
    TRIPLE_UNION_EXACT,
    UNION_EXCEEDANCE_EXACT,
)

T_PAIR = (100.0, np.sqrt(10.0))


class TestRadialIntegral:
    def test_against_quadrature(self, rng):
        for _ in range(40):
            b1, b2 = rng.uniform(0.2, 3.0, 2)
            alpha = float(rng.uniform(0.2, 4.0))
            lower = float(rng.uniform(0.05, 10.0))
            upper = lower * float(rng.uniform(1.001, 50.0))
            closed = pareto_radial_integral(b1 + b2 - 2.0, alpha, lower, upper)
            numeric, _ = quad(
                lambda r: r ** (b1 + b2 - 2.0) * alpha * r ** (-alpha - 1.0), lower, upper, limit=200
            )
            assert_allclose(closed, numeric, rtol=1e-8)

    def test_log_branch(self):
        power, alpha = 1.2, 1.2  # exponent e = 0
        closed = pareto_radial_integral(power, alpha, 0.5, 7.0)
        assert_allclose(closed, alpha * np.log(7.0 / 0.5), rtol=1e-14)

    def test_continuity_near_log_branch(self):
        power, alpha = 1.2, 1.2
        at_zero = pareto_radial_integral(power, alpha, 0.5, 7.0)
        nearby = pareto_radial_integral(power, alpha - 1e-6, 0.5, 7.0)
        assert abs(nearby - at_zero) / at_zero < 1e-4

    def test_empty_interval(self):
        assert pareto_radial_integral(1.0, 2.0, 3.0, 3.0) == 0.0
        assert pareto_radial_integral(1.0, 2.0, 3.0, 2.0) == 0.0

    def test_validation(self):
        with pytest.raises(Exception):
            pareto_radial_integral(1.0, 0.0, 1.0, 2.0)
        with pytest.raises(Exception):
            pareto_radial_integral(1.0, 1.0, 0.0, 2.0)


class TestMarginalTail:
    def test_plug_in_identity_at_anchor(self, rng):
        data = rng.pareto(1.0, 50) + 1.0
        k = 10
        anchor = np.sort(data)[::-1][k - 1]
        assert marginal_tail_probability(data, k, float(anchor)) == k / 50

    def test_pareto_accuracy(self):
        data = pareto_sample(1.0, 100_000, 11)
        estimate = marginal_tail_probability(data, 2000, 100.0)
        assert abs(estimate - 0.01) / 0.01 < 0.20

    def test_rejects_nonpositive_threshold(self, rng):
        with pytest.raises(BadThresholdError):
            marginal_tail_probability(rng.pareto(1.0, 50) + 1.0, 5, 0.0)

    def test_warns_below_anchor(self, rng):
        data = rng.pareto(1.0, 100) + 1.0
        anchor = np.sort(data)[::-1][9]
        with pytest.warns(ExtrapolationWarning):
            marginal_tail_probability(data, 10, float(anchor) / 2)


class TestMarginalScaleRank:
    def test_k1_takes_largest(self, small_matrix):
        scales = marginal_scale_rank(small_matrix, 1)
        assert scales.order_index == 1
        assert_allclose(scales.scales, [5.0, 9.0])

    def test_k3_takes_third(self, small_matrix):
        scales = marginal_scale_rank(small_matrix, 3)
        assert scales.order_index == 3
        assert_allclose(scales.scales, [1.0, 4.0])

    def test_single_row(self):
        sm = SampleMatrix(np.array([[3.0, 7.0]]))
        scales = marginal_scale_rank(sm, 1)
        assert scales.order_index == 1
        assert_allclose(scales.scales, [3.0, 7.0])
        assert np.isnan(scales.beta_hats).all()  # no tail fit from one row


class TestJointSemiparam:
    def test_single_atom_plug_in(self):
        # everything pinned to 1 so the estimate collapses to k/n
        sm = SampleMatrix(np.tile([2.0, 2.0], (10, 1)) + np.arange(10)[:, None])
        atoms = SpectralAtoms(level=2, points=np.array([[1.0, 1.0]]), weights=np.array([1.0]))
        fit = TailFit(alpha_hat=2.0, k=1, method="hill", scale_at_k=1.0)
        scales = MarginalScales(
            scales=np.array([1.0, 1.0]), beta_hats=np.array([1.0, 1.0]), order_index=1, level=2, k=1
        )
        est = joint_exceedance_semiparam(
            sm, [0, 1], (1.0, 1.0), k=1, mode="rank", atoms=atoms, tail_fit=fit, scales=scales
        )
        assert_allclose(est.probability, 0.1)

    def test_positive_whenever_atoms_charge_the_corner(self, rng):
        sm = SampleMatrix(rng.pareto(1.0, (300, 2)) + 1.0)
        est = joint_exceedance_semiparam(sm, [0, 1], (1e6, 1e6), k=50, mode="rank")
        assert est.probability > 0.0

    def test_zero_component_contributes_nothing(self):
        sm = SampleMatrix(np.column_stack([np.arange(1.0, 21.0), np.arange(1.0, 21.0)]))
        atoms = SpectralAtoms(
            level=1, points=np.array([[1.0, 0.0], [1.0, 0.5]]), weights=np.array([0.5, 0.5])
        )
        fit = TailFit(alpha_hat=1.0, k=4, method="hill", scale_at_k=17.0)
        est = joint_exceedance_semiparam(
            sm, [0, 1], (17.0, 17.0), k=4, mode="standard", atoms=atoms, tail_fit=fit
        )
        # only the second atom can pay: max ratio is (17 / (17 * 0.5)) = 2
        assert_allclose(est.probability, (4 / 20) * 0.5 * 0.5)

    def test_threshold_homogeneity_standard_mode(self, rng):
        sm = SampleMatrix(rng.pareto(1.0, (200, 2)) + 1.0)
        base = joint_exceedance_semiparam(sm, [0, 1], (5.0, 9.0), k=40, mode="standard")
        fit_alpha = base.diagnostics["alpha_hat"]
        for c in (0.5, 2.0, 13.0):
            scaled = joint_exceedance_semiparam(
                sm, [0, 1], (5.0 * c, 9.0 * c), k=40, mode="standard"
            )
            assert_allclose(scaled.probability, base.probability * c ** (-fit_alpha), rtol=1e-10)

    def test_sec7_1_near_truth(self):
        sm = example_dataset(GeneratorSpec("sec7_1", 5000, 0))
        est = joint_exceedance_semiparam(sm, [0, 1], T_PAIR, k=1000, mode="rank")
        assert 0.0003 < est.probability < 0.003

    def test_atom_level_cannot_exceed_query_size(self, rng):
        sm = SampleMatrix(rng.pareto(1.0, (100, 3)) + 1.0)
        atoms = SpectralAtoms(level=3, points=np.array([[1.0, 1.0, 1.0]]), weights=np.array([1.0]))
        with pytest.raises(Exception):
            joint_exceedance_semiparam(sm, [0, 1], (1.0, 1.0), k=10, atoms=atoms)

    def test_threshold_validation(self, rng):
        sm = SampleMatrix(rng.pareto(1.0, (50, 2)) + 1.0)
        with pytest.raises(BadThresholdError):
            joint_exceedance_semiparam(sm, [0, 1], (1.0,), k=5)
        with pytest.raises(BadThresholdError):
            joint_exceedance_semiparam(sm, [0, 0], (1.0, 1.0), k=5)
        with pytest.raises(BadThresholdError):
            joint_exceedance_semiparam(sm, [0, 1], (0.0, 1.0), k=5)


class TestJointHr:
    def test_zero_when_thresholds_outrun_sample(self):
        sm = example_dataset(GeneratorSpec("sec7_1", 500, 1))
        est = joint_exceedance_hr(sm, (1e9, 1e9), 50)
        assert est.probability == 0.0

    def test_integer_multiple_of_inverse_n(self):
        sm = example_dataset(GeneratorSpec("sec7_1", 400, 2))
        for k in (40, 100, 200):
            est = joint_exceedance_hr(sm, (10.0, 2.0), k)
            assert est.probability * sm.n == round(est.probability * sm.n)

    def test_counting_identity(self):
        # the estimator is exactly the fraction of standardized points in the box
        sm = example_dataset(GeneratorSpec("sec7_1", 300, 3))
        k = 60
        scales = marginal_scale_rank(sm, k)
        est = joint_exceedance_hr(sm, (5.0, 2.0), k, scales=scales)
        inverse = inverse_rank_matrix(sm)
        m_k = rank_transform(sm, 2).order_stats[k - 1]
        u = (np.array([5.0, 2.0]) / scales.scales) ** scales.beta_hats
        count = int(((inverse[:, 0] > m_k * u[0]) & (inverse[:, 1] > m_k * u[1])).sum())
        assert est.probability == count / sm.n


class TestNoncompliance:
    def test_reduces_to_marginals_when_structure_absent(self):
        # exactly one coordinate alive per row: the level-2 rank values are
        # all ties, the level-2 fit dies, and with the level-1 verdict
        # degenerate the joint term is zeroed; the answer is the marginal sum
        rng = np.random.default_rng(5)
        b = rng.integers(0, 2, 200)
        x1 = rng.pareto(1.0, 200) + 1.0
        x2 = rng.pareto(1.0, 200) + 1.0
        sm = SampleMatrix(np.column_stack([b * x1, (1 - b) * x2]))
        report = sequential_hrv_search(
            sm, mode="rank", k=20, config=DetectionConfig(epsilon=0.2, cutoff=0.9)
        )
        assert report.stop_reason == "no_tail"
        assert report.level(1).verdicts[2] == "degenerate"
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ExtrapolationWarning)
            with pytest.warns(DegenerateMassWarning):
                est = noncompliance_probability(sm, (5.0, 5.0), report, 20)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ExtrapolationWarning)
            expected = (
                marginal_tail_probability(sm.column(0), 20, 5.0)
                + marginal_tail_probability(sm.column(1), 20, 5.0)
            )
        assert_allclose(est.probability, expected)
        assert est.components["1,2"] == 0.0

    def test_sec7_1_union(self):
        sm = example_dataset(GeneratorSpec("sec7_1", 5000, 0))
        report = sequential_hrv_search(
            sm, mode="rank", k=1000, config=DetectionConfig(epsilon=0.5, cutoff=0.8)
        )
        est = noncompliance_probability(sm, T_PAIR, report, 1000)
        assert abs(est.probability - UNION_EXCEEDANCE_EXACT) / UNION_EXCEEDANCE_EXACT < 0.25
        assert set(est.components) == {"1", "2", "1,2"}

    def test_triple_with_skipped_level(self):
        # (X, 2X, Y): pair terms are priced from the level-1 fit, the triple
        # term from the level-3 fit, per the cone each fitted level charges
        sm = example_dataset(GeneratorSpec("ex2_2", 100_000, 0))
        report = sequential_hrv_search(sm, mode="standard", k=2000)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ExtrapolationWarning)
            est = noncompliance_probability(sm, (50.0, 100.0, 50.0), report, 2000)
        assert abs(est.probability - TRIPLE_UNION_EXACT) / TRIPLE_UNION_EXACT < 0.30
        assert est.components["1,2"] > 0.01  # comonotone pair carries real mass

    def test_bonferroni_bound(self):
        sm = example_dataset(GeneratorSpec("sec7_1", 2000, 4))
        report = sequential_hrv_search(
            sm, mode="rank", k=200, config=DetectionConfig(epsilon=0.5, cutoff=0.8)
        )
        est = noncompliance_probability(sm, (50.0, 3.0), report, 200)
        assert est.probability <= est.components["1"] + est.components["2"] + 1e-12


class TestLinearCombination:
    def test_joint_term_matches_joint_estimator(self):
        sm = example_dataset(GeneratorSpec("sec7_1", 2000, 0))
        k = 100
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            est = linear_combination_risk(sm, (2.0, 4.0), 100.0, k)
        scales = marginal_scale_rank(sm, k)
        direct = joint_exceedance_semiparam(
            sm, [0, 1], (50.0, 25.0), k, mode="rank", scales=scales
        )
        assert_allclose(est.components["joint_both"], direct.probability, rtol=1e-12)

    def test_decomposition_adds_up(self):
        sm = example_dataset(GeneratorSpec("sec7_1", 2000, 1))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            est = linear_combination_risk(sm, (1.0, 1.0), 50.0, 100)
        c = est.components
        assert_allclose(
            est.probability,
            c["marginal_1"] + c["marginal_2"] - c["joint_both"] + c["interior"],
        )

    def test_divergence_warning_fires_on_heavy_interior(self):
        # this generator violates the angular moment condition, so the
        # interior sum is dominated by its largest atoms and must say so
        sm = example_dataset(GeneratorSpec("sec7_1", 5000, 0))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ExtrapolationWarning)
            with pytest.warns(Warning):
                est = linear_combination_risk(sm, (1.0, 1.0), 100.0, 500)
        assert est.diagnostics["warnings"]

    def test_non_interior_part_tracks_truth(self):
        # the marginal + joint part of the decomposition is stable; the
        # interior term is the unstable piece for this generator
        sm = example_dataset(GeneratorSpec("sec7_1", 5000, 0))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            est = linear_combination_risk(sm, (1.0, 1.0), 100.0, 500)
        c = est.components
        stable = c["marginal_1"] + c["marginal_2"] - c["joint_both"]
        assert 0.5 < stable / MC_SUM_EXCEEDANCE_100 < 2.0

    @pytest.mark.xfail(
        reason=(
            "the interior integrand has an infinite angular moment under this "
            "generator, so its plug-in sum grows with the atom range instead of "
            "converging; the full estimate overshoots the simulated truth"
        ),
        strict=False,
    )
    def test_full_estimate_within_factor_two(self):
        sm = example_dataset(GeneratorSpec("sec7_1", 5000, 0))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            est = linear_combination_risk(sm, (1.0, 1.0), 100.0, 500)
        assert 0.5 < est.probability / MC_SUM_EXCEEDANCE_100 < 2.0

    def test_validation(self):
        sm = example_dataset(GeneratorSpec("sec7_1", 100, 0))
        with pytest.raises(BadThresholdError):
            linear_combination_risk(sm, (1.0, -1.0), 10.0, 10)
        with pytest.raises(BadThresholdError):
            linear_combination_risk(sm, (1.0, 1.0), 0.0, 10)
