import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from priorbounds.divergences import kl_bernoulli, tv_exact
from priorbounds.errors import DegenerateIndexSet, DomainError, InvalidPacking
from priorbounds.estimation import (assouad_bound, fano_bound, lambda_from_prior, lecam_bound,
                                   lecam_optimize, logistic_closed_form, prior_weighted_test,
                                   reduction_check)
from priorbounds.families import Bernoulli, Categorical, LogisticLabels
from priorbounds.grid import ParamGrid, beta_prior, uniform_prior
from priorbounds.learners import constant_learner, table_learner
from priorbounds.losses import ABSOLUTE
from priorbounds.packing import HammingSeparation, Packing, max_delta_two_point, scaled_hypercube
from priorbounds.checks import random_reduction_learners


class TestLeCam:
    def test_identical_members(self):
        fam = Categorical([0.3, 0.7], [[0.4, 0.6], [0.4, 0.6]])
        r = lecam_bound(Packing([0.3, 0.7], 0.1, [1.0, 1.0]), fam, 3)
        assert r.value == pytest.approx(0.05)

    def test_bernoulli_pair_n1(self):
        r = lecam_bound(Packing([0.4, 0.6], 0.1, [1.0, 1.0]), Bernoulli(), 1)
        assert r.witness["tv"] == pytest.approx(0.2)
        assert r.value == pytest.approx(0.04, abs=1e-15)

    def test_invalid_packing_propagates(self):
        with pytest.raises(InvalidPacking):
            lecam_bound(Packing([0.4, 0.6], 0.2, [1.0, 1.0]), Bernoulli(), 1)

    def test_needs_two_members(self):
        with pytest.raises(DegenerateIndexSet):
            lecam_bound(Packing([0.4, 0.5, 0.6], 0.01, [1.0, 1.0, 1.0]), Bernoulli(), 1)

    def test_small_delta_limit(self):
        r = lecam_bound(Packing([0.4, 0.6], 1e-9, [1.0, 1.0]), Bernoulli(), 2)
        assert r.value < 1e-9

    def test_pinsker_mode(self):
        r = lecam_bound(Packing([0.4, 0.6], 0.1, [1.0, 1.0]), Bernoulli(), 30, tv="pinsker")
        assert r.witness["tv"] == pytest.approx(min(1, math.sqrt(30 * kl_bernoulli(0.4, 0.6) / 2)))
        assert r.recompute() == r.value

    def test_auto_switches_at_cap(self):
        packing = Packing([0.4, 0.6], 0.1, [1.0, 1.0])
        assert lecam_bound(packing, Bernoulli(), 19).witness["tv_method"] == "exact"
        assert lecam_bound(packing, Bernoulli(), 20).witness["tv_method"] == "pinsker"


class TestLeCamOptimize:
    def test_no_data_uses_widest_packing(self):
        r = lecam_optimize(Bernoulli(), uniform_prior(), 0)
        # centre 0.5, width 0.45: delta = 0.9 / 2, value delta / 2
        assert r.value == pytest.approx(0.225, abs=1e-12)

    @pytest.mark.parametrize("n", [1, 5, 12, 40, 300])
    def test_dominates_fixed_packing(self, n):
        prior = beta_prior(1, 2)
        r = lecam_optimize(Bernoulli(), prior, n)
        for t0, t1 in [(0.3, 0.7), (0.1, 0.2), (0.25, 0.3)]:
            d = max_delta_two_point(t0, t1, prior)
            fixed = lecam_bound(Packing.from_prior([t0, t1], d, prior), Bernoulli(), n)
            assert r.value >= fixed.value - 1e-15

    def test_witness_replays(self):
        r = lecam_optimize(Bernoulli(), beta_prior(1, 2), 10)
        assert r.recompute() == pytest.approx(r.value, rel=1e-15)
        assert r.witness["theta0"] == pytest.approx(r.witness["center"] - r.witness["width"])

    def test_slope_uniform_prior(self):
        ns = 2 ** np.arange(4, 13)
        vals = [lecam_optimize(Bernoulli(), uniform_prior(), int(n)).value for n in ns]
        slope = np.polyfit(np.log(ns), np.log(vals), 1)[0]
        assert abs(slope + 0.5) <= 0.1


class TestFano:
    def test_two_point_vacuous(self):
        fam = Categorical([0.2, 0.8], [[0.5, 0.5], [0.5, 0.5]])
        assert fano_bound(Packing([0.2, 0.8], 0.1, [1, 1]), fam, 3).value == 0.0

    def test_identical_eight(self):
        pts = np.linspace(0, 0.7, 8)
        fam = Categorical(pts, np.tile([0.3, 0.7], (8, 1)))
        r = fano_bound(Packing(pts, 0.04, np.ones(8)), fam, 5)
        assert r.value == pytest.approx(0.04 * (1 - math.log(2) / math.log(8)))
        assert r.value == pytest.approx(2 / 3 * 0.04)

    def test_eight_bernoulli_pairwise(self):
        pts = np.linspace(0.2, 0.8, 8)
        delta = (pts[1] - pts[0]) / 2
        r = fano_bound(Packing(pts, delta, np.ones(8)), Bernoulli(), 1, info="pairwise")
        info = kl_bernoulli(0.2, 0.8)
        assert r.witness["info"] == pytest.approx(info, rel=1e-12)
        assert r.value == pytest.approx(max(0, delta * (1 - (info + math.log(2)) / math.log(8))))

    def test_single_member(self):
        with pytest.raises(DegenerateIndexSet):
            fano_bound(Packing([0.5], 0.1, [1.0]), Bernoulli(), 1)


class TestAssouad:
    def test_identical_members(self):
        sep = scaled_hypercube(2, 0.05)
        fam = Categorical(sep.members, np.tile([0.5, 0.5], (4, 1)))
        r = assouad_bound(sep, fam, 2)
        assert r.value == pytest.approx(0.05 * 2)

    def test_d1_is_two_point_on_mixtures(self):
        sep = HammingSeparation([[-1], [1]], [[-0.4], [0.4]], 0.1, [0.5, 0.5])
        fam = Categorical([-0.4, 0.4], [[0.7, 0.3], [0.2, 0.8]])
        r = assouad_bound(sep, fam, 2)
        tv = tv_exact(fam.dataset_pmf(-0.4, 2), fam.dataset_pmf(0.4, 2))
        assert r.value == pytest.approx(0.1 * (1 - tv), rel=1e-12)

    def test_logistic_exact_dominates_closed_form(self):
        Z = np.array([[1.0], [1.0]])
        closed = logistic_closed_form(Z, 1.0).value
        delta = math.sqrt(2 / (16 * 2.0))
        r = assouad_bound(scaled_hypercube(2, delta), LogisticLabels(Z), 1, tv="exact")
        assert r.value >= closed

    def test_pinsker_path_replays(self):
        Z = np.random.default_rng(1).normal(size=(2, 30))
        r = assouad_bound(scaled_hypercube(2, 0.01), LogisticLabels(Z), 30, tv="pinsker")
        assert r.witness["tv_method"] == "pinsker"
        assert r.recompute() == pytest.approx(r.value)

    def test_invalid_separation(self):
        sep = HammingSeparation([[-1], [1]], [[-0.1], [0.1]], 0.5, [0.5, 0.5])
        fam = Categorical([-0.1, 0.1], [[0.5, 0.5], [0.4, 0.6]])
        with pytest.raises(InvalidPacking):
            assouad_bound(sep, fam, 1)


class TestLogisticClosedForm:
    def test_unit_case(self):
        assert logistic_closed_form([[1.0]], 1.0).value == 0.0625

    @given(st.floats(0.01, 100))
    def test_homogeneity(self, c):
        Z = np.arange(1.0, 7.0).reshape(2, 3)
        base = logistic_closed_form(Z, 1.3).value
        assert logistic_closed_form(c * Z, 1.3).value == pytest.approx(base / c, rel=1e-12)

    def test_uniform_lambda_forms_agree_d4(self):
        Z = np.random.default_rng(4).normal(size=(4, 7))
        r = logistic_closed_form(Z, 2.0)
        assert r.witness["uniform_lambda_form"] == pytest.approx(r.value, rel=1e-12)

    def test_per_coordinate_lambdas(self):
        Z = np.array([[1.0, 2.0], [0.5, -1.0]])
        lam = np.array([1.0, 3.0])
        want = 2**1.5 / (16 * math.sqrt(1 * 5.0 + 9 * 1.25))
        assert logistic_closed_form(Z, lam).value == pytest.approx(want, rel=1e-14)

    def test_zero_regressors(self):
        assert logistic_closed_form(np.zeros((2, 3)), 1.0).value == math.inf

    def test_rejects_small_lambda(self):
        with pytest.raises(DomainError):
            logistic_closed_form([[1.0]], 0.5)


class TestLambdaFromPrior:
    def test_symmetric(self):
        assert lambda_from_prior(0.5, 0.5) == 1.0

    def test_asymmetric(self):
        assert lambda_from_prior(0.8, 0.2) == pytest.approx(1.5625)

    @given(st.floats(0.01, 0.99).filter(lambda p: abs(p - 0.5) > 1e-6))
    def test_asymmetry_exceeds_one(self, p):
        assert lambda_from_prior(p, 1 - p) > 1.0

    def test_normalization(self):
        with pytest.raises(DomainError):
            lambda_from_prior(0.6, 0.6)


class TestReduction:
    def test_constant_learner_half_error(self):
        grid = ParamGrid.from_prior([0.2, 0.8], uniform_prior())
        packing = Packing([0.2, 0.8], 0.3, [1.0, 1.0])
        r = reduction_check(constant_learner(0.2), packing, grid, Bernoulli(), ABSOLUTE, 3)
        assert r.test_error == 0.5
        assert r.holds

    def test_perfect_learner(self):
        fam = Categorical([0.1, 0.9], [[1.0, 0.0], [0.0, 1.0]])
        grid = ParamGrid.from_prior([0.1, 0.9], uniform_prior())
        learner = table_learner(np.array([0.1, 0.1, 0.9, 0.9]), 2)
        r = reduction_check(learner, Packing([0.1, 0.9], 0.4, [1, 1]), grid, fam, ABSOLUTE, 2)
        assert r.test_error == 0.0 and r.holds

    def test_prior_weighted_test_ties(self):
        p = Packing([0.0, 1.0], 0.1, [1.0, 1.0])
        assert prior_weighted_test(p, [0.5, 0.2, 0.9]).tolist() == [0, 0, 1]

    def test_random_learners(self):
        for grid, learner, packing, n in random_reduction_learners(100):
            assert 2**n <= 10**4
            assert reduction_check(learner, packing, grid, Bernoulli(), ABSOLUTE, n).holds

    def test_monte_carlo_path(self):
        from priorbounds.risk import MonteCarlo
        grid = ParamGrid.from_prior([0.2, 0.5, 0.8], beta_prior(2, 2))
        packing = Packing.from_prior([0.2, 0.8], 0.05, beta_prior(2, 2))
        learner = table_learner(np.linspace(0, 1, 16), 2)
        r = reduction_check(learner, packing, grid, Bernoulli(), ABSOLUTE, 4, MonteCarlo(4000, 5))
        assert r.method == "monte-carlo" and r.holds
