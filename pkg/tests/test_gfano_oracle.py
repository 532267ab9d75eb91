import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from priorbounds.errors import EmptyActionSet, EnumerationTooLarge
from priorbounds.families import Bernoulli, Categorical
from priorbounds.gfano import (LAMBDA_GRID, GFanoInstance, gfano_bayes_lower,
                               gfano_prioritized_lower, rho_star)
from priorbounds.grid import ParamGrid, uniform_prior
from priorbounds.losses import LossMatrix
from priorbounds.oracle import (FiniteInstance, bayes_risk_exact, optimal_test_error,
                                prioritized_risk_enumerated)


def _instance(loss, points=(0.2, 0.5, 0.8), prior=None, n=1, family=None, weights=None):
    points = np.asarray(points, dtype=float)
    grid = ParamGrid(points, np.ones(len(points)) if prior is None else prior)
    return GFanoInstance(grid, family or Bernoulli(), LossMatrix(loss, points), n, weights)


def _tiny_finite(n=2, seed=0):
    rng = np.random.default_rng(seed)
    pts = np.array([0.2, 0.5, 0.8])
    grid = ParamGrid(pts, rng.uniform(0.3, 2.0, 3))
    loss = LossMatrix(rng.exponential(1.0, (3, 3)), pts)
    return FiniteInstance(grid, Bernoulli(), loss, n)


class TestRhoStar:
    def test_zero_loss(self):
        inst = _instance(np.zeros((3, 2)))
        for lam in (0.01, 1.0, 100.0):
            assert rho_star(inst, lam) == 0.0

    def test_single_atom(self):
        inst = _instance([[2.0, 5.0]], points=[0.5])
        assert rho_star(inst, 1.0) == pytest.approx(2.0)

    @settings(max_examples=40)
    @given(st.lists(st.floats(0, 50), min_size=6, max_size=6), st.floats(0.01, 10),
           st.floats(1.0, 10.0))
    def test_non_decreasing_in_lambda(self, losses, lam, factor):
        inst = _instance(np.reshape(losses, (3, 2)))
        assert rho_star(inst, lam * factor) >= rho_star(inst, lam) - 1e-9

    def test_no_underflow(self):
        inst = _instance([[1e4, 2e4], [3e4, 1e4], [5e3, 5e3]])
        assert math.isfinite(rho_star(inst, 1024.0))

    def test_empty_actions(self):
        with pytest.raises(EmptyActionSet):
            _instance(np.zeros((3, 0)))


class TestGFano:
    def test_constant_loss_no_data(self):
        inst = _instance([[3.0], [3.0], [3.0]], n=0)
        for lam in (0.1, 1.0, 7.0):
            assert gfano_bayes_lower(inst, lam).value == pytest.approx(3.0)

    def test_clamped_at_zero(self):
        inst = _instance([[0.0, 1e-3], [1e-3, 0.0], [1e-3, 1e-3]], n=200)
        r = gfano_bayes_lower(inst, 1.0)
        assert r.witness["info"] >= r.witness["rho_star"] and r.value == 0.0

    def test_below_exact_bayes_every_lambda(self):
        fin = _tiny_finite()
        inst = GFanoInstance(fin.grid, fin.family, fin.loss, fin.n, fin.weights)
        for weighted in (False, True):
            bayes = bayes_risk_exact(fin, weighted)
            for lam in LAMBDA_GRID:
                assert gfano_bayes_lower(inst, lam, weighted).value <= bayes + 1e-12

    def test_zero_loss_prioritized(self):
        assert gfano_prioritized_lower(_instance(np.zeros((3, 3)))).value == 0.0

    def test_identical_laws_crossed_optima(self):
        pts = np.array([0.0, 1.0])
        fam = Categorical(pts, [[0.5, 0.5], [0.5, 0.5]])
        prior = np.array([1.0, 0.6])
        loss = np.array([[0.0, 4.0], [3.0, 0.0]])
        inst = GFanoInstance(ParamGrid(pts, prior), fam, LossMatrix(loss, pts), 3)
        r = gfano_prioritized_lower(inst)
        # independent evaluation on a dense grid: I = 0 so value = max rho*/lambda
        W = prior[:, None] * loss
        lams = np.geomspace(2**-10, 2**10, 20001)
        dense = max(-np.log(np.max(0.5 * np.exp(-lam * W).sum(axis=0))) / lam for lam in lams)
        assert r.value > 0
        assert r.value == pytest.approx(dense, rel=1e-6)
        assert r.recompute() == pytest.approx(r.value, rel=1e-15)

    @settings(max_examples=25, deadline=None)
    @given(st.lists(st.floats(0, 20), min_size=12, max_size=12), st.integers(1, 3),
           st.integers(0, 3))
    def test_dropping_columns_never_lowers(self, values, keep, drop):
        inst = _instance(np.reshape(values, (3, 4)), n=2)
        cols = [c for c in range(4) if c != drop][:keep]
        small = gfano_prioritized_lower(inst.with_actions(cols)).value
        assert small >= gfano_prioritized_lower(inst).value - 1e-9

    def test_never_below_grid(self):
        inst = _instance([[1.0, 5.0, 2.0], [4.0, 0.5, 3.0], [2.0, 2.0, 0.1]], n=1)
        best_grid = max(gfano_bayes_lower(inst, lam, True).value for lam in LAMBDA_GRID)
        assert gfano_prioritized_lower(inst).value >= best_grid


class TestBayesRisk:
    def test_zero_loss(self):
        fin = FiniteInstance(ParamGrid.uniform(3), Bernoulli(), LossMatrix(np.zeros((3, 2)),
                                                                             [0, 0.5, 1]), 2)
        assert bayes_risk_exact(fin) == 0.0

    def test_identity_no_data(self):
        pts = [0.3, 0.7]
        fin = FiniteInstance(ParamGrid(pts, [1, 1]), Bernoulli(), LossMatrix(np.eye(2), pts), 0)
        assert bayes_risk_exact(fin) == pytest.approx(0.5)

    def test_non_increasing_in_n(self):
        vals = [bayes_risk_exact(_tiny_finite(n)) for n in range(4)]
        assert all(b <= a + 1e-15 for a, b in zip(vals, vals[1:]))

    def test_relabeling_invariance(self):
        fin = _tiny_finite()
        perm_a = [2, 0, 1]
        relabeled = FiniteInstance(fin.grid, fin.family,
                                   LossMatrix(fin.loss.values[:, perm_a], fin.grid.points), fin.n)
        assert bayes_risk_exact(relabeled) == pytest.approx(bayes_risk_exact(fin), rel=1e-14)
        pts = fin.grid.points
        perm = [1, 2, 0]
        # label k now stands for the old parameter perm[k]
        fam = Categorical(pts, [Bernoulli().pmf(pts[j]) for j in perm])
        swapped = FiniteInstance(ParamGrid(pts, fin.grid.prior_values[perm]), fam,
                                 LossMatrix(fin.loss.values[perm], pts), fin.n)
        for weighted in (False, True):
            assert bayes_risk_exact(swapped, weighted) == pytest.approx(
                bayes_risk_exact(fin, weighted), rel=1e-14)


class TestEnumeratedRisk:
    def test_single_action(self):
        pts = [0.2, 0.6]
        fin = FiniteInstance(ParamGrid(pts, [2.0, 1.0]), Bernoulli(),
                             LossMatrix([[0.3], [0.9]], pts), 2)
        assert prioritized_risk_enumerated(fin).value == pytest.approx(max(0.6, 0.9))

    def test_four_learners_by_hand(self):
        pts = [0.2, 0.7]
        loss = np.array([[0.0, 1.0], [1.0, 0.0]])
        pi = np.array([1.0, 2.0])
        fin = FiniteInstance(ParamGrid(pts, pi), Bernoulli(), LossMatrix(loss, pts), 1)
        best = math.inf
        for table in itertools.product((0, 1), repeat=2):
            worst = 0.0
            for k, t in enumerate(pts):
                px = [1 - t, t]
                risk = sum(px[x] * loss[k, table[x]] for x in range(2))
                worst = max(worst, pi[k] * risk)
            best = min(best, worst)
        assert prioritized_risk_enumerated(fin).value == pytest.approx(best, rel=1e-15)

    @pytest.mark.parametrize("seed", range(5))
    def test_dominates_weighted_bayes(self, seed):
        fin = _tiny_finite(2, seed)
        assert prioritized_risk_enumerated(fin).value >= bayes_risk_exact(fin, True) - 1e-12

    def test_cap(self):
        fin = FiniteInstance(ParamGrid.uniform(3), Bernoulli(),
                             LossMatrix(np.ones((3, 4)), [0, 0.5, 1]), 4)
        with pytest.raises(EnumerationTooLarge):
            prioritized_risk_enumerated(fin)


class TestOptimalTestError:
    def test_identical(self):
        fam = Categorical([0.0, 1.0], [[0.3, 0.7], [0.3, 0.7]])
        assert optimal_test_error([0.0, 1.0], fam, 2) == pytest.approx(0.5)

    def test_disjoint(self):
        fam = Categorical([0.0, 1.0], [[1.0, 0.0], [0.0, 1.0]])
        assert optimal_test_error([0.0, 1.0], fam, 1) == 0.0

    def test_bernoulli_pair(self):
        # MAP decoding: 1 - (0.6 + 0.6) / 2
        assert optimal_test_error([0.4, 0.6], Bernoulli(), 1) == pytest.approx(0.4)
