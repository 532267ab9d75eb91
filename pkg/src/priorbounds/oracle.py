"""Brute-force ground truth on tiny instances.

Everything here enumerates datasets (and, for the prioritized risk,
every deterministic learner), so results are exact up to rounding.
Randomized learners are not enumerated: the prioritized risk returned is
the minimum over deterministic learners, which can only sit above the
true infimum.  Checks built on it are therefore one-sided.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import EnumerationTooLarge
from .families import ENUMERATION_CAP, DistributionFamily, check_enumerable
from .grid import ParamGrid
from .losses import LossMatrix


@dataclass(frozen=True, eq=False)
class FiniteInstance:
    """Finite decision problem small enough to enumerate.

    ``weights`` (default uniform) are the averaging weights of the Bayes
    risk; ``grid.prior_values`` is the prior ``pi`` of the prioritized risk.
    """

    grid: ParamGrid
    family: DistributionFamily
    loss: LossMatrix
    n: int
    weights: Optional[np.ndarray] = None
    name: str = ""

    def __post_init__(self):
        k = len(self.grid)
        w = np.full(k, 1.0 / k) if self.weights is None else np.array(self.weights, dtype=float)
        if w.shape != (k,) or abs(w.sum() - 1.0) > 1e-12 or np.any(w < 0):
            raise ValueError("weights must be a probability vector over the grid")
        if self.loss.values.shape[0] != k:
            raise ValueError("loss matrix rows must match the grid")
        check_enumerable(self.family.support_size, self.n)
        object.__setattr__(self, "weights", w)
        laws = np.array([self.family.dataset_pmf(t, self.n) for t in self.grid.points])
        laws.setflags(write=False)
        object.__setattr__(self, "laws", laws)

    @property
    def num_datasets(self) -> int:
        return self.family.support_size**self.n

    def weighted_loss(self, weighted: bool) -> np.ndarray:
        L = self.loss.values
        return self.grid.prior_values[:, None] * L if weighted else L


def bayes_risk_exact(instance: FiniteInstance, weighted: bool = False) -> float:
    """``inf_sigma sum_theta p(theta) R(sigma, theta)``, using ``pi * L`` when ``weighted``.

    The Bayes rule picks, per dataset, the action with least posterior
    expected loss (ties to the smallest action index).
    """
    joint = instance.weights[:, None] * instance.laws          # (K, S)
    expected = instance.weighted_loss(weighted).T @ joint       # (A, S)
    return float(expected.min(axis=0).sum())


class EnumeratedRisk(NamedTuple):
    value: float
    learner: tuple


def _all_learners(num_actions: int, num_datasets: int, start: int, stop: int) -> np.ndarray:
    idx = np.arange(start, stop)
    powers = num_actions ** np.arange(num_datasets - 1, -1, -1, dtype=np.int64)
    return (idx[:, None] // powers[None, :]) % num_actions


def prioritized_risk_enumerated(instance: FiniteInstance, cap: int = ENUMERATION_CAP,
                                chunk: int = 1 << 16) -> EnumeratedRisk:
    """Minimum over all ``|A|**(M**n)`` deterministic learners of ``max_theta pi(theta) R``.

    Learners are action tables over lexicographically ordered datasets and
    are visited in lexicographic order; the first minimizer is returned.
    """
    A = instance.loss.num_actions
    S = instance.num_datasets
    total = A**S
    if total > cap:
        raise EnumerationTooLarge(f"{A}^{S} learners exceed the cap {cap}")
    L = instance.loss.values
    pi = instance.grid.prior_values
    best_value, best_table = np.inf, None
    for start in range(0, total, chunk):
        tables = _all_learners(A, S, start, min(total, start + chunk))   # (T, S)
        # risk[t, k] = sum_x P_k(x) L(k, table[t, x])
        risk = np.stack([(L[k][tables] * instance.laws[k]).sum(axis=1)
                         for k in range(len(pi))], axis=1)
        worst = (pi[None, :] * risk).max(axis=1)
        j = int(np.argmin(worst))
        if worst[j] < best_value:
            best_value, best_table = float(worst[j]), tuple(int(a) for a in tables[j])
    return EnumeratedRisk(best_value, best_table)


def optimal_test_error(members, family: DistributionFamily, n: int) -> float:
    """Bayes error of guessing a uniform index ``V`` from ``X_1^n ~ P_{theta_V}^n``.

    Equals ``1 - (1/|V|) sum_x max_v P_v(x)``.
    """
    laws = np.array([family.dataset_pmf(m, n) for m in members])
    return float(max(0.0, 1.0 - laws.max(axis=0).sum() / len(laws)))


def mutual_information_exact(points, weights, family: DistributionFamily, n: int) -> float:
    """``I(theta; X_1^n)`` by enumerating the joint law."""
    w = np.asarray(weights, dtype=float)
    laws = np.array([family.dataset_pmf(t, n) for t in points])
    joint = w[:, None] * laws
    marginal = joint.sum(axis=0)
    ratio = np.divide(laws, marginal[None, :], out=np.ones_like(laws), where=joint > 0)
    return float(np.sum(joint * np.log(ratio)))
