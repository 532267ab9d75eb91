"""Generalized Fano lower bounds for unbounded losses over finite parameter and action sets."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import optimize
from scipy.special import logsumexp

from .divergences import information_upper
from .errors import EmptyActionSet
from .estimation import BoundResult
from .families import DistributionFamily
from .grid import ParamGrid
from .losses import LossMatrix

LAMBDA_GRID = 2.0 ** np.arange(-10, 11)


@dataclass(frozen=True, eq=False)
class GFanoInstance:
    """Grid with prior ``pi``, information weights ``p``, family, loss matrix and sample size.

    ``weights`` defaults to uniform over the grid.  ``info`` names the
    upper bound used for ``I(theta; X_1^n)``: ``"mixture"``, ``"softmin"``,
    ``"pairwise"`` or ``"best"`` (the smaller of mixture and softmin).
    """

    grid: ParamGrid
    family: DistributionFamily
    loss: LossMatrix
    n: int
    weights: Optional[np.ndarray] = None
    info: str = "best"

    def __post_init__(self):
        k = len(self.grid)
        w = np.full(k, 1.0 / k) if self.weights is None else np.array(self.weights, dtype=float)
        if w.shape != (k,) or np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("weights must be a probability vector over the grid")
        if self.loss.values.shape[0] != k:
            raise ValueError("loss matrix needs one row per grid point")
        if self.loss.num_actions == 0:
            raise EmptyActionSet("no actions")
        if self.n < 0:
            raise ValueError("n must be non-negative")
        object.__setattr__(self, "weights", w)

    def weighted_loss(self, weighted: bool) -> np.ndarray:
        L = self.loss.values
        return self.grid.prior_values[:, None] * L if weighted else L

    def information(self) -> float:
        cache = self.__dict__.setdefault("_info_cache", {})
        if self.info not in cache:
            cache[self.info] = information_upper(self.grid.points, self.weights, self.family,
                                                 self.n, self.info)
        return cache[self.info]

    def with_actions(self, columns) -> "GFanoInstance":
        inst = GFanoInstance(self.grid, self.family, self.loss.subset(columns), self.n,
                             self.weights, self.info)
        inst.__dict__["_info_cache"] = self.__dict__.get("_info_cache", {})
        return inst


def rho_star(instance: GFanoInstance, lam: float, weighted: bool = False) -> float:
    """``-max_a log sum_theta p(theta) exp(-lam * L(theta, a))``.

    ``weighted`` replaces ``L`` by ``pi * L``.  Evaluated with a shifted
    log-sum-exp so large ``lam * L`` does not underflow.
    """
    if lam <= 0:
        raise ValueError("lambda must be positive")
    L = instance.weighted_loss(weighted)
    per_action = logsumexp(-lam * L, b=instance.weights[:, None], axis=0)
    return float(-per_action.max())


def gfano_bayes_lower(instance: GFanoInstance, lam: float, weighted: bool = False) -> BoundResult:
    """``(rho_star - I) / lam`` clamped at zero, with ``I`` replaced by an upper bound."""
    rho = rho_star(instance, lam, weighted)
    info = instance.information()
    value = max(0.0, (rho - info) / lam)
    return BoundResult("gfano", value, instance.n,
                       {"lambda": float(lam), "rho_star": rho, "info": info,
                        "info_method": instance.info, "weighted": weighted})


def gfano_prioritized_lower(instance: GFanoInstance, lambdas=LAMBDA_GRID,
                            rtol: float = 1e-6) -> BoundResult:
    """Prioritized-risk bound maximized over ``lambda``.

    Scans ``lambdas`` (powers of two by default), then refines on
    ``log lambda`` with golden-section search inside the bracket formed by
    the best grid point and its neighbours.  The result is never below
    any grid value.
    """

    def value(log_lam):
        return gfano_bayes_lower(instance, math.exp(log_lam), weighted=True).value

    logs = np.log(np.asarray(lambdas, dtype=float))
    values = np.array([value(x) for x in logs])
    k = int(np.argmax(values))
    best_log, best_value = logs[k], values[k]
    if best_value > 0 and 0 < k < len(logs) - 1 and values[k] > max(values[k - 1], values[k + 1]):
        x = optimize.golden(lambda t: -value(t), brack=(logs[k - 1], logs[k], logs[k + 1]),
                            tol=rtol)
        if value(x) > best_value:
            best_log, best_value = float(x), value(x)
    result = gfano_bayes_lower(instance, math.exp(best_log), weighted=True)
    result.witness["lambda_grid_best"] = float(np.exp(logs[k]))
    return result
