"""Exact and Monte Carlo risk of a learner, and its prior-weighted worst case."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, Union

import numpy as np

from .errors import NonFiniteSupport
from .families import ENUMERATION_CAP, DistributionFamily, check_enumerable, enumerate_datasets
from .grid import ParamGrid
from .learners import Learner

RNG_ALGORITHM = "numpy.random.PCG64"

Seed = Union[int, Sequence[int]]


def make_rng(seed: Seed) -> np.random.Generator:
    """PCG64 generator seeded through ``SeedSequence(seed)``.

    ``seed`` may be a tuple such as ``(root, cell)`` to derive an
    independent substream per cell.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


@dataclass(frozen=True)
class RiskEstimate:
    value: float
    std_error: float
    method: str
    seed: Optional[tuple] = None
    num_datasets: Optional[int] = None
    rng: Optional[str] = None

    def __post_init__(self):
        if self.method == "exact-enumeration" and self.std_error != 0.0:
            raise ValueError("exact estimates carry zero standard error")


@dataclass(frozen=True)
class MonteCarlo:
    """Evaluation mode for :func:`learner_prioritized_risk`."""

    num_datasets: int = 10_000
    seed: Seed = 0


def _require_finite(family):
    if not getattr(family, "support_size", None):
        raise NonFiniteSupport(f"{family!r} has no finite support")


def risk_exact(family: DistributionFamily, theta, learner: Learner, loss, n: int,
               cap: int = ENUMERATION_CAP) -> RiskEstimate:
    """Expected loss by summing over every dataset of size ``n``."""
    _require_finite(family)
    check_enumerable(family.support_size, n, cap)
    datasets = enumerate_datasets(family.support_size, n)
    probs = family.dataset_pmf(theta, n, cap)
    losses = np.asarray(loss(theta, learner.predict(datasets)), dtype=float)
    return RiskEstimate(float(probs @ losses), 0.0, "exact-enumeration")


def mc_losses(family: DistributionFamily, theta, learner: Learner, loss, n: int,
              num_datasets: int, seed: Seed) -> np.ndarray:
    """Loss on each of ``num_datasets`` datasets drawn from ``make_rng(seed)``."""
    rng = make_rng(seed)
    datasets = family.sample(theta, n, num_datasets, rng)
    return np.asarray(loss(theta, learner.predict(datasets)), dtype=float)


def risk_mc(family: DistributionFamily, theta, learner: Learner, loss, n: int,
            num_datasets: int, seed: Seed) -> RiskEstimate:
    """Sample-mean risk with standard error ``sd / sqrt(num_datasets)``."""
    if num_datasets < 2:
        raise ValueError("num_datasets must be at least 2")
    losses = mc_losses(family, theta, learner, loss, n, num_datasets, seed)
    se = float(losses.std(ddof=1) / np.sqrt(num_datasets))
    seed_tuple = tuple(np.atleast_1d(seed).tolist())
    return RiskEstimate(float(losses.mean()), se, "monte-carlo", seed_tuple, num_datasets,
                        RNG_ALGORITHM)


class LearnerRisk(NamedTuple):
    value: float
    theta: object
    index: int
    estimates: tuple


def learner_prioritized_risk(grid: ParamGrid, family: DistributionFamily, learner: Learner,
                             loss, n: int, evaluation: Union[str, MonteCarlo] = "exact"
                             ) -> LearnerRisk:
    """``max_theta pi(theta) R(learner, theta)`` over the grid.

    With Monte Carlo evaluation every grid point uses the same seed, so
    all cells share their uniforms.  Ties go to the smallest grid index.
    """
    estimates = []
    for theta in grid.points:
        if evaluation == "exact":
            estimates.append(risk_exact(family, theta, learner, loss, n))
        elif isinstance(evaluation, MonteCarlo):
            estimates.append(risk_mc(family, theta, learner, loss, n,
                                     evaluation.num_datasets, evaluation.seed))
        else:
            raise ValueError(f"unknown evaluation {evaluation!r}")
    weighted = grid.prior_values * np.array([e.value for e in estimates])
    k = int(np.argmax(weighted))
    theta = grid.points[k]
    return LearnerRisk(float(weighted[k]), theta if theta.ndim else float(theta), k,
                       tuple(estimates))
