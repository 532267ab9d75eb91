"""Deterministic learners: maps from a dataset to an action or estimate."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np


@dataclass(frozen=True)
class Learner:
    """A deterministic rule ``sigma: X^n -> A``.

    Parameters
    ----------
    rule : callable
        Maps one dataset (1-D index array) to an action.
    label : str
    batch_rule : callable, optional
        Vectorized version mapping an ``(N, n)`` array of datasets to ``N``
        actions.  Used when present; must agree with ``rule``.
    """

    rule: Callable[[np.ndarray], object]
    label: str = "learner"
    batch_rule: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __call__(self, dataset):
        return self.rule(np.asarray(dataset))

    def predict(self, datasets) -> np.ndarray:
        datasets = np.asarray(datasets)
        if self.batch_rule is not None:
            return np.asarray(self.batch_rule(datasets))
        return np.asarray([self.rule(row) for row in datasets])


def constant_learner(value, label: str | None = None) -> Learner:
    def batch(datasets):
        return np.broadcast_to(np.asarray(value, dtype=float),
                               (len(datasets),) + np.shape(value)).copy()

    return Learner(lambda _: value, label or f"constant({value})", batch)


def empirical_mean_learner() -> Learner:
    """Sample mean of 0/1 observations; 0.5 on the empty dataset."""

    def rule(x):
        return float(np.mean(x)) if len(x) else 0.5

    def batch(datasets):
        if datasets.shape[1] == 0:
            return np.full(len(datasets), 0.5)
        return datasets.mean(axis=1)

    return Learner(rule, "empirical mean", batch)


def beta_posterior_mean(alpha: float, beta: float) -> Learner:
    """Posterior mean ``(alpha + s) / (alpha + beta + n)`` of a Bernoulli mean."""

    def rule(x):
        return (alpha + float(np.sum(x))) / (alpha + beta + len(x))

    def batch(datasets):
        n = datasets.shape[1]
        return (alpha + datasets.sum(axis=1)) / (alpha + beta + n)

    return Learner(rule, f"posterior mean Beta({alpha:g},{beta:g})", batch)


def table_learner(actions, support_size: int, label: str = "table") -> Learner:
    """Learner given by an explicit action per dataset in lexicographic order."""
    actions = np.asarray(actions)

    def batch(datasets):
        datasets = np.asarray(datasets, dtype=np.int64)
        n = datasets.shape[1]
        powers = support_size ** np.arange(n - 1, -1, -1)
        return actions[datasets @ powers]

    return Learner(lambda x: batch(np.asarray(x)[None, :])[0], label, batch)
