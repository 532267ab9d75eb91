"""Finite parameter grids and the prior functions evaluated on them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import stats

PriorFn = Callable[[np.ndarray], np.ndarray]


def uniform_prior(value: float = 1.0) -> PriorFn:
    """Constant prior ``pi(theta) = value``."""

    def prior(theta):
        theta = np.asarray(theta, dtype=float)
        return np.full(theta.shape[:1] if theta.ndim > 1 else theta.shape, float(value))

    prior.spec = f"uniform:{value:g}"
    return prior


def beta_prior(alpha: float, beta: float) -> PriorFn:
    """Beta(alpha, beta) density on [0, 1], zero outside.

    Endpoints take the one-sided limit of the density, e.g. Beta(1, 2)
    gives ``pi(0) = 2`` and ``pi(1) = 0``.
    """
    if alpha <= 0 or beta <= 0:
        raise ValueError("Beta parameters must be positive")

    def prior(theta):
        return stats.beta.pdf(np.asarray(theta, dtype=float), alpha, beta)

    prior.spec = f"beta:{alpha:g},{beta:g}"
    return prior


def gaussian_bump(center: float, scale: float = 1.0) -> PriorFn:
    """Unnormalized bump ``exp(-((theta - center) / scale)**2)``."""

    def prior(theta):
        theta = np.asarray(theta, dtype=float)
        return np.exp(-(((theta - center) / scale) ** 2))

    prior.spec = f"gauss:{center:g},{scale:g}"
    return prior


def parse_prior(text: str) -> PriorFn:
    """Build a prior from ``uniform[:v]``, ``beta:a,b`` or ``gauss:c[,s]``."""
    name, _, args = text.strip().partition(":")
    values = [float(v) for v in args.split(",") if v.strip()] if args else []
    name = name.lower()
    if name == "uniform":
        return uniform_prior(*values)
    if name == "beta":
        if len(values) != 2:
            raise ValueError(f"beta prior needs two parameters, got {text!r}")
        return beta_prior(*values)
    if name in ("gauss", "gaussian"):
        if not 1 <= len(values) <= 2:
            raise ValueError(f"gauss prior needs a center, got {text!r}")
        return gaussian_bump(*values)
    raise ValueError(f"unknown prior {text!r}")


@dataclass(frozen=True, eq=False)
class ParamGrid:
    """Ordered, finite set of parameter points with a positive prior value at each.

    Parameters
    ----------
    points : array_like
        Shape ``(K,)`` for scalar parameters or ``(K, d)`` for vectors.
        Scalar grids must be strictly increasing.
    prior_values : array_like
        ``pi(theta)`` at each point; strictly positive, not necessarily
        normalized.
    """

    points: np.ndarray
    prior_values: np.ndarray

    def __post_init__(self):
        points = np.array(self.points, dtype=float)
        prior = np.array(self.prior_values, dtype=float)
        if points.ndim == 0:
            points = points.reshape(1)
        if points.ndim > 2 or points.shape[0] == 0:
            raise ValueError("points must be a non-empty (K,) or (K, d) array")
        if prior.shape != (points.shape[0],):
            raise ValueError("need exactly one prior value per grid point")
        if not np.all(np.isfinite(points)):
            raise ValueError("grid points must be finite")
        if not np.all(np.isfinite(prior)) or np.any(prior <= 0):
            raise ValueError("prior values must be finite and strictly positive")
        if points.ndim == 1:
            if np.any(np.diff(points) <= 0):
                raise ValueError("scalar grid points must be strictly increasing")
        elif len(np.unique(points, axis=0)) != len(points):
            raise ValueError("grid points must be distinct")
        points.setflags(write=False)
        prior.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "prior_values", prior)

    @classmethod
    def from_prior(cls, points, prior: PriorFn) -> "ParamGrid":
        points = np.asarray(points, dtype=float)
        return cls(points, prior(points))

    @classmethod
    def uniform(cls, size: int = 101, low: float = 0.0, high: float = 1.0,
                prior: PriorFn | None = None) -> "ParamGrid":
        """Evenly spaced scalar grid; the default is 101 points on [0, 1]."""
        points = np.linspace(low, high, size)
        return cls.from_prior(points, prior or uniform_prior())

    def __len__(self):
        return self.points.shape[0]

    @property
    def is_scalar(self) -> bool:
        return self.points.ndim == 1

    def index_of(self, theta, atol: float = 1e-12) -> int:
        """Index of the grid point equal to ``theta`` (within ``atol``)."""
        theta = np.asarray(theta, dtype=float)
        if self.is_scalar:
            hits = np.flatnonzero(np.abs(self.points - theta) <= atol)
        else:
            hits = np.flatnonzero(np.all(np.abs(self.points - theta) <= atol, axis=1))
        if hits.size == 0:
            raise KeyError(f"{theta!r} is not a grid point")
        return int(hits[0])

    def prior_at(self, theta) -> float:
        return float(self.prior_values[self.index_of(theta)])

    def normalized_prior(self) -> np.ndarray:
        return self.prior_values / self.prior_values.sum()
