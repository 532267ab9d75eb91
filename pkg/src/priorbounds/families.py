"""Parametric families of observation distributions with finite support.

Observations are encoded as integer indices ``0 .. M-1``.  A dataset of
``n`` observations is a length-``n`` index vector; dataset spaces are
enumerated lexicographically with the first observation most significant.
"""

from __future__ import annotations

import numpy as np
from scipy.special import expit, softmax

from .errors import DomainError, EnumerationTooLarge

ENUMERATION_CAP = 10**6


def enumerate_datasets(support_size: int, n: int) -> np.ndarray:
    """All ``support_size**n`` datasets as rows of an ``(M**n, n)`` index array."""
    count = support_size**n
    if count > ENUMERATION_CAP * 16:
        raise EnumerationTooLarge(f"{support_size}^{n} datasets cannot be listed")
    idx = np.arange(count)
    powers = support_size ** np.arange(n - 1, -1, -1)
    return (idx[:, None] // powers[None, :]) % support_size


def check_enumerable(support_size: int, n: int, cap: int = ENUMERATION_CAP) -> int:
    count = support_size**n
    if count > cap:
        raise EnumerationTooLarge(f"M^n = {support_size}^{n} exceeds the cap {cap}")
    return count


class DistributionFamily:
    """Base class.  Subclasses provide :meth:`factor_pmfs`.

    ``iid`` families additionally provide :meth:`pmf`, the law of a single
    observation; the dataset law is then its ``n``-fold product.
    """

    support_size: int
    iid: bool = True
    kind: str = "family"

    def pmf(self, theta) -> np.ndarray:
        raise NotImplementedError

    def factor_pmfs(self, theta, n: int) -> np.ndarray:
        """Per-observation laws as an ``(n, M)`` array."""
        return np.broadcast_to(self.pmf(theta), (n, self.support_size))

    def dataset_pmf(self, theta, n: int, cap: int = ENUMERATION_CAP) -> np.ndarray:
        """Probability of every dataset, in lexicographic order."""
        check_enumerable(self.support_size, n, cap)
        probs = np.ones(1)
        for factor in self.factor_pmfs(theta, n):
            probs = np.outer(probs, factor).ravel()
        return probs

    def sample(self, theta, n: int, size: int, rng: np.random.Generator) -> np.ndarray:
        """Draw ``size`` datasets by inverse-CDF transforms of uniforms.

        All families consume exactly ``size * n`` doubles, so two calls with
        identically seeded generators share their uniforms even at different
        ``theta`` (common random numbers).
        """
        uniforms = rng.random((size, n))
        cdf = np.cumsum(self.factor_pmfs(theta, n), axis=1)
        if self.iid:
            out = np.searchsorted(cdf[0] if n else np.ones(1), uniforms, side="right")
        else:
            out = np.empty((size, n), dtype=np.int64)
            for i in range(n):
                out[:, i] = np.searchsorted(cdf[i], uniforms[:, i], side="right")
        return np.minimum(out, self.support_size - 1)

    def product_kl(self, theta0, theta1, n: int) -> float:
        """KL divergence between the two ``n``-observation dataset laws."""
        from .divergences import kl_categorical

        if self.iid:
            return n * kl_categorical(self.pmf(theta0), self.pmf(theta1)) if n else 0.0
        p, q = self.factor_pmfs(theta0, n), self.factor_pmfs(theta1, n)
        return float(sum(kl_categorical(a, b) for a, b in zip(p, q)))


class Bernoulli(DistributionFamily):
    """Bernoulli(mean = theta); observation index equals the observed bit."""

    support_size = 2
    kind = "bernoulli"

    def pmf(self, theta):
        theta = float(theta)
        if not 0.0 <= theta <= 1.0:
            raise DomainError(f"Bernoulli mean {theta} outside [0, 1]")
        return np.array([1.0 - theta, theta])

    def __repr__(self):
        return "Bernoulli()"


class Categorical(DistributionFamily):
    """Arbitrary probability table, one row per parameter point.

    Parameters
    ----------
    points : array_like, shape (K,) or (K, d)
    table : array_like, shape (K, M)
    """

    kind = "categorical"

    def __init__(self, points, table):
        self.points = np.array(points, dtype=float)
        self.table = np.array(table, dtype=float)
        if self.table.ndim != 2 or self.table.shape[0] != self.points.shape[0]:
            raise ValueError("table must have one row per parameter point")
        if np.any(self.table < 0) or not np.allclose(self.table.sum(axis=1), 1.0, atol=1e-12, rtol=0):
            raise ValueError("each table row must be a probability vector")
        self.support_size = self.table.shape[1]

    def row(self, theta) -> int:
        theta = np.asarray(theta, dtype=float)
        diff = np.abs(self.points - theta)
        if diff.ndim > 1:
            diff = diff.max(axis=1)
        hits = np.flatnonzero(diff <= 1e-12)
        if hits.size == 0:
            raise KeyError(f"{theta!r} has no row in the table")
        return int(hits[0])

    def pmf(self, theta):
        return self.table[self.row(theta)]

    def __repr__(self):
        return f"Categorical(K={len(self.points)}, M={self.support_size})"


class Zipf(DistributionFamily):
    """Discrete power law over ranks ``1..M``: ``p(x) ∝ x**(-theta)``.

    Observation index ``i`` stands for rank ``i + 1``.
    """

    kind = "zipf"

    def __init__(self, support_size: int = 400):
        if support_size < 1:
            raise ValueError("support size must be positive")
        self.support_size = int(support_size)
        self._log_ranks = np.log(np.arange(1, self.support_size + 1))

    def pmf(self, theta):
        return softmax(-float(theta) * self._log_ranks)

    def cdf(self, theta):
        return np.cumsum(self.pmf(theta))

    def __repr__(self):
        return f"Zipf(M={self.support_size})"


class LogisticLabels(DistributionFamily):
    """Labels ``y_i in {-1, +1}`` with ``P(y | z_i, theta) = 1 / (1 + exp(-y z_i' theta))``.

    Labels are independent but not identically distributed: observation
    ``i`` uses regressor column ``i`` of ``Z`` (shape ``(d, n_max)``).
    Index 0 encodes ``y = -1`` and index 1 encodes ``y = +1``.
    """

    support_size = 2
    iid = False
    kind = "logistic"

    def __init__(self, Z):
        Z = np.array(Z, dtype=float)
        if Z.ndim == 1:
            Z = Z[:, None]
        if Z.ndim != 2:
            raise ValueError("Z must be a (d, n) matrix")
        self.Z = Z

    @property
    def dim(self) -> int:
        return self.Z.shape[0]

    def factor_pmfs(self, theta, n):
        if n > self.Z.shape[1]:
            raise ValueError(f"only {self.Z.shape[1]} regressors available, asked for {n}")
        theta = np.asarray(theta, dtype=float).reshape(self.dim)
        p_plus = expit(self.Z[:, :n].T @ theta)
        return np.column_stack([1.0 - p_plus, p_plus])

    def __repr__(self):
        return f"LogisticLabels(d={self.dim}, n={self.Z.shape[1]})"
