"""KL and total-variation divergences, and the inequalities linking them.

All logarithms are natural, so information is measured in nats.
Infinite KL values are returned as ``math.inf``; consumers clamp.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.special import expit, gammaln, kl_div, logsumexp, rel_entr, xlogy

from .errors import DomainError, EnumerationTooLarge
from .families import ENUMERATION_CAP, DistributionFamily


@dataclass(frozen=True)
class DivergenceValue:
    kl_forward: float
    kl_reverse: float
    tv: float
    exactness: dict = field(default_factory=lambda: {
        "kl_forward": "exact", "kl_reverse": "exact", "tv": "exact"})


def _mass(p, name):
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
        raise DomainError(f"{name} is not a probability vector")
    return p


def kl_bernoulli(p, q):
    """``KL(Ber(p) || Ber(q))`` with ``0 log 0 = 0``; ``inf`` on support mismatch.

    Vectorized over broadcastable ``p`` and ``q``.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if np.any((p < 0) | (p > 1) | (q < 0) | (q > 1)):
        raise DomainError("Bernoulli means must lie in [0, 1]")
    # kl_div terms are each non-negative, so rounding cannot push the sum below 0
    out = kl_div(p, q) + kl_div(1.0 - p, 1.0 - q)
    return float(out) if out.ndim == 0 else out


def kl_categorical(p, q) -> float:
    p = _mass(p, "p")
    q = _mass(q, "q")
    if p.shape != q.shape:
        raise DomainError("mass vectors differ in length")
    return float(np.sum(rel_entr(p, q)))


def tv_exact(p, q) -> float:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise DomainError("mass vectors differ in length")
    return float(min(1.0, max(0.0, 0.5 * np.abs(p - q).sum())))


def divergence(p, q) -> DivergenceValue:
    return DivergenceValue(kl_categorical(p, q), kl_categorical(q, p), tv_exact(p, q))


def tv_product_upper(kl_single: float, n: int) -> float:
    """Pinsker plus tensorization: ``||P^n - Q^n||_TV <= sqrt(n KL(P||Q) / 2)``, capped at 1."""
    if kl_single < 0 or n < 0:
        raise DomainError("KL and n must be non-negative")
    if n == 0 or kl_single == 0:
        return 0.0
    if math.isinf(kl_single):
        return 1.0
    return min(1.0, math.sqrt(n * kl_single / 2.0))


def _type_classes(n: int, m: int) -> np.ndarray:
    """Every count vector of length ``m`` summing to ``n``."""
    if m == 1:
        return np.array([[n]])
    if m == 2:
        k = np.arange(n + 1)
        return np.column_stack([n - k, k])
    count = math.comb(n + m - 1, m - 1)
    if count > ENUMERATION_CAP:
        raise EnumerationTooLarge(f"{count} type classes for n={n}, M={m}")
    bars = np.array(list(combinations(range(n + m - 1), m - 1)))
    edges = np.column_stack([np.full(len(bars), -1), bars, np.full(len(bars), n + m - 1)])
    return np.diff(edges, axis=1) - 1


def _log_type_probs(types: np.ndarray, p: np.ndarray) -> np.ndarray:
    n = types[0].sum()
    log_coef = gammaln(n + 1) - gammaln(types + 1).sum(axis=1)
    with np.errstate(divide="ignore"):
        return log_coef + xlogy(types, p).sum(axis=1)


def tv_product_exact(p, q, n: int) -> float:
    """Exact ``||P^n - Q^n||_TV`` for i.i.d. products.

    Sums over type classes (count vectors) rather than individual
    sequences; the two laws are constant on each class.
    """
    p = _mass(p, "p")
    q = _mass(q, "q")
    if n == 0:
        return 0.0
    types = _type_classes(n, len(p))
    a = np.exp(_log_type_probs(types, p))
    b = np.exp(_log_type_probs(types, q))
    return float(min(1.0, 0.5 * np.abs(a - b).sum()))


def dataset_tv_exact(family: DistributionFamily, theta0, theta1, n: int) -> float:
    """Exact TV between the ``n``-observation dataset laws of two parameters."""
    if family.iid:
        return tv_product_exact(family.pmf(theta0), family.pmf(theta1), n)
    return tv_exact(family.dataset_pmf(theta0, n), family.dataset_pmf(theta1, n))


def binary_kl_sum_bound(a: float, b: float) -> tuple[float, float]:
    """Return ``((a - b)**2, KL(p_a||p_b) + KL(p_b||p_a))`` with ``p_x = 1 / (1 + e^x)``."""
    pa, pb = expit(-a), expit(-b)
    exact = kl_bernoulli(pa, pb) + kl_bernoulli(pb, pa)
    return float((a - b) ** 2), float(exact)


def _weights(weights, k):
    w = np.asarray(weights, dtype=float)
    if w.shape != (k,) or np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
        raise DomainError("weights must be a probability vector over the points")
    return w


def mutual_information_upper(points, weights, family: DistributionFamily, n: int) -> float:
    """Upper bound on ``I(theta; X_1^n)`` using the mixture as product reference.

    Equals ``n * sum_k p_k KL(P_k || Pbar)`` for i.i.d. families, where
    ``Pbar`` is the ``p``-mixture of single-observation laws.
    """
    points = np.asarray(points, dtype=float)
    w = _weights(weights, len(points))
    if n == 0 or len(points) == 1:
        return 0.0
    if family.iid:
        pmfs = np.array([family.pmf(t) for t in points])
        mix = w @ pmfs
        return float(n * sum(wk * kl_categorical(pk, mix) for wk, pk in zip(w, pmfs) if wk > 0))
    factors = np.array([family.factor_pmfs(t, n) for t in points])  # (K, n, M)
    mix = np.einsum("k,kim->im", w, factors)
    total = 0.0
    for wk, fk in zip(w, factors):
        if wk > 0:
            total += wk * sum(kl_categorical(a, b) for a, b in zip(fk, mix))
    return float(total)


def product_kl_matrix(points, family: DistributionFamily, n: int) -> np.ndarray:
    """``D[i, j] = KL(P_i^n || P_j^n)`` for every ordered pair of points."""
    points = np.asarray(points, dtype=float)
    k = len(points)
    if family.iid:
        pmfs = np.array([family.pmf(t) for t in points])
        single = rel_entr(pmfs[:, None, :], pmfs[None, :, :]).sum(axis=2)
        return n * single if n else np.zeros((k, k))
    out = np.zeros((k, k))
    for i in range(k):
        for j in range(k):
            if i != j:
                out[i, j] = family.product_kl(points[i], points[j], n)
    return out


def mutual_information_pairwise_upper(points, weights, family: DistributionFamily, n: int) -> float:
    """``max_{i,j} KL(P_i^n || P_j^n)``; bounds the information for any index law."""
    points = np.asarray(points, dtype=float)
    _weights(weights, len(points))
    if n == 0 or len(points) == 1:
        return 0.0
    return float(product_kl_matrix(points, family, n).max())


def mutual_information_softmin_upper(points, weights, family: DistributionFamily, n: int) -> float:
    """``-sum_i p_i log sum_j p_j exp(-KL(P_i^n || P_j^n))``.

    Follows from Jensen's inequality applied to
    ``KL(P_i || Pbar) = -E_{P_i} log sum_j p_j dP_j/dP_i``.  Never exceeds
    the entropy of ``p``, which keeps it finite as ``n`` grows.
    """
    points = np.asarray(points, dtype=float)
    w = _weights(weights, len(points))
    if n == 0 or len(points) == 1:
        return 0.0
    D = product_kl_matrix(points, family, n)
    keep = w > 0
    inner = logsumexp(-D[np.ix_(keep, keep)], b=w[keep][None, :], axis=1)
    return float(max(0.0, -np.dot(w[keep], inner)))


INFORMATION_BOUNDS = {
    "mixture": mutual_information_upper,
    "pairwise": mutual_information_pairwise_upper,
    "softmin": mutual_information_softmin_upper,
}


def information_upper(points, weights, family, n, method: str = "mixture") -> float:
    """Dispatch to a named bound; ``"best"`` takes the minimum of mixture and softmin."""
    if method == "best":
        return min(mutual_information_upper(points, weights, family, n),
                   mutual_information_softmin_upper(points, weights, family, n))
    try:
        return INFORMATION_BOUNDS[method](points, weights, family, n)
    except KeyError:
        raise ValueError(f"unknown information bound {method!r}") from None
