"""Prior-weighted LeCam, Fano and Assouad lower bounds for estimation losses.

Each bound returns a :class:`BoundResult` whose ``witness`` holds every
intermediate quantity, so :meth:`BoundResult.recompute` can replay the
final formula without touching the distributions again.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
from scipy import optimize, stats

from .divergences import (dataset_tv_exact, information_upper, kl_bernoulli, tv_exact,
                          tv_product_upper, _log_type_probs, _type_classes)
from .errors import DegenerateIndexSet, DomainError, EnumerationTooLarge, InvalidPacking
from .families import ENUMERATION_CAP, Bernoulli, DistributionFamily, enumerate_datasets
from .grid import ParamGrid
from .learners import Learner
from .packing import (HammingSeparation, Packing, max_delta_two_point,
                      verify_hamming_separation, verify_packing)
from .risk import MonteCarlo, learner_prioritized_risk, make_rng

LN2 = math.log(2.0)


@dataclass(frozen=True)
class BoundResult:
    method: str
    value: float
    n: int
    witness: dict = field(default_factory=dict)

    def recompute(self) -> float:
        """Re-evaluate the closing formula from the witness alone."""
        w = self.witness
        if self.method == "lecam":
            return max(0.0, w["delta"] / 2.0 * (1.0 - w["tv"]))
        if self.method == "fano":
            return max(0.0, w["delta"] * (1.0 - (w["info"] + LN2) / math.log(w["size"])))
        if self.method == "assouad":
            if w["tv_method"] == "exact":
                return w["delta"] * sum(max(0.0, 1.0 - t) for t in w["tv"])
            return w["delta"] * w["dim"] * max(0.0, 1.0 - math.sqrt(w["mean_sq_tv"]))
        if self.method == "assouad-logistic-closed":
            if w["weighted_sq_norm"] == 0:
                return math.inf
            return w["dim"] ** 1.5 / (16.0 * math.sqrt(w["weighted_sq_norm"]))
        if self.method == "gfano":
            return max(0.0, (w["rho_star"] - w["info"]) / w["lambda"])
        raise ValueError(f"no replay rule for {self.method!r}")


def _tv_method(family: DistributionFamily, n: int, tv: str, cap: int = ENUMERATION_CAP) -> str:
    if tv == "auto":
        return "exact" if family.support_size**n <= cap else "pinsker"
    if tv not in ("exact", "pinsker"):
        raise ValueError(f"unknown tv method {tv!r}")
    return tv


def _pinsker_tv(family, theta0, theta1, n):
    kl = family.product_kl(theta0, theta1, n)
    return (tv_product_upper(kl / n, n) if n else 0.0), kl


def lecam_bound(packing: Packing, family: DistributionFamily, n: int, tv: str = "auto") -> BoundResult:
    """``(delta / 2) * (1 - ||P0^n - P1^n||_TV)`` for a verified two-point packing.

    The TV is exact while ``M**n <= 10**6``; past that it is replaced by
    the Pinsker/tensorization upper bound (``tv="auto"``).
    """
    if len(packing) != 2:
        raise DegenerateIndexSet("LeCam needs exactly two members")
    check = verify_packing(packing)
    if not check:
        raise InvalidPacking(f"balls overlap by {check.overlap:.3g} at members {check.pair}")
    t0, t1 = packing.members
    method = _tv_method(family, n, tv)
    witness = {"theta0": float(t0), "theta1": float(t1), "delta": float(packing.delta),
               "pi0": float(packing.prior_values[0]), "pi1": float(packing.prior_values[1]),
               "tv_method": method}
    if method == "exact":
        witness["tv"] = dataset_tv_exact(family, t0, t1, n)
    else:
        witness["tv"], witness["kl"] = _pinsker_tv(family, t0, t1, n)
    value = max(0.0, packing.delta / 2.0 * (1.0 - witness["tv"]))
    return BoundResult("lecam", value, n, witness)


def _default_widths():
    coarse = np.round(np.arange(1, 46) * 0.01, 10)
    fine = np.geomspace(1e-4, 0.01, 17)[:-1]
    return np.concatenate([fine, coarse])


def _candidate_tv(family, t0, t1, n, method):
    """TV (exact or Pinsker) for arrays of candidate pairs."""
    if isinstance(family, Bernoulli):
        if method == "exact":
            if n == 0:
                return np.zeros_like(t0)
            k = np.arange(n + 1)
            a = stats.binom.pmf(k[None, :], n, t0[:, None])
            b = stats.binom.pmf(k[None, :], n, t1[:, None])
            return np.minimum(1.0, 0.5 * np.abs(a - b).sum(axis=1))
        kl = kl_bernoulli(t0, t1)
        with np.errstate(invalid="ignore"):
            return np.where(np.isinf(kl), 1.0, np.minimum(1.0, np.sqrt(n * kl / 2.0)))
    if method == "exact":
        return np.array([dataset_tv_exact(family, a, b, n) for a, b in zip(t0, t1)])
    return np.array([_pinsker_tv(family, a, b, n)[0] for a, b in zip(t0, t1)])


def _lecam_values(family, prior, t0, t1, n, method):
    p0, p1 = prior(t0), prior(t1)
    with np.errstate(divide="ignore"):
        delta = np.where((p0 > 0) & (p1 > 0), (t1 - t0) / (1.0 / p0 + 1.0 / p1), 0.0)
    tv = _candidate_tv(family, t0, t1, n, method)
    return np.maximum(0.0, delta / 2.0 * (1.0 - tv)), delta


def lecam_optimize(family: DistributionFamily, prior, n: int, centers=None, widths=None,
                   domain=(0.0, 1.0), tv: str = "auto", refine: bool = True,
                   cap: int = ENUMERATION_CAP) -> BoundResult:
    """Best LeCam bound over symmetric two-point packings ``c -/+ w``.

    Searches every ``(center, width)`` pair whose members lie in
    ``domain``, with delta set to its largest feasible value, then refines
    the width at the best center by bounded scalar maximization.

    The default widths extend the 0.01..0.45 grid downwards geometrically
    to 1e-4, since the optimal width shrinks like ``n**-0.5``.
    """
    centers = np.round(np.arange(5, 96) * 0.01, 10) if centers is None else np.asarray(centers, float)
    widths = _default_widths() if widths is None else np.sort(np.asarray(widths, float))
    method = _tv_method(family, n, tv, cap)
    cc, ww = np.meshgrid(centers, widths, indexing="ij")
    cc, ww = cc.ravel(), ww.ravel()
    lo, hi = domain
    ok = (cc - ww >= lo - 1e-12) & (cc + ww <= hi + 1e-12)
    cc, ww = cc[ok], ww[ok]
    if cc.size == 0:
        raise ValueError("no candidate packing fits inside the domain")
    t0, t1 = np.clip(cc - ww, lo, hi), np.clip(cc + ww, lo, hi)
    values, _ = _lecam_values(family, prior, t0, t1, n, method)
    best = int(np.argmax(values))
    c_best, w_best, v_best = cc[best], ww[best], values[best]

    if refine and v_best > 0:
        pos = int(np.searchsorted(widths, w_best))
        w_lo = widths[max(pos - 1, 0)]
        w_hi = min(widths[min(pos + 1, len(widths) - 1)], c_best - lo, hi - c_best)
        if w_hi > w_lo:
            def neg(w):
                v, _ = _lecam_values(family, prior, np.array([c_best - w]),
                                     np.array([c_best + w]), n, method)
                return -v[0]

            res = optimize.minimize_scalar(neg, bounds=(w_lo, w_hi), method="bounded",
                                           options={"xatol": 1e-10})
            if -res.fun > v_best:
                w_best, v_best = float(res.x), -res.fun

    t0, t1 = c_best - w_best, c_best + w_best
    p0, p1 = float(prior(np.array(t0))), float(prior(np.array(t1)))
    if p0 <= 0 or p1 <= 0:
        return BoundResult("lecam", 0.0, n, {"theta0": t0, "theta1": t1, "delta": 0.0,
                                             "pi0": p0, "pi1": p1, "tv": 0.0,
                                             "tv_method": method})
    delta = max_delta_two_point(t0, t1, (p0, p1))
    result = lecam_bound(Packing([t0, t1], delta, [p0, p1]), family, n, tv=method)
    result.witness.update(center=float(c_best), width=float(w_best))
    return result


def fano_bound(packing: Packing, family: DistributionFamily, n: int,
               info: str = "mixture") -> BoundResult:
    """``delta * (1 - (I + ln 2) / ln |V|)`` with ``I`` an upper bound on ``I(V; X_1^n)``."""
    if len(packing) < 2:
        raise DegenerateIndexSet("Fano needs at least two members")
    if packing.members.ndim == 1:
        check = verify_packing(packing)
        if not check:
            raise InvalidPacking(f"balls overlap by {check.overlap:.3g} at members {check.pair}")
    size = len(packing)
    weights = np.full(size, 1.0 / size)
    info_value = information_upper(packing.members, weights, family, n, info)
    value = max(0.0, packing.delta * (1.0 - (info_value + LN2) / math.log(size)))
    return BoundResult("fano", value, n, {"delta": float(packing.delta), "size": size,
                                          "info": info_value, "info_method": info})


def _member_laws(family, members, n):
    """Laws of all members on a common finite sample space.

    I.i.d. families use type classes (mixtures of exchangeable laws are
    constant on them); otherwise every dataset is listed.
    """
    if family.iid:
        types = _type_classes(n, family.support_size)
        return np.exp(np.array([_log_type_probs(types, family.pmf(m)) for m in members]))
    return np.array([family.dataset_pmf(m, n) for m in members])


def assouad_bound(sep: HammingSeparation, family: DistributionFamily, n: int,
                  tv: str = "auto", grid_points=None) -> BoundResult:
    """``delta * sum_j (1 - ||P_{+j}^n - P_{-j}^n||_TV)`` over coordinate mixtures.

    Without exact TVs it falls back to the Cauchy-Schwarz weakening
    ``delta * d * (1 - sqrt(mean_{j,v} TV(P_v^n, P_{v flip j}^n)^2))`` with
    each squared TV bounded by the symmetrized KL over four.
    """
    check = verify_hamming_separation(sep, sep.members if grid_points is None else grid_points)
    if not check:
        raise InvalidPacking(f"separation fails at vertex {check.vertex}, theta={check.theta}")
    d = sep.dim
    members = sep.members if sep.members.shape[1] > 1 or not family.iid else sep.members[:, 0]
    method = _tv_method(family, n, tv)
    witness = {"delta": float(sep.delta), "dim": d, "tv_method": method}
    if method == "exact":
        try:
            laws = _member_laws(family, members, n)
        except EnumerationTooLarge:
            method = witness["tv_method"] = "pinsker"
    if method == "exact":
        tvs = []
        for j in range(d):
            plus, minus = sep.coordinate_split(j)
            tvs.append(tv_exact(laws[plus].mean(axis=0), laws[minus].mean(axis=0)))
        witness["tv"] = tvs
        value = sep.delta * sum(max(0.0, 1.0 - t) for t in tvs)
    else:
        sq = []
        for j in range(d):
            for k in range(len(sep.vertices)):
                partner = sep.flip_partner(k, j)
                sym = (family.product_kl(members[k], members[partner], n)
                       + family.product_kl(members[partner], members[k], n))
                sq.append(min(1.0, sym / 4.0))
        witness["mean_sq_tv"] = float(np.mean(sq))
        value = sep.delta * d * max(0.0, 1.0 - math.sqrt(witness["mean_sq_tv"]))
    return BoundResult("assouad", float(value), n, witness)


def lambda_from_prior(pi_plus, pi_minus):
    """Directional prior asymmetry ``(1/4) (1/pi_+ + 1/pi_-)`` per coordinate (>= 1)."""
    a = np.asarray(pi_plus, dtype=float)
    b = np.asarray(pi_minus, dtype=float)
    if np.any((a <= 0) | (a >= 1) | (b <= 0) | (b >= 1)):
        raise DomainError("prior values must lie strictly between 0 and 1")
    if np.any(np.abs(a + b - 1.0) > 1e-9):
        raise DomainError("paired prior values must sum to 1")
    out = 0.25 * (1.0 / a + 1.0 / b)
    return float(out) if out.ndim == 0 else out


def logistic_closed_form(Z, lambdas) -> BoundResult:
    """``d**1.5 / (16 * sqrt(sum_j lambda_j**2 sum_i z_ij**2))`` for ``Z`` of shape ``(d, n)``.

    When all ``lambda_j`` agree the equivalent ``d**1.5 / (16 lambda ||Z||_F)``
    form is evaluated too and must match to 1e-12.  An all-zero ``Z``
    yields ``inf``.
    """
    Z = np.atleast_2d(np.asarray(Z, dtype=float))
    d, n = Z.shape
    lam = np.broadcast_to(np.asarray(lambdas, dtype=float), (d,))
    if np.any(lam < 1.0):
        raise DomainError("lambda_j must be at least 1")
    weighted = float(np.sum(lam**2 * np.sum(Z**2, axis=1)))
    witness = {"dim": d, "n": n, "lambdas": lam.tolist(), "weighted_sq_norm": weighted}
    if weighted == 0.0:
        return BoundResult("assouad-logistic-closed", math.inf, n, witness)
    value = d**1.5 / (16.0 * math.sqrt(weighted))
    if np.all(lam == lam[0]):
        uniform_form = d**1.5 / (16.0 * lam[0] * np.linalg.norm(Z, "fro"))
        witness["uniform_lambda_form"] = float(uniform_form)
        if abs(uniform_form - value) > 1e-12 * max(1.0, value):
            raise ArithmeticError(f"closed forms disagree: {value!r} vs {uniform_form!r}")
    return BoundResult("assouad-logistic-closed", value, n, witness)


class ReductionCheck(NamedTuple):
    holds: bool
    test_error: float
    lhs: float
    rhs: float
    gap: float
    tolerance: float
    method: str


def prior_weighted_test(packing: Packing, estimates) -> np.ndarray:
    """``argmin_v pi(theta_v) rho(theta_v, estimate)`` per estimate; ties to the lowest index."""
    est = np.asarray(estimates, dtype=float)
    members = packing.members
    if members.ndim == 1:
        scores = packing.prior_values[:, None] * np.abs(members[:, None] - est[None, :])
    else:
        scores = packing.prior_values[:, None] * np.abs(members[:, None, :] - est[None, :, :]).sum(-1)
    return np.argmin(scores, axis=0)


def reduction_check(learner: Learner, packing: Packing, grid: ParamGrid,
                    family: DistributionFamily, loss, n: int,
                    mc: Optional[MonteCarlo] = None) -> ReductionCheck:
    """Evaluate both sides of ``delta * P(Psi != V) <= max_theta pi(theta) R(learner, theta)``.

    Exact when the dataset space is enumerable and ``mc`` is None;
    otherwise both sides are Monte Carlo estimates and the inequality may
    be missed by up to four combined standard errors.
    """
    for m in packing.members:
        grid.index_of(m)
    if len(packing) < 2:
        raise DegenerateIndexSet("reduction needs at least two members")
    size = len(packing)
    if mc is None:
        datasets = enumerate_datasets(family.support_size, n)
        psi = prior_weighted_test(packing, learner.predict(datasets))
        errors = [float(family.dataset_pmf(m, n)[psi != v].sum())
                  for v, m in enumerate(packing.members)]
        test_error = float(np.mean(errors))
        rhs = learner_prioritized_risk(grid, family, learner, loss, n, "exact").value
        lhs = packing.delta * test_error
        return ReductionCheck(lhs <= rhs + 1e-12, test_error, lhs, rhs, rhs - lhs, 1e-12, "exact")

    errors, ses = [], []
    for v, m in enumerate(packing.members):
        data = family.sample(m, n, mc.num_datasets, make_rng(mc.seed))
        wrong = (prior_weighted_test(packing, learner.predict(data)) != v).astype(float)
        errors.append(wrong.mean())
        ses.append(wrong.std(ddof=1) / math.sqrt(mc.num_datasets))
    test_error = float(np.mean(errors))
    lhs = packing.delta * test_error
    lhs_se = packing.delta * math.sqrt(sum(s * s for s in ses)) / size
    risk = learner_prioritized_risk(grid, family, learner, loss, n, mc)
    rhs_se = grid.prior_values[risk.index] * risk.estimates[risk.index].std_error
    tol = 4.0 * math.hypot(lhs_se, rhs_se)
    return ReductionCheck(lhs <= risk.value + tol, test_error, lhs, risk.value,
                          risk.value - lhs, tol, "monte-carlo")
