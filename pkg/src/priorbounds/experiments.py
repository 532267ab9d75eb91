"""Drivers for the Bernoulli, logistic-regression, Zipf and upper-bound studies."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .estimation import lecam_optimize, logistic_closed_form
from .families import Bernoulli, Zipf
from .gfano import GFanoInstance, gfano_prioritized_lower
from .grid import ParamGrid, beta_prior, gaussian_bump, parse_prior, uniform_prior
from .learners import Learner, beta_posterior_mean
from .losses import ABSOLUTE, LossMatrix
from .risk import make_rng

DEFAULT_N_BERNOULLI = (1, 2, 5, 10, 20, 50, 100, 200, 500, 1000)
DEFAULT_N_ZIPF = tuple(int(v) for v in np.unique(np.round(np.geomspace(1, 1000, 10))))
DEFAULT_SIZES = (5, 15, 50)


@dataclass
class CurveSeries:
    series: str
    label: str
    points: list = field(default_factory=list)   # (n, value, std_error)

    def __post_init__(self):
        ns = [p[0] for p in self.points]
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise ValueError(f"{self.series}: n must be strictly increasing")

    @property
    def n(self) -> np.ndarray:
        return np.array([p[0] for p in self.points])

    @property
    def values(self) -> np.ndarray:
        return np.array([p[1] for p in self.points])

    @property
    def std_errors(self) -> np.ndarray:
        return np.array([p[2] for p in self.points])


def _bernoulli_prior(prior):
    if callable(prior):
        return prior, getattr(prior, "spec", "custom"), "custom prior"
    if prior in ("beta", "beta(1,2)"):
        return beta_prior(1, 2), "beta_1_2", "prior Beta(1,2)"
    if prior == "uniform":
        return uniform_prior(), "minimax", "minimax (uniform prior)"
    fn = parse_prior(prior)
    return fn, fn.spec, f"prior {fn.spec}"


def bernoulli_experiment(prior="beta", n_list: Sequence[int] = DEFAULT_N_BERNOULLI,
                         tv: str = "auto", cap: int = 10**6) -> CurveSeries:
    """LeCam lower bound on the prioritized risk of Bernoulli mean estimation, per ``n``.

    The uniform prior gives the minimax series.
    """
    fn, series, label = _bernoulli_prior(prior)
    family = Bernoulli()
    points = [(int(n), lecam_optimize(family, fn, int(n), tv=tv, cap=cap).value, 0.0) for n in n_list]
    return CurveSeries(series, label, points)


def log_log_slope(series: CurveSeries, n_min: float = 0, n_max: float = math.inf) -> float:
    """Least-squares slope of ``log value`` against ``log n`` over a range of ``n``."""
    n, v = series.n, series.values
    keep = (n >= n_min) & (n <= n_max) & (v > 0) & (n > 0)
    return float(np.polyfit(np.log(n[keep]), np.log(v[keep]), 1)[0])


@dataclass(frozen=True)
class LogisticReport:
    dim: int
    lam: float
    norm_z: float
    norm_z_prime: float
    bound_z: float
    bound_z_prime: float
    beta_prime: float
    tradeoff_z: float
    tradeoff_z_prime: float
    closed_forms_agree: bool
    ordering_holds: bool

    def rows(self):
        return [(k, getattr(self, k)) for k in self.__dataclass_fields__]


def logistic_experiment(Z, Z_prime, lam: float = 1.0) -> LogisticReport:
    """Compare the closed-form bounds for two regressor matrices with ``||Z|| <= ||Z'||``.

    ``beta_prime`` is the bound for ``Z'``; the two ``tradeoff`` values are
    the ``(1/8) d**1.5 / (lambda ||.||_F)`` risk levels forced at low-prior
    parameters.  ``ordering_holds`` records that
    ``beta' <= bound(Z)`` and ``tradeoff(Z) >= tradeoff(Z')``.
    """
    Z = np.atleast_2d(np.asarray(Z, dtype=float))
    Zp = np.atleast_2d(np.asarray(Z_prime, dtype=float))
    if Z.shape[0] != Zp.shape[0]:
        raise ValueError("Z and Z' need the same dimension d")
    nz, nzp = float(np.linalg.norm(Z, "fro")), float(np.linalg.norm(Zp, "fro"))
    if nz > nzp * (1 + 1e-12):
        raise ValueError("expected ||Z||_F <= ||Z'||_F")
    d = Z.shape[0]
    bz = logistic_closed_form(Z, lam)
    bzp = logistic_closed_form(Zp, lam)
    agree = all(abs(b.witness["uniform_lambda_form"] - b.value) <= 1e-12 * max(1.0, b.value)
                for b in (bz, bzp))
    tz = d**1.5 / (8.0 * lam * nz) if nz else math.inf
    tzp = d**1.5 / (8.0 * lam * nzp) if nzp else math.inf
    ordering = bzp.value <= bz.value * (1 + 1e-12) and tz >= tzp * (1 - 1e-12)
    return LogisticReport(d, float(lam), nz, nzp, bz.value, bzp.value, bzp.value, tz, tzp,
                          agree, ordering)


def zipf_exponents(count: int = 50, high: float = 5.0) -> np.ndarray:
    """``count`` exponents evenly spaced in ``(0, high]``."""
    return high * np.arange(1, count + 1) / count


def zipf_prior(center: float = 2.5):
    return gaussian_bump(center)


def synthetic_zipf_loss(thetas, support_size: int = 400, cap: float = 50.0,
                        base: float = 5.0, slope: float = 100.0) -> LossMatrix:
    """Expected episode cost of a policy specialized to exponent ``theta_k`` under ``Zipf(theta)``.

    Per environment rank ``x`` the cost is
    ``min(cap, base + slope * |F_theta(x) - F_theta_k(x)|)`` where ``F`` is
    the Zipf CDF, i.e. the percentile mismatch between the deployment
    exponent and the training exponent at that environment.
    """
    thetas = np.asarray(thetas, dtype=float)
    fam = Zipf(support_size)
    pmfs = np.array([fam.pmf(t) for t in thetas])
    cdfs = np.cumsum(pmfs, axis=1)
    cost = np.minimum(cap, base + slope * np.abs(cdfs[:, None, :] - cdfs[None, :, :]))
    values = np.einsum("km,kam->ka", pmfs, cost)
    return LossMatrix(values, thetas, [f"policy@{t:g}" for t in thetas])


def nested_action_subsets(thetas, sizes: Sequence[int], high: float = 5.0) -> dict:
    """Nested column subsets approximating uniform coverage of ``(0, high]``.

    Sizes are processed in increasing order; each set keeps the previous
    one and adds the grid exponents nearest the targets
    ``high * (i + 0.5) / size`` that are worst covered so far.
    """
    thetas = np.asarray(thetas, dtype=float)
    chosen: list[int] = []
    out = {}
    for size in sorted(set(int(s) for s in sizes)):
        if size > len(thetas) or size < 1:
            raise ValueError(f"cannot pick {size} of {len(thetas)} actions")
        targets = high * (np.arange(size) + 0.5) / size
        if chosen:
            cover = np.abs(targets[:, None] - thetas[chosen][None, :]).min(axis=1)
        else:
            cover = np.full(size, np.inf)
        for t in targets[np.argsort(-cover, kind="stable")]:
            if len(chosen) == size:
                break
            free = [k for k in range(len(thetas)) if k not in chosen]
            chosen.append(min(free, key=lambda k: (abs(thetas[k] - t), k)))
        out[size] = sorted(chosen)
    return out


def zipf_experiment(sizes: Sequence[int] = DEFAULT_SIZES, n_list: Sequence[int] = DEFAULT_N_ZIPF,
                    loss: LossMatrix | None = None, support_size: int = 400,
                    num_exponents: int = 50, slope: float = 100.0, info: str = "best",
                    rtol: float = 1e-6) -> list[CurveSeries]:
    """Generalized-Fano prioritized-risk bounds for nested action sets of each size."""
    thetas = zipf_exponents(num_exponents)
    if loss is None:
        loss = synthetic_zipf_loss(thetas, support_size, slope=slope)
    else:
        thetas = np.asarray(loss.thetas, dtype=float)
    grid = ParamGrid.from_prior(thetas, zipf_prior())
    family = Zipf(support_size)
    subsets = nested_action_subsets(thetas, sizes, high=float(thetas.max()))
    curves = {s: CurveSeries(f"actions_{s}", f"|A| = {s}") for s in sorted(subsets, reverse=True)}
    for n in n_list:
        full = GFanoInstance(grid, family, loss, int(n), info=info)
        for size, cols in subsets.items():
            value = gfano_prioritized_lower(full.with_actions(cols), rtol=rtol).value
            curves[size].points.append((int(n), value, 0.0))
    for c in curves.values():
        c.__post_init__()
    return [curves[s] for s in sorted(curves)]


def default_upper_learners() -> list[Learner]:
    return [beta_posterior_mean(1, 1), beta_posterior_mean(1, 2), beta_posterior_mean(1, 4)]


def upper_grid() -> ParamGrid:
    """``theta in {0, 0.01, ..., 0.99}`` with the Beta(1,2) density as prior.

    ``theta = 1`` is left out: its prior value is 0, so it never attains
    the supremum, and grids require strictly positive priors.
    """
    return ParamGrid.from_prior(np.arange(100) / 100.0, beta_prior(1, 2))


@dataclass
class UpperCell:
    """Per-learner results at one sample size."""

    n: int
    values: dict
    std_errors: dict
    argmax: dict
    losses: dict            # weighted per-dataset losses at each learner's argmax


def upper_cell(n: int, learners: Sequence[Learner], grid: ParamGrid | None = None,
               num_datasets: int = 10_000, seed: int = 0) -> UpperCell:
    """Monte Carlo learner-specific prioritized risk of each learner at one ``n``.

    Every grid point and every learner reuses the datasets generated from
    ``make_rng((seed, n))``, so differences between learners are paired.
    """
    grid = grid or upper_grid()
    family = Bernoulli()
    best = {l.label: (-np.inf, 0.0, None, None) for l in learners}
    for k, theta in enumerate(grid.points):
        data = family.sample(theta, n, num_datasets, make_rng((seed, n)))
        for learner in learners:
            weighted = grid.prior_values[k] * ABSOLUTE(theta, learner.predict(data))
            value = float(weighted.mean())
            if value > best[learner.label][0]:
                se = float(weighted.std(ddof=1) / math.sqrt(num_datasets))
                best[learner.label] = (value, se, float(theta), weighted)
    return UpperCell(n, {k: v[0] for k, v in best.items()}, {k: v[1] for k, v in best.items()},
                     {k: v[2] for k, v in best.items()}, {k: v[3] for k, v in best.items()})


def learner_separation(cell: UpperCell, worse: str, better: str) -> dict:
    """Gap between two learners with paired and unpaired standard errors."""
    diff = cell.values[worse] - cell.values[better]
    paired = float(np.std(cell.losses[worse] - cell.losses[better], ddof=1)
                   / math.sqrt(len(cell.losses[worse])))
    rss = math.hypot(cell.std_errors[worse], cell.std_errors[better])
    return {"difference": diff, "paired_se": paired, "rss_se": rss,
            "paired_z": diff / paired if paired > 0 else math.inf,
            "rss_z": diff / rss if rss > 0 else math.inf}


def upper_bound_experiment(n_list: Sequence[int] = DEFAULT_N_BERNOULLI, num_datasets: int = 10_000,
                           seed: int = 0, learners: Sequence[Learner] | None = None,
                           return_cells: bool = False):
    """Upper bounds on the prioritized risk (Beta(1,2) prior) from three posterior-mean learners."""
    learners = list(learners or default_upper_learners())
    grid = upper_grid()
    cells = [upper_cell(int(n), learners, grid, num_datasets, seed) for n in n_list]
    series = []
    for l in learners:
        slug = l.label.replace("posterior mean ", "").replace("(", "_").replace(")", "").replace(",", "_")
        series.append(CurveSeries(slug.lower(), l.label,
                                  [(c.n, c.values[l.label], c.std_errors[l.label]) for c in cells]))
    return (series, cells) if return_cells else series
