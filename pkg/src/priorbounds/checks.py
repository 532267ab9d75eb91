"""Built-in tiny instances, the validity sandwich and the self-test property suite.

Every lower bound must sit below the enumerated prioritized risk of its
instance, and the generalized Fano bound must also sit below the
prior-weighted Bayes risk, which in turn cannot exceed the prioritized
risk.  Failures are collected rather than raised so callers can report
all of them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .divergences import (binary_kl_sum_bound, dataset_tv_exact, kl_bernoulli, kl_categorical,
                          tv_exact)
from .estimation import assouad_bound, fano_bound, lecam_bound, logistic_closed_form, reduction_check
from .families import Bernoulli, Categorical
from .gfano import GFanoInstance, gfano_prioritized_lower
from .grid import ParamGrid, parse_prior
from .learners import table_learner
from .losses import ABSOLUTE, L1, LossMatrix
from .oracle import FiniteInstance, bayes_risk_exact, prioritized_risk_enumerated
from .packing import (HammingSeparation, Packing, hypercube_vertices, max_delta,
                      max_separation_delta)
from .risk import make_rng

TOLERANCE = 1e-9
CHECK_SEED = 20240601


@dataclass
class SandwichCase:
    """Finite instance plus the packings and separation its bounds are built on."""

    instance: FiniteInstance
    packings: list = field(default_factory=list)
    separation: Optional[HammingSeparation] = None
    action_points: Optional[np.ndarray] = None

    @property
    def name(self) -> str:
        return self.instance.name


@dataclass(frozen=True)
class SandwichRow:
    case: str
    bound: str
    value: float
    ceiling: float
    ceiling_name: str

    @property
    def ok(self) -> bool:
        return self.value <= self.ceiling + TOLERANCE


def _estimation_case(name, points, prior, family, n):
    points = np.asarray(points, dtype=float)
    grid = ParamGrid.from_prior(points, parse_prior(prior))
    loss = LossMatrix.from_pseudometric(points, ABSOLUTE)
    inst = FiniteInstance(grid, family, loss, n, name=name)
    pi = grid.prior_values
    packings = []
    for size in range(2, len(points) + 1):
        for idx in itertools.combinations(range(len(points)), size):
            idx = list(idx)
            packings.append(Packing(points[idx], max_delta(points[idx], pi[idx]), pi[idx]))
    separation = None
    neg, pos = np.flatnonzero(points < 0), np.flatnonzero(points >= 0)
    if neg.size and pos.size:
        # d = 1 separation from the innermost point on each side
        idx = [neg[-1], pos[0]]
        delta = max_separation_delta([[-1], [1]], points[idx], pi[idx], points)
        separation = HammingSeparation([[-1], [1]], points[idx], delta, pi[idx])
    return SandwichCase(inst, packings, separation, points)


def _random_rows(rng, k, m):
    return rng.dirichlet(np.full(m, 1.5), size=k)


def _vector_case(name, rng, scale, prior_values, m, n, extra_point=False):
    vertices = hypercube_vertices(2)
    pi = np.asarray(prior_values, dtype=float)
    members = scale[None, :] * vertices / pi[:, None]
    points = np.vstack([members, [[0.0, 0.0]]]) if extra_point else members
    grid_pi = np.append(pi, 0.5) if extra_point else pi
    grid = ParamGrid(points, grid_pi)
    family = Categorical(points, _random_rows(rng, len(points), m))
    values = np.array([L1(t, members) for t in points])
    loss = LossMatrix(values, points, [f"v{k}" for k in range(4)])
    inst = FiniteInstance(grid, family, loss, n, name=name)
    delta = max_separation_delta(vertices, members, pi, members)
    return SandwichCase(inst, [], HammingSeparation(vertices, members, delta, pi), members)


def _matrix_case(name, rng, family, points, num_actions, n, prior, weights=None, heavy=False):
    points = np.asarray(points, dtype=float)
    grid = ParamGrid.from_prior(points, parse_prior(prior))
    values = rng.exponential(3.0 if heavy else 1.0, size=(len(points), num_actions))
    if heavy:
        values[rng.integers(len(points)), rng.integers(num_actions)] += 40.0
    loss = LossMatrix(values, points)
    return SandwichCase(FiniteInstance(grid, family, loss, n, weights, name=name))


def builtin_cases() -> list[SandwichCase]:
    """Deterministic set of 25 enumerable instances (|Theta| <= 5, M <= 3, |A| <= 4, n <= 3)."""
    rng = make_rng(CHECK_SEED)
    bern = Bernoulli()
    cases = []
    for prior in ("uniform", "beta:1,2", "beta:2,2"):
        for n in (1, 2, 3):
            cases.append(_estimation_case(f"bernoulli-{prior}-n{n}", [0.1, 0.4, 0.6, 0.9],
                                          prior, bern, n))
    cases.append(_estimation_case("bernoulli-gauss-3pt-n3", [0.2, 0.5, 0.8], "gauss:0.5,0.3",
                                  bern, 3))
    for n, prior in ((1, "uniform"), (2, "gauss:0,0.8"), (1, "gauss:0.3,1")):
        pts = [-0.6, -0.2, 0.2, 0.6]
        fam = Categorical(pts, _random_rows(rng, 4, 3))
        cases.append(_estimation_case(f"categorical-scalar-{prior}-n{n}", pts, prior, fam, n))
    pts = [-0.5, 0.1, 0.7]
    cases.append(_estimation_case("categorical-3pt-n2", pts, "gauss:0.4,0.7",
                                  Categorical(pts, _random_rows(rng, 3, 3)), 2))
    for k, (scale, pi, m, n, extra) in enumerate([
            (np.array([0.1, 0.1]), [0.5, 0.5, 0.5, 0.5], 2, 1, False),
            (np.array([0.1, 0.2]), [0.4, 0.6, 0.3, 0.7], 2, 3, False),
            (np.array([0.05, 0.05]), [0.9, 0.5, 0.5, 0.2], 3, 2, False),
            (np.array([0.2, 0.1]), [0.5, 0.5, 0.5, 0.5], 3, 1, True),
            (np.array([0.1, 0.1]), [0.8, 0.3, 0.6, 0.4], 2, 2, True)]):
        cases.append(_vector_case(f"hypercube-d2-{k}", rng, scale, pi, m, n, extra))
    for k, (fam_kind, K, A, n, prior, heavy) in enumerate([
            ("bernoulli", 3, 2, 3, "uniform", False),
            ("bernoulli", 5, 3, 2, "beta:2,3", False),
            ("bernoulli", 4, 4, 2, "gauss:0.5,0.5", True),
            ("categorical", 5, 4, 2, "uniform", True),
            ("categorical", 3, 3, 1, "gauss:0.4,1", False),
            ("categorical", 4, 2, 2, "beta:1,2", True)]):
        points = np.sort(rng.uniform(0.05, 0.95, size=K))
        family = bern if fam_kind == "bernoulli" else Categorical(points, _random_rows(rng, K, 3))
        weights = rng.dirichlet(np.ones(K)) if k % 2 else None
        cases.append(_matrix_case(f"matrix-{fam_kind}-{k}", rng, family, points, A, n, prior,
                                  weights, heavy))
    return cases


def run_sandwich(cases=None) -> list[SandwichRow]:
    """Evaluate every applicable bound against the oracles on each case."""
    rows = []
    for case in cases if cases is not None else builtin_cases():
        inst = case.instance
        top = prioritized_risk_enumerated(inst).value
        bayes = bayes_risk_exact(inst, weighted=True)
        rows.append(SandwichRow(case.name, "bayes-weighted", bayes, top, "prioritized"))
        for p in case.packings:
            kind = "lecam" if len(p) == 2 else "fano"
            b = lecam_bound(p, inst.family, inst.n) if kind == "lecam" else \
                fano_bound(p, inst.family, inst.n, info="mixture")
            rows.append(SandwichRow(case.name, f"{kind}{tuple(np.round(p.members, 6).tolist())}",
                                    b.value, top, "prioritized"))
        if case.separation is not None:
            b = assouad_bound(case.separation, inst.family, inst.n, grid_points=case.action_points)
            rows.append(SandwichRow(case.name, "assouad", b.value, top, "prioritized"))
        g = GFanoInstance(inst.grid, inst.family, inst.loss, inst.n, inst.weights, info="best")
        gv = gfano_prioritized_lower(g).value
        rows.append(SandwichRow(case.name, "gfano", gv, bayes, "bayes-weighted"))
        rows.append(SandwichRow(case.name, "gfano", gv, top, "prioritized"))
    return rows


def random_reduction_learners(count: int = 100, seed: int = CHECK_SEED):
    """``count`` random (instance, learner, packing) triples on enumerable Bernoulli problems."""
    rng = make_rng((seed, 8))
    family = Bernoulli()
    out = []
    for i in range(count):
        n = int(rng.integers(1, 6))
        points = np.round(np.sort(rng.choice(np.arange(1, 20) / 20.0, size=4, replace=False)), 10)
        prior = parse_prior(("uniform", "beta:1,2", "beta:2,2", "gauss:0.5,0.4")[i % 4])
        grid = ParamGrid.from_prior(points, prior)
        idx = sorted(rng.choice(4, size=int(rng.integers(2, 5)), replace=False))
        pi = grid.prior_values[idx]
        packing = Packing(points[idx], max_delta(points[idx], pi), pi)
        actions = rng.uniform(0, 1, size=2**n) if i % 2 else rng.choice(points, size=2**n)
        out.append((grid, table_learner(actions, 2, f"random-{i}"), packing, n))
    return out


@dataclass(frozen=True)
class PropertyResult:
    name: str
    ok: bool
    detail: str


def _pinsker(rng, count=10_000):
    p, q = rng.uniform(0, 1, count), rng.uniform(0, 1, count)
    tv = np.abs(p - q)
    kl = kl_bernoulli(p, q)
    bad = int(np.sum(tv > np.sqrt(kl / 2.0) + 1e-12))
    return PropertyResult("pinsker", bad == 0, f"{bad} violations in {count} pairs")


def _tensorization(rng):
    worst = 0.0
    for m in (2, 3):
        for _ in range(20):
            p, q = rng.dirichlet(np.ones(m)), rng.dirichlet(np.ones(m))
            fam = Categorical([0.0, 1.0], np.vstack([p, q]))
            for n in range(1, 6):
                a, b = fam.dataset_pmf(0.0, n), fam.dataset_pmf(1.0, n)
                direct = float(np.sum(a * np.log(a / b)))
                worst = max(worst, abs(direct - n * kl_categorical(p, q)))
    return PropertyResult("tensorization", worst <= 1e-9, f"max error {worst:.3g}")


def _sigmoid_kl(rng, count=10_000):
    a, b = rng.normal(0, 3, count), rng.normal(0, 3, count)
    bad = 0
    for x, y in zip(a, b):
        sq, sym = binary_kl_sum_bound(x, y)
        bad += sym > sq + 1e-12
    return PropertyResult("sigmoid-kl", bad == 0, f"{bad} violations in {count} pairs")


def _logistic(rng, cases=100):
    worst = 0.0
    for _ in range(cases):
        d, n = int(rng.integers(1, 7)), int(rng.integers(1, 21))
        Z, lam, c = rng.normal(size=(d, n)), rng.uniform(1, 5), rng.uniform(0.1, 10)
        r = logistic_closed_form(Z, lam)
        worst = max(worst, abs(r.witness["uniform_lambda_form"] - r.value) / r.value,
                    abs(logistic_closed_form(c * Z, lam).value - r.value / c) / r.value)
    unit = logistic_closed_form([[1.0]], 1.0).value
    ok = worst <= 1e-12 and unit == 0.0625
    return PropertyResult("logistic-closed-form", ok, f"max rel error {worst:.3g}; d=1 case {unit!r}")


def _reduction():
    bad = 0
    triples = random_reduction_learners()
    for grid, learner, packing, n in triples:
        bad += not reduction_check(learner, packing, grid, Bernoulli(), ABSOLUTE, n).holds
    return PropertyResult("reduction", bad == 0, f"{bad} violations in {len(triples)} learners")


def _sandwich():
    rows = run_sandwich()
    bad = [r for r in rows if not r.ok]
    cases = len({r.case for r in rows})
    return PropertyResult("sandwich", not bad, f"{len(bad)} violations over {len(rows)} comparisons "
                                               f"on {cases} instances")


def _tv_exact_vs_direct(rng):
    worst = 0.0
    fam = Bernoulli()
    for _ in range(20):
        a, b = rng.uniform(0, 1, 2)
        for n in range(0, 5):
            direct = tv_exact(fam.dataset_pmf(a, n), fam.dataset_pmf(b, n))
            worst = max(worst, abs(direct - dataset_tv_exact(fam, a, b, n)))
    return PropertyResult("tv-type-classes", worst <= 1e-12, f"max error {worst:.3g}")


def selftest(seed: int = CHECK_SEED) -> list[PropertyResult]:
    rng = make_rng(seed)
    return [_pinsker(rng), _tensorization(rng), _sigmoid_kl(rng), _tv_exact_vs_direct(rng),
            _logistic(rng), _reduction(), _sandwich()]
