"""Acceptance suite: one test per criterion, each reporting a PASS/FAIL line."""

import itertools
import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from priorbounds import cli
from priorbounds.checks import builtin_cases, random_reduction_learners, run_sandwich
from priorbounds.divergences import binary_kl_sum_bound, kl_bernoulli, kl_categorical
from priorbounds.estimation import logistic_closed_form, reduction_check
from priorbounds.experiments import (bernoulli_experiment, learner_separation, log_log_slope,
                                     upper_bound_experiment, zipf_experiment)
from priorbounds.families import Bernoulli
from priorbounds.losses import ABSOLUTE


def report(number, ok, detail, elapsed):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail} ({elapsed:.2f} s)"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def test_criterion_1_inequality_chain():
    with Timer() as t:
        cases = builtin_cases()
        rows = run_sandwich(cases)
    sizes_ok = all(len(c.instance.grid) <= 5 and c.instance.family.support_size <= 3
                   and c.instance.loss.num_actions <= 4 and c.instance.n <= 3 for c in cases)
    kinds = {r.bound.split("(")[0] for r in rows}
    bad = [r for r in rows if r.value > r.ceiling + 1e-9]
    ok = (len(cases) >= 20 and sizes_ok and not bad and t.elapsed < 10
          and {"lecam", "fano", "assouad", "gfano", "bayes-weighted"} <= kinds)
    report(1, ok, f"{len(bad)} violations over {len(rows)} comparisons on {len(cases)} instances",
           t.elapsed)
    assert ok


def test_criterion_2_divergences():
    rng = np.random.default_rng(2)
    with Timer() as t:
        p, q = rng.uniform(0, 1, 10_000), rng.uniform(0, 1, 10_000)
        pinsker_bad = int(np.sum(np.abs(p - q) > np.sqrt(kl_bernoulli(p, q) / 2) + 1e-15))

        tens_err = 0.0
        for _ in range(30):
            m = int(rng.integers(2, 4))
            a, b = rng.dirichlet(np.ones(m)), rng.dirichlet(np.ones(m))
            for n in range(1, 6):
                # product law by brute force over all n-tuples
                kl_n = 0.0
                for x in itertools.product(range(m), repeat=n):
                    pa, pb = np.prod(a[list(x)]), np.prod(b[list(x)])
                    kl_n += pa * math.log(pa / pb)
                tens_err = max(tens_err, abs(kl_n - n * kl_categorical(a, b)))

        xa, xb = rng.normal(0, 4, 10_000), rng.normal(0, 4, 10_000)
        sig_bad = sum(exact > sq for sq, exact in
                      (binary_kl_sum_bound(x, y) for x, y in zip(xa, xb)))
    ok = pinsker_bad == 0 and tens_err <= 1e-9 and sig_bad == 0 and t.elapsed < 5
    report(2, ok, f"pinsker violations {pinsker_bad}, tensorization error {tens_err:.2e}, "
                  f"sigmoid violations {sig_bad}", t.elapsed)
    assert ok


def test_criterion_3_rate():
    ns = tuple(2**k for k in range(4, 13))
    with Timer() as t:
        s = bernoulli_experiment("uniform", ns)
    slope = log_log_slope(s)
    ok = abs(slope + 0.5) <= 0.1 and t.elapsed < 60
    report(3, ok, f"log-log slope {slope:.4f} over n=16..4096", t.elapsed)
    assert ok


def test_criterion_4_bernoulli_figure(tmp_path):
    with Timer() as t:
        series = [bernoulli_experiment("beta"), bernoulli_experiment("uniform")]
        runs = []
        for d in ("a", "b"):
            code = cli.run(["experiment", "bernoulli", "--seed", "11", "--svg",
                            "--out", str(tmp_path / d)])
            runs.append((code, (tmp_path / d / "bernoulli.csv").read_bytes(),
                         (tmp_path / d / "bernoulli.svg").read_bytes()))
    # non-increasing up to 1e-12 relative: n=1 and n=2 tie exactly in real arithmetic
    shape = all(np.all(s.values > 0) and np.all(np.diff(s.values) <= 1e-12 * s.values[:-1])
                for s in series)
    same = runs[0] == runs[1] and runs[0][0] == 0
    ok = shape and same and t.elapsed < 60
    report(4, ok, f"positive non-increasing={shape}, deterministic CSV/SVG={same}", t.elapsed)
    assert ok


def test_criterion_5_logistic():
    rng = np.random.default_rng(5)
    with Timer() as t:
        agree, homog = 0.0, 0.0
        for _ in range(100):
            d, n = int(rng.integers(1, 7)), int(rng.integers(1, 21))
            Z, lam = rng.normal(size=(d, n)), float(rng.uniform(1, 4))
            r = logistic_closed_form(Z, np.full(d, lam))
            reference = d**1.5 / (16 * lam * np.linalg.norm(Z, "fro"))
            agree = max(agree, abs(r.value - reference) / reference)
            c = float(rng.uniform(0.1, 10))
            homog = max(homog, abs(logistic_closed_form(c * Z, lam).value - r.value / c)
                        / (r.value / c))
        unit = logistic_closed_form([[1.0]], 1.0).value
    ok = agree <= 1e-12 and homog <= 1e-12 and unit == 0.0625 and t.elapsed < 1
    report(5, ok, f"max rel diff {agree:.2e}, homogeneity {homog:.2e}, unit case {unit!r}", t.elapsed)
    assert ok


def test_criterion_6_zipf_ordering():
    with Timer() as t:
        curves = zipf_experiment(sizes=(5, 15, 50))
    by = {c.series: c.values for c in curves}
    ok = (np.all(by["actions_5"] >= by["actions_15"]) and np.all(by["actions_15"] >= by["actions_50"])
          and t.elapsed < 120)
    report(6, ok, "|A|=5 >= |A|=15 >= |A|=50 at every n" if ok else "ordering broken", t.elapsed)
    assert ok


def test_criterion_7_upper_separation():
    with Timer() as t:
        _, cells = upper_bound_experiment((10, 50), num_datasets=10_000, seed=0, return_cells=True)
    uniform, prior, concentrated = ("posterior mean Beta(1,1)", "posterior mean Beta(1,2)",
                                    "posterior mean Beta(1,4)")
    details, ok = [], t.elapsed < 300
    for cell in cells:
        for worse, better in ((uniform, prior), (prior, concentrated)):
            sep = learner_separation(cell, worse, better)
            ok &= sep["difference"] > 4 * sep["paired_se"]
            details.append(f"n={cell.n} paired z={sep['paired_z']:.3g} (unpaired {sep['rss_z']:.3g})")
    report(7, ok, "paired separations " + ", ".join(details), t.elapsed)
    assert ok


def test_criterion_8_reduction():
    with Timer() as t:
        triples = random_reduction_learners(100)
        results = [reduction_check(l, p, g, Bernoulli(), ABSOLUTE, n) for g, l, p, n in triples]
    bad = sum(not r.holds or r.method != "exact" for r in results)
    ok = len(results) == 100 and bad == 0 and t.elapsed < 30
    report(8, ok, f"{bad} violations in {len(results)} random learners", t.elapsed)
    assert ok


@pytest.mark.parametrize("experiment,extra", [
    ("bernoulli", []),
    ("logistic", ["--seed", "4"]),
    ("zipf", []),
    ("upper", ["--n-list", "10,50", "--seed", "3"]),
])
def test_criterion_9_manifest_rerun(tmp_path, experiment, extra):
    with Timer() as t:
        first = tmp_path / "first"
        assert cli.run(["experiment", experiment, "--out", str(first), *extra]) == 0
        manifest = first / f"{experiment}.manifest.ini"
        second = tmp_path / "second"
        assert cli.run(["experiment", experiment, "--config", str(manifest),
                        "--out", str(second)]) == 0
    same = (first / f"{experiment}.csv").read_bytes() == (second / f"{experiment}.csv").read_bytes()
    report(9, same, f"{experiment} rerun from manifest byte-identical={same}", t.elapsed)
    assert same
