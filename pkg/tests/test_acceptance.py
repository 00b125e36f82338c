"""Acceptance criteria, each checked at its stated tolerance.

Every criterion prints one ``CRITERION n: PASS|FAIL  detail`` line (in the
pytest terminal summary, or on stdout when run as a script).
"""

import itertools
import math
import time
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

from clustercompare import combinatorics as comb
from clustercompare import mutual_info as mi
from clustercompare import oracle, rand
from clustercompare.core import Clustering
from clustercompare.fixtures import FIXTURES
from clustercompare.oracle import ensemble, exact_expectation
from clustercompare.random_models import (
    closed_form_expectation,
    make_rng,
    monte_carlo_expectation,
    pa_randomize,
    sample_all,
    sample_num,
)

try:
    from conftest import ACCEPTANCE
except ImportError:  # run as a script
    ACCEPTANCE = {}


def _record(number, passed, detail):
    ACCEPTANCE[number] = (passed, detail)
    return passed, detail


def _rel(value, exact):
    return oracle.relative_error(value, exact)


# 1 -------------------------------------------------------------------------

def criterion_1():
    start = time.perf_counter()
    worst, exact_ok, cases = 0.0, True, 0

    def check(value_exact, value_float, truth):
        nonlocal worst, exact_ok, cases
        cases += 1
        exact_ok &= value_exact == truth
        worst = max(worst, _rel(value_float, truth))

    for n in range(2, 9):
        codes = {k: ensemble("num", n, k) for k in range(1, n + 1)}
        for ka, kb in itertools.product(range(1, n + 1), repeat=2):
            truth = exact_expectation("RI", codes[ka], codes[kb])
            check(rand.expected_rand_num(ka, kb, n, fraction=True), rand.expected_rand_num(ka, kb, n), truth)
        for ref in oracle.integer_partitions(n):
            fixed = ensemble("fixed", sizes=ref)
            for ka in range(1, n + 1):
                truth = exact_expectation("RI", codes[ka], fixed)
                check(rand.expected_rand_num_onesided(ka, n, ref, fraction=True),
                      rand.expected_rand_num_onesided(ka, n, ref), truth)
            truth = exact_expectation("RI", ensemble("all", n), fixed)
            check(rand.expected_rand_all_onesided(n, ref, fraction=True),
                  rand.expected_rand_all_onesided(n, ref), truth)
    for n in range(2, 8):
        truth = exact_expectation("RI", ensemble("all", n), ensemble("all", n))
        check(rand.expected_rand_all(n, fraction=True), rand.expected_rand_all(n), truth)
        parts = list(oracle.integer_partitions(n))
        for sa, sb in itertools.product(parts, repeat=2):
            truth = exact_expectation("RI", ensemble("fixed", sizes=sa), ensemble("perm", sizes=sb))
            check(rand.expected_rand_perm(sa, sb, fraction=True), rand.expected_rand_perm(sa, sb), truth)
    elapsed = time.perf_counter() - start
    passed = exact_ok and worst <= 1e-12 and elapsed < 120
    return _record(1, passed, f"{cases} cases, rational match={exact_ok}, "
                              f"max rel err {worst:.2e} (<=1e-12), {elapsed:.1f}s (<120s)")


# 2 -------------------------------------------------------------------------

MI_FORMULAS = ["mi_perm", "entropy_num", "mi_num", "entropy_all", "mi_all",
               "mi_num_onesided", "mi_all_onesided"]


def criterion_2():
    start = time.perf_counter()
    checks = oracle.verify_formulas(7, names=MI_FORMULAS)
    elapsed = time.perf_counter() - start
    worst = max(c.max_rel_error for c in checks)
    limits = {c.name: oracle.FORMULA_LIMITS[c.name] for c in checks}
    passed = all(c.passed for c in checks) and elapsed < 300
    return _record(2, passed, f"{sum(c.cases for c in checks)} cases over {limits}, "
                              f"max rel err {worst:.2e} (<=1e-10), {elapsed:.1f}s (<300s)")


# 3 -------------------------------------------------------------------------

SPOT = {
    "E_num[RI](4;2,2)": Fraction(25, 49),
    "E_all[RI](4)": Fraction(5, 9),
    "E_perm[MI]([2,2],[2,2])": math.log(2) / 3,
}


def criterion_3():
    got = {
        "E_num[RI](4;2,2)": rand.expected_rand_num(2, 2, 4, fraction=True),
        "E_all[RI](4)": rand.expected_rand_all(4, fraction=True),
        "E_perm[MI]([2,2],[2,2])": mi.expected_mi_perm([2, 2], [2, 2], 4),
    }
    oracle_values = {
        "E_num[RI](4;2,2)": exact_expectation("RI", ensemble("num", 4, 2), ensemble("num", 4, 2)),
        "E_all[RI](4)": exact_expectation("RI", ensemble("all", 4), ensemble("all", 4)),
        "E_perm[MI]([2,2],[2,2])": exact_expectation("MI", ensemble("perm", sizes=[2, 2]),
                                                     ensemble("perm", sizes=[2, 2])),
    }
    ok = (got["E_num[RI](4;2,2)"] == SPOT["E_num[RI](4;2,2)"] == oracle_values["E_num[RI](4;2,2)"]
          and got["E_all[RI](4)"] == SPOT["E_all[RI](4)"] == oracle_values["E_all[RI](4)"]
          and _rel(got["E_perm[MI]([2,2],[2,2])"], oracle_values["E_perm[MI]([2,2],[2,2])"]) <= 1e-12
          and math.isclose(got["E_perm[MI]([2,2],[2,2])"], SPOT["E_perm[MI]([2,2],[2,2])"], rel_tol=1e-12))
    return _record(3, ok, "25/49, 5/9 exact; log(2)/3 = "
                          f"{got['E_perm[MI]([2,2],[2,2])']!r}")


# 4 -------------------------------------------------------------------------

BELL_GRID = [50 * 2 ** j for j in range(7)]  # 50 .. 3200, doubling


def criterion_4():
    approx_gap = max(abs(rand.expected_rand_num(ka, kb, 100) - rand.expected_rand_num(ka, kb, 100, approx=True))
                     for ka in range(1, 11) for kb in range(1, 11))

    def bell_gap(n):
        r = comb.bell_ratio(n)
        return abs(r - math.log(n) / n) / r

    dense = [bell_gap(n) for n in range(50, comb.N_MAX + 1)]
    grid = [bell_gap(n) for n in BELL_GRID]
    decreasing = all(b < a for a, b in zip(grid, grid[1:]))
    worst_gap = max(dense + grid)
    passed = approx_gap < 1e-3 and worst_gap <= 0.2 and decreasing
    detail = (f"num approx gap {approx_gap:.2e} (<1e-3); bell_ratio vs log(n)/n relative gap "
              f"max {worst_gap:.3f} over n>=50 (<=0.2), at n={BELL_GRID[-1]} {grid[-1]:.3f}; "
              f"decreasing on log grid={decreasing}")
    return _record(4, passed, detail)


# 5 -------------------------------------------------------------------------

def _random_clustering(rng, n, k_max):
    k = int(rng.integers(1, k_max + 1))
    return Clustering.from_label_sequence(rng.integers(0, k, n).tolist())


def criterion_5():
    rng = make_rng(5)
    violations = 0
    for _ in range(1000):
        n = int(rng.integers(2, 80))
        a, b = _random_clustering(rng, n, n), _random_clustering(rng, n, n)
        chain = [mi.mi_bounds(a, b)[k] for k in mi.NORMALIZERS]
        violations += sum(x > y + 1e-12 for x, y in zip(chain, chain[1:]))
    return _record(5, violations == 0, f"1000 fuzzed pairs, {violations} violations of "
                                       "min<=sqrt<=sum<=max<=max_logk<=log_n")


# 6 -------------------------------------------------------------------------

def _order(scores):
    return sorted(range(len(scores)), key=lambda i: (-scores[i], i))


def criterion_6():
    rng = make_rng(6)
    mismatches = 0
    for _ in range(100):
        n = int(rng.integers(5, 60))
        members = [_random_clustering(rng, n, max(2, n // 2)) for _ in range(5)]
        pairs = list(itertools.combinations(members, 2))
        raw_ri = [rand.rand_index(a, b) for a, b in pairs]
        adj_ri = [rand.adjusted_rand(a, b, "all") for a, b in pairs]
        raw_mi = [mi.mutual_information(a, b) for a, b in pairs]
        adj_mi = [mi.adjusted_mi(a, b, "all") for a, b in pairs]
        mismatches += _order(raw_ri) != _order(adj_ri)
        mismatches += _order(raw_mi) != _order(adj_mi)
    return _record(6, mismatches == 0, f"100 sets x 5 clusterings, {mismatches} order mismatches (RI and MI)")


# 7 -------------------------------------------------------------------------

def criterion_7():
    fixtures = list(FIXTURES.values()) + [Clustering.from_sizes(s) for s in ([3, 3, 2, 1, 1], [5, 5], [1] * 10)]
    worst = 0.0
    for a, b in itertools.permutations(fixtures, 2):
        if a.n_elements != b.n_elements:
            continue
        for ref in (a, b):
            one = rand.expected_rand(a, b, rand.RandModelSpec("perm", "one_sided", ref))
            two = rand.expected_rand(a, b, rand.RandModelSpec("perm"))
            worst = max(worst, abs(one - two))
            one = mi.expected_mi(a, b, mi.MiModelSpec("perm", "one_sided", reference=ref))
            two = mi.expected_mi(a, b, mi.MiModelSpec("perm"))
            worst = max(worst, abs(one - two))
    return _record(7, worst <= 1e-12, f"max |one-sided - two-sided| = {worst:.1e} (<=1e-12)")


# 8 -------------------------------------------------------------------------

MC_CASES = [
    ("RI", "perm", {"sizes_a": [25, 25, 25, 25], "sizes_b": [40, 30, 20, 5, 5]}, "two_sided"),
    ("RI", "num", {"n": 100, "k_a": 10, "k_b": 4}, "two_sided"),
    ("RI", "all", {"n": 100}, "two_sided"),
    ("RI", "num", {"n": 100, "k_a": 10, "reference": [50, 30, 20]}, "one_sided"),
    ("RI", "all", {"n": 100, "reference": [50, 30, 20]}, "one_sided"),
    ("MI", "perm", {"sizes_a": [25, 25, 25, 25], "sizes_b": [40, 30, 20, 5, 5]}, "two_sided"),
    ("MI", "num", {"n": 100, "k_a": 10, "k_b": 4}, "two_sided"),
    ("MI", "all", {"n": 100}, "two_sided"),
    ("MI", "num", {"n": 100, "k_a": 10, "reference": [50, 30, 20]}, "one_sided"),
    ("MI", "all", {"n": 100, "reference": [50, 30, 20]}, "one_sided"),
]


def criterion_8():
    rng = make_rng(8)
    pvalues = []
    for n, k in [(4, 2)] + [(5, k) for k in range(2, 5)]:
        support = list(oracle.enumerate_fixed_k(n, k))
        counts = dict.fromkeys(support, 0)
        for _ in range(1000 * len(support)):
            counts[sample_num(n, k, rng)] += 1
        pvalues.append(stats.chisquare(list(counts.values())).pvalue)
    support = list(oracle.enumerate_all(5))
    counts = dict.fromkeys(support, 0)
    for _ in range(1000 * len(support)):
        counts[sample_all(5, rng)] += 1
    pvalues.append(stats.chisquare(list(counts.values())).pvalue)
    z_scores = []
    for i, (measure, model, params, sided) in enumerate(MC_CASES):
        mean, se = monte_carlo_expectation(measure, model, params, 10000, make_rng(8, i + 1), sided)
        z_scores.append(abs(mean - closed_form_expectation(measure, model, params, sided)) / se)
    passed = min(pvalues) > 1e-3 and max(z_scores) <= 3
    return _record(8, passed, f"chi-square min p {min(pvalues):.3g} (>1e-3) over {len(pvalues)} supports; "
                              f"MC max |z| {max(z_scores):.2f} (<=3) over {len(z_scores)} expectations")


# 9 -------------------------------------------------------------------------

def decile_range(values, keys):
    edges = np.quantile(keys, np.linspace(0, 1, 11))
    bins = np.clip(np.searchsorted(edges, keys, side="right") - 1, 0, 9)
    means = [values[bins == i].mean() for i in range(10) if (bins == i).any()]
    return max(means) - min(means)


def criterion_9():
    start = time.perf_counter()
    points = pa_randomize(Clustering.from_sizes([20] * 10), 100_000, make_rng(9), record_every=100)
    elapsed = time.perf_counter() - start
    kept = [p for p in points if p.step > 10_000]
    ent = np.array([p.size_entropy_bits for p in kept])
    ap = np.array([p.ari_perm for p in kept])
    an = np.array([p.ari_num for p in kept])
    mean_perm = abs(ap.mean())
    range_num, range_perm = decile_range(an, ent), decile_range(ap, ent)
    rho, p = stats.spearmanr(an, ent)
    passed = mean_perm < 0.05 and range_num > 5 * range_perm and rho > 0 and p < 0.01 and elapsed < 60
    return _record(9, passed, f"|mean ARI_perm| {mean_perm:.4f} (<0.05); decile range ARI_num "
                              f"{range_num:.3f} vs ARI_perm {range_perm:.4f} (>5x); Spearman rho {rho:.3f} "
                              f"p {p:.1e} (<0.01); {elapsed:.1f}s (<60s)")


# 10 ------------------------------------------------------------------------

def criterion_10():
    timings, identical = {}, True
    for ka, kb in [(2, 2), (10, 20), (20, 20)]:
        start = time.perf_counter()
        single = mi.expected_mi_num(ka, kb, 300, workers=1)
        timings[(ka, kb)] = time.perf_counter() - start
        identical &= single == mi.expected_mi_num(ka, kb, 300, workers=8)
    worst = max(timings.values())
    passed = worst < 60 and identical
    return _record(10, passed, f"N=300 slowest single-threaded {worst:.1f}s (<60s) over K pairs "
                               f"{list(timings)}; 1 vs 8 threads bit-identical={identical}")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 11)])
def test_acceptance(criterion):
    passed, detail = criterion()
    assert passed, detail


if __name__ == "__main__":
    for number, criterion in enumerate(CRITERIA, start=1):
        passed, detail = criterion()
        print(f"CRITERION {number}: {'PASS' if passed else 'FAIL'}  {detail}")
