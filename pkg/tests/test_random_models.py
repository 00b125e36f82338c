import collections
import math

import numpy as np
import pytest
from scipy import stats

from clustercompare import combinatorics as comb
from clustercompare.core import Clustering
from clustercompare.errors import DomainError
from clustercompare.oracle import enumerate_all, enumerate_fixed_k
from clustercompare.random_models import (
    closed_form_expectation,
    make_rng,
    monte_carlo_expectation,
    num_labels,
    pa_randomize,
    sample_all,
    sample_num,
    sample_perm,
)


def test_make_rng_streams():
    a = make_rng(42).integers(0, 1 << 30, 5)
    b = make_rng(42).integers(0, 1 << 30, 5)
    c = make_rng(42, 1).integers(0, 1 << 30, 5)
    assert (a == b).all() and not (a == c).all()
    assert (make_rng(42, 1).random(3) == make_rng(43).random(3)).all()
    with pytest.raises(DomainError):
        make_rng(-1)
    with pytest.raises(DomainError):
        make_rng(1 << 64)


def test_sample_perm_trivial_templates():
    rng = make_rng(1)
    one = Clustering.from_sizes([6])
    singles = Clustering.from_sizes([1] * 6)
    for _ in range(20):
        assert sample_perm(one, rng) == one
        assert sample_perm(singles, rng) == singles


def test_sample_perm_orbit_frequencies():
    rng = make_rng(2)
    template = Clustering.from_sizes([2, 2])
    draws = 30000
    counts = collections.Counter(sample_perm(template, rng) for _ in range(draws))
    assert len(counts) == 3
    sigma = math.sqrt(draws * (1 / 3) * (2 / 3))
    for c in counts.values():
        assert abs(c - draws / 3) <= 3 * sigma
    assert all(c.sizes == (2, 2) for c in counts)


def test_sample_num_trivial_cases():
    rng = make_rng(3)
    for _ in range(10):
        assert sample_num(7, 7, rng).sizes == (1,) * 7
        assert sample_num(7, 1, rng).sizes == (7,)
    with pytest.raises(DomainError):
        sample_num(3, 4, rng)


def _chi2_uniform(draws, support):
    counts = collections.Counter(draws)
    assert set(counts) <= set(support)
    observed = [counts.get(c, 0) for c in support]
    return stats.chisquare(observed).pvalue


def test_sample_num_uniform_n4_k2():
    rng = make_rng(4)
    support = list(enumerate_fixed_k(4, 2))
    assert len(support) == 7
    draws = [sample_num(4, 2, rng) for _ in range(70000)]
    assert _chi2_uniform(draws, support) > 1e-3


@pytest.mark.parametrize("n", [3, 4, 5])
def test_sample_num_uniform_each_k(n):
    for k in range(1, n + 1):
        rng = make_rng(100 + 10 * n + k)
        support = list(enumerate_fixed_k(n, k))
        draws = [sample_num(n, k, rng) for _ in range(1000 * len(support))]
        assert all(d.n_clusters == k for d in draws)
        if len(support) > 1:
            assert _chi2_uniform(draws, support) > 1e-3


def test_sample_all_uniform():
    rng = make_rng(5)
    assert sample_all(1, rng).sizes == (1,)
    support = list(enumerate_all(3))
    assert _chi2_uniform([sample_all(3, rng) for _ in range(50000)], support) > 1e-3
    support = list(enumerate_all(5))
    assert _chi2_uniform([sample_all(5, rng) for _ in range(52000)], support) > 1e-3


def test_sample_all_pair_probability():
    rng = make_rng(6)
    n, draws = 30, 20000
    hits = sum(int(labels[0] == labels[1]) for labels in
               (sample_all(n, rng).labels for _ in range(draws)))
    p = comb.bell_ratio(n)
    assert abs(hits / draws - p) <= 3 * math.sqrt(p * (1 - p) / draws)


def test_samplers_are_deterministic():
    a = [num_labels(50, 7, make_rng(9)).tolist() for _ in range(2)]
    assert a[0] == a[1]
    x = [sample_all(40, make_rng(9, 3)) for _ in range(2)]
    assert x[0].labels == x[1].labels


def test_pa_initial_point_and_invariants():
    start = Clustering.from_sizes([20] * 10)
    pts = pa_randomize(start, 0, make_rng(0), 10)
    assert len(pts) == 1
    p = pts[0]
    assert p.step == 0 and p.ari_perm == 1.0 and p.ari_num == 1.0
    assert p.size_entropy_bits == pytest.approx(math.log2(10), rel=1e-14)
    with pytest.raises(DomainError):
        pa_randomize(Clustering.from_sizes([5]), 10, make_rng(0))


def test_pa_keeps_cluster_count():
    start = Clustering.from_sizes([3, 1, 1, 5])
    pts = pa_randomize(start, 100_000, make_rng(1), 1000)
    assert [p.step for p in pts] == list(range(0, 100_001, 1000))
    for p in pts:
        assert p.size_entropy_bits <= math.log2(4) + 1e-12
        assert p.size_entropy_bits > 0


def test_pa_entropy_drops_and_is_reproducible():
    start = Clustering.from_sizes([20] * 10)
    a = pa_randomize(start, 20000, make_rng(7), 500)
    b = pa_randomize(start, 20000, make_rng(7), 500)
    assert a == b
    assert min(p.size_entropy_bits for p in a) < math.log2(10) - 0.1


@pytest.mark.parametrize("measure,model,params", [
    ("RI", "all", {"n": 100}),
    ("RI", "num", {"n": 100, "k_a": 10, "k_b": 10}),
    ("MI", "perm", {"sizes_a": [5, 5, 5, 5], "sizes_b": [5, 5, 5, 5]}),
])
def test_monte_carlo_examples(measure, model, params):
    mean, se = monte_carlo_expectation(measure, model, params, 10000, make_rng(8))
    assert abs(mean - closed_form_expectation(measure, model, params)) <= 3 * se


def test_monte_carlo_validation():
    rng = make_rng(0)
    with pytest.raises(DomainError):
        monte_carlo_expectation("RI", "all", {"n": 10}, 1, rng)
    with pytest.raises(DomainError):
        monte_carlo_expectation("VI", "all", {"n": 10}, 10, rng)
    with pytest.raises(DomainError):
        monte_carlo_expectation("RI", "num", {"n": 10}, 10, rng)
    with pytest.raises(DomainError):
        monte_carlo_expectation("RI", "all", {"n": 10}, 10, rng, sided="one_sided")
    mean, se = monte_carlo_expectation("RI", "num", {"n": 12, "k_a": 3, "reference": [4, 4, 4]},
                                       4000, rng, sided="one_sided")
    assert np.isfinite(mean) and se > 0
