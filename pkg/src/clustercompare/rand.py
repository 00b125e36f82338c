"""Rand index and its expectation under the three random clustering models.

``perm`` fixes both size sequences and shuffles elements, ``num`` draws
uniformly among partitions with a fixed number of clusters, ``all`` draws
uniformly among every partition of the element set.  One-sided variants hold
a reference clustering fixed and draw only the other side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import combinatorics as comb
from .core import (
    Clustering,
    adjust_for_chance,
    check_sizes,
    co_pairs,
    contingency,
    pair_counts,
)
from .errors import DomainError

MODELS = ("perm", "num", "all")
SIDES = ("two_sided", "one_sided")


@dataclass(frozen=True)
class RandModelSpec:
    model: str
    sided: str = "two_sided"
    reference: Clustering | None = None
    approx: bool = False

    def __post_init__(self):
        if self.model not in MODELS:
            raise DomainError(f"unknown Rand model {self.model!r}; expected one of {MODELS}")
        if self.sided not in SIDES:
            raise DomainError(f"unknown sidedness {self.sided!r}")
        if self.sided == "one_sided" and self.reference is None:
            raise DomainError("a one-sided model needs a reference clustering")
        if self.approx and self.model == "perm":
            raise DomainError("the permutation model has no asymptotic form")

    @property
    def equivalent_to_two_sided(self) -> bool:
        """One-sided perm draws the same ensemble as two-sided perm."""
        return self.model == "perm" and self.sided == "one_sided"


def _n_pairs(n: int) -> int:
    if n < 2:
        raise DomainError(f"the Rand index needs at least two elements, got N={n}")
    return n * (n - 1) // 2


def rand_index(a: Clustering, b: Clustering) -> float:
    """Fraction of element pairs on which ``a`` and ``b`` agree."""
    pc = pair_counts(contingency(a, b))
    return (pc.n11 + pc.n00) / _n_pairs(a.n_elements)


def _ratio(p: Fraction, fraction: bool):
    return p if fraction else float(p)


def expected_rand_perm(sizes_a: Sequence[int], sizes_b: Sequence[int], n: int | None = None,
                       *, fraction: bool = False):
    sizes_a = check_sizes(sizes_a, n)
    sizes_b = check_sizes(sizes_b, sum(sizes_a))
    m = _n_pairs(sum(sizes_a))
    qa, qb = co_pairs(sizes_a), co_pairs(sizes_b)
    value = Fraction(2 * qa * qb - m * (qa + qb) + m * m, m * m)
    return _ratio(value, fraction)


def _check_k(k: int, n: int, name: str = "K") -> None:
    if not 1 <= k <= n:
        raise DomainError(f"{name} must satisfy 1 <= {name} <= N, got {name}={k}, N={n}")


def _pair_prob_num(n: int, k: int, fraction: bool):
    if fraction:
        if k == n:
            return Fraction(0)
        return Fraction(comb.stirling2_exact(n - 1, k), comb.stirling2_exact(n, k))
    return comb.stirling_ratio(n, k)


def _pair_prob_all(n: int, fraction: bool):
    if fraction:
        return Fraction(comb.bell_exact(n - 1), comb.bell_exact(n))
    return comb.bell_ratio(n)


def _agree(p, q):
    return p * q + (1 - p) * (1 - q)


def expected_rand_num(k_a: int, k_b: int, n: int | None = None, *, approx: bool = False,
                      fraction: bool = False):
    """Expected Rand index when both sides are uniform over ``k``-cluster
    partitions.  ``approx`` uses ``S(N, K) ~ K^N / K!``, i.e. a pair
    probability of ``1/K``, and does not need ``n``.
    """
    if approx:
        if n is not None:
            _check_k(k_a, n, "K_a")
            _check_k(k_b, n, "K_b")
        if k_a < 1 or k_b < 1:
            raise DomainError("cluster counts must be positive")
        pa, pb = Fraction(1, k_a), Fraction(1, k_b)
        return _ratio(_agree(pa, pb), fraction)
    if n is None:
        raise DomainError("the exact M_num expectation needs N")
    _n_pairs(n)
    _check_k(k_a, n, "K_a")
    _check_k(k_b, n, "K_b")
    pa = _pair_prob_num(n, k_a, fraction)
    pb = _pair_prob_num(n, k_b, fraction)
    return _agree(pa, pb)


def expected_rand_all(n: int, *, approx: bool = False, fraction: bool = False):
    _n_pairs(n)
    if approx:
        r = math.log(n) / n
        return _agree(r, r)
    r = _pair_prob_all(n, fraction)
    return _agree(r, r)


def _reference_pair_fraction(reference, n: int | None, fraction: bool):
    sizes = reference.sizes if isinstance(reference, Clustering) else reference
    sizes = check_sizes(sizes, n)
    n = sum(sizes)
    value = Fraction(co_pairs(sizes), _n_pairs(n))
    return n, (value if fraction else float(value))


def expected_rand_num_onesided(k_a: int, n: int, reference, *, approx: bool = False,
                               fraction: bool = False):
    """Expected Rand index between a uniform ``k_a``-cluster partition and a
    fixed reference (a Clustering or its size sequence).  ``approx`` uses the
    pair probability ``1/k_a``.
    """
    n, g = _reference_pair_fraction(reference, n, fraction)
    _check_k(k_a, n, "K_a")
    if approx:
        p = Fraction(1, k_a) if fraction else 1 / k_a
        return _agree(p, g)
    return _agree(_pair_prob_num(n, k_a, fraction), g)


def expected_rand_all_onesided(n: int, reference, *, approx: bool = False,
                               fraction: bool = False):
    """``approx`` uses the pair probability ``log(N)/N``."""
    n, g = _reference_pair_fraction(reference, n, fraction and not approx)
    if approx:
        return _agree(math.log(n) / n, g)
    return _agree(_pair_prob_all(n, fraction), g)


def split_reference(a: Clustering, b: Clustering, reference: Clustering):
    """Return ``(random_side, reference_side)`` for a one-sided comparison."""
    if reference is b or reference == b:
        return a, b
    if reference is a or reference == a:
        return b, a
    raise DomainError("the reference clustering must be one of the two compared clusterings")


def expected_rand(a: Clustering, b: Clustering, spec: RandModelSpec) -> float:
    """Model expectation for the comparison of ``a`` with ``b`` under ``spec``."""
    n = a.n_elements
    if spec.model == "perm":
        return expected_rand_perm(a.sizes, b.sizes, n)
    if spec.sided == "one_sided":
        rnd, ref = split_reference(a, b, spec.reference)
        if spec.model == "num":
            return expected_rand_num_onesided(rnd.n_clusters, n, ref, approx=spec.approx)
        return expected_rand_all_onesided(n, ref, approx=spec.approx)
    if spec.model == "num":
        return expected_rand_num(a.n_clusters, b.n_clusters, n, approx=spec.approx)
    return expected_rand_all(n, approx=spec.approx)


def adjusted_rand(a: Clustering, b: Clustering, spec: RandModelSpec | str = "perm") -> float:
    """Rand index corrected for chance under ``spec`` (maximum is always 1).

    Raises UndefinedAdjustmentError when the expectation is 1, e.g. two
    single-cluster partitions under ``num``.
    """
    if isinstance(spec, str):
        spec = RandModelSpec(spec)
    return adjust_for_chance(rand_index(a, b), expected_rand(a, b, spec), 1.0)
