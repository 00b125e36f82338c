"""Mutual information, its normalizations, and its expectation under the
permutation, fixed-cluster-count and all-partitions random models.

All values are in nats.  Expectations over random partitions are written in
terms of the expected number of clusters of each size (``w_a``) and the
hypergeometric law of the overlap between two random subsets of sizes ``a``
and ``b``.  The triple sums are evaluated row by row (one row per size ``a``)
with numpy, each row is summed with ``math.fsum`` and the row totals are
summed again with ``math.fsum`` in row order.  The result therefore does not
depend on how rows are distributed over worker threads.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import combinatorics as comb
from .core import (
    Clustering,
    adjust_for_chance,
    check_sizes,
    contingency,
    entropy,
)
from .errors import DomainError, UndefinedAdjustmentError

THREADS_ENV = "CLUSTERCOMPARE_THREADS"

NORMALIZERS = ("min", "sqrt", "sum", "max", "max_logk", "log_n")
MODELS = ("none", "perm", "num", "all")
DEFAULT_NORMALIZER = {"none": "sum", "perm": "sum", "num": "max", "all": "log_n"}


@dataclass(frozen=True)
class MiModelSpec:
    """Random model, sidedness and maximum bound used to adjust MI.

    ``normalizer=None`` picks the model default (``sum`` for none/perm,
    ``max`` of the log cluster counts for num).  Under ``all`` the bound is
    always ``log N`` and the normalizer is recorded as ``log_n``.
    """

    model: str = "perm"
    sided: str = "two_sided"
    normalizer: str | None = None
    reference: Clustering | None = None

    def __post_init__(self):
        if self.model not in MODELS:
            raise DomainError(f"unknown MI model {self.model!r}; expected one of {MODELS}")
        if self.sided not in ("two_sided", "one_sided"):
            raise DomainError(f"unknown sidedness {self.sided!r}")
        if self.sided == "one_sided" and self.reference is None:
            raise DomainError("a one-sided model needs a reference clustering")
        norm = self.normalizer or DEFAULT_NORMALIZER[self.model]
        if norm not in NORMALIZERS:
            raise DomainError(f"unknown normalizer {norm!r}; expected one of {NORMALIZERS}")
        if self.model == "all":
            norm = "log_n"
        elif self.model == "num" and norm == "log_n":
            raise DomainError("under the num model the bound comes from log K; log_n is not allowed")
        object.__setattr__(self, "normalizer", norm)


def _nonneg(x: float) -> float:
    return x if x > 0 else 0.0


def mutual_information(a: Clustering, b: Clustering) -> float:
    t = contingency(a, b)
    n = t.n_elements
    rows, cols = t.row_sums, t.col_sums
    terms = ((c / n) * math.log(c * n / (rows[k] * cols[m])) for k, m, c in t.cells)
    return _nonneg(math.fsum(terms))


def _combine(x: float, y: float, kind: str) -> float:
    if kind == "min":
        return min(x, y)
    if kind == "sqrt":
        return math.sqrt(x * y)
    if kind == "sum":
        return 0.5 * (x + y)
    if kind in ("max", "max_logk"):
        return max(x, y)
    raise DomainError(f"normalizer {kind!r} does not combine two bounds")


def mi_bounds(a: Clustering, b: Clustering) -> dict[str, float]:
    """The six MI upper bounds for a concrete pair, from tightest to loosest."""
    ha, hb = entropy(a.sizes), entropy(b.sizes)
    out = {kind: _combine(ha, hb, kind) for kind in ("min", "sqrt", "sum", "max")}
    out["max_logk"] = max(math.log(a.n_clusters), math.log(b.n_clusters))
    out["log_n"] = math.log(a.n_elements)
    return out


def nmi(a: Clustering, b: Clustering, normalizer: str = "sum") -> float:
    if normalizer not in NORMALIZERS:
        raise DomainError(f"unknown normalizer {normalizer!r}")
    bound = mi_bounds(a, b)[normalizer]
    if bound <= 0:
        raise UndefinedAdjustmentError(
            f"the {normalizer} bound is 0 (both clusterings carry no information)"
        )
    return mutual_information(a, b) / bound


# -- hypergeometric kernel --------------------------------------------------

def _threads(workers: int | None) -> int:
    if workers is None:
        workers = int(os.environ.get(THREADS_ENV, "1") or 1)
    return max(1, int(workers))


def _row_partial(n: int, a: int, weight_a: float, bs: np.ndarray, weights_b: np.ndarray,
                 mode: str) -> float:
    """``weight_a * sum_b weights_b[b] * sum_n term(n) * P(n | a, b)``.

    ``mode='joint'`` uses ``(n/N) log(n/N)``; ``mode='mi'`` uses
    ``(n/N) log(N n / (a b))``.  Terms with ``n = 0`` vanish.
    """
    if weight_a == 0.0 or len(bs) == 0:
        return 0.0
    lf = comb.log_factorials(n)
    ns = np.arange(1, a + 1)
    b = bs[:, None]
    valid = (ns[None, :] <= b) & (ns[None, :] >= a + b - n)
    if not valid.any():
        return 0.0
    nn = np.broadcast_to(ns[None, :], valid.shape)[valid]
    bb = np.broadcast_to(b, valid.shape)[valid]
    wb = np.broadcast_to(weights_b[:, None], valid.shape)[valid]
    log_pmf = (
        lf[bb] - lf[nn] - lf[bb - nn]
        + lf[n - bb] - lf[a - nn] - lf[n - bb - a + nn]
        - (lf[n] - lf[a] - lf[n - a])
    )
    if mode == "joint":
        logs = np.log(nn / n)
    else:
        logs = np.log(nn) + (math.log(n) - math.log(a)) - np.log(bb)
    terms = (weight_a * wb) * (nn / n) * logs * np.exp(log_pmf)
    return math.fsum(terms.tolist())


def _hypergeom_sum(n: int, rows, mode: str, workers: int | None) -> float:
    """fsum of ``_row_partial`` over ``rows = [(a, w_a, bs, w_bs), ...]``."""
    workers = _threads(workers)
    if workers == 1 or len(rows) < 2:
        partials = [_row_partial(n, a, wa, bs, wbs, mode) for a, wa, bs, wbs in rows]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(lambda r: _row_partial(n, *r, mode), rows))
    return math.fsum(partials)


def _size_weights(sizes: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    values, counts = np.unique(np.asarray(sizes, dtype=np.int64), return_counts=True)
    return values, counts.astype(float)


def _num_weights(k: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Expected number of clusters of each size ``a = 1 .. N-K+1`` in a
    uniform partition of ``N`` elements into ``K`` clusters.
    """
    if not 1 <= k <= n:
        raise DomainError(f"K must satisfy 1 <= K <= N, got K={k}, N={n}")
    table = comb.stirling_table(n)
    lf = comb.log_factorials(n)
    sizes = np.arange(1, n - k + 2)
    log_s = table.column(k - 1, n)[n - sizes]
    log_w = lf[n] - lf[sizes] - lf[n - sizes] + log_s - table.log(n, k)
    return sizes, np.exp(log_w)


def _all_weights(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Expected number of clusters of each size in a uniform partition."""
    logs = comb.bell_sequence(n).log_values
    lf = comb.log_factorials(n)
    sizes = np.arange(1, n + 1)
    log_w = lf[n] - lf[sizes] - lf[n - sizes] + logs[n - sizes] - logs[n]
    return sizes, np.exp(log_w)


def _expected_entropy(sizes: np.ndarray, weights: np.ndarray, n: int) -> float:
    p = sizes / n
    return _nonneg(-math.fsum((weights * p * np.log(p)).tolist()))


def _cross_rows(sa, wa, sb, wb):
    return [(int(a), float(w), sb, wb) for a, w in zip(sa, wa)]


def _symmetric_rows(sizes, weights):
    # pairs (a, b) with b < a counted twice, diagonal once
    rows = []
    for i, (a, w) in enumerate(zip(sizes, weights)):
        bs = sizes[: i + 1]
        wbs = weights[: i + 1] * 2.0
        wbs[-1] = weights[i]
        rows.append((int(a), float(w), bs, wbs))
    return rows


def _n_and_sizes(reference, n: int | None) -> tuple[int, tuple[int, ...]]:
    sizes = reference.sizes if isinstance(reference, Clustering) else reference
    sizes = check_sizes(sizes, n)
    return sum(sizes), sizes


# -- permutation model --------------------------------------------------------

def expected_mi_perm(sizes_a: Sequence[int], sizes_b: Sequence[int], n: int | None = None,
                     *, workers: int | None = None) -> float:
    """Expected MI when elements are shuffled between clusters of fixed sizes."""
    sizes_a = check_sizes(sizes_a, n)
    n = sum(sizes_a)
    sizes_b = check_sizes(sizes_b, n)
    if len(sizes_a) == 1 or len(sizes_b) == 1:
        return 0.0
    sa, wa = _size_weights(sizes_a)
    sb, wb = _size_weights(sizes_b)
    return _nonneg(_hypergeom_sum(n, _cross_rows(sa, wa, sb, wb), "mi", workers))


# -- fixed number of clusters -----------------------------------------------

def expected_entropy_num(k: int, n: int) -> float:
    if k == 1:
        return 0.0
    sizes, w = _num_weights(k, n)
    return _expected_entropy(sizes, w, n)


def expected_joint_entropy_num(k_a: int, k_b: int, n: int, *, workers: int | None = None) -> float:
    sa, wa = _num_weights(k_a, n)
    sb, wb = _num_weights(k_b, n)
    return _nonneg(-_hypergeom_sum(n, _cross_rows(sa, wa, sb, wb), "joint", workers))


def expected_mi_num(k_a: int, k_b: int, n: int, *, workers: int | None = None) -> float:
    """Expected MI between two independent uniform partitions with ``k_a`` and
    ``k_b`` clusters.  Cost is O(N^3); ``workers`` threads (default from the
    ``CLUSTERCOMPARE_THREADS`` environment variable) share the rows without
    changing the result.
    """
    for k in (k_a, k_b):
        if not 1 <= k <= n:
            raise DomainError(f"K must satisfy 1 <= K <= N, got K={k}, N={n}")
    if k_a == 1 or k_b == 1:
        return 0.0
    joint = expected_joint_entropy_num(k_a, k_b, n, workers=workers)
    return _nonneg(expected_entropy_num(k_a, n) + expected_entropy_num(k_b, n) - joint)


def expected_mi_num_onesided(k_a: int, n: int, reference, *, workers: int | None = None) -> float:
    n, g = _n_and_sizes(reference, n)
    if not 1 <= k_a <= n:
        raise DomainError(f"K_a must satisfy 1 <= K_a <= N, got K_a={k_a}, N={n}")
    if k_a == 1 or len(g) == 1:
        return 0.0
    sa, wa = _num_weights(k_a, n)
    sg, wg = _size_weights(g)
    joint = -_hypergeom_sum(n, _cross_rows(sa, wa, sg, wg), "joint", workers)
    return _nonneg(expected_entropy_num(k_a, n) + entropy(g, n) - joint)


# -- all partitions -----------------------------------------------------------

def expected_entropy_all(n: int) -> float:
    if n < 1:
        raise DomainError("N must be at least 1")
    sizes, w = _all_weights(n)
    return _expected_entropy(sizes, w, n)


def expected_joint_entropy_all(n: int, *, symmetric: bool = True,
                               workers: int | None = None) -> float:
    sizes, w = _all_weights(n)
    rows = _symmetric_rows(sizes, w) if symmetric else _cross_rows(sizes, w, sizes, w)
    return _nonneg(-_hypergeom_sum(n, rows, "joint", workers))


def expected_mi_all(n: int, *, symmetric: bool = True, workers: int | None = None) -> float:
    """Expected MI between two independent uniform partitions of ``n`` elements.

    ``symmetric`` folds the ``(a, b)`` and ``(b, a)`` terms of the joint
    entropy together; ``symmetric=False`` evaluates the plain double sum.
    """
    if n < 2:
        raise DomainError("N must be at least 2")
    joint = expected_joint_entropy_all(n, symmetric=symmetric, workers=workers)
    return _nonneg(2.0 * expected_entropy_all(n) - joint)


def expected_mi_all_onesided(n: int, reference, *, workers: int | None = None) -> float:
    n, g = _n_and_sizes(reference, n)
    if len(g) == 1:
        return 0.0
    sa, wa = _all_weights(n)
    sg, wg = _size_weights(g)
    joint = -_hypergeom_sum(n, _cross_rows(sa, wa, sg, wg), "joint", workers)
    return _nonneg(expected_entropy_all(n) + entropy(g, n) - joint)


# -- bounds and adjustment ----------------------------------------------------

def _side_summary(x, n: int | None):
    """(entropy, K, N) from a Clustering or a size sequence."""
    if isinstance(x, Clustering):
        return entropy(x.sizes), x.n_clusters, x.n_elements
    sizes = check_sizes(x, n)
    return entropy(sizes), len(sizes), sum(sizes)


def mi_max_bound(spec: MiModelSpec, a, b=None, n: int | None = None) -> float:
    """Maximum of MI used to normalize or adjust under ``spec``.

    ``a``/``b`` are Clusterings or size sequences; under ``num`` they may
    also be cluster counts, and under ``all`` only ``n`` is needed.  For
    one-sided comparisons ``b`` is the reference, whose entropy enters the
    bound directly.
    """
    if spec.model == "all":
        if n is None:
            n = a.n_elements if isinstance(a, Clustering) else sum(check_sizes(a))
        bound = math.log(n)
    elif spec.model == "num":
        ka = a.n_clusters if isinstance(a, Clustering) else int(a)
        x = math.log(ka)
        if spec.sided == "one_sided":
            y = _side_summary(b, n)[0]
        else:
            y = math.log(b.n_clusters if isinstance(b, Clustering) else int(b))
        bound = _combine(x, y, spec.normalizer)
    else:
        ha, ka, n_a = _side_summary(a, n)
        hb, kb, _ = _side_summary(b, n_a)
        if spec.normalizer == "max_logk":
            bound = max(math.log(ka), math.log(kb))
        elif spec.normalizer == "log_n":
            bound = math.log(n_a)
        else:
            bound = _combine(ha, hb, spec.normalizer)
    if bound <= 0:
        raise UndefinedAdjustmentError(
            f"the MI bound ({spec.normalizer}) is 0; both clusterings are trivial under {spec.model}"
        )
    return bound


def _split_reference(a: Clustering, b: Clustering, reference: Clustering):
    if reference is b or reference == b:
        return a, b
    if reference is a or reference == a:
        return b, a
    raise DomainError("the reference clustering must be one of the two compared clusterings")


def expected_mi(a: Clustering, b: Clustering, spec: MiModelSpec,
                *, workers: int | None = None) -> float:
    n = a.n_elements
    if spec.model == "none":
        return 0.0
    if spec.model == "perm":
        return expected_mi_perm(a.sizes, b.sizes, n, workers=workers)
    if spec.sided == "one_sided":
        rnd, ref = _split_reference(a, b, spec.reference)
        if spec.model == "num":
            return expected_mi_num_onesided(rnd.n_clusters, n, ref, workers=workers)
        return expected_mi_all_onesided(n, ref, workers=workers)
    if spec.model == "num":
        return expected_mi_num(a.n_clusters, b.n_clusters, n, workers=workers)
    return expected_mi_all(n, workers=workers)


def max_bound_for(a: Clustering, b: Clustering, spec: MiModelSpec) -> float:
    if spec.sided == "one_sided" and spec.model != "all":
        rnd, ref = _split_reference(a, b, spec.reference)
        return mi_max_bound(spec, rnd, ref)
    return mi_max_bound(spec, a, b)


def adjusted_mi(a: Clustering, b: Clustering, spec: MiModelSpec | str = "perm",
                *, workers: int | None = None) -> float:
    """MI corrected for chance: ``(MI - E) / (max - E)``.

    Under ``model='none'`` the expectation is 0 and this is plain NMI.
    """
    if isinstance(spec, str):
        spec = MiModelSpec(spec)
    raw = mutual_information(a, b)
    bound = max_bound_for(a, b, spec)
    return adjust_for_chance(raw, expected_mi(a, b, spec, workers=workers), bound)
