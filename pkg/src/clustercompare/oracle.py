"""Exhaustive enumeration of small partition ensembles and the exact
expectations they imply.

Partitions are enumerated as restricted growth strings (``codes[0] = 0`` and
``codes[i] <= 1 + max(codes[:i])``) in lexicographic order.  Rand index
averages are exact rationals.  Entropy and MI averages are reduced to integer
coefficients of ``log j`` and evaluated with mpmath at 40 digits.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator

import mpmath
import numpy as np

from . import combinatorics as comb
from . import mutual_info as mi
from . import rand
from .core import Clustering, check_sizes
from .errors import DomainError, EnumerationLimitError

MAX_N = 12
MAX_PERM_N = 8
MP_DIGITS = 40
MEASURES = ("RI", "MI", "H", "H_joint")


def _check_n(n: int) -> None:
    if n < 1:
        raise DomainError("N must be at least 1")
    if n > MAX_N:
        raise EnumerationLimitError(
            f"refusing to enumerate partitions of N={n} elements: B_{n} = "
            f"{comb.bell_exact(n)} exceeds the ceiling N <= {MAX_N}"
        )


def rgs_codes(n: int, k: int | None = None) -> Iterator[tuple[int, ...]]:
    """Restricted growth strings of length ``n`` in lexicographic order,
    optionally only those with exactly ``k`` distinct values.
    """
    _check_n(n)
    if k is not None and not 1 <= k <= n:
        raise DomainError(f"K must satisfy 1 <= K <= N, got K={k}, N={n}")
    top = n if k is None else k  # largest number of blocks allowed

    def complete(codes, maxes, start):
        # smallest suffix from position ``start`` that keeps exactly k blocks reachable
        m = maxes[start - 1] if start else -1
        need = 0 if k is None else (k - 1) - m
        free = n - start - need
        for i in range(start, n):
            if i - start < free:
                codes[i] = 0
            else:
                codes[i] = m + 1
                m += 1
            maxes[i] = max(maxes[i - 1], codes[i]) if i else codes[i]

    codes = [0] * n
    maxes = [0] * n
    complete(codes, maxes, 0)
    while True:
        yield tuple(codes)
        i = n - 1
        while i > 0:
            c = codes[i] + 1
            m = max(maxes[i - 1], c)
            if c <= maxes[i - 1] + 1 and m < top and (k is None or (k - 1) - m <= n - 1 - i):
                codes[i] = c
                maxes[i] = m
                complete(codes, maxes, i + 1)
                break
            i -= 1
        else:
            return


def _clustering(codes) -> Clustering:
    return Clustering(tuple(range(len(codes))), tuple(codes))


def enumerate_all(n: int) -> Iterator[Clustering]:
    """Every partition of ``0 .. n-1`` once, in restricted-growth order."""
    return map(_clustering, rgs_codes(n))


def enumerate_fixed_k(n: int, k: int) -> Iterator[Clustering]:
    return map(_clustering, rgs_codes(n, k))


def _check_perm(n: int) -> None:
    if n > MAX_PERM_N:
        raise EnumerationLimitError(
            f"refusing to enumerate {math.factorial(n)} permutations of N={n} elements "
            f"(ceiling N <= {MAX_PERM_N})"
        )


def orbit_labels(template: Clustering) -> Iterator[tuple[int, ...]]:
    _check_perm(template.n_elements)
    return itertools.permutations(template.labels)


def enumerate_perm_orbit(template: Clustering) -> Iterator[Clustering]:
    """One relabeled copy of ``template`` per element permutation (N! items)."""
    return (Clustering(template.elements, labels) for labels in orbit_labels(template))


# -- ensembles as code matrices ------------------------------------------------

@dataclass(frozen=True)
class Ensemble:
    """One side of a random model, in a form the oracle can enumerate."""

    model: str
    n: int
    k: int | None = None
    sizes: tuple | None = None

    def codes(self) -> np.ndarray:
        if self.model == "perm":
            _check_perm(self.n)
            template = np.repeat(np.arange(len(self.sizes)), self.sizes)
            rows = itertools.permutations(template.tolist())
        elif self.model == "num":
            rows = rgs_codes(self.n, self.k)
        elif self.model == "all":
            rows = rgs_codes(self.n)
        elif self.model == "fixed":
            rows = [tuple(np.repeat(np.arange(len(self.sizes)), self.sizes).tolist())]
        else:
            raise DomainError(f"unknown model {self.model!r}")
        return np.array(list(rows), dtype=np.int64).reshape(-1, self.n)


def ensemble(model: str, n: int | None = None, k: int | None = None, sizes=None) -> Ensemble:
    if model in ("perm", "fixed"):
        if sizes is None:
            raise DomainError(f"the {model} ensemble needs a size sequence")
        if isinstance(sizes, Clustering):
            sizes = sizes.sizes
        sizes = check_sizes(sizes, n)
        return Ensemble(model, sum(sizes), sizes=sizes)
    if n is None:
        raise DomainError(f"the {model} ensemble needs N")
    _check_n(n)
    if model == "num":
        if k is None or not 1 <= k <= n:
            raise DomainError("the num ensemble needs 1 <= K <= N")
        return Ensemble(model, n, k=k)
    if model == "all":
        return Ensemble(model, n)
    raise DomainError(f"unknown model {model!r}")


def _pair_matrix(codes: np.ndarray) -> np.ndarray:
    """Indicator of co-clustering for each element pair ``i < j``."""
    i, j = np.triu_indices(codes.shape[1], k=1)
    return (codes[:, i] == codes[:, j]).astype(np.int64)


def _size_hist(codes: np.ndarray, n: int) -> np.ndarray:
    """Total number of clusters of each size over all rows."""
    rows = codes.shape[0]
    flat = codes + (np.arange(rows)[:, None] * n)
    counts = np.bincount(flat.ravel(), minlength=rows * n)
    return np.bincount(counts, minlength=n + 1)[: n + 1]


def _cell_hist(codes_a: np.ndarray, codes_b: np.ndarray, n: int) -> np.ndarray:
    """Total number of contingency cells of each size over every (a, b) pair."""
    hist = np.zeros(n + 1, dtype=np.int64)
    rows_b = codes_b.shape[0]
    offsets = (np.arange(rows_b)[:, None] * (n * n))
    for ca in codes_a:
        cell = ca[None, :] * n + codes_b + offsets
        counts = np.bincount(cell.ravel(), minlength=rows_b * n * n)
        hist += np.bincount(counts, minlength=n + 1)[: n + 1]
    return hist


def _log_coefficient_mean(coef: dict[int, Fraction], base: Fraction = Fraction(0)) -> mpmath.mpf:
    with mpmath.workdps(MP_DIGITS):
        total = mpmath.mpf(base.numerator) / base.denominator
        for j, c in sorted(coef.items()):
            if c and j > 1:
                total += (mpmath.mpf(c.numerator) / c.denominator) * mpmath.log(j)
        return +total


def _xlogx_coef(hist: np.ndarray, scale: Fraction) -> dict[int, Fraction]:
    # sum_j hist[j] * j log j, scaled
    return {j: scale * int(hist[j]) * j for j in range(2, len(hist)) if hist[j]}


def _merge(*parts: dict[int, Fraction]) -> dict[int, Fraction]:
    out: dict[int, Fraction] = {}
    for part in parts:
        for j, c in part.items():
            out[j] = out.get(j, Fraction(0)) + c
    return out


def _mean_entropy(codes: np.ndarray, n: int) -> mpmath.mpf:
    # H = log N - (1/N) sum a log a
    rows = codes.shape[0]
    coef = _merge({n: Fraction(1)}, _xlogx_coef(_size_hist(codes, n), Fraction(-1, n * rows)))
    return _log_coefficient_mean(coef)


def _mean_joint_entropy(ca: np.ndarray, cb: np.ndarray, n: int) -> mpmath.mpf:
    pairs = ca.shape[0] * cb.shape[0]
    coef = _merge({n: Fraction(1)}, _xlogx_coef(_cell_hist(ca, cb, n), Fraction(-1, n * pairs)))
    return _log_coefficient_mean(coef)


def _mean_mi(ca: np.ndarray, cb: np.ndarray, n: int) -> mpmath.mpf:
    # MI = log N + (1/N)(sum cells x log x - sum rows a log a - sum cols b log b)
    ra, rb = ca.shape[0], cb.shape[0]
    scale = Fraction(1, n * ra * rb)
    coef = _merge(
        {n: Fraction(1)},
        _xlogx_coef(_cell_hist(ca, cb, n), scale),
        _xlogx_coef(_size_hist(ca, n), -scale * rb),
        _xlogx_coef(_size_hist(cb, n), -scale * ra),
    )
    return _log_coefficient_mean(coef)


def _mean_rand_cross(ca: np.ndarray, cb: np.ndarray, chunk: int = 512) -> Fraction:
    """Average RI over every (a, b) pair, one pair count matrix block at a time."""
    pa, pb = _pair_matrix(ca), _pair_matrix(cb)
    m = pa.shape[1]
    qa, qb = pa.sum(axis=1), pb.sum(axis=1)
    total = 0
    for start in range(0, pa.shape[0], chunk):
        block = pa[start:start + chunk]
        n11 = block @ pb.T
        agree = m - qa[start:start + chunk, None] - qb[None, :] + 2 * n11
        total += int(agree.sum())
    return Fraction(total, m * pa.shape[0] * pb.shape[0])


def _mean_rand_factorized(ca: np.ndarray, cb: np.ndarray) -> Fraction:
    """Average RI via per-pair co-clustering probabilities of each side."""
    pa, pb = _pair_matrix(ca), _pair_matrix(cb)
    ra, rb, m = pa.shape[0], pb.shape[0], pa.shape[1]
    total = Fraction(0)
    for x, y in zip(pa.sum(axis=0).tolist(), pb.sum(axis=0).tolist()):
        p, q = Fraction(x, ra), Fraction(y, rb)
        total += p * q + (1 - p) * (1 - q)
    return total / m


def exact_expectation(measure: str, side_a: Ensemble, side_b: Ensemble | None = None,
                      *, method: str = "cross"):
    """Mean of ``measure`` over the enumerated ensemble(s).

    ``RI``, ``MI`` and ``H_joint`` average over every ordered pair of
    ``side_a`` x ``side_b``; a one-sided expectation passes the reference as
    ``ensemble('fixed', sizes=...)``.  ``H`` averages the entropy of
    ``side_a`` alone.  RI comes back as a Fraction, the others as 40-digit
    mpmath numbers.  ``method='factorized'`` computes RI from per-pair
    co-clustering probabilities instead of the full cross product.
    """
    if measure not in MEASURES:
        raise DomainError(f"unknown measure {measure!r}; expected one of {MEASURES}")
    if method not in ("cross", "factorized"):
        raise DomainError(f"unknown method {method!r}")
    ca = side_a.codes()
    n = side_a.n
    if measure == "H":
        return _mean_entropy(ca, n)
    if side_b is None:
        raise DomainError(f"{measure} needs two ensembles")
    if side_b.n != n:
        raise DomainError("both ensembles must cover the same N")
    cb = side_b.codes()
    if measure == "RI":
        if n < 2:
            raise DomainError("the Rand index needs N >= 2")
        if method == "factorized":
            return _mean_rand_factorized(ca, cb)
        return _mean_rand_cross(ca, cb)
    if measure == "H_joint":
        return _mean_joint_entropy(ca, cb, n)
    return _mean_mi(ca, cb, n)


# -- formula verification -------------------------------------------------

# Largest N checked per formula, matching the acceptance ranges.
FORMULA_LIMITS = {
    "rand_perm": 7,
    "rand_num": 8,
    "rand_all": 7,
    "rand_num_onesided": 8,
    "rand_all_onesided": 8,
    "mi_perm": 6,
    "entropy_num": 7,
    "mi_num": 7,
    "entropy_all": 6,
    "mi_all": 6,
    "mi_num_onesided": 7,
    "mi_all_onesided": 7,
}
RAND_TOL = 1e-12
MI_TOL = 1e-10
ZERO_TOL = 1e-13

DEFAULT_FORMULAS: dict[str, Callable] = {
    "rand_perm": rand.expected_rand_perm,
    "rand_num": rand.expected_rand_num,
    "rand_all": rand.expected_rand_all,
    "rand_num_onesided": rand.expected_rand_num_onesided,
    "rand_all_onesided": rand.expected_rand_all_onesided,
    "mi_perm": mi.expected_mi_perm,
    "entropy_num": mi.expected_entropy_num,
    "mi_num": mi.expected_mi_num,
    "entropy_all": mi.expected_entropy_all,
    "mi_all": mi.expected_mi_all,
    "mi_num_onesided": mi.expected_mi_num_onesided,
    "mi_all_onesided": mi.expected_mi_all_onesided,
}


@dataclass
class FormulaCheck:
    name: str
    cases: int
    max_rel_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.cases > 0 and self.max_rel_error <= self.tolerance


def relative_error(value, exact) -> float:
    """Relative error of ``value``; for an exact 0 the value must be within
    ``ZERO_TOL`` of 0 or the error is reported as infinite.
    """
    if isinstance(exact, Fraction):
        exact = mpmath.mpf(exact.numerator) / exact.denominator
    diff = abs(mpmath.mpf(float(value)) - exact)
    if exact == 0:
        return 0.0 if diff <= ZERO_TOL else math.inf
    return float(diff / abs(exact))


def integer_partitions(n: int) -> Iterator[tuple[int, ...]]:
    """Partitions of the integer ``n`` in non-increasing part order."""
    def rec(rest, cap):
        if rest == 0:
            yield ()
            return
        for part in range(min(rest, cap), 0, -1):
            for tail in rec(rest - part, part):
                yield (part,) + tail
    return rec(n, n)


def _cases(name: str, max_n: int):
    """(args, kwargs, oracle-thunk) for every case of ``name`` up to ``max_n``."""
    top = min(max_n, FORMULA_LIMITS[name])
    is_rand = name.startswith("rand")
    lo = 2 if is_rand or name.startswith("mi") else 1
    for n in range(lo, top + 1):
        if name in ("rand_perm", "mi_perm"):
            parts = list(integer_partitions(n))
            measure = "RI" if is_rand else "MI"
            for sa, sb in itertools.product(parts, repeat=2):
                # fix A, average over B's orbit: same mean as the double orbit
                yield (sa, sb, n), lambda sa=sa, sb=sb, n=n, m=measure: exact_expectation(
                    m, ensemble("fixed", n, sizes=sa), ensemble("perm", n, sizes=sb))
        elif name == "rand_num":
            for ka, kb in itertools.product(range(1, n + 1), repeat=2):
                yield (ka, kb, n), lambda ka=ka, kb=kb, n=n: exact_expectation(
                    "RI", ensemble("num", n, ka), ensemble("num", n, kb))
        elif name == "mi_num":
            for ka, kb in itertools.product(range(1, n + 1), repeat=2):
                yield (ka, kb, n), lambda ka=ka, kb=kb, n=n: exact_expectation(
                    "MI", ensemble("num", n, ka), ensemble("num", n, kb))
        elif name == "entropy_num":
            for k in range(1, n + 1):
                yield (k, n), lambda k=k, n=n: exact_expectation("H", ensemble("num", n, k))
        elif name == "entropy_all":
            yield (n,), lambda n=n: exact_expectation("H", ensemble("all", n))
        elif name in ("rand_all", "mi_all"):
            measure = "RI" if is_rand else "MI"
            yield (n,), lambda n=n, m=measure: exact_expectation(
                m, ensemble("all", n), ensemble("all", n))
        elif name in ("rand_num_onesided", "mi_num_onesided"):
            measure = "RI" if is_rand else "MI"
            for ref in integer_partitions(n):
                for ka in range(1, n + 1):
                    yield (ka, n, ref), lambda ka=ka, n=n, ref=ref, m=measure: exact_expectation(
                        m, ensemble("num", n, ka), ensemble("fixed", n, sizes=ref))
        elif name in ("rand_all_onesided", "mi_all_onesided"):
            measure = "RI" if is_rand else "MI"
            for ref in integer_partitions(n):
                yield (n, ref), lambda n=n, ref=ref, m=measure: exact_expectation(
                    m, ensemble("all", n), ensemble("fixed", n, sizes=ref))


def verify_formulas(max_n: int = 6, overrides: dict[str, Callable] | None = None,
                    names=None) -> list[FormulaCheck]:
    """Compare every closed-form expectation with enumeration up to ``max_n``
    (each formula is also capped at its own range in ``FORMULA_LIMITS``).

    ``overrides`` swaps in replacement implementations by formula name, which
    is how a deliberately broken formula is shown to be caught.
    """
    if max_n > MAX_N:
        _check_n(max_n)
    if max_n < 2:
        raise DomainError("max_n must be at least 2")
    formulas = dict(DEFAULT_FORMULAS)
    formulas.update(overrides or {})
    unknown = set(overrides or {}) - set(DEFAULT_FORMULAS)
    if unknown:
        raise DomainError(f"unknown formula names: {sorted(unknown)}")
    results = []
    for name in names or DEFAULT_FORMULAS:
        f = formulas[name]
        tol = RAND_TOL if name.startswith("rand") else MI_TOL
        worst, cases = 0.0, 0
        for args, oracle in _cases(name, max_n):
            worst = max(worst, relative_error(f(*args), oracle()))
            cases += 1
        results.append(FormulaCheck(name, cases, worst, tol))
    return results
