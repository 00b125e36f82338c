"""Samplers for the random clustering ensembles, the preferential-attachment
randomizer and Monte Carlo estimates of expected similarity.

Every sampler takes a ``numpy.random.Generator``.  ``make_rng(seed, stream)``
builds the documented PCG64 generator; independent parallel streams use the
seed ``seed ^ stream``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import combinatorics as comb
from .core import Clustering, check_sizes
from .errors import DomainError
from .mutual_info import (
    expected_mi_all,
    expected_mi_all_onesided,
    expected_mi_num,
    expected_mi_num_onesided,
    expected_mi_perm,
)
from .rand import (
    expected_rand_all,
    expected_rand_all_onesided,
    expected_rand_num,
    expected_rand_num_onesided,
    expected_rand_perm,
)

_SEED_LIMIT = 1 << 64
PA_BLOCK = 8192


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """PCG64 generator for stream ``stream`` derived from a 64-bit seed."""
    if not 0 <= seed < _SEED_LIMIT or not 0 <= stream < _SEED_LIMIT:
        raise DomainError("seed and stream must be 64-bit unsigned integers")
    return np.random.Generator(np.random.PCG64(seed ^ stream))


# -- label-array samplers -------------------------------------------------

def perm_labels(labels: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    return labels[rng.permutation(len(labels))]


@lru_cache(maxsize=64)
def _new_block_probs(n: int, k: int) -> tuple[tuple[float, ...], ...]:
    """``P[m][j] = S(m-1, j-1) / S(m, j)`` for ``1 <= j <= min(m, k)``."""
    table = comb.stirling_table(n)
    rows = [(0.0,) * (k + 1)]
    for m in range(1, n + 1):
        row = [0.0] * (k + 1)
        for j in range(1, min(m, k) + 1):
            if j == m:
                row[j] = 1.0
            elif j > 1:
                row[j] = math.exp(table.log(m - 1, j - 1) - table.log(m, j))
        rows.append(tuple(row))
    return tuple(rows)


def num_labels(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform partition of ``n`` elements into exactly ``k`` blocks.

    Walking down from element ``n``, element ``m`` opens a new block with
    probability ``S(m-1, j-1) / S(m, j)`` (``j`` blocks left to open) and
    otherwise joins one of the ``j`` blocks formed by the first ``m-1``
    elements.  The decisions are then replayed from element 1 upwards.
    """
    if not 1 <= k <= n:
        raise DomainError(f"K must satisfy 1 <= K <= N, got K={k}, N={n}")
    probs = _new_block_probs(n, k)
    u = rng.random(n).tolist()
    blocks = [0] * (n + 1)  # blocks among the first m elements; negative marks an opener
    j = k
    for m in range(n, 0, -1):
        if u[m - 1] < probs[m][j]:
            blocks[m] = -j
            j -= 1
        else:
            blocks[m] = j
    picks = rng.random(n).tolist()
    labels = [0] * n
    opened = 0
    for m in range(1, n + 1):
        if blocks[m] < 0:
            labels[m - 1] = opened
            opened += 1
        else:
            labels[m - 1] = int(picks[m - 1] * blocks[m])
    return np.asarray(labels, dtype=np.int64)


@lru_cache(maxsize=64)
def _cluster_count_probs(n: int) -> np.ndarray:
    row = comb.stirling_table(n).row(n)[1:]
    p = np.exp(row - comb.bell_sequence(n).log_values[n])
    return p / p.sum()


def all_labels(n: int, rng: np.random.Generator) -> np.ndarray:
    if n < 1:
        raise DomainError("N must be at least 1")
    k = int(rng.choice(n, p=_cluster_count_probs(n))) + 1
    return num_labels(n, k, rng)


# -- Clustering samplers --------------------------------------------------------

def sample_perm(template: Clustering, rng: np.random.Generator) -> Clustering:
    labels = perm_labels(np.asarray(template.labels), rng)
    return Clustering(template.elements, tuple(int(x) for x in labels))


def _from_array(labels: np.ndarray) -> Clustering:
    return Clustering.from_label_sequence(labels.tolist())


def sample_num(n: int, k: int, rng: np.random.Generator) -> Clustering:
    return _from_array(num_labels(n, k, rng))


def sample_all(n: int, rng: np.random.Generator) -> Clustering:
    return _from_array(all_labels(n, rng))


# -- fast measures on label arrays ----------------------------------------

def _cells(la: np.ndarray, lb: np.ndarray):
    kb = int(lb.max()) + 1
    cells = np.bincount(la * kb + lb)
    return cells[cells > 0], np.bincount(la), np.bincount(lb)


def _pairs_sum(x: np.ndarray) -> int:
    return int((x * (x - 1) // 2).sum())


def rand_from_labels(la: np.ndarray, lb: np.ndarray) -> float:
    n = len(la)
    cells, ra, rb = _cells(la, lb)
    m = n * (n - 1) // 2
    n11 = _pairs_sum(cells)
    return (m - _pairs_sum(ra) - _pairs_sum(rb) + 2 * n11) / m


def _xlogx(x: np.ndarray) -> float:
    x = x[x > 0].astype(float)
    return math.fsum((x * np.log(x)).tolist())


def mi_from_labels(la: np.ndarray, lb: np.ndarray) -> float:
    n = len(la)
    cells, ra, rb = _cells(la, lb)
    value = math.log(n) + (_xlogx(cells) - _xlogx(ra) - _xlogx(rb)) / n
    return value if value > 0 else 0.0


def size_entropy_bits(sizes: np.ndarray) -> float:
    n = sizes.sum()
    return max(0.0, (math.log(n) - _xlogx(sizes) / n) / math.log(2))


# -- preferential attachment ---------------------------------------------

@dataclass(frozen=True)
class PaTrajectoryPoint:
    step: int
    size_entropy_bits: float
    ari_perm: float
    ari_num: float


def _pa_point(step: int, start: np.ndarray, start_sizes: tuple, labels: np.ndarray,
              sizes: np.ndarray) -> PaTrajectoryPoint:
    n = len(labels)
    k = len(start_sizes)
    ri = rand_from_labels(start, labels)
    e_perm = expected_rand_perm(start_sizes, sizes.tolist(), n)
    e_num = expected_rand_num(k, k, n)
    return PaTrajectoryPoint(
        step,
        size_entropy_bits(sizes),
        (ri - e_perm) / (1 - e_perm),
        (ri - e_num) / (1 - e_num),
    )


def pa_randomize(start: Clustering, steps: int, rng: np.random.Generator,
                 record_every: int = 1) -> list[PaTrajectoryPoint]:
    """Randomize ``start`` by preferential attachment and record its drift.

    Each step picks an element ``u`` uniformly, then a target cluster with
    probability proportional to its current size (the cluster of a second
    uniformly drawn element ``v``, counting ``u`` itself, so staying put is a
    no-op).  A move that would empty ``u``'s cluster is rejected, so the
    cluster count never changes.  A point is recorded at step 0 and after
    every ``record_every`` steps, comparing against ``start``.
    """
    if start.n_clusters < 2:
        raise DomainError("preferential attachment needs at least two clusters")
    if steps < 0 or record_every < 1:
        raise DomainError("steps must be >= 0 and record_every >= 1")
    base = np.asarray(start.labels, dtype=np.int64)
    labels = base.copy()
    sizes = np.bincount(labels).astype(np.int64)
    n = len(labels)
    points = [_pa_point(0, base, start.sizes, labels, sizes)]
    done = 0
    while done < steps:
        block = min(PA_BLOCK, steps - done)
        draws = rng.integers(0, n, size=(block, 2)).tolist()
        for i, (u, v) in enumerate(draws):
            src, dst = labels[u], labels[v]
            if src != dst and sizes[src] > 1:
                labels[u] = dst
                sizes[src] -= 1
                sizes[dst] += 1
            step = done + i + 1
            if step % record_every == 0:
                points.append(_pa_point(step, base, start.sizes, labels, sizes))
        done += block
    return points


# -- Monte Carlo -------------------------------------------------------------

MEASURES = ("RI", "MI")


@dataclass(frozen=True)
class _Side:
    model: str
    n: int
    k: int | None = None
    sizes: tuple | None = None

    def draw(self, rng: np.random.Generator) -> np.ndarray:
        if self.model == "perm":
            return perm_labels(np.repeat(np.arange(len(self.sizes)), self.sizes), rng)
        if self.model == "num":
            return num_labels(self.n, self.k, rng)
        return all_labels(self.n, rng)


def _side(model: str, n: int, k, sizes) -> _Side:
    if model == "perm":
        if sizes is None:
            raise DomainError("the perm model needs a size sequence")
        sizes = check_sizes(sizes, n)
        return _Side(model, sum(sizes), sizes=sizes)
    if n is None:
        raise DomainError(f"the {model} model needs N")
    if model == "num":
        if k is None or not 1 <= k <= n:
            raise DomainError("the num model needs 1 <= K <= N")
        return _Side(model, n, k=k)
    return _Side(model, n)


def monte_carlo_expectation(measure: str, model: str, params: dict, samples: int,
                            rng: np.random.Generator, sided: str = "two_sided"):
    """Sample mean and standard error of RI or MI under a random model.

    ``params`` carries ``n`` and, as the model needs them, ``k_a``/``k_b``
    (num), ``sizes_a``/``sizes_b`` (perm) or ``reference`` (one-sided: a
    Clustering or size sequence held fixed while side A is drawn).
    """
    if measure not in MEASURES:
        raise DomainError(f"unknown measure {measure!r}; expected one of {MEASURES}")
    if model not in ("perm", "num", "all"):
        raise DomainError(f"unknown model {model!r}")
    if sided not in ("two_sided", "one_sided"):
        raise DomainError(f"unknown sidedness {sided!r}")
    if samples < 2:
        raise DomainError("at least two samples are needed for a standard error")
    n = params.get("n")
    side_a = _side(model, n, params.get("k_a"), params.get("sizes_a"))
    n = side_a.n
    if sided == "one_sided":
        ref = params.get("reference")
        if ref is None:
            raise DomainError("a one-sided estimate needs a reference")
        sizes = ref.sizes if isinstance(ref, Clustering) else check_sizes(ref, n)
        fixed = np.repeat(np.arange(len(sizes)), sizes)
        side_b = None
    else:
        side_b = _side(model, n, params.get("k_b"), params.get("sizes_b"))
    score = rand_from_labels if measure == "RI" else mi_from_labels
    values = np.empty(samples)
    for i in range(samples):
        la = side_a.draw(rng)
        lb = fixed if side_b is None else side_b.draw(rng)
        values[i] = score(la, lb)
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(samples))


def closed_form_expectation(measure: str, model: str, params: dict,
                            sided: str = "two_sided") -> float:
    """Closed-form counterpart of ``monte_carlo_expectation`` for the same arguments."""
    n = params.get("n")
    if model == "perm":
        sa = params["sizes_a"]
        sb = params["reference"] if sided == "one_sided" else params["sizes_b"]
        if isinstance(sb, Clustering):
            sb = sb.sizes
        if measure == "RI":
            return expected_rand_perm(sa, sb)
        return expected_mi_perm(sa, sb)
    if sided == "one_sided":
        ref = params["reference"]
        if model == "num":
            f = expected_rand_num_onesided if measure == "RI" else expected_mi_num_onesided
            return f(params["k_a"], n, ref)
        f = expected_rand_all_onesided if measure == "RI" else expected_mi_all_onesided
        return f(n, ref)
    if model == "num":
        if measure == "RI":
            return expected_rand_num(params["k_a"], params["k_b"], n)
        return expected_mi_num(params["k_a"], params["k_b"], n)
    return expected_rand_all(n) if measure == "RI" else expected_mi_all(n)


__all__ = [
    "PaTrajectoryPoint",
    "all_labels",
    "closed_form_expectation",
    "make_rng",
    "monte_carlo_expectation",
    "num_labels",
    "pa_randomize",
    "perm_labels",
    "sample_all",
    "sample_num",
    "sample_perm",
]
