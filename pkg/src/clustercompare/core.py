"""Partitions, contingency tables, pair counts and entropies."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

from .errors import DomainError, ElementMismatchError, UndefinedAdjustmentError

LOG_BASES = {"e": 1.0, "2": math.log(2.0), "10": math.log(10.0)}


def to_base(value_nats: float, base: str | float = "e") -> float:
    """Rescale a quantity measured in nats to another logarithm base."""
    if isinstance(base, str):
        try:
            return value_nats / LOG_BASES[base]
        except KeyError:
            raise DomainError(f"unknown log base {base!r}") from None
    return value_nats / math.log(base)


@dataclass(frozen=True, eq=False)
class Clustering:
    """A partition of a finite set of labelled elements.

    ``elements`` keeps the input order and ``labels[i]`` is the cluster index
    of ``elements[i]``; cluster indices follow the first appearance of each
    input label.  Two clusterings compare equal when they partition the same
    element set identically, whatever their labels.
    """

    elements: tuple
    labels: tuple

    def __post_init__(self):
        if not self.elements:
            raise DomainError("a clustering needs at least one element")
        if len(self.elements) != len(self.labels):
            raise DomainError("elements and labels differ in length")

    @classmethod
    def from_labels(cls, labels: Mapping[Hashable, Hashable]) -> "Clustering":
        return clustering_from_labels(labels)

    @classmethod
    def from_label_sequence(cls, labels: Iterable[Hashable], elements=None) -> "Clustering":
        """Build from a label per element; elements default to ``0 .. N-1``."""
        labels = list(labels)
        if elements is None:
            elements = range(len(labels))
        return clustering_from_labels(dict(zip(elements, labels, strict=True)))

    @classmethod
    def from_clusters(cls, clusters: Iterable[Iterable[Hashable]]) -> "Clustering":
        mapping = {}
        for index, cluster in enumerate(clusters):
            members = list(cluster)
            if not members:
                raise DomainError("clusters must be non-empty")
            for element in members:
                if element in mapping:
                    raise DomainError(f"element {element!r} appears in two clusters")
                mapping[element] = index
        return clustering_from_labels(mapping)

    @classmethod
    def from_sizes(cls, sizes: Sequence[int]) -> "Clustering":
        """Consecutive blocks over elements ``0 .. N-1`` with the given sizes."""
        labels = []
        for index, size in enumerate(sizes):
            if size <= 0:
                raise DomainError("cluster sizes must be positive")
            labels.extend([index] * size)
        return cls(tuple(range(len(labels))), tuple(labels))

    @property
    def n_elements(self) -> int:
        return len(self.elements)

    @cached_property
    def sizes(self) -> tuple[int, ...]:
        counts = [0] * (max(self.labels) + 1)
        for label in self.labels:
            counts[label] += 1
        return tuple(counts)

    @property
    def n_clusters(self) -> int:
        return len(self.sizes)

    @cached_property
    def membership(self) -> dict:
        return dict(zip(self.elements, self.labels))

    @cached_property
    def clusters(self) -> tuple[frozenset, ...]:
        groups: list[list] = [[] for _ in self.sizes]
        for element, label in zip(self.elements, self.labels):
            groups[label].append(element)
        return tuple(frozenset(g) for g in groups)

    @cached_property
    def element_set(self) -> frozenset:
        return frozenset(self.elements)

    @cached_property
    def _canonical(self) -> frozenset:
        return frozenset(self.clusters)

    def to_labels(self) -> dict:
        return dict(self.membership)

    def labels_for(self, elements: Sequence[Hashable]) -> np.ndarray:
        """Cluster index of each element of ``elements`` as an int array."""
        member = self.membership
        return np.fromiter((member[e] for e in elements), dtype=np.int64, count=len(elements))

    def __eq__(self, other):
        if not isinstance(other, Clustering):
            return NotImplemented
        return self._canonical == other._canonical

    def __hash__(self):
        return hash(self._canonical)

    def __repr__(self):
        return f"Clustering(N={self.n_elements}, sizes={list(self.sizes)})"


def clustering_from_labels(labels: Mapping[Hashable, Hashable]) -> Clustering:
    """Group elements by label; cluster indices follow first label appearance."""
    if not labels:
        raise DomainError("cannot build a clustering from an empty mapping")
    index: dict = {}
    codes = []
    for label in labels.values():
        code = index.get(label)
        if code is None:
            code = index[label] = len(index)
        codes.append(code)
    return Clustering(tuple(labels.keys()), tuple(codes))


def check_sizes(sizes: Sequence[int], n: int | None = None) -> tuple[int, ...]:
    sizes = tuple(int(s) for s in sizes)
    if not sizes:
        raise DomainError("size sequence is empty")
    if any(s <= 0 for s in sizes):
        raise DomainError(f"cluster sizes must be positive, got {list(sizes)}")
    if n is not None and sum(sizes) != n:
        raise DomainError(f"cluster sizes sum to {sum(sizes)}, expected N={n}")
    return sizes


@dataclass(frozen=True)
class ContingencyTable:
    """Sparse overlap counts ``n_km = |A_k & B_m|`` with both margins.

    ``cells`` holds only positive counts, ordered row-major by cluster index.
    """

    row_sums: tuple[int, ...]
    col_sums: tuple[int, ...]
    cells: tuple[tuple[int, int, int], ...]

    @property
    def n_elements(self) -> int:
        return sum(self.row_sums)

    def as_dict(self) -> dict[tuple[int, int], int]:
        return {(k, m): n for k, m, n in self.cells}

    def transpose(self) -> "ContingencyTable":
        cells = tuple(sorted((m, k, n) for k, m, n in self.cells))
        return ContingencyTable(self.col_sums, self.row_sums, cells)


def _require_same_elements(a: Clustering, b: Clustering) -> None:
    if a.element_set != b.element_set:
        diff = len(a.element_set ^ b.element_set)
        raise ElementMismatchError(
            f"clusterings cover different element sets ({diff} elements in the symmetric difference)"
        )


def contingency(a: Clustering, b: Clustering) -> ContingencyTable:
    _require_same_elements(a, b)
    la = np.asarray(a.labels, dtype=np.int64)
    lb = b.labels_for(a.elements)
    kb = b.n_clusters
    flat = np.bincount(la * kb + lb, minlength=a.n_clusters * kb)
    nz = np.flatnonzero(flat)
    cells = tuple((int(i // kb), int(i % kb), int(flat[i])) for i in nz)
    return ContingencyTable(a.sizes, b.sizes, cells)


@dataclass(frozen=True)
class PairCounts:
    """Element-pair agreement counts between two clusterings.

    ``n11``: together in both; ``n10``: together only in A; ``n01``: together
    only in B; ``n00``: apart in both.  ``q1_a``/``q1_b`` count co-clustered
    pairs of each clustering.
    """

    n11: int
    n10: int
    n01: int
    n00: int
    q1_a: int
    q1_b: int

    @property
    def total(self) -> int:
        return self.n11 + self.n10 + self.n01 + self.n00


def _pairs(x: int) -> int:
    return x * (x - 1) // 2


def co_pairs(sizes: Iterable[int]) -> int:
    """Number of co-clustered element pairs for a size sequence."""
    return sum(_pairs(int(s)) for s in sizes)


def pair_counts(t: ContingencyTable) -> PairCounts:
    n = t.n_elements
    n11 = sum(_pairs(c) for _, _, c in t.cells)
    q1_a = co_pairs(t.row_sums)
    q1_b = co_pairs(t.col_sums)
    n10 = q1_a - n11
    n01 = q1_b - n11
    n00 = _pairs(n) - n11 - n10 - n01
    return PairCounts(n11, n10, n01, n00, q1_a, q1_b)


def _plogp_sum(counts: Iterable[int], n: int) -> float:
    # -sum p log p with p = c/n, exactly rounded
    return -math.fsum((c / n) * math.log(c / n) for c in counts if c)


def entropy(sizes: Sequence[int], n: int | None = None, base: str | float = "e") -> float:
    """Shannon entropy of the cluster-size proportions."""
    if n is None:
        n = sum(sizes)
    if any(s <= 0 for s in sizes):
        raise DomainError("cluster sizes must be positive")
    if any(s > n for s in sizes):
        raise DomainError(f"a cluster size exceeds N={n}")
    if sum(sizes) != n:
        raise DomainError(f"cluster sizes sum to {sum(sizes)}, expected N={n}")
    h = _plogp_sum(sizes, n)
    return to_base(h if h > 0 else 0.0, base)


def size_sequence_entropy(c: Clustering) -> float:
    """Entropy of the size sequence in bits."""
    return entropy(c.sizes, c.n_elements, base="2")


def joint_entropy(t: ContingencyTable, base: str | float = "e") -> float:
    h = _plogp_sum((c for _, _, c in t.cells), t.n_elements)
    return to_base(h if h > 0 else 0.0, base)


def adjust_for_chance(score: float, expected: float, maximum: float) -> float:
    """Rescale ``score`` so that ``expected`` maps to 0 and ``maximum`` to 1."""
    span = maximum - expected
    if abs(span) <= 1e-15 * max(1.0, abs(maximum)):
        raise UndefinedAdjustmentError(
            f"maximum ({maximum!r}) equals the expected value ({expected!r}); "
            "the random model cannot tell these clusterings apart"
        )
    return (score - expected) / span
