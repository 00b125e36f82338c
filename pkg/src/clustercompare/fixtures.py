"""Four small clusterings of 20 elements used to illustrate how the random
model changes similarity rankings.

``W`` and ``X`` have four clusters of five and differ only in element 6.
``Y`` has ten pairs; ``Z`` has ten clusters of very unequal size.
"""

from __future__ import annotations

from .core import Clustering

ELEMENTS = tuple(range(1, 21))


def _blocks(*bounds: int) -> list[list[int]]:
    edges = (0,) + bounds
    return [list(ELEMENTS[lo:hi]) for lo, hi in zip(edges, edges[1:])]


W = Clustering.from_clusters(_blocks(5, 10, 15, 20))
X = Clustering.from_clusters(_blocks(6, 10, 15, 20))
Y = Clustering.from_clusters(_blocks(*range(2, 21, 2)))
Z = Clustering.from_clusters(_blocks(7, 11, 13, *range(14, 21)))

FIXTURES = {"W": W, "X": X, "Y": Y, "Z": Z}
