"""Clustering similarity (Rand index, mutual information) adjusted for chance
under the permutation, fixed-cluster-count and all-partitions random models.
"""

from .core import (
    Clustering,
    ContingencyTable,
    PairCounts,
    contingency,
    entropy,
    joint_entropy,
    pair_counts,
)
from .errors import (
    DomainError,
    ElementMismatchError,
    EnumerationLimitError,
    UndefinedAdjustmentError,
)
from .mutual_info import (
    MiModelSpec,
    adjusted_mi,
    expected_mi_all,
    expected_mi_num,
    expected_mi_perm,
    mutual_information,
    nmi,
)
from .rand import (
    RandModelSpec,
    adjusted_rand,
    expected_rand_all,
    expected_rand_num,
    expected_rand_perm,
    rand_index,
)

__version__ = "0.1.0"

__all__ = [
    "Clustering",
    "ContingencyTable",
    "DomainError",
    "ElementMismatchError",
    "EnumerationLimitError",
    "MiModelSpec",
    "PairCounts",
    "RandModelSpec",
    "UndefinedAdjustmentError",
    "adjusted_mi",
    "adjusted_rand",
    "contingency",
    "entropy",
    "expected_mi_all",
    "expected_mi_num",
    "expected_mi_perm",
    "expected_rand_all",
    "expected_rand_num",
    "expected_rand_perm",
    "joint_entropy",
    "mutual_information",
    "nmi",
    "pair_counts",
    "rand_index",
]
