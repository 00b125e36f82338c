"""Stirling numbers of the second kind, Bell numbers and binomial terms.

Magnitudes are kept as natural logarithms so that quantities such as
``S(1000, 10)`` or ``B_1000`` (about 1900 decimal digits) stay usable.  Up to
``EXACT_THRESHOLD`` elements the tables are also held as Python integers,
which the test-suite uses as the exact reference for the log-space path.
"""

from __future__ import annotations

import math
import operator
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DomainError

EXACT_THRESHOLD = 64
N_MAX = 5000

_NEG_INF = float("-inf")


def _count(value, name: str) -> int:
    try:
        n = operator.index(value)
    except TypeError:
        raise DomainError(f"{name} must be an integer, got {value!r}") from None
    if n < 0:
        raise DomainError(f"{name} must be non-negative, got {n}")
    return n


def _check_capacity(n: int) -> None:
    if n > N_MAX:
        raise DomainError(f"n={n} exceeds the supported table size N_MAX={N_MAX}")


@dataclass(frozen=True)
class LogReal:
    """A non-negative real number stored as its natural logarithm.

    ``log_value == -inf`` encodes zero.  When the magnitude is known exactly
    (an integer or rational from the exact tables) it is carried along in
    ``exact`` and used for conversion back to float, which is then correctly
    rounded.  Otherwise ``float()`` is ``exp(log_value)``, whose relative error
    grows like ``abs(log_value) * eps``.
    """

    log_value: float
    exact: int | Fraction | None = field(default=None, compare=False, repr=False)

    @classmethod
    def from_value(cls, value) -> "LogReal":
        if value < 0:
            raise DomainError(f"LogReal holds non-negative magnitudes, got {value}")
        if isinstance(value, (int, Fraction)):
            return cls(_exact_log(value), value)
        return cls(math.log(value) if value > 0 else _NEG_INF, Fraction(value))

    @property
    def is_zero(self) -> bool:
        return self.log_value == _NEG_INF

    def __mul__(self, other: "LogReal") -> "LogReal":
        exact = None
        if self.exact is not None and other.exact is not None:
            exact = self.exact * other.exact
        return LogReal(self.log_value + other.log_value, exact)

    def __truediv__(self, other: "LogReal") -> "LogReal":
        if other.is_zero:
            raise ZeroDivisionError("division by a zero LogReal")
        exact = None
        if self.exact is not None and other.exact is not None:
            exact = Fraction(self.exact, other.exact)
        return LogReal(self.log_value - other.log_value, exact)

    def __add__(self, other: "LogReal") -> "LogReal":
        exact = None
        if self.exact is not None and other.exact is not None:
            exact = self.exact + other.exact
        return LogReal(float(np.logaddexp(self.log_value, other.log_value)), exact)

    def __float__(self) -> float:
        if self.exact is not None:
            try:
                return float(self.exact)
            except OverflowError:
                return math.inf
        try:
            return math.exp(self.log_value)
        except OverflowError:
            return math.inf


def _exact_log(value) -> float:
    if value == 0:
        return _NEG_INF
    if isinstance(value, Fraction):
        return math.log(value.numerator) - math.log(value.denominator)
    return math.log(value)


class StirlingTable:
    """Triangular table of ``log S(n, k)`` for ``0 <= k <= n <= n_max``.

    Rows are read-only numpy arrays; rows up to ``EXACT_THRESHOLD`` are also
    stored as exact integers.  Instances are never mutated after
    construction, so a table may be shared freely between threads.
    """

    def __init__(self, log_rows, exact_rows):
        self._log_rows = tuple(log_rows)
        self._exact_rows = tuple(exact_rows)

    @property
    def n_max(self) -> int:
        return len(self._log_rows) - 1

    @classmethod
    def build(cls, n_max: int, base: "StirlingTable | None" = None) -> "StirlingTable":
        n_max = _count(n_max, "n_max")
        _check_capacity(n_max)
        if base is not None and base.n_max >= n_max:
            return base
        if base is not None:
            exact_rows = list(base._exact_rows)
            log_rows = list(base._log_rows)
        else:
            exact_rows = [[1]]
            log_rows = [_frozen(np.array([0.0]))]
        # exact rows first; their logs are exact-rounded
        while len(exact_rows) <= min(n_max, EXACT_THRESHOLD):
            prev = exact_rows[-1]
            n = len(prev)
            row = [0] * (n + 1)
            for k in range(1, n + 1):
                row[k] = k * (prev[k] if k < n else 0) + prev[k - 1]
            exact_rows.append(row)
            log_rows.append(_frozen(np.array([_exact_log(v) for v in row])))
        while len(log_rows) <= n_max:
            log_rows.append(_frozen(_next_log_row(log_rows[-1])))
        return cls(log_rows, exact_rows)

    def log(self, n: int, k: int) -> float:
        if k > n:
            return _NEG_INF
        return float(self._log_rows[n][k])

    def exact(self, n: int, k: int) -> int:
        if n > EXACT_THRESHOLD:
            raise DomainError(
                f"exact Stirling numbers are tabulated only for n <= {EXACT_THRESHOLD}"
            )
        return self._exact_rows[n][k] if k <= n else 0

    def row(self, n: int) -> np.ndarray:
        return self._log_rows[n]

    def column(self, k: int, n_hi: int) -> np.ndarray:
        """``log S(m, k)`` for ``m = 0 .. n_hi`` (``-inf`` where ``m < k``)."""
        out = np.full(n_hi + 1, _NEG_INF)
        for m in range(k, n_hi + 1):
            out[m] = self._log_rows[m][k]
        return out


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def _next_log_row(prev: np.ndarray) -> np.ndarray:
    # S(n+1, k) = k S(n, k) + S(n, k-1)
    n = len(prev) - 1
    ks = np.arange(1, n + 2, dtype=float)
    same_k = np.append(prev[1:], _NEG_INF)
    with np.errstate(divide="ignore"):
        grown = np.log(ks) + same_k
    row = np.empty(n + 2)
    row[0] = _NEG_INF
    row[1:] = np.logaddexp(grown, prev)
    return row


class BellSequence:
    """``log B_n`` for ``n = 0 .. n_max`` plus exact values up to the threshold."""

    def __init__(self, log_values: np.ndarray, exact_values):
        self.log_values = _frozen(np.asarray(log_values, dtype=float))
        self.exact_values = tuple(exact_values)

    @property
    def n_max(self) -> int:
        return len(self.log_values) - 1

    @classmethod
    def build(cls, n_max: int) -> "BellSequence":
        n_max = _count(n_max, "n_max")
        _check_capacity(n_max)
        table = _stirling_table(min(n_max, EXACT_THRESHOLD))
        exact = [sum(table._exact_rows[n]) for n in range(min(n_max, EXACT_THRESHOLD) + 1)]
        logs = [_exact_log(b) for b in exact]
        row = table.row(len(exact) - 1)
        # beyond the exact range, stream Stirling rows without keeping them
        for _ in range(len(exact), n_max + 1):
            row = _next_log_row(row)
            logs.append(float(np.logaddexp.reduce(row)))
        return cls(np.array(logs), exact)


_lock = threading.RLock()
_stirling_cache: StirlingTable | None = None
_bell_cache: BellSequence | None = None


def _grow(n: int, current: int) -> int:
    # amortise rebuilds: grow by half again, never past N_MAX
    return min(max(n, EXACT_THRESHOLD, current + current // 2), N_MAX)


def _stirling_table(n: int) -> StirlingTable:
    global _stirling_cache
    table = _stirling_cache
    if table is not None and table.n_max >= n:
        return table
    with _lock:
        table = _stirling_cache
        if table is None or table.n_max < n:
            table = StirlingTable.build(_grow(n, table.n_max if table else 0), table)
            _stirling_cache = table
    return table


def _bell_sequence(n: int) -> BellSequence:
    global _bell_cache
    seq = _bell_cache
    if seq is not None and seq.n_max >= n:
        return seq
    with _lock:
        seq = _bell_cache
        if seq is None or seq.n_max < n:
            seq = BellSequence.build(_grow(n, seq.n_max if seq else 0))
            _bell_cache = seq
    return seq


def stirling_table(n_max: int) -> StirlingTable:
    """Shared table covering at least ``n_max``."""
    n_max = _count(n_max, "n_max")
    _check_capacity(n_max)
    return _stirling_table(n_max)


def bell_sequence(n_max: int) -> BellSequence:
    n_max = _count(n_max, "n_max")
    _check_capacity(n_max)
    return _bell_sequence(n_max)


def stirling2(n: int, k: int) -> LogReal:
    """Stirling number of the second kind ``S(n, k)``."""
    n, k = _count(n, "n"), _count(k, "k")
    if k > n:
        raise DomainError(f"stirling2 requires k <= n, got n={n}, k={k}")
    table = stirling_table(n)
    exact = table.exact(n, k) if n <= EXACT_THRESHOLD else None
    return LogReal(table.log(n, k), exact)


def stirling2_exact(n: int, k: int) -> int:
    n, k = _count(n, "n"), _count(k, "k")
    if k > n:
        raise DomainError(f"stirling2 requires k <= n, got n={n}, k={k}")
    return stirling_table(min(n, EXACT_THRESHOLD)).exact(n, k)


def bell(n: int) -> LogReal:
    """Bell number ``B_n``."""
    n = _count(n, "n")
    seq = bell_sequence(n)
    exact = seq.exact_values[n] if n <= EXACT_THRESHOLD else None
    return LogReal(float(seq.log_values[n]), exact)


def bell_exact(n: int) -> int:
    n = _count(n, "n")
    if n > EXACT_THRESHOLD:
        raise DomainError(f"exact Bell numbers are tabulated only for n <= {EXACT_THRESHOLD}")
    return bell_sequence(n).exact_values[n]


def stirling_ratio(n: int, k: int) -> float:
    """``S(n-1, k) / S(n, k)``: probability that two fixed elements share a
    block in a uniformly random partition of ``n`` elements into ``k`` blocks.
    """
    n, k = _count(n, "n"), _count(k, "k")
    if n < 1 or k == 0 or k > n:
        raise DomainError(f"stirling_ratio requires 1 <= k <= n, got n={n}, k={k}")
    if k == n:
        return 0.0
    table = stirling_table(n)
    return math.exp(table.log(n - 1, k) - table.log(n, k))


def bell_ratio(n: int) -> float:
    """``B_{n-1} / B_n``."""
    n = _count(n, "n")
    if n < 1:
        raise DomainError("bell_ratio requires n >= 1")
    logs = bell_sequence(n).log_values
    return math.exp(logs[n - 1] - logs[n])


def log_binomial(n: int, k: int) -> LogReal:
    n, k = _count(n, "n"), _count(k, "k")
    if k > n:
        raise DomainError(f"log_binomial requires k <= n, got n={n}, k={k}")
    if n <= EXACT_THRESHOLD:
        value = math.comb(n, k)
        return LogReal(math.log(value), value)
    return LogReal(math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1))


def hypergeom_pmf(n: int, N: int, a: int, b: int) -> float:
    """P(overlap = n) between a random ``a``-subset and a fixed ``b``-subset of
    ``N`` elements.  Values of ``n`` outside the support give 0.
    """
    N, a, b = _count(N, "N"), _count(a, "a"), _count(b, "b")
    if a > N or b > N:
        raise DomainError(f"hypergeom_pmf requires a, b <= N, got N={N}, a={a}, b={b}")
    n = operator.index(n)
    if n < max(0, a + b - N) or n > min(a, b):
        return 0.0
    if N <= EXACT_THRESHOLD:
        return math.comb(b, n) * math.comb(N - b, a - n) / math.comb(N, a)
    log_p = (
        log_binomial(b, n).log_value
        + log_binomial(N - b, a - n).log_value
        - log_binomial(N, a).log_value
    )
    return math.exp(log_p)


@lru_cache(maxsize=8)
def log_factorials(n: int) -> np.ndarray:
    """Read-only array of ``log(m!)`` for ``m = 0 .. n``."""
    out = np.array([math.lgamma(m + 1) for m in range(n + 1)])
    return _frozen(out)
