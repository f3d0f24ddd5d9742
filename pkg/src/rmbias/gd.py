"""The extremal rank function g_{d,q}(m) and its monotonicity properties.

``g_{d,q}`` is defined by

* ``g(m) = 0`` when ``d < 0`` or ``m = 0``; ``g(1) = 1`` when ``d >= 0``;
* ``g_d(q^r) = sum_{i<q} g_{d-i}(q^(r-1))``;
* otherwise, with ``r`` the largest integer such that ``m >= q^r``,
  ``g_d(m) = g_d(q^r) + g_{d-1}(m - q^r)``.

For prime ``q = p`` it is the rank of the generator matrix M^{(d)}
restricted to the ``m`` lexicographically smallest points.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError
from .monomials import count_monomials


def base_digits(m: int, q: int) -> list[int]:
    """Base-q digits of ``m``, least significant first (``[]`` for 0)."""
    digits = []
    while m:
        m, r = divmod(m, q)
        digits.append(r)
    return digits


def top_power(m: int, q: int) -> tuple[int, int]:
    """``(r, q**r)`` for the largest r with ``q**r <= m`` (m >= 1)."""
    r, power = 0, 1
    while power * q <= m:
        power *= q
        r += 1
    return r, power


@dataclass
class GdTable:
    """Memoized g_{d,q}.

    Negative degrees, ``m = 0`` and ``m = 1`` short-circuit before the memo,
    so the table only holds keys with ``d >= 0`` and ``m >= 2``.
    """

    q: int
    _memo: dict[tuple[int, int], int] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        if self.q < 2:
            raise DomainError(f"base must be >= 2, got {self.q}")

    def __call__(self, d: int, m: int) -> int:
        return self.gd(d, m)

    def gd(self, d: int, m: int) -> int:
        if m < 0:
            raise DomainError(f"g is defined for m >= 0, got {m}")
        if d < 0 or m == 0:
            return 0
        if m == 1:
            return 1
        key = (d, m)
        val = self._memo.get(key)
        if val is not None:
            return val
        r, power = top_power(m, self.q)
        if m == power:
            below = power // self.q
            val = sum(self.gd(d - i, below) for i in range(self.q))
        else:
            val = self.gd(d, power) + self.gd(d - 1, m - power)
        self._memo[key] = val
        return val

    def array(self, d_max: int, m_max: int, d_min: int = -1) -> np.ndarray:
        """Table ``G[d - d_min, m]`` for ``d_min <= d <= d_max``, ``0 <= m <= m_max``.

        Filled bottom-up over m, one numpy column at a time; it is a second
        evaluation path next to :meth:`gd` and the two are cross-checked.
        """
        d_min = min(d_min, -1)
        rows = d_max - d_min + 1
        off = -d_min
        g = np.zeros((rows, m_max + 1), dtype=np.int64)
        nonneg = np.arange(rows) >= off
        if m_max >= 1:
            g[nonneg, 1] = 1

        def shifted(col: np.ndarray, by: int) -> np.ndarray:
            # column for degree d - by, zero where d - by < 0
            out = np.zeros_like(col)
            out[by:] = col[: rows - by] if by < rows else 0
            return out

        power, prev = self.q, 1
        for m in range(2, m_max + 1):
            if m == power:
                col = g[:, prev]
                g[:, m] = sum(shifted(col, i) for i in range(self.q))
                prev, power = power, power * self.q
            else:
                g[:, m] = g[:, prev] + shifted(g[:, m - prev], 1)
            g[:off, m] = 0
        return g


def gd(q: int, d: int, m: int) -> int:
    """Convenience one-shot evaluation."""
    return _table(q).gd(d, m)


_TABLES: dict[int, GdTable] = {}


def _table(q: int) -> GdTable:
    t = _TABLES.get(q)
    if t is None:
        t = _TABLES[q] = GdTable(q)
    return t


def power_block(q: int, d: int, k: int, r: int) -> int:
    """``g_{d,q}(k * q**r)`` for ``0 <= k <= q`` from monomial counts alone."""
    return sum(count_monomials(q, d - i, r) for i in range(k))


def gd_digit_expansion(table: GdTable, d: int, m: int) -> int:
    """g via the closed base-q digit expansion.

    With ``m = sum a_i q^i`` the value is
    ``sum_i g_{d - (a_{i+1} + ... + a_top)}(a_i q^i)``, and each term
    ``g_e(a q^i)`` is a sum of ``a`` monomial counts. No call goes through
    the recursion in :meth:`GdTable.gd`.
    """
    if m < 1:
        raise DomainError(f"digit expansion needs m >= 1, got {m}")
    digits = base_digits(m, table.q)
    total, above = 0, 0
    for i in range(len(digits) - 1, -1, -1):
        total += power_block(table.q, d - above, digits[i], i)
        above += digits[i]
    return total


def mixed_radix_value(table: GdTable, d: int, m: int) -> int:
    """``sum_{i<k} g_{d-i}(q^r) + g_{d-k}(c)`` for ``m = k q^r + c``."""
    r, power = top_power(m, table.q)
    k, c = divmod(m, power)
    return sum(table.gd(d - i, power) for i in range(k)) + table.gd(d - k, c)


def check_diff_monotone(table: GdTable, d_hi: int, d_lo: int, a: int) -> bool:
    """First differences at ``a`` are at least as large for the larger degree."""
    if d_hi <= d_lo or a < 1:
        raise DomainError("need d_hi > d_lo and a >= 1")
    hi = table.gd(d_hi, a) - table.gd(d_hi, a - 1)
    lo = table.gd(d_lo, a) - table.gd(d_lo, a - 1)
    return hi >= lo


@dataclass(frozen=True)
class LiftingReport:
    q: int
    a_max: int
    d_min: int
    d_max: int
    comparisons: int
    counterexample: dict | None = None

    @property
    def passed(self) -> bool:
        return self.counterexample is None


def check_lifting_and_monotone(
    table: GdTable, a_max: int, d_max: int, d_min: int = -1
) -> LiftingReport:
    """Check lifting and degree-monotonicity over all ``0 <= b < a <= a_max``.

    For each pair ``d > d'`` the difference ``h = g_d - g_d'`` must satisfy
    ``h(a) >= h(b)`` for every ``b < a``; that is checked against the running
    maximum of ``h``, which covers all pairs exactly. ``b = 0`` gives
    ``g_d(a) >= g_d'(a)``.
    """
    g = table.array(d_max, a_max, d_min=d_min)
    off = -min(d_min, -1)
    comparisons = 0
    for d in range(d_min + 1, d_max + 1):
        for d2 in range(d_min, d):
            h = g[d + off] - g[d2 + off]
            running = np.maximum.accumulate(h)
            comparisons += a_max * (a_max + 1) // 2
            bad = np.flatnonzero(h[1:] < running[:-1])
            if bad.size:
                a = int(bad[0]) + 1
                b = int(np.flatnonzero(h[:a] == running[a - 1])[0])
                return LiftingReport(
                    table.q, a_max, d_min, d_max, comparisons,
                    {"d": d, "d_prime": d2, "a": a, "b": b},
                )
    return LiftingReport(table.q, a_max, d_min, d_max, comparisons)


def gd_scan(q: int, d_values: Iterable[int], m_values: Sequence[int]) -> list[tuple[int, int, int, int]]:
    """Rows ``(q, d, m, g_{d,q}(m))`` in d-major order."""
    table = _table(q)
    return [(q, d, m, table.gd(d, m)) for d in d_values for m in m_values]


# The recursion depth grows with the number of base-q digits times q.
sys.setrecursionlimit(max(sys.getrecursionlimit(), 10_000))
