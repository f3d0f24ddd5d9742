"""Rank of truncated generator matrices against the extremal function g_d.

Every row subset S of M^{(d)} has rank at least g_d(|S|), with equality on
the lexicographically smallest sets S_m.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np

from .errors import DEFAULT_MAX_SUBSET_POINTS, DomainError, ResourceLimitError
from .gd import _table
from .gf import FieldSpec
from .monomials import count_monomials
from .rm_matrix import EchelonBasis, full_matrix, prefix_ranks, rank_of_array

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(fn: Callable[[T], R], items: Iterable[T], threads: int = 1) -> list[R]:
    """``list(map(fn, items))``, optionally on a thread pool; order is kept."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def extremal_dim(p: int, d: int, m: int) -> int:
    """g_{d,p}(m); the value does not depend on the ambient number of variables."""
    if m < 0:
        raise DomainError(f"m must be >= 0, got {m}")
    return _table(p).gd(d, m)


@dataclass(frozen=True)
class SizeRow:
    m: int
    min_rank_observed: int
    g_d: int
    mode: str
    subsets: int = 1

    @property
    def slack(self) -> int:
        return self.min_rank_observed - self.g_d

    def as_record(self) -> dict:
        return {"m": self.m, "min_rank_observed": self.min_rank_observed,
                "g_d": self.g_d, "slack": self.slack, "mode": self.mode}


@dataclass
class ExtremalReport:
    p: int
    n: int
    d: int
    mode: str
    rows: list[SizeRow] = field(default_factory=list)
    violations: list[dict] = field(default_factory=list)
    subsets_checked: int = 0

    @property
    def passed(self) -> bool:
        return not self.violations

    def records(self) -> list[dict]:
        return [r.as_record() for r in self.rows]


def check_lex_equality(p: int, n: int, d: int, max_cells: int | None = None) -> ExtremalReport:
    """rank(M_{S_m}) == g_d(m) for every m in [1, p^n]."""
    mat = full_matrix(FieldSpec(p), n, d, max_cells=max_cells)
    ranks = prefix_ranks(mat.entries, p)
    table = _table(p)
    report = ExtremalReport(p, n, d, "lex")
    for m, rank in enumerate(ranks, start=1):
        g = table.gd(d, m)
        report.rows.append(SizeRow(m, rank, g, "lex"))
        if rank != g:
            report.violations.append({"kind": "lex_equality", "p": p, "n": n, "d": d,
                                      "m": m, "rank": rank, "g_d": g})
        report.subsets_checked += 1
    return report


def check_all_subsets(
    p: int, n: int, d: int,
    max_points: int = DEFAULT_MAX_SUBSET_POINTS,
    max_cells: int | None = None,
) -> ExtremalReport:
    """Depth-first walk over every nonempty subset with an incremental basis.

    Subsets are visited in an order where each one extends its parent by a
    larger point code, so a push/pop pair per edge suffices. The minimum rank
    per size is recorded, and the lex-minimal set of each size is confirmed to
    have slack 0.
    """
    size = p**n
    if size > max_points:
        raise ResourceLimitError(f"2^{size} subsets exceeds the limit 2^{max_points}")
    mat = full_matrix(FieldSpec(p), n, d, max_cells=max_cells).entries
    table = _table(p)
    g = [table.gd(d, m) for m in range(size + 1)]
    min_rank = [None] * (size + 1)
    count = [0] * (size + 1)
    lex_rank = [None] * (size + 1)
    violations: list[dict] = []
    basis = EchelonBasis(mat.shape[1], p)
    chosen: list[int] = []

    def visit(start: int, is_prefix: bool) -> None:
        k = len(chosen)
        r = basis.rank
        count[k] += 1
        if min_rank[k] is None or r < min_rank[k]:
            min_rank[k] = r
        if is_prefix:
            lex_rank[k] = r
        if r < g[k] and len(violations) < 16:
            violations.append({"kind": "lower_bound", "p": p, "n": n, "d": d,
                               "subset": list(chosen), "rank": r, "g_d": g[k]})
        for x in range(start, size):
            basis.push(mat[x])
            chosen.append(x)
            visit(x + 1, is_prefix and x == k)
            chosen.pop()
            basis.pop()

    for x in range(size):
        basis.push(mat[x])
        chosen.append(x)
        visit(x + 1, x == 0)
        chosen.pop()
        basis.pop()

    report = ExtremalReport(p, n, d, "exhaustive", violations=violations)
    for m in range(1, size + 1):
        report.rows.append(SizeRow(m, min_rank[m], g[m], "exhaustive", count[m]))
        if lex_rank[m] != g[m]:
            report.violations.append({"kind": "lex_equality", "p": p, "n": n, "d": d,
                                      "m": m, "rank": lex_rank[m], "g_d": g[m]})
    report.subsets_checked = sum(count)
    return report


def sample_sizes(total: int, samples: int) -> list[tuple[int, int]]:
    """Split ``samples`` over sizes 1..total round-robin; ``(size, how_many)`` pairs."""
    if samples < 0:
        raise DomainError("samples must be >= 0")
    base, extra = divmod(samples, total)
    return [(s, base + (1 if s <= extra else 0)) for s in range(1, total + 1)
            if base + (1 if s <= extra else 0)]


def _draw_subsets(rng: np.random.Generator, total: int, size: int, how_many: int) -> Iterable[np.ndarray]:
    pool = np.arange(total)
    for _ in range(how_many):
        # partial Fisher-Yates: the first `size` slots end up a uniform subset
        for i in range(size):
            j = int(rng.integers(i, total))
            pool[i], pool[j] = pool[j], pool[i]
        yield np.sort(pool[:size])


def check_sampled_subsets(
    p: int, n: int, d: int, samples: int, seed: int,
    threads: int = 1, max_cells: int | None = None,
) -> ExtremalReport:
    """Uniform random subsets of every size with rank >= g_d(|S|).

    ``samples`` is the total per call; sizes receive equal shares, with
    smaller sizes taking the remainder, so every power of p appears once
    ``samples >= p^n``. A subset of size p^r is also checked against
    |M_{p,d,r}|. Each size draws from its own generator seeded by
    ``(seed, p, n, d, size)``, so results do not depend on ``threads``.
    """
    total = p**n
    mat = full_matrix(FieldSpec(p), n, d, max_cells=max_cells).entries
    table = _table(p)
    powers = {p**r: r for r in range(n + 1)}

    def run(item: tuple[int, int]) -> tuple[SizeRow, list[dict]]:
        size, how_many = item
        rng = np.random.default_rng([seed, p, n, d, size])
        g = table.gd(d, size)
        floor = count_monomials(p, d, powers[size]) if size in powers else None
        lowest = None
        bad: list[dict] = []
        for subset in _draw_subsets(rng, total, size, how_many):
            r = rank_of_array(mat[subset], p)
            lowest = r if lowest is None else min(lowest, r)
            if r < g:
                bad.append({"kind": "lower_bound", "p": p, "n": n, "d": d,
                            "subset": subset.tolist(), "rank": r, "g_d": g})
            if floor is not None and r < floor:
                bad.append({"kind": "power_size", "p": p, "n": n, "d": d,
                            "subset": subset.tolist(), "rank": r, "monomials": floor})
        return SizeRow(size, lowest, g, "sampled", how_many), bad

    report = ExtremalReport(p, n, d, "sampled")
    for row, bad in ordered_map(run, sample_sizes(total, samples), threads):
        report.rows.append(row)
        report.violations.extend(bad)
        report.subsets_checked += row.subsets
    return report


def check_n_independence(p: int, d: int, m_max: int, n_values: Sequence[int],
                         max_cells: int | None = None) -> list[dict]:
    """Mismatches between g_d(m) and rank(M_{S_m}) across several ambient n."""
    table = _table(p)
    bad = []
    for n in n_values:
        if p**n < m_max:
            raise DomainError(f"n={n} too small for m={m_max}")
        mat = full_matrix(FieldSpec(p), n, d, max_cells=max_cells).entries[:m_max]
        for m, rank in enumerate(prefix_ranks(mat, p), start=1):
            if rank != table.gd(d, m):
                bad.append({"n": n, "m": m, "rank": rank, "g_d": table.gd(d, m)})
    return bad
