"""Generator matrices of Reed-Muller codes over F_p and exact rank mod p."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO

import numpy as np

from .errors import DomainError, check_cells
from .gf import FieldSpec, all_points
from .monomials import MonomialSet, enumerate_monomials, evaluation_matrix


@dataclass(frozen=True)
class EvalMatrix:
    """Rows of M^{(d)} for a set of points; entry ``(x, q) = q(x)``."""

    spec: FieldSpec
    n: int
    d: int
    columns: MonomialSet
    rows: tuple[int, ...]
    entries: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def to_csv(self, out: TextIO | None = None) -> str:
        """Residues one row per point under a header of monomial names."""
        buf = io.StringIO() if out is None else out
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns.names())
        writer.writerows(self.entries.tolist())
        return buf.getvalue() if out is None else ""


def normalize_rows(rows: Iterable[int], spec: FieldSpec, n: int) -> tuple[int, ...]:
    """Validate a row set and return it sorted and deduplicated."""
    size = spec.p**n
    out = sorted(set(int(r) for r in rows))
    if out and (out[0] < 0 or out[-1] >= size):
        raise DomainError(f"row codes must lie in [0, {size})")
    return tuple(out)


def lex_minimal_set(m: int, spec: FieldSpec, n: int) -> tuple[int, ...]:
    """S_m: the m lexicographically smallest points, i.e. codes 0..m-1."""
    if not 1 <= m <= spec.p**n:
        raise DomainError(f"m={m} out of range [1, {spec.p}^{n}]")
    return tuple(range(m))


def build_matrix(
    spec: FieldSpec,
    n: int,
    d: int,
    rows: Iterable[int],
    max_cells: int | None = None,
) -> EvalMatrix:
    if d < 0:
        raise DomainError(f"degree must be non-negative, got {d}")
    rows = normalize_rows(rows, spec, n)
    columns = enumerate_monomials(spec.p, d, n)
    check_cells(len(rows) * len(columns), max_cells, "generator matrix")
    pts = all_points(n, spec.p)[list(rows)] if rows else np.zeros((0, n), dtype=np.int64)
    entries = evaluation_matrix(pts, columns.exponent_array(), spec.p)
    return EvalMatrix(spec, n, d, columns, rows, entries)


def full_matrix(spec: FieldSpec, n: int, d: int, max_cells: int | None = None) -> EvalMatrix:
    return build_matrix(spec, n, d, range(spec.p**n), max_cells=max_cells)


def _eliminate_columns(a: np.ndarray, p: int, inv: np.ndarray) -> int:
    """Row-reduce ``a`` in place, one pivot search per column; returns the rank."""
    n_rows, n_cols = a.shape
    rank = 0
    for col in range(n_cols):
        if rank == n_rows:
            break
        nz = np.flatnonzero(a[rank:, col])
        if nz.size == 0:
            continue
        piv = rank + int(nz[0])
        if piv != rank:
            a[[rank, piv]] = a[[piv, rank]]
        a[rank] = a[rank] * inv[a[rank, col]] % p
        below = a[rank + 1 :, col]
        hit = np.flatnonzero(below)
        if hit.size:
            idx = hit + rank + 1
            a[idx] = (a[idx] - np.outer(a[idx, col], a[rank])) % p
        rank += 1
    return rank


_INV_CACHE: dict[int, np.ndarray] = {}


def _inverse_table(p: int) -> np.ndarray:
    table = _INV_CACHE.get(p)
    if table is None:
        table = _INV_CACHE[p] = FieldSpec(p).inverse_table()
    return table


def rank_of_array(a: np.ndarray, p: int, orientation: str = "auto") -> int:
    """Exact rank over F_p of an integer array.

    ``orientation`` picks which side the pivot loop runs over: ``"columns"``
    eliminates the array as given, ``"rows"`` eliminates its transpose, and
    ``"auto"`` loops over the smaller dimension.
    """
    a = np.asarray(a, dtype=np.int64)
    if a.ndim != 2:
        raise DomainError("rank needs a 2-d array")
    if a.size == 0:
        return 0
    if orientation == "auto":
        orientation = "rows" if a.shape[0] < a.shape[1] else "columns"
    work = a.T.copy() if orientation == "rows" else a.copy()
    work %= p
    return _eliminate_columns(work, p, _inverse_table(p))


def rank_mod_p(m: EvalMatrix) -> int:
    return rank_of_array(m.entries, m.spec.p)


def rank_of_subset(
    spec: FieldSpec, n: int, d: int, rows: Iterable[int], max_cells: int | None = None
) -> int:
    return rank_mod_p(build_matrix(spec, n, d, rows, max_cells=max_cells))


class EchelonBasis:
    """Incremental row basis mod p with last-in-first-out removal.

    Each stored row is reduced against all earlier rows and scaled so its
    pivot is 1, so reducing a new vector against the rows in insertion order
    leaves it zero exactly when it lies in their span.
    """

    def __init__(self, width: int, p: int):
        self.p = p
        self.width = width
        self._inv = _inverse_table(p)
        self._rows = np.zeros((width, width), dtype=np.int64)
        self._pivots: list[int] = []
        self._history: list[bool] = []

    @property
    def rank(self) -> int:
        return len(self._pivots)

    def reduce(self, v: Sequence[int] | np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=np.int64) % self.p
        for i, col in enumerate(self._pivots):
            if v[col]:
                v = (v - v[col] * self._rows[i]) % self.p
        return v

    def push(self, v: Sequence[int] | np.ndarray) -> bool:
        """Add a row; returns whether the rank grew."""
        r = self.reduce(v)
        nz = np.flatnonzero(r)
        grew = bool(nz.size)
        if grew:
            col = int(nz[0])
            self._rows[len(self._pivots)] = r * self._inv[r[col]] % self.p
            self._pivots.append(col)
        self._history.append(grew)
        return grew

    def pop(self) -> None:
        if self._history.pop():
            self._pivots.pop()


def prefix_ranks(entries: np.ndarray, p: int) -> list[int]:
    """``out[m-1]`` is the rank of the first ``m`` rows of ``entries``."""
    basis = EchelonBasis(entries.shape[1], p)
    out = []
    for row in entries:
        basis.push(row)
        out.append(basis.rank)
    return out
