"""Sub-additivity of g_{d,q} over the cone V of weakly decreasing vectors.

For ``a = (a_0 >= ... >= a_{q-1} >= 0)`` the value ``v_d(a) = sum_i g_{d-i}(a_i)``
is bounded below by ``g_d(|a|_1)``. The bound is checked directly by scanning
V, and separately through the improvement step: a vector outside the fixed
point class ``V_*`` is moved, with its norm kept, to a strictly smaller vector
whose value is no larger, by one of three transforms (singularize, transpose,
repack) picked from its structure.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import total_ordering
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .errors import DomainError, InvariantError
from .gd import GdTable


@total_ordering
@dataclass(frozen=True)
class GradedVector:
    """A point of V; the length of the vector is the base q."""

    entries: tuple[int, ...]

    def __post_init__(self) -> None:
        e = tuple(int(x) for x in self.entries)
        object.__setattr__(self, "entries", e)
        if len(e) < 2:
            raise DomainError("vectors in V need q >= 2 entries")
        if e[-1] < 0 or any(x < y for x, y in zip(e, e[1:])):
            raise DomainError(f"{e} is not weakly decreasing and non-negative")

    @classmethod
    def of(cls, *entries: int) -> "GradedVector":
        return cls(tuple(entries))

    @property
    def q(self) -> int:
        return len(self.entries)

    @property
    def norm(self) -> int:
        return sum(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i: int) -> int:
        return self.entries[i]

    def __lt__(self, other: "GradedVector") -> bool:
        return order_less(self, other)

    def __repr__(self) -> str:
        return f"GradedVector{self.entries}"


def order_less(x: GradedVector, y: GradedVector) -> bool:
    """Smaller norm first; at equal norm the lexicographically LARGER vector is smaller."""
    if x.q != y.q:
        raise DomainError("vectors have different bases")
    if x.norm != y.norm:
        return x.norm < y.norm
    return x.entries > y.entries


def value_vd(a: GradedVector | Sequence[int], d: int, table: GdTable) -> int:
    return sum(table.gd(d - i, ai) for i, ai in enumerate(a))


def in_v_star(a: Sequence[int]) -> bool:
    """``a = (q^r, ..., q^r, a_t, 0, ..., 0)`` with ``a_t < q^r`` (t may be 0 or q)."""
    q = len(a)
    t = 0
    while t < q and a[t] == a[0]:
        t += 1
    lead = a[0]
    if lead == 0:
        return True
    if t == q or all(x == 0 for x in a[t + 1 :]):
        if _is_power(lead, q):
            return True
    # t = 0 form: a single positive entry followed by zeros
    return all(x == 0 for x in a[1:])


def _is_power(x: int, q: int) -> bool:
    while x > 1 and x % q == 0:
        x //= q
    return x == 1


@dataclass(frozen=True)
class VectorStructure:
    """Base-``q^hp`` decomposition of a nonzero vector and its predicates.

    ``a_i = k_i * q^hp + c_i``. Intervals are maximal runs of equal ``k``;
    ``heights[i]`` is the common ``k`` on ``intervals[i]``.
    """

    q: int
    hp: int
    unit: int  # q ** hp
    k: tuple[int, ...]
    c: tuple[int, ...]
    intervals: tuple[tuple[int, int], ...]
    heights: tuple[int, ...]
    widths: tuple[int, ...]
    interval_singularized: tuple[bool, ...]
    interval_narrow: tuple[bool, ...]
    singularized: bool
    narrow: bool
    in_v_star: bool
    packed_from: tuple[int, int] | None
    """(interval index, k) of the first interval start s with [s, q-1] packed"""

    def order_width(self, i: int, j: int) -> int:
        """Number of ``t >= i`` with ``a_t >= j * q^hp``."""
        return sum(1 for t in range(i, self.q) if self.k[t] >= j)


def highest_power(a0: int, q: int) -> int:
    """Largest r with ``a0 > q^r``; 0 when ``a0 == 1``."""
    if a0 < 1:
        raise DomainError("highest power needs a positive leading entry")
    r, power = 0, 1
    while a0 > power * q:
        power *= q
        r += 1
    return r


def _is_packed(a: Sequence[int], s: int, k: int, unit: int) -> bool:
    q = len(a)
    level = k * unit
    if not level <= a[s] < level + unit:
        return False
    j = s + 1
    while j < q and a[j] == level:
        j += 1
    if j == q:
        return True
    # a_j < level, then zeros
    return a[j] < level and all(x == 0 for x in a[j + 1 :])


def classify(a: GradedVector | Sequence[int]) -> VectorStructure:
    a = tuple(a)
    q = len(a)
    if not a or a[0] < 1:
        raise DomainError("classify needs a nonzero vector")
    hp = highest_power(a[0], q)
    unit = q**hp
    k = tuple(x // unit for x in a)
    c = tuple(x % unit for x in a)
    if max(k) > q:
        raise InvariantError(f"k out of range for {a}")

    intervals, heights = [], []
    s = 0
    for i in range(1, q + 1):
        if i == q or k[i] != k[s]:
            intervals.append((s, i - 1))
            heights.append(k[s])
            s = i
    widths = tuple(sum(1 for j in range(i, q) if a[j] >= unit) for i in range(q))

    sing = []
    for (s, t), h in zip(intervals, heights):
        first = s if h == q else s + 1
        sing.append(all(c[j] == 0 for j in range(first, t + 1)))
    narrow = [h >= widths[s] for (s, _), h in zip(intervals, heights)]

    packed_from = None
    for idx, ((s, _), h) in enumerate(zip(intervals, heights)):
        if _is_packed(a, s, h, unit):
            packed_from = (idx, h)
            break

    return VectorStructure(
        q=q,
        hp=hp,
        unit=unit,
        k=k,
        c=c,
        intervals=tuple(intervals),
        heights=tuple(heights),
        widths=widths,
        interval_singularized=tuple(sing),
        interval_narrow=tuple(narrow),
        singularized=all(sing),
        narrow=all(narrow),
        in_v_star=in_v_star(a),
        packed_from=packed_from,
    )


def singularize(a: GradedVector) -> GradedVector:
    """Pool the remainders of every interval into as few entries as possible.

    Per interval ``[s, t]`` of height ``h``: write ``sum_{j in [s,t]} c_j = e q^r + f``;
    the first ``e`` entries become ``(h+1) q^r``, entry ``s+e`` becomes
    ``h q^r + f`` and the rest ``h q^r``.
    """
    st = classify(a)
    if st.singularized:
        raise DomainError(f"{a} is already singularized")
    unit = st.unit
    out = list(a.entries)
    for (s, t), h in zip(st.intervals, st.heights):
        pooled = sum(st.c[s : t + 1])
        e, f = divmod(pooled, unit)
        if e > t - s:
            raise InvariantError(f"pooled remainder overflows interval [{s},{t}] of {a}")
        for j in range(s, t + 1):
            out[j] = h * unit
        for j in range(s, s + e):
            out[j] += unit
        out[s + e] += f
    return GradedVector(tuple(out))


def transpose(a: GradedVector) -> GradedVector:
    """Replace the height profile from the first non-narrow interval on by its transpose.

    From ``s0`` (start of that interval) onwards the new multiplicities are
    ``k'_i = #{j >= s0 : k_j >= i + 1 - s0}`` and the remainder of every
    later interval of height ``h`` moves to position ``s0 + h``.
    """
    st = classify(a)
    if not st.singularized or st.narrow:
        raise DomainError(f"transpose needs a singularized, non-narrow vector, got {a}")
    i0 = st.interval_narrow.index(False)
    s0 = st.intervals[i0][0]
    q, unit = st.q, st.unit
    k_new = list(st.k)
    c_new = list(st.c)
    for i in range(s0, q):
        k_new[i] = st.order_width(s0, 1 + i - s0)
        c_new[i] = 0
    placed: set[int] = set()
    for idx in range(i0, len(st.intervals)):
        s, _ = st.intervals[idx]
        pos = s0 + st.heights[idx]
        if pos >= q or pos in placed:
            raise InvariantError(f"remainder position {pos} invalid while transposing {a}")
        placed.add(pos)
        c_new[pos] = st.c[s]
    return GradedVector(tuple(k * unit + c for k, c in zip(k_new, c_new)))


def repack(a: GradedVector) -> GradedVector:
    """Repack the first packed suffix into columns one level taller.

    With ``[s0, q-1]`` the first packed suffix (height ``h``), its total
    ``xi`` is rewritten as ``t`` entries equal to ``(h+1) q^r`` followed by
    the remainder ``xi - t (h+1) q^r`` and zeros.
    """
    st = classify(a)
    if not st.singularized or not st.narrow or st.in_v_star:
        raise DomainError(f"repack needs a singularized, narrow vector outside V_*, got {a}")
    if st.packed_from is None:
        raise InvariantError(f"no packed suffix in {a}")
    i0, h = st.packed_from
    if h <= 0:
        raise InvariantError(f"packed suffix of {a} has height 0")
    s0 = st.intervals[i0][0]
    q = st.q
    level = (h + 1) * st.unit
    xi = sum(a.entries[s0:])
    t, rem = divmod(xi, level)
    if s0 + t > q or (rem and s0 + t >= q):
        raise InvariantError(f"repacked suffix of {a} does not fit")
    out = list(a.entries[:s0]) + [level] * t + ([rem] if s0 + t < q else [])
    out += [0] * (q - len(out))
    return GradedVector(tuple(out))


CASE_FIXED = "I"
CASE_SINGULARIZE = "II"
CASE_TRANSPOSE = "III"
CASE_REPACK = "IV"

_TRANSFORMS: dict[str, Callable[[GradedVector], GradedVector]] = {
    CASE_SINGULARIZE: singularize,
    CASE_TRANSPOSE: transpose,
    CASE_REPACK: repack,
}


def dispatch_case(a: GradedVector) -> str:
    if in_v_star(a.entries):
        return CASE_FIXED
    st = classify(a)
    if not st.singularized:
        return CASE_SINGULARIZE
    if not st.narrow:
        return CASE_TRANSPOSE
    return CASE_REPACK


def improve_step(a: GradedVector) -> GradedVector | None:
    """One improvement step; ``None`` marks a fixed point (a is in V_*)."""
    case = dispatch_case(a)
    if case == CASE_FIXED:
        return None
    return _TRANSFORMS[case](a)


@dataclass
class StepRecord:
    before: GradedVector
    case: str
    after: GradedVector | None


def improve_path(a: GradedVector, max_steps: int = 100_000) -> list[StepRecord]:
    """Iterate :func:`improve_step` until a fixed point; the last record has ``after=None``."""
    path = []
    current = a
    for _ in range(max_steps):
        case = dispatch_case(current)
        nxt = None if case == CASE_FIXED else _TRANSFORMS[case](current)
        path.append(StepRecord(current, case, nxt))
        if nxt is None:
            return path
        current = nxt
    raise InvariantError(f"no fixed point reached from {a} in {max_steps} steps")


# --- enumeration -----------------------------------------------------------


def vectors_of_norm(norm: int, q: int) -> Iterator[tuple[int, ...]]:
    """Weakly decreasing q-tuples summing to ``norm`` (partitions into <= q parts)."""

    def rec(remaining: int, slots: int, cap: int) -> Iterator[tuple[int, ...]]:
        if slots == 0:
            if remaining == 0:
                yield ()
            return
        # the remaining slots must absorb `remaining` with entries <= part
        for part in range(min(cap, remaining), -1, -1):
            if part * slots < remaining:
                break
            for rest in rec(remaining - part, slots - 1, part):
                yield (part,) + rest

    yield from rec(norm, q, norm)


def enumerate_v(q: int, norm_cap: int, norm_min: int = 0) -> Iterator[tuple[int, ...]]:
    for norm in range(norm_min, norm_cap + 1):
        yield from vectors_of_norm(norm, q)


def sample_v(q: int, norm_cap: int, count: int, seed: int) -> list[tuple[int, ...]]:
    """``count`` distinct vectors drawn uniformly from V with norm <= ``norm_cap``.

    The pool is enumerated in full, so this is meant for caps where V fits in
    memory; results keep enumeration order.
    """
    pool = list(enumerate_v(q, norm_cap))
    if count >= len(pool):
        return pool
    rng = np.random.default_rng([seed, q, norm_cap])
    picks = np.sort(rng.choice(len(pool), size=count, replace=False))
    return [pool[i] for i in picks]


# --- checks ----------------------------------------------------------------


class ValueTable:
    """Vectorised v_d over a degree range, backed by a g array."""

    def __init__(self, q: int, d_min: int, d_max: int, m_max: int, table: GdTable | None = None):
        self.q = q
        self.table = table or GdTable(q)
        self.d_min, self.d_max = d_min, d_max
        self.lo = min(d_min - (q - 1), -1)
        self.g = self.table.array(d_max, m_max, d_min=self.lo)
        self.degrees = np.arange(d_min, d_max + 1)

    def g_row(self, m: int) -> np.ndarray:
        """``g_d(m)`` for every d in the range."""
        return self.g[self.degrees - self.lo, m]

    def v(self, a: Sequence[int]) -> np.ndarray:
        """``v_d(a)`` for every d in the range."""
        total = np.zeros(len(self.degrees), dtype=np.int64)
        for i, ai in enumerate(a):
            if ai:
                total += self.g[self.degrees - i - self.lo, ai]
        return total


@dataclass
class SubaddReport:
    q: int
    norm_cap: int
    d_min: int
    d_max: int
    vectors: int = 0
    pair_cap: int = 0
    pairs: int = 0
    violations: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


def check_subadditivity(
    q: int,
    norm_cap: int,
    d_range: Iterable[int],
    table: GdTable | None = None,
    pair_cap: int | None = None,
) -> SubaddReport:
    """Direct scan: ``g_d(|a|_1) <= v_d(a)`` for all a in V with bounded norm.

    Also checks ``g_d(x) + g_d(y) >= g_d(x + y)`` for ``x + y <= pair_cap``
    (defaults to ``norm_cap``).
    """
    ds = list(d_range)
    d_min, d_max = min(ds), max(ds)
    pair_cap = norm_cap if pair_cap is None else pair_cap
    vt = ValueTable(q, d_min, d_max, max(norm_cap, pair_cap), table)
    report = SubaddReport(q, norm_cap, d_min, d_max, pair_cap=pair_cap)
    sel = np.array([d - d_min for d in ds])
    for a in enumerate_v(q, norm_cap):
        report.vectors += 1
        lhs = vt.g_row(sum(a))[sel]
        rhs = vt.v(a)[sel]
        bad = np.flatnonzero(lhs > rhs)
        for b in bad:
            report.violations.append(
                {"kind": "subadditivity", "a": list(a), "d": ds[b],
                 "g_norm": int(lhs[b]), "v_d": int(rhs[b])}
            )
    # two-term form over the same degrees
    m = np.arange(pair_cap + 1)
    x, y = np.meshgrid(m, m, indexing="ij")
    ok = x + y <= pair_cap
    report.pairs = int(ok.sum())
    for d in ds:
        row = vt.g[d - vt.lo]
        lhs = row[x] + row[y]
        rhs = np.where(ok, row[np.minimum(x + y, pair_cap)], 0)
        bad = np.argwhere(ok & (lhs < rhs))
        if bad.size:
            xb, yb = (int(v) for v in bad[0])
            report.violations.append({"kind": "two_term", "x": xb, "y": yb, "d": d})
    return report


@dataclass
class TransformReport:
    q: int
    d_min: int
    d_max: int
    vectors: int = 0
    fixed_points: int = 0
    steps: dict[str, int] = field(default_factory=lambda: {CASE_SINGULARIZE: 0, CASE_TRANSPOSE: 0, CASE_REPACK: 0})
    max_path_length: int = 0
    violations: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


def check_transforms(
    q: int,
    vectors: Iterable[Sequence[int]],
    d_range: Iterable[int],
    table: GdTable | None = None,
    trace: Callable[[dict], None] | None = None,
) -> TransformReport:
    """Follow every vector to its fixed point and check each step.

    Per step: result in V, norm kept, strictly smaller in the order, v_d not
    larger for every d (equal for transpose). At the fixed point:
    ``v_d = g_d(norm)``.
    """
    ds = list(d_range)
    d_min, d_max = min(ds), max(ds)
    vectors = [tuple(v) for v in vectors]
    m_max = max((sum(v) for v in vectors), default=0)
    vt = ValueTable(q, d_min, d_max, m_max, table)
    sel = np.array([d - d_min for d in ds])
    report = TransformReport(q, d_min, d_max)

    def fail(kind: str, rec: StepRecord, **extra) -> None:
        report.violations.append(
            {"kind": kind, "case": rec.case, "before": list(rec.before.entries),
             "after": None if rec.after is None else list(rec.after.entries), **extra}
        )

    for entries in vectors:
        start = GradedVector(entries)
        report.vectors += 1
        try:
            path = improve_path(start)
        except (InvariantError, DomainError) as exc:
            report.violations.append({"kind": "error", "a": list(entries), "error": str(exc)})
            continue
        report.max_path_length = max(report.max_path_length, len(path) - 1)
        if len(path) == 1:
            report.fixed_points += 1
        for rec in path:
            v_before = vt.v(rec.before.entries)[sel]
            if rec.after is None:
                g_norm = vt.g_row(rec.before.norm)[sel]
                if (v_before != g_norm).any():
                    fail("fixed_point_value", rec)
                if trace:
                    trace({"vector": list(rec.before.entries), "case": rec.case,
                           "v_before": v_before.tolist(), "v_after": None})
                continue
            report.steps[rec.case] += 1
            v_after = vt.v(rec.after.entries)[sel]
            if trace:
                trace({"vector": list(rec.before.entries), "case": rec.case,
                       "result": list(rec.after.entries),
                       "v_before": v_before.tolist(), "v_after": v_after.tolist()})
            if rec.after.norm != rec.before.norm:
                fail("norm", rec)
            if not rec.after < rec.before:
                fail("order", rec)
            if rec.case == CASE_TRANSPOSE:
                if (v_after != v_before).any():
                    fail("transpose_value", rec)
            elif (v_after > v_before).any():
                fail("value_increase", rec)
    return report


def trace_lines(records: Iterable[dict]) -> Iterator[str]:
    for rec in records:
        yield json.dumps(rec, sort_keys=True)
