"""Slow, independent reference implementations used as test oracles.

Nothing here imports the package; each routine is the most literal
pure-Python rendering of its definition.
"""

from __future__ import annotations

import cmath
import itertools
from functools import lru_cache


def naive_rank(rows: list[list[int]], p: int) -> int:
    """Row reduction on Python lists, pivoting on the first nonzero row per column."""
    m = [[x % p for x in r] for r in rows]
    if not m:
        return 0
    rank, width = 0, len(m[0])
    for col in range(width):
        piv = next((i for i in range(rank, len(m)) if m[i][col]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = pow(m[rank][col], p - 2, p)
        m[rank] = [x * inv % p for x in m[rank]]
        for i in range(len(m)):
            if i != rank and m[i][col]:
                f = m[i][col]
                m[i] = [(a - f * b) % p for a, b in zip(m[i], m[rank])]
        rank += 1
    return rank


def naive_monomials(p: int, d: int, n: int) -> list[tuple[int, ...]]:
    return [e for e in itertools.product(range(p), repeat=n) if sum(e) <= d]


def naive_points(p: int, n: int) -> list[tuple[int, ...]]:
    # itertools.product is lexicographic with the first coordinate most significant
    return list(itertools.product(range(p), repeat=n))


def naive_matrix(p: int, d: int, n: int, codes) -> list[list[int]]:
    mons = naive_monomials(p, d, n)
    pts = naive_points(p, n)
    out = []
    for c in codes:
        x = pts[c]
        row = []
        for e in mons:
            v = 1
            for xi, ei in zip(x, e):
                v = v * pow(xi, ei, p) % p if ei else v
            row.append(v)
        out.append(row)
    return out


@lru_cache(maxsize=None)
def naive_g(q: int, d: int, m: int) -> int:
    """g_{d,q}(m) straight from its defining recursion."""
    if d < 0 or m == 0:
        return 0
    if m == 1:
        return 1
    r = 0
    while q ** (r + 1) <= m:
        r += 1
    if m == q**r:
        return sum(naive_g(q, d - i, q ** (r - 1)) for i in range(q))
    return naive_g(q, d, q**r) + naive_g(q, d - 1, m - q**r)


def naive_bias(coeffs: dict[tuple[int, ...], int], p: int, n: int, j: int) -> complex:
    w = cmath.exp(2j * cmath.pi / p)
    total = 0
    for x in naive_points(p, n):
        val = 0
        for e, c in coeffs.items():
            term = c
            for xi, ei in zip(x, e):
                term *= xi**ei
            val += term
        total += w ** (j * (val % p))
    return total / p**n
