"""The monomial set M_{p,d,n}: enumeration, counting and evaluation.

Exponents are capped at ``p - 1`` because ``x**p`` and ``x`` agree as
functions on F_p; with the cap the columns of the generator matrix are
linearly independent.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import ceil, comb
from typing import Sequence

import numpy as np

from .errors import DomainError


@dataclass(frozen=True, order=False)
class Monomial:
    exponents: tuple[int, ...]

    @property
    def degree(self) -> int:
        return sum(self.exponents)

    @property
    def n(self) -> int:
        return len(self.exponents)

    def name(self) -> str:
        """Human readable name such as ``x1^2*x3``; the constant is ``1``."""
        parts = []
        for i, e in enumerate(self.exponents, start=1):
            if e == 1:
                parts.append(f"x{i}")
            elif e > 1:
                parts.append(f"x{i}^{e}")
        return "*".join(parts) if parts else "1"

    def __str__(self) -> str:
        return self.name()


@dataclass(frozen=True)
class MonomialSet:
    """Monomials of degree <= d in n variables over F_p, graded-lex ordered.

    Order: by total degree, then by exponent vector ascending, which for
    ``(p, d, n) = (3, 2, 2)`` gives ``1, x2, x1, x2^2, x1*x2, x1^2``.
    """

    p: int
    d: int
    n: int
    monomials: tuple[Monomial, ...] = field(repr=False)

    def __len__(self) -> int:
        return len(self.monomials)

    def __iter__(self):
        return iter(self.monomials)

    def __getitem__(self, i: int) -> Monomial:
        return self.monomials[i]

    def index(self, m: Monomial | Sequence[int]) -> int:
        key = m if isinstance(m, Monomial) else Monomial(tuple(m))
        return self._positions[key]

    @property
    def _positions(self) -> dict[Monomial, int]:
        cache = self.__dict__.get("_pos_cache")
        if cache is None:
            cache = {m: i for i, m in enumerate(self.monomials)}
            object.__setattr__(self, "_pos_cache", cache)
        return cache

    def exponent_array(self) -> np.ndarray:
        """``(len(self), n)`` int64 array of exponent vectors."""
        if not self.monomials:
            return np.zeros((0, self.n), dtype=np.int64)
        return np.array([m.exponents for m in self.monomials], dtype=np.int64).reshape(
            len(self.monomials), self.n
        )

    def names(self) -> list[str]:
        return [m.name() for m in self.monomials]


def enumerate_monomials(p: int, d: int, n: int) -> MonomialSet:
    """All exponent vectors in ``[0, p-1]^n`` of total degree <= d."""
    if p < 2 or n < 0:
        raise DomainError(f"need p >= 2 and n >= 0, got p={p}, n={n}")
    if d < 0:
        return MonomialSet(p, d, n, ())
    top = min(d, p - 1)
    exps = [e for e in itertools.product(range(top + 1), repeat=n) if sum(e) <= d]
    exps.sort(key=lambda e: (sum(e), e))
    return MonomialSet(p, d, n, tuple(Monomial(e) for e in exps))


@lru_cache(maxsize=None)
def count_monomials(p: int, d: int, n: int) -> int:
    """|M_{p,d,n}| via stratification by the degree in one variable."""
    if p < 2 or n < 0:
        raise DomainError(f"need p >= 2 and n >= 0, got p={p}, n={n}")
    if d < 0:
        return 0
    if n == 0:
        return 1
    # Every monomial has degree <= n(p-1); beyond that the count is constant.
    d = min(d, n * (p - 1))
    return sum(count_monomials(p, d - i, n - 1) for i in range(min(d, p - 1) + 1))


def eval_monomial(m: Monomial, x: Sequence[int], p: int) -> int:
    """``prod x_i**e_i mod p`` with the convention ``0**0 == 1``."""
    if len(x) != m.n:
        raise DomainError(f"point has {len(x)} coordinates, monomial has {m.n}")
    value = 1
    for xi, e in zip(x, m.exponents):
        value = value * pow(xi, e, p) % p
    return value


def evaluation_matrix(points: np.ndarray, exponents: np.ndarray, p: int) -> np.ndarray:
    """Entry ``(i, j)`` is monomial ``j`` evaluated at point ``i``, mod p."""
    points = np.asarray(points, dtype=np.int64)
    n_pts = points.shape[0]
    k = exponents.shape[0]
    # powers[v, e] = v**e mod p
    powers = np.ones((p, p), dtype=np.int64)
    for e in range(1, p):
        powers[:, e] = powers[:, e - 1] * np.arange(p) % p
    out = np.ones((n_pts, k), dtype=np.int64)
    for i in range(exponents.shape[1]):
        out = out * powers[points[:, i][:, None], exponents[:, i][None, :]] % p
    return out


@dataclass(frozen=True)
class CountBoundsReport:
    p: int
    d: int
    n: int
    lower: int
    count: int
    upper: int

    @property
    def passed(self) -> bool:
        return self.lower <= self.count <= self.upper


def check_count_bounds(p: int, d: int, n: int) -> CountBoundsReport:
    """Check ``sum_{i<=d} C(n, i) <= |M_{p,d,n}| <= C(n+d, d)``."""
    if not 0 <= d <= n:
        raise DomainError(f"need 0 <= d <= n, got d={d}, n={n}")
    lower = sum(comb(n, i) for i in range(d + 1))
    return CountBoundsReport(p, d, n, lower, count_monomials(p, d, n), comb(n + d, d))


RATIO_WINDOW = (Fraction(1, 24), Fraction(2))


@dataclass(frozen=True)
class RatioReport:
    p: int
    d: int
    n: int
    ratio: Fraction
    """(n/d) * |M_{p,d-1,n}| / |M_{p,d,n}|"""
    n_shrunk: int
    """ceil(n (1 - 1/d)), the reduced variable count"""
    shrink_ratio: Fraction
    """|M_{p,d,n_shrunk}| / |M_{p,d,n}|; reported only, no threshold"""

    @property
    def passed(self) -> bool:
        lo, hi = RATIO_WINDOW
        return lo <= self.ratio <= hi


def check_ratio_props(p: int, d: int, n: int) -> RatioReport:
    if p < 3 or not 1 <= d <= n:
        raise DomainError(f"need p >= 3 and 1 <= d <= n, got p={p}, d={d}, n={n}")
    full = count_monomials(p, d, n)
    ratio = Fraction(n, d) * Fraction(count_monomials(p, d - 1, n), full)
    n_shrunk = ceil(Fraction(n * (d - 1), d))
    shrink = Fraction(count_monomials(p, d, n_shrunk), full)
    return RatioReport(p, d, n, ratio, n_shrunk, shrink)
