"""Prime field arithmetic and the canonical integer encoding of points of F_p^n.

Points are encoded in base p with coordinate 1 as the most significant digit,
so the integer order on codes is the lexicographic order on coordinate
vectors and the ``m`` lexicographically smallest points are the codes
``0, 1, ..., m-1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError

# Residues must fit comfortably in int64 products during elimination.
MAX_MODULUS = 1 << 16


def is_prime(n: int) -> bool:
    """Trial division primality test (p is desk-scale)."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class FieldSpec:
    """Modular arithmetic context for residues in ``[0, p-1]``.

    ``require_prime`` is on by default; the g-function code builds with
    ``require_prime=False`` since any base ``q >= 2`` is allowed there.
    """

    p: int
    require_prime: bool = True

    def __post_init__(self) -> None:
        if self.p < 2:
            raise DomainError(f"modulus must be >= 2, got {self.p}")
        if self.p > MAX_MODULUS:
            raise DomainError(f"modulus {self.p} exceeds supported bound {MAX_MODULUS}")
        if self.require_prime and not is_prime(self.p):
            raise DomainError(f"{self.p} is not prime")

    def _check(self, *xs: int) -> None:
        for x in xs:
            if not 0 <= x < self.p:
                raise DomainError(f"residue {x} out of range [0, {self.p - 1}]")

    def add(self, a: int, b: int) -> int:
        self._check(a, b)
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        self._check(a, b)
        return (a - b) % self.p

    def neg(self, a: int) -> int:
        self._check(a)
        return -a % self.p

    def mul(self, a: int, b: int) -> int:
        self._check(a, b)
        return a * b % self.p

    def inv(self, b: int) -> int:
        """Multiplicative inverse via the extended Euclidean algorithm."""
        self._check(b)
        if b == 0:
            raise DomainError("0 has no multiplicative inverse")
        old_r, r = b, self.p
        old_s, s = 1, 0
        while r:
            quot = old_r // r
            old_r, r = r, old_r - quot * r
            old_s, s = s, old_s - quot * s
        if old_r != 1:
            raise DomainError(f"{b} is not invertible mod {self.p}")
        return old_s % self.p

    def pow(self, a: int, e: int) -> int:
        """``a**e mod p`` by repeated squaring, with ``0**0 == 1``."""
        self._check(a)
        if e < 0:
            return self.pow(self.inv(a), -e)
        result, base = 1, a
        while e:
            if e & 1:
                result = result * base % self.p
            base = base * base % self.p
            e >>= 1
        return result % self.p

    def inverse_table(self) -> np.ndarray:
        """``table[b] = b^{-1}`` for ``b != 0``; ``table[0] = 0``."""
        table = np.zeros(self.p, dtype=np.int64)
        for b in range(1, self.p):
            table[b] = self.inv(b)
        return table


def encode_point(coords: Sequence[int], spec: FieldSpec) -> int:
    """Integer code of a point, coordinate 1 most significant.

    >>> encode_point((1, 2), FieldSpec(3))
    5
    """
    code = 0
    for x in coords:
        if not 0 <= x < spec.p:
            raise DomainError(f"coordinate {x} out of range for p={spec.p}")
        code = code * spec.p + x
    return code


def decode_point(code: int, n: int, spec: FieldSpec) -> tuple[int, ...]:
    """Inverse of :func:`encode_point` for points of ``F_p^n``."""
    if n < 0:
        raise DomainError(f"dimension must be non-negative, got {n}")
    if not 0 <= code < spec.p**n:
        raise DomainError(f"code {code} out of range [0, {spec.p}^{n})")
    coords = [0] * n
    for i in range(n - 1, -1, -1):
        code, coords[i] = divmod(code, spec.p)
    return tuple(coords)


def all_points(n: int, p: int) -> np.ndarray:
    """Every point of ``F_p^n`` as rows of an ``(p**n, n)`` array, in code order."""
    codes = np.arange(p**n, dtype=np.int64)
    out = np.empty((p**n, n), dtype=np.int64)
    for i in range(n - 1, -1, -1):
        codes, out[:, i] = np.divmod(codes, p)
    return out
