"""Bias, weight and moments of polynomials of bounded degree over F_p.

For p in {2, 3} the squared magnitude ``|sum_b c_b w^{jb}|^2`` reduces to
``N_0 - N_1`` with ``N_delta = sum_b c_b c_{b+delta}`` (indices mod p), so
bias magnitudes on those fields are exact rationals. Larger fields use floats.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .errors import DomainError, check_cells
from .extremal import ordered_map
from .gf import all_points
from .monomials import MonomialSet, enumerate_monomials, evaluation_matrix

EXACT_PRIMES = (2, 3)
FLOAT_KEY_DIGITS = 12
CHUNK_POLYS = 4096


@dataclass(frozen=True)
class Polynomial:
    monomials: MonomialSet
    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        coeffs = tuple(int(c) for c in self.coeffs)
        object.__setattr__(self, "coeffs", coeffs)
        if len(coeffs) != len(self.monomials):
            raise DomainError(f"{len(coeffs)} coefficients for {len(self.monomials)} monomials")
        p = self.monomials.p
        if any(not 0 <= c < p for c in coeffs):
            raise DomainError(f"coefficients must lie in [0, {p})")

    @classmethod
    def from_terms(cls, p: int, d: int, n: int, terms: dict[tuple[int, ...], int]) -> "Polynomial":
        ms = enumerate_monomials(p, d, n)
        coeffs = [0] * len(ms)
        for exps, c in terms.items():
            coeffs[ms.index(exps)] = c % p
        return cls(ms, tuple(coeffs))

    @property
    def p(self) -> int:
        return self.monomials.p

    @property
    def n(self) -> int:
        return self.monomials.n


@dataclass(frozen=True)
class ValueCounts:
    p: int
    n: int
    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.counts) != self.p or min(self.counts) < 0 or sum(self.counts) != self.p**self.n:
            raise DomainError(f"invalid value counts {self.counts} for p={self.p}, n={self.n}")


@dataclass(frozen=True)
class BiasValue:
    value: complex
    squared: Fraction | None
    """Exact ``|bias|^2`` when p is 2 or 3, else None."""

    @property
    def magnitude(self) -> float:
        return abs(self.value)

    @property
    def squared_float(self) -> float:
        return float(self.squared) if self.squared is not None else abs(self.value) ** 2


def eval_poly(f: Polynomial, x: Sequence[int]) -> int:
    if len(x) != f.n:
        raise DomainError(f"point has {len(x)} coordinates, polynomial has {f.n} variables")
    row = evaluation_matrix(np.array([x]), f.monomials.exponent_array(), f.p)[0]
    return int(np.dot(row, f.coeffs) % f.p)


def _all_values(coeffs: np.ndarray, evals: np.ndarray, p: int) -> np.ndarray:
    """``values[i, x] = f_i(x)`` for a stack of coefficient rows."""
    return coeffs @ evals.T % p


def _counts_of(values: np.ndarray, p: int) -> np.ndarray:
    """Row-wise value histograms, shape (rows, p)."""
    rows = values.shape[0]
    flat = values + p * np.arange(rows)[:, None]
    return np.bincount(flat.ravel(), minlength=rows * p).reshape(rows, p)


def value_counts(f: Polynomial, max_cells: int | None = None) -> ValueCounts:
    check_cells(f.p**f.n * len(f.monomials), max_cells, "polynomial evaluation")
    evals = evaluation_matrix(all_points(f.n, f.p), f.monomials.exponent_array(), f.p)
    counts = _counts_of(_all_values(np.array([f.coeffs]), evals, f.p), f.p)[0]
    return ValueCounts(f.p, f.n, tuple(int(c) for c in counts))


def _omega_powers(p: int, j: int) -> np.ndarray:
    return np.exp(2j * np.pi * j * np.arange(p) / p)


def _exact_squared(counts: np.ndarray, p: int) -> np.ndarray:
    """``N_0 - N_1`` per row (valid for p <= 3); integer array."""
    n0 = (counts * counts).sum(axis=-1)
    n1 = (counts * np.roll(counts, -1, axis=-1)).sum(axis=-1)
    return n0 - n1


def bias_j(counts: ValueCounts, j: int) -> BiasValue:
    p = counts.p
    if not 1 <= j < p:
        raise DomainError(f"j must lie in [1, {p - 1}], got {j}")
    c = np.array(counts.counts, dtype=np.int64)
    total = p**counts.n
    value = complex(np.dot(c, _omega_powers(p, j)) / total)
    squared = None
    if p in EXACT_PRIMES:
        squared = Fraction(int(_exact_squared(c, p)), total * total)
    return BiasValue(value, squared)


def is_balanced(counts: ValueCounts) -> bool:
    return len(set(counts.counts)) == 1


def weight(counts: ValueCounts) -> Fraction:
    total = counts.p**counts.n
    return Fraction(total - counts.counts[0], total)


def max_imbalance(counts: ValueCounts) -> float:
    """``max_b |Pr[f = b] - 1/p|``."""
    total = counts.p**counts.n
    return max(abs(c / total - 1 / counts.p) for c in counts.counts)


# --- spectra ---------------------------------------------------------------


SpectrumKey = Fraction | float


@dataclass
class BiasSpectrum:
    """Histogram of ``|bias_j|^2`` over a family of polynomials.

    Keys are exact fractions for p in {2, 3}; otherwise floats rounded to
    ``FLOAT_KEY_DIGITS`` decimals.
    """

    p: int
    n: int
    d: int
    j: int
    mode: str
    histogram: dict[SpectrumKey, int]

    @property
    def total(self) -> int:
        return sum(self.histogram.values())

    @property
    def exact(self) -> bool:
        return self.p in EXACT_PRIMES

    def sorted_items(self) -> list[tuple[SpectrumKey, int]]:
        return sorted(self.histogram.items())

    def tail(self, tau: float) -> Fraction:
        """Fraction of the family with ``|bias_j| > tau``."""
        if tau < 0:
            return Fraction(1)
        bound = Fraction(tau) ** 2
        if not self.exact:
            bound = round(float(bound), FLOAT_KEY_DIGITS)
        hits = sum(c for k, c in self.histogram.items() if k > bound)
        return Fraction(hits, self.total)

    def moment(self, t: int) -> Fraction | float:
        """Average of ``|bias_j|^{2t}``; exact for p in {2, 3}."""
        if self.exact:
            s = sum(Fraction(k) ** t * c for k, c in self.histogram.items())
            return s / self.total
        return sum(float(k) ** t * c for k, c in self.histogram.items()) / self.total


def _histogram(counts: np.ndarray, p: int, n: int, j: int) -> Counter:
    total = p**n
    hist: Counter = Counter()
    if p in EXACT_PRIMES:
        for v, c in zip(*np.unique(_exact_squared(counts, p), return_counts=True)):
            hist[Fraction(int(v), total * total)] += int(c)
    else:
        sq = np.abs(counts @ _omega_powers(p, j) / total) ** 2
        for v, c in zip(*np.unique(np.round(sq, FLOAT_KEY_DIGITS) + 0.0, return_counts=True)):
            hist[float(v)] += int(c)
    return hist


def _coeff_block(p: int, k: int, start: int, stop: int) -> np.ndarray:
    """Coefficient vectors with indices in ``[start, stop)``, base p, first monomial most significant."""
    idx = np.arange(start, stop, dtype=np.int64)
    out = np.empty((stop - start, k), dtype=np.int64)
    for col in range(k - 1, -1, -1):
        idx, out[:, col] = np.divmod(idx, p)
    return out


def _evals(p: int, n: int, d: int) -> tuple[MonomialSet, np.ndarray]:
    if d < 0:
        raise DomainError(f"degree must be >= 0, got {d}")
    ms = enumerate_monomials(p, d, n)
    return ms, evaluation_matrix(all_points(n, p), ms.exponent_array(), p)


def family_counts(p: int, evals: np.ndarray, threads: int = 1) -> Iterator[np.ndarray]:
    """Value histograms of every polynomial spanned by the columns of ``evals``, chunked."""
    k = evals.shape[1]
    size = p**k
    chunks = [(s, min(s + CHUNK_POLYS, size)) for s in range(0, size, CHUNK_POLYS)]

    def run(bounds: tuple[int, int]) -> np.ndarray:
        return _counts_of(_all_values(_coeff_block(p, k, *bounds), evals, p), p)

    # bounded batches keep memory flat while preserving order
    batch = max(threads, 1) * 4
    for i in range(0, len(chunks), batch):
        yield from ordered_map(run, chunks[i : i + batch], threads)


def sample_poly(p: int, n: int, d: int, seed: int | Sequence[int]) -> Polynomial:
    ms = enumerate_monomials(p, d, n)
    rng = np.random.default_rng(seed)
    return Polynomial(ms, tuple(int(c) for c in rng.integers(0, p, len(ms))))


def bias_spectrum(
    p: int, n: int, d: int, j: int,
    samples: int | None = None, seed: int = 0,
    threads: int = 1, max_cells: int | None = None,
) -> BiasSpectrum:
    """Exhaustive spectrum when ``samples`` is None, else ``samples`` seeded draws.

    Draws come in fixed chunks, each with its own generator seeded by
    ``(seed, chunk index)``, so the histogram does not depend on ``threads``.
    """
    if not 1 <= j < p:
        raise DomainError(f"j must lie in [1, {p - 1}], got {j}")
    ms, evals = _evals(p, n, d)
    k = len(ms)
    hist: Counter = Counter()
    if samples is None:
        check_cells(p**k * p**n, max_cells, "exhaustive spectrum")
        for counts in family_counts(p, evals, threads):
            hist.update(_histogram(counts, p, n, j))
        mode = "exhaustive"
    else:
        if samples < 0:
            raise DomainError("samples must be >= 0")
        check_cells(min(samples, CHUNK_POLYS) * p**n, max_cells, "sampled spectrum")
        sizes = [min(CHUNK_POLYS, samples - s) for s in range(0, samples, CHUNK_POLYS)]

        def run(item: tuple[int, int]) -> Counter:
            idx, count = item
            rng = np.random.default_rng([seed, idx])
            coeffs = rng.integers(0, p, (count, k))
            return _histogram(_counts_of(_all_values(coeffs, evals, p), p), p, n, j)

        for part in ordered_map(run, list(enumerate(sizes)), threads):
            hist.update(part)
        mode = "sampled"
    return BiasSpectrum(p, n, d, j, mode, dict(hist))


def moment_lhs(
    p: int, n: int, d: int, j: int, t: int,
    samples: int | None = None, seed: int = 0,
    threads: int = 1, max_cells: int | None = None,
) -> Fraction | float:
    """Average of ``|bias_j(f)|^{2t}`` over all (or sampled) f of degree <= d."""
    if t < 0:
        raise DomainError("t must be >= 0")
    if t == 0:
        return Fraction(1)
    spectrum = bias_spectrum(p, n, d, j, samples, seed, threads, max_cells)
    return spectrum.moment(t)


def sum_distribution(vectors: np.ndarray, p: int, t: int) -> Counter:
    """Distribution of ``v_1 + ... + v_t`` (mod p) over ordered t-tuples of rows.

    Row i of ``vectors`` holds one point's monomial evaluations; keys are the
    sums as tuples.
    """
    rows = Counter(tuple(int(v) for v in r) for r in np.asarray(vectors) % p)
    k = vectors.shape[1]
    dist: Counter = Counter({(0,) * k: 1})
    for _ in range(t):
        nxt: Counter = Counter()
        for s, ns in dist.items():
            for r, nr in rows.items():
                nxt[tuple((a + b) % p for a, b in zip(s, r))] += ns * nr
        dist = nxt
    return dist


def moment_rhs(p: int, n: int, d: int, t: int, max_cells: int | None = None) -> Fraction:
    """Probability that t points and t points have equal monomial sums for every monomial of degree <= d."""
    if t < 0:
        raise DomainError("t must be >= 0")
    ms, evals = _evals(p, n, d)
    check_cells(min(p ** len(ms), p ** (n * t)) * p**n, max_cells, "moment sum distribution")
    dist = sum_distribution(evals, p, t)
    matches = sum(c * c for c in dist.values())
    return Fraction(matches, p ** (2 * t * n))


def moment_rhs_bruteforce(p: int, n: int, d: int, t: int) -> Fraction:
    """Direct enumeration of all 2t-tuples of points; small sizes only."""
    _, evals = _evals(p, n, d)
    rows = [tuple(r) for r in evals]
    hits = 0
    for xs in itertools.product(rows, repeat=t):
        sx = tuple(sum(col) % p for col in zip(*xs)) if t else ()
        for ys in itertools.product(rows, repeat=t):
            sy = tuple(sum(col) % p for col in zip(*ys)) if t else ()
            hits += sx == sy
    return Fraction(hits, p ** (2 * t * n))


# --- the biased family -----------------------------------------------------


def lower_bias_monomials(p: int, n: int, d: int) -> tuple[int, np.ndarray]:
    """``(|L|, exponents)`` for the monomials ``x_i * q`` with i in L and q of degree <= d-1 on R.

    L is the first ``n // d`` variables and R the rest.
    """
    if not 1 <= d <= n:
        raise DomainError(f"need 1 <= d <= n, got d={d}, n={n}")
    ell = n // d
    right = enumerate_monomials(p, d - 1, n - ell).exponent_array()
    rows = []
    for i in range(ell):
        for r in right:
            e = np.zeros(n, dtype=np.int64)
            e[i] = 1
            e[ell:] = r
            rows.append(e)
    return ell, np.array(rows, dtype=np.int64).reshape(len(rows), n)


@dataclass(frozen=True)
class LowerBiasReport:
    p: int
    n: int
    d: int
    j: int
    ell: int
    family_size: int
    mean: complex
    mean_exact: Fraction | None
    """Exact real mean when all nonzero values are hit equally often overall."""
    predicted: Fraction

    @property
    def error(self) -> float:
        return abs(self.mean - float(self.predicted))


def lower_bias_family_mean(
    p: int, n: int, d: int, j: int, threads: int = 1, max_cells: int | None = None
) -> LowerBiasReport:
    if not 1 <= j < p:
        raise DomainError(f"j must lie in [1, {p - 1}], got {j}")
    ell, exps = lower_bias_monomials(p, n, d)
    k = exps.shape[0]
    check_cells(p**k * p**n, max_cells, "lower-bias family")
    evals = evaluation_matrix(all_points(n, p), exps, p)
    totals = np.zeros(p, dtype=object)
    for counts in family_counts(p, evals, threads):
        totals += counts.sum(axis=0).astype(object)
    members = p**k
    denom = members * p**n
    mean = complex(sum(int(c) * w for c, w in zip(totals, _omega_powers(p, j)))) / denom
    exact = None
    if len(set(int(c) for c in totals[1:])) == 1:
        exact = Fraction(int(totals[0]) - int(totals[1]), denom)
    return LowerBiasReport(p, n, d, j, ell, members, mean, exact, Fraction(1, p**ell))
