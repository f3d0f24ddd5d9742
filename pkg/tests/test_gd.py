import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import naive_g

from rmbias.errors import DomainError
from rmbias.gd import (
    GdTable,
    base_digits,
    check_diff_monotone,
    check_lifting_and_monotone,
    gd,
    gd_digit_expansion,
    gd_scan,
    mixed_radix_value,
    power_block,
    top_power,
)
from rmbias.monomials import count_monomials


def test_digits_and_top_power():
    assert base_digits(0, 3) == []
    assert base_digits(14, 3) == [2, 1, 1]
    assert top_power(1, 3) == (0, 1)
    assert top_power(9, 3) == (2, 9)
    assert top_power(26, 3) == (2, 9)


def test_known_values():
    # oracle-frozen with the literal recursion in tests/oracles.py
    assert gd(3, 1, 3) == 2
    assert gd(3, 2, 6) == 5
    assert gd(3, 2, 4) == 4
    assert gd(3, 1, 9) == 3
    assert gd(3, -1, 5) == 0
    assert gd(3, 0, 0) == 0
    assert gd(3, 0, 7) == 1


def test_negative_m_rejected():
    with pytest.raises(DomainError):
        gd(3, 1, -1)
    with pytest.raises(DomainError):
        GdTable(1)


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_matches_literal_recursion(q):
    t = GdTable(q)
    for d in range(-2, 10):
        for m in range(0, 200):
            assert t.gd(d, m) == naive_g(q, d, m)


@pytest.mark.parametrize("q", [2, 3, 5])
def test_array_matches_scalar(q):
    t = GdTable(q)
    g = t.array(10, 300, d_min=-3)
    for d in range(-3, 11):
        for m in range(301):
            assert g[d + 3, m] == t.gd(d, m)


@given(st.sampled_from([2, 3, 5, 7]), st.integers(-1, 15), st.integers(1, 5000))
def test_digit_expansion_and_mixed_radix(q, d, m):
    t = GdTable(q)
    assert gd_digit_expansion(t, d, m) == t.gd(d, m)
    assert mixed_radix_value(t, d, m) == t.gd(d, m)


def test_digit_expansion_examples():
    t = GdTable(3)
    assert gd_digit_expansion(t, 1, 5) == 3
    assert gd_digit_expansion(t, 2, 6) == 5
    with pytest.raises(DomainError):
        gd_digit_expansion(t, 1, 0)


@given(st.sampled_from([2, 3, 5]), st.integers(0, 10), st.integers(0, 6))
def test_powers_give_monomial_counts(q, d, r):
    assert gd(q, d, q**r) == count_monomials(q, d, r)
    assert power_block(q, d, 1, r) == count_monomials(q, d, r)


@given(st.sampled_from([2, 3, 5]), st.integers(0, 10), st.integers(0, 10), st.integers(1, 500))
def test_diff_monotone(q, d_lo, gap, a):
    assert check_diff_monotone(GdTable(q), d_lo + gap + 1, d_lo, a)


def test_diff_monotone_domain():
    with pytest.raises(DomainError):
        check_diff_monotone(GdTable(3), 1, 1, 2)


def test_lifting_small():
    rep = check_lifting_and_monotone(GdTable(3), 300, 8)
    assert rep.passed
    assert rep.comparisons > 0


def test_lifting_detects_planted_failure(monkeypatch):
    t = GdTable(3)
    real = t.array

    def broken(d_max, m_max, d_min=-1):
        g = real(d_max, m_max, d_min)
        g[2 - d_min, 10] += 100  # spike at d=2, m=10
        return g

    monkeypatch.setattr(t, "array", broken)
    rep = check_lifting_and_monotone(t, 50, 4)
    assert not rep.passed
    assert rep.counterexample["a"] in (10, 11)


def test_scan_rows():
    rows = gd_scan(3, [1, 2], [4, 6])
    assert rows == [(3, 1, 4, 3), (3, 1, 6, 3), (3, 2, 4, 4), (3, 2, 6, 5)]
