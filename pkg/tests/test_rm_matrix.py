import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import naive_matrix, naive_rank

from rmbias.errors import DomainError, ResourceLimitError
from rmbias.gf import FieldSpec
from rmbias.monomials import count_monomials
from rmbias.rm_matrix import (
    EchelonBasis,
    build_matrix,
    full_matrix,
    lex_minimal_set,
    prefix_ranks,
    rank_mod_p,
    rank_of_array,
    rank_of_subset,
)


def test_small_matrix_contents():
    m = build_matrix(FieldSpec(3), 2, 1, [0, 5, 8])
    assert m.columns.names() == ["1", "x2", "x1"]
    assert m.entries.tolist() == [[1, 0, 0], [1, 2, 1], [1, 2, 2]]


def test_rows_sorted_and_deduplicated():
    m = build_matrix(FieldSpec(3), 2, 1, [5, 0, 5])
    assert m.rows == (0, 5)


def test_row_range_checked():
    with pytest.raises(DomainError):
        build_matrix(FieldSpec(3), 2, 1, [9])
    with pytest.raises(DomainError):
        build_matrix(FieldSpec(3), 2, -1, [0])


def test_cell_cap():
    with pytest.raises(ResourceLimitError):
        full_matrix(FieldSpec(3), 4, 8, max_cells=100)


def test_csv_dump():
    m = build_matrix(FieldSpec(3), 2, 2, lex_minimal_set(2, FieldSpec(3), 2))
    text = m.to_csv()
    assert text.splitlines() == ["1,x2,x1,x2^2,x1*x2,x1^2", "1,0,0,0,0,0", "1,1,0,1,0,0"]
    buf = io.StringIO()
    m.to_csv(buf)
    assert buf.getvalue() == text


def test_lex_minimal_set_range():
    assert lex_minimal_set(4, FieldSpec(3), 2) == (0, 1, 2, 3)
    with pytest.raises(DomainError):
        lex_minimal_set(10, FieldSpec(3), 2)


@pytest.mark.parametrize("p,n", [(2, 3), (3, 2), (3, 3), (5, 2)])
def test_full_rank_equals_monomial_count(p, n):
    for d in range(0, n * (p - 1) + 1):
        assert rank_mod_p(full_matrix(FieldSpec(p), n, d)) == count_monomials(p, d, n)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([2, 3, 5, 7]), st.integers(1, 8), st.integers(1, 8), st.data())
def test_rank_against_oracle(p, rows, cols, data):
    a = np.array(data.draw(st.lists(st.lists(st.integers(0, p - 1), min_size=cols, max_size=cols),
                                    min_size=rows, max_size=rows)))
    expected = naive_rank(a.tolist(), p)
    assert rank_of_array(a, p) == expected
    assert rank_of_array(a, p, "rows") == expected
    assert rank_of_array(a, p, "columns") == expected
    assert prefix_ranks(a, p)[-1] == expected


def test_rank_of_subset_against_oracle():
    rng = np.random.default_rng(1)
    for _ in range(50):
        rows = sorted(rng.choice(27, size=int(rng.integers(1, 27)), replace=False).tolist())
        d = int(rng.integers(0, 5))
        assert rank_of_subset(FieldSpec(3), 3, d, rows) == naive_rank(naive_matrix(3, d, 3, rows), 3)


def test_empty_rank():
    assert rank_of_array(np.zeros((0, 3), dtype=np.int64), 3) == 0


def test_echelon_push_pop():
    b = EchelonBasis(3, 5)
    assert b.push([1, 2, 3])
    assert not b.push([2, 4, 1])
    assert b.push([0, 1, 0])
    assert b.rank == 2
    b.pop()
    assert b.rank == 1
    b.pop()
    assert b.rank == 1
    b.pop()
    assert b.rank == 0
    assert b.push([0, 0, 4])
