import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rmbias.errors import DomainError
from rmbias.gd import GdTable
from rmbias.subadd import (
    CASE_FIXED,
    CASE_REPACK,
    CASE_SINGULARIZE,
    CASE_TRANSPOSE,
    GradedVector,
    check_subadditivity,
    check_transforms,
    classify,
    dispatch_case,
    enumerate_v,
    highest_power,
    improve_path,
    improve_step,
    in_v_star,
    order_less,
    repack,
    sample_v,
    singularize,
    trace_lines,
    transpose,
    value_vd,
    vectors_of_norm,
)

G3 = GdTable(3)


def V(*xs):
    return GradedVector(tuple(xs))


def test_vector_validation():
    with pytest.raises(DomainError):
        V(1, 2, 0)
    with pytest.raises(DomainError):
        V(3, -1)
    with pytest.raises(DomainError):
        V(5)


def test_order():
    assert order_less(V(6, 0, 0), V(4, 2, 0))
    assert V(2, 0, 0) < V(1, 1, 1)
    assert not order_less(V(4, 2, 0), V(4, 2, 0))
    assert sorted([V(1, 1, 0), V(2, 0, 0), V(1, 0, 0)]) == [V(1, 0, 0), V(2, 0, 0), V(1, 1, 0)]


def test_value_vd_examples():
    assert value_vd(V(2, 1, 0), 1, G3) == 3
    assert value_vd(V(4, 2, 0), 2, G3) == 6
    assert value_vd(V(6, 0, 0), 2, G3) == 5


def test_highest_power():
    assert highest_power(1, 3) == 0
    assert highest_power(3, 3) == 0
    assert highest_power(4, 3) == 1
    assert highest_power(9, 3) == 1
    assert highest_power(10, 3) == 2


@pytest.mark.parametrize("vec,expected", [
    ((0, 0, 0), True),
    ((7, 0, 0), True),
    ((3, 3, 2), True),
    ((9, 9, 9), True),
    ((1, 1, 0), True),
    ((4, 4, 0), False),
    ((3, 2, 1), False),
    ((3, 3, 1, 1), False),
])
def test_v_star(vec, expected):
    assert in_v_star(vec) == expected


def test_classify_structure():
    st_ = classify((7, 4, 3))
    assert st_.hp == 1 and st_.unit == 3
    assert st_.k == (2, 1, 1) and st_.c == (1, 1, 0)
    assert st_.intervals == ((0, 0), (1, 2))
    assert st_.heights == (2, 1)
    assert st_.widths == (3, 2, 1)
    assert st_.order_width(0, 2) == 1
    with pytest.raises(DomainError):
        classify((0, 0, 0))


def test_singularize_example():
    # (4,2,2): interval k=0 on [1,2] pools 2+2 = 1*3 + 1
    out = singularize(V(4, 2, 2))
    assert out == V(4, 3, 1)
    assert classify(out.entries).singularized
    with pytest.raises(DomainError):
        singularize(V(4, 3, 1))


def test_transpose_example():
    assert dispatch_case(V(4, 4, 4)) == CASE_SINGULARIZE
    assert singularize(V(4, 4, 4)) == V(6, 3, 3)
    assert dispatch_case(V(6, 3, 3)) == CASE_TRANSPOSE
    out = transpose(V(6, 3, 3))
    assert out == V(9, 3, 0)
    assert value_vd(out, 2, G3) == value_vd(V(6, 3, 3), 2, G3)
    with pytest.raises(DomainError):
        transpose(V(4, 2, 2))


def test_repack_example():
    assert dispatch_case(V(4, 2, 0)) == CASE_REPACK
    out = repack(V(4, 2, 0))
    assert out == V(6, 0, 0)
    assert out < V(4, 2, 0)
    assert value_vd(out, 2, G3) == 5 <= value_vd(V(4, 2, 0), 2, G3)
    with pytest.raises(DomainError):
        repack(V(3, 0, 0))


def test_fixed_point():
    assert improve_step(V(3, 3, 2)) is None
    assert dispatch_case(V(0, 0, 0)) == CASE_FIXED


def test_improve_path_ends_in_v_star():
    path = improve_path(V(5, 4, 4))
    assert path[-1].after is None
    assert in_v_star(path[-1].before.entries)
    assert all(r.after < r.before for r in path[:-1])


def test_vectors_of_norm():
    assert list(vectors_of_norm(3, 3)) == [(3, 0, 0), (2, 1, 0), (1, 1, 1)]
    assert list(vectors_of_norm(0, 2)) == [(0, 0)]
    assert len(list(vectors_of_norm(5, 2))) == 3


def test_enumeration_is_complete_and_distinct():
    import itertools

    got = list(enumerate_v(3, 9))
    brute = [v for v in itertools.product(range(10), repeat=3)
             if sum(v) <= 9 and v[0] >= v[1] >= v[2]]
    assert sorted(got) == sorted(brute)
    assert len(set(got)) == len(got)


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 6), st.data())
def test_step_invariants_random(q, data):
    entries = sorted(data.draw(st.lists(st.integers(0, 80), min_size=q, max_size=q)), reverse=True)
    a = GradedVector(tuple(entries))
    table = GdTable(q)
    nxt = improve_step(a)
    if nxt is None:
        assert in_v_star(a.entries)
        for d in range(-1, 10):
            assert value_vd(a, d, table) == table.gd(d, a.norm)
        return
    assert nxt.norm == a.norm
    assert nxt < a
    for d in range(-1, 10):
        if dispatch_case(a) == CASE_TRANSPOSE:
            assert value_vd(nxt, d, table) == value_vd(a, d, table)
        else:
            assert value_vd(nxt, d, table) <= value_vd(a, d, table)


@pytest.mark.parametrize("q", [2, 3, 4])
def test_transforms_exhaustive_small(q):
    rep = check_transforms(q, enumerate_v(q, 20), range(-1, 9))
    assert rep.passed, rep.violations[:3]
    assert rep.max_path_length >= 1


def test_dispatch_is_total():
    for v in enumerate_v(4, 16):
        a = GradedVector(v)
        case = dispatch_case(a)
        if case != CASE_FIXED:
            st_ = classify(v)
            flags = [not st_.singularized, st_.singularized and not st_.narrow,
                     st_.singularized and st_.narrow]
            assert sum(flags) == 1


def test_subadditivity_small():
    rep = check_subadditivity(3, 15, range(-1, 6), pair_cap=60)
    assert rep.passed
    assert rep.pairs == 61 * 62 // 2


def test_subadditivity_detects_planted_failure():
    t = GdTable(3)
    real = t.array

    def broken(d_max, m_max, d_min=-1):
        g = real(d_max, m_max, d_min)
        g[:, 12] += 50
        return g

    t.array = broken
    rep = check_subadditivity(3, 12, range(0, 3), table=t, pair_cap=12)
    assert not rep.passed
    kinds = {v["kind"] for v in rep.violations}
    assert "subadditivity" in kinds


def test_sample_v():
    a = sample_v(5, 30, 100, seed=3)
    assert a == sample_v(5, 30, 100, seed=3)
    assert len(a) == len(set(a)) == 100
    assert sample_v(2, 3, 1000, seed=0) == list(enumerate_v(2, 3))


def test_trace_lines():
    recs = []
    check_transforms(3, [(4, 2, 0)], range(0, 3), trace=recs.append)
    lines = list(trace_lines(recs))
    first = json.loads(lines[0])
    assert first["vector"] == [4, 2, 0] and first["case"] == CASE_REPACK
    assert first["result"] == [6, 0, 0]
    assert json.loads(lines[-1])["case"] == CASE_FIXED


def test_classify_example_420():
    s = classify((4, 2, 0))
    assert (s.hp, s.k, s.c) == (1, (1, 0, 0), (1, 2, 0))
    assert s.intervals == ((0, 0), (1, 2)) and s.heights == (1, 0)
    assert s.singularized and s.narrow and not s.in_v_star


def test_v_star_value_equality_example():
    assert classify((3, 2, 0)).in_v_star
    assert value_vd(V(3, 2, 0), 1, G3) == 3 == G3.gd(1, 5)
    assert classify((1, 1, 1)).in_v_star and classify((1, 1, 1)).hp == 0


def test_singularize_single_interval():
    # one interval [0,1] of height 1: pooled remainder 2 = 0*3 + 2 lands on entry 0
    assert singularize(V(4, 4, 0)) == V(5, 3, 0)


def test_transpose_rejects_unsingularized():
    # (4,4,4) carries remainders (1,1,1) inside one interval, so it must be singularized first
    with pytest.raises(DomainError):
        transpose(V(4, 4, 4))
