import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rmbias.errors import DomainError
from rmbias.gf import FieldSpec, all_points, decode_point, encode_point, is_prime

PRIMES = [2, 3, 5, 7, 11, 13, 251]


def test_is_prime_small():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


@pytest.mark.parametrize("bad", [0, 1, 4, 9, 2**16 + 1])
def test_field_rejects_bad_modulus(bad):
    with pytest.raises(DomainError):
        FieldSpec(bad)


def test_composite_allowed_without_primality():
    assert FieldSpec(4, require_prime=False).mul(2, 3) == 2


def test_basic_ops():
    f = FieldSpec(7)
    assert f.add(5, 4) == 2
    assert f.sub(2, 5) == 4
    assert f.neg(0) == 0
    assert f.mul(3, 5) == 1
    assert f.inv(3) == 5
    assert f.pow(0, 0) == 1
    assert f.pow(3, 6) == 1


def test_inverse_of_zero():
    with pytest.raises(DomainError):
        FieldSpec(5).inv(0)


def test_out_of_range_residue():
    with pytest.raises(DomainError):
        FieldSpec(5).add(5, 1)


@given(st.sampled_from(PRIMES), st.data())
def test_inverse_property(p, data):
    f = FieldSpec(p)
    b = data.draw(st.integers(1, p - 1))
    assert f.mul(b, f.inv(b)) == 1


@given(st.sampled_from(PRIMES), st.data())
def test_fermat(p, data):
    f = FieldSpec(p)
    a = data.draw(st.integers(0, p - 1))
    assert f.pow(a, p) == a


def test_inverse_table():
    t = FieldSpec(5).inverse_table()
    assert t.tolist() == [0, 1, 3, 2, 4]


def test_encoding_examples():
    f = FieldSpec(3)
    assert encode_point((1, 2), f) == 5
    assert decode_point(5, 2, f) == (1, 2)
    assert encode_point((), f) == 0


def test_encoding_errors():
    f = FieldSpec(3)
    with pytest.raises(DomainError):
        encode_point((3,), f)
    with pytest.raises(DomainError):
        decode_point(9, 2, f)


@given(st.sampled_from([2, 3, 5, 7]), st.integers(0, 5), st.data())
def test_encode_decode_roundtrip(p, n, data):
    f = FieldSpec(p)
    code = data.draw(st.integers(0, p**n - 1))
    assert encode_point(decode_point(code, n, f), f) == code


def test_all_points_order():
    pts = all_points(2, 3)
    assert pts.shape == (9, 2)
    assert pts[:4].tolist() == [[0, 0], [0, 1], [0, 2], [1, 0]]
    f = FieldSpec(3)
    assert all(encode_point(tuple(r), f) == i for i, r in enumerate(pts.tolist()))
    assert np.array_equal(all_points(0, 3), np.zeros((1, 0), dtype=np.int64))
