import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nbscl.errors import DegreeMismatch, DivisionByZero, LengthMismatch, NonPrimitivePolynomial
from nbscl.galois import DEFAULT_PRIMITIVE_POLYS, FieldElem, make_field


def test_prime_field():
    f = make_field(1, 0b11)
    assert f.q == 2 and f.alpha == 1
    assert f.mul(1, 1) == 1


def test_gf4_alpha_order_three():
    f = make_field(2, 0b111)
    orders = [e for e in range(1, 4) if f.pow(f.alpha, e) == 1]
    assert orders[0] == 3


def test_gf32_accepted():
    f = make_field(5, 0b100101)
    assert f.pow(f.alpha, 31) == 1
    assert all(f.pow(f.alpha, e) != 1 for e in range(1, 31))


def test_non_primitive_rejected():
    # X^4 + X^3 + X^2 + X + 1 is irreducible but alpha has order 5
    with pytest.raises(NonPrimitivePolynomial):
        make_field(4, 0b11111)
    with pytest.raises(NonPrimitivePolynomial):
        make_field(2, 0b101)  # (X + 1)^2


def test_degree_mismatch():
    with pytest.raises(DegreeMismatch):
        make_field(3, 0b10011)
    with pytest.raises(DegreeMismatch):
        make_field(17)


@pytest.mark.parametrize("r", range(1, 17))
def test_default_polys_primitive(r):
    f = make_field(r)
    assert f.primitive_poly == DEFAULT_PRIMITIVE_POLYS[r]
    assert len(set(f.exp[:f.order].tolist())) == f.order
    nz = np.arange(1, f.q)
    assert np.array_equal(f.exp[f.log[nz]], nz)


def test_add_examples():
    f = make_field(2, 0b111)
    for a in range(4):
        assert f.add(a, a) == 0
        assert f.add(a, 0) == a
    assert f.add(f.alpha, 1) == 3


def test_mul_examples():
    f4 = make_field(2, 0b111)
    assert f4.mul(2, 2) == 3
    for s in range(4):
        assert f4.mul(s, 1) == s
    f32 = make_field(5)
    assert f32.pow(f32.alpha, 31) == 1


def test_inverse_of_zero():
    f = make_field(3)
    with pytest.raises(DivisionByZero):
        f.inv(0)
    with pytest.raises(ZeroDivisionError):
        f.div(3, 0)


def test_binary_composition():
    f4 = make_field(2, 0b111)
    assert list(f4.binary_composition(0)) == [0, 0]
    assert list(f4.binary_composition(f4.alpha)) == [0, 1]
    f32 = make_field(5)
    for s in range(32):
        assert f32.from_bits(f32.binary_composition(s)) == s
    with pytest.raises(LengthMismatch):
        f32.from_bits([1, 0, 1])


@pytest.mark.parametrize("r", range(1, 6))
def test_axioms_exhaustive(r):
    f = make_field(r)
    q = f.q
    a = np.arange(q)
    A, B = np.meshgrid(a, a, indexing="ij")
    prod = f.mul_vec(A, B)
    assert np.array_equal(prod, prod.T)
    for x, y, z in itertools.product(range(q), repeat=3):
        assert f.mul(f.mul(x, y), z) == f.mul(x, f.mul(y, z))
        assert f.mul(x, y ^ z) == f.mul(x, y) ^ f.mul(x, z)
    for x in range(1, q):
        assert f.mul(x, f.inv(x)) == 1


@settings(max_examples=300, deadline=None)
@given(r=st.integers(1, 8), data=st.data())
def test_axioms_random(r, data):
    f = make_field(r)
    x, y, z = (data.draw(st.integers(0, f.q - 1)) for _ in range(3))
    assert f.mul(x, y) == f.mul(y, x)
    assert f.mul(f.mul(x, y), z) == f.mul(x, f.mul(y, z))
    assert f.mul(x, y ^ z) == f.mul(x, y) ^ f.mul(x, z)
    if x:
        assert f.mul(x, f.inv(x)) == 1
        assert f.div(f.mul(x, y), x) == y
    # addition acts independently on every binary component
    cx, cy = f.binary_composition(x), f.binary_composition(y)
    assert np.array_equal(f.binary_composition(x ^ y), cx ^ cy)


@pytest.mark.parametrize("r", [2, 5, 8, 12])
def test_alpha_order(r):
    f = make_field(r)
    assert f.alpha == 2 or r == 1
    assert f.pow(f.alpha, f.order) == 1
    assert f.log[f.alpha] == 1


def test_field_elem_operators():
    f = make_field(2, 0b111)
    a = FieldElem(f, 2)
    one = FieldElem(f, 1)
    assert int(a * a) == 3
    assert int(a + one) == 3
    assert int(a * a.inv()) == 1
    assert int(a ** 3) == 1
    assert a[0] == 0 and a[1] == 1
    with pytest.raises(ValueError):
        FieldElem(f, 4)
    with pytest.raises(ValueError):
        a + FieldElem(make_field(3), 1)


def test_vector_ops_match_scalar():
    f = make_field(4)
    rng = np.random.default_rng(0)
    A = rng.integers(0, 16, (3, 5))
    B = rng.integers(0, 16, (5, 4))
    C = f.matmul(A, B)
    for i in range(3):
        for j in range(4):
            acc = 0
            for k in range(5):
                acc ^= f.mul(int(A[i, k]), int(B[k, j]))
            assert C[i, j] == acc
    assert np.array_equal(f.dot(A[0], B), C[0])
