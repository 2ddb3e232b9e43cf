import numpy as np
import pytest
from hypothesis import given, strategies as st

from tpcdec.gf2m import (
    DEFAULT_PRIMITIVE_POLYS,
    DivisionByZero,
    NonPrimitivePolynomial,
    build_field,
    gf_inv,
    gf_mul,
)


def slow_mul(a, b, poly, m):
    """Shift-and-add multiply with reduction, independent of the tables."""
    out = 0
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a <<= 1
        if a >> m:
            a ^= poly
    return out


def test_gf16_tables():
    gf = build_field(4)
    assert gf.primitive_poly == 0b10011
    assert list(gf.exp_table[:5]) == [1, 2, 4, 8, 3]
    assert gf.order == 15 and gf.size == 16


@pytest.mark.parametrize("m", range(3, 13))
def test_default_polys_are_primitive(m):
    gf = build_field(m)
    seen = set(int(v) for v in gf.exp_table[: gf.order])
    assert seen == set(range(1, 1 << m))
    for x in range(1, 1 << m):
        assert gf.exp_table[gf.log_table[x]] == x


def test_gf256_default_poly():
    assert DEFAULT_PRIMITIVE_POLYS[8] == 0b100011101
    assert build_field(8).order == 255


@pytest.mark.parametrize("m", [1, 2, 13, 20])
def test_degree_out_of_range(m):
    with pytest.raises(ValueError):
        build_field(m)


@pytest.mark.parametrize("poly", [0b11111, 0b10001, 0b10101])
def test_non_primitive_rejected(poly):
    # x^4+x^3+x^2+x+1 is irreducible of order 5; the others are reducible
    with pytest.raises(NonPrimitivePolynomial):
        build_field(4, poly)


def test_mul_examples():
    gf = build_field(4)
    a7, a9 = int(gf.exp_table[7]), int(gf.exp_table[9])
    assert gf_mul(a7, a9, gf) == int(gf.exp_table[1])
    for x in range(16):
        assert gf_mul(0, x, gf) == 0
        assert gf_mul(1, x, gf) == x


def test_inverse_examples():
    gf = build_field(4)
    assert gf_inv(2, gf) == int(gf.exp_table[14])
    with pytest.raises(DivisionByZero):
        gf_inv(0, gf)
    with pytest.raises(ZeroDivisionError):
        gf_inv(0, gf)


@pytest.mark.parametrize("m", [3, 4, 5, 6, 8])
def test_inverse_exhaustive(m):
    gf = build_field(m)
    for a in range(1, 1 << m):
        assert gf_mul(a, gf_inv(a, gf), gf) == 1


@pytest.mark.parametrize("m", [3, 4, 5, 6, 7, 8])
def test_tables_match_slow_mul_exhaustively(m):
    gf = build_field(m)
    size = 1 << m
    a = np.arange(size)
    for x in range(size):
        row = [gf_mul(x, int(y), gf) for y in a]
        assert row == [slow_mul(x, int(y), gf.primitive_poly, m) for y in a]


@pytest.mark.parametrize("m", [3, 4, 5, 6, 7, 8])
def test_frobenius(m):
    gf = build_field(m)
    for a in range(1 << m):
        for b in (1, 3, (1 << m) - 1):
            lhs = gf_mul(a ^ b, a ^ b, gf)
            assert lhs == gf_mul(a, a, gf) ^ gf_mul(b, b, gf)


@given(st.integers(3, 10), st.data())
def test_field_axioms(m, data):
    gf = build_field(m)
    elem = st.integers(0, (1 << m) - 1)
    a, b, c = data.draw(elem), data.draw(elem), data.draw(elem)
    assert gf_mul(a, b, gf) == gf_mul(b, a, gf)
    assert gf_mul(a, gf_mul(b, c, gf), gf) == gf_mul(gf_mul(a, b, gf), c, gf)
    assert gf_mul(a, b ^ c, gf) == gf_mul(a, b, gf) ^ gf_mul(a, c, gf)
    if a and b:
        la, lb = gf.log_table[a], gf.log_table[b]
        assert gf.log_table[gf_mul(a, b, gf)] == (la + lb) % gf.order
