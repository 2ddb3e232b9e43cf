import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tpcdec.bch import (
    LengthMismatch,
    UnsupportedParameters,
    bdd_decode,
    check,
    code_from_name,
    encode,
    make_code,
    syndromes,
)


def as_poly(bits):
    """Position i carries x^(len-1-i)."""
    out = 0
    for b in bits:
        out = (out << 1) | int(b)
    return out


def pmod(a, g):
    dg = g.bit_length() - 1
    while a and a.bit_length() - 1 >= dg:
        a ^= g << (a.bit_length() - 1 - dg)
    return a


@pytest.mark.parametrize(
    "m,t,ext,n,k",
    [(4, 1, False, 15, 11), (4, 2, False, 15, 7), (5, 1, True, 32, 26), (4, 1, True, 16, 11),
     (8, 2, True, 256, 239), (8, 2, False, 255, 239), (6, 2, True, 64, 51)],
)
def test_parameters(m, t, ext, n, k):
    spec = make_code(m, t, ext)
    assert (spec.n, spec.k, spec.t) == (n, k, t)
    assert spec.generator_poly.bit_length() - 1 == spec.n_base - spec.k


def test_generator_examples():
    assert make_code(4, 1, False).generator_poly == 0b10011
    assert make_code(8, 2).generator_poly == 0b10110111101100011


@pytest.mark.parametrize("m,t", [(4, 1), (4, 2), (4, 3), (5, 2), (8, 2)])
def test_generator_divides_x_n_minus_1(m, t):
    spec = make_code(m, t, False)
    assert pmod((1 << spec.n_base) | 1, spec.generator_poly) == 0


def test_unsupported():
    with pytest.raises(UnsupportedParameters):
        make_code(3, 3)
    with pytest.raises(UnsupportedParameters):
        make_code(4, 0)
    with pytest.raises(UnsupportedParameters):
        code_from_name("ebch-100-90")
    with pytest.raises(UnsupportedParameters):
        code_from_name("ldpc-256-239")


def test_code_from_name():
    spec = code_from_name("ebch-256-239")
    assert (spec.n, spec.k, spec.t, spec.extended) == (256, 239, 2, True)
    assert spec.name == "ebch-256-239"
    assert code_from_name("bch-15-11").name == "bch-15-11"


def test_encode_zero_and_systematic(hamming15, rng):
    assert not encode(hamming15, np.zeros(11, np.uint8)).any()
    for _ in range(20):
        u = rng.integers(0, 2, 11, dtype=np.uint8)
        c = encode(hamming15, u)
        assert np.array_equal(c[:11], u)
        assert pmod(as_poly(c), hamming15.generator_poly) == 0


def test_encode_unit_vector_matches_division(hamming15):
    u = np.zeros(11, np.uint8)
    u[0] = 1
    c = encode(hamming15, u)
    rem = pmod(1 << 14, hamming15.generator_poly)
    assert as_poly(c) == (1 << 14) | rem


def test_encode_length_mismatch(ebch32):
    with pytest.raises(LengthMismatch):
        encode(ebch32, np.zeros(25, np.uint8))
    with pytest.raises(LengthMismatch):
        check(ebch32, np.zeros(31, np.uint8))


@pytest.mark.parametrize("name", ["ebch-32-26", "ebch-64-51", "ebch-256-239"])
def test_extended_words_even_weight(name, rng):
    spec = code_from_name(name)
    for _ in range(100):
        c = encode(spec, rng.integers(0, 2, spec.k, dtype=np.uint8))
        assert c.sum() % 2 == 0
        assert check(spec, c)


def test_check_examples(ebch32, rng):
    c = encode(ebch32, rng.integers(0, 2, 26, dtype=np.uint8))
    assert check(ebch32, c)
    assert check(ebch32, np.zeros(32, np.uint8))
    for i in range(32):
        bad = c.copy()
        bad[i] ^= 1
        assert not check(ebch32, bad)


def test_syndromes_zero_on_codewords(bch255, rng):
    for _ in range(20):
        c = encode(bch255, rng.integers(0, 2, bch255.k, dtype=np.uint8))
        assert not syndromes(bch255, c).any()


def test_bdd_exhaustive_hamming15(hamming15):
    """Every word of length 15 decodes to its unique codeword at distance <= 1."""
    g = hamming15.generator_poly
    words = ((np.arange(1 << 15)[:, None] >> np.arange(14, -1, -1)) & 1).astype(np.uint8)
    for w in words[::7]:
        out = bdd_decode(hamming15, w)
        assert out is not None  # perfect code
        assert pmod(as_poly(out), g) == 0
        assert np.count_nonzero(out != w) <= 1


def test_bdd_bch31_against_coset_leaders(rng):
    spec = make_code(5, 2, False)
    g = spec.generator_poly
    leaders = {}
    for w in range(3):
        for pos in itertools.combinations(range(31), w):
            e = np.zeros(31, np.uint8)
            e[list(pos)] = 1
            leaders.setdefault(pmod(as_poly(e), g), e)
    for _ in range(3000):
        word = rng.integers(0, 2, 31, dtype=np.uint8)
        out = bdd_decode(spec, word)
        e = leaders.get(pmod(as_poly(word), g))
        if e is None:
            assert out is None
        else:
            assert np.array_equal(out, word ^ e)


def test_bdd_corrects_up_to_t(bch255, ebch256, rng):
    for spec in (bch255, ebch256):
        for _ in range(300):
            c = encode(spec, rng.integers(0, 2, spec.k, dtype=np.uint8))
            w = rng.integers(0, spec.t + 1)
            pos = rng.choice(spec.n_base, size=w, replace=False)
            r = c.copy()
            r[pos] ^= 1
            assert np.array_equal(bdd_decode(spec, r), c)


def test_bdd_three_errors_never_miscorrect_silently(bch255, rng):
    for _ in range(300):
        c = encode(bch255, rng.integers(0, 2, bch255.k, dtype=np.uint8))
        r = c.copy()
        r[rng.choice(255, 3, replace=False)] ^= 1
        out = bdd_decode(bch255, r)
        if out is not None:
            assert check(bch255, out)
            assert np.count_nonzero(out != r) <= 2


def test_bdd_extended_parity_recomputed(ebch32, rng):
    c = encode(ebch32, rng.integers(0, 2, 26, dtype=np.uint8))
    r = c.copy()
    r[-1] ^= 1
    assert np.array_equal(bdd_decode(ebch32, r), c)
    r[3] ^= 1
    assert np.array_equal(bdd_decode(ebch32, r), c)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_linearity_and_idempotence(data):
    spec = make_code(5, 2)
    bits = st.lists(st.integers(0, 1), min_size=spec.k, max_size=spec.k)
    u = np.array(data.draw(bits), np.uint8)
    v = np.array(data.draw(bits), np.uint8)
    cu, cv = encode(spec, u), encode(spec, v)
    assert np.array_equal(encode(spec, u ^ v), cu ^ cv)
    assert np.array_equal(bdd_decode(spec, cu), cu)
    assert check(spec, cu ^ cv)
