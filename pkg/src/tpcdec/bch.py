"""Binary narrow-sense BCH codes and their even-parity extensions.

Bit layout of a codeword of length ``n``: the ``k`` information bits come
first, followed by the ``n_base - k`` remainder bits and, for extended
codes, one overall parity bit. Position ``pos < n_base`` holds the
coefficient of ``x^(n_base - 1 - pos)`` of the code polynomial.
"""

from __future__ import annotations

import re
import dataclasses
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .gf2m import FieldTables, build_field, gf_mul

__all__ = [
    "CodeSpec",
    "LengthMismatch",
    "UnsupportedParameters",
    "bdd_decode",
    "check",
    "code_from_name",
    "encode",
    "make_code",
]


class UnsupportedParameters(ValueError):
    pass


class LengthMismatch(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class CodeSpec:
    n: int
    k: int
    t: int
    extended: bool
    m: int
    generator_poly: int
    field: FieldTables = dataclasses.field(repr=False)
    generator_matrix: np.ndarray = dataclasses.field(repr=False)
    syndrome_table: np.ndarray = dataclasses.field(repr=False)

    @property
    def n_base(self) -> int:
        return self.field.order

    @property
    def rate(self) -> float:
        return self.k / self.n

    @property
    def name(self) -> str:
        return f"{'ebch' if self.extended else 'bch'}-{self.n}-{self.k}"


def _poly_mul_gf2(a: int, b: int) -> int:
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def _poly_mod_gf2(a: int, mod: int) -> int:
    deg = mod.bit_length() - 1
    while a.bit_length() - 1 >= deg:
        a ^= mod << (a.bit_length() - 1 - deg)
    return a


def _minimal_poly(exponent: int, gf: FieldTables) -> int:
    """Minimal polynomial of alpha^exponent over GF(2), as a bitmask."""
    coset = []
    e = exponent % gf.order
    while e not in coset:
        coset.append(e)
        e = (2 * e) % gf.order
    # product of (x + alpha^e) with coefficients in GF(2^m), lowest degree first
    coeffs = [1]
    for e in coset:
        root = int(gf.exp_table[e])
        shifted = [0] + coeffs
        for i, c in enumerate(coeffs):
            shifted[i] ^= gf_mul(c, root, gf)
        coeffs = shifted
    if any(c not in (0, 1) for c in coeffs):
        raise AssertionError("minimal polynomial has non-binary coefficients")
    return sum(c << i for i, c in enumerate(coeffs))


def make_code(m: int, t: int, extended: bool = True, primitive_poly: int | None = None) -> CodeSpec:
    if t < 1:
        raise UnsupportedParameters(f"correction radius t={t} must be at least 1")
    n_base = (1 << m) - 1
    if n_base - m * t < 1:
        raise UnsupportedParameters(f"BCH(m={m}, t={t}) has no positive dimension")
    gf = build_field(m, primitive_poly)

    gen = 1
    seen: set[int] = set()
    for i in range(1, 2 * t + 1):
        mp = _minimal_poly(i, gf)
        if mp not in seen:
            seen.add(mp)
            gen = _poly_mul_gf2(gen, mp)
    r = gen.bit_length() - 1
    k = n_base - r
    if k < 1:
        raise UnsupportedParameters(f"BCH(m={m}, t={t}) has no positive dimension")
    n = n_base + 1 if extended else n_base

    gmat = np.zeros((k, n), dtype=np.uint8)
    for j in range(k):
        gmat[j, j] = 1
        rem = _poly_mod_gf2(1 << (n_base - 1 - j), gen)
        for b in range(r):
            if (rem >> (r - 1 - b)) & 1:
                gmat[j, k + b] = 1
        if extended:
            gmat[j, n_base] = gmat[j, :n_base].sum() & 1
    gmat.flags.writeable = False

    exps = n_base - 1 - np.arange(n_base)
    powers = np.arange(1, 2 * t + 1)
    syn = gf.exp_table[(np.outer(exps, powers)) % gf.order].astype(np.int64)
    syn.flags.writeable = False

    return CodeSpec(n, k, t, extended, m, gen, gf, gmat, syn)


_NAME_RE = re.compile(r"^(e?)bch-(\d+)-(\d+)$")


def code_from_name(name: str) -> CodeSpec:
    """Resolve names such as ``ebch-256-239`` or ``bch-15-11``."""
    match = _NAME_RE.match(name.strip().lower())
    if not match:
        raise UnsupportedParameters(f"cannot parse code name {name!r}; expected e.g. 'ebch-256-239'")
    extended = match.group(1) == "e"
    n, k = int(match.group(2)), int(match.group(3))
    n_base = n - 1 if extended else n
    m = n_base.bit_length()
    if (1 << m) - 1 != n_base:
        raise UnsupportedParameters(f"{name}: length {n} is not 2^m - 1 (or 2^m when extended)")
    t = 1
    while n_base - m * t >= 1:
        spec = make_code(m, t, extended)
        if spec.k == k:
            return spec
        if spec.k < k:
            break
        t += 1
    raise UnsupportedParameters(f"{name}: no narrow-sense BCH code with these parameters")


def encode(spec: CodeSpec, info) -> np.ndarray:
    info = np.asarray(info, dtype=np.uint8)
    if info.shape[-1] != spec.k:
        raise LengthMismatch(f"expected {spec.k} information bits, got {info.shape[-1]}")
    return ((info.astype(np.int64) @ spec.generator_matrix) & 1).astype(np.uint8)


def syndromes(spec: CodeSpec, word) -> np.ndarray:
    word = np.asarray(word, dtype=np.uint8)
    return _kernels.word_syndrome(word, spec.syndrome_table, spec.n_base)


def check(spec: CodeSpec, word) -> bool:
    word = np.asarray(word, dtype=np.uint8)
    if word.shape[-1] != spec.n:
        raise LengthMismatch(f"expected {spec.n} bits, got {word.shape[-1]}")
    if syndromes(spec, word).any():
        return False
    return not (spec.extended and int(word.sum()) & 1)


def bdd_decode(spec: CodeSpec, word) -> np.ndarray | None:
    """Bounded-distance decode; ``None`` means no codeword within radius t.

    Only the base positions are corrected algebraically. For extended codes
    the parity bit of the output is recomputed from the decoded base word.
    """
    word = np.asarray(word, dtype=np.uint8)
    if word.shape[-1] != spec.n:
        raise LengthMismatch(f"expected {spec.n} bits, got {word.shape[-1]}")
    gf = spec.field
    errs = np.empty(spec.t + 1, dtype=np.int64)
    nerr = _kernels.bdd_error_positions(
        syndromes(spec, word), spec.t, gf.exp_table, gf.log_table, gf.order, spec.n_base, errs
    )
    if nerr < 0:
        return None
    out = word.copy()
    out[errs[:nerr]] ^= 1
    if spec.extended:
        out[-1] = out[: spec.n_base].sum() & 1
    return out
