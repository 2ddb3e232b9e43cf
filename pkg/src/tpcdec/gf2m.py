"""Arithmetic over GF(2^m) in polynomial basis, backed by exp/log tables."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DEFAULT_PRIMITIVE_POLYS",
    "DivisionByZero",
    "FieldTables",
    "NonPrimitivePolynomial",
    "build_field",
    "gf_inv",
    "gf_mul",
    "poly_mulmod",
]

# Bit j of each integer is the coefficient of x^j.
DEFAULT_PRIMITIVE_POLYS = {
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10001001,
    8: 0b100011101,  # x^8 + x^4 + x^3 + x^2 + 1
    9: 0b1000010001,
    10: 0b10000001001,
    11: 0b100000000101,
    12: 0b1000001010011,
}

MIN_DEGREE = 3
MAX_DEGREE = 12


class NonPrimitivePolynomial(ValueError):
    pass


class DivisionByZero(ZeroDivisionError):
    pass


@dataclass(frozen=True, eq=False)
class FieldTables:
    """Exp/log tables for GF(2^m).

    ``exp_table`` has length ``2 * (2^m - 1)`` so that ``exp_table[a + b]``
    can be indexed without a modulo for ``a, b < 2^m - 1``; only the first
    ``2^m - 1`` entries are distinct. ``log_table[0]`` is meaningless and
    must be guarded by an explicit zero check.
    """

    m: int
    primitive_poly: int
    exp_table: np.ndarray
    log_table: np.ndarray

    @property
    def order(self) -> int:
        """Size of the multiplicative group, ``2^m - 1``."""
        return (1 << self.m) - 1

    @property
    def size(self) -> int:
        return 1 << self.m


def poly_mulmod(a: int, b: int, modulus: int) -> int:
    """Carry-less product of ``a`` and ``b`` reduced modulo ``modulus``."""
    deg = modulus.bit_length() - 1
    result = 0
    while b:
        if b & 1:
            result ^= a
        b >>= 1
        a <<= 1
        if (a >> deg) & 1:
            a ^= modulus
    return result


def build_field(m: int, primitive_poly: int | None = None) -> FieldTables:
    if not MIN_DEGREE <= m <= MAX_DEGREE:
        raise ValueError(f"field degree m={m} outside supported range [{MIN_DEGREE}, {MAX_DEGREE}]")
    if primitive_poly is None:
        primitive_poly = DEFAULT_PRIMITIVE_POLYS[m]
    if primitive_poly.bit_length() - 1 != m:
        raise NonPrimitivePolynomial(f"polynomial {primitive_poly:#b} does not have degree {m}")

    order = (1 << m) - 1
    exp_table = np.zeros(2 * order, dtype=np.int64)
    log_table = np.zeros(order + 1, dtype=np.int64)
    x = 1
    for i in range(order):
        if i > 0 and x == 1:
            raise NonPrimitivePolynomial(
                f"polynomial {primitive_poly:#b}: alpha has order {i}, expected {order}"
            )
        exp_table[i] = x
        log_table[x] = i
        x <<= 1
        if x >> m:
            x ^= primitive_poly
    if x != 1:
        # Reducible polynomials can drive alpha to zero or into a cycle that skips 1.
        raise NonPrimitivePolynomial(f"polynomial {primitive_poly:#b} is not primitive")
    exp_table[order:] = exp_table[:order]
    exp_table.flags.writeable = False
    log_table.flags.writeable = False
    return FieldTables(m, primitive_poly, exp_table, log_table)


def gf_mul(a: int, b: int, tables: FieldTables) -> int:
    if a == 0 or b == 0:
        return 0
    return int(tables.exp_table[tables.log_table[a] + tables.log_table[b]])


def gf_inv(a: int, tables: FieldTables) -> int:
    if a == 0:
        raise DivisionByZero("zero has no multiplicative inverse")
    return int(tables.exp_table[(tables.order - tables.log_table[a]) % tables.order])
