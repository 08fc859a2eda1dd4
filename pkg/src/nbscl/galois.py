"""Arithmetic over GF(2^r) with log/antilog tables.

Elements are plain integers in ``[0, 2^r)``; bit ``j`` of the integer is the
coefficient of ``alpha^j`` in the polynomial basis, so the binary composition
of an element is a bit test.  :class:`FieldElem` wraps an integer together with
its field for operator-style use; the hot paths work on raw ints and numpy
arrays.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import DegreeMismatch, DivisionByZero, LengthMismatch, NonPrimitivePolynomial

MAX_DEGREE = 16

# Low-weight primitive polynomials, bit i = coefficient of X^i.
DEFAULT_PRIMITIVE_POLYS = {
    1: 0b11,                # X + 1
    2: 0b111,               # X^2 + X + 1
    3: 0b1011,              # X^3 + X + 1
    4: 0b10011,             # X^4 + X + 1
    5: 0b100101,            # X^5 + X^2 + 1
    6: 0b1000011,           # X^6 + X + 1
    7: 0b10001001,          # X^7 + X^3 + 1
    8: 0x11D,               # X^8 + X^4 + X^3 + X^2 + 1
    9: 0x211,               # X^9 + X^4 + 1
    10: 0x409,              # X^10 + X^3 + 1
    11: 0x805,              # X^11 + X^2 + 1
    12: 0x1053,             # X^12 + X^6 + X^4 + X + 1
    13: 0x201B,             # X^13 + X^4 + X^3 + X + 1
    14: 0x4443,             # X^14 + X^10 + X^6 + X + 1
    15: 0x8003,             # X^15 + X + 1
    16: 0x1100B,            # X^16 + X^12 + X^3 + X + 1
}


def poly_to_str(poly: int) -> str:
    terms = []
    for d in range(poly.bit_length() - 1, -1, -1):
        if poly >> d & 1:
            terms.append("1" if d == 0 else "X" if d == 1 else f"X^{d}")
    return " + ".join(terms) or "0"


@dataclass(frozen=True, eq=False)
class FieldSpec:
    """GF(2^r) defined by a primitive polynomial.

    ``exp`` has length ``2 * (q - 1)`` so that ``exp[log[a] + log[b]]`` never
    needs a modulo.  ``log[0]`` is set to 0 and must not be relied upon.
    """

    r: int
    primitive_poly: int
    exp: np.ndarray = dc_field(repr=False)
    log: np.ndarray = dc_field(repr=False)

    @property
    def q(self) -> int:
        return 1 << self.r

    @property
    def order(self) -> int:
        """Size of the multiplicative group, ``2^r - 1``."""
        return (1 << self.r) - 1

    @property
    def alpha(self) -> int:
        return int(self.exp[1])

    def __eq__(self, other):
        if not isinstance(other, FieldSpec):
            return NotImplemented
        return self.r == other.r and self.primitive_poly == other.primitive_poly

    def __hash__(self):
        return hash((self.r, self.primitive_poly))

    def describe(self) -> str:
        return f"GF(2^{self.r}) p(X) = {poly_to_str(self.primitive_poly)} (0x{self.primitive_poly:x})"

    # scalar arithmetic -------------------------------------------------
    @staticmethod
    def add(a: int, b: int) -> int:
        return a ^ b

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self.exp[self.log[a] + self.log[b]])

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("inverse of zero in " + self.describe())
        return int(self.exp[(self.order - self.log[a]) % self.order])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise DivisionByZero("negative power of zero")
            return 1 if e == 0 else 0
        return int(self.exp[(int(self.log[a]) * e) % self.order])

    def alpha_pow(self, e: int) -> int:
        return int(self.exp[e % self.order])

    # vectorised arithmetic --------------------------------------------
    def mul_vec(self, a, b) -> np.ndarray:
        """Elementwise product of broadcastable integer arrays."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        out = self.exp[self.log[a] + self.log[b]]
        return np.where((a == 0) | (b == 0), 0, out)

    def dot(self, v, M) -> np.ndarray:
        """Row vector times matrix, ``v @ M`` over the field."""
        v = np.asarray(v, dtype=np.int64)
        M = np.asarray(M, dtype=np.int64)
        if M.ndim != 2 or v.shape[0] != M.shape[0]:
            raise LengthMismatch(f"vector of length {v.shape[0]} against {M.shape} matrix")
        prods = self.mul_vec(v[:, None], M)
        return np.bitwise_xor.reduce(prods, axis=0) if len(v) else np.zeros(M.shape[1], np.int64)

    def matmul(self, A, B) -> np.ndarray:
        A = np.asarray(A, dtype=np.int64)
        B = np.asarray(B, dtype=np.int64)
        if A.shape[1] != B.shape[0]:
            raise LengthMismatch(f"cannot multiply {A.shape} by {B.shape}")
        out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
        for t in range(A.shape[1]):
            out ^= self.mul_vec(A[:, t:t + 1], B[t:t + 1, :])
        return out

    # binary composition ------------------------------------------------
    def binary_composition(self, sigma: int) -> np.ndarray:
        return np.array([(int(sigma) >> j) & 1 for j in range(self.r)], dtype=np.uint8)

    def from_bits(self, bits) -> int:
        bits = list(bits)
        if len(bits) != self.r:
            raise LengthMismatch(f"expected {self.r} bits, got {len(bits)}")
        value = 0
        for j, b in enumerate(bits):
            value |= (int(b) & 1) << j
        return value

    def elem(self, value: int) -> "FieldElem":
        return FieldElem(self, int(value))

    def elements(self):
        return range(self.q)


def make_field(r: int, primitive_poly: int | None = None) -> FieldSpec:
    """Build GF(2^r); ``primitive_poly`` defaults to the built-in table."""
    if not 1 <= r <= MAX_DEGREE:
        raise DegreeMismatch(f"extension degree must be in [1, {MAX_DEGREE}], got {r}")
    if primitive_poly is None:
        primitive_poly = DEFAULT_PRIMITIVE_POLYS[r]
    primitive_poly = int(primitive_poly)
    if primitive_poly.bit_length() - 1 != r:
        raise DegreeMismatch(
            f"polynomial {poly_to_str(primitive_poly)} has degree {primitive_poly.bit_length() - 1}, expected {r}")
    if not primitive_poly & 1:
        raise NonPrimitivePolynomial(f"{poly_to_str(primitive_poly)} is divisible by X")

    order = (1 << r) - 1
    exp = np.zeros(2 * order, dtype=np.int64)
    log = np.zeros(1 << r, dtype=np.int64)
    seen = np.zeros(1 << r, dtype=bool)
    x = 1
    for k in range(order):
        if seen[x]:
            raise NonPrimitivePolynomial(
                f"{poly_to_str(primitive_poly)}: alpha has order {k} < {order}")
        seen[x] = True
        exp[k] = x
        log[x] = k
        x <<= 1
        if x >> r:
            x ^= primitive_poly
    if x != 1:
        raise NonPrimitivePolynomial(f"{poly_to_str(primitive_poly)} is not primitive")
    exp[order:] = exp[:order]
    exp.setflags(write=False)
    log.setflags(write=False)
    return FieldSpec(r, primitive_poly, exp, log)


@dataclass(frozen=True)
class FieldElem:
    """An element of a :class:`FieldSpec`, with arithmetic operators."""

    field: FieldSpec
    value: int

    def __post_init__(self):
        if not 0 <= self.value < self.field.q:
            raise ValueError(f"{self.value} is not an element of GF({self.field.q})")

    def _check(self, other):
        if isinstance(other, int):
            return other
        if other.field != self.field:
            raise ValueError("elements belong to different fields")
        return other.value

    def __add__(self, other):
        return FieldElem(self.field, self.value ^ self._check(other))

    __radd__ = __add__
    __sub__ = __add__

    def __mul__(self, other):
        return FieldElem(self.field, self.field.mul(self.value, self._check(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return FieldElem(self.field, self.field.div(self.value, self._check(other)))

    def __pow__(self, e: int):
        return FieldElem(self.field, self.field.pow(self.value, e))

    def inv(self):
        return FieldElem(self.field, self.field.inv(self.value))

    def bits(self) -> np.ndarray:
        return self.field.binary_composition(self.value)

    def __getitem__(self, j: int) -> int:
        """``sigma[j]``: the j-th binary component."""
        return (self.value >> j) & 1

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"FieldElem({self.value}, GF(2^{self.field.r}))"
