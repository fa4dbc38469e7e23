"""Table-based arithmetic in GF(2^b), 5 <= b <= 11."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

# Lexicographically smallest primitive polynomial of each degree, as an
# integer bit-vector with bit i = coefficient of x^i.
PRIMITIVE_POLYS = {
    5: 0b100101,        # x^5 + x^2 + 1
    6: 0b1000011,       # x^6 + x + 1
    7: 0b10000011,      # x^7 + x + 1
    8: 0b100011101,     # x^8 + x^4 + x^3 + x^2 + 1
    9: 0b1000010001,    # x^9 + x^4 + 1
    10: 0b10000001001,  # x^10 + x^3 + 1
    11: 0b100000000101, # x^11 + x^2 + 1
}

B_MIN, B_MAX = 5, 11


class ParameterError(ValueError):
    """A parameter lies outside its admissible range."""


@dataclass(frozen=True, eq=False)
class FieldSpec:
    """GF(2^b) with log/antilog tables.

    ``antilog[i] = alpha^i`` for ``0 <= i < 2*(q-1)`` (doubled so that a sum of
    two logs indexes directly); ``log[0]`` is -1 as a sentinel.
    """

    b: int
    primitive_poly: int
    log_table: np.ndarray
    antilog_table: np.ndarray

    @property
    def order(self) -> int:
        """Number of nonzero elements, 2^b - 1."""
        return (1 << self.b) - 1

    @property
    def size(self) -> int:
        return 1 << self.b

    def __repr__(self) -> str:
        return f"FieldSpec(b={self.b}, primitive_poly={self.primitive_poly:#x})"


def _antilog_by_shift(b: int, poly: int) -> list[int]:
    q1 = (1 << b) - 1
    out = []
    x = 1
    for _ in range(q1):
        out.append(x)
        x <<= 1
        if x >> b:
            x ^= poly
    return out


@lru_cache(maxsize=None)
def build_field(b: int) -> FieldSpec:
    if not (B_MIN <= b <= B_MAX):
        raise ParameterError(f"extension degree b={b} outside {B_MIN}..{B_MAX}")
    poly = PRIMITIVE_POLYS[b]
    q1 = (1 << b) - 1
    powers = _antilog_by_shift(b, poly)
    if len(set(powers)) != q1:
        raise ParameterError(f"polynomial {poly:#x} is not primitive")
    antilog = np.array(powers + powers, dtype=np.int64)
    log = np.full(1 << b, -1, dtype=np.int64)
    log[np.array(powers)] = np.arange(q1)
    antilog.setflags(write=False)
    log.setflags(write=False)
    return FieldSpec(b=b, primitive_poly=poly, log_table=log, antilog_table=antilog)


def gf_add(x: int, y: int) -> int:
    return x ^ y


def gf_mul(f: FieldSpec, x: int, y: int) -> int:
    if x == 0 or y == 0:
        return 0
    return int(f.antilog_table[f.log_table[x] + f.log_table[y]])


def gf_inv(f: FieldSpec, x: int) -> int:
    if x == 0:
        raise ZeroDivisionError("zero has no inverse in GF(2^b)")
    return int(f.antilog_table[(f.order - f.log_table[x]) % f.order])


def gf_div(f: FieldSpec, x: int, y: int) -> int:
    return gf_mul(f, x, gf_inv(f, y))


def gf_pow(f: FieldSpec, x: int, e: int) -> int:
    if x == 0:
        return 1 if e == 0 else 0
    return int(f.antilog_table[(f.log_table[x] * e) % f.order])


def alpha_pow(f: FieldSpec, e: int) -> int:
    """alpha^e for any integer e."""
    return int(f.antilog_table[e % f.order])
