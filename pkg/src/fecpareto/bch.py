"""Shortened, extended binary BCH codes with bounded-distance and Chase-II decoding.

Bit layout of a transmitted word of length n: positions 0..k-1 carry the
information bits, k..n-2 the b*t cyclic parity bits, n-1 the overall even
parity over positions 0..n-2.  Cyclic position i is the coefficient of
x^(n-2-i) in the codeword polynomial; the ``shorten`` higher-degree
information positions are implicit zeros.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import NamedTuple

import numpy as np

from . import _kernels_numba, _kernels_numpy
from ._accel import resolve_backend
from .galois import FieldSpec, ParameterError, alpha_pow, build_field, gf_mul

T_MAX = 3
J_MAX = 6


class InadmissibleCodeError(ParameterError):
    pass


class KernelTables(NamedTuple):
    t: int
    exp: np.ndarray
    log: np.ndarray
    qm1: int
    contrib: np.ndarray  # (n, 2t): alpha^(j*deg(i)) per position, zero row for the extension bit


@dataclass(frozen=True)
class SoftWord:
    hard_bits: np.ndarray
    reliabilities: np.ndarray

    def __post_init__(self):
        if len(self.hard_bits) != len(self.reliabilities):
            raise ValueError("hard_bits and reliabilities differ in length")
        if np.any(np.asarray(self.reliabilities) < 0):
            raise ValueError("reliabilities must be non-negative")


@dataclass(frozen=True)
class BchSpec:
    b: int
    t: int
    n: int
    k: int
    parent_n: int
    shorten: int
    gen_poly: int  # bit i = coefficient of x^i
    field: FieldSpec = field(compare=False, repr=False)

    @property
    def rate(self) -> float:
        return self.k / self.n

    @property
    def n_parity(self) -> int:
        return self.n - self.k

    @cached_property
    def parity_matrix(self) -> np.ndarray:
        """(k, b*t) matrix P with cyclic parity = info @ P mod 2."""
        r = self.b * self.t
        P = np.zeros((self.k, r), dtype=np.uint8)
        for i in range(self.k):
            rem = _poly_mod(1 << (self.n - 2 - i), self.gen_poly)
            for j in range(r):
                P[i, j] = (rem >> (r - 1 - j)) & 1
        return P

    @cached_property
    def tables(self) -> KernelTables:
        f = self.field
        nsyn = 2 * self.t
        contrib = np.zeros((self.n, nsyn), dtype=np.int64)
        for i in range(self.n - 1):
            deg = self.n - 2 - i
            for j in range(nsyn):
                contrib[i, j] = alpha_pow(f, (j + 1) * deg)
        return KernelTables(self.t, f.antilog_table, f.log_table, f.order, contrib)


def _poly_mod(a: int, g: int) -> int:
    dg = g.bit_length() - 1
    while a.bit_length() - 1 >= dg:
        a ^= g << (a.bit_length() - 1 - dg)
    return a


def _poly_mul2(a: int, b: int) -> int:
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def minimal_polynomial(f: FieldSpec, e: int) -> int:
    """Minimal polynomial of alpha^e over GF(2), as a bit-vector."""
    coset = []
    x = e % f.order
    while x not in coset:
        coset.append(x)
        x = (2 * x) % f.order
    poly = [1]  # GF coefficients, index = degree
    for c in coset:
        root = alpha_pow(f, c)
        nxt = [0] * (len(poly) + 1)
        for d, a in enumerate(poly):
            nxt[d + 1] ^= a
            nxt[d] ^= gf_mul(f, a, root)
        poly = nxt
    if any(a not in (0, 1) for a in poly):
        raise ArithmeticError("minimal polynomial has non-binary coefficients")
    return sum(a << d for d, a in enumerate(poly))


@lru_cache(maxsize=None)
def generator_polynomial(b: int, t: int) -> int:
    f = build_field(b)
    seen = []
    g = 1
    for i in range(1, 2 * t + 1):
        mp = minimal_polynomial(f, i)
        if mp not in seen:
            seen.append(mp)
            g = _poly_mul2(g, mp)
    return g


def admissible(b: int, t: int, n: int) -> bool:
    try:
        design_bch(b, t, n)
    except ParameterError:
        return False
    return True


@lru_cache(maxsize=None)
def design_bch(b: int, t: int, n: int) -> BchSpec:
    """Design the extended BCH(n, n - b*t - 1) code shortened from length 2^b - 1."""
    f = build_field(b)
    if not 1 <= t <= T_MAX:
        raise ParameterError(f"t={t} outside 1..{T_MAX}")
    g = generator_polynomial(b, t)
    if g.bit_length() - 1 != b * t:
        raise InadmissibleCodeError(f"inadmissible (b,t)=({b},{t}): deg g = {g.bit_length() - 1} != b*t")
    parent_n = f.order
    if not (b * t + 2 <= n <= parent_n + 1):
        raise InadmissibleCodeError(
            f"inadmissible (b,t,n)=({b},{t},{n}): need {b * t + 2} <= n <= {parent_n + 1}")
    return BchSpec(b=b, t=t, n=n, k=n - b * t - 1, parent_n=parent_n,
                   shorten=parent_n - (n - 1), gen_poly=g, field=f)


def encode_batch(spec: BchSpec, info: np.ndarray) -> np.ndarray:
    info = np.asarray(info, dtype=np.uint8)
    if info.ndim != 2 or info.shape[1] != spec.k:
        raise ValueError(f"info must have shape (W, {spec.k}), got {info.shape}")
    parity = (info.astype(np.int32) @ spec.parity_matrix.astype(np.int32)) & 1
    out = np.empty((info.shape[0], spec.n), dtype=np.uint8)
    out[:, :spec.k] = info
    out[:, spec.k:spec.n - 1] = parity
    out[:, -1] = out[:, :-1].sum(axis=1) & 1
    return out


def encode(spec: BchSpec, info) -> np.ndarray:
    info = np.asarray(info, dtype=np.uint8)
    if info.shape != (spec.k,):
        raise ValueError(f"info length {info.shape} != k={spec.k}")
    return encode_batch(spec, info[None, :])[0]


def syndromes(spec: BchSpec, word) -> np.ndarray:
    """S_1..S_2t of the cyclic part of ``word``."""
    word = np.asarray(word, dtype=np.uint8)
    return _kernels_numpy.syndromes(word[None, :], spec.n - 1, spec.tables.contrib)[0]


def is_codeword(spec: BchSpec, word) -> bool:
    word = np.asarray(word, dtype=np.uint8)
    return not syndromes(spec, word).any() and int(word.sum()) % 2 == 0


def _kernels(backend):
    return _kernels_numba if resolve_backend(backend) == "numba" else _kernels_numpy


def bd_decode_batch(spec: BchSpec, hard: np.ndarray, backend=None):
    hard = np.ascontiguousarray(hard, dtype=np.uint8)
    if hard.ndim != 2 or hard.shape[1] != spec.n:
        raise ValueError(f"hard must have shape (W, {spec.n})")
    tb = spec.tables
    out = np.empty_like(hard)
    ok = np.empty(hard.shape[0], dtype=np.bool_)
    _kernels(backend).bd_batch(hard, tb.t, tb.exp, tb.log, tb.qm1, tb.contrib, out, ok)
    return out, ok


def bd_decode(spec: BchSpec, hard, backend=None):
    """Bounded-distance decode; returns ``(codeword, ok)``, input unchanged on failure."""
    hard = np.asarray(hard, dtype=np.uint8)
    if hard.shape != (spec.n,):
        raise ValueError(f"word length {hard.shape} != n={spec.n}")
    out, ok = bd_decode_batch(spec, hard[None, :], backend)
    return out[0], bool(ok[0])


def chase_decode_batch(spec: BchSpec, hard: np.ndarray, rel: np.ndarray, J: int,
                       backend=None) -> np.ndarray:
    """Chase-II decode each row of ``hard`` with reliabilities ``rel``."""
    if not 0 <= J <= J_MAX:
        raise ParameterError(f"J={J} outside 0..{J_MAX}")
    hard = np.ascontiguousarray(hard, dtype=np.uint8)
    rel = np.ascontiguousarray(rel, dtype=np.float64)
    if hard.ndim != 2 or hard.shape[1] != spec.n or rel.shape != hard.shape:
        raise ValueError(f"hard/rel must both have shape (W, {spec.n})")
    tb = spec.tables
    out = np.empty_like(hard)
    _kernels(backend).chase_batch(hard, rel, J, tb.t, tb.exp, tb.log, tb.qm1, tb.contrib, out)
    return out


def chase_decode(spec: BchSpec, word: SoftWord, J: int, backend=None) -> np.ndarray:
    hard = np.asarray(word.hard_bits, dtype=np.uint8)
    rel = np.asarray(word.reliabilities, dtype=np.float64)
    if hard.shape != (spec.n,):
        raise ValueError(f"word length {hard.shape} != n={spec.n}")
    return chase_decode_batch(spec, hard[None, :], rel[None, :], J, backend)[0]


def analog_weight(word: SoftWord, candidate) -> float:
    """Sum of reliabilities where ``candidate`` disagrees with the hard decisions."""
    hard = np.asarray(word.hard_bits, dtype=np.uint8)
    cand = np.asarray(candidate, dtype=np.uint8)
    return float(np.cumsum(np.asarray(word.reliabilities, dtype=np.float64) * (hard != cand))[-1])
