"""Frame geometry, overall rate, latency and a decoding-operations cost model."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .bch import BchSpec, design_bch
from .galois import ParameterError
from .inner_mc import Scheme, SchemeConfig


class GeometryError(ParameterError):
    pass


@dataclass(frozen=True)
class OuterSpec:
    N: int
    K: int
    T: int
    B: int = 10

    def __post_init__(self):
        if self.B % 2:
            raise ParameterError(f"B={self.B} must be even")
        if self.K != self.N - 2 * self.T:
            raise ParameterError(f"K={self.K} != N - 2T = {self.N - 2 * self.T}")
        if self.K < 1 or not (2 * self.T < self.N <= (1 << self.B) - 1):
            raise ParameterError(f"RS({self.N},{self.K},{self.T}) inadmissible over {self.B}-bit symbols")

    @classmethod
    def from_NT(cls, N: int, T: int, B: int = 10) -> "OuterSpec":
        return cls(N, N - 2 * T, T, B)


KP4 = OuterSpec(544, 514, 15, 10)


@dataclass(frozen=True)
class FrameGeometry:
    """One concatenated configuration.

    ``strips[i]`` is the multiset of nonzero strip lengths of RS word i as a
    sorted tuple of ``(L, multiplicity)``.
    """

    outer: OuterSpec
    inner: BchSpec
    scheme: Scheme
    M: int
    m: int
    strips: tuple = field(repr=False)
    L_matrix: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def kp(self) -> int:
        """Information PAM4 symbols per inner word."""
        return self.inner.k // 2 if self.scheme is Scheme.BICM else self.inner.k

    @property
    def info_bits_per_inner(self) -> int:
        return self.inner.k if self.scheme is Scheme.BICM else 2 * self.inner.k

    @property
    def rate_fraction(self) -> Fraction:
        return Fraction(self.M * self.outer.K * self.outer.B, latency_bits(self))

    @property
    def rate(self) -> float:
        return float(self.rate_fraction)

    def scheme_config(self, J: int) -> SchemeConfig:
        return SchemeConfig(self.scheme, self.inner, J, self.outer.B)

    def distinct_strip_lengths(self) -> list[int]:
        return sorted({L for s in self.strips for L, _ in s})

    def rs_word_classes(self) -> list[tuple[tuple, int]]:
        """Distinct strip multisets with the number of RS words sharing each."""
        return sorted(Counter(self.strips).items())

    def strip_matrix(self) -> np.ndarray:
        """(M, m) matrix of L_{i,j}."""
        if self.L_matrix is not None:
            return self.L_matrix
        return np.ones((self.M, self.m), dtype=np.int64)

    def params(self) -> tuple:
        o, c = self.outer, self.inner
        return (self.scheme.value, o.N, o.K, o.T, o.B, self.M, self.m, c.n, c.k, c.b, c.t)


def build_geometry(outer: OuterSpec, inner: BchSpec, scheme) -> FrameGeometry:
    """Canonical geometry: m = N inner words, one RS symbol per strip."""
    scheme = Scheme.parse(scheme)
    bits = inner.k if scheme is Scheme.BICM else 2 * inner.k
    if bits % outer.B:
        raise GeometryError(
            f"no admissible geometry: {scheme.value} carries {bits} info bits per inner word, "
            f"not a multiple of B={outer.B}")
    M = bits // outer.B
    geom = FrameGeometry(outer, inner, scheme, M, outer.N, (((1, outer.N),),) * M)
    validate_geometry(geom)
    return geom


def geometry_from_strips(outer: OuterSpec, inner: BchSpec, scheme, L) -> FrameGeometry:
    """Geometry from an explicit (M, m) matrix of strip lengths."""
    scheme = Scheme.parse(scheme)
    L = np.asarray(L, dtype=np.int64)
    if L.ndim != 2:
        raise GeometryError("strip matrix must be 2-D")
    M, m = L.shape
    strips = tuple(tuple(sorted(Counter(int(x) for x in row if x > 0).items())) for row in L)
    geom = FrameGeometry(outer, inner, scheme, M, m, strips, L)
    validate_geometry(geom)
    return geom


def validate_geometry(geom: FrameGeometry) -> None:
    o = geom.outer
    bits = geom.info_bits_per_inner
    if geom.m * bits != geom.M * o.N * o.B:
        raise GeometryError(f"bit count mismatch: m*{bits} != M*N*B")
    if geom.outer.B // 2 * max(geom.distinct_strip_lengths() or [0]) > geom.kp:
        raise GeometryError("strip longer than an inner word")
    L = geom.strip_matrix()
    lo, hi = o.N // geom.m, -(-o.N // geom.m)
    if np.any(L.sum(axis=1) != o.N):
        raise GeometryError("each RS word must contribute exactly N symbols")
    if np.any((L != lo) & (L != hi)):
        raise GeometryError(f"strip lengths must be {lo} or {hi}")
    if np.any(L.sum(axis=0) * o.B != bits):
        raise GeometryError(f"each inner word must carry {bits} info bits")


def overall_rate(geom: FrameGeometry) -> float:
    return geom.rate


def latency_bits(geom: FrameGeometry) -> int:
    n, k = geom.inner.n, geom.inner.k
    return geom.m * n if geom.scheme is Scheme.BICM else geom.m * (n + k)


# Coefficients of the operations model; every term counts elementary
# operations (additions, multiplications, lookups, comparisons).
@dataclass(frozen=True)
class CostModel:
    sort: float = 1.0           # n * ceil(log2 n) reliability sort
    syndrome: float = 2.0       # per pattern: 2t syndromes over n bits -> syndrome * t * n
    key_equation: float = 2.0   # per pattern: key_equation * t^2
    chien: float = 1.0          # per pattern: chien * n * t
    weight: float = 1.0         # per pattern: analog weight, weight * n
    rs_syndrome: float = 2.0    # rs_syndrome * T * N
    rs_key_equation: float = 2.0
    rs_chien: float = 1.0
    rs_forney: float = 2.0      # rs_forney * T


DEFAULT_COST = CostModel()


def inner_ops(n: int, t: int, J: int, c: CostModel = DEFAULT_COST) -> float:
    per_pattern = c.syndrome * t * n + c.key_equation * t * t + c.chien * n * t + c.weight * n
    return c.sort * n * math.ceil(math.log2(n)) + (1 << J) * per_pattern


def outer_ops(N: int, T: int, c: CostModel = DEFAULT_COST) -> float:
    return c.rs_syndrome * T * N + c.rs_key_equation * T * T + c.rs_chien * N * T + c.rs_forney * T


def complexity_per_bit(geom: FrameGeometry, J: int, model: CostModel = DEFAULT_COST) -> float:
    o, c = geom.outer, geom.inner
    total = geom.m * inner_ops(c.n, c.t, J, model) + geom.M * outer_ops(o.N, o.T, model)
    return total / (geom.M * o.K * o.B)


def make_geometry(scheme, N: int, T: int, b: int, t: int, n: int, B: int = 10) -> FrameGeometry:
    return build_geometry(OuterSpec.from_NT(N, T, B), design_bch(b, t, n), scheme)
