"""Semi-analytic frame error rate of the concatenated code, PAM4 capacity and gap.

The inner decoders only enter through the Monte-Carlo pmf of U (symbol-error
weight per inner word).  Errored symbols are assumed uniformly placed, which
turns U into a strip error count V through exact pattern counting; Y_i is the
sum of the independent V's of RS word i, and the frame error probability is
the union bound over RS words of Pr(Y_i > T).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, NamedTuple

import numpy as np

from .galois import ParameterError
from .pam4 import ChannelParams

DEFAULT_TARGET = 1e-13
GRID_STEP = 0.1
GH_NODES = 200
TRIM = 1e-80


class RangeError(ValueError):
    """Target FER not bracketed by the curve."""


class TargetUnreachable(RangeError):
    pass


# -- combinatorics ------------------------------------------------------------

def _check(Bp, kp, L, u=0, v=0):
    if Bp < 1 or L < 0 or kp < 0 or Bp * L > kp:
        raise ParameterError(f"need Bp >= 1, L >= 0 and Bp*L <= kp (Bp={Bp}, kp={kp}, L={L})")
    if not (0 <= u <= kp and 0 <= v <= L):
        raise ParameterError(f"(u, v)=({u}, {v}) outside 0..{kp} x 0..{L}")


def genfunc_coeff(Bp: int, kp: int, L: int, u: int, v: int) -> int:
    """Coefficient of x^u y^v in (1 + ((1+x)^Bp - 1) y)^L (1+x)^(kp - Bp L).

    Number of ways to place u errored symbols among kp so that exactly v of
    the L Bp-symbol groups in the strip are hit.
    """
    _check(Bp, kp, L, u, v)
    rest = kp - Bp * L
    # ((1+x)^Bp - 1)^v = sum_i C(v,i) (-1)^(v-i) (1+x)^(Bp i)
    s = 0
    for i in range(v + 1):
        term = math.comb(v, i) * math.comb(Bp * i + rest, u)
        s += term if (v - i) % 2 == 0 else -term
    return math.comb(L, v) * s


@dataclass(frozen=True, eq=False)
class StripConditional:
    Bp: int
    kp: int
    L: int
    table: np.ndarray  # (kp+1, L+1): Pr(V=v | U=u)


@lru_cache(maxsize=256)
def strip_conditional(Bp: int, kp: int, L: int) -> StripConditional:
    _check(Bp, kp, L)
    table = np.zeros((kp + 1, L + 1))
    for u in range(kp + 1):
        total = math.comb(kp, u)
        for v in range(min(u, L) + 1):
            c = genfunc_coeff(Bp, kp, L, u, v)
            if c:
                table[u, v] = c / total  # exact int ratio, correctly rounded
    table.setflags(write=False)
    return StripConditional(Bp, kp, L, table)


def v_distribution(cond: StripConditional, u_pmf) -> np.ndarray:
    """Pr(V=v) = sum_u Pr(V=v | U=u) Pr(U=u)."""
    u_pmf = np.asarray(getattr(u_pmf, "pmf", u_pmf), dtype=np.float64)
    if len(u_pmf) != cond.kp + 1:
        raise ValueError(f"U pmf has support {len(u_pmf)}, expected {cond.kp + 1}")
    return u_pmf @ cond.table


# -- convolutions and union bound ----------------------------------------------

def _conv(a, b, cap):
    out = np.convolve(a, b)
    if cap is not None:
        out = out[:cap + 1]
    # drop a negligible upper tail; keeps the squaring cheap at high SNR
    nz = np.flatnonzero(out >= TRIM)
    return out[:nz[-1] + 1] if nz.size else out[:1]


def convolution_power(p, m: int, cap: int | None = None) -> np.ndarray:
    """m-fold self-convolution by repeated squaring, support truncated at ``cap``."""
    if m < 0:
        raise ValueError("multiplicity must be >= 0")
    result = np.ones(1)
    base = np.asarray(p, dtype=np.float64)
    while m:
        if m & 1:
            result = _conv(result, base, cap)
        m >>= 1
        if m:
            base = _conv(base, base, cap)
    return result


def y_distribution(strips: Iterable[tuple], cap: int | None = None) -> np.ndarray:
    """Distribution of a sum of independent strip counts.

    ``strips`` holds ``(pmf, multiplicity)`` pairs; each pmf is raised to its
    multiplicity and the results are convolved together.
    """
    out = np.ones(1)
    for pmf, mult in strips:
        if mult < 1:
            raise ValueError("multiplicities must be >= 1")
        out = _conv(out, convolution_power(pmf, mult, cap), cap)
    return out


def tail(pmf, T: int) -> float:
    """Pr(Y > T), summed directly over the tail."""
    pmf = np.asarray(pmf)
    return float(pmf[T + 1:].sum()) if len(pmf) > T + 1 else 0.0


def union_bound(y_dists, T: int) -> float:
    """Unclipped sum over RS words of Pr(Y_i > T)."""
    return float(sum(tail(y, T) for y in y_dists))


def frame_error_prob(y_dists, T: int) -> float:
    if len(y_dists) < 1:
        raise ValueError("need at least one RS word")
    return min(1.0, union_bound(y_dists, T))


# -- FER of a frame geometry ------------------------------------------------------

class FerPoint(NamedTuple):
    snr_db: float
    fer_raw: float
    fer: float


def fer_from_u(geom, u_pmf) -> float:
    """Unclipped union-bound FER of ``geom`` for a given inner U pmf."""
    kp = geom.kp
    Bp = geom.outer.B // 2
    vpmf = {}
    for L in geom.distinct_strip_lengths():
        vpmf[L] = v_distribution(strip_conditional(Bp, kp, L), u_pmf)
    total = 0.0
    for strips, count in geom.rs_word_classes():
        y = y_distribution([(vpmf[L], mult) for L, mult in strips], cap=geom.outer.N)
        total += count * tail(y, geom.outer.T)
    return total


def fer_curve(geom, J: int, snr_grid, cache) -> list[FerPoint]:
    """(snr, raw FER, clipped FER) at each grid SNR; ``cache`` supplies U pmfs."""
    cfg = geom.scheme_config(J)
    missing = [(cfg, s) for s in snr_grid if cache.lookup(cfg, s) is None]
    if missing and not cache.can_simulate():
        from .inner_mc import NeedsSimulation
        raise NeedsSimulation(missing)
    out = []
    for s in snr_grid:
        raw = fer_from_u(geom, cache.get(cfg, s))
        out.append(FerPoint(float(s), raw, min(1.0, raw)))
    return out


def snr_at_fer(curve, target: float = DEFAULT_TARGET) -> float:
    """SNR where log10(FER) crosses ``target``, by linear interpolation."""
    pts = sorted((float(p[0]), float(p[1])) for p in curve)
    if len(pts) < 2:
        raise RangeError("need at least two curve points")
    lt = math.log10(target)
    for (s0, f0), (s1, f1) in zip(pts, pts[1:]):
        if f0 == target:
            return s0
        if f0 > target >= f1:
            l0 = math.log10(max(f0, 1e-300))
            l1 = math.log10(max(f1, 1e-300))
            return s0 + (l0 - lt) / (l0 - l1) * (s1 - s0)
    if pts[-1][1] == target:
        return pts[-1][0]
    raise RangeError(f"target FER {target:g} not bracketed on [{pts[0][0]}, {pts[-1][0]}] dB")


# -- constrained capacity ----------------------------------------------------------

_LEVELS = np.array([-3.0, -1.0, 1.0, 3.0])


@lru_cache(maxsize=8)
def _hermgauss(nodes: int):
    return np.polynomial.hermite.hermgauss(nodes)


def _capacity_integrand(z, x, sigma):
    """log2 sum_s exp(-((x + z - s)^2 - z^2) / (2 sigma^2)) for one level x."""
    d = x - _LEVELS
    e = -(d[None, :] ** 2 + 2.0 * d[None, :] * np.asarray(z)[..., None]) / (2.0 * sigma ** 2)
    mx = e.max(axis=-1)
    return (mx + np.log(np.exp(e - mx[..., None]).sum(axis=-1))) / math.log(2.0)


def pam4_capacity(snr_db: float, nodes: int = GH_NODES) -> float:
    """Mutual information (bits/symbol) of equiprobable PAM4 over AWGN."""
    if nodes < 64:
        raise ValueError("use at least 64 Gauss-Hermite nodes")
    sigma = ChannelParams(snr_db).sigma
    tau, w = _hermgauss(nodes)
    z = math.sqrt(2.0) * sigma * tau
    acc = 0.0
    for x in _LEVELS:
        acc += float(w @ _capacity_integrand(z, x, sigma)) / math.sqrt(math.pi)
    return 2.0 - acc / 4.0


def pam4_capacity_adaptive(snr_db: float) -> float:
    """Same quantity by adaptive quadrature (independent cross-check)."""
    from scipy.integrate import quad

    sigma = ChannelParams(snr_db).sigma
    acc = 0.0
    for x in _LEVELS:
        f = lambda z, x=x: (math.exp(-z * z / (2 * sigma * sigma)) / (math.sqrt(2 * math.pi) * sigma)
                            * float(_capacity_integrand(np.array([z]), x, sigma)[0]))
        brk = sorted({-(x - s) / 2.0 for s in _LEVELS if s != x})
        lo, hi = -12 * sigma, 12 * sigma
        pts = [lo] + [b for b in brk if lo < b < hi] + [hi]
        for a, b in zip(pts, pts[1:]):
            acc += quad(f, a, b, epsabs=1e-13, epsrel=1e-12, limit=200)[0]
    return 2.0 - acc / 4.0


def snr_for_capacity(bits: float, lo: float = -30.0, hi: float = 60.0, tol: float = 1e-6) -> float:
    """Smallest SNR (dB) at which PAM4 capacity reaches ``bits``; bisection."""
    if not 0.0 < bits < 2.0:
        raise ParameterError(f"spectral efficiency {bits} outside (0, 2)")
    if pam4_capacity(lo) > bits or pam4_capacity(hi) < bits:
        raise RangeError("capacity target outside the search interval")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if pam4_capacity(mid) < bits:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def csl_snr(geom) -> float:
    """Constrained Shannon limit: SNR where capacity equals 2 * overall rate."""
    return snr_for_capacity(2.0 * geom.rate)


# -- gap to the constrained Shannon limit -------------------------------------------

def _grid(x: float) -> float:
    return round(round(x / GRID_STEP) * GRID_STEP, 4)


@dataclass
class GapResult:
    gap_db: float
    snr_at_target: float
    snr_csl: float
    curve: list  # FerPoints evaluated while bracketing, sorted by SNR


def solve_snr_at_fer(geom, J: int, cache, target: float = DEFAULT_TARGET,
                     start: float | None = None, max_above_csl: float = 15.0):
    """Bracket ``target`` on the 0.1 dB grid and interpolate.

    Steps outward from ``start`` with doubling strides until the FER crosses
    the target, then bisects on the grid down to adjacent points.
    Returns ``(snr, curve)``.
    """
    csl = csl_snr(geom)
    lo_lim, hi_lim = _grid(csl), _grid(csl + max_above_csl)
    seen: dict[float, float] = {}
    cfg = geom.scheme_config(J)

    def fer(s):
        s = _grid(s)
        if s not in seen:
            seen[s] = fer_from_u(geom, cache.get(cfg, s))
        return seen[s]

    s = _grid(start if start is not None else csl + 3.0)
    s = min(max(s, lo_lim), hi_lim)
    stride = GRID_STEP
    if fer(s) > target:
        lo = s
        while True:
            hi = _grid(min(lo + stride, hi_lim))
            if fer(hi) <= target:
                break
            if hi >= hi_lim:
                raise TargetUnreachable(f"FER stays above {target:g} up to {hi_lim} dB")
            lo, stride = hi, stride * 2
    else:
        hi = s
        while True:
            lo = _grid(max(hi - stride, lo_lim))
            if fer(lo) > target:
                break
            if lo <= lo_lim:
                # already below target at the Shannon limit grid point
                hi = lo
                lo = None
                break
            hi, stride = lo, stride * 2
        if lo is None:
            curve = [FerPoint(k, v, min(1.0, v)) for k, v in sorted(seen.items())]
            return hi, curve
    while hi - lo > GRID_STEP * 1.5:
        mid = _grid(0.5 * (lo + hi))
        if mid in (lo, hi):
            break
        if fer(mid) > target:
            lo = mid
        else:
            hi = mid
    snr = snr_at_fer([(lo, fer(lo)), (hi, fer(hi))], target)
    curve = [FerPoint(k, v, min(1.0, v)) for k, v in sorted(seen.items())]
    return snr, curve


def gap_to_csl(geom, J: int, cache, target: float = DEFAULT_TARGET,
               start: float | None = None) -> GapResult:
    snr, curve = solve_snr_at_fer(geom, J, cache, target, start)
    csl = csl_snr(geom)
    return GapResult(snr - csl, snr, csl, curve)
