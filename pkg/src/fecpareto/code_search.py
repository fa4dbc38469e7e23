"""Enumeration of concatenated code candidates, evaluation and Pareto fronts."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterator, NamedTuple

from .bch import design_bch
from .cost_model import FrameGeometry, OuterSpec, build_geometry, complexity_per_bit, latency_bits
from .fer_analysis import DEFAULT_TARGET, TargetUnreachable, csl_snr, solve_snr_at_fer
from .galois import ParameterError
from .inner_mc import NeedsSimulation, Scheme


@dataclass(frozen=True)
class SearchSpace:
    B: int = 10
    T_range: tuple = tuple(range(1, 21))
    b_range: tuple = tuple(range(5, 12))
    t_range: tuple = (1, 2, 3)
    J_range: tuple = tuple(range(1, 7))
    schemes: tuple = ("BICM", "MLC")
    rate_window: tuple = ("0.875", "0.885")
    inner_rate_max: str = "0.99"
    latency_caps: tuple = (20000, 60000, 150000)
    # optional restrictions used by desk-scale presets
    inner_codes: tuple | None = None   # ((scheme, b, t, n), ...)
    N_range: tuple | None = None       # (N_min, N_max)
    N_values: tuple | None = None      # explicit outer lengths

    @property
    def max_latency(self) -> int:
        return max(self.latency_caps) if self.latency_caps else 0


# Desk-scale space around six known rate-0.88 MLC operating points: their outer
# lengths and inner codes, plus BICM inner codes of comparable inner rate.
NEIGHBORHOOD_SPACE = SearchSpace(
    T_range=(10, 14, 15),
    J_range=(2, 4, 5, 6),
    N_values=(544, 689, 752, 857),
    inner_codes=(
        ("BICM", 7, 1, 118), ("BICM", 8, 1, 139), ("BICM", 8, 2, 197), ("BICM", 8, 2, 237),
        ("MLC", 6, 1, 47), ("MLC", 6, 1, 57), ("MLC", 7, 2, 90), ("MLC", 7, 2, 95),
        ("MLC", 7, 2, 125), ("MLC", 8, 2, 142),
    ),
)

PRESETS = {"full": SearchSpace(), "neighborhood": NEIGHBORHOOD_SPACE}


class Candidate(NamedTuple):
    geom: FrameGeometry
    J: int
    cap: int


@dataclass(frozen=True)
class CandidatePoint:
    geom: FrameGeometry
    J: int
    gap_db: float
    complexity: float
    latency: int
    fer_snr: float
    cap: int = 0
    status: str = "ok"
    reason: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def params(self) -> tuple:
        return self.geom.params() + (self.J,)


def _frac(x) -> Fraction:
    return Fraction(str(x))


def inner_rate(scheme: Scheme, n: int, k: int) -> Fraction:
    """Rate contributed by the inner code to the overall rate."""
    return Fraction(k, n) if scheme is Scheme.BICM else Fraction(2 * k, n + k)


def _inner_codes(space: SearchSpace, skips: Counter):
    if space.inner_codes is not None:
        for sch, b, t, n in sorted(space.inner_codes, key=lambda c: (str(c[0]), *c[1:])):
            if (str(sch) in space.schemes and b in space.b_range and t in space.t_range):
                yield Scheme.parse(sch), design_bch(b, t, n)
        return
    for sch in sorted(space.schemes):
        for b in sorted(space.b_range):
            for t in sorted(space.t_range):
                for n in range(b * t + 2, (1 << b) + 1):
                    try:
                        yield Scheme.parse(sch), design_bch(b, t, n)
                    except ParameterError:
                        skips["inadmissible"] += 1


def _N_bounds(space: SearchSpace, r_in: Fraction, T: int, per_N_latency: int):
    lo, hi = (_frac(x) for x in space.rate_window)
    n_min, n_max = 2 * T + 1, (1 << space.B) - 1
    if space.N_range is not None:
        n_min, n_max = max(n_min, space.N_range[0]), min(n_max, space.N_range[1])
    n_max = min(n_max, space.max_latency // per_N_latency)
    if r_in < lo:
        return None
    # (1 - 2T/N) r_in in [lo, hi]  <=>  N >= 2T / (1 - lo/r_in) and (if r_in > hi) N <= 2T / (1 - hi/r_in)
    a = 1 - lo / r_in
    if a > 0:
        n_min = max(n_min, math.ceil(2 * T / a))
    else:
        return None
    if r_in > hi:
        n_max = min(n_max, math.floor(2 * T / (1 - hi / r_in)))
    return (n_min, n_max) if n_min <= n_max else None


def enumerate_candidates(space: SearchSpace, skips: Counter | None = None) -> Iterator[Candidate]:
    """Yield (geometry, J, latency cap) in lexicographic (scheme, b, t, n, T, N, J) order."""
    skips = Counter() if skips is None else skips
    if not (space.T_range and space.J_range and space.schemes and space.latency_caps):
        return
    lo, hi = (_frac(x) for x in space.rate_window)
    rmax = _frac(space.inner_rate_max)
    caps = sorted(space.latency_caps)
    for scheme, spec in _inner_codes(space, skips):
        if Fraction(spec.k, spec.n) > rmax:
            skips["inner_rate"] += 1
            continue
        bits = spec.k if scheme is Scheme.BICM else 2 * spec.k
        if bits % space.B:
            skips["divisibility"] += 1
            continue
        r_in = inner_rate(scheme, spec.n, spec.k)
        per_N = spec.n if scheme is Scheme.BICM else spec.n + spec.k
        for T in sorted(space.T_range):
            bounds = _N_bounds(space, r_in, T, per_N)
            if bounds is None:
                skips["rate_or_latency"] += 1
                continue
            Ns = range(bounds[0], bounds[1] + 1)
            if space.N_values is not None:
                Ns = [N for N in sorted(space.N_values) if bounds[0] <= N <= bounds[1]]
            for N in Ns:
                rate = Fraction(N - 2 * T, N) * r_in
                lat = N * per_N
                if not lo <= rate <= hi or lat > caps[-1]:
                    skips["rate_or_latency"] += 1
                    continue
                geom = build_geometry(OuterSpec.from_NT(N, T, space.B), spec, scheme)
                cap = next(c for c in caps if lat <= c)
                for J in sorted(space.J_range):
                    yield Candidate(geom, J, cap)


def evaluate(candidate: Candidate, cache, target: float = DEFAULT_TARGET,
             start: float | None = None) -> CandidatePoint:
    """Gap, complexity and latency of one candidate.

    ``cache`` is a DistributionCache; its ``sim_budget`` bounds new inner
    simulations.  Failures produce a point with status "unevaluated".
    """
    geom, J, cap = candidate
    cx = complexity_per_bit(geom, J)
    lat = latency_bits(geom)
    try:
        snr, _ = solve_snr_at_fer(geom, J, cache, target, start)
    except NeedsSimulation as e:
        return CandidatePoint(geom, J, math.nan, cx, lat, math.nan, cap, "unevaluated", str(e))
    except TargetUnreachable:
        return CandidatePoint(geom, J, math.nan, cx, lat, math.nan, cap, "unevaluated",
                              "target unreachable")
    return CandidatePoint(geom, J, snr - csl_snr(geom), cx, lat, snr, cap)


def pareto_front(points, cap: int) -> list[CandidatePoint]:
    """Points with latency <= cap not dominated in (gap, complexity).

    Sorted by complexity; among identical (gap, complexity) pairs only the
    lexicographically smallest parameter tuple survives.
    """
    pts = [p for p in points if p.ok and p.latency <= cap]
    pts.sort(key=lambda p: (p.complexity, p.gap_db, p.params()))
    front = []
    best_gap = math.inf
    for p in pts:
        if p.gap_db < best_gap:
            front.append(p)
            best_gap = p.gap_db
    return front


# -- results and checkpoint files -----------------------------------------------

COLUMNS = ("scheme", "N", "K", "T", "B", "M", "m", "n", "k", "b", "t", "J",
           "latency", "complexity", "gap_db", "snr_at_1e-13", "rate")
RESULTS_HEADER = "# fecpareto-results v1: " + " ".join(COLUMNS)


def format_row(p: CandidatePoint) -> str:
    g = p.geom
    vals = list(g.params()) + [p.J, p.latency, f"{p.complexity:.6f}", f"{p.gap_db:.6f}",
                               f"{p.fer_snr:.6f}", f"{g.rate:.6f}"]
    return "\t".join(str(v) for v in vals)


def write_results(points, path, mode: str = "w", header: bool = True) -> None:
    with open(path, mode) as fh:
        if header:
            fh.write(RESULTS_HEADER + "\n")
        for p in points:
            if p.ok:
                fh.write(format_row(p) + "\n")


def read_results(path) -> list[CandidatePoint]:
    out = []
    for line in Path(path).read_text().splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        f = line.split("\t")
        if len(f) != len(COLUMNS):
            raise ValueError(f"results row has {len(f)} fields, expected {len(COLUMNS)}: {line!r}")
        scheme, N, K, T, B, M, m, n, k, b, t, J, lat = f[0], *map(int, f[1:13])
        geom = build_geometry(OuterSpec(N, K, T, B), design_bch(b, t, n), scheme)
        if (geom.M, geom.m, geom.inner.k) != (M, m, k):
            raise ValueError(f"results row inconsistent with canonical geometry: {line!r}")
        out.append(CandidatePoint(geom, J, float(f[14]), float(f[13]), lat, float(f[15])))
    return out


def _prefix(c: Candidate) -> str:
    g = c.geom
    return f"{g.scheme.value} {g.inner.b} {g.inner.t} {g.inner.n}"


def run_search(space: SearchSpace, cache, results_path=None, checkpoint_path=None,
               target: float = DEFAULT_TARGET, progress=None) -> list[CandidatePoint]:
    """Evaluate every candidate, grouped by inner code prefix (scheme, b, t, n).

    Completed prefixes are appended to ``checkpoint_path`` together with their
    rows in ``results_path``; a rerun skips them.
    """
    done = set()
    if checkpoint_path is not None and Path(checkpoint_path).exists():
        done = {l.strip() for l in Path(checkpoint_path).read_text().splitlines() if l.strip()}
    if results_path is not None and not (Path(results_path).exists() and done):
        write_results([], results_path)

    points: list[CandidatePoint] = []
    group: list[CandidatePoint] = []
    current = None
    hint: dict = {}

    def flush():
        if current is None:
            return
        if results_path is not None:
            write_results(group, results_path, mode="a", header=False)
        if checkpoint_path is not None:
            with open(checkpoint_path, "a") as fh:
                fh.write(current + "\n")

    for cand in enumerate_candidates(space):
        pre = _prefix(cand)
        if pre in done:
            continue
        if pre != current:
            flush()
            current, group = pre, []
        key = (pre, cand.J)
        p = evaluate(cand, cache, target, start=hint.get(key))
        if p.ok:
            hint[key] = p.fer_snr
        group.append(p)
        points.append(p)
        if progress is not None:
            progress(p)
    flush()
    return points


def fronts_by_cap(points, caps) -> dict[int, list[CandidatePoint]]:
    return {cap: pareto_front(points, cap) for cap in sorted(caps)}
