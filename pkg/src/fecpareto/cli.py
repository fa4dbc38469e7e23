"""Command-line interface: ``fecpareto <subcommand> ...``.

Exit statuses: 0 success, 2 usage error, 3 compute error, 4 missing cache entries.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import sys
from pathlib import Path

from . import __version__
from ._accel import DEFAULT_BACKEND
from .bch import design_bch
from .code_search import (PRESETS, RESULTS_HEADER, format_row, fronts_by_cap, read_results,
                          run_search)
from .cost_model import build_geometry, complexity_per_bit, latency_bits, OuterSpec
from .fer_analysis import (DEFAULT_TARGET, RangeError, fer_curve, gap_to_csl, pam4_capacity,
                           snr_for_capacity)
from .galois import PRIMITIVE_POLYS, ParameterError
from .inner_mc import (CacheIntegrityError, DistributionCache, NeedsSimulation, SchemeConfig,
                       default_cache_path, simulate_u)

EXIT_USAGE, EXIT_COMPUTE, EXIT_MISSING = 2, 3, 4


class UsageError(Exception):
    pass


def _header(schema: str, columns, args) -> list[str]:
    lines = [f"# fecpareto-{schema} v1: " + " ".join(columns)]
    if not args.no_timestamp:
        lines.append("# generated " + _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"))
    return lines


def _emit(lines, out):
    text = "\n".join(lines) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _scheme_config(args) -> SchemeConfig:
    try:
        return SchemeConfig.make(args.scheme, args.b, args.t, args.n, args.J)
    except ParameterError as e:
        raise UsageError(str(e)) from None


def _geometry(args):
    try:
        return build_geometry(OuterSpec.from_NT(args.N, args.T), design_bch(args.b, args.t, args.n),
                              args.scheme)
    except ParameterError as e:
        raise UsageError(str(e)) from None


def _cache(args, lookup_only=False) -> DistributionCache:
    return DistributionCache(args.cache, trials=args.trials, seed=args.seed, workers=args.workers,
                             sim_budget=0 if lookup_only else None, min_events=args.min_events,
                             backend=args.backend)


def _fill_commands(missing, args) -> list[str]:
    return [f"fecpareto inner-sim --scheme {c.scheme.value.lower()} --b {c.spec.b} --t {c.spec.t} "
            f"--n {c.spec.n} --J {c.J} --snr {s:.4f} --trials {args.trials} --seed {args.seed}"
            for c, s in missing]


# -- subcommands ---------------------------------------------------------------

def _validate_common(args) -> None:
    for name in ("workers", "trials", "min_events", "sim_budget"):
        v = getattr(args, name, None)
        if v is not None and v < (0 if name == "sim_budget" else 1):
            raise UsageError(f"--{name.replace('_', '-')}={v} must be positive")
    target = getattr(args, "target", None)
    if target is not None and not 0 < target < 1:
        raise UsageError(f"--target={target} must lie in (0, 1)")


def cmd_inner_sim(args):
    cfg = _scheme_config(args)
    cache = DistributionCache(args.cache)
    lines = _header("inner-sim", ("snr_db", "trials", "pr_u0", "mean_u"), args)
    for snr in args.snr:
        d = simulate_u(cfg, snr, args.trials, args.seed, args.workers, args.min_events,
                       backend=args.backend)
        cache.store(d)
        lines.append(f"{d.snr_db:.4f}\t{d.trials}\t{d.pmf[0]:.9e}\t{d.mean:.9e}")
    _emit(lines, None)


def _snr_grid(args):
    if args.snr:
        return [round(s, 4) for s in args.snr]
    if args.snr_start is None or args.snr_stop is None:
        raise UsageError("give --snr values or --snr-start/--snr-stop")
    n = int(round((args.snr_stop - args.snr_start) / args.snr_step)) + 1
    return [round(args.snr_start + i * args.snr_step, 4) for i in range(max(n, 1))]


def cmd_fer(args):
    geom = _geometry(args)
    _scheme_config(args)
    curve = fer_curve(geom, args.J, _snr_grid(args), _cache(args, args.cache_only))
    lines = _header("fer", ("snr_db", "fer_raw", "fer_clipped"), args)
    lines += [f"{p.snr_db:.4f}\t{p.fer_raw:.9e}\t{p.fer:.9e}" for p in curve]
    _emit(lines, args.out)


def cmd_gap(args):
    geom = _geometry(args)
    _scheme_config(args)
    res = gap_to_csl(geom, args.J, _cache(args, args.cache_only), args.target, args.snr_start)
    lines = _header("gap", ("gap_db", "snr_at_target", "snr_csl", "rate", "latency", "complexity"), args)
    lines.append(f"{res.gap_db:.6f}\t{res.snr_at_target:.6f}\t{res.snr_csl:.6f}\t{geom.rate:.6f}\t"
                 f"{latency_bits(geom)}\t{complexity_per_bit(geom, args.J):.6f}")
    _emit(lines, args.out)


def cmd_csl(args):
    if args.snr is not None:
        print(f"{pam4_capacity(args.snr):.6f}")
    elif args.bits is not None:
        print(f"{snr_for_capacity(args.bits):.6f}")
    elif args.rate is not None:
        print(f"{snr_for_capacity(2.0 * args.rate):.6f}")
    else:
        raise UsageError("give one of --snr, --bits or --rate")


def cmd_search(args):
    space = PRESETS[args.preset]
    cache = _cache(args)
    cache.sim_budget = args.sim_budget
    results = args.results
    ckpt = args.checkpoint or (str(results) + ".ckpt")
    if not args.resume:
        Path(ckpt).unlink(missing_ok=True)
    pts = run_search(space, cache, results, ckpt, args.target)
    bad = sum(not p.ok for p in pts)
    print(f"evaluated {len(pts) - bad} candidates ({bad} unevaluated); "
          f"{cache.simulated} inner distributions simulated, {cache.hits} cache hits")
    if not args.no_timestamp:
        print("# generated " + _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"))


def cmd_pareto(args):
    pts = read_results(args.results)
    caps = args.caps or [20000, 60000, 150000]
    for cap, front in fronts_by_cap(pts, caps).items():
        lines = [RESULTS_HEADER]
        if not args.no_timestamp:
            lines.append("# generated " + _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"))
        lines += [format_row(p) for p in front]
        path = f"{args.out_prefix}_{cap}.tsv"
        Path(path).write_text("\n".join(lines) + "\n")
        print(f"cap {cap}: {len(front)} frontier points -> {path}")


def cmd_info(args):
    print(f"fecpareto {__version__}, backend {args.backend or DEFAULT_BACKEND}")
    print("primitive polynomials: " + ", ".join(f"b={b}: {p:#x}" for b, p in PRIMITIVE_POLYS.items()))
    if args.b is not None and args.t is not None and args.n is not None:
        try:
            s = design_bch(args.b, args.t, args.n)
        except ParameterError as e:
            raise UsageError(str(e)) from None
        print(f"eBCH(n={s.n}, k={s.k}, t={s.t}) over GF(2^{s.b}), shortened by {s.shorten}, "
              f"g(x)={s.gen_poly:#x}")


# -- parser --------------------------------------------------------------------

def _common(p, trials=True):
    p.add_argument("--seed", type=int, default=1, help="master seed (default 1)")
    p.add_argument("--workers", type=int, default=1, help="worker threads (default 1)")
    p.add_argument("--cache", type=Path, default=None,
                   help="distribution cache file (default $FECPARETO_CACHE or ./fecpareto_cache.jsonl)")
    p.add_argument("--backend", choices=("numba", "numpy"), default=None)
    p.add_argument("--no-timestamp", action="store_true", help="omit the timestamp header line")
    if trials:
        p.add_argument("--trials", type=int, default=1_000_000, help="MC trials per SNR (default 1e6)")
        p.add_argument("--min-events", type=int, default=None,
                       help="stop early once this many trials had U > 0 (--trials is the cap)")


def _code(p, outer=True):
    p.add_argument("--scheme", type=str.upper, choices=("BICM", "MLC"), required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--J", type=int, required=True)
    if outer:
        p.add_argument("--N", type=int, required=True, help="RS length")
        p.add_argument("--T", type=int, required=True, help="RS correction radius")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fecpareto", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("inner-sim", help="simulate U distributions into the cache")
    _code(p, outer=False)
    p.add_argument("--snr", type=float, nargs="+", required=True)
    _common(p)
    p.set_defaults(func=cmd_inner_sim)

    for name, func, hlp in (("fer", cmd_fer, "semi-analytic FER versus SNR"),
                            ("gap", cmd_gap, "gap to the constrained Shannon limit")):
        p = sub.add_parser(name, help=hlp)
        _code(p)
        _common(p)
        p.add_argument("--cache-only", action="store_true", help="never simulate; report missing entries")
        p.add_argument("--out", default=None)
        if name == "fer":
            p.add_argument("--snr", type=float, nargs="+")
            p.add_argument("--snr-start", type=float)
            p.add_argument("--snr-stop", type=float)
            p.add_argument("--snr-step", type=float, default=0.1)
        else:
            p.add_argument("--target", type=float, default=DEFAULT_TARGET)
            p.add_argument("--snr-start", type=float, default=None, help="first grid SNR to try")
        p.set_defaults(func=func)

    p = sub.add_parser("csl", help="PAM4 constrained capacity or its inverse")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--snr", type=float, help="capacity (bits/symbol) at this SNR")
    g.add_argument("--bits", type=float, help="SNR reaching this spectral efficiency")
    g.add_argument("--rate", type=float, help="SNR reaching 2*rate bits/symbol")
    p.set_defaults(func=cmd_csl, no_timestamp=True)

    p = sub.add_parser("search", help="enumerate and evaluate a code search space")
    p.add_argument("--preset", choices=sorted(PRESETS), default="neighborhood")
    p.add_argument("--results", type=Path, required=True)
    p.add_argument("--checkpoint", type=Path, default=None)
    p.add_argument("--resume", action="store_true")
    p.add_argument("--sim-budget", type=int, default=None)
    p.add_argument("--target", type=float, default=DEFAULT_TARGET)
    _common(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("pareto", help="reduce a results file to Pareto fronts per latency cap")
    p.add_argument("--results", type=Path, required=True)
    p.add_argument("--out-prefix", required=True)
    p.add_argument("--caps", type=int, nargs="+", default=None)
    p.add_argument("--no-timestamp", action="store_true")
    p.set_defaults(func=cmd_pareto)

    p = sub.add_parser("info", help="backend and code information")
    p.add_argument("--b", type=int)
    p.add_argument("--t", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--backend", choices=("numba", "numpy"), default=None)
    p.set_defaults(func=cmd_info)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if getattr(args, "cache", 1) is None:
        args.cache = default_cache_path()
    try:
        _validate_common(args)
        args.func(args)
    except UsageError as e:
        ap.print_usage(sys.stderr)
        print(f"fecpareto {args.cmd}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except NeedsSimulation as e:
        print("missing cache entries; fill them with:", file=sys.stderr)
        for line in _fill_commands(e.missing, args):
            print("  " + line, file=sys.stderr)
        return EXIT_MISSING
    except (RangeError, CacheIntegrityError, ArithmeticError, ValueError) as e:
        print(f"fecpareto {args.cmd}: {e}", file=sys.stderr)
        return EXIT_COMPUTE
    return 0


if __name__ == "__main__":
    sys.exit(main())
