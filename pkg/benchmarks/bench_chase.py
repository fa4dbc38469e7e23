"""Chase decoding throughput of the numba and numpy backends.

Usage: python benchmarks/bench_chase.py [--words 4096] [--repeat 3]
"""
import argparse
import time

import numpy as np

from fecpareto._accel import HAVE_NUMBA
from fecpareto.bch import chase_decode_batch
from fecpareto.inner_mc import SchemeConfig, block_rng, draw_block
from fecpareto.pam4 import ChannelParams

CASES = [("MLC", 6, 1, 57, 2, 15.3), ("MLC", 6, 1, 47, 5, 14.9), ("MLC", 7, 2, 125, 4, 14.6),
         ("BICM", 7, 1, 118, 4, 15.5), ("BICM", 8, 2, 237, 6, 15.0)]


def _time(spec, blk, J, backend, repeat):
    chase_decode_batch(spec, blk.hard[:8], blk.rel[:8], J, backend)   # compile / warm up
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = chase_decode_batch(spec, blk.hard, blk.rel, J, backend)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--words", type=int, default=4096)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = ["numba", "numpy"] if HAVE_NUMBA else ["numpy"]
    print("scheme   b t   n J  " + "  ".join(f"{b:>12s}" for b in backends) + "  speedup  identical")
    for scheme, b, t, n, J, snr in CASES:
        cfg = SchemeConfig.make(scheme, b, t, n, J)
        blk = draw_block(cfg, ChannelParams(snr).sigma, block_rng(1, 0, 0), args.words)
        res = {be: _time(cfg.spec, blk, J, be, args.repeat) for be in backends}
        us = {be: 1e6 * res[be][0] / args.words for be in backends}
        same = all((res[be][1] == res[backends[0]][1]).all() for be in backends)
        speed = us["numpy"] / us["numba"] if "numba" in us else 1.0
        cols = "  ".join(f"{us[be]:9.2f} us" for be in backends)
        print(f"{scheme:6s} {b:2d} {t} {n:3d} {J}  {cols}  {speed:6.1f}x  {same}")


if __name__ == "__main__":
    main()
