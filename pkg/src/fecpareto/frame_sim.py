"""End-to-end Monte-Carlo frame simulation of the concatenated system.

Each frame transmits all m inner words of a geometry through the channel and
the Chase decoder, maps every information PAM4 symbol error back to the RS
symbol it belongs to via the strip layout, and declares a frame error when
some RS word collects more than T symbol errors (bounded-distance outer
decoding).  It shares the inner-word transmitter with ``inner_mc`` but none of
the combinatorics of the semi-analytic formula.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .inner_mc import BLOCK_SIZE, STREAM_FRAME, block_rng, decode_block, draw_block, symbol_errors
from .pam4 import ChannelParams


@dataclass(frozen=True)
class FrameSimResult:
    snr_db: float
    frames: int
    frame_errors: int

    @property
    def fer(self) -> float:
        return self.frame_errors / self.frames


def slot_owner(geom) -> np.ndarray:
    """(m, kp // Bp) array: RS word owning each RS-symbol slot of each inner word.

    Strips sit next to each other in RS-word order inside an inner word.
    """
    L = geom.strip_matrix()
    slots = geom.kp // (geom.outer.B // 2)
    owner = np.empty((geom.m, slots), dtype=np.int64)
    for j in range(geom.m):
        owner[j] = np.repeat(np.arange(geom.M), L[:, j])
    return owner


def _frame_block(geom, J, sigma, seed, index, frames, backend):
    cfg = geom.scheme_config(J)
    Bp = geom.outer.B // 2
    rng = block_rng(seed, STREAM_FRAME, index)
    blk = draw_block(cfg, sigma, rng, frames * geom.m)
    err = symbol_errors(cfg, blk, decode_block(cfg, blk, True, backend))
    rs_err = err.reshape(frames, geom.m, -1, Bp).any(axis=3)          # (F, m, slots)
    owner = slot_owner(geom)
    Y = np.zeros((frames, geom.M), dtype=np.int64)
    for i in range(geom.M):
        Y[:, i] = (rs_err & (owner == i)[None]).sum(axis=(1, 2))
    return int((Y > geom.outer.T).any(axis=1).sum())


def simulate_frames(geom, J: int, snr_db: float, frames: int, seed: int,
                    workers: int = 1, backend=None) -> FrameSimResult:
    sigma = ChannelParams(snr_db).sigma
    per_block = max(1, BLOCK_SIZE // geom.m)
    plan = []
    done = 0
    while done < frames:
        f = min(per_block, frames - done)
        plan.append((len(plan), f))
        done += f

    def run(item):
        return _frame_block(geom, J, sigma, seed, item[0], item[1], backend)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            errors = sum(pool.map(run, plan))
    else:
        errors = sum(run(p) for p in plan)
    return FrameSimResult(float(snr_db), frames, errors)
