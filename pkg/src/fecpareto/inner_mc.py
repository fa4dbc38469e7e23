"""Monte-Carlo distribution of the PAM4-symbol-error weight U after Chase decoding.

Randomness: trials are cut into fixed blocks of ``BLOCK_SIZE``; block ``i`` of
stream ``s`` draws from ``PCG64(SeedSequence(master_seed, spawn_key=(s, i)))``.
A block draws its information bits first, then its standard-normal noise, so
the same seed gives common random numbers across SNR and J.  Histograms are
integer sums over blocks, hence independent of the worker count.
"""
from __future__ import annotations

import json
import math
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import NamedTuple

import numpy as np
from filelock import FileLock

from .bch import BchSpec, chase_decode_batch, design_bch, encode_batch
from .galois import ParameterError
from .pam4 import GRAY, NATURAL, bit_llrs, conditional_msb, map_bits

BLOCK_SIZE = 4096
STREAM_INNER = 0
STREAM_FRAME = 1
FORMAT_VERSION = 1
SNR_KEY_DIGITS = 4


class Scheme(str, Enum):
    BICM = "BICM"
    MLC = "MLC"

    @classmethod
    def parse(cls, s) -> "Scheme":
        return s if isinstance(s, cls) else cls(str(s).upper())


class ConfigurationError(ParameterError):
    pass


class CacheIntegrityError(Exception):
    def __init__(self, index: int, msg: str):
        super().__init__(f"cache record {index}: {msg}")
        self.index = index


@dataclass(frozen=True)
class SchemeConfig:
    scheme: Scheme
    spec: BchSpec
    J: int
    B: int = 10

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme.parse(self.scheme))
        if self.B % 2:
            raise ConfigurationError(f"B={self.B} must be even")
        if not 0 <= self.J <= 6:
            raise ConfigurationError(f"J={self.J} outside 0..6")
        if self.scheme is Scheme.BICM and self.spec.k % self.B:
            raise ConfigurationError(f"BICM needs B | k (B={self.B}, k={self.spec.k})")
        if self.scheme is Scheme.MLC and self.spec.k % (self.B // 2):
            raise ConfigurationError(f"MLC needs B/2 | k (B={self.B}, k={self.spec.k})")

    @classmethod
    def make(cls, scheme, b: int, t: int, n: int, J: int, B: int = 10) -> "SchemeConfig":
        return cls(Scheme.parse(scheme), design_bch(b, t, n), J, B)

    @property
    def u_max(self) -> int:
        """Number of information PAM4 symbols per inner word."""
        return self.spec.k // 2 if self.scheme is Scheme.BICM else self.spec.k

    def key(self, snr_db: float) -> tuple:
        s = self.spec
        return (self.scheme.value, s.b, s.t, s.n, s.k, self.J, round(float(snr_db), SNR_KEY_DIGITS))


@dataclass(frozen=True, eq=False)
class UDistribution:
    config: SchemeConfig
    snr_db: float
    trials: int
    pmf: np.ndarray
    seed: int

    def __post_init__(self):
        if len(self.pmf) != self.config.u_max + 1:
            raise ValueError(f"pmf length {len(self.pmf)} != u_max+1 = {self.config.u_max + 1}")

    @property
    def mean(self) -> float:
        return float(np.arange(len(self.pmf)) @ self.pmf)

    def key(self) -> tuple:
        return self.config.key(self.snr_db)


def block_rng(master_seed: int, stream: int, block: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(stream), int(block)))
    return np.random.Generator(np.random.PCG64(ss))


class Block(NamedTuple):
    """One batch of transmitted inner words and their Chase-decoder inputs."""
    msb: np.ndarray | None   # MLC: transmitted info MSBs (W, k)
    info: np.ndarray         # info bits protected by the inner code (W, k)
    hard: np.ndarray         # (W, n) sign decisions
    rel: np.ndarray          # (W, n) |LLR|
    y_info: np.ndarray | None  # MLC: received info symbols (W, k)


def _gray_llrs_of_bits(bits, noise, sigma):
    """Gray-map a (W, nb) bit array in pairs (zero-padded), add noise, return (W, nb) LLRs."""
    W, nb = bits.shape
    nsym = (nb + 1) // 2
    padded = np.zeros((W, 2 * nsym), dtype=np.uint8)
    padded[:, :nb] = bits
    y = map_bits(padded[:, 0::2], padded[:, 1::2], GRAY) + sigma * noise
    lm, ll = bit_llrs(y, sigma, GRAY)
    llr = np.empty((W, 2 * nsym))
    llr[:, 0::2] = lm
    llr[:, 1::2] = ll
    return llr[:, :nb]


def draw_block(cfg: SchemeConfig, sigma: float, rng: np.random.Generator, W: int) -> Block:
    spec = cfg.spec
    n, k = spec.n, spec.k
    if cfg.scheme is Scheme.BICM:
        info = rng.integers(0, 2, size=(W, k), dtype=np.uint8)
        noise = rng.standard_normal((W, (n + 1) // 2))
        cw = encode_batch(spec, info)
        llr = _gray_llrs_of_bits(cw, noise, sigma)
        return Block(None, info, (llr < 0).astype(np.uint8), np.abs(llr), None)

    pairs = rng.integers(0, 2, size=(W, k, 2), dtype=np.uint8)
    npar = (n - k + 1) // 2
    noise = rng.standard_normal((W, k + npar))
    msb, info = pairs[:, :, 0], pairs[:, :, 1]
    cw = encode_batch(spec, info)
    y_info = map_bits(msb, info, NATURAL) + sigma * noise[:, :k]
    _, llr_info = bit_llrs(y_info, sigma, NATURAL)
    llr_par = _gray_llrs_of_bits(cw[:, k:], noise[:, k:], sigma)
    llr = np.concatenate([llr_info, llr_par], axis=1)
    return Block(msb, info, (llr < 0).astype(np.uint8), np.abs(llr), y_info)


def symbol_errors(cfg: SchemeConfig, block: Block, decoded: np.ndarray) -> np.ndarray:
    """(W, u_max) flags: information PAM4 symbol decoded wrongly."""
    k = cfg.spec.k
    dec_info = decoded[:, :k]
    if cfg.scheme is Scheme.BICM:
        return (dec_info != block.info).reshape(len(dec_info), k // 2, 2).any(axis=2)
    msb_hat = conditional_msb(block.y_info, dec_info, NATURAL)
    return (msb_hat != block.msb) | (dec_info != block.info)


def decode_block(cfg: SchemeConfig, block: Block, decode: bool = True, backend=None) -> np.ndarray:
    if not decode:
        return block.hard
    return chase_decode_batch(cfg.spec, block.hard, block.rel, cfg.J, backend)


def _u_block_hist(cfg, sigma, master_seed, index, W, decode, backend):
    rng = block_rng(master_seed, STREAM_INNER, index)
    blk = draw_block(cfg, sigma, rng, W)
    err = symbol_errors(cfg, blk, decode_block(cfg, blk, decode, backend))
    return np.bincount(err.sum(axis=1), minlength=cfg.u_max + 1).astype(np.int64)


def _blocks(trials: int):
    nb = -(-trials // BLOCK_SIZE)
    return [(i, min(BLOCK_SIZE, trials - i * BLOCK_SIZE)) for i in range(nb)]


def simulate_u_counts(config: SchemeConfig, snr_db: float, trials: int, master_seed: int,
                      workers: int = 1, min_events: int | None = None, decode: bool = True,
                      backend=None) -> tuple[np.ndarray, int]:
    """Histogram of U and the number of trials actually run.

    With ``min_events``, blocks are consumed in order until at least that many
    trials had U > 0 or ``trials`` (the cap) is reached.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    from .pam4 import ChannelParams
    sigma = ChannelParams(snr_db).sigma
    hist = np.zeros(config.u_max + 1, dtype=np.int64)
    done = 0
    plan = _blocks(trials)
    wave = max(1, workers)

    def run(item):
        i, W = item
        return _u_block_hist(config, sigma, master_seed, i, W, decode, backend)

    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for start in range(0, len(plan), wave):
            chunk = plan[start:start + wave]
            results = list(pool.map(run, chunk)) if pool else [run(c) for c in chunk]
            for (i, W), h in zip(chunk, results):
                hist += h
                done += W
                if min_events is not None and done - hist[0] >= min_events:
                    return hist, done
    finally:
        if pool:
            pool.shutdown()
    return hist, done


def simulate_u(config: SchemeConfig, snr_db: float, trials: int, master_seed: int,
               workers: int = 1, min_events: int | None = None, decode: bool = True,
               backend=None) -> UDistribution:
    hist, done = simulate_u_counts(config, snr_db, trials, master_seed, workers,
                                   min_events, decode, backend)
    return UDistribution(config, float(snr_db), done, hist / done, int(master_seed))


# -- persistent cache ---------------------------------------------------------

_HEADER = {"format_version": FORMAT_VERSION, "kind": "fecpareto-udist-cache"}
_FIELDS = ("format_version", "scheme", "b", "t", "n", "k", "J", "snr_db", "trials", "seed", "pmf")


def _record(dist: UDistribution) -> dict:
    s = dist.config.spec
    return {"format_version": FORMAT_VERSION, "scheme": dist.config.scheme.value,
            "b": s.b, "t": s.t, "n": s.n, "k": s.k, "J": dist.config.J,
            "snr_db": round(float(dist.snr_db), SNR_KEY_DIGITS), "trials": int(dist.trials),
            "seed": int(dist.seed), "pmf": [float(p) for p in dist.pmf]}


def _parse_record(index: int, line: str) -> UDistribution:
    try:
        rec = json.loads(line)
    except json.JSONDecodeError as e:
        raise CacheIntegrityError(index, f"not valid JSON ({e.msg})") from None
    if not isinstance(rec, dict):
        raise CacheIntegrityError(index, "record is not an object")
    missing = [f for f in _FIELDS if f not in rec]
    if missing:
        raise CacheIntegrityError(index, f"missing fields {missing}")
    if rec["format_version"] != FORMAT_VERSION:
        raise CacheIntegrityError(index, f"unsupported format_version {rec['format_version']}")
    try:
        cfg = SchemeConfig.make(rec["scheme"], rec["b"], rec["t"], rec["n"], rec["J"])
    except (ValueError, KeyError) as e:
        raise CacheIntegrityError(index, f"bad code parameters ({e})") from None
    if cfg.spec.k != rec["k"]:
        raise CacheIntegrityError(index, f"k={rec['k']} inconsistent with (b,t,n)")
    pmf = np.asarray(rec["pmf"], dtype=np.float64)
    if len(pmf) != cfg.u_max + 1:
        raise CacheIntegrityError(index, f"pmf length {len(pmf)} != {cfg.u_max + 1}")
    if np.any(pmf < 0) or abs(pmf.sum() - 1.0) > 1e-9:
        raise CacheIntegrityError(index, "pmf is not a probability vector")
    if not isinstance(rec["trials"], int) or rec["trials"] < 1:
        raise CacheIntegrityError(index, "trials must be a positive integer")
    return UDistribution(cfg, float(rec["snr_db"]), rec["trials"], pmf, int(rec["seed"]))


def load_cache(path) -> dict:
    """All records in ``path`` merged by key (higher trials wins, first on ties)."""
    path = Path(path)
    out: dict = {}
    if not path.exists():
        return out
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        return out
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError:
        raise CacheIntegrityError(0, "missing header line") from None
    if header.get("format_version") != FORMAT_VERSION:
        raise CacheIntegrityError(0, "header has unsupported format_version")
    for index, line in enumerate(lines[1:], start=1):
        if not line.strip():
            continue
        d = _parse_record(index, line)
        key = d.key()
        if key not in out or d.trials > out[key].trials:
            out[key] = d
    return out


_write_lock = threading.Lock()


def cache_store(dist: UDistribution, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with _write_lock, FileLock(str(path) + ".lock"):
        new = not path.exists() or path.stat().st_size == 0
        with open(path, "a") as fh:
            if new:
                fh.write(json.dumps(_HEADER) + "\n")
            fh.write(json.dumps(_record(dist)) + "\n")


def cache_lookup(config: SchemeConfig, snr_db: float, path) -> UDistribution | None:
    return load_cache(path).get(config.key(snr_db))


class NeedsSimulation(Exception):
    def __init__(self, missing):
        self.missing = list(missing)
        keys = ", ".join(f"{c.scheme.value} b={c.spec.b} t={c.spec.t} n={c.spec.n} J={c.J} snr={s:.4f}"
                         for c, s in self.missing)
        super().__init__(f"needs simulation: {keys}")


class DistributionCache:
    """In-memory view of a cache file that can simulate missing entries.

    ``sim_budget`` bounds how many new distributions may be simulated (None =
    unlimited, 0 = lookup only).
    """

    def __init__(self, path=None, trials: int = 1_000_000, seed: int = 1, workers: int = 1,
                 sim_budget: int | None = None, min_events: int | None = None, backend=None):
        self.path = Path(path) if path is not None else None
        self.trials = trials
        self.seed = seed
        self.workers = workers
        self.sim_budget = sim_budget
        self.min_events = min_events
        self.backend = backend
        self.hits = 0
        self.misses = 0
        self.simulated = 0
        self._lock = threading.Lock()
        self._mem = load_cache(self.path) if self.path is not None else {}

    def lookup(self, config: SchemeConfig, snr_db: float) -> UDistribution | None:
        return self._mem.get(config.key(snr_db))

    def store(self, dist: UDistribution) -> None:
        with self._lock:
            key = dist.key()
            old = self._mem.get(key)
            if old is None or dist.trials > old.trials:
                self._mem[key] = dist
            if self.path is not None:
                cache_store(dist, self.path)

    def can_simulate(self) -> bool:
        return self.sim_budget is None or self.simulated < self.sim_budget

    def get(self, config: SchemeConfig, snr_db: float) -> UDistribution:
        snr_db = round(float(snr_db), SNR_KEY_DIGITS)
        d = self.lookup(config, snr_db)
        if d is not None:
            self.hits += 1
            return d
        self.misses += 1
        if not self.can_simulate():
            raise NeedsSimulation([(config, snr_db)])
        d = simulate_u(config, snr_db, self.trials, self.seed, self.workers,
                       self.min_events, backend=self.backend)
        self.simulated += 1
        self.store(d)
        return d


def default_cache_path() -> Path:
    return Path(os.environ.get("FECPARETO_CACHE", "fecpareto_cache.jsonl"))


def standard_error_of_mean(dist: UDistribution) -> float:
    u = np.arange(len(dist.pmf))
    var = float((u ** 2) @ dist.pmf) - dist.mean ** 2
    return math.sqrt(max(var, 0.0) / dist.trials)
