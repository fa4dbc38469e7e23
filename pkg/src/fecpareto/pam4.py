"""PAM4 labelings, AWGN channel, bit LLRs and raw error-rate formulas.

SNR convention: ``snr_db = 10*log10(Es / sigma^2)`` with Es = 5, the mean
energy of equiprobable {-3, -1, +1, +3}.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import erfc

ES = 5.0
LEVELS = np.array([-3.0, -1.0, 1.0, 3.0])


class Labeling(Enum):
    GRAY = "gray"
    NATURAL = "natural"

    @property
    def table(self) -> np.ndarray:
        """Level indexed by (msb << 1) | lsb."""
        return _LEVEL_OF_BITS[self]

    @property
    def bits_of_level(self) -> np.ndarray:
        """(4, 2) array: (msb, lsb) of LEVELS[i]."""
        return _BITS_OF_LEVEL[self]


_LEVEL_OF_BITS = {
    Labeling.GRAY: np.array([-3.0, -1.0, 3.0, 1.0]),     # 00 01 10 11
    Labeling.NATURAL: np.array([-3.0, -1.0, 1.0, 3.0]),
}
_BITS_OF_LEVEL = {
    Labeling.GRAY: np.array([[0, 0], [0, 1], [1, 1], [1, 0]], dtype=np.uint8),
    Labeling.NATURAL: np.array([[0, 0], [0, 1], [1, 0], [1, 1]], dtype=np.uint8),
}
GRAY = Labeling.GRAY
NATURAL = Labeling.NATURAL


@dataclass(frozen=True)
class ChannelParams:
    snr_db: float

    @property
    def sigma(self) -> float:
        return math.sqrt(ES / 10.0 ** (self.snr_db / 10.0))

    @classmethod
    def from_sigma(cls, sigma: float) -> "ChannelParams":
        if sigma <= 0:
            raise ValueError("sigma must be positive")
        return cls(10.0 * math.log10(ES / sigma ** 2))


def sigma_of(ch) -> float:
    return ch.sigma if isinstance(ch, ChannelParams) else float(ch)


def map_bits(msb, lsb, lab: Labeling):
    """Level(s) for bit pairs; accepts scalars or arrays."""
    idx = (np.asarray(msb, dtype=np.int64) << 1) | np.asarray(lsb, dtype=np.int64)
    out = lab.table[idx]
    return float(out) if np.ndim(out) == 0 else out


def awgn(levels, ch, rng: np.random.Generator) -> np.ndarray:
    levels = np.asarray(levels, dtype=np.float64)
    return levels + sigma_of(ch) * rng.standard_normal(levels.shape)


def bit_llrs(y, ch, lab: Labeling):
    """Exact LLRs ln P(b=0|y)/P(b=1|y) for (msb, lsb), equiprobable levels."""
    sigma = sigma_of(ch)
    y = np.asarray(y, dtype=np.float64)
    scale = -0.5 / (sigma * sigma)
    metric = [scale * (y - s) ** 2 for s in LEVELS]
    mx = np.maximum(np.maximum(metric[0], metric[1]), np.maximum(metric[2], metric[3]))
    p = [np.exp(m - mx) for m in metric]
    bits = lab.bits_of_level
    out = []
    for col in (0, 1):
        zero = [i for i in range(4) if bits[i, col] == 0]
        one = [i for i in range(4) if bits[i, col] == 1]
        num = p[zero[0]] + p[zero[1]]
        den = p[one[0]] + p[one[1]]
        with np.errstate(divide="ignore"):
            llr = np.log(num / den)
        bad = ~np.isfinite(llr)
        if np.any(bad):
            # one side underflowed entirely; fall back to the max-log difference
            maxlog = (np.maximum(metric[zero[0]], metric[zero[1]])
                      - np.maximum(metric[one[0]], metric[one[1]]))
            llr = np.where(bad, maxlog, llr)
        out.append(llr if llr.ndim else float(llr))
    return out[0], out[1]


def conditional_msb(y, lsb, lab: Labeling = NATURAL):
    """MSB of the nearer of the two levels carrying ``lsb`` (ties to the lower level)."""
    if lab is not NATURAL:
        raise ValueError("conditional MSB demapping is defined for natural labeling")
    y = np.asarray(y, dtype=np.float64)
    lsb = np.asarray(lsb, dtype=np.int64)
    # natural: lsb=0 -> {-3 (msb 0), +1 (msb 1)}; lsb=1 -> {-1 (msb 0), +3 (msb 1)}
    lo = np.where(lsb == 0, -3.0, -1.0)
    hi = lo + 4.0
    out = (np.abs(y - hi) < np.abs(y - lo)).astype(np.uint8)
    return int(out) if out.ndim == 0 else out


def qfunc(x):
    return 0.5 * erfc(np.asarray(x, dtype=np.float64) / math.sqrt(2.0))


def _decision_probs(sigma: float) -> np.ndarray:
    """P[i, j]: level i decided as level j with thresholds -2, 0, +2."""
    edges = np.array([-np.inf, -2.0, 0.0, 2.0, np.inf])
    P = np.empty((4, 4))
    for i, s in enumerate(LEVELS):
        upper = qfunc((edges[:-1] - s) / sigma)
        lower = qfunc((edges[1:] - s) / sigma)
        P[i] = upper - lower
    return P


def raw_bit_error_rate(ch, lab: Labeling, bit: int) -> float:
    """Exact hard-decision error probability of one bit (0=msb, 1=lsb)."""
    sigma = sigma_of(ch)
    P = _decision_probs(sigma)
    bits = lab.bits_of_level[:, bit]
    flip = bits[:, None] != bits[None, :]
    return float((P * flip).sum() / 4.0)


def raw_lsb_ber(ch, lab: Labeling = NATURAL) -> float:
    return raw_bit_error_rate(ch, lab, 1)


def raw_ser(ch) -> float:
    """Symbol error rate of equiprobable PAM4: 1.5 * Q(1/sigma)."""
    return float(1.5 * qfunc(1.0 / sigma_of(ch)))
