import itertools

import numpy as np
import pytest

from fecpareto.bch import (InadmissibleCodeError, SoftWord, analog_weight, bd_decode,
                           bd_decode_batch, chase_decode, chase_decode_batch, design_bch, encode,
                           encode_batch, is_codeword, syndromes)
from fecpareto.galois import ParameterError

GRID = [(5, 1, 32), (5, 1, 20), (6, 1, 57), (6, 2, 40), (7, 2, 125), (8, 3, 200), (5, 3, 32)]


def _long_division_parity(info, gen_poly, r):
    """Remainder of x^r m(x) divided by g(x), by schoolbook division on coefficient lists."""
    g = [(gen_poly >> d) & 1 for d in range(r + 1)][::-1]     # highest degree first
    dividend = list(info) + [0] * r
    for i in range(len(info)):
        if dividend[i]:
            for j, gj in enumerate(g):
                dividend[i + j] ^= gj
    return dividend[-r:]


@pytest.mark.parametrize("b,t,n,k", [(6, 1, 57, 50), (7, 2, 125, 110), (5, 1, 32, 26),
                                      (6, 1, 47, 40), (7, 2, 90, 75), (8, 2, 142, 125)])
def test_dimensions(b, t, n, k):
    s = design_bch(b, t, n)
    assert s.k == k and s.n == n and s.parent_n == 2 ** b - 1


def test_generator_degree_and_hamming_case():
    s = design_bch(5, 1, 32)
    assert s.gen_poly == 0b100101 and s.shorten == 0


@pytest.mark.parametrize("b,t,n", [(6, 3, 10), (5, 1, 34), (5, 1, 6)])
def test_inadmissible_lengths(b, t, n):
    with pytest.raises(InadmissibleCodeError, match=r"inadmissible \(b,t,n\)"):
        design_bch(b, t, n)


def test_t_out_of_range():
    with pytest.raises(ParameterError):
        design_bch(6, 4, 60)


@pytest.mark.parametrize("b,t,n", GRID)
def test_encode_linearity_and_parity(b, t, n, rng):
    s = design_bch(b, t, n)
    assert not encode(s, np.zeros(s.k, dtype=np.uint8)).any()
    info = rng.integers(0, 2, (200, s.k), dtype=np.uint8)
    cw = encode_batch(s, info)
    assert (cw.sum(axis=1) % 2 == 0).all()
    assert (cw[:, :s.k] == info).all()
    assert all(is_codeword(s, c) for c in cw[:20])
    assert ((encode_batch(s, info[:100] ^ info[100:])) == (cw[:100] ^ cw[100:])).all()


@pytest.mark.parametrize("b,t,n", [(5, 1, 32), (6, 2, 40), (7, 2, 125)])
def test_parity_matches_long_division(b, t, n, rng):
    s = design_bch(b, t, n)
    for _ in range(20):
        info = rng.integers(0, 2, s.k, dtype=np.uint8)
        cw = encode(s, info)
        assert list(cw[s.k:s.n - 1]) == _long_division_parity(info, s.gen_poly, b * t)


@pytest.mark.parametrize("b,t,n", GRID)
def test_bd_round_trip(b, t, n, rng):
    s = design_bch(b, t, n)
    W = 10_000
    cw = encode_batch(s, rng.integers(0, 2, (W, s.k), dtype=np.uint8))
    noisy = cw.copy()
    nerr = rng.integers(0, t + 1, W)
    for w in range(W):
        pos = rng.choice(n, nerr[w], replace=False)
        noisy[w, pos] ^= 1
    out, ok = bd_decode_batch(s, noisy)
    assert ok.all() and (out == cw).all()


def test_bd_valid_word_unchanged(rng):
    s = design_bch(6, 1, 57)
    cw = encode(s, rng.integers(0, 2, s.k, dtype=np.uint8))
    out, ok = bd_decode(s, cw)
    assert ok and (out == cw).all()


def test_bd_single_flip_each_position(rng):
    s = design_bch(6, 1, 57)
    cw = encode(s, rng.integers(0, 2, s.k, dtype=np.uint8))
    for p in range(s.n):
        w = cw.copy()
        w[p] ^= 1
        out, ok = bd_decode(s, w)
        assert ok and (out == cw).all()


def test_bd_weight3_patterns_exhaustive(rng):
    s = design_bch(5, 1, 32)
    cw = encode(s, rng.integers(0, 2, s.k, dtype=np.uint8))
    pats = list(itertools.combinations(range(s.n), 3))
    noisy = np.repeat(cw[None], len(pats), axis=0)
    for r, p in enumerate(pats):
        noisy[r, list(p)] ^= 1
    out, ok = bd_decode_batch(s, noisy)
    for r in range(len(pats)):
        if ok[r]:
            assert is_codeword(s, out[r])
            assert not (out[r] == cw).all()
            assert int((out[r][:-1] != noisy[r][:-1]).sum()) <= 1
        else:
            assert (out[r] == noisy[r]).all()


@pytest.mark.parametrize("b,t,n", [(5, 1, 32), (6, 2, 40), (8, 3, 200)])
def test_bd_failure_returns_input(b, t, n, rng):
    s = design_bch(b, t, n)
    noisy = rng.integers(0, 2, (2000, n), dtype=np.uint8)
    out, ok = bd_decode_batch(s, noisy)
    assert (out[~ok] == noisy[~ok]).all()
    assert all(is_codeword(s, w) for w in out[ok])
    syn = np.array([syndromes(s, w).any() for w in out[ok]])
    assert not syn.any()


def _soft(cw, rng, sigma):
    x = 1.0 - 2.0 * cw + sigma * rng.standard_normal(cw.shape)
    return (x < 0).astype(np.uint8), np.abs(x)


def test_chase_two_errors_on_least_reliable():
    s = design_bch(6, 1, 57)
    cw = encode(s, np.arange(s.k, dtype=np.uint8) % 2)
    hard = cw.copy()
    rel = np.full(s.n, 5.0)
    hard[[3, 40]] ^= 1
    rel[[3, 40]] = [0.1, 0.2]
    assert not bd_decode(s, hard)[1] or not (bd_decode(s, hard)[0] == cw).all()
    assert (chase_decode(s, SoftWord(hard, rel), 2) == cw).all()


@pytest.mark.parametrize("J", [0, 3, 6])
def test_chase_clean_word_is_fixed_point(J, rng):
    s = design_bch(7, 2, 125)
    cw = encode(s, rng.integers(0, 2, s.k, dtype=np.uint8))
    assert (chase_decode(s, SoftWord(cw, np.full(s.n, 1e6)), J) == cw).all()


@pytest.mark.parametrize("b,t,n", [(5, 1, 32), (6, 1, 57), (7, 2, 125), (6, 2, 40)])
def test_chase_j0_equals_bd(b, t, n, rng):
    s = design_bch(b, t, n)
    cw = encode_batch(s, rng.integers(0, 2, (10_000, s.k), dtype=np.uint8))
    hard, rel = _soft(cw, rng, 0.7)
    bd, _ = bd_decode_batch(s, hard)
    assert (chase_decode_batch(s, hard, rel, 0) == bd).all()


@pytest.mark.parametrize("b,t,n", [(6, 1, 57), (7, 2, 125), (8, 3, 200)])
def test_chase_output_valid_and_weight_monotone(b, t, n, rng):
    s = design_bch(b, t, n)
    cw = encode_batch(s, rng.integers(0, 2, (1500, s.k), dtype=np.uint8))
    hard, rel = _soft(cw, rng, 0.65)
    prev = None
    for J in range(0, 7):
        out = chase_decode_batch(s, hard, rel, J)
        changed = (out != hard).any(axis=1)
        assert all(is_codeword(s, w) for w in out[changed])
        wt = np.array([analog_weight(SoftWord(h, r), o) if c else np.inf
                       for h, r, o, c in zip(hard, rel, out, changed)])
        wt[~changed & np.array([is_codeword(s, h) for h in hard])] = 0.0
        if prev is not None:
            assert (wt <= prev).all()
        prev = wt


@pytest.mark.parametrize("b,t,n", [(5, 1, 32), (6, 1, 57), (7, 2, 125), (8, 3, 200), (6, 2, 40)])
def test_backends_bit_identical(b, t, n, rng):
    s = design_bch(b, t, n)
    cw = encode_batch(s, rng.integers(0, 2, (3000, s.k), dtype=np.uint8))
    hard, rel = _soft(cw, rng, 0.75)
    for J in (0, 2, 4):
        a = chase_decode_batch(s, hard, rel, J, backend="numba")
        c = chase_decode_batch(s, hard, rel, J, backend="numpy")
        assert (a == c).all()
    a, oa = bd_decode_batch(s, hard, backend="numba")
    c, oc = bd_decode_batch(s, hard, backend="numpy")
    assert (a == c).all() and (oa == oc).all()


def test_softword_validation():
    with pytest.raises(ValueError):
        SoftWord(np.zeros(3), np.ones(4))
    with pytest.raises(ValueError):
        SoftWord(np.zeros(3), -np.ones(3))


def test_chase_rejects_large_J():
    s = design_bch(6, 1, 57)
    with pytest.raises(ParameterError):
        chase_decode(s, SoftWord(np.zeros(57, np.uint8), np.ones(57)), 7)
