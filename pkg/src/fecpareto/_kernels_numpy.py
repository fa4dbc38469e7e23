"""Vectorized numpy fallback for the decoding kernels.

Row-parallel versions of the loops in ``_kernels_numba``; results are
identical, including the floating-point analog weights (summed left to right
in position order via ``cumsum``).
"""
import numpy as np


def _mul(a, b, exp, log):
    nz = (a != 0) & (b != 0)
    return np.where(nz, exp[np.where(nz, log[a] + log[b], 0)], 0)


def _div(a, b, exp, log, qm1):
    nz = (a != 0) & (b != 0)
    return np.where(nz, exp[np.where(nz, log[a] - log[b] + qm1, 0)], 0)


def syndromes(hard, nm1, contrib):
    bits = hard[:, :nm1].astype(bool)
    return np.bitwise_xor.reduce(np.where(bits[:, :, None], contrib[None, :nm1, :], 0), axis=1)


def locate_errors(S, t, nm1, exp, log, qm1, contrib):
    """Row-wise bounded-distance error location.

    Returns ``(count, pos)``: count is -1 on failure, else 0..t with the
    located positions in ``pos[:, :count]`` (remaining slots -1).
    """
    R = S.shape[0]
    nsyn = 2 * t
    clen = 2 * t + 2
    count = np.full(R, -1, dtype=np.int64)
    pos = np.full((R, t), -1, dtype=np.int64)
    nonzero = S.any(axis=1)
    count[~nonzero] = 0
    rows = np.flatnonzero(nonzero)
    if rows.size == 0:
        return count, pos
    Sa = S[rows]
    A = rows.size

    C = np.zeros((A, clen), dtype=np.int64)
    C[:, 0] = 1
    Bp = C.copy()
    L = np.zeros(A, dtype=np.int64)
    m = np.ones(A, dtype=np.int64)
    bb = np.ones(A, dtype=np.int64)
    cols = np.arange(clen)
    ar = np.arange(A)
    for r in range(nsyn):
        d = Sa[:, r].copy()
        for i in range(1, min(r, clen - 1) + 1):
            d ^= _mul(C[:, i], Sa[:, r - i], exp, log)
        nz = d != 0
        coef = _div(d, bb, exp, log, qm1)
        src = cols[None, :] - m[:, None]
        shifted = np.where(src >= 0, Bp[ar[:, None], np.clip(src, 0, None)], 0)
        upd = C ^ _mul(coef[:, None], shifted, exp, log)
        grow = nz & (2 * L <= r)
        Bp = np.where(grow[:, None], C, Bp)
        bb = np.where(grow, d, bb)
        L = np.where(grow, r + 1 - L, L)
        m = np.where(grow, 1, m + 1)
        C = np.where(nz[:, None], upd, C)

    good = L <= t
    # Chien search: value of Lambda(alpha^-d) for every cyclic degree d
    d_idx = np.arange(nm1)
    acc = np.zeros((A, nm1), dtype=np.int64)
    for i in range(t + 1):
        c = np.where(i <= L, C[:, i], 0)
        cz = c != 0
        e = (log[np.where(cz, c, 1)][:, None] + (qm1 - d_idx)[None, :] * i) % qm1
        acc ^= np.where(cz[:, None], exp[e], 0)
    roots = acc == 0
    cnt = roots.sum(axis=1)
    good &= cnt == L

    loc = np.full((A, t), -1, dtype=np.int64)
    rr, dd = np.nonzero(roots & good[:, None])
    if rr.size:
        # rank of each root within its row
        first = np.searchsorted(rr, rr, side="left")
        rank = np.arange(rr.size) - first
        loc[rr, rank] = nm1 - 1 - dd

    check = Sa.copy()
    for e in range(t):
        p = loc[:, e]
        check ^= np.where((p >= 0)[:, None], contrib[np.clip(p, 0, None)], 0)
    good &= ~check.any(axis=1)

    count[rows] = np.where(good, L, -1)
    pos[rows] = np.where(good[:, None], loc, -1)
    return count, pos


def bd_batch(hard, t, exp, log, qm1, contrib, out, ok):
    W, n = hard.shape
    nm1 = n - 1
    S = syndromes(hard, nm1, contrib)
    cnt, pos = locate_errors(S, t, nm1, exp, log, qm1, contrib)
    res = hard.copy()
    good = cnt >= 0
    ar = np.arange(W)
    for e in range(t):
        p = pos[:, e]
        sel = good & (p >= 0)
        res[ar[sel], p[sel]] ^= 1
    res[good, nm1] = res[good, :nm1].sum(axis=1) & 1
    out[:] = res
    ok[:] = good


def chase_batch(hard, rel, J, t, exp, log, qm1, contrib, out):
    W, n = hard.shape
    nm1 = n - 1
    out[:] = hard
    S0 = syndromes(hard, nm1, contrib)
    par = hard.sum(axis=1, dtype=np.int64) & 1
    rows = np.flatnonzero((par != 0) | S0.any(axis=1))
    if rows.size == 0:
        return
    h = hard[rows]
    r = rel[rows]
    S0 = S0[rows]
    par = par[rows]
    A = rows.size
    ar = np.arange(A)
    order = np.argsort(r, axis=1, kind="stable")[:, :J]

    best_w = np.full(A, np.inf)
    best_diff = np.zeros((A, n), dtype=bool)
    for s in range(1 << J):
        S = S0.copy()
        diff = np.zeros((A, n), dtype=bool)
        for a in range(J):
            if (s >> a) & 1:
                p = order[:, a]
                cyc = p < nm1
                S ^= np.where(cyc[:, None], contrib[p], 0)
                diff[ar, p] ^= cyc
        cnt, pos = locate_errors(S, t, nm1, exp, log, qm1, contrib)
        okr = cnt >= 0
        for e in range(t):
            p = pos[:, e]
            sel = okr & (p >= 0)
            diff[ar[sel], p[sel]] ^= True
        nd = diff[:, :nm1].sum(axis=1)
        diff[:, nm1] = ((par + nd) & 1).astype(bool)
        wgt = np.cumsum(r * diff, axis=1)[:, -1]
        better = okr & (wgt < best_w)
        best_w[better] = wgt[better]
        best_diff[better] = diff[better]
    out[rows] = h ^ best_diff.astype(h.dtype)
