"""Scalar-loop decoding kernels, jitted with numba when available.

Every function here is also valid plain Python; ``_kernels_numpy`` holds the
vectorized fallback, which must agree bit-for-bit.
"""
import numpy as np

from ._accel import njit


@njit
def _mul(a, b, exp, log):
    if a == 0 or b == 0:
        return 0
    return exp[log[a] + log[b]]


@njit
def _div(a, b, exp, log, qm1):
    if a == 0:
        return 0
    return exp[log[a] - log[b] + qm1]


@njit
def locate_errors(S, t, nm1, exp, log, qm1, contrib, C, Bp, Tmp, pos):
    """Berlekamp-Massey + Chien search over the ``nm1`` cyclic positions.

    Returns the number of located errors (0..t), written to ``pos``, or -1 if
    the word is not within distance t of a codeword.
    """
    nsyn = 2 * t
    clen = C.shape[0]
    nonzero = False
    for j in range(nsyn):
        if S[j] != 0:
            nonzero = True
            break
    if not nonzero:
        return 0

    for i in range(clen):
        C[i] = 0
        Bp[i] = 0
    C[0] = 1
    Bp[0] = 1
    L = 0
    m = 1
    bb = 1
    for r in range(nsyn):
        d = S[r]
        for i in range(1, min(r, clen - 1) + 1):
            d ^= _mul(C[i], S[r - i], exp, log)
        if d == 0:
            m += 1
            continue
        coef = _div(d, bb, exp, log, qm1)
        if 2 * L <= r:
            for i in range(clen):
                Tmp[i] = C[i]
            for i in range(clen - m):
                C[i + m] ^= _mul(coef, Bp[i], exp, log)
            L = r + 1 - L
            for i in range(clen):
                Bp[i] = Tmp[i]
            bb = d
            m = 1
        else:
            for i in range(clen - m):
                C[i + m] ^= _mul(coef, Bp[i], exp, log)
            m += 1
    if L > t:
        return -1

    if L == 1:
        # single root of 1 + C_1 x sits at degree log(C_1)
        if C[1] == 0:
            return -1
        d = log[C[1]]
        if d >= nm1:
            return -1
        pos[0] = nm1 - 1 - d
        cnt = 1
    else:
        cnt = _chien(C, L, nm1, exp, log, qm1, Tmp, pos)
    if cnt != L:
        return -1
    for j in range(nsyn):
        x = S[j]
        for e in range(cnt):
            x ^= contrib[pos[e], j]
        if x != 0:
            return -1
    return cnt


@njit
def _chien(C, L, nm1, exp, log, qm1, Tmp, pos):
    # Chien search with running logs l_i = log(C_i) - d*i (mod qm1); a degree-L
    # polynomial has at most L roots, so stop once L are found
    for i in range(L + 1):
        Tmp[i] = log[C[i]] if C[i] != 0 else -1
    cnt = 0
    for d in range(nm1):
        acc = 0
        for i in range(L + 1):
            li = Tmp[i]
            if li >= 0:
                acc ^= exp[li]
                li -= i
                if li < 0:
                    li += qm1
                Tmp[i] = li
        if acc == 0:
            pos[cnt] = nm1 - 1 - d
            cnt += 1
            if cnt == L:
                break
    return cnt


@njit
def bd_batch(hard, t, exp, log, qm1, contrib, out, ok):
    W, n = hard.shape
    nm1 = n - 1
    nsyn = 2 * t
    clen = 2 * t + 2
    S = np.zeros(nsyn, np.int64)
    C = np.zeros(clen, np.int64)
    Bp = np.zeros(clen, np.int64)
    Tmp = np.zeros(clen, np.int64)
    pos = np.zeros(t + 1, np.int64)
    for w in range(W):
        for j in range(nsyn):
            S[j] = 0
        for i in range(nm1):
            if hard[w, i]:
                for j in range(nsyn):
                    S[j] ^= contrib[i, j]
        for i in range(n):
            out[w, i] = hard[w, i]
        cnt = locate_errors(S, t, nm1, exp, log, qm1, contrib, C, Bp, Tmp, pos)
        if cnt < 0:
            ok[w] = False
            continue
        ok[w] = True
        for e in range(cnt):
            out[w, pos[e]] ^= 1
        par = 0
        for i in range(nm1):
            par ^= out[w, i]
        out[w, nm1] = par


@njit
def chase_batch(hard, rel, J, t, exp, log, qm1, contrib, out):
    W, n = hard.shape
    nm1 = n - 1
    nsyn = 2 * t
    clen = 2 * t + 2
    S0 = np.zeros(nsyn, np.int64)
    S = np.zeros(nsyn, np.int64)
    C = np.zeros(clen, np.int64)
    Bp = np.zeros(clen, np.int64)
    Tmp = np.zeros(clen, np.int64)
    pos = np.zeros(t + 1, np.int64)
    lr = np.zeros(max(J, 1), np.int64)
    diff = np.zeros(J + t + 2, np.int64)
    best = np.zeros(J + t + 2, np.int64)
    taken = np.zeros(n, np.bool_)
    for w in range(W):
        for i in range(n):
            out[w, i] = hard[w, i]
        for j in range(nsyn):
            S0[j] = 0
        par = 0
        for i in range(nm1):
            if hard[w, i]:
                par ^= 1
                for j in range(nsyn):
                    S0[j] ^= contrib[i, j]
        par ^= hard[w, nm1]
        clean = par == 0
        for j in range(nsyn):
            if S0[j] != 0:
                clean = False
        if clean:
            continue

        # J least reliable positions, ties to the lowest index
        for i in range(n):
            taken[i] = False
        for a in range(J):
            bi = -1
            bv = 0.0
            for i in range(n):
                if not taken[i] and (bi < 0 or rel[w, i] < bv):
                    bi = i
                    bv = rel[w, i]
            taken[bi] = True
            lr[a] = bi

        best_w = np.inf
        nbest = -1
        for s in range(1 << J):
            for j in range(nsyn):
                S[j] = S0[j]
            nd = 0
            for a in range(J):
                if (s >> a) & 1:
                    p = lr[a]
                    if p < nm1:
                        for j in range(nsyn):
                            S[j] ^= contrib[p, j]
                        diff[nd] = p
                        nd += 1
            cnt = locate_errors(S, t, nm1, exp, log, qm1, contrib, C, Bp, Tmp, pos)
            if cnt < 0:
                continue
            for e in range(cnt):
                p = pos[e]
                hit = -1
                for q in range(nd):
                    if diff[q] == p:
                        hit = q
                        break
                if hit >= 0:
                    diff[hit] = diff[nd - 1]
                    nd -= 1
                else:
                    diff[nd] = p
                    nd += 1
            if (par + nd) & 1:
                diff[nd] = nm1
                nd += 1
            # ascending positions so the weight sum order is canonical
            for q in range(1, nd):
                v = diff[q]
                r = q - 1
                while r >= 0 and diff[r] > v:
                    diff[r + 1] = diff[r]
                    r -= 1
                diff[r + 1] = v
            wgt = 0.0
            for q in range(nd):
                wgt += rel[w, diff[q]]
            if wgt < best_w:
                best_w = wgt
                nbest = nd
                for q in range(nd):
                    best[q] = diff[q]
        for q in range(nbest):
            out[w, best[q]] ^= 1
