"""Compiled inner loops for enumeration and closed-form accumulation.

Graphs are passed in CSR form (``indptr``, ``indices``). Only fixed-width
dtypes reach these functions; arbitrary-precision work goes through the numpy
object path in :mod:`apckernel.counting`.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _build_candidates(indptr, indices, verts, d, in_set, cnt, stamp, stamp_val, out):
    k = 0
    for a in range(d):
        v = verts[a]
        for p in range(indptr[v], indptr[v + 1]):
            y = indices[p]
            if in_set[y] == 0 and stamp[y] != stamp_val:
                stamp[y] = stamp_val
                out[k] = y
                k += 1
    return k


@njit(cache=True)
def _connected_without(indptr, indices, in_set, w, x, target, seen, stamp_val, queue):
    # is (S + w) - x connected?  S is marked in in_set, w is not.
    seen[w] = stamp_val
    queue[0] = w
    head = 0
    tail = 1
    while head < tail:
        v = queue[head]
        head += 1
        for p in range(indptr[v], indptr[v + 1]):
            y = indices[p]
            if y == x or seen[y] == stamp_val:
                continue
            if in_set[y] == 1 or y == w:
                seen[y] = stamp_val
                queue[tail] = y
                tail += 1
    return tail == target


@njit(cache=True)
def enumerate_sets(indptr, indices, n, roots, max_size):
    """Reverse-search enumeration of connected vertex sets under ``roots``.

    Returns ``(verts, sizes, boundary)`` where row ``i`` of ``verts`` holds the
    ``sizes[i]`` vertices of the i-th set (padded with -1).
    """
    K = max_size
    maxdeg = 0
    for v in range(n):
        dv = indptr[v + 1] - indptr[v]
        if dv > maxdeg:
            maxdeg = dv
    cand_cap = min(n, K * maxdeg) + 1

    cap = 1024
    out_v = np.full((cap, K), -1, dtype=np.int32)
    out_s = np.zeros(cap, dtype=np.int32)
    out_b = np.zeros(cap, dtype=np.int32)
    m = 0

    in_set = np.zeros(n, dtype=np.int8)
    cnt = np.zeros(n, dtype=np.int32)
    stamp = np.zeros(n, dtype=np.int64)
    seen = np.zeros(n, dtype=np.int64)
    queue = np.zeros(K + 1, dtype=np.int32)
    stamp_val = 0
    seen_val = 0

    verts = np.zeros(K, dtype=np.int32)
    cand = np.zeros((K + 1, cand_cap), dtype=np.int32)
    ncand = np.zeros(K + 1, dtype=np.int32)
    ptr = np.zeros(K + 1, dtype=np.int32)

    for ri in range(roots.shape[0]):
        r = roots[ri]
        # push root
        d = 0
        bcount = 0
        in_set[r] = 1
        verts[0] = r
        d = 1
        for p in range(indptr[r], indptr[r + 1]):
            y = indices[p]
            if in_set[y] == 0 and cnt[y] == 0:
                bcount += 1
            cnt[y] += 1
        if m == cap:
            cap *= 2
            nv = np.full((cap, K), -1, dtype=np.int32)
            nv[:m] = out_v[:m]
            out_v = nv
            ns = np.zeros(cap, dtype=np.int32)
            ns[:m] = out_s[:m]
            out_s = ns
            nb = np.zeros(cap, dtype=np.int32)
            nb[:m] = out_b[:m]
            out_b = nb
        out_v[m, 0] = r
        out_s[m] = 1
        out_b[m] = bcount
        m += 1
        if K > 1:
            stamp_val += 1
            ncand[1] = _build_candidates(indptr, indices, verts, 1, in_set, cnt, stamp, stamp_val, cand[1])
            ptr[1] = 0
        else:
            ncand[1] = 0
            ptr[1] = 0

        while d >= 1:
            if ptr[d] < ncand[d]:
                w = cand[d, ptr[d]]
                ptr[d] += 1
                ok = True
                for a in range(d):
                    x = verts[a]
                    if x > w:
                        seen_val += 1
                        if _connected_without(indptr, indices, in_set, w, x, d, seen, seen_val, queue):
                            ok = False
                            break
                if not ok:
                    continue
                # descend: add w
                if cnt[w] > 0:
                    bcount -= 1
                in_set[w] = 1
                verts[d] = w
                d += 1
                for p in range(indptr[w], indptr[w + 1]):
                    y = indices[p]
                    if in_set[y] == 0 and cnt[y] == 0:
                        bcount += 1
                    cnt[y] += 1
                if m == cap:
                    cap *= 2
                    nv = np.full((cap, K), -1, dtype=np.int32)
                    nv[:m] = out_v[:m]
                    out_v = nv
                    ns = np.zeros(cap, dtype=np.int32)
                    ns[:m] = out_s[:m]
                    out_s = ns
                    nb = np.zeros(cap, dtype=np.int32)
                    nb[:m] = out_b[:m]
                    out_b = nb
                for a in range(d):
                    out_v[m, a] = verts[a]
                out_s[m] = d
                out_b[m] = bcount
                m += 1
                if d < K:
                    stamp_val += 1
                    ncand[d] = _build_candidates(indptr, indices, verts, d, in_set, cnt, stamp, stamp_val, cand[d])
                    ptr[d] = 0
                else:
                    ncand[d] = 0
                    ptr[d] = 0
            else:
                # ascend: remove the last vertex
                d -= 1
                w = verts[d]
                for p in range(indptr[w], indptr[w + 1]):
                    y = indices[p]
                    cnt[y] -= 1
                    if in_set[y] == 0 and cnt[y] == 0:
                        bcount -= 1
                in_set[w] = 0
                if cnt[w] > 0:
                    bcount += 1
    return out_v[:m], out_s[:m], out_b[:m]


@njit(cache=True)
def accumulate(verts, sizes, boundary, indptr, indices, weights, max_length, comb, include_cycles, fault, acc):
    """Add every subgraph's closed-form contribution into ``acc[l, u, v]``.

    ``weights`` and ``comb`` share the dtype of ``acc``. ``fault`` is added to
    the path coefficient of two-vertex subgraphs (validation hook, normally 0).
    """
    n = weights.shape[0]
    K = verts.shape[1]
    L = max_length
    pos = np.full(n, -1, dtype=np.int32)
    A = np.zeros((K, K), dtype=acc.dtype)
    P = np.zeros((K, K), dtype=acc.dtype)
    Q = np.zeros((K, K), dtype=acc.dtype)
    for idx in range(verts.shape[0]):
        s = sizes[idx]
        if s < 2:
            continue
        nb = boundary[idx]
        for i in range(s):
            pos[verts[idx, i]] = i
        for i in range(s):
            for j in range(s):
                A[i, j] = 0
        for i in range(s):
            v = verts[idx, i]
            wv = weights[v]
            for p in range(indptr[v], indptr[v + 1]):
                j = pos[indices[p]]
                if j >= 0:
                    A[i, j] = wv
        for i in range(s):
            for j in range(s):
                P[i, j] = A[i, j]
        for l in range(1, L + 1):
            if l > 1:
                for i in range(s):
                    for j in range(s):
                        t = P[i, 0] * A[0, j]
                        for q in range(1, s):
                            t += P[i, q] * A[q, j]
                        Q[i, j] = t
                for i in range(s):
                    for j in range(s):
                        P[i, j] = Q[i, j]
            if l + 1 < s:
                continue
            r = l + 1 - s
            cp = comb[nb, r]
            if (l + 1 + s) % 2 == 1:
                cp = -cp
            if s == 2:
                cp += fault
            for i in range(s):
                vi = verts[idx, i]
                for j in range(s):
                    if i != j:
                        acc[l, vi, verts[idx, j]] += cp * P[i, j]
            if include_cycles and l >= s:
                r = l - s
                cc = comb[nb, r]
                if (l + s) % 2 == 1:
                    cc = -cc
                for i in range(s):
                    vi = verts[idx, i]
                    acc[l, vi, vi] += cc * P[i, i]
        for i in range(s):
            pos[verts[idx, i]] = -1


@njit(cache=True, inline="always")
def _two_sum(a, b):
    s = a + b
    bp = s - a
    return s, (a - (s - bp)) + (b - bp)


@njit(cache=True, inline="always")
def _split(a):
    c = 134217729.0 * a  # 2**27 + 1
    hi = c - (c - a)
    return hi, a - hi


@njit(cache=True, inline="always")
def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


@njit(cache=True, inline="always")
def _add_dd(acc, comp, l, u, v, c, hi, lo):
    # acc/comp += c * (hi + lo), c a small exact integer
    p, pe = _two_prod(c, hi)
    s, se = _two_sum(acc[l, u, v], p)
    acc[l, u, v] = s
    comp[l, u, v] += se + pe + c * lo


@njit(cache=True)
def accumulate_float(verts, sizes, boundary, indptr, indices, weights, max_length, comb, include_cycles, fault, acc, comp):
    """Float64 version of :func:`accumulate` in double-double arithmetic.

    Walk sums and the alternating closed-form sum both span far more than 53
    bits before cancelling, so matrix powers are kept as ``hi + lo`` pairs and
    every rounding error of the accumulation goes to ``comp``; ``acc + comp``
    is the result.
    """
    n = weights.shape[0]
    K = verts.shape[1]
    L = max_length
    pos = np.full(n, -1, dtype=np.int32)
    A = np.zeros((K, K), dtype=np.float64)
    P = np.zeros((K, K), dtype=np.float64)
    Pl = np.zeros((K, K), dtype=np.float64)
    Q = np.zeros((K, K), dtype=np.float64)
    Ql = np.zeros((K, K), dtype=np.float64)
    for idx in range(verts.shape[0]):
        s = sizes[idx]
        if s < 2:
            continue
        nb = boundary[idx]
        for i in range(s):
            pos[verts[idx, i]] = i
        for i in range(s):
            for j in range(s):
                A[i, j] = 0.0
        for i in range(s):
            v = verts[idx, i]
            wv = weights[v]
            for p in range(indptr[v], indptr[v + 1]):
                j = pos[indices[p]]
                if j >= 0:
                    A[i, j] = wv
        for i in range(s):
            for j in range(s):
                P[i, j] = A[i, j]
                Pl[i, j] = 0.0
        for l in range(1, L + 1):
            if l > 1:
                for i in range(s):
                    for j in range(s):
                        hi = 0.0
                        lo = 0.0
                        for q in range(s):
                            a = A[q, j]
                            if a == 0.0:
                                continue
                            t, te = _two_prod(P[i, q], a)
                            hi, he = _two_sum(hi, t)
                            lo += he + te + Pl[i, q] * a
                        hi, lo = _two_sum(hi, lo)
                        Q[i, j] = hi
                        Ql[i, j] = lo
                for i in range(s):
                    for j in range(s):
                        P[i, j] = Q[i, j]
                        Pl[i, j] = Ql[i, j]
            if l + 1 < s:
                continue
            cp = comb[nb, l + 1 - s]
            if (l + 1 + s) % 2 == 1:
                cp = -cp
            if s == 2:
                cp += fault
            for i in range(s):
                vi = verts[idx, i]
                for j in range(s):
                    if i != j and P[i, j] != 0.0:
                        _add_dd(acc, comp, l, vi, verts[idx, j], cp, P[i, j], Pl[i, j])
            if include_cycles and l >= s:
                cc = comb[nb, l - s]
                if (l + s) % 2 == 1:
                    cc = -cc
                for i in range(s):
                    if P[i, i] != 0.0:
                        vi = verts[idx, i]
                        _add_dd(acc, comp, l, vi, vi, cc, P[i, i], Pl[i, i])
        for i in range(s):
            pos[verts[idx, i]] = -1
