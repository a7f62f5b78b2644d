"""Numba-compiled inner loops.

Every routine works on adjacency rows stored as ``int64`` bitmasks (bit
``u`` of ``rows[v]`` set iff ``uv`` is an edge) plus an ``alive`` mask of
surviving vertices. Rows passed in must already be restricted to ``alive``.
Everything stays in ``int64``; mixing in ``uint64`` makes numba promote to
float.
"""

from __future__ import annotations

import warnings

import numpy as np
from numba import njit, prange

# numba falls back to its own thread pool when the installed TBB is too old
warnings.filterwarnings("ignore", message="The TBB threading layer requires")

_DEBRUIJN = 0x03F79D71B4CB0A89


def _debruijn_table() -> np.ndarray:
    table = np.zeros(64, dtype=np.int64)
    for i in range(64):
        table[(((1 << i) * _DEBRUIJN) & 0xFFFFFFFFFFFFFFFF) >> 58] = i
    return table


_CTZ = _debruijn_table()
_DEB = np.int64(np.uint64(_DEBRUIJN).view(np.int64))

PRECLUSIVE = 1
BASIC = 2
TRIVIAL = 4
VIOLATION = 8


@njit(cache=True)
def ctz(low):
    """Index of the single set bit in ``low`` (callers pass ``x & -x``)."""
    return _CTZ[((low * _DEB) >> 58) & 63]


@njit(cache=True)
def popcount(x):
    c = 0
    while x:
        x &= x - 1
        c += 1
    return c


# ---------------------------------------------------------------------------
# Bipartite double cover: perfect matching between left copies and right
# copies, where left v may take right u iff uv is an edge.
# ---------------------------------------------------------------------------


@njit(cache=True)
def cover_perfect_matching(rows, alive, mate, mate_r, sv, sc, sr):
    """Kuhn augmenting paths with bitmask DFS; fills ``mate`` (left -> right).

    Returns False as soon as some left copy cannot be augmented: that copy
    stays exposed in every maximum matching.
    """
    n = rows.shape[0]
    for i in range(n):
        mate[i] = -1
        mate_r[i] = -1
    free_r = alive
    rest = alive
    while rest:
        lb = rest & -rest
        rest ^= lb
        v = ctz(lb)
        c = rows[v] & free_r
        if c:
            cb = c & -c
            u = ctz(cb)
            mate[v] = u
            mate_r[u] = v
            free_r ^= cb
    rest = alive
    while rest:
        lb = rest & -rest
        rest ^= lb
        v = ctz(lb)
        if mate[v] >= 0:
            continue
        visited = np.int64(0)
        depth = 0
        sv[0] = v
        sc[0] = rows[v]
        found = False
        while depth >= 0:
            c = sc[depth] & ~visited
            if c == 0:
                depth -= 1
                continue
            cb = c & -c
            u = ctz(cb)
            sc[depth] = c ^ cb
            visited |= cb
            sr[depth] = u
            w = mate_r[u]
            if w < 0:
                for d in range(depth, -1, -1):
                    x = sv[d]
                    y = sr[d]
                    mate[x] = y
                    mate_r[y] = x
                found = True
                break
            depth += 1
            sv[depth] = w
            sc[depth] = rows[w]
        if not found:
            return False
    return True


@njit(cache=True)
def has_cover_pm(rows, alive):
    n = rows.shape[0]
    mate = np.empty(n, np.int64)
    mate_r = np.empty(n, np.int64)
    sv = np.empty(n + 1, np.int64)
    sc = np.empty(n + 1, np.int64)
    sr = np.empty(n + 1, np.int64)
    ok = cover_perfect_matching(rows, alive, mate, mate_r, sv, sc, sr)
    return ok, mate


@njit(cache=True)
def cover_max_matching(rows, alive):
    """Maximum matching of the double cover (no early exit); returns (size, mate)."""
    n = rows.shape[0]
    mate = np.full(n, -1, np.int64)
    mate_r = np.full(n, -1, np.int64)
    sv = np.empty(n + 1, np.int64)
    sc = np.empty(n + 1, np.int64)
    sr = np.empty(n + 1, np.int64)
    size = 0
    rest = alive
    while rest:
        lb = rest & -rest
        rest ^= lb
        v = ctz(lb)
        visited = np.int64(0)
        depth = 0
        sv[0] = v
        sc[0] = rows[v]
        while depth >= 0:
            c = sc[depth] & ~visited
            if c == 0:
                depth -= 1
                continue
            cb = c & -c
            u = ctz(cb)
            sc[depth] = c ^ cb
            visited |= cb
            sr[depth] = u
            w = mate_r[u]
            if w < 0:
                for d in range(depth, -1, -1):
                    x = sv[d]
                    y = sr[d]
                    mate[x] = y
                    mate_r[y] = x
                size += 1
                break
            depth += 1
            sv[depth] = w
            sc[depth] = rows[w]
    return size, mate


# ---------------------------------------------------------------------------
# Edmonds' blossom algorithm for general graphs.
# ---------------------------------------------------------------------------


@njit(cache=True)
def _lca(a, b, match, base, p, mark):
    n = match.shape[0]
    for i in range(n):
        mark[i] = 0
    while True:
        a = base[a]
        mark[a] = 1
        if match[a] == -1:
            break
        a = p[match[a]]
    while True:
        b = base[b]
        if mark[b]:
            return b
        b = p[match[b]]


@njit(cache=True)
def _mark_path(v, b, child, match, base, p, blossom):
    while base[v] != b:
        blossom[base[v]] = 1
        blossom[base[match[v]]] = 1
        p[v] = child
        child = match[v]
        v = p[match[v]]


@njit(cache=True)
def _find_path(root, rows, alive, match, p, base, used, blossom, mark, q):
    n = rows.shape[0]
    for i in range(n):
        used[i] = 0
        p[i] = -1
        base[i] = i
    used[root] = 1
    qh = 0
    qt = 1
    q[0] = root
    while qh < qt:
        v = q[qh]
        qh += 1
        nb = rows[v]
        while nb:
            lb = nb & -nb
            nb ^= lb
            to = ctz(lb)
            if base[v] == base[to] or match[v] == to:
                continue
            if to == root or (match[to] != -1 and p[match[to]] != -1):
                cb = _lca(v, to, match, base, p, mark)
                for i in range(n):
                    blossom[i] = 0
                _mark_path(v, cb, to, match, base, p, blossom)
                _mark_path(to, cb, v, match, base, p, blossom)
                for i in range(n):
                    if (alive >> i) & 1 and blossom[base[i]]:
                        base[i] = cb
                        if not used[i]:
                            used[i] = 1
                            q[qt] = i
                            qt += 1
            elif p[to] == -1:
                p[to] = v
                if match[to] == -1:
                    return to
                nxt = match[to]
                used[nxt] = 1
                q[qt] = nxt
                qt += 1
    return -1


@njit(cache=True)
def blossom_matching(rows, alive, match, max_exposed):
    """Grow ``match`` to a maximum matching of the graph on ``alive``.

    Stops early once more than ``max_exposed`` roots fail to augment (pass
    a negative value to never stop). Returns the number of exposed roots
    seen, which equals the deficiency when the run is not cut short.
    """
    n = rows.shape[0]
    p = np.empty(n, np.int64)
    base = np.empty(n, np.int64)
    used = np.empty(n, np.int64)
    blossom = np.empty(n, np.int64)
    mark = np.empty(n, np.int64)
    q = np.empty(2 * n + 2, np.int64)
    for i in range(n):
        match[i] = -1
    free = alive
    rest = alive
    while rest:
        lb = rest & -rest
        rest ^= lb
        v = ctz(lb)
        if match[v] != -1:
            continue
        c = rows[v] & free & ~lb
        if c:
            cb = c & -c
            u = ctz(cb)
            match[v] = u
            match[u] = v
            free &= ~(cb | lb)
    exposed = 0
    rest = alive
    while rest:
        lb = rest & -rest
        rest ^= lb
        v = ctz(lb)
        if match[v] != -1:
            continue
        t = _find_path(v, rows, alive, match, p, base, used, blossom, mark, q)
        if t == -1:
            exposed += 1
            if max_exposed >= 0 and exposed > max_exposed:
                return exposed
            continue
        while t != -1:
            pv = p[t]
            ppv = match[pv]
            match[t] = pv
            match[pv] = t
            t = ppv
    return exposed


@njit(cache=True)
def max_matching(rows, alive):
    n = rows.shape[0]
    match = np.empty(n, np.int64)
    blossom_matching(rows, alive, match, -1)
    return match


# ---------------------------------------------------------------------------
# Subset-enumeration oracles. These share nothing with the matching code.
# ---------------------------------------------------------------------------


@njit(cache=True)
def scheinerman_violation(rows, alive):
    """First ``S`` (as a mask) with more isolated vertices in ``G - S`` than ``|S|``.

    Returns ``(True, 0)`` when no such set exists.
    """
    sub = alive
    while True:
        rem = alive & ~sub
        budget = popcount(sub)
        cnt = 0
        r = rem
        while r:
            lb = r & -r
            r ^= lb
            if rows[ctz(lb)] & rem == 0:
                cnt += 1
                if cnt > budget:
                    return False, sub
        if sub == 0:
            break
        sub = (sub - 1) & alive
    return True, np.int64(0)


@njit(cache=True)
def tutte_violation(rows, alive):
    """First ``S`` with more odd components in ``G - S`` than ``|S|``; ``(True, 0)`` if none."""
    sub = alive
    while True:
        rem = alive & ~sub
        budget = popcount(sub)
        odd = 0
        r = rem
        while r:
            lb = r & -r
            comp = lb
            frontier = lb
            while frontier:
                nb = np.int64(0)
                f = frontier
                while f:
                    fb = f & -f
                    f ^= fb
                    nb |= rows[ctz(fb)]
                nb &= rem & ~comp
                comp |= nb
                frontier = nb
            r &= ~comp
            if popcount(comp) & 1:
                odd += 1
                if odd > budget:
                    return False, sub
        if sub == 0:
            break
        sub = (sub - 1) & alive
    return True, np.int64(0)


# ---------------------------------------------------------------------------
# Fault-set evaluation.
# ---------------------------------------------------------------------------


@njit(cache=True)
def _evaluate(rows, alive, nalive, nv, basic, fractional, host_even,
              mate, mate_r, sv, sc, sr, match):
    if fractional:
        if basic:
            pre = True
        else:
            pre = not cover_perfect_matching(rows, alive, mate, mate_r, sv, sc, sr)
    else:
        if nalive == 0:
            pre = False
        elif basic and nalive % 2 == 0:
            pre = True
        else:
            pre = blossom_matching(rows, alive, match, nalive % 2) > nalive % 2
    trivial = basic and host_even and nv % 2 == 0
    flag = 0
    if pre:
        flag |= PRECLUSIVE
        if fractional:
            if not basic:
                flag |= VIOLATION
        elif not trivial:
            flag |= VIOLATION
    if basic:
        flag |= BASIC
    if trivial:
        flag |= TRIVIAL
    return flag


@njit(cache=True)
def _block_setup(rows0, alive0, vmask, rows_b):
    n = rows0.shape[0]
    alive = alive0 & ~vmask
    iso = False
    for v in range(n):
        if (alive >> v) & 1:
            rows_b[v] = rows0[v] & alive
            if rows_b[v] == 0:
                iso = True
        else:
            rows_b[v] = 0
    return alive, iso


@njit(cache=True)
def unrank_combination(r, t, p, binom, comb):
    x = 0
    for i in range(t):
        while True:
            cnt = binom[p - x - 1, t - i - 1]
            if r < cnt:
                break
            r -= cnt
            x += 1
        comb[i] = x
        x += 1


@njit(cache=True)
def next_combination(comb, t, p):
    i = t - 1
    while i >= 0 and comb[i] == p - t + i:
        i -= 1
    if i < 0:
        return False
    comb[i] += 1
    for j in range(i + 1, t):
        comb[j] = comb[j - 1] + 1
    return True


@njit(cache=True)
def _run_range(start, stop, out, out_base, rows0, alive0, eu, ev,
               blk_vmask, blk_nv, blk_offset, blk_pool_start, blk_pool_len,
               pool_idx, k, binom, fractional, host_even):
    n = rows0.shape[0]
    rows = np.empty(n, np.int64)
    rows_b = np.empty(n, np.int64)
    mate = np.empty(n, np.int64)
    mate_r = np.empty(n, np.int64)
    match = np.empty(n, np.int64)
    sv = np.empty(n + 1, np.int64)
    sc = np.empty(n + 1, np.int64)
    sr = np.empty(n + 1, np.int64)
    comb = np.empty(k + 1, np.int64)
    one = np.int64(1)

    b = np.searchsorted(blk_offset, start, side="right") - 1
    alive, iso = _block_setup(rows0, alive0, blk_vmask[b], rows_b)
    nalive = popcount(alive)
    nv = blk_nv[b]
    t = k - nv
    ps = blk_pool_start[b]
    p = blk_pool_len[b]
    unrank_combination(start - blk_offset[b], t, p, binom, comb)
    for v in range(n):
        rows[v] = rows_b[v]

    idx = start
    while idx < stop:
        for j in range(t):
            e = pool_idx[ps + comb[j]]
            u = eu[e]
            w = ev[e]
            rows[u] &= ~(one << w)
            rows[w] &= ~(one << u)
        basic = iso
        if not basic:
            for j in range(t):
                e = pool_idx[ps + comb[j]]
                u = eu[e]
                w = ev[e]
                if ((alive >> u) & 1 and rows[u] == 0) or ((alive >> w) & 1 and rows[w] == 0):
                    basic = True
                    break
        out[out_base + idx - start] = _evaluate(
            rows, alive, nalive, nv, basic, fractional, host_even,
            mate, mate_r, sv, sc, sr, match)
        for j in range(t):
            e = pool_idx[ps + comb[j]]
            rows[eu[e]] = rows_b[eu[e]]
            rows[ev[e]] = rows_b[ev[e]]
        idx += 1
        if idx >= stop:
            break
        if not next_combination(comb, t, p):
            b += 1
            alive, iso = _block_setup(rows0, alive0, blk_vmask[b], rows_b)
            nalive = popcount(alive)
            nv = blk_nv[b]
            t = k - nv
            ps = blk_pool_start[b]
            p = blk_pool_len[b]
            for j in range(t):
                comb[j] = j
            for v in range(n):
                rows[v] = rows_b[v]


@njit(cache=True, parallel=True)
def run_chunks(first_chunk, nchunks, chunk_size, total, out, rows0, alive0, eu, ev,
               blk_vmask, blk_nv, blk_offset, blk_pool_start, blk_pool_len,
               pool_idx, k, binom, fractional, host_even):
    """Classify chunks ``first_chunk .. first_chunk + nchunks - 1`` of the stream.

    Chunk ``c`` is the global index range ``[c * chunk_size, (c + 1) * chunk_size)``
    clipped to ``total``; its flags land at ``out[(c - first_chunk) * chunk_size:]``.
    """
    for ci in prange(nchunks):
        start = (first_chunk + ci) * chunk_size
        stop = min(start + chunk_size, total)
        if start < stop:
            _run_range(start, stop, out, ci * chunk_size, rows0, alive0, eu, ev,
                       blk_vmask, blk_nv, blk_offset, blk_pool_start, blk_pool_len,
                       pool_idx, k, binom, fractional, host_even)


@njit(cache=True)
def _classify_slice(lo, hi, out, rows0, alive0, eu, ev, vmasks, nvs, edge_sets,
                    fractional, host_even):
    n = rows0.shape[0]
    rows = np.empty(n, np.int64)
    mate = np.empty(n, np.int64)
    mate_r = np.empty(n, np.int64)
    match = np.empty(n, np.int64)
    sv = np.empty(n + 1, np.int64)
    sc = np.empty(n + 1, np.int64)
    sr = np.empty(n + 1, np.int64)
    one = np.int64(1)
    width = edge_sets.shape[1]
    for s in range(lo, hi):
        alive, iso = _block_setup(rows0, alive0, vmasks[s], rows)
        for j in range(width):
            e = edge_sets[s, j]
            if e < 0:
                break
            u = eu[e]
            w = ev[e]
            rows[u] &= ~(one << w)
            rows[w] &= ~(one << u)
        basic = False
        r = alive
        while r:
            lb = r & -r
            r ^= lb
            if rows[ctz(lb)] == 0:
                basic = True
                break
        out[s] = _evaluate(rows, alive, popcount(alive), nvs[s], basic, fractional,
                           host_even, mate, mate_r, sv, sc, sr, match)


@njit(cache=True, parallel=True)
def classify_many(out, rows0, alive0, eu, ev, vmasks, nvs, edge_sets, fractional, host_even):
    """Classify explicit fault sets; ``edge_sets`` rows are edge indices padded with -1."""
    total = vmasks.shape[0]
    seg = 4096
    nseg = (total + seg - 1) // seg
    for si in prange(nseg):
        lo = si * seg
        hi = min(lo + seg, total)
        _classify_slice(lo, hi, out, rows0, alive0, eu, ev, vmasks, nvs, edge_sets,
                        fractional, host_even)
