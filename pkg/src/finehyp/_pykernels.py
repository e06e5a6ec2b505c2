"""Reference implementations of the hot kernels (numpy / pure Python).

Every function here has a twin with the same signature and semantics in
``_ckernels.pyx``.  The compiled twin is preferred at import time; this
module is the fallback and the oracle the compiled code is tested against.
"""
from collections import deque

import numpy as np

INF = 1 << 30
NAME = "python"


def bfs_from(indptr, indices, source, banned=-1):
    """Single-source BFS; ``banned`` is a vertex treated as deleted (-1: none).

    Unreachable vertices (and the banned one) get -1.
    """
    n = len(indptr) - 1
    dist = np.full(n, -1, dtype=np.int32)
    if source == banned:
        return dist
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        du = dist[u] + 1
        for w in indices[indptr[u]:indptr[u + 1]]:
            if w != banned and dist[w] < 0:
                dist[w] = du
                queue.append(w)
    return dist


def bfs_all_pairs(indptr, indices):
    n = len(indptr) - 1
    out = np.empty((n, n), dtype=np.int32)
    for s in range(n):
        out[s] = bfs_from(indptr, indices, s)
    return out


def interval_delta(D):
    """Interval-thinness constant of a finite metric given by ``D``.

    Returns ``(delta, x, y, z, m)`` where the witness has ``m`` in I(x, y)
    at distance ``delta`` from I(x, z) | I(y, z).
    """
    D = np.asarray(D, dtype=np.int64)
    n = D.shape[0]
    best = 0
    witness = (0, 0, 0, 0)
    for x in range(n):
        for y in range(x + 1, n):
            dxy = D[x, y]
            Ixy = np.flatnonzero(D[x] + D[y] == dxy)
            # W[z, w]: w lies in I(x, z) or in I(y, z)
            W = (D[x][None, :] + D == D[x][:, None]) | (D[y][None, :] + D == D[y][:, None])
            for m in Ixy:
                if m == x or m == y:
                    continue
                gaps = np.where(W, D[m][None, :], INF).min(axis=1)
                z = int(np.argmax(gaps))
                if gaps[z] > best:
                    best = int(gaps[z])
                    witness = (x, y, z, int(m))
    return (best,) + witness


def angle_table(indptr, indices):
    """Pairwise neighbour distances in X minus v, for every vertex v.

    Layout: ``data[off[v] + i * deg(v) + j]`` with ``off`` the running sum of
    squared degrees; unreachable pairs hold ``INF``.
    """
    n = len(indptr) - 1
    deg = np.diff(indptr)
    off = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(deg.astype(np.int64) ** 2, out=off[1:])
    data = np.empty(off[-1], dtype=np.int32)
    for v in range(n):
        nb = indices[indptr[v]:indptr[v + 1]]
        k = len(nb)
        for i in range(k):
            dist = bfs_from(indptr, indices, nb[i], banned=v)
            row = dist[nb]
            data[off[v] + i * k: off[v] + (i + 1) * k] = np.where(row < 0, INF, row)
    return off, data


def count_cycle_paths(indptr, indices, D, u, v, maxlen, budget):
    """Count simple u-v paths of length 2..maxlen that avoid the edge {u, v}.

    Each such path closes, with the edge, a unique simple cycle through the
    edge.  Returns ``(count, nodes_expanded)``; count is -1 when the DFS
    needed more than ``budget`` node expansions.
    """
    n = len(indptr) - 1
    on_path = np.zeros(n, dtype=bool)
    on_path[u] = True
    count = 0
    used = 0
    # explicit stack of (vertex, depth, neighbour cursor)
    stack = [[u, 0, indptr[u]]]
    while stack:
        frame = stack[-1]
        x, depth, cur = frame
        if cur >= indptr[x + 1]:
            on_path[x] = False
            stack.pop()
            continue
        frame[2] = cur + 1
        w = indices[cur]
        if on_path[w]:
            continue
        if w == v:
            if depth + 1 >= 2:
                count += 1
            continue
        if depth + 1 + D[w, v] > maxlen:
            continue
        used += 1
        if used > budget:
            return -1, used
        on_path[w] = True
        stack.append([w, depth + 1, indptr[w]])
    on_path[u] = False
    return count, used


def next_hop(indptr, indices, D):
    """``NH[x, y]``: smallest-id neighbour of x one step closer to y (-1 on
    the diagonal)."""
    D = np.asarray(D)
    n = D.shape[0]
    NH = np.full((n, n), -1, dtype=np.int32)
    for x in range(n):
        nb = np.asarray(indices[indptr[x]:indptr[x + 1]])
        if len(nb) == 0:
            continue
        closer = D[nb, :] == D[x][None, :] - 1  # deg x n
        first = np.argmax(closer, axis=0)
        ok = closer[first, np.arange(n)]
        NH[x, ok] = nb[first[ok]]
    return NH


def _steps(indptr, indices, D, v):
    """deg(v) x n mask: neighbour i of v is one step closer to column vertex."""
    nb = np.asarray(indices[indptr[v]:indptr[v + 1]])
    return D[nb, :] == D[v][None, :] - 1


def chain_table(indptr, indices, D, off, data, theta):
    """``CH[a, b, l]``: the vertex at distance l from a that lies on every
    geodesic a-b and at which the angle between a and b exceeds theta, or -1.

    Level 0 (a itself) is always -1; level d(a, b) holds b.
    """
    D = np.asarray(D, dtype=np.int64)
    n = D.shape[0]
    diam = int(D.max()) if n else 0
    CH = np.full((n, n, diam + 1), -1, dtype=np.int32)
    steps = [_steps(indptr, indices, D, v) for v in range(n)]
    big = []
    for v in range(n):
        k = indptr[v + 1] - indptr[v]
        big.append(np.asarray(data[off[v]:off[v] + k * k]).reshape(k, k) > theta)
    for a in range(n):
        inter = D[a][None, :] + D == D[a][:, None]  # [b, v]: v in I(a, b)
        lev = np.broadcast_to(D[a][None, :], inter.shape)
        counts = np.zeros((n, diam + 1), dtype=np.int64)
        for l in range(diam + 1):
            counts[:, l] = np.count_nonzero(inter & (lev == l), axis=1)
        uniq = inter & (np.take_along_axis(counts, lev, axis=1) == 1)
        uniq[:, a] = False
        for v in np.flatnonzero(uniq.any(axis=0)):
            bs = np.flatnonzero(uniq[:, v])
            toward_a = steps[v][:, a]
            sel = big[v][toward_a].any(axis=0)  # neighbour j forms a big angle
            good = (steps[v][:, bs] & sel[:, None]).any(axis=0)
            good |= bs == v
            CH[a, bs[good], D[a, v]] = v
    return CH


def _tilde(CH, D, a, b, c):
    l = min(D[a, b], D[a, c])
    while l > 0:
        v = CH[a, b, l]
        if v >= 0 and v == CH[a, c, l]:
            return v
        l -= 1
    return a


def _geo(NH, x, y):
    out = [x]
    while x != y:
        x = int(NH[x, y])
        out.append(x)
    return out


def _join(*parts):
    out = list(parts[0])
    for p in parts[1:]:
        out.extend(p[1:])
    return out


def _angle(indptr, indices, off, data, v, u, w):
    nb = indices[indptr[v]:indptr[v + 1]]
    k = len(nb)
    i = int(np.searchsorted(nb, u))
    j = int(np.searchsorted(nb, w))
    return int(data[off[v] + i * k + j])


def triangle_sweep(indptr, indices, D, NH, CH, off, data, theta_mid, ordered):
    """Build the normal triangle of every triple and check it.

    Triples are all (a, b, c) with a <= b <= c, or every ordered triple when
    ``ordered``.  Returns ``(count, fails, max_qc, fail_witness, qc_witness)``
    with ``fails`` = [sides not geodesic, prefix at a, prefix at b, prefix at
    c, middle angle].
    """
    D = np.asarray(D)
    n = D.shape[0]
    fails = [0, 0, 0, 0, 0]
    count = 0
    max_qc = -1
    fail_w = (-1, -1, -1)
    qc_w = (-1, -1, -1)
    for a in range(n):
        for b in range(0 if ordered else a, n):
            for c in range(0 if ordered else b, n):
                count += 1
                ta = _tilde(CH, D, a, b, c)
                tb = _tilde(CH, D, b, a, c)
                tc = _tilde(CH, D, c, a, b)
                head = _geo(NH, a, ta)
                tail_b = _geo(NH, tb, b)
                tail_c = _geo(NH, tc, c)
                ab = _join(head, _geo(NH, ta, tb), tail_b)
                ac = _join(head, _geo(NH, ta, tc), tail_c)
                bc = _join(tail_b[::-1], _geo(NH, tb, tc), tail_c)
                bad = False
                if (len(ab) - 1 != D[a, b] or len(ac) - 1 != D[a, c]
                        or len(bc) - 1 != D[b, c]):
                    fails[0] += 1
                    bad = True
                else:
                    ka, kb, kc = D[a, ta], D[b, tb], D[c, tc]
                    if ab[:ka + 1] != ac[:ka + 1] or ab[ka] != ta:
                        fails[1] += 1
                        bad = True
                    rab = ab[::-1]
                    if rab[:kb + 1] != bc[:kb + 1] or bc[kb] != tb:
                        fails[2] += 1
                        bad = True
                    rac, rbc = ac[::-1], bc[::-1]
                    if rac[:kc + 1] != rbc[:kc + 1] or rac[kc] != tc:
                        fails[3] += 1
                        bad = True
                    mid = False
                    for side, s, e in ((ab, ta, tb), (ac, ta, tc), (bc, tb, tc)):
                        i0, i1 = D[side[0], s], D[side[0], e]
                        for i in range(i0 + 1, i1):
                            if _angle(indptr, indices, off, data, side[i], side[i - 1], side[i + 1]) > theta_mid:
                                mid = True
                    if mid:
                        fails[4] += 1
                        bad = True
                    px = (D[a, b] + D[a, c] - D[b, c]) // 2
                    py = (D[a, b] + D[b, c] - D[a, c]) // 2
                    u, v, w = ac[px], bc[py], ab[px]
                    qc = int(np.maximum(np.maximum(D[u], D[v]), D[w]).min())
                    if qc > max_qc:
                        max_qc = qc
                        qc_w = (a, b, c)
                if bad and fail_w[0] < 0:
                    fail_w = (a, b, c)
    return count, fails, max_qc, fail_w, qc_w


def angle_forcing_sweep(indptr, indices, D, off, data, theta):
    """For every c and every pair a < b (both != c) with a big angle at c,
    test d(a, b) in the graph minus c against d(a, b).

    Returns ``(pairs_with_big_angle, counterexamples, witness (a, b, c))``.
    """
    D = np.asarray(D, dtype=np.int64)
    n = D.shape[0]
    checked = 0
    bad = 0
    witness = (-1, -1, -1)
    for c in range(n):
        k = indptr[c + 1] - indptr[c]
        if k < 2:
            continue
        big = (np.asarray(data[off[c]:off[c] + k * k]).reshape(k, k) > theta).astype(np.int64)
        st = _steps(indptr, indices, D, c).T.astype(np.int64)  # n x deg
        gt = (st @ big @ st.T) > 0
        gt[c, :] = False
        gt[:, c] = False
        gt = np.triu(gt, 1)
        pairs = np.argwhere(gt)
        if len(pairs) == 0:
            continue
        checked += len(pairs)
        Dc = np.empty((n, n), dtype=np.int64)
        for a in np.unique(pairs[:, 0]):
            Dc[a] = bfs_from(indptr, indices, int(a), banned=c)
        da = Dc[pairs[:, 0], pairs[:, 1]]
        fail = (da >= 0) & (da <= D[pairs[:, 0], pairs[:, 1]])
        if fail.any():
            bad += int(fail.sum())
            if witness[0] < 0:
                a, b = pairs[np.flatnonzero(fail)[0]]
                witness = (int(a), int(b), c)
    return checked, bad, witness
