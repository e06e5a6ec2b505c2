# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the kernels in ``_pykernels``.

Same signatures, same return conventions; see the Python module for the
contracts.
"""
import numpy as np
cimport numpy as cnp

cnp.import_array()

DEF CINF = 1073741824

INF = CINF
NAME = "cython"


cdef void _bfs(const long[:] indptr, const int[:] indices, int source,
               int banned, int[:] dist, int[:] queue) noexcept nogil:
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t i, head = 0, tail = 0
    cdef int u, w, du
    for i in range(n):
        dist[i] = -1
    if source == banned:
        return
    dist[source] = 0
    queue[tail] = source
    tail += 1
    while head < tail:
        u = queue[head]
        head += 1
        du = dist[u] + 1
        for i in range(indptr[u], indptr[u + 1]):
            w = indices[i]
            if w != banned and dist[w] < 0:
                dist[w] = du
                queue[tail] = w
                tail += 1


def _csr(indptr, indices):
    return (np.ascontiguousarray(indptr, dtype=np.int_),
            np.ascontiguousarray(indices, dtype=np.intc))


def bfs_from(indptr, indices, source, banned=-1):
    ip, ix = _csr(indptr, indices)
    n = ip.shape[0] - 1
    dist = np.empty(n, dtype=np.intc)
    queue = np.empty(max(n, 1), dtype=np.intc)
    _bfs(ip, ix, source, banned, dist, queue)
    return dist.astype(np.int32, copy=False)


def bfs_all_pairs(indptr, indices):
    ip, ix = _csr(indptr, indices)
    cdef const long[:] cip = ip
    cdef const int[:] cix = ix
    cdef Py_ssize_t n = ip.shape[0] - 1
    out = np.empty((n, n), dtype=np.intc)
    cdef int[:, :] cout = out
    queue = np.empty(max(n, 1), dtype=np.intc)
    cdef int[:] cq = queue
    cdef Py_ssize_t s
    with nogil:
        for s in range(n):
            _bfs(cip, cix, <int>s, -1, cout[s], cq)
    return out.astype(np.int32, copy=False)


def interval_delta(D):
    Dc = np.ascontiguousarray(D, dtype=np.intc)
    cdef const int[:, :] d = Dc
    cdef Py_ssize_t n = Dc.shape[0]
    cdef int best = 0
    cdef int wx = 0, wy = 0, wz = 0, wm = 0
    cdef Py_ssize_t x, y, z, m, w, t, cnt
    cdef int dxy, dxz, dyz, mn, dmw
    buf = np.empty(max(n, 1), dtype=np.intc)
    cdef int[:] ixy = buf
    with nogil:
        for x in range(n):
            for y in range(x + 1, n):
                dxy = d[x, y]
                cnt = 0
                for m in range(n):
                    if m != x and m != y and d[x, m] + d[m, y] == dxy:
                        ixy[cnt] = <int>m
                        cnt += 1
                if cnt == 0:
                    continue
                for z in range(n):
                    dxz = d[x, z]
                    dyz = d[y, z]
                    for t in range(cnt):
                        m = ixy[t]
                        if d[x, m] + d[m, z] == dxz or d[y, m] + d[m, z] == dyz:
                            continue
                        mn = CINF
                        for w in range(n):
                            if d[x, w] + d[w, z] == dxz or d[y, w] + d[w, z] == dyz:
                                dmw = d[m, w]
                                if dmw < mn:
                                    mn = dmw
                                    if mn <= best:
                                        break
                        if mn > best:
                            best = mn
                            wx = <int>x
                            wy = <int>y
                            wz = <int>z
                            wm = <int>m
    return best, wx, wy, wz, wm


def angle_table(indptr, indices):
    ip, ix = _csr(indptr, indices)
    cdef const long[:] cip = ip
    cdef const int[:] cix = ix
    cdef Py_ssize_t n = ip.shape[0] - 1
    deg = np.diff(ip)
    off = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(deg.astype(np.int64) ** 2, out=off[1:])
    cdef const cnp.int64_t[:] coff = off
    data = np.empty(off[-1], dtype=np.intc)
    cdef int[:] cdata = data
    dist = np.empty(max(n, 1), dtype=np.intc)
    queue = np.empty(max(n, 1), dtype=np.intc)
    cdef int[:] cdist = dist
    cdef int[:] cq = queue
    cdef Py_ssize_t v, i, j, k, base
    cdef int dj
    with nogil:
        for v in range(n):
            k = cip[v + 1] - cip[v]
            base = coff[v]
            for i in range(k):
                _bfs(cip, cix, cix[cip[v] + i], <int>v, cdist, cq)
                for j in range(k):
                    dj = cdist[cix[cip[v] + j]]
                    cdata[base + i * k + j] = CINF if dj < 0 else dj
    return off, data.astype(np.int32, copy=False)


def count_cycle_paths(indptr, indices, D, int u, int v, int maxlen, long budget):
    ip, ix = _csr(indptr, indices)
    cdef const long[:] cip = ip
    cdef const int[:] cix = ix
    Dc = np.ascontiguousarray(D, dtype=np.intc)
    cdef const int[:, :] d = Dc
    cdef Py_ssize_t n = ip.shape[0] - 1
    on = np.zeros(max(n, 1), dtype=np.intc)
    cdef int[:] on_path = on
    sv = np.empty(maxlen + 2, dtype=np.intc)
    sc = np.empty(maxlen + 2, dtype=np.int_)
    cdef int[:] st_v = sv
    cdef long[:] st_c = sc
    cdef long count = 0, used = 0
    cdef int top = 0, x, w
    cdef long cur
    on_path[u] = 1
    st_v[0] = u
    st_c[0] = cip[u]
    with nogil:
        while top >= 0:
            x = st_v[top]
            cur = st_c[top]
            if cur >= cip[x + 1]:
                on_path[x] = 0
                top -= 1
                continue
            st_c[top] = cur + 1
            w = cix[cur]
            if on_path[w]:
                continue
            if w == v:
                if top + 1 >= 2:
                    count += 1
                continue
            if top + 1 + d[w, v] > maxlen:
                continue
            used += 1
            if used > budget:
                count = -1
                break
            on_path[w] = 1
            top += 1
            st_v[top] = w
            st_c[top] = cip[w]
    return count, used


def next_hop(indptr, indices, D):
    ip, ix = _csr(indptr, indices)
    cdef const long[:] cip = ip
    cdef const int[:] cix = ix
    Dc = np.ascontiguousarray(D, dtype=np.intc)
    cdef const int[:, :] d = Dc
    cdef Py_ssize_t n = Dc.shape[0]
    out = np.full((n, n), -1, dtype=np.intc)
    cdef int[:, :] nh = out
    cdef Py_ssize_t x, y, i
    cdef int w
    with nogil:
        for x in range(n):
            for y in range(n):
                if x == y:
                    continue
                for i in range(cip[x], cip[x + 1]):
                    w = cix[i]
                    if d[w, y] == d[x, y] - 1:
                        nh[x, y] = w
                        break
    return out.astype(np.int32, copy=False)


cdef inline bint _big_from(const long[:] cip, const int[:] cix, const int[:, :] d,
                           const cnp.int64_t[:] coff, const int[:] cdata,
                           int v, int a, int b, int theta) noexcept nogil:
    # some first edge toward a and some first edge toward b meet at angle > theta
    cdef Py_ssize_t k = cip[v + 1] - cip[v]
    cdef Py_ssize_t i, j
    cdef int wi, wj
    for i in range(k):
        wi = cix[cip[v] + i]
        if d[wi, a] != d[v, a] - 1:
            continue
        for j in range(k):
            wj = cix[cip[v] + j]
            if d[wj, b] != d[v, b] - 1:
                continue
            if cdata[coff[v] + i * k + j] > theta:
                return True
    return False


def chain_table(indptr, indices, D, off, data, int theta):
    ip, ix = _csr(indptr, indices)
    cdef const long[:] cip = ip
    cdef const int[:] cix = ix
    Dc = np.ascontiguousarray(D, dtype=np.intc)
    cdef const int[:, :] d = Dc
    offc = np.ascontiguousarray(off, dtype=np.int64)
    datc = np.ascontiguousarray(data, dtype=np.intc)
    cdef const cnp.int64_t[:] coff = offc
    cdef const int[:] cdata = datc
    cdef Py_ssize_t n = Dc.shape[0]
    cdef int diam = int(Dc.max()) if n else 0
    out = np.full((n, n, diam + 1), -1, dtype=np.intc)
    cdef int[:, :, :] ch = out
    cnt_buf = np.zeros(diam + 2, dtype=np.intc)
    who_buf = np.zeros(diam + 2, dtype=np.intc)
    cdef int[:] cnt = cnt_buf
    cdef int[:] who = who_buf
    cdef Py_ssize_t a, b, v
    cdef int l, dab
    with nogil:
        for a in range(n):
            for b in range(n):
                if a == b:
                    continue
                dab = d[a, b]
                for l in range(dab + 1):
                    cnt[l] = 0
                for v in range(n):
                    if d[a, v] + d[v, b] == dab:
                        cnt[d[a, v]] += 1
                        who[d[a, v]] = <int>v
                for l in range(1, dab + 1):
                    if cnt[l] != 1:
                        continue
                    v = who[l]
                    if v == b or _big_from(cip, cix, d, coff, cdata, <int>v, <int>a, <int>b, theta):
                        ch[a, b, l] = <int>v
    return out.astype(np.int32, copy=False)


cdef inline int _tilde(const int[:, :, :] ch, const int[:, :] d, int a, int b, int c) noexcept nogil:
    cdef int l = d[a, b]
    cdef int v
    if d[a, c] < l:
        l = d[a, c]
    while l > 0:
        v = ch[a, b, l]
        if v >= 0 and v == ch[a, c, l]:
            return v
        l -= 1
    return a


cdef inline int _geo(const int[:, :] nh, int x, int y, int[:] out, int pos) noexcept nogil:
    # write the geodesic x..y starting at out[pos]; return index of y
    out[pos] = x
    while x != y:
        x = nh[x, y]
        pos += 1
        out[pos] = x
    return pos


cdef inline int _angle(const long[:] cip, const int[:] cix, const cnp.int64_t[:] coff,
                       const int[:] cdata, int v, int u, int w) noexcept nogil:
    cdef Py_ssize_t k = cip[v + 1] - cip[v]
    cdef Py_ssize_t i = -1, j = -1, t
    for t in range(k):
        if cix[cip[v] + t] == u:
            i = t
        if cix[cip[v] + t] == w:
            j = t
    return cdata[coff[v] + i * k + j]


def triangle_sweep(indptr, indices, D, NH, CH, off, data, int theta_mid, bint ordered):
    ip, ix = _csr(indptr, indices)
    cdef const long[:] cip = ip
    cdef const int[:] cix = ix
    Dc = np.ascontiguousarray(D, dtype=np.intc)
    cdef const int[:, :] d = Dc
    NHc = np.ascontiguousarray(NH, dtype=np.intc)
    cdef const int[:, :] nh = NHc
    CHc = np.ascontiguousarray(CH, dtype=np.intc)
    cdef const int[:, :, :] ch = CHc
    offc = np.ascontiguousarray(off, dtype=np.int64)
    datc = np.ascontiguousarray(data, dtype=np.intc)
    cdef const cnp.int64_t[:] coff = offc
    cdef const int[:] cdata = datc
    cdef Py_ssize_t n = Dc.shape[0]
    cdef int diam = int(Dc.max()) if n else 0
    bufs = np.zeros((4, 3 * diam + 4), dtype=np.intc)
    cdef int[:] ab = bufs[0]
    cdef int[:] ac = bufs[1]
    cdef int[:] bc = bufs[2]
    cdef int[:] tmp = bufs[3]
    cdef long count = 0
    cdef long f_geo = 0, f_a = 0, f_b = 0, f_c = 0, f_mid = 0
    cdef int max_qc = -1
    cdef int fa = -1, fb = -1, fc = -1, qa = -1, qb = -1, qc_ = -1
    cdef int a, b, c, ta, tb, tc, la, lb, lc, ka, kb, kc, i, p, s, e, i0, i1, side
    cdef int px, py, u, v, w, t, m, best
    cdef bint bad, mid, ok
    with nogil:
        for a in range(n):
            for b in range(0 if ordered else a, n):
                for c in range(0 if ordered else b, n):
                    count += 1
                    ta = _tilde(ch, d, a, b, c)
                    tb = _tilde(ch, d, b, a, c)
                    tc = _tilde(ch, d, c, a, b)
                    # [a,b] = [a,ta] + [ta,tb] + [tb,b]
                    p = _geo(nh, a, ta, ab, 0)
                    p = _geo(nh, ta, tb, ab, p)
                    la = _geo(nh, tb, b, ab, p)
                    # [a,c] = [a,ta] + [ta,tc] + [tc,c]
                    p = _geo(nh, a, ta, ac, 0)
                    p = _geo(nh, ta, tc, ac, p)
                    lb = _geo(nh, tc, c, ac, p)
                    # [b,c] = reversed [tb,b] + [tb,tc] + [tc,c]
                    p = _geo(nh, tb, b, tmp, 0)
                    for i in range(p + 1):
                        bc[i] = tmp[p - i]
                    p = _geo(nh, tb, tc, bc, p)
                    lc = _geo(nh, tc, c, bc, p)
                    bad = False
                    if la != d[a, b] or lb != d[a, c] or lc != d[b, c]:
                        f_geo += 1
                        bad = True
                    else:
                        ka = d[a, ta]
                        kb = d[b, tb]
                        kc = d[c, tc]
                        ok = ab[ka] == ta
                        for i in range(ka + 1):
                            if ab[i] != ac[i]:
                                ok = False
                        if not ok:
                            f_a += 1
                            bad = True
                        ok = bc[kb] == tb
                        for i in range(kb + 1):
                            if ab[la - i] != bc[i]:
                                ok = False
                        if not ok:
                            f_b += 1
                            bad = True
                        ok = ac[lb - kc] == tc
                        for i in range(kc + 1):
                            if ac[lb - i] != bc[lc - i]:
                                ok = False
                        if not ok:
                            f_c += 1
                            bad = True
                        mid = False
                        for side in range(3):
                            if side == 0:
                                i0 = d[a, ta]
                                i1 = d[a, tb]
                            elif side == 1:
                                i0 = d[a, ta]
                                i1 = d[a, tc]
                            else:
                                i0 = d[b, tb]
                                i1 = d[b, tc]
                            for i in range(i0 + 1, i1):
                                if side == 0:
                                    m = _angle(cip, cix, coff, cdata, ab[i], ab[i - 1], ab[i + 1])
                                elif side == 1:
                                    m = _angle(cip, cix, coff, cdata, ac[i], ac[i - 1], ac[i + 1])
                                else:
                                    m = _angle(cip, cix, coff, cdata, bc[i], bc[i - 1], bc[i + 1])
                                if m > theta_mid:
                                    mid = True
                        if mid:
                            f_mid += 1
                            bad = True
                        px = (d[a, b] + d[a, c] - d[b, c]) // 2
                        py = (d[a, b] + d[b, c] - d[a, c]) // 2
                        u = ac[px]
                        v = bc[py]
                        w = ab[px]
                        best = CINF
                        for t in range(n):
                            m = d[u, t]
                            if d[v, t] > m:
                                m = d[v, t]
                            if d[w, t] > m:
                                m = d[w, t]
                            if m < best:
                                best = m
                        if best > max_qc:
                            max_qc = best
                            qa = a
                            qb = b
                            qc_ = c
                    if bad and fa < 0:
                        fa = a
                        fb = b
                        fc = c
    return count, [f_geo, f_a, f_b, f_c, f_mid], max_qc, (fa, fb, fc), (qa, qb, qc_)


def angle_forcing_sweep(indptr, indices, D, off, data, int theta):
    ip, ix = _csr(indptr, indices)
    cdef const long[:] cip = ip
    cdef const int[:] cix = ix
    Dc = np.ascontiguousarray(D, dtype=np.intc)
    cdef const int[:, :] d = Dc
    offc = np.ascontiguousarray(off, dtype=np.int64)
    datc = np.ascontiguousarray(data, dtype=np.intc)
    cdef const cnp.int64_t[:] coff = offc
    cdef const int[:] cdata = datc
    cdef Py_ssize_t n = Dc.shape[0]
    dist_b = np.empty(max(n, 1), dtype=np.intc)
    queue_b = np.empty(max(n, 1), dtype=np.intc)
    cdef int[:] dist = dist_b
    cdef int[:] q = queue_b
    cdef long checked = 0, bad = 0
    cdef int wa = -1, wb = -1, wc = -1
    cdef int a, b, c
    cdef bint bfs_done
    with nogil:
        for c in range(n):
            if cip[c + 1] - cip[c] < 2:
                continue
            for a in range(n):
                if a == c:
                    continue
                bfs_done = False
                for b in range(a + 1, n):
                    if b == c:
                        continue
                    if not _big_from(cip, cix, d, coff, cdata, c, a, b, theta):
                        continue
                    checked += 1
                    if not bfs_done:
                        _bfs(cip, cix, a, c, dist, q)
                        bfs_done = True
                    if dist[b] >= 0 and dist[b] <= d[a, b]:
                        bad += 1
                        if wa < 0:
                            wa = a
                            wb = b
                            wc = c
    return checked, bad, (wa, wb, wc)
