# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled decode kernel; same contract as ``cubeplan._pykernel.decode_kernel``."""

from libc.stdlib cimport malloc, free

cdef double EPS = 1e-9


cdef struct State:
    int n
    int z_con
    int *off
    double *cw
    double *ch
    int *cz
    int *sel
    double *px
    double *py
    int *pz
    double *sx
    double *sy
    int *sz
    int *placed
    int nplaced
    int *ulist[3]
    int ulen[3]


cdef inline double _pos(State *st, int axis, int q) nogil:
    if axis == 0:
        return st.px[q]
    elif axis == 1:
        return st.py[q]
    return <double>st.pz[q]


cdef inline double _size(State *st, int axis, int q) nogil:
    if axis == 0:
        return st.sx[q]
    elif axis == 1:
        return st.sy[q]
    return <double>st.sz[q]


cdef void _place(State *st, int b, int cand, int d, int c,
                 double *ox, double *oy, int *oz) nogil:
    cdef int *ul = st.ulist[d]
    cdef int k = st.ulen[d]
    cdef int first = ul[k - c]
    cdef int idx = st.off[b] + cand
    cdef double bs[3]
    cdef double corner[3]
    cdef int a1, a2, j, q
    cdef double best, e, lo1, hi1, lo2, hi2, p1, p2
    bs[0] = st.cw[idx]
    bs[1] = st.ch[idx]
    bs[2] = <double>st.cz[idx]
    corner[0] = st.px[first]
    corner[1] = st.py[first]
    corner[2] = <double>st.pz[first]
    if d == 0:
        a1 = 1; a2 = 2
    elif d == 1:
        a1 = 0; a2 = 2
    else:
        a1 = 0; a2 = 1
    best = 0.0
    for j in range(k - c, k):
        q = ul[j]
        e = _pos(st, d, q) + _size(st, d, q)
        if e > best:
            best = e
    lo1 = corner[a1]
    hi1 = corner[a1] + bs[a1]
    lo2 = corner[a2]
    hi2 = corner[a2] + bs[a2]
    for j in range(st.nplaced):
        q = st.placed[j]
        p1 = _pos(st, a1, q)
        p2 = _pos(st, a2, q)
        if (p1 < hi1 - EPS and lo1 < p1 + _size(st, a1, q) - EPS
                and p2 < hi2 - EPS and lo2 < p2 + _size(st, a2, q) - EPS):
            e = _pos(st, d, q) + _size(st, d, q)
            if e > best:
                best = e
    corner[d] = best
    ox[0] = corner[0]
    oy[0] = corner[1]
    oz[0] = <int>corner[2]


cdef void _commit(State *st, int b, int cand, int d, int c,
                  double x, double y, int z) nogil:
    cdef int idx = st.off[b] + cand
    cdef int a
    st.sel[b] = cand
    st.px[b] = x
    st.py[b] = y
    st.pz[b] = z
    st.sx[b] = st.cw[idx]
    st.sy[b] = st.ch[idx]
    st.sz[b] = st.cz[idx]
    st.placed[st.nplaced] = b
    st.nplaced += 1
    if c > 0:
        st.ulen[d] -= c
    for a in range(3):
        st.ulist[a][st.ulen[a]] = b
        st.ulen[a] += 1


cdef void _extent(State *st, double *ex, double *ey) nogil:
    cdef int j, q
    cdef double e
    ex[0] = 0.0
    ey[0] = 0.0
    for j in range(st.nplaced):
        q = st.placed[j]
        e = st.px[q] + st.sx[q]
        if e > ex[0]:
            ex[0] = e
        e = st.py[q] + st.sy[q]
        if e > ey[0]:
            ey[0] = e


cdef int _fix(State *st, int b, int *cand, int *d, int *c,
              double *x, double *y, int *z) nogil:
    """Returns 0 on success, -1 if repair cannot converge."""
    cdef int z_con = st.z_con
    cdef int base = st.off[b]
    cdef int ncand = st.off[b + 1] - base
    cdef int j, nd, nc, lowest, k, tz, best_d = -1, best_c = 0, best_z = 0
    cdef double tx, ty, ex, ey, w, h, area, best_area = 0.0, best_x = 0.0, best_y = 0.0

    if z[0] < z_con:
        for j in range(ncand):
            _place(st, b, j, d[0], c[0], &tx, &ty, &tz)
            if tz + st.cz[base + j] <= z_con:
                cand[0] = j
                x[0] = tx; y[0] = ty; z[0] = tz
                return 0
        lowest = 0
        for j in range(1, ncand):
            if st.cz[base + j] < st.cz[base + lowest]:
                lowest = j
        cand[0] = lowest
        _place(st, b, lowest, d[0], c[0], x, y, z)
        if z[0] + st.cz[base + lowest] <= z_con:
            return 0

    if d[0] == 2:
        _extent(st, &ex, &ey)
        w = st.cw[base + cand[0]]
        h = st.ch[base + cand[0]]
        for nd in range(2):
            nc = c[0]
            if nc > st.ulen[nd]:
                nc = st.ulen[nd]
            _place(st, b, cand[0], nd, nc, &tx, &ty, &tz)
            area = (ex if ex > tx + w else tx + w) * (ey if ey > ty + h else ty + h)
            if best_d < 0 or area < best_area:
                best_area = area
                best_d = nd; best_c = nc
                best_x = tx; best_y = ty; best_z = tz
        d[0] = best_d; c[0] = best_c
        x[0] = best_x; y[0] = best_y; z[0] = best_z

    k = st.ulen[d[0]]
    while z[0] + st.cz[base + cand[0]] > z_con:
        if c[0] >= k:
            return -1
        c[0] += 1
        _place(st, b, cand[0], d[0], c[0], x, y, z)
    return 0


def decode_kernel(S, L, T, sel, cand_w, cand_h, cand_z, int z_con, bint enforce):
    cdef int n = len(S)
    cdef int nt = len(T)
    cdef int total = 0
    cdef int i, j, b, d, k, r, c, cand, ptr = 0, tz
    cdef int clamped = 0, zero_runs = 0, exhausted = 0, fixes = 0
    cdef double tx, ty
    cdef State st
    cdef int *Sa
    cdef int *La
    cdef char *Ta
    cdef int *cover

    for b in range(n):
        total += len(cand_w[b])

    st.n = n
    st.z_con = z_con
    st.nplaced = 0
    st.off = <int *>malloc((n + 1) * sizeof(int))
    st.cw = <double *>malloc((total + 1) * sizeof(double))
    st.ch = <double *>malloc((total + 1) * sizeof(double))
    st.cz = <int *>malloc((total + 1) * sizeof(int))
    st.sel = <int *>malloc(n * sizeof(int))
    st.px = <double *>malloc(n * sizeof(double))
    st.py = <double *>malloc(n * sizeof(double))
    st.pz = <int *>malloc(n * sizeof(int))
    st.sx = <double *>malloc(n * sizeof(double))
    st.sy = <double *>malloc(n * sizeof(double))
    st.sz = <int *>malloc(n * sizeof(int))
    st.placed = <int *>malloc(n * sizeof(int))
    for i in range(3):
        st.ulist[i] = <int *>malloc((n + 1) * sizeof(int))
        st.ulen[i] = 0
    Sa = <int *>malloc(n * sizeof(int))
    La = <int *>malloc((n + 1) * sizeof(int))
    Ta = <char *>malloc(nt + 1)
    cover = <int *>malloc((n + 1) * sizeof(int))

    try:
        j = 0
        for b in range(n):
            st.off[b] = j
            ws = cand_w[b]
            hs = cand_h[b]
            zs = cand_z[b]
            for i in range(len(ws)):
                st.cw[j] = ws[i]
                st.ch[j] = hs[i]
                st.cz[j] = zs[i]
                j += 1
            st.sel[b] = sel[b]
            st.px[b] = 0.0
            st.py[b] = 0.0
            st.pz[b] = 0
        st.off[n] = j
        for i in range(n):
            Sa[i] = S[i]
        for i in range(n - 1):
            La[i] = L[i]
        for i in range(nt):
            Ta[i] = 1 if T[i] else 0

        b = Sa[0]
        if enforce and st.cz[st.off[b] + st.sel[b]] > z_con:
            raise ValueError("candidate taller than the layer limit")
        _commit(&st, b, st.sel[b], 0, 0, 0.0, 0.0, 0)

        with nogil:
            for i in range(1, n):
                b = Sa[i]
                d = La[i - 1]
                k = st.ulen[d]
                r = 0
                while ptr < nt and Ta[ptr] and r < k:
                    r += 1
                    ptr += 1
                if ptr < nt:
                    if Ta[ptr]:
                        clamped += 1
                    else:
                        ptr += 1
                        if r == 0:
                            zero_runs += 1
                elif r == 0:
                    exhausted += 1
                c = r if r > 0 else 1

                cand = st.sel[b]
                _place(&st, b, cand, d, c, &tx, &ty, &tz)
                if enforce and tz + st.cz[st.off[b] + cand] > z_con:
                    fixes += 1
                    if _fix(&st, b, &cand, &d, &c, &tx, &ty, &tz) != 0:
                        break
                    La[i - 1] = d
                cover[i - 1] = c
                _commit(&st, b, cand, d, c, tx, ty, tz)
        if st.nplaced != n:
            raise RuntimeError("layer repair failed to converge")

        xs = [st.px[i] for i in range(n)]
        ys = [st.py[i] for i in range(n)]
        zs_out = [st.pz[i] for i in range(n)]
        sel_out = [st.sel[i] for i in range(n)]
        L_out = [La[i] for i in range(n - 1)]
        cover_out = [cover[i] for i in range(n - 1)]
        return (xs, ys, zs_out, sel_out, L_out, cover_out,
                (clamped, zero_runs, exhausted, fixes))
    finally:
        free(st.off); free(st.cw); free(st.ch); free(st.cz); free(st.sel)
        free(st.px); free(st.py); free(st.pz)
        free(st.sx); free(st.sy); free(st.sz); free(st.placed)
        for i in range(3):
            free(st.ulist[i])
        free(Sa); free(La); free(Ta); free(cover)
