"""Pure-Python decode kernel.

Mirrors ``_ckernel.pyx`` statement for statement; both must produce identical
output for identical input. Axis indices: 0 = X, 1 = Y, 2 = Z.
"""
from __future__ import annotations

from .repair import fix_violation

EPS = 1e-9


class PackState:
    """Partial packing built block by block in S order."""

    __slots__ = ("cw", "ch", "cz", "pos", "size", "placed", "uncovered", "z_con", "sel")

    def __init__(self, cand_w, cand_h, cand_z, sel, z_con):
        n = len(cand_w)
        self.cw = cand_w
        self.ch = cand_h
        self.cz = cand_z
        self.sel = list(sel)
        self.z_con = z_con
        self.pos = [[0.0] * n, [0.0] * n, [0] * n]
        self.size = [[0.0] * n, [0.0] * n, [0] * n]
        self.placed: list[int] = []
        self.uncovered: list[list[int]] = [[], [], []]

    def dims(self, b, cand):
        return self.cw[b][cand], self.ch[b][cand], self.cz[b][cand]

    def place(self, b, cand, d, c):
        """Tentative lower-left-front corner of block ``b`` covering the last
        ``c`` entries of the direction-``d`` uncovered list."""
        ulist = self.uncovered[d]
        k = len(ulist)
        first = ulist[k - c]
        pos, size = self.pos, self.size
        w, h, l = self.dims(b, cand)
        bsize = (w, h, l)
        corner = [pos[0][first], pos[1][first], pos[2][first]]
        a1, a2 = (1, 2) if d == 0 else ((0, 2) if d == 1 else (0, 1))
        pd, sd = pos[d], size[d]
        best = 0.0 if d < 2 else 0
        for j in range(k - c, k):
            q = ulist[j]
            e = pd[q] + sd[q]
            if e > best:
                best = e
        lo1, hi1 = corner[a1], corner[a1] + bsize[a1]
        lo2, hi2 = corner[a2], corner[a2] + bsize[a2]
        p1, s1, p2, s2 = pos[a1], size[a1], pos[a2], size[a2]
        for q in self.placed:
            if (p1[q] < hi1 - EPS and lo1 < p1[q] + s1[q] - EPS
                    and p2[q] < hi2 - EPS and lo2 < p2[q] + s2[q] - EPS):
                e = pd[q] + sd[q]
                if e > best:
                    best = e
        corner[d] = best
        return corner[0], corner[1], corner[2]

    def extent(self):
        ex = ey = 0.0
        for q in self.placed:
            e = self.pos[0][q] + self.size[0][q]
            if e > ex:
                ex = e
            e = self.pos[1][q] + self.size[1][q]
            if e > ey:
                ey = e
        return ex, ey

    def commit(self, b, cand, d, c, x, y, z):
        w, h, l = self.dims(b, cand)
        self.sel[b] = cand
        self.pos[0][b], self.pos[1][b], self.pos[2][b] = x, y, z
        self.size[0][b], self.size[1][b], self.size[2][b] = w, h, l
        self.placed.append(b)
        if c > 0:
            ulist = self.uncovered[d]
            del ulist[len(ulist) - c:]
        for a in range(3):
            self.uncovered[a].append(b)


def decode_kernel(S, L, T, sel, cand_w, cand_h, cand_z, z_con, enforce):
    """Decode index-form (S, L, T) into coordinates.

    Returns ``(x, y, z, sel, L_out, cover, counters)`` where ``cover[i]`` is
    the cover count actually used for ``S[i + 1]`` and ``counters`` is
    ``(clamped, zero_runs, exhausted, layer_fixes)``.
    """
    n = len(S)
    st = PackState(cand_w, cand_h, cand_z, sel, z_con)
    L_out = list(L)
    cover = [0] * max(n - 1, 0)
    clamped = zero_runs = exhausted = fixes = 0
    nt = len(T)
    ptr = 0

    b0 = S[0]
    st.commit(b0, st.sel[b0], 0, 0, 0.0, 0.0, 0)
    if enforce and st.cz[b0][st.sel[b0]] > z_con:
        raise ValueError("candidate taller than the layer limit")

    for i in range(1, n):
        b = S[i]
        d = L_out[i - 1]
        k = len(st.uncovered[d])
        r = 0
        while ptr < nt and T[ptr] and r < k:
            r += 1
            ptr += 1
        if ptr < nt:
            if T[ptr]:
                # run longer than the uncovered list: virtual '0' inserted here
                clamped += 1
            else:
                ptr += 1
                if r == 0:
                    zero_runs += 1
        elif r == 0:
            exhausted += 1
        c = r if r > 0 else 1

        cand = st.sel[b]
        x, y, z = st.place(b, cand, d, c)
        if enforce and z + st.cz[b][cand] > z_con:
            fixes += 1
            cand, d, c, x, y, z = fix_violation(st, b, cand, d, c, x, y, z)
            L_out[i - 1] = d
        cover[i - 1] = c
        st.commit(b, cand, d, c, x, y, z)

    return (st.pos[0], st.pos[1], st.pos[2], st.sel, L_out, cover,
            (clamped, zero_runs, exhausted, fixes))
