"""Layer-limit repair applied while a packing is being decoded.

When block B would end above the layer limit, three remedies are tried in
order: a shorter candidate, a horizontal covering direction instead of Z,
then covering more of the uncovered list until B drops low enough. Covering
the whole X or Y list always lands B on layer 0, so the loop terminates.
"""
from __future__ import annotations

X, Y, Z = 0, 1, 2


def fix_violation(state, b, cand, d, c, x, y, z):
    """Repair the placement of block ``b`` inside a partial packing.

    ``state`` is a :class:`~cubeplan._pykernel.PackState` with every block
    before ``b`` committed. Returns the new ``(cand, d, c, x, y, z)``; only
    B's own candidate, direction and cover count change.
    """
    z_con = state.z_con
    cz = state.cz[b]

    if z < z_con:
        for j in range(len(cz)):
            tx, ty, tz = state.place(b, j, d, c)
            if tz + cz[j] <= z_con:
                return j, d, c, tx, ty, tz
        lowest = min(cz)
        cand = cz.index(lowest)
        x, y, z = state.place(b, cand, d, c)
        if z + cz[cand] <= z_con:
            return cand, d, c, x, y, z

    if d == Z:
        ex, ey = state.extent()
        w, h = state.cw[b][cand], state.ch[b][cand]
        best = None
        for nd in (X, Y):
            nc = min(c, len(state.uncovered[nd]))
            tx, ty, tz = state.place(b, cand, nd, nc)
            area = max(ex, tx + w) * max(ey, ty + h)
            if best is None or area < best[0]:
                best = (area, nd, nc, tx, ty, tz)
        _, d, c, x, y, z = best

    k = len(state.uncovered[d])
    while z + cz[cand] > z_con:
        if c >= k:
            raise RuntimeError("layer repair failed to converge")
        c += 1
        x, y, z = state.place(b, cand, d, c)
    return cand, d, c, x, y, z
