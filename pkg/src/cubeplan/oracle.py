"""Exhaustive packers for checking the decoder and annealer on tiny instances.

``extreme_point_pack`` shares no code with the CBL decoder. Each block is
tried at every point whose coordinates are 0 or the far face of an already
placed block on that axis; every CBL packing lies in this space, so the
oracle's optimum is a lower bound for any decoded (S, L, T).
"""
from __future__ import annotations

import enum
import itertools
import math
from typing import Sequence

from .cbl import Cbl3, Decoded, Direction, Floorplan, PlacedBlock, decode_full, unary
from .model import Design

MAX_ORDERS = 720
MAX_EP_BLOCKS = 8
MAX_ENUM_BLOCKS = 4


class Objective(str, enum.Enum):
    VOLUME = "volume"
    FOOTPRINT = "footprint"


def objective_value(fp: Floorplan, objective: Objective) -> float:
    if objective == Objective.VOLUME:
        return fp.extent_x * fp.extent_y * fp.extent_z
    return fp.extent_x * fp.extent_y


def _unique_orders(dims: Sequence[tuple]) -> list[tuple[int, ...]]:
    seen = set()
    out = []
    for perm in itertools.permutations(range(len(dims))):
        key = tuple(dims[i] for i in perm)
        if key not in seen:
            seen.add(key)
            out.append(perm)
    return out


def extreme_point_pack(blocks: Sequence[tuple[float, float, int]], z_con: int | None = None,
                       objective: Objective | str = Objective.VOLUME) -> Floorplan:
    """Optimal packing of fixed ``(width, height, layers)`` boxes.

    Branch and bound over insertion orders (duplicates of identical boxes
    skipped) and candidate corners. Equal objective values are broken by the
    smaller longest side, so square footprints win. ``z_con=None`` leaves the
    layer count unbounded.
    """
    objective = Objective(objective)
    n = len(blocks)
    if n == 0:
        raise ValueError("no blocks")
    dims = [(float(w), float(h), int(z)) for w, h, z in blocks]
    if n > MAX_EP_BLOCKS:
        raise ValueError(f"extreme_point_pack handles at most {MAX_EP_BLOCKS} blocks")
    orders = _unique_orders(dims)
    if len(orders) > MAX_ORDERS:
        raise ValueError(f"too many distinct insertion orders ({len(orders)} > {MAX_ORDERS})")
    zlim = math.inf if z_con is None else z_con
    if any(z > zlim for _, _, z in dims):
        raise ValueError("a block is taller than the layer limit")

    total_vol = sum(w * h * z for w, h, z in dims)
    max_fp = max(w * h for w, h, _ in dims)

    def lower_bound(ex, ey, ez):
        if objective == Objective.VOLUME:
            return max(ex * ey * ez, total_vol)
        lb = ex * ey
        if zlim != math.inf:
            lb = max(lb, total_vol / zlim)
        return max(lb, max_fp)

    best = [math.inf, math.inf, None]
    pos = [None] * n

    def rec(order, depth, ex, ey, ez):
        if depth == n:
            val = ex * ey * ez if objective == Objective.VOLUME else ex * ey
            side = max(ex, ey)
            if val < best[0] or (val == best[0] and side < best[1]):
                best[0], best[1], best[2] = val, side, list(pos)
            return
        b = order[depth]
        w, h, l = dims[b]
        placed = order[:depth]
        xs = sorted({0.0} | {pos[q][0] + dims[q][0] for q in placed})
        ys = sorted({0.0} | {pos[q][1] + dims[q][1] for q in placed})
        zs = sorted({0} | {pos[q][2] + dims[q][2] for q in placed})
        for z in zs:
            if z + l > zlim:
                continue
            for y in ys:
                for x in xs:
                    nx, ny, nz = max(ex, x + w), max(ey, y + h), max(ez, z + l)
                    lb = lower_bound(nx, ny, nz)
                    if lb > best[0] or (lb == best[0] and max(nx, ny) >= best[1]):
                        continue
                    clash = False
                    for q in placed:
                        qx, qy, qz = pos[q]
                        qw, qh, ql = dims[q]
                        if (x < qx + qw and qx < x + w and y < qy + qh and qy < y + h
                                and z < qz + ql and qz < z + l):
                            clash = True
                            break
                    if clash:
                        continue
                    pos[b] = (x, y, z)
                    rec(order, depth + 1, nx, ny, nz)
                    pos[b] = None

    for order in orders:
        rec(order, 0, 0.0, 0.0, 0)

    coords = best[2]
    placed_blocks = tuple(
        PlacedBlock(f"b{i}", 0, coords[i][0], coords[i][1], coords[i][2], *dims[i])
        for i in range(n)
    )
    return Floorplan(
        placed_blocks,
        max(p.x + p.width for p in placed_blocks),
        max(p.y + p.height for p in placed_blocks),
        max(p.z + p.layers for p in placed_blocks),
    )


def all_cbls(ids: Sequence[str], z_con: int) -> "itertools.chain[Cbl3]":
    """Every (S, L, cover counts) triple with cover count of the i-th inserted
    block in ``1..i`` (at most the length of any uncovered list)."""
    n = len(ids)
    dirs = list(Direction) if z_con > 1 else [Direction.X, Direction.Y]
    cover_ranges = [range(1, i + 1) for i in range(1, n)]
    for S in itertools.permutations(ids):
        for L in itertools.product(dirs, repeat=n - 1):
            for cover in itertools.product(*cover_ranges):
                yield Cbl3(tuple(S), tuple(L), unary(cover))


def enumerate_cbl(design: Design, sel: Sequence[int] | None = None,
                  objective: Objective | str = Objective.VOLUME) -> Decoded:
    """Best decoded packing over the whole (S, L, T) space for a fixed selection.

    Ties keep the first triple in enumeration order (lexicographic S).
    """
    objective = Objective(objective)
    if design.n > MAX_ENUM_BLOCKS:
        raise ValueError(f"enumerate_cbl handles at most {MAX_ENUM_BLOCKS} blocks")
    best, best_val = None, math.inf
    for cbl in all_cbls(design.ids, design.config.layer_limit):
        dec = decode_full(cbl, design, sel, enforce_layers=True)
        val = objective_value(dec.floorplan, objective)
        if val < best_val:
            best, best_val = dec, val
    return best
