"""3D corner block list (S, L, T) and its decoder.

Blocks are inserted one at a time at the upper-right-rear corner of the
partial packing. Each inserted block covers a suffix of the uncovered list of
its direction; the suffix length is a unary run in T (``1...10``).
"""
from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from typing import Sequence

from .kernel import decode_kernel
from .model import Design, DesignError

OVERLAP_TOL = 1e-6


class Direction(enum.IntEnum):
    X = 0
    Y = 1
    Z = 2


@dataclass(frozen=True)
class Cbl3:
    S: tuple[str, ...]
    L: tuple[Direction, ...]
    T: tuple[int, ...]

    def __post_init__(self):
        if len(self.L) != max(len(self.S) - 1, 0):
            raise ValueError(f"|L|={len(self.L)} must equal |S|-1={len(self.S) - 1}")

    def to_text(self) -> str:
        return (f"S:{','.join(self.S)};L:{','.join(d.name for d in self.L)};"
                f"T:{''.join(str(int(t)) for t in self.T)}")

    @classmethod
    def from_text(cls, text: str) -> "Cbl3":
        """Parse ``S:a,b,c;L:X,Z;T:10110`` (sections in any order, all optional
        but S)."""
        parts: dict[str, str] = {}
        for chunk in text.strip().split(";"):
            if not chunk.strip():
                continue
            key, sep, val = chunk.partition(":")
            if not sep or key.strip() not in ("S", "L", "T"):
                raise ValueError(f"bad CBL section {chunk!r}")
            parts[key.strip()] = val.strip()
        if "S" not in parts:
            raise ValueError("CBL text needs an S section")
        S = tuple(s.strip() for s in parts["S"].split(",") if s.strip())
        L = tuple(Direction[d.strip().upper()] for d in parts.get("L", "").split(",") if d.strip())
        tbits = parts.get("T", "")
        if set(tbits) - {"0", "1"}:
            raise ValueError("T must be a bit string")
        return cls(S, L, tuple(int(ch) for ch in tbits))


@dataclass(frozen=True)
class PlacedBlock:
    id: str
    candidate_index: int
    x: float
    y: float
    z: int
    width: float
    height: float
    layers: int


@dataclass(frozen=True)
class Floorplan:
    placed: tuple[PlacedBlock, ...]
    extent_x: float
    extent_y: float
    extent_z: int

    def by_id(self) -> dict[str, PlacedBlock]:
        return {p.id: p for p in self.placed}


@dataclass(frozen=True)
class Decoded:
    floorplan: Floorplan
    cbl: Cbl3
    selection: tuple[int, ...]
    # (clamped runs, zero-length runs, exhausted-T blocks, layer fixes)
    repairs: tuple[int, int, int, int] = (0, 0, 0, 0)
    cover: tuple[int, ...] = field(default=())

    @property
    def repairs_applied(self) -> int:
        return sum(self.repairs)


class _Tables:
    __slots__ = ("w", "h", "z", "index")

    def __init__(self, design: Design):
        self.w = [[c.width for c in b.candidates] for b in design.blocks]
        self.h = [[c.height for c in b.candidates] for b in design.blocks]
        self.z = [[c.layers for c in b.candidates] for b in design.blocks]
        self.index = design.index()


def _design_tables(design: Design) -> _Tables:
    t = design.__dict__.get("_cbl_tables")
    if t is None:
        t = _Tables(design)
        # cache on the frozen instance; not a dataclass field
        object.__setattr__(design, "_cbl_tables", t)
    return t


def default_selection(design: Design) -> tuple[int, ...]:
    return (0,) * design.n


def unary(cover: Sequence[int]) -> tuple[int, ...]:
    bits: list[int] = []
    for c in cover:
        bits.extend([1] * c)
        bits.append(0)
    return tuple(bits)


def _check_structure(cbl: Cbl3, design: Design, sel: Sequence[int], tables: _Tables) -> list[int]:
    if len(cbl.S) != design.n or set(cbl.S) != set(tables.index):
        raise DesignError("CBL sequence S is not a permutation of the design's block ids")
    if len(sel) != design.n:
        raise DesignError("selection length does not match the number of blocks")
    for b, j in enumerate(sel):
        if not 0 <= j < len(tables.w[b]):
            raise DesignError(f"selection[{b}]={j} out of range for block '{design.blocks[b].id}'")
    return [tables.index[s] for s in cbl.S]


def decode_indices(S: Sequence[int], L: Sequence[int], T: Sequence[int], sel: Sequence[int],
                   design: Design, enforce_layers: bool = True, kernel=None) -> Decoded:
    """Index-level decode used on the annealing hot path (no structural checks)."""
    t = _design_tables(design)
    k = kernel or decode_kernel
    xs, ys, zs, sel_out, L_out, cover, counters = k(
        S, L, T, sel, t.w, t.h, t.z, design.config.layer_limit, enforce_layers)
    placed = []
    ex = ey = 0.0
    ez = 0
    for b, spec in enumerate(design.blocks):
        j = sel_out[b]
        w, h, z = t.w[b][j], t.h[b][j], t.z[b][j]
        p = PlacedBlock(spec.id, j, xs[b], ys[b], zs[b], w, h, z)
        placed.append(p)
        if p.x + w > ex:
            ex = p.x + w
        if p.y + h > ey:
            ey = p.y + h
        if p.z + z > ez:
            ez = p.z + z
    fp = Floorplan(tuple(placed), ex, ey, ez)
    ids = [design.blocks[s].id for s in S]
    cbl = Cbl3(tuple(ids), tuple(Direction(d) for d in L_out), unary(cover))
    return Decoded(fp, cbl, tuple(sel_out), tuple(counters), tuple(cover))


def decode_full(cbl: Cbl3, design: Design, sel: Sequence[int] | None = None,
                enforce_layers: bool = True, kernel=None) -> Decoded:
    """Decode and also return the repaired lists.

    The returned ``cbl`` carries the directions chosen by layer repair and a
    canonical T (one terminated run per block) that re-decodes to the same
    floorplan with no repairs.
    """
    sel = default_selection(design) if sel is None else tuple(sel)
    t = _design_tables(design)
    S = _check_structure(cbl, design, sel, t)
    return decode_indices(S, [int(d) for d in cbl.L], [int(b) for b in cbl.T], sel,
                          design, enforce_layers, kernel)


def decode(cbl: Cbl3, design: Design, sel: Sequence[int] | None = None,
           enforce_layers: bool = True) -> Floorplan:
    return decode_full(cbl, design, sel, enforce_layers).floorplan


def random_cbl(design: Design, rng: random.Random, max_cover: int = 3) -> Cbl3:
    """Uniform random S, L (no Z when only one layer is allowed) and cover
    counts drawn from ``1..max_cover``."""
    S = [b.id for b in design.blocks]
    rng.shuffle(S)
    ndir = 3 if design.config.layer_limit > 1 else 2
    L = tuple(Direction(rng.randrange(ndir)) for _ in range(len(S) - 1))
    cover = [rng.randint(1, max_cover) for _ in range(len(S) - 1)]
    return Cbl3(tuple(S), L, unary(cover))


def bounding_box(fp: Floorplan) -> tuple[float, float, int]:
    if not fp.placed:
        raise ValueError("empty floorplan")
    return (max(p.x + p.width for p in fp.placed),
            max(p.y + p.height for p in fp.placed),
            max(p.z + p.layers for p in fp.placed))


def overlapping_pairs(fp: Floorplan, tol: float = OVERLAP_TOL) -> list[tuple[str, str]]:
    """Pairs of blocks whose boxes intersect (x/y shrunk by ``tol``, z exact)."""
    out = []
    ps = fp.placed
    for i in range(len(ps)):
        a = ps[i]
        for j in range(i + 1, len(ps)):
            b = ps[j]
            if (a.x < b.x + b.width - tol and b.x < a.x + a.width - tol
                    and a.y < b.y + b.height - tol and b.y < a.y + a.height - tol
                    and a.z < b.z + b.layers and b.z < a.z + a.layers):
                out.append((a.id, b.id))
    return out
