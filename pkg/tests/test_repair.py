import random

from conftest import random_design, random_selection
from cubeplan._pykernel import PackState
from cubeplan.cbl import Cbl3, Direction, decode_full, overlapping_pairs, random_cbl
from cubeplan.model import BlockSpec, Design, DesignConfig, ImplementationCandidate
from cubeplan.repair import fix_violation

X, Y, Z = Direction.X, Direction.Y, Direction.Z


def _design(cands_per_block, z_con):
    blocks = tuple(
        BlockSpec(bid, bid, tuple(ImplementationCandidate(w, h, l) for w, h, l in cands))
        for bid, cands in cands_per_block
    )
    return Design(blocks, (), (), DesignConfig(layer_limit=z_con, whitespace_fraction=0.0))


def test_single_layer_block_needs_no_repair():
    d = _design([("a", [(1, 1, 1)]), ("b", [(1, 1, 1)])], 2)
    dec = decode_full(Cbl3(("a", "b"), (Z,), (1, 0)), d)
    assert dec.repairs[3] == 0
    assert dec.floorplan.by_id()["b"].z == 1


def test_shorter_candidate_swapped_in_place():
    d = _design([("a", [(1, 1, 1)]), ("b", [(1, 1, 2), (1, 1, 1)])], 2)
    dec = decode_full(Cbl3(("a", "b"), (Z,), (1, 0)), d)
    b = dec.floorplan.by_id()["b"]
    assert (b.x, b.y, b.z, b.layers, b.candidate_index) == (0, 0, 1, 1, 1)
    assert dec.cbl.L == (Z,)
    assert dec.repairs[3] == 1


def test_direction_change_and_coverage_growth():
    d = _design([("a", [(1, 1, 1)]), ("c", [(1, 1, 1)]), ("b", [(1, 1, 2)])], 2)
    dec = decode_full(Cbl3(("a", "c", "b"), (Z, Z), (1, 0, 1, 0)), d)
    b = dec.floorplan.by_id()["b"]
    assert b.z == 0 and b.z + b.layers <= 2
    # X and Y give the same footprint; the tie goes to X
    assert dec.cbl.L == (Z, X)
    assert (b.x, b.y) == (1, 0)
    assert dec.cover == (1, 2)
    assert not overlapping_pairs(dec.floorplan)


def test_fix_violation_on_pack_state():
    # two stacked unit cubes, then a 2-layer block arriving on top from Z
    st = PackState([[1.0], [1.0], [1.0]], [[1.0], [1.0], [1.0]], [[1], [1], [2]], [0, 0, 0], 2)
    st.commit(0, 0, 0, 0, 0.0, 0.0, 0)
    x, y, z = st.place(1, 0, 2, 1)
    st.commit(1, 0, 2, 1, x, y, z)
    x, y, z = st.place(2, 0, 2, 1)
    assert z == 2
    cand, d, c, x, y, z = fix_violation(st, 2, 0, 2, 1, x, y, z)
    assert (cand, d, c) == (0, 0, 2)
    assert (x, y, z) == (1.0, 0.0, 0)


def test_repair_only_touches_offending_block():
    rng = random.Random(8)
    for _ in range(300):
        n = rng.randint(2, 12)
        d = random_design(rng, n, 2)
        sel = random_selection(d, rng)
        cbl = random_cbl(d, rng)
        dec = decode_full(cbl, d, sel)
        assert dec.cbl.S == cbl.S
        changed = [i for i, (a, b) in enumerate(zip(sel, dec.selection)) if a != b]
        assert len(changed) <= dec.repairs[3]


def test_feasibility_fuzz():
    rng = random.Random(12)
    for _ in range(3000):
        z_con = rng.randint(1, 4)
        d = random_design(rng, rng.randint(1, 20), z_con)
        ids = [b.id for b in d.blocks]
        rng.shuffle(ids)
        n = len(ids)
        # bias towards Z so the repair path is exercised
        L = tuple(Direction(2 if rng.random() < 0.6 else rng.randrange(2)) for _ in range(n - 1))
        T = tuple(rng.randint(0, 1) for _ in range(rng.randint(0, 3 * n)))
        dec = decode_full(Cbl3(tuple(ids), L, T), d, random_selection(d, rng))
        assert dec.floorplan.extent_z <= z_con
        assert not overlapping_pairs(dec.floorplan)
