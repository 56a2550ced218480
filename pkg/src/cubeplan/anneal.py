"""Simulated annealing over (S, L, T, selection).

Every proposed neighbour is decoded with layer repair switched on, so all
visited solutions respect the layer limit; the repaired lists become the
current state when a move is accepted.
"""
from __future__ import annotations

import math
import random
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from .cbl import Cbl3, Decoded, Direction, Floorplan, decode_indices, default_selection, random_cbl
from .metrics import CostBreakdown, Reference, cost, reference_from
from .model import Design

SWAP_S, CHANGE_L, FLIP_T, ALT_SELECT = range(4)
MOVE_NAMES = ("swap_S", "change_L", "flip_T", "alternative_selection")
AUTO_PROBES = 100


@dataclass(frozen=True)
class Solution:
    cbl: Cbl3
    sel: tuple[int, ...]
    floorplan: Floorplan
    cost: CostBreakdown


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    temperature: float
    cost: float
    best: float

    def as_dict(self) -> dict:
        return {"iteration": self.iteration, "temperature": self.temperature,
                "cost": self.cost, "best": self.best}


@dataclass
class AnnealResult:
    best: Solution
    reference: Reference
    seed: int
    evaluations: int
    trace: list[TraceRecord] = field(default_factory=list)
    accepted: int = 0


class _State:
    __slots__ = ("S", "L", "T", "sel")

    def __init__(self, S, L, T, sel):
        self.S = list(S)
        self.L = list(L)
        self.T = list(T)
        self.sel = list(sel)

    @classmethod
    def from_decoded(cls, dec: Decoded, design: Design) -> "_State":
        idx = design.index()
        return cls([idx[s] for s in dec.cbl.S], [int(d) for d in dec.cbl.L],
                   dec.cbl.T, dec.selection)

    def copy(self) -> "_State":
        return _State(self.S, self.L, self.T, self.sel)


def _applicable(design: Design, st: _State) -> list[bool]:
    n = len(st.S)
    multi = any(len(b.candidates) > 1 for b in design.blocks)
    return [n >= 2, n >= 2, len(st.T) > 0, multi]


def _pick_move(weights: Sequence[float], ok: Sequence[bool], rng: random.Random) -> int | None:
    ws = [w if o else 0.0 for w, o in zip(weights, ok)]
    total = sum(ws)
    if total <= 0:
        return None
    r = rng.random() * total
    acc = 0.0
    for i, w in enumerate(ws):
        acc += w
        if r < acc and w > 0:
            return i
    return max(i for i, w in enumerate(ws) if w > 0)


def _apply_move(st: _State, kind: int, design: Design, rng: random.Random) -> _State:
    new = st.copy()
    n = len(new.S)
    if kind == SWAP_S:
        i = rng.randrange(n)
        j = rng.randrange(n - 1)
        if j >= i:
            j += 1
        new.S[i], new.S[j] = new.S[j], new.S[i]
    elif kind == CHANGE_L:
        i = rng.randrange(n - 1)
        dirs = [0, 1, 2] if design.config.layer_limit > 1 else [0, 1]
        choices = [d for d in dirs if d != new.L[i]]
        new.L[i] = choices[rng.randrange(len(choices))]
    elif kind == FLIP_T:
        i = rng.randrange(len(new.T))
        new.T[i] ^= 1
    else:
        multi = [b for b, spec in enumerate(design.blocks) if len(spec.candidates) > 1]
        b = multi[rng.randrange(len(multi))]
        others = [j for j in range(len(design.blocks[b].candidates)) if j != new.sel[b]]
        new.sel[b] = others[rng.randrange(len(others))]
    return new


def propose_move(sol: Solution, design: Design, rng: random.Random,
                 weights: Sequence[float] | None = None) -> tuple[Cbl3, tuple[int, ...]]:
    """One random neighbour of ``sol`` as a new ``(cbl, sel)``; ``sol`` is not modified.

    Move types that cannot apply (a single block, no multi-candidate block)
    are excluded before drawing.
    """
    idx = design.index()
    st = _State([idx[s] for s in sol.cbl.S], [int(d) for d in sol.cbl.L], sol.cbl.T, sol.sel)
    kind = _pick_move(weights or design.config.anneal.move_weights, _applicable(design, st), rng)
    if kind is None:
        return sol.cbl, sol.sel
    new = _apply_move(st, kind, design, rng)
    cbl = Cbl3(tuple(design.blocks[s].id for s in new.S),
               tuple(Direction(d) for d in new.L), tuple(new.T))
    return cbl, tuple(new.sel)


def _evaluate(st: _State, design: Design, ref: Reference | None,
              thermal: bool) -> tuple[Decoded, CostBreakdown]:
    dec = decode_indices(st.S, st.L, st.T, st.sel, design, True)
    return dec, cost(dec.floorplan, design, ref, thermal=thermal)


def anneal(design: Design, seed: int | None = None, *, max_evaluations: int | None = None,
           reference: Reference | None = None, record_trace: bool = True) -> AnnealResult:
    """Run one Metropolis chain with geometric cooling; deterministic per seed.

    ``reference`` fixes the cost normalizers (multi-start passes a shared
    one); by default they come from this run's initial solution.
    """
    cfg = design.config
    an = cfg.anneal
    seed = cfg.seed if seed is None else seed
    budget = an.max_evaluations if max_evaluations is None else max_evaluations
    rng = random.Random(seed)
    need_thermal = cfg.weights.w3 > 0

    cbl0 = random_cbl(design, rng)
    idx = design.index()
    st = _State([idx[s] for s in cbl0.S], [int(d) for d in cbl0.L], cbl0.T,
                default_selection(design))
    dec = decode_indices(st.S, st.L, st.T, st.sel, design, True)
    ref = reference or reference_from(dec.floorplan, design)
    cur_cost = cost(dec.floorplan, design, ref, thermal=need_thermal)
    st = _State.from_decoded(dec, design)
    evals = 1

    best_state, best_total = st.copy(), cur_cost.total
    trace: list[TraceRecord] = []
    weights = an.move_weights
    ok = _applicable(design, st)

    if an.initial_temperature == "auto":
        ups = []
        for _ in range(AUTO_PROBES):
            if evals >= budget:
                break
            kind = _pick_move(weights, ok, rng)
            if kind is None:
                break
            _, c = _evaluate(_apply_move(st, kind, design, rng), design, ref, need_thermal)
            evals += 1
            delta = c.total - cur_cost.total
            if delta > 0:
                ups.append(delta)
        # ~50% acceptance of an average uphill move
        temp = (sum(ups) / len(ups)) / math.log(2.0) if ups else max(abs(cur_cost.total), 1.0) * 1e-3
    else:
        temp = float(an.initial_temperature)

    accepted = 0
    it = 0
    while evals < budget and temp >= an.min_temperature:
        for _ in range(an.moves_per_temperature):
            if evals >= budget:
                break
            kind = _pick_move(weights, ok, rng)
            if kind is None:
                evals = budget
                break
            cand = _apply_move(st, kind, design, rng)
            cdec, ccost = _evaluate(cand, design, ref, need_thermal)
            evals += 1
            delta = ccost.total - cur_cost.total
            if delta <= 0 or rng.random() < math.exp(-delta / temp):
                st = _State.from_decoded(cdec, design)
                cur_cost = ccost
                accepted += 1
                if ccost.total < best_total:
                    best_total = ccost.total
                    best_state = st.copy()
        it += 1
        if record_trace:
            trace.append(TraceRecord(it, temp, cur_cost.total, best_total))
        temp *= an.cooling_ratio

    bdec = decode_indices(best_state.S, best_state.L, best_state.T, best_state.sel, design, True)
    bcost = cost(bdec.floorplan, design, ref, thermal=True)
    best = Solution(bdec.cbl, bdec.selection, bdec.floorplan, bcost)
    return AnnealResult(best, ref, seed, evals, trace, accepted)


def run_seed(base_seed: int, i: int) -> int:
    return (base_seed + i) % 2**64


def _anneal_job(args):
    design, seed, budget, ref = args
    return anneal(design, seed, max_evaluations=budget, reference=ref)


def shared_reference(design: Design, seed: int) -> Reference:
    """Normalizers from the initial solution that ``anneal(design, seed)`` starts with."""
    rng = random.Random(seed)
    cbl0 = random_cbl(design, rng)
    idx = design.index()
    dec = decode_indices([idx[s] for s in cbl0.S], [int(d) for d in cbl0.L], cbl0.T,
                         default_selection(design), design, True)
    return reference_from(dec.floorplan, design)


def multi_start(design: Design, runs: int, seed: int | None = None, *, jobs: int = 1,
                executor: str = "process", max_evaluations: int | None = None
                ) -> tuple[AnnealResult, list[AnnealResult]]:
    """Independent chains with seeds ``seed, seed+1, ...`` sharing run 0's normalizers.

    Returns ``(best, all_results)``; the best minimizes total cost, ties going
    to the lower run index. Results do not depend on ``jobs`` or ``executor``.
    """
    base = design.config.seed if seed is None else seed
    ref = shared_reference(design, run_seed(base, 0))
    args = [(design, run_seed(base, i), max_evaluations, ref) for i in range(runs)]
    if jobs <= 1 or runs <= 1:
        results = [_anneal_job(a) for a in args]
    else:
        pool_cls = ProcessPoolExecutor if executor == "process" else ThreadPoolExecutor
        with pool_cls(max_workers=jobs) as pool:
            results = list(pool.map(_anneal_job, args))
    best = min(range(runs), key=lambda i: (results[i].best.cost.total, i))
    return results[best], results
