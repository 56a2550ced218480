"""Acceptance criteria, one test each.

Every test prints a single ``[PASS]``/``[FAIL]`` line with the measured
numbers; the lines are repeated in the pytest terminal summary. Run directly
(``python tests/test_acceptance.py``) to get only the summary lines.
"""
import math
import random
import sys
import time
from importlib import resources

import numpy as np
import pytest

sys.path.insert(0, __file__.rsplit("/", 1)[0])
from conftest import random_design, random_selection  # noqa: E402

from cubeplan.anneal import anneal, multi_start  # noqa: E402
from cubeplan.cbl import Floorplan, PlacedBlock, decode_full, decode_indices, random_cbl  # noqa: E402
from cubeplan.cli import pack_report  # noqa: E402
from cubeplan.metrics import cycles_for, thermal_map  # noqa: E402
from cubeplan.model import (AnnealConfig, CostWeights, DesignConfig, ThermalConfig,  # noqa: E402
                            fixed_design, load_design, with_config)
from cubeplan.oracle import Objective, enumerate_cbl, extreme_point_pack, objective_value  # noqa: E402
from cubeplan.report import apply_overrides, dumps_report  # noqa: E402

RESULTS: list[str] = []
DRIVER = str(resources.files("cubeplan") / "data" / "driver.json")


def record(tag: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {tag}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def _overlaps(fp: Floorplan, tol: float = 1e-6) -> int:
    x = np.array([p.x for p in fp.placed])
    y = np.array([p.y for p in fp.placed])
    z = np.array([p.z for p in fp.placed])
    w = np.array([p.width for p in fp.placed])
    h = np.array([p.height for p in fp.placed])
    l = np.array([p.layers for p in fp.placed])
    hit = ((x[:, None] < (x + w)[None, :] - tol) & (x[None, :] < (x + w)[:, None] - tol)
           & (y[:, None] < (y + h)[None, :] - tol) & (y[None, :] < (y + h)[:, None] - tol)
           & (z[:, None] < (z + l)[None, :]) & (z[None, :] < (z + l)[:, None]))
    np.fill_diagonal(hit, False)
    return int(hit.sum()) // 2


def _random_lists(rng, n):
    S = list(range(n))
    rng.shuffle(S)
    L = [rng.randrange(3) for _ in range(n - 1)]
    T = [rng.randint(0, 1) for _ in range(rng.randint(0, 3 * n))]
    return S, L, T


def test_c1_decoder_totality():
    rng = random.Random(1001)
    decodes, failures, overlaps = 0, 0, 0
    t0 = time.perf_counter()
    while decodes < 100_000:
        z_con = rng.randint(1, 4)
        d = random_design(rng, rng.randint(1, 50), z_con)
        for _ in range(100):
            S, L, T = _random_lists(rng, d.n)
            try:
                fp = decode_indices(S, L, T, random_selection(d, rng), d, True).floorplan
            except Exception:  # noqa: BLE001
                failures += 1
            else:
                overlaps += _overlaps(fp) > 0
            decodes += 1
    elapsed = time.perf_counter() - t0
    record("C1 decoder totality", failures == 0 and overlaps == 0 and elapsed < 60,
           f"{decodes} decodes, {failures} failures, {overlaps} with overlap, {elapsed:.1f} s (< 60 s)")


def test_c2_layer_feasibility():
    rng = random.Random(2002)
    bad = 0
    per_limit = {}
    for i in range(10_000):
        z_con = 1 + i % 4
        d = random_design(rng, rng.randint(1, 30), z_con)
        S, L, T = _random_lists(rng, d.n)
        # lean on Z so the repair path runs often
        L = [2 if rng.random() < 0.5 else x for x in L]
        fp = decode_indices(S, L, T, random_selection(d, rng), d, True).floorplan
        bad += fp.extent_z > z_con
        per_limit[z_con] = per_limit.get(z_con, 0) + 1
    record("C2 layer feasibility", bad == 0,
           f"{sum(per_limit.values())} decodes over Z_con {sorted(per_limit)}, {bad} with extent_z > Z_con")


def test_c3_oracle_soundness():
    rng = random.Random(3003)
    gaps, violations = [], 0
    t0 = time.perf_counter()
    for n, count in ((3, 100), (4, 50)):
        for _ in range(count):
            dims = [(rng.randint(1, 8), rng.randint(1, 8), rng.randint(1, 2)) for _ in range(n)]
            z_con = rng.randint(2, 3)
            ep = objective_value(extreme_point_pack(dims, z_con), Objective.VOLUME)
            cbl = objective_value(enumerate_cbl(fixed_design(dims, z_con)).floorplan, Objective.VOLUME)
            violations += cbl < ep - 1e-9
            gaps.append(cbl / ep - 1.0)
    cubes = extreme_point_pack([(1, 1, 1)] * 8, 2)
    vol = objective_value(cubes, Objective.VOLUME)
    record("C3 oracle soundness", violations == 0 and vol == 8,
           f"150 instances, {violations} with CBL < oracle, mean gap {100 * sum(gaps) / len(gaps):.2f}% "
           f"(max {100 * max(gaps):.1f}%), 8 unit cubes volume {vol:g}, {time.perf_counter() - t0:.1f} s")


def test_c4_timing_arithmetic():
    cfg = DesignConfig(target_cycle_time=250.0, clock_overhead=46.0, frequency=4.0)
    checks = {
        "useful": cfg.useful_time == 204.0,
        "4200": cycles_for(4200.0, cfg) == 21,
        "204": cycles_for(204.0, cfg) == 1,
        "204.1": cycles_for(204.1, cfg) == 2,
    }
    record("C4 timing arithmetic", all(checks.values()),
           f"useful {cfg.useful_time:g} ps, 4200 ps -> {cycles_for(4200.0, cfg)}, "
           f"204 ps -> {cycles_for(204.0, cfg)}, 204.1 ps -> {cycles_for(204.1, cfg)}")


def test_c5_driver_trend():
    base = load_design(DRIVER)
    configs = {
        "1L": {"layers": 1, "freq_ghz": 4.0},
        "2D2L": {"layers": 2, "blocks_2d": True, "freq_ghz": 4.0},
        "3D2L": {"layers": 2, "freq_ghz": 4.0},
    }
    t0 = time.perf_counter()
    runs = {}
    for name, ov in configs.items():
        runs[name] = multi_start(apply_overrides(base, ov), 10, 0)
    elapsed = time.perf_counter() - t0
    b = {k: [r.best.cost.bips for r in v[1]] for k, v in runs.items()}
    ordered = sum(b["3D2L"][i] > b["2D2L"][i] > b["1L"][i] for i in range(10))
    ratio = runs["3D2L"][0].best.cost.area / runs["1L"][0].best.cost.area
    best = {k: max(v) for k, v in b.items()}
    ok = ordered >= 8 and ratio <= 0.65 and elapsed < 600
    record("C5 driver trend", ok,
           f"BIPS 3D2L > 2D2L > 1L in {ordered}/10 seeds (best {best['3D2L']:.3f} / "
           f"{best['2D2L']:.3f} / {best['1L']:.3f}), footprint ratio {ratio:.3f} (<= 0.65), "
           f"{elapsed:.0f} s (< 600 s)")


def _two_block(stacked: bool) -> Floorplan:
    a = PlacedBlock("a", 0, 0.0, 0.0, 0, 1000.0, 1000.0, 1)
    b = PlacedBlock("b", 0, 0.0 if stacked else 1000.0, 0.0, 1 if stacked else 0, 1000.0, 1000.0, 1)
    return Floorplan((a, b), 1000.0 if stacked else 2000.0, 1000.0, 2 if stacked else 1)


def test_c6_thermal():
    th = ThermalConfig()
    d = apply_overrides(load_design(DRIVER), {"layers": 2})
    rng = random.Random(6)
    fp = decode_full(random_cbl(d, rng), d).floorplan
    zero = thermal_map(fp, th, [0.0] * d.n)
    zero_ok = bool(np.all(zero.tiles == 27.0))
    stack = thermal_map(_two_block(True), th, [2000.0, 2000.0]).peak
    side = thermal_map(_two_block(False), th, [2000.0, 2000.0]).peak
    powers = [b.candidates[p.candidate_index].power for b, p in zip(d.blocks, fp.placed)]
    plain = thermal_map(fp, th, powers, vias=False).peak
    vias = thermal_map(fp, th, powers, vias=True).peak
    scale = (vias - 27.0) / (plain - 27.0)
    record("C6 thermal", zero_ok and stack >= side and abs(scale - 0.4) < 1e-12,
           f"zero power all tiles 27.0: {zero_ok}, stacked peak {stack:.2f} >= side-by-side {side:.2f}, "
           f"via rise ratio {scale:.15f}")


def test_c7_determinism():
    d = apply_overrides(load_design(DRIVER), {"layers": 2, "freq_ghz": 4.0})
    ov = {"layers": 2, "freq_ghz": 4.0}

    def text(**kw):
        report, _ = pack_report(d, ov, 3, 7, evals=1500, **kw)
        report["run"].pop("wall_time_s")
        return dumps_report(report)

    serial = text()
    again = text()
    threaded = text(jobs=3, executor="thread")
    procs = text(jobs=2, executor="process")
    ok = serial == again == threaded == procs
    record("C7 determinism", ok,
           f"serial x2, 3 threads, 2 processes: {'byte-identical' if ok else 'differ'} "
           f"({len(serial)} bytes, wall time excluded)")


def test_c8_area_only_unit_cubes():
    d = fixed_design([(1, 1, 1)] * 8, 2)
    d = with_config(d, weights=CostWeights(0, 1, 0, 0),
                    anneal=AnnealConfig(max_evaluations=50_000))
    areas, square = [], 0
    evals = []
    for seed in range(10):
        res = anneal(d, seed, record_trace=False)
        fp = res.best.floorplan
        areas.append(fp.extent_x * fp.extent_y)
        square += (fp.extent_x, fp.extent_y) == (2.0, 2.0)
        evals.append(res.evaluations)
    hits = sum(math.isclose(a, 4.0) for a in areas)
    record("C8 area-only unit cubes", hits >= 1 and max(evals) <= 50_000,
           f"footprint 4 reached in {hits}/10 seeds ({square} as a 2x2 square), "
           f"<= {max(evals)} evaluations per run")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
