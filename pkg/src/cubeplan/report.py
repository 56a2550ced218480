"""JSON report: build from a solution, and re-verify against the design file."""
from __future__ import annotations

import hashlib
import json
from dataclasses import replace
from typing import Any, Mapping

from .cbl import Cbl3, Decoded, Floorplan, PlacedBlock, decode_full
from .kernel import BACKEND
from .metrics import (CostBreakdown, Reference, cost, design_thermal_map, loop_latency,
                      cycles_for)
from .model import (CostWeights, Design, DesignError, design_to_dict, only_2d, with_config,
                    with_frequency, with_layer_limit)

REPORT_VERSION = 1


def design_digest(design: Design) -> str:
    text = json.dumps(design_to_dict(design), sort_keys=True)
    return hashlib.sha256(text.encode()).hexdigest()


def apply_overrides(design: Design, ov: Mapping[str, Any]) -> Design:
    """Apply CLI experiment overrides in a fixed order."""
    if ov.get("layers") is not None:
        design = with_layer_limit(design, int(ov["layers"]))
    if ov.get("blocks_2d"):
        design = only_2d(design)
    if ov.get("freq_ghz") is not None:
        design = with_frequency(design, float(ov["freq_ghz"]))
    if ov.get("weights") is not None:
        design = with_config(design, weights=CostWeights(*[float(w) for w in ov["weights"]]))
    if ov.get("thermal_vias") is not None:
        th = replace(design.config.thermal, vias_enabled=bool(ov["thermal_vias"]))
        design = with_config(design, thermal=th)
    return design


def floorplan_dict(fp: Floorplan) -> dict:
    return {
        "extent_x": fp.extent_x, "extent_y": fp.extent_y, "extent_z": fp.extent_z,
        "placed": [
            {"id": p.id, "candidate_index": p.candidate_index, "x": p.x, "y": p.y, "z": p.z,
             "width": p.width, "height": p.height, "layers": p.layers}
            for p in fp.placed
        ],
    }


def floorplan_from_dict(d: Mapping[str, Any]) -> Floorplan:
    placed = tuple(
        PlacedBlock(str(p["id"]), int(p["candidate_index"]), float(p["x"]), float(p["y"]),
                    int(p["z"]), float(p["width"]), float(p["height"]), int(p["layers"]))
        for p in d["placed"]
    )
    return Floorplan(placed, float(d["extent_x"]), float(d["extent_y"]), int(d["extent_z"]))


def build_report(design: Design, dec: Decoded, breakdown: CostBreakdown, reference: Reference,
                 overrides: Mapping[str, Any], run: Mapping[str, Any]) -> dict:
    fp = dec.floorplan
    th_plain = design_thermal_map(fp, design, vias=False)
    th_vias = design_thermal_map(fp, design, vias=True)
    shown = th_vias if design.config.thermal.vias_enabled else th_plain
    loops = []
    for lp in design.loops:
        lat = loop_latency(fp, lp, design)
        loops.append({"name": lp.name, "latency_ps": lat, "cycles": cycles_for(lat, design.config),
                      "base_cycles": lp.base_cycles})
    return {
        "version": REPORT_VERSION,
        "design": {
            "digest": design_digest(design),
            "blocks": design.n,
            "nets": len(design.nets),
            "loops": len(design.loops),
            "layer_limit": design.config.layer_limit,
            "frequency_ghz": design.config.frequency_ghz,
        },
        "overrides": dict(overrides),
        "cbl": dec.cbl.to_text(),
        "selection": [
            {"id": b.id, "candidate_index": j, "strategy": b.candidates[j].strategy.value,
             "layers": b.candidates[j].layers}
            for b, j in zip(design.blocks, dec.selection)
        ],
        "floorplan": floorplan_dict(fp),
        "cost": breakdown.as_dict(),
        "reference": reference.as_dict(),
        "loops": loops,
        "thermal": {
            "peak_no_vias": th_plain.peak,
            "peak_with_vias": th_vias.peak,
            "vias_enabled": design.config.thermal.vias_enabled,
            "tiles": shown.tiles.tolist(),
        },
        "repairs": {
            "clamped_runs": dec.repairs[0], "zero_runs": dec.repairs[1],
            "exhausted_t": dec.repairs[2], "layer_fixes": dec.repairs[3],
            "total": dec.repairs_applied,
        },
        "run": dict(run),
    }


def dumps_report(report: Mapping[str, Any]) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def _diff(path: str, stored: Any, fresh: Any, out: list[str]) -> None:
    if isinstance(fresh, dict) and isinstance(stored, dict):
        for k in sorted(set(fresh) | set(stored)):
            _diff(f"{path}.{k}", stored.get(k), fresh.get(k), out)
    elif isinstance(fresh, list) and isinstance(stored, list) and len(fresh) == len(stored):
        for i, (a, b) in enumerate(zip(stored, fresh)):
            _diff(f"{path}[{i}]", a, b, out)
    elif stored != fresh:
        out.append(path)


def verify_report(design: Design, report: Mapping[str, Any]) -> tuple[CostBreakdown, list[str]]:
    """Recompute a stored report from the original design file.

    The stored floorplan is re-evaluated with the stored normalizers, and the
    stored CBL and selection are decoded again; returns the fresh breakdown
    and the list of fields that differ.
    """
    design = apply_overrides(design, report.get("overrides", {}))
    mismatches: list[str] = []
    if report["design"]["digest"] != design_digest(design):
        mismatches.append("design.digest")

    fp = floorplan_from_dict(report["floorplan"])
    ids = [p.id for p in fp.placed]
    if ids != design.ids:
        raise DesignError("report floorplan does not list this design's blocks in order")
    for b, p in zip(design.blocks, fp.placed):
        if not 0 <= p.candidate_index < len(b.candidates):
            raise DesignError(f"report: candidate index out of range for '{b.id}'")

    ref = Reference(**report["reference"])
    fresh = cost(fp, design, ref, thermal=True)
    _diff("cost", report["cost"], fresh.as_dict(), mismatches)

    sel = [p.candidate_index for p in fp.placed]
    enforce = bool(report.get("overrides", {}).get("enforce_layers", True))
    dec = decode_full(Cbl3.from_text(report["cbl"]), design, sel, enforce_layers=enforce)
    _diff("floorplan", report["floorplan"], floorplan_dict(dec.floorplan), mismatches)
    return fresh, mismatches


def run_metadata(seed: int, runs: int, evaluations: int, wall: float) -> dict:
    return {"seed": seed, "runs": runs, "evaluations": evaluations,
            "wall_time_s": wall, "backend": BACKEND}
