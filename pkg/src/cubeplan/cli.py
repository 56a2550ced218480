"""Command-line entry point: ``cubeplan pack|decode|eval|render|oracle``.

Exit codes: 0 ok, 1 bad input, 2 runtime failure, 3 report mismatch.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .anneal import multi_start
from .cbl import Cbl3, decode_full
from .metrics import cost, reference_from
from .model import DesignError, load_design
from .oracle import Objective, enumerate_cbl, extreme_point_pack, objective_value
from .render import render_report
from .report import apply_overrides, build_report, dumps_report, run_metadata, verify_report


class _InputError(Exception):
    pass


def _weights(text: str) -> list[float]:
    parts = [float(v) for v in text.split(",")]
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("expected four comma-separated weights w1,w2,w3,w4")
    return parts


def _on_off(text: str) -> bool:
    if text not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected 'on' or 'off'")
    return text == "on"


def _add_design_overrides(p: argparse.ArgumentParser) -> None:
    p.add_argument("--layers", type=int, choices=range(1, 5), metavar="{1..4}",
                   help="layer limit; taller candidates are dropped")
    p.add_argument("--freq-ghz", type=float, help="target clock (3..6 GHz in the reference sweep)")
    p.add_argument("--weights", type=_weights, help="cost weights w1,w2,w3,w4")
    p.add_argument("--thermal-vias", type=_on_off, help="on|off: apply thermal-via mitigation")
    p.add_argument("--blocks-2d", action="store_true", help="use single-layer candidates only")


def _overrides(args) -> dict:
    return {
        "layers": args.layers,
        "freq_ghz": args.freq_ghz,
        "weights": args.weights,
        "thermal_vias": args.thermal_vias,
        "blocks_2d": bool(args.blocks_2d),
    }


def _load(path: str, overrides: dict):
    try:
        return apply_overrides(load_design(Path(path)), overrides)
    except OSError as exc:
        raise _InputError(f"cannot read design: {exc}") from None


def _write_outputs(report: dict, out: str, svg: str | None, heat: bool) -> None:
    Path(out).parent.mkdir(parents=True, exist_ok=True)
    Path(out).write_text(dumps_report(report))
    if svg:
        render_report(report, svg, heat=heat)


def pack_report(design, overrides: dict, runs: int = 1, seed: int | None = None, *,
                jobs: int = 1, executor: str = "process", evals: int | None = None):
    """Multi-start anneal and the report of its best run; also returns all runs."""
    seed = design.config.seed if seed is None else seed
    t0 = time.perf_counter()
    best, results = multi_start(design, runs, seed, jobs=jobs, executor=executor,
                                max_evaluations=evals)
    wall = time.perf_counter() - t0
    sol = best.best
    dec = decode_full(sol.cbl, design, sol.sel, enforce_layers=True)
    total_evals = sum(r.evaluations for r in results)
    report = build_report(design, dec, sol.cost, best.reference, overrides,
                          run_metadata(seed, runs, total_evals, wall))
    report["run"]["best_run_seed"] = best.seed
    return report, results


def cmd_pack(args) -> int:
    ov = _overrides(args)
    design = _load(args.design, ov)
    report, results = pack_report(design, ov, args.runs, args.seed, jobs=args.jobs,
                                  evals=args.evals)
    _write_outputs(report, args.out, args.svg, args.heat)
    if args.trace:
        path = Path(args.trace if isinstance(args.trace, str) else Path(args.out).with_name("trace.ndjson"))
        with path.open("w") as fh:
            for r in results:
                for rec in r.trace:
                    fh.write(json.dumps({"run_seed": r.seed, **rec.as_dict()}) + "\n")
    c = report["cost"]
    print(f"best BIPS {c['bips']:.4f}  area {c['area']:.4f} mm^2  temp {c['temp']:.2f} C  "
          f"wire {c['wire']:.3f} mm  layers {report['floorplan']['extent_z']}  -> {args.out}")
    return 0


def cmd_decode(args) -> int:
    ov = _overrides(args)
    ov["enforce_layers"] = not args.no_enforce
    design = _load(args.design, ov)
    try:
        cbl = Cbl3.from_text(args.cbl)
    except (ValueError, KeyError) as exc:
        raise _InputError(f"bad CBL text: {exc}") from None
    sel = None
    if args.selection:
        sel = [int(v) for v in args.selection.split(",")]
    t0 = time.perf_counter()
    dec = decode_full(cbl, design, sel, enforce_layers=not args.no_enforce)
    ref = reference_from(dec.floorplan, design)
    breakdown = cost(dec.floorplan, design, ref, thermal=True)
    report = build_report(design, dec, breakdown, ref, ov,
                          run_metadata(design.config.seed, 0, 1, time.perf_counter() - t0))
    _write_outputs(report, args.out, args.svg, args.heat)
    fp = dec.floorplan
    print(f"extents ({fp.extent_x:g}, {fp.extent_y:g}, {fp.extent_z})  "
          f"repairs applied {dec.repairs_applied}  -> {args.out}")
    return 0


def cmd_eval(args) -> int:
    try:
        report = json.loads(Path(args.report).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise _InputError(f"cannot read report: {exc}") from None
    design = _load(args.design, {})
    try:
        fresh, mismatches = verify_report(design, report)
    except (KeyError, TypeError) as exc:
        raise _InputError(f"malformed report: missing {exc}") from None
    print(json.dumps(fresh.as_dict(), indent=2))
    if mismatches:
        print("mismatch in: " + ", ".join(mismatches), file=sys.stderr)
        return 3
    return 0


def cmd_render(args) -> int:
    try:
        report = json.loads(Path(args.report).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise _InputError(f"cannot read report: {exc}") from None
    try:
        paths = render_report(report, args.out_dir, heat=args.heat)
    except OSError as exc:
        print(f"error: cannot write SVG files: {exc}", file=sys.stderr)
        return 2
    for p in paths:
        print(p)
    return 0


def cmd_oracle(args) -> int:
    ov = _overrides(args)
    design = _load(args.design, ov)
    sel = [int(v) for v in args.selection.split(",")] if args.selection else [0] * design.n
    objective = Objective(args.objective)
    out = {"objective": objective.value, "layer_limit": design.config.layer_limit}
    if args.method in ("ep", "both") and design.n > 8:
        raise _InputError("extreme-point oracle handles at most 8 blocks")
    if args.method in ("cbl", "both") and design.n > 4:
        raise _InputError("CBL enumeration handles at most 4 blocks")
    if args.method in ("ep", "both"):
        dims = [(b.candidates[j].width, b.candidates[j].height, b.candidates[j].layers)
                for b, j in zip(design.blocks, sel)]
        fp = extreme_point_pack(dims, design.config.layer_limit, objective)
        out["extreme_point"] = {"value": objective_value(fp, objective),
                                "extents": [fp.extent_x, fp.extent_y, fp.extent_z]}
    if args.method in ("cbl", "both"):
        dec = enumerate_cbl(design, sel, objective)
        fp = dec.floorplan
        out["enumerate_cbl"] = {"value": objective_value(fp, objective),
                                "extents": [fp.extent_x, fp.extent_y, fp.extent_z],
                                "cbl": dec.cbl.to_text()}
    print(json.dumps(out, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cubeplan", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pack", help="anneal a design and write report.json")
    p.add_argument("design")
    _add_design_overrides(p)
    p.add_argument("--seed", type=int)
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--jobs", type=int, default=1, help="parallel workers for --runs")
    p.add_argument("--evals", type=int, help="evaluation budget per run")
    p.add_argument("--out", default="report.json")
    p.add_argument("--svg", metavar="DIR")
    p.add_argument("--heat", action="store_true", help="shade SVGs with the thermal map")
    p.add_argument("--trace", nargs="?", const=True, default=None, metavar="PATH",
                   help="write trace.ndjson (next to --out unless PATH given)")
    p.set_defaults(func=cmd_pack)

    p = sub.add_parser("decode", help="decode one S/L/T triple and report it")
    p.add_argument("design")
    p.add_argument("cbl", help="e.g. 'S:a,b,c;L:X,Z;T:10110'")
    _add_design_overrides(p)
    p.add_argument("--selection", help="comma-separated candidate index per block")
    p.add_argument("--no-enforce", action="store_true", help="skip layer-limit repair")
    p.add_argument("--out", default="report.json")
    p.add_argument("--svg", metavar="DIR")
    p.add_argument("--heat", action="store_true")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("eval", help="recompute a report and check it")
    p.add_argument("design")
    p.add_argument("report")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("render", help="write one SVG per layer from a report")
    p.add_argument("report")
    p.add_argument("out_dir")
    p.add_argument("--heat", action="store_true")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("oracle", help="exhaustive packing of a small design")
    p.add_argument("design")
    _add_design_overrides(p)
    p.add_argument("--method", choices=("ep", "cbl", "both"), default="both")
    p.add_argument("--objective", choices=[o.value for o in Objective], default="volume")
    p.add_argument("--selection")
    p.set_defaults(func=cmd_oracle)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DesignError, _InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
