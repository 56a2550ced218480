"""Floorplan evaluation: footprint, wirelength, loop timing, BIPS, thermal proxy, cost."""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cbl import Floorplan, PlacedBlock
from .model import CriticalLoop, Design, DesignConfig, Net, ThermalConfig

UM_PER_MM = 1000.0
IPC_FLOOR = 1e-6


@dataclass(frozen=True)
class Reference:
    """Normalizers captured from the first solution of an annealing run."""
    area: float
    temp_rise: float
    wire: float

    def as_dict(self) -> dict:
        return {"area": self.area, "temp_rise": self.temp_rise, "wire": self.wire}


@dataclass(frozen=True)
class CostBreakdown:
    bips: float
    ipc: float
    area: float
    temp: float
    wire: float
    total: float
    loop_cycles: tuple[int, ...]

    def as_dict(self) -> dict:
        return {"bips": self.bips, "ipc": self.ipc, "area": self.area, "temp": self.temp,
                "wire": self.wire, "total": self.total, "loop_cycles": list(self.loop_cycles)}


@dataclass(frozen=True)
class ThermalMap:
    tiles: np.ndarray  # (layers, grid, grid), degrees C
    peak: float


def _center(p: PlacedBlock) -> tuple[float, float, float]:
    return (p.x + 0.5 * p.width, p.y + 0.5 * p.height, p.z + 0.5 * (p.layers - 1))


def footprint_area(fp: Floorplan) -> float:
    """Footprint in mm^2; the layer extent does not enter."""
    return (fp.extent_x / UM_PER_MM) * (fp.extent_y / UM_PER_MM)


def wirelength(fp: Floorplan, nets: Sequence[Net], via_z_wirelength: float) -> float:
    """Weighted HPWL over block centers plus a per-layer-crossing term, in mm."""
    at = fp.by_id()
    total = 0.0
    for net in nets:
        cs = [_center(at[p]) for p in net.pins]
        xs = [c[0] for c in cs]
        ys = [c[1] for c in cs]
        zs = [c[2] for c in cs]
        span = (max(xs) - min(xs)) + (max(ys) - min(ys)) + via_z_wirelength * (max(zs) - min(zs))
        total += net.weight * span
    return total / UM_PER_MM


def _latency(at: dict, design: Design, loop: CriticalLoop) -> float:
    cfg = design.config
    idx = design.index()
    path = loop.path
    total = 0.0
    for bid in path:
        total += design.blocks[idx[bid]].candidates[at[bid].candidate_index].delay
    for i, bid in enumerate(path):
        a = _center(at[bid])
        b = _center(at[path[(i + 1) % len(path)]])
        dist_mm = (abs(a[0] - b[0]) + abs(a[1] - b[1])) / UM_PER_MM
        total += cfg.wire_delay_per_mm * dist_mm + cfg.via_delay_per_layer * abs(a[2] - b[2])
    return total


def loop_latency(fp: Floorplan, loop: CriticalLoop, design: Design) -> float:
    """Block delays plus wire and via delay on every edge, closing edge included (ps)."""
    return _latency(fp.by_id(), design, loop)


def cycles_for(latency: float, cfg: DesignConfig) -> int:
    useful = cfg.useful_time
    if useful <= 0:
        raise ValueError("useful time per cycle must be positive")
    return max(1, math.ceil(latency / useful - 1e-9))


def loop_cycles(fp: Floorplan, loop: CriticalLoop, design: Design) -> int:
    return cycles_for(loop_latency(fp, loop, design), design.config)


def ipc_from_cycles(loops: Sequence[CriticalLoop], cycles: Sequence[int], cfg: DesignConfig) -> float:
    ipc = cfg.base_ipc
    for lp, c in zip(loops, cycles):
        extra = c - lp.base_cycles
        if extra > 0:
            ipc *= (1.0 - lp.sensitivity) ** extra
    return max(ipc, IPC_FLOOR)


def bips(fp: Floorplan, design: Design) -> tuple[float, float]:
    """Returns ``(ipc, bips)``."""
    cycles = [loop_cycles(fp, lp, design) for lp in design.loops]
    ipc = ipc_from_cycles(design.loops, cycles, design.config)
    return ipc, ipc * design.config.frequency_ghz


@functools.lru_cache(maxsize=8)
def _neighbour_counts(g1: int, g2: int) -> np.ndarray:
    count = np.zeros((g1, g2))
    count[1:, :] += 1
    count[:-1, :] += 1
    count[:, 1:] += 1
    count[:, :-1] += 1
    return count


def _smooth(rise: np.ndarray, passes: int, alpha: float) -> np.ndarray:
    if passes == 0 or alpha == 0.0:
        return rise
    count = _neighbour_counts(*rise.shape[-2:])
    for _ in range(passes):
        acc = np.zeros_like(rise)
        acc[..., 1:, :] += rise[..., :-1, :]
        acc[..., :-1, :] += rise[..., 1:, :]
        acc[..., :, 1:] += rise[..., :, :-1]
        acc[..., :, :-1] += rise[..., :, 1:]
        mean = np.where(count > 0, acc / np.maximum(count, 1), rise)
        rise = (1.0 - alpha) * rise + alpha * mean
    return rise


def power_tiles(fp: Floorplan, powers: Sequence[float], grid: int) -> np.ndarray:
    """Per-layer tile power (W), each block spread uniformly over its area and
    split evenly across the layers it spans."""
    n = len(fp.placed)
    nl = max(fp.extent_z, 1)
    x = np.array([p.x for p in fp.placed])
    y = np.array([p.y for p in fp.placed])
    w = np.array([p.width for p in fp.placed])
    h = np.array([p.height for p in fp.placed])
    steps = np.arange(grid + 1) / grid
    ex = steps * fp.extent_x
    ey = steps * fp.extent_y
    fx = np.clip(np.minimum((x + w)[:, None], ex[None, 1:]) - np.maximum(x[:, None], ex[None, :-1]), 0.0, None) / w[:, None]
    fy = np.clip(np.minimum((y + h)[:, None], ey[None, 1:]) - np.maximum(y[:, None], ey[None, :-1]), 0.0, None) / h[:, None]
    per_layer = np.zeros((n, nl))
    for i, p in enumerate(fp.placed):
        per_layer[i, p.z:p.z + p.layers] = powers[i] / 1000.0 / p.layers
    return np.einsum("nl,ni,nj->lij", per_layer, fx, fy)


def thermal_rise(fp: Floorplan, powers: Sequence[float], th: ThermalConfig) -> np.ndarray:
    """Temperature rise above ambient per tile, before any via mitigation."""
    if fp.extent_x <= 0 or fp.extent_y <= 0:
        raise ValueError("zero-area footprint")
    g = th.grid
    P = power_tiles(fp, powers, g)
    tile_area = (fp.extent_x / UM_PER_MM / g) * (fp.extent_y / UM_PER_MM / g)
    # heat through the interface below layer j: everything on layers >= j
    flux = np.cumsum(P[::-1], axis=0)[::-1]
    rise = np.cumsum(th.layer_resistance * flux / tile_area, axis=0)
    return _smooth(rise, th.smoothing_passes, th.smoothing_alpha)


def _block_powers(fp: Floorplan, design: Design) -> list[float]:
    return [b.candidates[p.candidate_index].power for b, p in zip(design.blocks, fp.placed)]


def thermal_map(fp: Floorplan, th: ThermalConfig, powers: Sequence[float],
                vias: bool | None = None) -> ThermalMap:
    """Resistive-column proxy with a heat sink under layer 0.

    ``vias`` overrides ``th.vias_enabled``; when on, every rise above ambient
    is scaled by ``1 - via_mitigation``.
    """
    rise = thermal_rise(fp, powers, th)
    if th.vias_enabled if vias is None else vias:
        rise = rise * (1.0 - th.via_mitigation)
    tiles = th.ambient + rise
    return ThermalMap(tiles, float(tiles.max()))


def design_thermal_map(fp: Floorplan, design: Design, vias: bool | None = None) -> ThermalMap:
    return thermal_map(fp, design.config.thermal, _block_powers(fp, design), vias)


def raw_metrics(fp: Floorplan, design: Design, thermal: bool = True) -> dict:
    at = fp.by_id()
    cycles = tuple(cycles_for(_latency(at, design, lp), design.config) for lp in design.loops)
    ipc = ipc_from_cycles(design.loops, cycles, design.config) if design.loops else design.config.base_ipc
    temp = design_thermal_map(fp, design).peak if thermal else math.nan
    return {
        "cycles": cycles,
        "ipc": ipc,
        "bips": ipc * design.config.frequency_ghz,
        "area": footprint_area(fp),
        "temp": temp,
        "wire": wirelength(fp, design.nets, design.config.via_z_wirelength),
    }


def reference_from(fp: Floorplan, design: Design) -> Reference:
    m = raw_metrics(fp, design, thermal=design.config.weights.w3 > 0)
    rise = m["temp"] - design.config.thermal.ambient
    return Reference(area=m["area"], temp_rise=rise if rise == rise else 0.0, wire=m["wire"])


def _norm(value: float, ref: float) -> float:
    return value / ref if ref > 0 else value


def cost(fp: Floorplan, design: Design, reference: Reference | None = None,
         thermal: bool = True) -> CostBreakdown:
    """Weighted cost; area, temperature rise and wire are divided by the
    reference values so the weights act on comparable magnitudes.

    Terms with zero weight are left out of the total. With ``thermal=False``
    the peak temperature is not computed (reported as NaN) unless w3 > 0.
    """
    w = design.config.weights
    m = raw_metrics(fp, design, thermal=thermal or w.w3 > 0)
    ref = reference or Reference(m["area"], m["temp"] - design.config.thermal.ambient
                                 if m["temp"] == m["temp"] else 0.0, m["wire"])
    total = 0.0
    if w.w1 > 0:
        total += w.w1 / m["bips"]
    if w.w2 > 0:
        total += w.w2 * _norm(m["area"], ref.area)
    if w.w3 > 0:
        total += w.w3 * _norm(m["temp"] - design.config.thermal.ambient, ref.temp_rise)
    if w.w4 > 0:
        total += w.w4 * _norm(m["wire"], ref.wire)
    return CostBreakdown(bips=m["bips"], ipc=m["ipc"], area=m["area"], temp=m["temp"],
                         wire=m["wire"], total=total, loop_cycles=m["cycles"])
