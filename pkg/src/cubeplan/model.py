"""Design data: blocks, implementation candidates, nets, critical loops, config.

Designs are read from a single JSON document and are immutable once loaded.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from pathlib import Path
from typing import Any, Mapping, Sequence

VIA_SIDE_UM = 0.7
VIA_AREA_UM2 = VIA_SIDE_UM * VIA_SIDE_UM


class DesignError(ValueError):
    """Raised for malformed or inconsistent design documents."""


class Strategy(str, enum.Enum):
    BASE_2D = "Base2D"
    WORDLINE_FOLD = "WordlineFold"
    PORT_PARTITION = "PortPartition"


@dataclass(frozen=True)
class ImplementationCandidate:
    width: float
    height: float
    layers: int = 1
    delay: float = 0.0
    power: float = 0.0
    strategy: Strategy = Strategy.BASE_2D

    @property
    def area(self) -> float:
        return self.width * self.height


@dataclass(frozen=True)
class BlockSpec:
    id: str
    name: str
    candidates: tuple[ImplementationCandidate, ...]
    ports: int = 1


@dataclass(frozen=True)
class Net:
    pins: tuple[str, ...]
    weight: float = 1.0


@dataclass(frozen=True)
class CriticalLoop:
    name: str
    path: tuple[str, ...]
    base_cycles: int
    sensitivity: float


@dataclass(frozen=True)
class CostWeights:
    w1: float = 1.0
    w2: float = 0.0
    w3: float = 0.0
    w4: float = 0.0

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.w1, self.w2, self.w3, self.w4)


@dataclass(frozen=True)
class ThermalConfig:
    ambient: float = 27.0
    grid: int = 16
    # K*mm^2/W per interface between adjacent layers (and layer 0 to sink)
    layer_resistance: float = 10.0
    smoothing_passes: int = 2
    smoothing_alpha: float = 0.5
    via_mitigation: float = 0.6
    vias_enabled: bool = False


@dataclass(frozen=True)
class AnnealConfig:
    initial_temperature: float | str = "auto"
    cooling_ratio: float = 0.95
    moves_per_temperature: int = 200
    min_temperature: float = 1e-5
    max_evaluations: int = 20000
    move_weights: tuple[float, float, float, float] = (1.0, 1.0, 1.0, 1.0)


@dataclass(frozen=True)
class DesignConfig:
    target_cycle_time: float = 250.0
    clock_overhead: float = 46.0
    layer_limit: int = 1
    frequency: float | None = None
    base_ipc: float = 1.0
    weights: CostWeights = field(default_factory=CostWeights)
    wire_delay_per_mm: float = 60.0
    via_delay_per_layer: float = 5.0
    via_z_wirelength: float = 50.0
    whitespace_fraction: float = 0.10
    thermal: ThermalConfig = field(default_factory=ThermalConfig)
    anneal: AnnealConfig = field(default_factory=AnnealConfig)
    seed: int = 0

    @property
    def useful_time(self) -> float:
        return self.target_cycle_time - self.clock_overhead

    @property
    def frequency_ghz(self) -> float:
        if self.frequency is not None:
            return self.frequency
        return 1000.0 / self.target_cycle_time


@dataclass(frozen=True)
class Design:
    blocks: tuple[BlockSpec, ...]
    nets: tuple[Net, ...]
    loops: tuple[CriticalLoop, ...]
    config: DesignConfig
    # set once dimensions carry the whitespace reserve
    whitespace_applied: bool = True

    @property
    def n(self) -> int:
        return len(self.blocks)

    @property
    def ids(self) -> list[str]:
        return [b.id for b in self.blocks]

    @cached_property
    def _index(self) -> dict[str, int]:
        return {b.id: i for i, b in enumerate(self.blocks)}

    def index(self) -> dict[str, int]:
        return self._index


# ---------------------------------------------------------------------------
# candidate generator

DEFAULT_SCALING: dict[Strategy, dict[str, dict[int, float]]] = {
    Strategy.WORDLINE_FOLD: {
        "delay": {2: 0.70, 3: 0.62, 4: 0.57},
        "power": {2: 0.85, 3: 0.80, 4: 0.78},
    },
    Strategy.PORT_PARTITION: {
        "delay": {2: 0.77, 3: 0.70, 4: 0.68},
        "power": {2: 0.80, 3: 0.75, 4: 0.73},
    },
}


def _factor(table: Mapping[Any, float], k: int) -> float:
    table = {int(key): float(v) for key, v in table.items()}
    if k in table:
        return table[k]
    below = [key for key in table if key <= k]
    if not below:
        return 1.0
    return table[max(below)]


def generate_candidates(
    base: Mapping[str, Any],
    max_layers: int,
    scaling: Mapping[Any, Mapping[str, Mapping[Any, float]]] | None = None,
    driver_dup_overhead: float = 0.05,
    via_count: int = 0,
) -> list[ImplementationCandidate]:
    """Expand a 2D block into wordline-folded and port-partitioned variants.

    ``base`` needs ``width``, ``height``, ``delay``, ``power`` and optionally
    ``ports`` (default 1). ``scaling`` maps a strategy name to ``delay`` and
    ``power`` factor tables keyed by layer count; missing entries fall back to
    :data:`DEFAULT_SCALING`. ``via_count`` vias of 0.7 x 0.7 um are added to
    every port-partitioned candidate's area.
    """
    if max_layers < 1:
        raise ValueError("max_layers must be >= 1")
    w, h = float(base["width"]), float(base["height"])
    if w <= 0 or h <= 0:
        raise ValueError("base dimensions must be positive")
    delay, power = float(base.get("delay", 0.0)), float(base.get("power", 0.0))
    ports = int(base.get("ports", 1))

    tables: dict[Strategy, dict[str, Mapping[Any, float]]] = {
        s: dict(t) for s, t in DEFAULT_SCALING.items()
    }
    for key, t in (scaling or {}).items():
        tables[Strategy(key)].update(t)

    out = [ImplementationCandidate(w, h, 1, delay, power, Strategy.BASE_2D)]
    for k in range(2, max_layers + 1):
        wf = tables[Strategy.WORDLINE_FOLD]
        out.append(ImplementationCandidate(
            width=w * (1.0 + driver_dup_overhead),
            height=h / k,
            layers=k,
            delay=delay * _factor(wf["delay"], k),
            power=power * _factor(wf["power"], k),
            strategy=Strategy.WORDLINE_FOLD,
        ))
        if k <= ports:
            pp = tables[Strategy.PORT_PARTITION]
            m = min(k, ports)
            pw, ph = w / m, h / m
            if via_count > 0:
                grow = math.sqrt((pw * ph + via_count * VIA_AREA_UM2) / (pw * ph))
                pw, ph = pw * grow, ph * grow
            out.append(ImplementationCandidate(
                width=pw,
                height=ph,
                layers=k,
                delay=delay * _factor(pp["delay"], k),
                power=power * _factor(pp["power"], k),
                strategy=Strategy.PORT_PARTITION,
            ))
    return out


# ---------------------------------------------------------------------------
# parsing / validation

def _req(d: Mapping[str, Any], key: str, where: str) -> Any:
    if key not in d:
        raise DesignError(f"{where}: missing field '{key}'")
    return d[key]


def _parse_candidate(d: Mapping[str, Any], where: str) -> ImplementationCandidate:
    try:
        c = ImplementationCandidate(
            width=float(_req(d, "width", where)),
            height=float(_req(d, "height", where)),
            layers=int(d.get("layers", 1)),
            delay=float(d.get("delay", 0.0)),
            power=float(d.get("power", 0.0)),
            strategy=Strategy(d.get("strategy", "Base2D")),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, DesignError):
            raise
        raise DesignError(f"{where}: {exc}") from None
    if not (c.width > 0 and c.height > 0):
        raise DesignError(f"{where}: width and height must be positive")
    if c.layers < 1:
        raise DesignError(f"{where}.layers={c.layers} must be >= 1")
    if c.delay < 0 or c.power < 0:
        raise DesignError(f"{where}: delay and power must be non-negative")
    return c


def _parse_thermal(d: Mapping[str, Any]) -> ThermalConfig:
    th = ThermalConfig(**d)
    if th.grid < 1:
        raise DesignError("config.thermal.grid must be >= 1")
    if not 0.0 <= th.via_mitigation < 1.0:
        raise DesignError("config.thermal.via_mitigation must lie in [0, 1)")
    if not 0.0 <= th.smoothing_alpha <= 1.0:
        raise DesignError("config.thermal.smoothing_alpha must lie in [0, 1]")
    if th.smoothing_passes < 0:
        raise DesignError("config.thermal.smoothing_passes must be >= 0")
    return th


def _parse_anneal(d: Mapping[str, Any]) -> AnnealConfig:
    d = dict(d)
    if "move_weights" in d:
        d["move_weights"] = tuple(float(v) for v in d["move_weights"])
    an = AnnealConfig(**d)
    if not 0.0 < an.cooling_ratio < 1.0:
        raise DesignError("config.anneal.cooling_ratio must lie in (0, 1)")
    if len(an.move_weights) != 4 or min(an.move_weights) < 0 or max(an.move_weights) <= 0:
        raise DesignError("config.anneal.move_weights needs 4 non-negative values, one positive")
    if an.moves_per_temperature < 1 or an.max_evaluations < 1:
        raise DesignError("config.anneal: moves_per_temperature and max_evaluations must be positive")
    it = an.initial_temperature
    if it != "auto" and not (isinstance(it, (int, float)) and it > 0):
        raise DesignError("config.anneal.initial_temperature must be positive or 'auto'")
    return an


def _parse_config(d: Mapping[str, Any]) -> DesignConfig:
    d = dict(d)
    d.pop("whitespace_applied", None)
    try:
        if "weights" in d:
            w = d["weights"]
            d["weights"] = CostWeights(*w) if isinstance(w, (list, tuple)) else CostWeights(**w)
        if "thermal" in d:
            d["thermal"] = _parse_thermal(d["thermal"])
        if "anneal" in d:
            d["anneal"] = _parse_anneal(d["anneal"])
        cfg = DesignConfig(**d)
    except TypeError as exc:
        raise DesignError(f"config: {exc}") from None
    return validate_config(cfg)


def validate_config(cfg: DesignConfig) -> DesignConfig:
    if cfg.target_cycle_time <= 0:
        raise DesignError("config.target_cycle_time must be positive")
    if not 0 <= cfg.clock_overhead < cfg.target_cycle_time:
        raise DesignError("config.clock_overhead must be below target_cycle_time")
    if cfg.layer_limit < 1:
        raise DesignError("config.layer_limit must be >= 1")
    if cfg.frequency is not None:
        if abs(cfg.frequency * cfg.target_cycle_time - 1000.0) > 1.0:
            raise DesignError(
                f"config.frequency={cfg.frequency} GHz inconsistent with "
                f"target_cycle_time={cfg.target_cycle_time} ps")
    if cfg.base_ipc <= 0:
        raise DesignError("config.base_ipc must be positive")
    if min(cfg.weights.as_tuple()) < 0 or max(cfg.weights.as_tuple()) <= 0:
        raise DesignError("config.weights must be non-negative with at least one positive")
    if cfg.whitespace_fraction < 0:
        raise DesignError("config.whitespace_fraction must be >= 0")
    if cfg.wire_delay_per_mm < 0 or cfg.via_delay_per_layer < 0 or cfg.via_z_wirelength < 0:
        raise DesignError("config: wire/via coefficients must be non-negative")
    if not 0 <= cfg.seed < 2**64:
        raise DesignError("config.seed must be a 64-bit unsigned integer")
    return cfg


def _parse_block(d: Mapping[str, Any], where: str, layer_limit: int) -> BlockSpec:
    bid = str(_req(d, "id", where))
    ports = int(d.get("ports", 1))
    if ports < 1:
        raise DesignError(f"{where}.ports must be >= 1")
    if "candidates" in d:
        raw = d["candidates"]
        if not isinstance(raw, list) or not raw:
            raise DesignError(f"{where} ({bid}): candidate list is empty")
        cands = [_parse_candidate(c, f"{where}.candidates[{j}]") for j, c in enumerate(raw)]
    elif "generate" in d:
        g = d["generate"]
        base = dict(_req(g, "base", f"{where}.generate"))
        base.setdefault("ports", ports)
        cands = generate_candidates(
            base,
            int(g.get("max_layers", layer_limit)),
            scaling=g.get("scaling"),
            driver_dup_overhead=float(g.get("driver_dup_overhead", 0.05)),
            via_count=int(g.get("via_count", 0)),
        )
    else:
        raise DesignError(f"{where} ({bid}): needs 'candidates' or 'generate'")
    for j, c in enumerate(cands):
        if c.layers > layer_limit:
            raise DesignError(
                f"{where}.candidates[{j}] of block '{bid}': layers={c.layers} "
                f"exceeds layer_limit={layer_limit}")
    return BlockSpec(id=bid, name=str(d.get("name", bid)), candidates=tuple(cands), ports=ports)


def inflate(c: ImplementationCandidate, fraction: float) -> ImplementationCandidate:
    s = math.sqrt(1.0 + fraction)
    return replace(c, width=c.width * s, height=c.height * s)


def design_from_dict(doc: Mapping[str, Any]) -> Design:
    if not isinstance(doc, Mapping):
        raise DesignError("design document must be a JSON object")
    for key in ("blocks", "config"):
        _req(doc, key, "design")
    cfg = _parse_config(doc["config"])
    applied = bool(doc["config"].get("whitespace_applied", False)) if isinstance(doc["config"], Mapping) else False

    blocks = [_parse_block(b, f"blocks[{i}]", cfg.layer_limit) for i, b in enumerate(doc["blocks"])]
    if not blocks:
        raise DesignError("design has no blocks")
    ids = [b.id for b in blocks]
    if len(set(ids)) != len(ids):
        dup = sorted({i for i in ids if ids.count(i) > 1})
        raise DesignError(f"blocks: duplicate ids {dup}")
    known = set(ids)

    nets = []
    for i, nd in enumerate(doc.get("nets", [])):
        pins = tuple(str(p) for p in _req(nd, "pins", f"nets[{i}]"))
        if len(pins) < 2:
            raise DesignError(f"nets[{i}]: needs at least 2 pins")
        if len(set(pins)) != len(pins):
            raise DesignError(f"nets[{i}]: duplicate pins")
        for p in pins:
            if p not in known:
                raise DesignError(f"nets[{i}].pins: unknown block id '{p}'")
        weight = float(nd.get("weight", 1.0))
        if weight < 0:
            raise DesignError(f"nets[{i}].weight must be non-negative")
        nets.append(Net(pins, weight))

    loops = []
    for i, ld in enumerate(doc.get("loops", [])):
        path = tuple(str(p) for p in _req(ld, "path", f"loops[{i}]"))
        if not path:
            raise DesignError(f"loops[{i}].path is empty")
        for p in path:
            if p not in known:
                raise DesignError(f"loops[{i}].path: unknown block id '{p}'")
        base_cycles = int(_req(ld, "base_cycles", f"loops[{i}]"))
        sens = float(_req(ld, "sensitivity", f"loops[{i}]"))
        if base_cycles < 1:
            raise DesignError(f"loops[{i}].base_cycles must be positive")
        if not 0.0 <= sens < 1.0:
            raise DesignError(f"loops[{i}].sensitivity must lie in [0, 1)")
        loops.append(CriticalLoop(str(ld.get("name", f"loop{i}")), path, base_cycles, sens))

    if not applied and cfg.whitespace_fraction > 0:
        blocks = [
            replace(b, candidates=tuple(inflate(c, cfg.whitespace_fraction) for c in b.candidates))
            for b in blocks
        ]
    return Design(tuple(blocks), tuple(nets), tuple(loops), cfg, whitespace_applied=True)


def load_design(source: str | Path | Mapping[str, Any]) -> Design:
    """Load and validate a design from a path, a JSON string or a parsed dict.

    Block footprints are inflated by ``sqrt(1 + whitespace_fraction)`` per side
    unless the document says the reserve is already included.
    """
    if isinstance(source, Mapping):
        return design_from_dict(source)
    text: str
    if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith("{")):
        text = Path(source).read_text()
    else:
        text = source
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DesignError(f"parse error: {exc}") from None
    return design_from_dict(doc)


def _candidate_dict(c: ImplementationCandidate) -> dict[str, Any]:
    return {
        "width": c.width, "height": c.height, "layers": c.layers,
        "delay": c.delay, "power": c.power, "strategy": c.strategy.value,
    }


def config_to_dict(cfg: DesignConfig) -> dict[str, Any]:
    th, an = cfg.thermal, cfg.anneal
    return {
        "target_cycle_time": cfg.target_cycle_time,
        "clock_overhead": cfg.clock_overhead,
        "layer_limit": cfg.layer_limit,
        "frequency": cfg.frequency,
        "base_ipc": cfg.base_ipc,
        "weights": {"w1": cfg.weights.w1, "w2": cfg.weights.w2,
                    "w3": cfg.weights.w3, "w4": cfg.weights.w4},
        "wire_delay_per_mm": cfg.wire_delay_per_mm,
        "via_delay_per_layer": cfg.via_delay_per_layer,
        "via_z_wirelength": cfg.via_z_wirelength,
        "whitespace_fraction": cfg.whitespace_fraction,
        "thermal": {
            "ambient": th.ambient, "grid": th.grid, "layer_resistance": th.layer_resistance,
            "smoothing_passes": th.smoothing_passes, "smoothing_alpha": th.smoothing_alpha,
            "via_mitigation": th.via_mitigation, "vias_enabled": th.vias_enabled,
        },
        "anneal": {
            "initial_temperature": an.initial_temperature,
            "cooling_ratio": an.cooling_ratio,
            "moves_per_temperature": an.moves_per_temperature,
            "min_temperature": an.min_temperature,
            "max_evaluations": an.max_evaluations,
            "move_weights": list(an.move_weights),
        },
        "seed": cfg.seed,
    }


def design_to_dict(design: Design) -> dict[str, Any]:
    """Serialize a loaded design; dimensions are written with the reserve applied."""
    cfg = config_to_dict(design.config)
    cfg["whitespace_applied"] = design.whitespace_applied
    return {
        "blocks": [
            {"id": b.id, "name": b.name, "ports": b.ports,
             "candidates": [_candidate_dict(c) for c in b.candidates]}
            for b in design.blocks
        ],
        "nets": [{"pins": list(n.pins), "weight": n.weight} for n in design.nets],
        "loops": [
            {"name": lp.name, "path": list(lp.path), "base_cycles": lp.base_cycles,
             "sensitivity": lp.sensitivity}
            for lp in design.loops
        ],
        "config": cfg,
    }


def dump_design(design: Design) -> str:
    return json.dumps(design_to_dict(design), indent=2)


# ---------------------------------------------------------------------------
# derived designs (CLI experiment axes)

def with_layer_limit(design: Design, layers: int) -> Design:
    """Return a copy constrained to ``layers``; taller candidates are dropped."""
    if layers < 1:
        raise DesignError("layer limit must be >= 1")
    blocks = []
    for b in design.blocks:
        kept = tuple(c for c in b.candidates if c.layers <= layers)
        if not kept:
            raise DesignError(f"block '{b.id}' has no candidate with at most {layers} layers")
        blocks.append(replace(b, candidates=kept))
    cfg = replace(design.config, layer_limit=layers)
    return replace(design, blocks=tuple(blocks), config=cfg)


def with_frequency(design: Design, ghz: float) -> Design:
    if ghz <= 0:
        raise DesignError("frequency must be positive")
    cfg = replace(design.config, target_cycle_time=1000.0 / ghz, frequency=float(ghz))
    return replace(design, config=validate_config(cfg))


def only_2d(design: Design) -> Design:
    """Restrict every block to its single-layer candidates."""
    blocks = []
    for b in design.blocks:
        kept = tuple(c for c in b.candidates if c.layers == 1)
        if not kept:
            raise DesignError(f"block '{b.id}' has no single-layer candidate")
        blocks.append(replace(b, candidates=kept))
    return replace(design, blocks=tuple(blocks))


def with_config(design: Design, **changes: Any) -> Design:
    return replace(design, config=validate_config(replace(design.config, **changes)))


def fixed_design(dims: Sequence[tuple[float, float, int]], layer_limit: int = 1,
                 **config: Any) -> Design:
    """Small helper: one single-candidate block per ``(width, height, layers)``.

    No whitespace reserve is applied; intended for packing experiments.
    """
    blocks = tuple(
        BlockSpec(f"b{i}", f"b{i}", (ImplementationCandidate(float(w), float(h), int(z)),))
        for i, (w, h, z) in enumerate(dims)
    )
    cfg = validate_config(DesignConfig(layer_limit=layer_limit, whitespace_fraction=0.0, **config))
    for b in blocks:
        if b.candidates[0].layers > layer_limit:
            raise DesignError(f"block '{b.id}' exceeds layer_limit={layer_limit}")
    return Design(blocks, (), (), cfg)
