"""Per-layer SVG drawings of a report's floorplan."""
from __future__ import annotations

from pathlib import Path
from typing import Any, Mapping
from xml.sax.saxutils import escape

CANVAS_PX = 800.0
MARGIN_PX = 20.0


def _heat_color(t: float, lo: float, hi: float) -> str:
    f = 0.0 if hi <= lo else (t - lo) / (hi - lo)
    r = int(255 * f)
    b = int(255 * (1.0 - f))
    return f"rgb({r},64,{b})"


def layer_svg(report: Mapping[str, Any], layer: int, heat: bool = False) -> str:
    """SVG for one layer. Micrometers map to pixels by
    ``px = MARGIN + x * scale`` and ``py = MARGIN + (extent_y - y) * scale``;
    ``scale`` is stored on the root element as ``data-scale``."""
    fp = report["floorplan"]
    ex, ey = fp["extent_x"], fp["extent_y"]
    scale = CANVAS_PX / max(ex, ey)
    width = 2 * MARGIN_PX + ex * scale
    height = 2 * MARGIN_PX + ey * scale
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.3f}" height="{height:.3f}" '
        f'data-layer="{layer}" data-scale="{scale!r}" data-margin="{MARGIN_PX!r}" '
        f'data-extent-y="{ey!r}">',
        f'<rect x="{MARGIN_PX}" y="{MARGIN_PX}" width="{ex * scale!r}" height="{ey * scale!r}" '
        f'fill="none" stroke="#888" stroke-dasharray="4 2"/>',
    ]
    if heat and "tiles" in report.get("thermal", {}):
        tiles = report["thermal"]["tiles"]
        if layer < len(tiles):
            grid = tiles[layer]
            flat = [t for layer_tiles in tiles for row in layer_tiles for t in row]
            lo, hi = min(flat), max(flat)
            g1, g2 = len(grid), len(grid[0])
            tw, th = ex / g1, ey / g2
            for i in range(g1):
                for j in range(g2):
                    px = MARGIN_PX + i * tw * scale
                    py = MARGIN_PX + (ey - (j + 1) * th) * scale
                    out.append(
                        f'<rect class="heat" x="{px!r}" y="{py!r}" width="{tw * scale!r}" '
                        f'height="{th * scale!r}" fill="{_heat_color(grid[i][j], lo, hi)}" '
                        f'fill-opacity="0.45" stroke="none"/>')
    for p in fp["placed"]:
        if not p["z"] <= layer < p["z"] + p["layers"]:
            continue
        px = MARGIN_PX + p["x"] * scale
        py = MARGIN_PX + (ey - p["y"] - p["height"]) * scale
        w, h = p["width"] * scale, p["height"] * scale
        bid = escape(str(p["id"]))
        out.append(
            f'<rect class="block" data-id="{bid}" x="{px!r}" y="{py!r}" width="{w!r}" '
            f'height="{h!r}" fill="#cfe3f7" fill-opacity="0.7" stroke="#1f4e79"/>')
        out.append(
            f'<text x="{px + w / 2:.3f}" y="{py + h / 2:.3f}" font-size="12" '
            f'text-anchor="middle" dominant-baseline="middle">{bid}</text>')
        if p["layers"] > 1:
            top = p["z"] + p["layers"] - 1
            out.append(
                f'<text class="span" x="{px + 3:.3f}" y="{py + 12:.3f}" font-size="9" '
                f'fill="#7a1f1f">L{p["z"]}-{top}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_report(report: Mapping[str, Any], out_dir: str | Path, heat: bool = False) -> list[Path]:
    """Write ``layer_<k>.svg`` for every layer of the floorplan."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for k in range(int(report["floorplan"]["extent_z"])):
        path = out / f"layer_{k}.svg"
        path.write_text(layer_svg(report, k, heat))
        paths.append(path)
    return paths
