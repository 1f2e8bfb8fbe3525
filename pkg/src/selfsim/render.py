"""SVG export and matplotlib figures for tilings and density reports."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .tiling import Tile

DEFAULT_PALETTE = (
    "#b2182b",
    "#4d4d4d",
    "#f4a582",
    "#92c5de",
    "#2166ac",
    "#d6604d",
    "#878787",
    "#fddbc7",
)


@dataclass(frozen=True)
class RenderStyle:
    palette: tuple[str, ...] = DEFAULT_PALETTE
    stroke_width: float = 0.002  # fraction of the drawing's diagonal
    stroke: str = "#ffffff"
    background: str = "#ffffff"

    def covers(self, M: int) -> bool:
        return len(self.palette) >= M

    def fill(self, size_class: int) -> str:
        return self.palette[size_class % len(self.palette)]


def _bounds(tiles: Sequence[Tile]):
    xs = [x for t in tiles for x, _ in t.shape.vertices]
    ys = [y for t in tiles for _, y in t.shape.vertices]
    return min(xs), min(ys), max(xs), max(ys)


def _num(v: float) -> str:
    out = f"{v:.9g}"
    return "0" if out == "-0" else out


def svg_document(tiles: Sequence[Tile], style: RenderStyle = RenderStyle()) -> str:
    """SVG 1.1 text with one closed, class-filled path per tile.

    The y axis is flipped so the picture reads like the plane.
    """
    if not tiles:
        raise ValueError("nothing to draw")
    x0, y0, x1, y1 = _bounds(tiles)
    w, h = x1 - x0, y1 - y0
    mx, my = 0.02 * w, 0.02 * h
    vb = (x0 - mx, -(y1 + my), w + 2 * mx, h + 2 * my)
    stroke = style.stroke_width * (w * w + h * h) ** 0.5
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'viewBox="{" ".join(_num(v) for v in vb)}">',
        f'<rect x="{_num(vb[0])}" y="{_num(vb[1])}" width="{_num(vb[2])}" height="{_num(vb[3])}" '
        f'fill="{style.background}"/>',
        f'<g stroke="{style.stroke}" stroke-width="{_num(stroke)}" stroke-linejoin="round">',
    ]
    for t in tiles:
        pts = " L ".join(f"{_num(x)},{_num(-y)}" for x, y in t.shape.vertices)
        lines.append(f'<path class="c{t.size_class}" fill="{style.fill(t.size_class)}" d="M {pts} Z"/>')
    lines += ["</g>", "</svg>", ""]
    return "\n".join(lines)


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    # fixed salt and no timestamps keep repeated renders byte-identical
    matplotlib.rcParams["svg.hashsalt"] = "selfsim"
    return plt


def _save(fig, path: str) -> None:
    metadata = {"Date": None} if str(path).endswith((".svg", ".pdf")) else None
    fig.savefig(path, metadata=metadata)


def tiling_figure(tiles: Sequence[Tile], path: str, style: RenderStyle = RenderStyle(), title: str = "") -> None:
    from matplotlib.collections import PolyCollection

    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 6))
    polys = [list(t.shape.vertices) for t in tiles]
    colors = [style.fill(t.size_class) for t in tiles]
    x0, y0, x1, y1 = _bounds(tiles)
    lw = 0.4 if len(tiles) < 2000 else 0.1
    ax.add_collection(PolyCollection(polys, facecolors=colors, edgecolors=style.stroke, linewidths=lw))
    mx, my = 0.02 * (x1 - x0), 0.02 * (y1 - y0)
    ax.set_xlim(x0 - mx, x1 + mx)
    ax.set_ylim(y0 - my, y1 + my)
    ax.set_aspect("equal")
    ax.set_axis_off()
    if title:
        ax.set_title(title)
    _save(fig, path)
    plt.close(fig)


def density_figure(
    limit: Sequence[float], path: str, empirical: Sequence[float] | None = None, title: str = ""
) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 3.5))
    M = len(limit)
    xs = list(range(M))
    width = 0.4 if empirical is not None else 0.6
    ax.bar([x - width / 2 if empirical is not None else x for x in xs], limit, width, label="limit")
    if empirical is not None:
        ax.bar([x + width / 2 for x in xs], empirical, width, label="window count")
        ax.legend()
    ax.set_xticks(xs)
    ax.set_xlabel("size class")
    ax.set_ylabel("frequency")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    _save(fig, path)
    plt.close(fig)
