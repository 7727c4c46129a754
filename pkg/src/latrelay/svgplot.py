"""Deterministic SVG 1.1 emission for rate-region comparison figures.

No plotting dependency: regions are simple polylines in the (R1, R2)
plane and the consumers read the figures offline, so the file is built
by string assembly with fixed-precision coordinates. Identical input
yields identical bytes.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import EmptyData

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
_WIDTH, _HEIGHT = 560, 460
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 64, 24, 28, 56


@dataclass(frozen=True)
class RegionPolyline:
    """Named polyline in rate space, vertices as (R1, R2) pairs."""
    name: str
    vertices: tuple

    def __post_init__(self):
        if len(self.vertices) == 0:
            raise EmptyData(f"region '{self.name}' has no vertices")


def rectangle_region(name: str, R1: float, R2: float) -> RegionPolyline:
    """Closed rectangle with corners (0,0) and (R1,R2)."""
    return RegionPolyline(name, ((0.0, 0.0), (R1, 0.0), (R1, R2),
                                 (0.0, R2), (0.0, 0.0)))


def _fmt(x: float) -> str:
    return f"{x:.3f}"


def _ticks(hi: float, count: int = 5) -> list:
    if hi <= 0:
        return [0.0]
    step = hi / count
    return [i * step for i in range(count + 1)]


def emit_plot(regions: list, title: str = "") -> str:
    """Valid SVG 1.1 document comparing rate regions.

    Axes are labeled in bits per channel use. Each region gets a
    distinct stroke color and a legend entry.
    """
    if len(regions) == 0:
        raise EmptyData("no regions to plot")
    xs = [v[0] for r in regions for v in r.vertices]
    ys = [v[1] for r in regions for v in r.vertices]
    xmax = max(max(xs), 1e-9) * 1.05
    ymax = max(max(ys), 1e-9) * 1.05
    plot_w = _WIDTH - _MARGIN_L - _MARGIN_R
    plot_h = _HEIGHT - _MARGIN_T - _MARGIN_B

    def px(x):
        return _MARGIN_L + plot_w * x / xmax

    def py(y):
        return _MARGIN_T + plot_h * (1.0 - y / ymax)

    out = []
    out.append('<?xml version="1.0" encoding="UTF-8"?>')
    out.append(f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
               f'width="{_WIDTH}" height="{_HEIGHT}" '
               f'viewBox="0 0 {_WIDTH} {_HEIGHT}">')
    out.append(f'<rect x="0" y="0" width="{_WIDTH}" height="{_HEIGHT}" '
               'fill="white"/>')
    if title:
        out.append(f'<text x="{_WIDTH // 2}" y="18" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="13">{title}</text>')

    # axes
    x0, y0 = px(0.0), py(0.0)
    out.append(f'<line x1="{_fmt(x0)}" y1="{_fmt(py(ymax))}" '
               f'x2="{_fmt(x0)}" y2="{_fmt(y0)}" stroke="black"/>')
    out.append(f'<line x1="{_fmt(x0)}" y1="{_fmt(y0)}" '
               f'x2="{_fmt(px(xmax))}" y2="{_fmt(y0)}" stroke="black"/>')
    for t in _ticks(xmax):
        out.append(f'<line x1="{_fmt(px(t))}" y1="{_fmt(y0)}" '
                   f'x2="{_fmt(px(t))}" y2="{_fmt(y0 + 5)}" stroke="black"/>')
        out.append(f'<text x="{_fmt(px(t))}" y="{_fmt(y0 + 18)}" '
                   'text-anchor="middle" font-family="sans-serif" '
                   f'font-size="10">{t:.2f}</text>')
    for t in _ticks(ymax):
        out.append(f'<line x1="{_fmt(x0 - 5)}" y1="{_fmt(py(t))}" '
                   f'x2="{_fmt(x0)}" y2="{_fmt(py(t))}" stroke="black"/>')
        out.append(f'<text x="{_fmt(x0 - 8)}" y="{_fmt(py(t) + 3)}" '
                   'text-anchor="end" font-family="sans-serif" '
                   f'font-size="10">{t:.2f}</text>')
    out.append(f'<text x="{_fmt(_MARGIN_L + plot_w / 2)}" '
               f'y="{_HEIGHT - 14}" text-anchor="middle" '
               'font-family="sans-serif" font-size="12">'
               'R1 (bits/channel use)</text>')
    out.append(f'<text x="16" y="{_fmt(_MARGIN_T + plot_h / 2)}" '
               'text-anchor="middle" font-family="sans-serif" font-size="12" '
               f'transform="rotate(-90 16 {_fmt(_MARGIN_T + plot_h / 2)})">'
               'R2 (bits/channel use)</text>')

    # regions
    for i, region in enumerate(regions):
        color = _PALETTE[i % len(_PALETTE)]
        pts = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}"
                       for x, y in region.vertices)
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                   'stroke-width="1.8"/>')

    # legend
    lx = _MARGIN_L + 12
    for i, region in enumerate(regions):
        color = _PALETTE[i % len(_PALETTE)]
        ly = _MARGIN_T + 12 + 16 * i
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 22}" y2="{ly}" '
                   f'stroke="{color}" stroke-width="1.8"/>')
        out.append(f'<text x="{lx + 28}" y="{ly + 4}" '
                   'font-family="sans-serif" font-size="11">'
                   f'{region.name}</text>')

    out.append("</svg>")
    return "\n".join(out) + "\n"
