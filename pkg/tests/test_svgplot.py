import xml.etree.ElementTree as ET

import pytest

from latrelay.errors import EmptyData
from latrelay.svgplot import RegionPolyline, emit_plot, rectangle_region

SVG_NS = "{http://www.w3.org/2000/svg}"


def _polylines(svg_text):
    root = ET.fromstring(svg_text)
    assert root.tag == f"{SVG_NS}svg"
    assert root.get("version") == "1.1"
    return root.findall(f".//{SVG_NS}polyline")


def test_single_rectangle_four_vertices():
    svg = emit_plot([rectangle_region("outer", 1.5, 0.8)])
    polys = _polylines(svg)
    assert len(polys) == 1
    pts = polys[0].get("points").split()
    assert len(pts) == 5   # closed: four corners plus the return to origin
    assert pts[0] == pts[-1]


def test_two_regions_distinguishable_with_legend():
    svg = emit_plot([rectangle_region("a", 1.0, 1.0),
                     rectangle_region("b", 0.5, 0.4)])
    polys = _polylines(svg)
    assert len(polys) == 2
    assert polys[0].get("stroke") != polys[1].get("stroke")
    texts = [t.text for t in ET.fromstring(svg).findall(f".//{SVG_NS}text")]
    assert "a" in texts and "b" in texts


def test_axes_labeled_in_bits():
    svg = emit_plot([rectangle_region("r", 1.0, 1.0)])
    assert "R1 (bits/channel use)" in svg
    assert "R2 (bits/channel use)" in svg


def test_deterministic_bytes():
    regions = [rectangle_region("x", 0.7, 0.3)]
    assert emit_plot(regions, title="t") == emit_plot(regions, title="t")


def test_empty_inputs_raise():
    with pytest.raises(EmptyData):
        emit_plot([])
    with pytest.raises(EmptyData):
        RegionPolyline("empty", ())


def test_containment_renders_inner_inside_outer():
    outer = rectangle_region("outer", 2.0, 2.0)
    inner = rectangle_region("inner", 1.0, 1.0)
    svg = emit_plot([outer, inner])
    polys = _polylines(svg)

    def corners(poly):
        return [tuple(map(float, p.split(","))) for p in
                poly.get("points").split()]

    xo = max(c[0] for c in corners(polys[0]))
    xi = max(c[0] for c in corners(polys[1]))
    yo = min(c[1] for c in corners(polys[0]))   # svg y grows downward
    yi = min(c[1] for c in corners(polys[1]))
    assert xi < xo and yi > yo
