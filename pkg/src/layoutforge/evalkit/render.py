"""Top-down SVG rendering of a layout.

One polygon for the floor, one rotated rectangle per object with a
heading tick and an id label.  Objects involved in an over-threshold
pair overlap carry the ``overlap`` class; objects violating the floor
boundary carry ``oob``.  Output is a deterministic function of the
input: floats are written with fixed precision and objects appear in
layout order.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

from .. import geometry
from ..scene import Layout
from .validation import ValidationReport, ValidationThresholds, validate

_STYLE = """\
    .floor { fill: #f4f1ea; stroke: #4a4a4a; stroke-width: 2; }
    .box { fill: #cfd9e8; stroke: #35506e; stroke-width: 1.5; fill-opacity: 0.85; }
    .box.overlap { fill: #f2c4c4; stroke: #b03030; stroke-width: 2.5; }
    .box.oob { stroke: #d07c1f; stroke-width: 2.5; stroke-dasharray: 6 3; }
    .box.overlap.oob { fill: #f2c4c4; stroke: #b03030; }
    .heading { stroke: #1d2d44; stroke-width: 1.5; }
    .label { font: 11px sans-serif; fill: #1d1d1d; text-anchor: middle; }"""


def _fmt(value: float) -> str:
    out = f"{value:.3f}"
    return "0.000" if out == "-0.000" else out


def render_svg(
    layout: Layout,
    *,
    report: ValidationReport | None = None,
    thresholds: ValidationThresholds | None = None,
    scale: float = 100.0,
    margin: float = 0.5,
) -> str:
    """Render to an SVG document string.

    Pass a precomputed report to reuse its violation lists (the studio
    service does); otherwise the layout is validated here with the given
    or default thresholds.
    """
    if report is None:
        report = validate(layout, thresholds)
    t = thresholds or ValidationThresholds()
    flagged_overlap = set()
    for a, b, area in report.pair_overlaps:
        if area > t.max_pair_overlap:
            flagged_overlap.update((a, b))
    flagged_oob = {
        i for i, area in report.boundary_violations if area > t.max_boundary_violation
    }

    xs = [v[0] for v in layout.floor.vertices]
    ys = [v[1] for v in layout.floor.vertices]
    minx, maxx, miny, maxy = min(xs), max(xs), min(ys), max(ys)
    for obj in layout.objects:
        for cx, cy in geometry.footprint(obj.placement, obj.size).corners():
            minx, maxx = min(minx, cx), max(maxx, cx)
            miny, maxy = min(miny, cy), max(maxy, cy)
    minx -= margin
    maxx += margin
    miny -= margin
    maxy += margin

    def sx(x: float) -> str:
        return _fmt((x - minx) * scale)

    def sy(y: float) -> str:  # world y up, SVG y down
        return _fmt((maxy - y) * scale)

    width = _fmt((maxx - minx) * scale)
    height = _fmt((maxy - miny) * scale)
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width} {height}" '
        f'width="{width}" height="{height}">',
        "  <style>",
        _STYLE,
        "  </style>",
    ]

    floor_points = " ".join(f"{sx(x)},{sy(y)}" for x, y in layout.floor.vertices)
    lines.append(f'  <polygon class="floor" points="{floor_points}"/>')

    for obj in layout.objects:
        classes = ["box"]
        if obj.instance_id in flagged_overlap:
            classes.append("overlap")
        if obj.instance_id in flagged_oob:
            classes.append("oob")
        rect = geometry.footprint(obj.placement, obj.size)
        points = " ".join(f"{sx(x)},{sy(y)}" for x, y in rect.corners())
        lines.append(
            f'  <polygon class="{" ".join(classes)}" points="{points}" '
            f'data-id="{escape(obj.instance_id, {chr(34): "&quot;"})}"/>'
        )
        # heading tick: from the center along the facing direction
        r = obj.placement.rotation
        fx = -math.sin(r)
        fy = math.cos(r)
        tick = 0.5 * obj.size.depth
        x0, y0 = obj.placement.x, obj.placement.y
        lines.append(
            f'  <line class="heading" x1="{sx(x0)}" y1="{sy(y0)}" '
            f'x2="{sx(x0 + fx * tick)}" y2="{sy(y0 + fy * tick)}"/>'
        )
        lines.append(
            f'  <text class="label" x="{sx(x0)}" y="{sy(y0)}">'
            f"{escape(obj.instance_id)}</text>"
        )

    lines.append("</svg>")
    return "\n".join(lines) + "\n"
