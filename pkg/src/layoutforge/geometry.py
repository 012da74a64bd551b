"""Ground-plane geometry kernel.

Everything is 2D: object footprints are oriented rectangles, floors are
simple polygons, and all overlap/containment math runs through convex
clipping (Sutherland-Hodgman against a rectangle's four half-planes)
plus shoelace areas.  Pure functions over immutable values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateError, EmptyLayoutError
from .scene import BoxSize, FloorPlan, Layout, Placement

# point-on-edge classification tolerance (meters); double precision at
# meter scale keeps ~1e-16 relative error, so 1e-9 absolute is generous.
EPS = 1e-9

ORIENTED = "oriented"
AXIS_ALIGNED = "axis_aligned"


@dataclass(frozen=True)
class OrientedRect2D:
    """Rectangle footprint: center, half extents, rotation about center."""

    cx: float
    cy: float
    half_width: float
    half_depth: float
    angle: float

    def __post_init__(self):
        for name in ("cx", "cy", "half_width", "half_depth", "angle"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
                raise ValueError(f"{name} must be a finite number, got {v!r}")
            object.__setattr__(self, name, float(v))
        if self.half_width <= 0.0 or self.half_depth <= 0.0:
            raise ValueError(
                f"half extents must be > 0, got ({self.half_width}, {self.half_depth})"
            )

    def area(self) -> float:
        return 4.0 * self.half_width * self.half_depth

    def corners(self) -> tuple[tuple[float, float], ...]:
        """Corners counter-clockwise starting at (+w, +d) in the rect frame."""
        c, s = math.cos(self.angle), math.sin(self.angle)
        out = []
        for lx, ly in ((1, 1), (-1, 1), (-1, -1), (1, -1)):
            dx = lx * self.half_width
            dy = ly * self.half_depth
            out.append((self.cx + dx * c - dy * s, self.cy + dx * s + dy * c))
        return tuple(out)

    def contains_point(self, x: float, y: float, *, tol: float = EPS) -> bool:
        c, s = math.cos(self.angle), math.sin(self.angle)
        dx, dy = x - self.cx, y - self.cy
        lx = dx * c + dy * s
        ly = -dx * s + dy * c
        return abs(lx) <= self.half_width + tol and abs(ly) <= self.half_depth + tol


@dataclass(frozen=True)
class Polygon2D:
    """Vertex list; empty polygon is 0 vertices. Clipping outputs are
    convex by construction; simplicity of arbitrary inputs is the
    caller's responsibility (FloorPlan enforces it at the boundary)."""

    vertices: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        verts = tuple((float(x), float(y)) for x, y in self.vertices)
        for x, y in verts:
            if not (math.isfinite(x) and math.isfinite(y)):
                raise ValueError(f"polygon vertex must be finite, got ({x}, {y})")
        if len(verts) in (1, 2):
            verts = ()  # a point or segment has no area; collapse to empty
        object.__setattr__(self, "vertices", verts)

    @property
    def is_empty(self) -> bool:
        return not self.vertices


def polygon_from_floor(floor: FloorPlan) -> Polygon2D:
    """Floor polygon in counter-clockwise winding."""
    verts = floor.vertices
    if _signed_area(verts) < 0.0:
        verts = tuple(reversed(verts))
    return Polygon2D(verts)


def _signed_area(vertices) -> float:
    s = 0.0
    n = len(vertices)
    for i in range(n):
        x1, y1 = vertices[i]
        x2, y2 = vertices[(i + 1) % n]
        s += x1 * y2 - x2 * y1
    return 0.5 * s


def polygon_area(p: Polygon2D) -> float:
    """|shoelace|/2; 0 for empty/degenerate input."""
    if len(p.vertices) < 3:
        return 0.0
    return abs(_signed_area(p.vertices))


def polygon_centroid(p: Polygon2D) -> tuple[float, float]:
    """Area-weighted centroid via the shoelace moment formula."""
    if len(p.vertices) < 3:
        raise DegenerateError("centroid of an empty polygon")
    a = _signed_area(p.vertices)
    if abs(a) < 1e-12:
        raise DegenerateError("centroid of a zero-area polygon")
    cx = cy = 0.0
    n = len(p.vertices)
    for i in range(n):
        x1, y1 = p.vertices[i]
        x2, y2 = p.vertices[(i + 1) % n]
        w = x1 * y2 - x2 * y1
        cx += (x1 + x2) * w
        cy += (y1 + y2) * w
    return (cx / (6.0 * a), cy / (6.0 * a))


def floor_centroid(floor: FloorPlan) -> tuple[float, float]:
    return polygon_centroid(Polygon2D(floor.vertices))


def footprint(placement: Placement, size: BoxSize, mode: str = ORIENTED) -> OrientedRect2D:
    """Ground-plane rectangle of a placed box.

    oriented: half extents (width/2, depth/2) at the placement's rotation.
    axis_aligned: angle forced to 0, half extents grown to cover the
    rotated rect's axis-aligned bounds (corner projection).
    """
    hw = size.width / 2.0
    hd = size.depth / 2.0
    if mode == ORIENTED:
        return OrientedRect2D(placement.x, placement.y, hw, hd, placement.rotation)
    if mode == AXIS_ALIGNED:
        c = abs(math.cos(placement.rotation))
        s = abs(math.sin(placement.rotation))
        return OrientedRect2D(placement.x, placement.y, hw * c + hd * s, hw * s + hd * c, 0.0)
    raise ValueError(f"unknown footprint mode {mode!r}")


def convex_clip(subject: Polygon2D, clip: OrientedRect2D) -> Polygon2D:
    """subject ∩ clip via Sutherland-Hodgman against the rect's 4 half-planes.

    Correct for any simple subject in counter-clockwise winding; for
    non-convex subjects the output may contain zero-width bridges, which
    contribute nothing to the shoelace area.
    """
    verts = list(subject.vertices)
    if len(verts) < 3:
        return Polygon2D()
    clip_corners = clip.corners()  # counter-clockwise
    for i in range(4):
        if not verts:
            break
        ax, ay = clip_corners[i]
        bx, by = clip_corners[(i + 1) % 4]
        ex, ey = bx - ax, by - ay
        out = []
        n = len(verts)
        for j in range(n):
            px, py = verts[j]
            qx, qy = verts[(j + 1) % n]
            p_in = ex * (py - ay) - ey * (px - ax) >= -EPS
            q_in = ex * (qy - ay) - ey * (qx - ax) >= -EPS
            if p_in:
                out.append((px, py))
                if not q_in:
                    out.append(_line_intersect(px, py, qx, qy, ax, ay, bx, by))
            elif q_in:
                out.append(_line_intersect(px, py, qx, qy, ax, ay, bx, by))
        verts = out
    if len(verts) < 3:
        return Polygon2D()
    return Polygon2D(tuple(verts))


def _line_intersect(px, py, qx, qy, ax, ay, bx, by):
    # segment pq crossed with the infinite line ab
    ex, ey = bx - ax, by - ay
    dp = ex * (py - ay) - ey * (px - ax)
    dq = ex * (qy - ay) - ey * (qx - ax)
    denom = dp - dq
    if denom == 0.0:  # parallel within rounding; fall back to the nearer endpoint
        return (qx, qy)
    t = dp / denom
    return (px + t * (qx - px), py + t * (qy - py))


def _rect_key(r: OrientedRect2D):
    return (r.cx, r.cy, r.half_width, r.half_depth, r.angle)


def overlap_area(a: OrientedRect2D, b: OrientedRect2D) -> float:
    """Intersection area of two oriented rectangles; exactly symmetric.

    Symmetry is forced by ordering the pair canonically before clipping,
    so overlap_area(a, b) and overlap_area(b, a) run the same arithmetic.
    """
    if _rect_key(b) < _rect_key(a):
        a, b = b, a
    # cheap reject: axis-aligned bounds
    ra = a.half_width + a.half_depth  # circumradius bound, cheaper than corners
    rb = b.half_width + b.half_depth
    if abs(a.cx - b.cx) > ra + rb or abs(a.cy - b.cy) > ra + rb:
        return 0.0
    clipped = convex_clip(Polygon2D(a.corners()), b)
    area = polygon_area(clipped)
    return area if area > 0.0 else 0.0


def oor(layout: Layout, mode: str = ORIENTED) -> float:
    """Object Overlap Rate: sum of pairwise footprint intersection areas
    divided by the sum of footprint areas.  Unclamped — three or more
    mutually overlapping objects can push it past 1."""
    if not layout.objects:
        raise EmptyLayoutError("OOR needs at least one placed object")
    rects = [footprint(o.placement, o.size, mode) for o in layout.objects]
    total = sum(r.area() for r in rects)
    inter = 0.0
    for i in range(len(rects)):
        for j in range(i + 1, len(rects)):
            inter += overlap_area(rects[i], rects[j])
    return inter / total


def containment_violation(rect: OrientedRect2D, floor: FloorPlan) -> float:
    """Footprint area lying outside the floor: area(rect) − area(rect ∩ floor).

    Non-convex floors are handled by clipping the floor polygon against
    the rect; values within 1e-9 m² of zero snap to exactly 0.0.
    """
    inside = polygon_area(convex_clip(polygon_from_floor(floor), rect))
    violation = rect.area() - inside
    if violation < EPS:
        return 0.0
    return violation


def point_in_polygon(x: float, y: float, p: Polygon2D, *, tol: float = EPS) -> bool:
    """Inclusive point-in-polygon: boundary points count as inside."""
    verts = p.vertices
    n = len(verts)
    if n < 3:
        return False
    inside = False
    for i in range(n):
        x1, y1 = verts[i]
        x2, y2 = verts[(i + 1) % n]
        # on-edge check
        cross = (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1)
        if abs(cross) <= tol * max(1.0, abs(x2 - x1) + abs(y2 - y1)):
            if min(x1, x2) - tol <= x <= max(x1, x2) + tol and min(y1, y2) - tol <= y <= max(
                y1, y2
            ) + tol:
                return True
        if (y1 > y) != (y2 > y):
            xi = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if x < xi:
                inside = not inside
    return inside


def pairwise_overlaps(layout: Layout, mode: str = ORIENTED, *, min_area: float = EPS):
    """All object pairs with nonzero footprint intersection, in id order.

    Returns a list of (instance_id_i, instance_id_j, area) with i before j
    in layout order; pairs at or below ``min_area`` are dropped.
    """
    rects = [(o.instance_id, footprint(o.placement, o.size, mode)) for o in layout.objects]
    out = []
    for i in range(len(rects)):
        for j in range(i + 1, len(rects)):
            area = overlap_area(rects[i][1], rects[j][1])
            if area > min_area:
                out.append((rects[i][0], rects[j][0], area))
    return out


def boundary_violations(layout: Layout, mode: str = ORIENTED, *, min_area: float = 0.0):
    """Objects whose footprint pokes outside the floor, as (id, area) pairs."""
    out = []
    for obj in layout.objects:
        v = containment_violation(footprint(obj.placement, obj.size, mode), layout.floor)
        if v > min_area:
            out.append((obj.instance_id, v))
    return out
