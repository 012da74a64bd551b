"""Object-reaching check on an occupancy grid.

The layout's footprints are rasterized at a configurable resolution
(cells sampled at their centers; object cells and cells outside the
floor are blocked).  An 8-connected A* — no cutting corners past a
blocked cell — walks from the start to the nearest free cell within the
success radius of the target's center.  The attempt succeeds when the
final position is within the radius AND the final heading (along the
last path segment) points at the target center within the half-angle;
both thresholds inclusive.  An unreachable target fails with the error
distance measured from the start.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

from .. import geometry
from ..errors import InvalidStartError, UnknownTargetError
from ..scene import Layout, normalize_angle

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class NavTask:
    start_pose: tuple[float, float, float]  # x, y, heading (rad)
    target_instance: str
    fov_half_angle: float = math.pi / 6
    success_radius: float = 2.0
    grid_resolution: float = 0.10

    def __post_init__(self):
        if self.success_radius <= 0:
            raise ValueError("success_radius must be positive")
        if not 0 < self.fov_half_angle < math.pi:
            raise ValueError("fov_half_angle must be in (0, pi)")
        if self.grid_resolution <= 0:
            raise ValueError("grid_resolution must be positive")
        if len(self.start_pose) != 3:
            raise ValueError("start_pose must be (x, y, heading)")


@dataclass(frozen=True)
class NavResult:
    success: bool
    final_pose: tuple[float, float, float]
    path: tuple[tuple[float, float, float], ...]
    nav_error: float

    def to_dict(self) -> dict:
        return {
            "success": self.success,
            "final_pose": list(self.final_pose),
            "path": [list(p) for p in self.path],
            "nav_error": self.nav_error,
        }


class _Grid:
    """Boolean occupancy over the floor's bounding box; True = free."""

    def __init__(self, layout: Layout, resolution: float):
        self.resolution = resolution
        floor_poly = geometry.polygon_from_floor(layout.floor)
        xs = [v[0] for v in layout.floor.vertices]
        ys = [v[1] for v in layout.floor.vertices]
        self.minx, self.miny = min(xs), min(ys)
        self.cols = max(1, math.ceil((max(xs) - self.minx) / resolution))
        self.rows = max(1, math.ceil((max(ys) - self.miny) / resolution))
        rects = [geometry.footprint(o.placement, o.size) for o in layout.objects]
        self.free = [[False] * self.cols for _ in range(self.rows)]
        for row in range(self.rows):
            for col in range(self.cols):
                x, y = self.center(col, row)
                if not geometry.point_in_polygon(x, y, floor_poly):
                    continue
                if any(r.contains_point(x, y) for r in rects):
                    continue
                self.free[row][col] = True

    def center(self, col: int, row: int) -> tuple[float, float]:
        return (
            self.minx + (col + 0.5) * self.resolution,
            self.miny + (row + 0.5) * self.resolution,
        )

    def cell_of(self, x: float, y: float) -> tuple[int, int]:
        col = int((x - self.minx) / self.resolution)
        row = int((y - self.miny) / self.resolution)
        return min(max(col, 0), self.cols - 1), min(max(row, 0), self.rows - 1)

    def is_free(self, col: int, row: int) -> bool:
        return 0 <= col < self.cols and 0 <= row < self.rows and self.free[row][col]


def _astar(grid: _Grid, start: tuple[int, int], goals: set[tuple[int, int]],
           target_center: tuple[float, float], radius: float):
    """Shortest 8-connected path from start to any goal cell, or None.

    The heuristic is the straight-line distance to the target center
    minus the success radius (clamped at 0) — a lower bound on the
    remaining path length to any cell within the radius, so the first
    goal popped is optimal.
    """
    if start in goals:
        return [start]
    res = grid.resolution
    tx, ty = target_center

    def h(cell):
        x, y = grid.center(*cell)
        return max(0.0, math.hypot(x - tx, y - ty) - radius)

    open_heap = [(h(start), 0.0, start)]
    best_g = {start: 0.0}
    came: dict[tuple[int, int], tuple[int, int]] = {}
    while open_heap:
        f, g, cell = heapq.heappop(open_heap)
        if cell in goals:
            path = [cell]
            while cell in came:
                cell = came[cell]
                path.append(cell)
            path.reverse()
            return path
        if g > best_g.get(cell, math.inf):
            continue
        col, row = cell
        for dc in (-1, 0, 1):
            for dr in (-1, 0, 1):
                if dc == 0 and dr == 0:
                    continue
                nxt = (col + dc, row + dr)
                if not grid.is_free(*nxt):
                    continue
                if dc != 0 and dr != 0:
                    # no squeezing diagonally past a blocked cell
                    if not (grid.is_free(col + dc, row) and grid.is_free(col, row + dr)):
                        continue
                    step = _SQRT2 * res
                else:
                    step = res
                ng = g + step
                if ng < best_g.get(nxt, math.inf):
                    best_g[nxt] = ng
                    came[nxt] = cell
                    heapq.heappush(open_heap, (ng + h(nxt), ng, nxt))
    return None


def _bearing_ok(final_pose, target_center, fov_half_angle) -> bool:
    x, y, heading = final_pose
    bearing = math.atan2(target_center[1] - y, target_center[0] - x)
    diff = normalize_angle(bearing - heading)
    if diff > math.pi:
        diff = 2 * math.pi - diff
    return diff <= fov_half_angle


def nav_eval(layout: Layout, task: NavTask) -> NavResult:
    target = layout.get(task.target_instance)
    if target is None:
        raise UnknownTargetError(f"no object with id {task.target_instance!r}")
    target_center = (target.placement.x, target.placement.y)

    sx, sy, sheading = task.start_pose
    floor_poly = geometry.polygon_from_floor(layout.floor)
    if not geometry.point_in_polygon(sx, sy, floor_poly):
        raise InvalidStartError(f"start ({sx}, {sy}) is outside the floor")
    for obj in layout.objects:
        rect = geometry.footprint(obj.placement, obj.size)
        if rect.contains_point(sx, sy):
            raise InvalidStartError(
                f"start ({sx}, {sy}) collides with {obj.instance_id!r}"
            )

    grid = _Grid(layout, task.grid_resolution)
    start_cell = grid.cell_of(sx, sy)
    start_distance = math.hypot(sx - target_center[0], sy - target_center[1])
    start_pose = (sx, sy, normalize_angle(sheading))
    if not grid.is_free(*start_cell):
        # start is legal but its cell center is blocked (wall-hugging
        # start at coarse resolution): treat as no path
        return NavResult(False, start_pose, (start_pose,), start_distance)

    goals = {
        (col, row)
        for row in range(grid.rows)
        for col in range(grid.cols)
        if grid.free[row][col]
        and math.hypot(
            grid.center(col, row)[0] - target_center[0],
            grid.center(col, row)[1] - target_center[1],
        )
        <= task.success_radius
    }
    cells = _astar(grid, start_cell, goals, target_center, task.success_radius) if goals else None
    if cells is None:
        return NavResult(False, start_pose, (start_pose,), start_distance)

    # start exactly at the queried pose, then through visited cell centers
    points = [(sx, sy)] + [grid.center(*c) for c in cells[1:]]
    if len(points) > 1:
        lx, ly = points[-2]
        fx, fy = points[-1]
        heading = normalize_angle(math.atan2(fy - ly, fx - lx))
    else:
        heading = start_pose[2]

    poses = []
    for i, (x, y) in enumerate(points):
        if i + 1 < len(points):
            nx, ny = points[i + 1]
            poses.append((x, y, normalize_angle(math.atan2(ny - y, nx - x))))
        else:
            poses.append((x, y, heading))
    final_pose = poses[-1]
    nav_error = math.hypot(final_pose[0] - target_center[0], final_pose[1] - target_center[1])
    success = nav_error <= task.success_radius and _bearing_ok(
        final_pose, target_center, task.fov_half_angle
    )
    return NavResult(success, final_pose, tuple(poses), nav_error)
