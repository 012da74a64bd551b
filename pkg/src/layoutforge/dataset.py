"""Corpus construction: convention alignment, filtering, stats, splits.

Source scenes arrive in whatever coordinate convention their exporter
used (y-up axes, degree rotations, flipped rotation direction, corner
origins).  Ingestion converts everything to the canonical z-up/radians
form, recenters floors on their area centroid, then applies the
population filters and advisory quality flags.
"""

from __future__ import annotations

import dataclasses
import enum
import json
import math
import random
import statistics
from dataclasses import dataclass, field, replace

from . import geometry
from .errors import InsufficientDataError, SchemaError
from .scene import (
    FloorPlan,
    Layout,
    PlacedObject,
    Placement,
    RoomType,
    SceneRecord,
    UpAxis,
    normalize_angle,
)


class RotationUnit(enum.Enum):
    RADIANS = "radians"
    DEGREES = "degrees"


class Origin(enum.Enum):
    FLOOR_CORNER = "floor_corner"
    FLOOR_CENTER = "floor_center"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class SourceConvention:
    """How one scene source encodes coordinates and rotations."""

    up_axis: UpAxis = UpAxis.Z_UP
    rotation_unit: RotationUnit = RotationUnit.RADIANS
    rotation_flip: bool = False  # source rotations are opposite: add pi
    origin: Origin = Origin.UNKNOWN

    @classmethod
    def from_dict(cls, data: dict) -> "SourceConvention":
        try:
            return cls(
                up_axis=UpAxis(data.get("up_axis", "z_up")),
                rotation_unit=RotationUnit(data.get("rotation_unit", "radians")),
                rotation_flip=bool(data.get("rotation_flip", False)),
                origin=Origin(data.get("origin", "unknown")),
            )
        except ValueError as exc:
            raise SchemaError(f"bad source convention: {exc}") from None

    def to_dict(self) -> dict:
        return {
            "up_axis": self.up_axis.value,
            "rotation_unit": self.rotation_unit.value,
            "rotation_flip": self.rotation_flip,
            "origin": self.origin.value,
        }


# Shipped presets; a config file can override either one.
DEFAULT_CONVENTIONS = {
    "three_d_front": SourceConvention(
        up_axis=UpAxis.Y_UP,
        rotation_unit=RotationUnit.RADIANS,
        rotation_flip=False,
        origin=Origin.UNKNOWN,
    ),
    "holodeck_synth": SourceConvention(
        up_axis=UpAxis.Y_UP,
        rotation_unit=RotationUnit.DEGREES,
        rotation_flip=True,
        origin=Origin.UNKNOWN,
    ),
}


class FlagReason(enum.Enum):
    UNDER_POPULATED = "under_populated"
    CLUSTERED = "clustered"
    COUNT_MISMATCH = "count_mismatch"
    ORIENTATION_SUSPECT = "orientation_suspect"


# clustered / orientation_suspect mark scenes for human inspection
# without rejecting them
ADVISORY_REASONS = frozenset({FlagReason.CLUSTERED, FlagReason.ORIENTATION_SUSPECT})


@dataclass(frozen=True)
class FilterRules:
    """Thresholds for filter_scene."""

    # reject below these per-room object counts
    min_objects: dict = field(
        default_factory=lambda: {
            RoomType.BEDROOM: 6,
            RoomType.LIVING_ROOM: 6,
            RoomType.KITCHEN: 3,
            RoomType.BATHROOM: 2,
        }
    )
    # advisory: mean center-to-centroid distance / floor circumradius below this
    clustering_ratio: float = 0.25
    # footprints under this area don't count toward population or clustering
    small_object_area: float = 0.04
    # a chair whose facing ray hits no table footprint within this range is suspect
    chair_table_reach: float = 1.5

    @classmethod
    def from_dict(cls, data: dict) -> "FilterRules":
        rules = cls()
        min_objects = dict(rules.min_objects)
        for key, value in data.get("min_objects", {}).items():
            min_objects[RoomType.parse(key)] = int(value)
        return cls(
            min_objects=min_objects,
            clustering_ratio=float(data.get("clustering_ratio", rules.clustering_ratio)),
            small_object_area=float(data.get("small_object_area", rules.small_object_area)),
            chair_table_reach=float(data.get("chair_table_reach", rules.chair_table_reach)),
        )


@dataclass(frozen=True)
class FilterVerdict:
    accepted: bool
    reasons: tuple[FlagReason, ...]
    metrics: dict

    def to_dict(self) -> dict:
        return {
            "accepted": self.accepted,
            "reasons": [r.value for r in self.reasons],
            "metrics": dict(self.metrics),
        }


def _shift_layout(layout: Layout, dx: float, dy: float) -> Layout:
    floor = FloorPlan(tuple((x + dx, y + dy) for x, y in layout.floor.vertices))
    objects = tuple(
        replace(
            obj,
            placement=replace(obj.placement, x=obj.placement.x + dx, y=obj.placement.y + dy),
        )
        for obj in layout.objects
    )
    return Layout(room_type=layout.room_type, floor=floor, objects=objects)


def recenter(record: SceneRecord) -> SceneRecord:
    """Shift floor and objects so the floor's area centroid is (0, 0).

    z and rotations are untouched; idempotent; preserves all pairwise
    distances and the floor area.
    """
    cx, cy = geometry.floor_centroid(record.layout.floor)
    if cx == 0.0 and cy == 0.0:
        return record
    return replace(record, layout=_shift_layout(record.layout, -cx, -cy))


def convert_convention(record: SceneRecord, conv: SourceConvention) -> SceneRecord:
    """Convert a source-convention record to canonical z-up/radians form.

    y-up positions (x, y=height, z) become (x, z, y); degree rotations
    become radians; flipped sources get pi added; output rotations are
    normalized to [0, 2*pi).  Floor vertices are already 2D ground-plane
    points and box sizes already (width, depth, height), so neither moves.
    """
    objects = []
    for obj in record.layout.objects:
        p = obj.placement
        if conv.up_axis is UpAxis.Y_UP:
            x, y, z = p.x, p.z, p.y
        else:
            x, y, z = p.x, p.y, p.z
        r = p.rotation
        if conv.rotation_unit is RotationUnit.DEGREES:
            r = math.radians(r)
        if conv.rotation_flip:
            r = r + math.pi
        objects.append(replace(obj, placement=Placement(x, y, z, normalize_angle(r))))
    layout = Layout(
        room_type=record.layout.room_type,
        floor=record.layout.floor,
        objects=tuple(objects),
    )
    return replace(record, layout=layout)


def load_raw_scenes(path) -> list:
    """Read a source JSONL scene file before convention conversion.

    Lenient shape handling, rotations kept exactly as stored (they may be
    degrees or flipped until convert_convention runs).
    """
    from .scene import record_from_dict

    records = []
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                data = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"{path}:{lineno}: invalid JSON: {exc}") from None
            record = record_from_dict(data, strict=False, keep_raw_angles=True)
            if record.scene_id in seen:
                raise SchemaError(f"{path}:{lineno}: duplicate scene_id {record.scene_id!r}")
            seen.add(record.scene_id)
            records.append(record)
    return records


def ingest_records(records, conv: SourceConvention, *, do_recenter: bool = True):
    """Full ingestion: convert convention, then (by default) recenter."""
    out = []
    for record in records:
        record = convert_convention(record, conv)
        if do_recenter:
            record = recenter(record)
        out.append(record)
    return out


def _facing_ray_hits_rect(
    cx: float, cy: float, angle: float, reach: float, rect: geometry.OrientedRect2D
) -> bool:
    # facing direction is the +depth axis rotated by the placement angle
    fx, fy = -math.sin(angle), math.cos(angle)
    # walk the segment [0, reach] in the rect's local frame; slab test
    c, s = math.cos(rect.angle), math.sin(rect.angle)
    ox, oy = cx - rect.cx, cy - rect.cy
    lx = ox * c + oy * s
    ly = -ox * s + oy * c
    dx = fx * c + fy * s
    dy = -fx * s + fy * c
    t0, t1 = 0.0, reach
    for pos, vel, half in ((lx, dx, rect.half_width), (ly, dy, rect.half_depth)):
        if abs(vel) < 1e-12:
            if abs(pos) > half:
                return False
            continue
        ta = (-half - pos) / vel
        tb = (half - pos) / vel
        if ta > tb:
            ta, tb = tb, ta
        t0 = max(t0, ta)
        t1 = min(t1, tb)
        if t0 > t1:
            return False
    return True


_CHAIR_TOKENS = frozenset({"chair", "armchair", "stool"})
_TABLE_TOKENS = frozenset({"table", "desk"})


def _has_token(description: str, tokens: frozenset[str]) -> bool:
    words = set(description.lower().replace("-", " ").split())
    return bool(words & tokens)


def filter_scene(record: SceneRecord, rules: FilterRules | None = None) -> FilterVerdict:
    """Apply population filters and advisory quality flags to one scene.

    Rejections: under_populated (object count below the room minimum,
    small footprints excluded) and count_mismatch (placed instances vs
    declared quantities disagree).  Advisory flags: clustered (objects
    huddled near the floor centroid) and orientation_suspect (a chair
    facing no table within reach — including rooms with no table at all).
    """
    rules = rules or FilterRules()
    layout = record.layout
    reasons: list[FlagReason] = []
    metrics: dict = {}

    counted = [
        obj
        for obj in layout.objects
        if obj.size.width * obj.size.depth >= rules.small_object_area
    ]
    metrics["object_count"] = len(layout.objects)
    metrics["counted_objects"] = len(counted)
    minimum = rules.min_objects.get(layout.room_type, 0)
    metrics["required_minimum"] = minimum
    if len(counted) < minimum:
        reasons.append(FlagReason.UNDER_POPULATED)

    declared = sum(obj.spec.quantity for obj in layout.objects)
    metrics["declared_quantity"] = declared
    if declared != len(layout.objects):
        reasons.append(FlagReason.COUNT_MISMATCH)

    if counted:
        ccx, ccy = geometry.floor_centroid(layout.floor)
        circumradius = max(
            math.hypot(x - ccx, y - ccy) for x, y in layout.floor.vertices
        )
        mean_dist = sum(
            math.hypot(obj.placement.x - ccx, obj.placement.y - ccy) for obj in counted
        ) / len(counted)
        dispersion = mean_dist / circumradius if circumradius > 0 else 0.0
        metrics["dispersion_ratio"] = dispersion
        if dispersion < rules.clustering_ratio:
            reasons.append(FlagReason.CLUSTERED)

    tables = [
        geometry.footprint(obj.placement, obj.size)
        for obj in layout.objects
        if _has_token(obj.description, _TABLE_TOKENS)
    ]
    suspect_chairs = []
    for obj in layout.objects:
        if not _has_token(obj.description, _CHAIR_TOKENS):
            continue
        hit = any(
            _facing_ray_hits_rect(
                obj.placement.x,
                obj.placement.y,
                obj.placement.rotation,
                rules.chair_table_reach,
                rect,
            )
            for rect in tables
        )
        if not hit:
            suspect_chairs.append(obj.instance_id)
    if suspect_chairs:
        reasons.append(FlagReason.ORIENTATION_SUSPECT)
        metrics["suspect_chairs"] = suspect_chairs

    accepted = not any(r not in ADVISORY_REASONS for r in reasons)
    return FilterVerdict(accepted=accepted, reasons=tuple(reasons), metrics=metrics)


@dataclass(frozen=True)
class CorpusStats:
    total: int
    room_counts: dict
    room_fractions: dict
    object_count_min: int | None
    object_count_q1: float | None
    object_count_median: float | None
    object_count_q3: float | None
    object_count_max: int | None
    distinct_descriptions: int

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "room_counts": dict(self.room_counts),
            "room_fractions": dict(self.room_fractions),
            "object_count": {
                "min": self.object_count_min,
                "q1": self.object_count_q1,
                "median": self.object_count_median,
                "q3": self.object_count_q3,
                "max": self.object_count_max,
            },
            "distinct_descriptions": self.distinct_descriptions,
        }


def corpus_stats(records) -> CorpusStats:
    """Single-pass corpus statistics; deterministic for a given input order."""
    total = 0
    room_counts: dict[str, int] = {}
    counts: list[int] = []
    descriptions: set[str] = set()
    for record in records:
        total += 1
        key = record.layout.room_type.value
        room_counts[key] = room_counts.get(key, 0) + 1
        counts.append(len(record.layout.objects))
        for obj in record.layout.objects:
            descriptions.add(obj.description.lower())
    fractions = {k: v / total for k, v in room_counts.items()} if total else {}
    if counts:
        if len(counts) >= 2:
            q1, median, q3 = statistics.quantiles(counts, n=4, method="inclusive")
        else:
            q1 = median = q3 = float(counts[0])
        stats = (min(counts), q1, median, q3, max(counts))
    else:
        stats = (None, None, None, None, None)
    return CorpusStats(
        total=total,
        room_counts=dict(sorted(room_counts.items())),
        room_fractions=dict(sorted(fractions.items())),
        object_count_min=stats[0],
        object_count_q1=stats[1],
        object_count_median=stats[2],
        object_count_q3=stats[3],
        object_count_max=stats[4],
        distinct_descriptions=len(descriptions),
    )


def split_corpus(records, seed: int, plan: dict):
    """Deterministic (seeded) test split with exact per-room-type counts.

    ``plan`` maps RoomType (or its string value) to the number of test
    scenes wanted.  Selection samples over each room type's records
    sorted by scene_id, so the split depends only on content and seed.
    Returns (train, test) preserving input order within each side.
    """
    records = list(records)
    normalized: dict[RoomType, int] = {}
    for key, count in plan.items():
        room = key if isinstance(key, RoomType) else RoomType.parse(key)
        normalized[room] = int(count)

    by_room: dict[RoomType, list[SceneRecord]] = {}
    for record in records:
        by_room.setdefault(record.layout.room_type, []).append(record)

    rng = random.Random(seed)
    test_ids: set[str] = set()
    for room in sorted(normalized, key=lambda r: r.value):
        want = normalized[room]
        have = by_room.get(room, [])
        if want > len(have):
            raise InsufficientDataError(
                f"plan wants {want} {room.value} scenes, corpus has {len(have)}"
            )
        ordered = sorted(have, key=lambda r: r.scene_id)
        for record in rng.sample(ordered, want):
            test_ids.add(record.scene_id)

    train = [r for r in records if r.scene_id not in test_ids]
    test = [r for r in records if r.scene_id in test_ids]
    return train, test


def load_config(path) -> dict:
    """Read a pipeline config file (JSON; TOML when a toml parser exists).

    Recognized keys: "conventions" (source name -> SourceConvention
    fields), "filter_rules" (FilterRules fields), "split_plan"
    (room type -> test count).
    """
    text = open(path, "r", encoding="utf-8").read()
    if str(path).endswith(".toml"):
        try:
            import tomllib
        except ImportError:
            raise SchemaError(
                "TOML config needs Python >= 3.11; use JSON instead"
            ) from None
        return tomllib.loads(text)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"config is not valid JSON: {exc}") from None


def conventions_from_config(config: dict) -> dict:
    out = dict(DEFAULT_CONVENTIONS)
    for name, body in config.get("conventions", {}).items():
        out[name] = SourceConvention.from_dict(body)
    return out
