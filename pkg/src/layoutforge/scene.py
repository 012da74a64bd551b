"""Canonical layout data model and its JSON wire forms.

A layout is a room (type + floor polygon) plus a list of placed objects,
each carrying a description, a bounding-box size, a position, and a
rotation about the vertical axis.  The canonical convention is z-up,
z=0 at floor level, rotations in radians.

Two parsing modes exist:

* ``parse_layout`` — strict: every field of the documented layout file
  format must be present and well typed.
* ``layout_from_dict(..., strict=False)`` — lenient: tolerates the wire
  variations LLMs produce (``"object"`` as the description key, singleton
  lists around ``coordinates``/``rotate``, missing ids) and can borrow
  floor/bbox data from a bound task.

All types are immutable values; operations are pure.
"""

from __future__ import annotations

import enum
import json
import math
import re
from dataclasses import dataclass, field, replace

from .errors import DegenerateError, NoMatchError, SchemaError

TWO_PI = 2.0 * math.pi


def normalize_angle(angle: float) -> float:
    """Map an angle in radians onto [0, 2*pi). Idempotent."""
    if not math.isfinite(angle):
        raise ValueError(f"angle must be finite, got {angle!r}")
    a = math.fmod(angle, TWO_PI)
    if a < 0.0:
        a += TWO_PI
    if a >= TWO_PI:  # fmod rounding can land exactly on 2*pi
        a = 0.0
    return a


class RoomType(enum.Enum):
    BEDROOM = "bedroom"
    LIVING_ROOM = "living_room"
    KITCHEN = "kitchen"
    BATHROOM = "bathroom"

    @property
    def display_name(self) -> str:
        """Human form used in prompts: 'bedroom' -> 'Bedroom', 'living_room' -> 'Living Room'."""
        return self.value.replace("_", " ").title()

    @classmethod
    def parse(cls, value: str) -> "RoomType":
        if not isinstance(value, str):
            raise SchemaError(f"room_type must be a string, got {type(value).__name__}")
        key = value.strip().lower().replace(" ", "_").replace("-", "_")
        try:
            return cls(key)
        except ValueError:
            raise SchemaError(
                f"unknown room_type {value!r}; expected one of "
                + ", ".join(m.value for m in cls)
            ) from None


class UpAxis(enum.Enum):
    Y_UP = "y_up"
    Z_UP = "z_up"


class SceneSource(enum.Enum):
    THREE_D_FRONT = "three_d_front"
    HOLODECK_SYNTH = "holodeck_synth"
    GENERATED = "generated"

    @classmethod
    def parse(cls, value: str) -> "SceneSource":
        try:
            return cls(value)
        except ValueError:
            raise SchemaError(
                f"unknown source {value!r}; expected one of "
                + ", ".join(m.value for m in cls)
            ) from None


def _require_finite(name: str, value) -> float:
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise SchemaError(f"{name} must be a number, got {value!r}") from None
    if not math.isfinite(v):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return v


# orientation helpers shared by simplicity checking

def _cross(ox, oy, ax, ay, bx, by):
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox)


def _segments_cross(p1, p2, p3, p4) -> bool:
    # proper or improper intersection of closed segments p1p2 and p3p4
    d1 = _cross(p3[0], p3[1], p4[0], p4[1], p1[0], p1[1])
    d2 = _cross(p3[0], p3[1], p4[0], p4[1], p2[0], p2[1])
    d3 = _cross(p1[0], p1[1], p2[0], p2[1], p3[0], p3[1])
    d4 = _cross(p1[0], p1[1], p2[0], p2[1], p4[0], p4[1])
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and (
        (d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)
    ):
        return True

    def on_seg(a, b, p):
        return (
            min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
            and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])
        )

    if d1 == 0 and on_seg(p3, p4, p1):
        return True
    if d2 == 0 and on_seg(p3, p4, p2):
        return True
    if d3 == 0 and on_seg(p1, p2, p3):
        return True
    if d4 == 0 and on_seg(p1, p2, p4):
        return True
    return False


def _shoelace(vertices) -> float:
    s = 0.0
    n = len(vertices)
    for i in range(n):
        x1, y1 = vertices[i]
        x2, y2 = vertices[(i + 1) % n]
        s += x1 * y2 - x2 * y1
    return 0.5 * s


@dataclass(frozen=True)
class FloorPlan:
    """Simple (non-self-intersecting) floor polygon with nonzero area, z-up."""

    vertices: tuple[tuple[float, float], ...]
    up_axis: UpAxis = UpAxis.Z_UP

    def __post_init__(self):
        verts = tuple(
            (_require_finite("floor vertex x", v[0]), _require_finite("floor vertex y", v[1]))
            for v in self.vertices
        )
        object.__setattr__(self, "vertices", verts)
        if len(verts) < 3:
            raise SchemaError(f"floor needs >= 3 vertices, got {len(verts)}")
        if self.up_axis is not UpAxis.Z_UP:
            raise SchemaError("floor plans are stored z-up only; convert at ingestion")
        if abs(_shoelace(verts)) == 0.0:
            raise DegenerateError("floor polygon has zero area")
        n = len(verts)
        for i in range(n):
            a1, a2 = verts[i], verts[(i + 1) % n]
            for j in range(i + 1, n):
                if j == i or (j + 1) % n == i or (i + 1) % n == j:
                    continue  # adjacent edges share a vertex by construction
                b1, b2 = verts[j], verts[(j + 1) % n]
                if _segments_cross(a1, a2, b1, b2):
                    raise DegenerateError(
                        f"floor polygon self-intersects (edges {i} and {j})"
                    )

    def signed_area(self) -> float:
        return _shoelace(self.vertices)

    def to_dict(self) -> dict:
        return {"vertices": [[x, y] for x, y in self.vertices]}

    @classmethod
    def from_dict(cls, data) -> "FloorPlan":
        if not isinstance(data, dict):
            raise SchemaError(f"floor must be an object, got {type(data).__name__}")
        if "vertices" not in data:
            raise SchemaError("floor missing required field 'vertices'")
        raw = data["vertices"]
        if not isinstance(raw, (list, tuple)):
            raise SchemaError("floor.vertices must be an array of [x, y] pairs")
        verts = []
        for i, v in enumerate(raw):
            if not isinstance(v, (list, tuple)) or len(v) != 2:
                raise SchemaError(f"floor.vertices[{i}] must be an [x, y] pair")
            verts.append((v[0], v[1]))
        return cls(tuple(verts))


@dataclass(frozen=True)
class BoxSize:
    """Object bounding-box dimensions in meters; all strictly positive."""

    width: float
    depth: float
    height: float

    def __post_init__(self):
        for name in ("width", "depth", "height"):
            v = _require_finite(f"bbox {name}", getattr(self, name))
            if v <= 0.0:
                raise ValueError(f"bbox {name} must be > 0, got {v}")
            object.__setattr__(self, name, v)

    def to_dict(self) -> dict:
        return {"width": self.width, "depth": self.depth, "height": self.height}

    @classmethod
    def from_dict(cls, data) -> "BoxSize":
        if isinstance(data, (list, tuple)) and len(data) == 3:
            return cls(data[0], data[1], data[2])
        if not isinstance(data, dict):
            raise SchemaError(f"bbox must be an object, got {type(data).__name__}")
        missing = [k for k in ("width", "depth", "height") if k not in data]
        if missing:
            raise SchemaError(f"bbox missing required field(s): {', '.join(missing)}")
        return cls(data["width"], data["depth"], data["height"])


@dataclass(frozen=True)
class ObjectSpec:
    """What to place: a description, how many, and (optionally) how big."""

    description: str
    quantity: int = 1
    size: BoxSize | None = None
    asset_id: str | None = None

    def __post_init__(self):
        if not isinstance(self.description, str) or not self.description.strip():
            raise SchemaError("object description must be a non-empty string")
        if not isinstance(self.quantity, int) or isinstance(self.quantity, bool):
            raise ValueError(f"quantity must be an integer, got {self.quantity!r}")
        if self.quantity < 1:
            raise ValueError(f"quantity must be >= 1, got {self.quantity}")


@dataclass(frozen=True)
class Placement:
    """Position (x, y on the ground plane, z height of origin) and rotation.

    The constructor checks finiteness only.  Canonical producers
    (parse_layout, completion parsing, convention conversion, injectors)
    normalize rotation to [0, 2*pi); raw ingestion records may hold
    source-convention values (degrees, unflipped) until converted.
    """

    x: float
    y: float
    z: float
    rotation: float

    def __post_init__(self):
        for name in ("x", "y", "z", "rotation"):
            object.__setattr__(self, name, _require_finite(name, getattr(self, name)))

    def normalized(self) -> "Placement":
        return replace(self, rotation=normalize_angle(self.rotation))


@dataclass(frozen=True)
class PlacedObject:
    """One placed instance: spec (quantity pinned to 1), placement, unique id."""

    instance_id: str
    spec: ObjectSpec
    placement: Placement

    def __post_init__(self):
        if not isinstance(self.instance_id, str) or not self.instance_id.strip():
            raise SchemaError("instance_id must be a non-empty string")
        if self.spec.size is None:
            raise SchemaError(
                f"placed object {self.instance_id!r} has no bbox size"
            )

    @property
    def description(self) -> str:
        return self.spec.description

    @property
    def size(self) -> BoxSize:
        return self.spec.size  # type: ignore[return-value]


@dataclass(frozen=True)
class Layout:
    """A room type, its floor polygon, and the placed objects inside it."""

    room_type: RoomType
    floor: FloorPlan
    objects: tuple[PlacedObject, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))
        seen = set()
        for obj in self.objects:
            if obj.instance_id in seen:
                raise SchemaError(f"duplicate instance_id {obj.instance_id!r}")
            seen.add(obj.instance_id)

    def get(self, instance_id: str) -> PlacedObject | None:
        for obj in self.objects:
            if obj.instance_id == instance_id:
                return obj
        return None


@dataclass(frozen=True)
class SceneRecord:
    """One corpus entry: a layout plus provenance and an optional summary."""

    scene_id: str
    source: SceneSource
    layout: Layout
    semantic_summary: str | None = None

    def __post_init__(self):
        if not isinstance(self.scene_id, str) or not self.scene_id.strip():
            raise SchemaError("scene_id must be a non-empty string")


@dataclass(frozen=True)
class TaskSpec:
    """A structured generation request: instruction, room, floor, object specs."""

    room_type: RoomType
    floor: FloorPlan
    objects: tuple[ObjectSpec, ...]
    instruction: str = ""

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))
        if not self.objects:
            raise SchemaError("task needs at least one object spec")

    def total_quantity(self) -> int:
        return sum(spec.quantity for spec in self.objects)


# --- asset catalog ---------------------------------------------------------

_TOKEN_RE = re.compile(r"[a-z0-9]+")


def _tokens(text: str) -> frozenset[str]:
    return frozenset(_TOKEN_RE.findall(text.lower()))


@dataclass(frozen=True)
class CatalogEntry:
    size: BoxSize
    category: str = ""


class AssetCatalog:
    """Name -> size lookup standing in for a real asset database."""

    def __init__(self, entries: dict[str, CatalogEntry]):
        if not entries:
            raise SchemaError("asset catalog must not be empty")
        self._entries = dict(entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, key: str) -> bool:
        return key in self._entries

    @property
    def entries(self) -> dict[str, CatalogEntry]:
        return dict(self._entries)

    def lookup(self, description: str) -> CatalogEntry:
        """Exact key match, else highest case-insensitive token overlap.

        Ties on overlap break toward the lexicographically smallest key so
        lookups are deterministic.  Zero overlap with every key raises
        NoMatchError.
        """
        if description in self._entries:
            return self._entries[description]
        want = _tokens(description)
        best_key = None
        best_score = 0
        for key in sorted(self._entries):
            score = len(want & _tokens(key))
            if score > best_score:
                best_key, best_score = key, score
        if best_key is None:
            raise NoMatchError(f"no catalog entry matches {description!r}")
        return self._entries[best_key]

    @classmethod
    def from_dict(cls, data: dict) -> "AssetCatalog":
        if not isinstance(data, dict):
            raise SchemaError("catalog must be a JSON object")
        entries = {}
        for name, body in data.items():
            if not isinstance(body, dict):
                raise SchemaError(f"catalog entry {name!r} must be an object")
            entries[name] = CatalogEntry(
                size=BoxSize.from_dict(body), category=str(body.get("category", ""))
            )
        return cls(entries)

    @classmethod
    def load(cls, path) -> "AssetCatalog":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def retrieve_boxes(specs, catalog: AssetCatalog) -> list[ObjectSpec]:
    """Fill in missing sizes from the catalog; sized specs pass through unchanged."""
    out = []
    for spec in specs:
        if spec.size is not None:
            out.append(spec)
            continue
        entry = catalog.lookup(spec.description)
        out.append(replace(spec, size=entry.size))
    return out


# --- serialization ---------------------------------------------------------

def _slugify(text: str) -> str:
    slug = re.sub(r"[^a-z0-9]+", "_", text.lower()).strip("_")
    return slug or "object"


def _object_to_dict(obj: PlacedObject) -> dict:
    return {
        "instance_id": obj.instance_id,
        "description": obj.description,
        "bbox": obj.size.to_dict(),
        "coordinates": {
            "x": obj.placement.x,
            "y": obj.placement.y,
            "z": obj.placement.z,
        },
        "rotate": {"angle": obj.placement.rotation},
    }


def layout_to_dict(layout: Layout) -> dict:
    return {
        "room_type": layout.room_type.value,
        "floor": layout.floor.to_dict(),
        "objects": [_object_to_dict(obj) for obj in layout.objects],
    }


def serialize_layout(layout: Layout, *, indent: int | None = 2) -> str:
    """Layout -> canonical JSON text. parse_layout inverts it bit-for-bit
    on positions and mod-2*pi on rotations."""
    return json.dumps(layout_to_dict(layout), indent=indent)


def _coerce_xyz(data, *, strict: bool) -> tuple[float, float, float]:
    if isinstance(data, (list, tuple)):
        if len(data) == 1 and isinstance(data[0], dict) and not strict:
            data = data[0]
        elif len(data) == 3 and not strict:
            return (data[0], data[1], data[2])
        else:
            raise SchemaError("coordinates must be an object with x, y, z")
    if not isinstance(data, dict):
        raise SchemaError("coordinates must be an object with x, y, z")
    missing = [k for k in ("x", "y") if k not in data]
    if missing or ("z" not in data and strict):
        missing = [k for k in ("x", "y", "z") if k not in data]
        raise SchemaError(f"coordinates missing field(s): {', '.join(missing)}")
    return (data["x"], data["y"], data.get("z", 0.0))


def _coerce_angle(data, *, strict: bool):
    if isinstance(data, (list, tuple)) and not strict:
        if len(data) == 1:
            data = data[0]
        else:
            raise SchemaError("rotate must be an object with an 'angle' field")
    if isinstance(data, (int, float)) and not isinstance(data, bool) and not strict:
        return data
    if not isinstance(data, dict) or "angle" not in data:
        raise SchemaError("rotate must be an object with an 'angle' field")
    return data["angle"]


def _match_spec_by_description(description: str, specs) -> ObjectSpec | None:
    for spec in specs:
        if spec.description.lower() == description.lower():
            return spec
    want = _tokens(description)
    best = None
    best_score = 0
    for spec in specs:
        score = len(want & _tokens(spec.description))
        if score > best_score:
            best, best_score = spec, score
    return best


def _object_from_dict(
    data,
    index: int,
    *,
    strict: bool,
    task: TaskSpec | None,
    used_ids: set[str],
    keep_raw_angles: bool = False,
) -> PlacedObject:
    if not isinstance(data, dict):
        raise SchemaError(f"objects[{index}] must be an object")

    if "description" in data:
        description = data["description"]
    elif "object" in data and not strict:
        description = data["object"]
    else:
        raise SchemaError(f"objects[{index}] missing required field 'description'")
    if not isinstance(description, str) or not description.strip():
        raise SchemaError(f"objects[{index}] description must be a non-empty string")

    size = None
    for key in ("bbox",) if strict else ("bbox", "size", "bounding_box"):
        if key in data:
            size = BoxSize.from_dict(data[key])
            break
    if size is None:
        if strict:
            raise SchemaError(f"objects[{index}] missing required field 'bbox'")
        if task is not None:
            matched = _match_spec_by_description(description, task.objects)
            if matched is not None and matched.size is not None:
                size = matched.size
        if size is None:
            raise SchemaError(
                f"objects[{index}] ({description!r}) has no bbox and no task to borrow one from"
            )

    if "coordinates" not in data:
        raise SchemaError(f"objects[{index}] missing required field 'coordinates'")
    x, y, z = _coerce_xyz(data["coordinates"], strict=strict)
    if "rotate" not in data:
        raise SchemaError(f"objects[{index}] missing required field 'rotate'")
    angle = _coerce_angle(data["rotate"], strict=strict)

    x = _require_finite(f"objects[{index}].x", x)
    y = _require_finite(f"objects[{index}].y", y)
    z = _require_finite(f"objects[{index}].z", z)
    angle = _require_finite(f"objects[{index}].angle", angle)
    # canonical documents are z-up with the floor at z=0; raw source files
    # parsed leniently may still carry pre-conversion coordinates
    if strict and z < 0.0:
        raise ValueError(f"objects[{index}].z must be >= 0, got {z}")

    if "instance_id" in data:
        instance_id = data["instance_id"]
        if not isinstance(instance_id, str) or not instance_id.strip():
            raise SchemaError(f"objects[{index}] instance_id must be a non-empty string")
        if instance_id in used_ids:
            if strict:
                raise SchemaError(f"duplicate instance_id {instance_id!r}")
            n = 2
            while f"{instance_id}_{n}" in used_ids:
                n += 1
            instance_id = f"{instance_id}_{n}"
    else:
        if strict:
            raise SchemaError(f"objects[{index}] missing required field 'instance_id'")
        instance_id = f"{_slugify(description)}_{index + 1}"
        n = 2
        base = instance_id
        while instance_id in used_ids:
            instance_id = f"{base}_{n}"
            n += 1
    used_ids.add(instance_id)

    return PlacedObject(
        instance_id=instance_id,
        spec=ObjectSpec(description=description, quantity=1, size=size),
        placement=Placement(x, y, z, angle if keep_raw_angles else normalize_angle(angle)),
    )


def layout_from_dict(
    data,
    *,
    strict: bool = True,
    task: TaskSpec | None = None,
    keep_raw_angles: bool = False,
) -> Layout:
    """Build a Layout from decoded JSON.

    strict=True enforces the documented layout file format.  strict=False
    accepts completion-style variants and may borrow room_type/floor/bbox
    from ``task``; a bare list is treated as the objects array.
    keep_raw_angles skips rotation normalization so pre-conversion source
    values (e.g. degrees) survive ingestion intact.
    """
    if isinstance(data, list) and not strict:
        data = {"objects": data}
    if not isinstance(data, dict):
        raise SchemaError(f"layout document must be a JSON object, got {type(data).__name__}")

    if "room_type" in data:
        room_type = RoomType.parse(data["room_type"])
    elif not strict and task is not None:
        room_type = task.room_type
    else:
        raise SchemaError("layout missing required field 'room_type'")

    if "floor" in data:
        floor = FloorPlan.from_dict(data["floor"])
    elif not strict and task is not None:
        floor = task.floor
    else:
        raise SchemaError("layout missing required field 'floor'")

    if "objects" not in data:
        raise SchemaError("layout missing required field 'objects'")
    raw_objects = data["objects"]
    if not isinstance(raw_objects, (list, tuple)):
        raise SchemaError("layout 'objects' must be an array")

    used_ids: set[str] = set()
    objects = [
        _object_from_dict(
            entry,
            i,
            strict=strict,
            task=task,
            used_ids=used_ids,
            keep_raw_angles=keep_raw_angles,
        )
        for i, entry in enumerate(raw_objects)
    ]
    return Layout(room_type=room_type, floor=floor, objects=tuple(objects))


def parse_layout(document) -> Layout:
    """Strict parse of the layout file format (text, bytes, or decoded dict)."""
    if isinstance(document, bytes):
        document = document.decode("utf-8")
    if isinstance(document, str):
        try:
            data = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"layout document is not valid JSON: {exc}") from None
    else:
        data = document
    return layout_from_dict(data, strict=True)


def layouts_semantically_equal(a: Layout, b: Layout, tol: float = 1e-9) -> bool:
    """Same room/floor/ids, positions within tol, rotations equal mod 2*pi."""
    if a.room_type is not b.room_type:
        return False
    if len(a.floor.vertices) != len(b.floor.vertices):
        return False
    for (ax, ay), (bx, by) in zip(a.floor.vertices, b.floor.vertices):
        if abs(ax - bx) > tol or abs(ay - by) > tol:
            return False
    if len(a.objects) != len(b.objects):
        return False
    b_by_id = {obj.instance_id: obj for obj in b.objects}
    for obj in a.objects:
        other = b_by_id.get(obj.instance_id)
        if other is None or obj.description != other.description:
            return False
        for dim in ("width", "depth", "height"):
            if abs(getattr(obj.size, dim) - getattr(other.size, dim)) > tol:
                return False
        pa, pb = obj.placement, other.placement
        if abs(pa.x - pb.x) > tol or abs(pa.y - pb.y) > tol or abs(pa.z - pb.z) > tol:
            return False
        diff = abs(normalize_angle(pa.rotation) - normalize_angle(pb.rotation))
        if min(diff, TWO_PI - diff) > tol:
            return False
    return True


# --- corpus JSONL ----------------------------------------------------------

def record_to_dict(record: SceneRecord) -> dict:
    return {
        "scene_id": record.scene_id,
        "source": record.source.value,
        "semantic_summary": record.semantic_summary,
        "layout": layout_to_dict(record.layout),
    }


def record_from_dict(data, *, strict: bool = True, keep_raw_angles: bool = False) -> SceneRecord:
    if not isinstance(data, dict):
        raise SchemaError("corpus record must be a JSON object")
    for key in ("scene_id", "source", "layout"):
        if key not in data:
            raise SchemaError(f"corpus record missing required field {key!r}")
    summary = data.get("semantic_summary")
    if summary is not None and not isinstance(summary, str):
        raise SchemaError("semantic_summary must be a string or null")
    return SceneRecord(
        scene_id=data["scene_id"],
        source=SceneSource.parse(data["source"]),
        layout=layout_from_dict(data["layout"], strict=strict, keep_raw_angles=keep_raw_angles),
        semantic_summary=summary,
    )


def read_corpus(path, *, strict: bool = True) -> list[SceneRecord]:
    """Read a JSONL corpus; scene ids must be unique within the file."""
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
            record = record_from_dict(data, strict=strict)
            if record.scene_id in seen:
                raise SchemaError(f"{path}:{lineno}: duplicate scene_id {record.scene_id!r}")
            seen.add(record.scene_id)
            records.append(record)
    return records


def write_corpus(records, path) -> int:
    """Write records as JSONL; returns the number written."""
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record_to_dict(record)))
            fh.write("\n")
            n += 1
    return n


# --- tasks -----------------------------------------------------------------

def task_from_layout(layout: Layout, instruction: str = "") -> TaskSpec:
    """Derive the generation request a layout answers: specs grouped by
    (description, size) in first-seen order, quantities accumulated."""
    grouped: dict[tuple, list] = {}
    order = []
    for obj in layout.objects:
        key = (obj.description, obj.size.width, obj.size.depth, obj.size.height)
        if key not in grouped:
            grouped[key] = [obj.spec, 0]
            order.append(key)
        grouped[key][1] += 1
    specs = tuple(
        replace(grouped[key][0], quantity=grouped[key][1]) for key in order
    )
    return TaskSpec(
        room_type=layout.room_type,
        floor=layout.floor,
        objects=specs,
        instruction=instruction,
    )


def task_to_dict(task: TaskSpec) -> dict:
    return {
        "instruction": task.instruction,
        "room_type": task.room_type.value,
        "floor": task.floor.to_dict(),
        "objects": [
            {
                "description": spec.description,
                "quantity": spec.quantity,
                **({"bbox": spec.size.to_dict()} if spec.size is not None else {}),
            }
            for spec in task.objects
        ],
    }


def task_from_dict(data) -> TaskSpec:
    if not isinstance(data, dict):
        raise SchemaError("task must be a JSON object")
    for key in ("room_type", "floor", "objects"):
        if key not in data:
            raise SchemaError(f"task missing required field {key!r}")
    if not isinstance(data["objects"], (list, tuple)):
        raise SchemaError("task 'objects' must be an array")
    specs = []
    for i, entry in enumerate(data["objects"]):
        if not isinstance(entry, dict):
            raise SchemaError(f"task objects[{i}] must be an object")
        if "description" not in entry:
            raise SchemaError(f"task objects[{i}] missing 'description'")
        size = None
        if "bbox" in entry:
            size = BoxSize.from_dict(entry["bbox"])
        quantity = entry.get("quantity", 1)
        if not isinstance(quantity, int) or isinstance(quantity, bool):
            raise SchemaError(f"task objects[{i}] quantity must be an integer")
        specs.append(
            ObjectSpec(
                description=entry["description"],
                quantity=quantity,
                size=size,
                asset_id=entry.get("asset_id"),
            )
        )
    return TaskSpec(
        room_type=RoomType.parse(data["room_type"]),
        floor=FloorPlan.from_dict(data["floor"]),
        objects=tuple(specs),
        instruction=str(data.get("instruction", "")),
    )


def load_task(path) -> TaskSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return task_from_dict(json.load(fh))
