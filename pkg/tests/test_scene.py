import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from layoutforge.errors import DegenerateError, NoMatchError, SchemaError
from layoutforge.scene import (
    AssetCatalog,
    BoxSize,
    FloorPlan,
    Layout,
    ObjectSpec,
    PlacedObject,
    Placement,
    RoomType,
    SceneRecord,
    SceneSource,
    TaskSpec,
    layout_from_dict,
    layout_to_dict,
    layouts_semantically_equal,
    normalize_angle,
    parse_layout,
    read_corpus,
    record_from_dict,
    record_to_dict,
    retrieve_boxes,
    serialize_layout,
    task_from_layout,
    write_corpus,
)

from conftest import make_obj


def layout_doc(**overrides):
    doc = {
        "room_type": "bedroom",
        "floor": {"vertices": [[0, 0], [4, 0], [4, 3], [0, 3]]},
        "objects": [
            {
                "instance_id": "bed_1",
                "description": "double bed",
                "bbox": {"width": 1.8, "depth": 2.0, "height": 0.5},
                "coordinates": {"x": 1.0, "y": 2.0, "z": 0.0},
                "rotate": {"angle": 3.14159},
            }
        ],
    }
    doc.update(overrides)
    return doc


# ----------------------------------------------------------------- parsing


def test_parse_layout_basic():
    layout = parse_layout(json.dumps(layout_doc()))
    assert layout.room_type is RoomType.BEDROOM
    assert len(layout.objects) == 1
    obj = layout.objects[0]
    assert obj.instance_id == "bed_1"
    assert obj.placement.x == 1.0 and obj.placement.y == 2.0
    assert obj.placement.rotation == pytest.approx(3.14159)


def test_parse_layout_normalizes_rotation():
    doc = layout_doc()
    doc["objects"][0]["rotate"]["angle"] = 7.0
    layout = parse_layout(json.dumps(doc))
    assert layout.objects[0].placement.rotation == pytest.approx(7.0 - 2 * math.pi)


def test_parse_layout_missing_rotate_is_schema_error():
    doc = layout_doc()
    del doc["objects"][0]["rotate"]
    with pytest.raises(SchemaError):
        parse_layout(json.dumps(doc))


def test_parse_layout_rejects_nonpositive_size():
    doc = layout_doc()
    doc["objects"][0]["bbox"]["width"] = 0.0
    with pytest.raises(ValueError):
        parse_layout(json.dumps(doc))


def test_parse_layout_rejects_nonfinite():
    doc = layout_doc()
    doc["objects"][0]["coordinates"]["x"] = float("inf")
    with pytest.raises(ValueError):
        parse_layout(json.dumps(doc).replace("Infinity", "1e999"))


def test_parse_layout_ignores_unknown_fields():
    doc = layout_doc()
    doc["objects"][0]["style"] = "mid-century"
    doc["mood"] = "cozy"
    layout = parse_layout(json.dumps(doc))
    assert layout.objects[0].description == "double bed"


def test_parse_layout_duplicate_ids_rejected():
    doc = layout_doc()
    doc["objects"].append(dict(doc["objects"][0]))
    with pytest.raises(SchemaError):
        parse_layout(json.dumps(doc))


def test_parse_layout_accepts_bytes_and_dict():
    doc = layout_doc()
    from_bytes = parse_layout(json.dumps(doc).encode())
    from_dict = parse_layout(doc)
    assert layouts_semantically_equal(from_bytes, from_dict)


def test_floor_validation():
    with pytest.raises(SchemaError):
        FloorPlan(vertices=((0, 0), (1, 0)))
    with pytest.raises(DegenerateError):
        FloorPlan(vertices=((0, 0), (1, 1), (2, 2)))
    with pytest.raises(DegenerateError):  # bow-tie self-intersection
        FloorPlan(vertices=((0, 0), (2, 2), (2, 0), (0, 2)))


def test_lenient_mode_tolerates_sloppy_shapes(bedroom_task):
    doc = {
        "room_type": "Bedroom",
        "objects": [
            {
                "object": "double bed",  # alias key
                "coordinates": [{"x": 1.0, "y": 1.5, "z": 0.0}],  # singleton list
                "rotate": 1.5,  # bare number
                "bbox": [1.8, 2.0, 0.5],  # array shape
            },
            {
                "description": "nightstand",
                "coordinates": {"x": 3.0, "y": 0.5, "z": 0.0},
                "rotate": {"angle": 0.0},
                # no bbox: filled from the task
            },
        ],
    }
    layout = layout_from_dict(doc, strict=False, task=bedroom_task)
    assert layout.floor == bedroom_task.floor  # floor merged from task
    assert layout.objects[0].size.width == 1.8
    assert layout.objects[1].size.width == 0.5  # nightstand size from task
    assert layout.objects[0].instance_id.startswith("double_bed")


# ----------------------------------------------------------- serialization


def test_serialize_round_trip(disjoint_layout):
    text = serialize_layout(disjoint_layout)
    back = parse_layout(text)
    assert layouts_semantically_equal(back, disjoint_layout)
    assert [o.instance_id for o in back.objects] == ["bed_1", "desk_1"]


def test_serialize_empty_objects(square_floor):
    layout = Layout(room_type=RoomType.KITCHEN, floor=square_floor, objects=())
    doc = json.loads(serialize_layout(layout))
    assert doc["objects"] == []


def test_serialize_zero_rotation_exact(square_floor):
    layout = Layout(
        room_type=RoomType.BEDROOM,
        floor=square_floor,
        objects=(make_obj("a", "crate", 1, 1, r=0.0),),
    )
    doc = json.loads(serialize_layout(layout))
    assert doc["objects"][0]["rotate"]["angle"] == 0.0


def test_serialized_key_order_is_stable(disjoint_layout):
    text = serialize_layout(disjoint_layout)
    obj = json.loads(text)["objects"][0]
    assert list(obj.keys()) == ["instance_id", "description", "bbox", "coordinates", "rotate"]
    assert serialize_layout(disjoint_layout) == text  # byte-stable


@given(st.floats(-50.0, 50.0))
def test_normalize_angle_idempotent(r):
    once = normalize_angle(r)
    assert 0.0 <= once < 2 * math.pi
    assert normalize_angle(once) == once


@given(
    st.lists(
        st.tuples(
            st.floats(0.1, 5.0), st.floats(0.1, 5.0), st.floats(0.0, 2 * math.pi - 1e-6)
        ),
        min_size=0,
        max_size=5,
    )
)
def test_round_trip_property(entries):
    floor = FloorPlan(vertices=((0, 0), (8, 0), (8, 8), (0, 8)))
    objs = tuple(
        make_obj(f"it_{i}", f"item {i}", x, y, r=r) for i, (x, y, r) in enumerate(entries)
    )
    layout = Layout(room_type=RoomType.LIVING_ROOM, floor=floor, objects=objs)
    assert layouts_semantically_equal(parse_layout(serialize_layout(layout)), layout)


# ---------------------------------------------------------------- catalog


CATALOG = AssetCatalog.from_dict(
    {
        "double bed": {"width": 1.8, "depth": 2.0, "height": 0.5, "category": "bed"},
        "office desk": {"width": 1.2, "depth": 0.6, "height": 0.75, "category": "table"},
        "floor lamp": {"width": 0.3, "depth": 0.3, "height": 1.6, "category": "lighting"},
    }
)


def test_retrieve_exact_match():
    specs = [ObjectSpec("double bed", 1, None)]
    out = retrieve_boxes(specs, CATALOG)
    assert out[0].size == BoxSize(1.8, 2.0, 0.5)


def test_retrieve_passthrough():
    specs = [ObjectSpec("double bed", 1, BoxSize(1, 1, 1))]
    out = retrieve_boxes(specs, CATALOG)
    assert out[0].size == BoxSize(1, 1, 1)


def test_retrieve_token_overlap():
    out = retrieve_boxes([ObjectSpec("modern Desk", 2, None)], CATALOG)
    assert out[0].size == BoxSize(1.2, 0.6, 0.75)
    assert out[0].quantity == 2
    assert out[0].description == "modern Desk"  # description untouched


def test_retrieve_no_match():
    with pytest.raises(NoMatchError):
        retrieve_boxes([ObjectSpec("flying carpet", 1, None)], CATALOG)


# ------------------------------------------------------------------ corpus


def test_corpus_round_trip(tmp_path, disjoint_layout):
    records = [
        SceneRecord(
            scene_id=f"scene-{i}",
            layout=disjoint_layout,
            source=SceneSource.THREE_D_FRONT,
            semantic_summary="a sparse bedroom" if i == 0 else None,
        )
        for i in range(3)
    ]
    path = tmp_path / "corpus.jsonl"
    assert write_corpus(records, path) == 3
    back = read_corpus(path)
    assert [r.scene_id for r in back] == ["scene-0", "scene-1", "scene-2"]
    assert back[0].semantic_summary == "a sparse bedroom"
    assert back[1].semantic_summary is None
    assert layouts_semantically_equal(back[2].layout, disjoint_layout)


def test_corpus_duplicate_scene_id_rejected(tmp_path, disjoint_layout):
    rec = record_to_dict(
        SceneRecord(scene_id="dup", layout=disjoint_layout, source=SceneSource.GENERATED)
    )
    path = tmp_path / "corpus.jsonl"
    path.write_text(json.dumps(rec) + "\n" + json.dumps(rec) + "\n")
    with pytest.raises(SchemaError):
        read_corpus(path)


def test_record_source_round_trip(disjoint_layout):
    rec = SceneRecord(
        scene_id="x", layout=disjoint_layout, source=SceneSource.HOLODECK_SYNTH
    )
    assert record_from_dict(record_to_dict(rec)).source is SceneSource.HOLODECK_SYNTH


# ---------------------------------------------------------------- TaskSpec


def test_task_requires_objects(square_floor):
    with pytest.raises(SchemaError):
        TaskSpec(room_type=RoomType.BEDROOM, floor=square_floor, objects=())


def test_task_from_layout_groups_duplicates(square_floor):
    layout = Layout(
        room_type=RoomType.BEDROOM,
        floor=square_floor,
        objects=(
            make_obj("n_1", "nightstand", 1, 1, w=0.5, d=0.4),
            make_obj("b_1", "bed", 3, 3, w=1.8, d=2.0),
            make_obj("n_2", "nightstand", 5, 1, w=0.5, d=0.4),
        ),
    )
    task = task_from_layout(layout)
    assert [(s.description, s.quantity) for s in task.objects] == [
        ("nightstand", 2),
        ("bed", 1),
    ]
    assert task.total_quantity() == 3


def test_placed_object_needs_size():
    with pytest.raises(SchemaError):
        PlacedObject(
            instance_id="a",
            spec=ObjectSpec("thing", 1, None),
            placement=Placement(0, 0, 0, 0),
        )


def test_room_type_parsing():
    assert RoomType.parse("Living Room") is RoomType.LIVING_ROOM
    assert RoomType.parse("living-room") is RoomType.LIVING_ROOM
    assert RoomType.parse("bedroom") is RoomType.BEDROOM
    with pytest.raises(SchemaError):
        RoomType.parse("garage")
