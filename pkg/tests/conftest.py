import math

import pytest

from layoutforge.scene import (
    BoxSize,
    FloorPlan,
    Layout,
    ObjectSpec,
    PlacedObject,
    Placement,
    RoomType,
    TaskSpec,
)


def make_obj(instance_id, description, x, y, *, w=1.0, d=1.0, h=0.5, r=0.0, z=0.0):
    return PlacedObject(
        instance_id=instance_id,
        spec=ObjectSpec(description=description, quantity=1, size=BoxSize(w, d, h)),
        placement=Placement(x, y, z, r),
    )


@pytest.fixture
def square_floor():
    return FloorPlan(vertices=((0.0, 0.0), (6.0, 0.0), (6.0, 6.0), (0.0, 6.0)))


@pytest.fixture
def l_floor():
    # 5×2 bottom bar plus a 2×2 upper-left block
    return FloorPlan(
        vertices=((0.0, 0.0), (5.0, 0.0), (5.0, 2.0), (2.0, 2.0), (2.0, 4.0), (0.0, 4.0))
    )


@pytest.fixture
def bedroom_task():
    floor = FloorPlan(vertices=((0.0, 0.0), (4.0, 0.0), (4.0, 3.0), (0.0, 3.0)))
    return TaskSpec(
        room_type=RoomType.BEDROOM,
        floor=floor,
        objects=(
            ObjectSpec("double bed", 1, BoxSize(1.8, 2.0, 0.5)),
            ObjectSpec("nightstand", 2, BoxSize(0.5, 0.4, 0.55)),
            ObjectSpec("wardrobe", 1, BoxSize(1.2, 0.6, 2.0)),
        ),
    )


@pytest.fixture
def living_room_task():
    floor = FloorPlan(vertices=((0.0, 0.0), (6.0, 0.0), (6.0, 5.0), (0.0, 5.0)))
    return TaskSpec(
        room_type=RoomType.LIVING_ROOM,
        floor=floor,
        objects=(
            ObjectSpec("sofa", 1, BoxSize(2.0, 0.9, 0.8)),
            ObjectSpec("coffee table", 1, BoxSize(1.0, 0.6, 0.45)),
            ObjectSpec("armchair", 2, BoxSize(0.8, 0.8, 0.9)),
            ObjectSpec("tv stand", 1, BoxSize(1.4, 0.4, 0.5)),
            ObjectSpec("bookshelf", 1, BoxSize(0.8, 0.3, 1.8)),
        ),
    )


@pytest.fixture
def disjoint_layout(square_floor):
    return Layout(
        room_type=RoomType.BEDROOM,
        floor=square_floor,
        objects=(
            make_obj("bed_1", "double bed", 1.5, 1.5, w=1.8, d=2.0),
            make_obj("desk_1", "desk", 4.8, 4.8, w=1.2, d=0.6),
        ),
    )


@pytest.fixture
def coincident_layout(square_floor):
    return Layout(
        room_type=RoomType.BEDROOM,
        floor=square_floor,
        objects=(
            make_obj("a", "crate", 3.0, 3.0),
            make_obj("b", "crate", 3.0, 3.0),
        ),
    )
