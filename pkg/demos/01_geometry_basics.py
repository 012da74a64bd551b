"""
Footprints, overlap areas, and the overlap rate
================================================

"""

import math

# every placed object casts an oriented rectangle on the floor plane
from layoutforge.geometry import footprint, overlap_area, containment_violation, oor
from layoutforge.scene import BoxSize, FloorPlan, Layout, ObjectSpec, PlacedObject, Placement, RoomType

bed = footprint(Placement(2.0, 1.5, 0.0, 0.0), BoxSize(1.8, 2.0, 0.5))
print("bed corners:", [(round(x, 3), round(y, 3)) for x, y in bed.corners()])

# rotate it 45 degrees and intersect with the unrotated copy
bed_rot = footprint(Placement(2.0, 1.5, 0.0, math.pi / 4), BoxSize(1.8, 2.0, 0.5))
print("overlap with its own 45-degree twin:", round(overlap_area(bed, bed_rot), 4), "m^2")

# push it against the wall of a 4x3 room and measure what pokes out
floor = FloorPlan(((0.0, 0.0), (4.0, 0.0), (4.0, 3.0), (0.0, 3.0)))
against_wall = footprint(Placement(3.8, 1.5, 0.0, 0.0), BoxSize(1.8, 2.0, 0.5))
print("area outside the floor:", round(containment_violation(against_wall, floor), 4), "m^2")


def obj(iid, desc, x, y, w, d, r=0.0):
    return PlacedObject(
        instance_id=iid,
        spec=ObjectSpec(description=desc, quantity=1, size=BoxSize(w, d, 0.5)),
        placement=Placement(x, y, 0.0, r),
    )


# the overlap rate sums pairwise intersections over total footprint area;
# two coincident unit squares share 1 m^2 of 2 m^2 -> 0.5
layout = Layout(
    room_type=RoomType.BEDROOM,
    floor=floor,
    objects=(obj("a", "crate", 2.0, 1.5, 1.0, 1.0), obj("b", "crate", 2.0, 1.5, 1.0, 1.0)),
)
print("coincident pair OOR:", oor(layout))

# three mutually-overlapping objects can push the raw ratio past 1.0 on
# purpose: it is a diagnostic, not a probability
pileup = Layout(
    room_type=RoomType.BEDROOM,
    floor=floor,
    objects=tuple(obj(c, "crate", 2.0, 1.5, 1.0, 1.0) for c in "abc"),
)
print("three coincident crates OOR:", oor(pileup))
