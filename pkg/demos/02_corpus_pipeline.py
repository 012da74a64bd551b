#!/usr/bin/env python3
# Corpus pipeline: convention alignment -> recenter -> filter -> stats -> split.
# Raw scene dumps disagree about up axes and rotation units; everything
# downstream assumes z-up radians with the floor centroid at the origin.

import math
import random
import tempfile
from pathlib import Path

from layoutforge.dataset import (
    DEFAULT_CONVENTIONS,
    FilterRules,
    convert_convention,
    corpus_stats,
    filter_scene,
    recenter,
    split_corpus,
)
from layoutforge.scene import (
    BoxSize,
    FloorPlan,
    Layout,
    ObjectSpec,
    PlacedObject,
    Placement,
    RoomType,
    SceneRecord,
    SceneSource,
    read_corpus,
    write_corpus,
)

rng = random.Random(7)


def crate(iid, x, y, z=0.0, r=0.0):
    return PlacedObject(
        instance_id=iid,
        spec=ObjectSpec(description="crate", quantity=1, size=BoxSize(1.0, 1.0, 0.5)),
        placement=Placement(x, y, z, r),
    )


# a "holodeck-style" record: y-up (so the ground coordinate hides in z),
# rotations in degrees, and flipped 180 degrees from our convention
floor = FloorPlan(((0.0, 0.0), (6.0, 0.0), (6.0, 6.0), (0.0, 6.0)))
raw = SceneRecord(
    scene_id="h0",
    layout=Layout(
        room_type=RoomType.BEDROOM,
        floor=floor,
        objects=(crate("c1", 1.0, 0.0, 2.0, 90.0),),  # y=height, z=ground
    ),
    source=SceneSource.HOLODECK_SYNTH,
)
canonical = convert_convention(raw, DEFAULT_CONVENTIONS["holodeck_synth"])
p = canonical.layout.objects[0].placement
print(f"holodeck (1, 0, 2, 90deg) -> canonical ({p.x}, {p.y}, {p.z}, {p.rotation:.4f} rad)")
print(f"  (90 degrees + the 180-degree flip = {math.radians(90) + math.pi:.4f})")

centered = recenter(canonical)
print("floor x-range after recenter:", sorted({v[0] for v in centered.layout.floor.vertices}))

# build a small corpus: well-populated bedrooms plus a couple of duds
spots = [(1.0, 1.0), (5.0, 1.0), (1.0, 5.0), (5.0, 5.0), (3.0, 1.0), (3.0, 5.0)]
records = []
for i in range(8):
    n = 6 if i < 6 else 2  # two under-populated stragglers
    objs = tuple(
        crate(f"c{j}", spots[j][0] + rng.uniform(-0.2, 0.2), spots[j][1] + rng.uniform(-0.2, 0.2))
        for j in range(n)
    )
    records.append(
        SceneRecord(
            scene_id=f"s{i}",
            layout=Layout(room_type=RoomType.BEDROOM, floor=floor, objects=objs),
            source=SceneSource.GENERATED,
        )
    )

rules = FilterRules()
kept = [r for r in records if filter_scene(r, rules).accepted]
print(f"filter: kept {len(kept)} of {len(records)} "
      f"(bedroom minimum is {rules.min_objects[RoomType.BEDROOM]} counted objects)")

stats = corpus_stats(kept)
print("object count quartiles:", stats.to_dict()["object_count"])

# seeded split: hold out 2 bedrooms for test, reproducibly
train, test = split_corpus(kept, seed=13, plan={"bedroom": 2})
print("split:", [r.scene_id for r in train], "/", [r.scene_id for r in test])

# the corpus round-trips through JSONL byte-for-byte
with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "corpus.jsonl"
    write_corpus(kept, path)
    again = read_corpus(path)
    print("JSONL round-trip:", len(again), "records,",
          "ids match:", [a.scene_id for a in again] == [k.scene_id for k in kept])
