#!/usr/bin/env python3
# Preference-pair synthesis: take known-good layouts, manufacture broken
# twins, and check the training-loss plumbing on the resulting margins.

import random

from layoutforge import forge
from layoutforge.evalkit import FORGE_THRESHOLDS, validate
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
)

rng = random.Random(99)
floor = FloorPlan(((0.0, 0.0), (6.0, 0.0), (6.0, 6.0), (0.0, 6.0)))
spots = [(1.0, 1.0), (5.0, 1.0), (1.0, 5.0), (5.0, 5.0)]


def positive(i):
    objs = tuple(
        PlacedObject(
            instance_id=f"crate_{j}",
            spec=ObjectSpec("crate", 1, BoxSize(1.0, 1.0, 0.5)),
            placement=Placement(
                spots[j][0] + rng.uniform(-0.3, 0.3),
                spots[j][1] + rng.uniform(-0.3, 0.3),
                0.0,
                0.0,
            ),
        )
        for j in range(3)
    )
    return SceneRecord(
        scene_id=f"good_{i}",
        layout=Layout(room_type=RoomType.BEDROOM, floor=floor, objects=objs),
        source=SceneSource.GENERATED,
    )


records = [positive(i) for i in range(12)]
pairs = forge.synth_stage2_pairs(records, rng_seed=2024, mix=0.5)
print(f"{len(pairs)} pairs from {len(records)} positives")

tags = {}
for p in pairs:
    for t in p.violation_tags:
        tags[t] = tags.get(t, 0) + 1
print("violation mix:", tags)

# every negative must actually be broken, every positive actually clean
for p in pairs:
    assert validate(p.positive, FORGE_THRESHOLDS).usable
    assert not validate(p.negative, FORGE_THRESHOLDS).usable
print("all positives usable, all negatives violating at forge thresholds")

# one broken twin, before and after
p0 = pairs[0]
moved = [
    (a.instance_id, (a.placement.x, a.placement.y), (b.placement.x, b.placement.y))
    for a, b in zip(p0.positive.objects, p0.negative.objects)
    if (a.placement.x, a.placement.y) != (b.placement.x, b.placement.y)
]
for iid, before, after in moved:
    print(f"  {iid}: {tuple(round(v, 2) for v in before)} -> {tuple(round(v, 2) for v in after)}"
          f"  [{', '.join(p0.violation_tags)}]")

# the loss the pairs feed: small at large positive margins, ln 2 at zero
print("\nmargin -> loss (beta=1):")
for m in (-2.0, -0.5, 0.0, 0.5, 2.0, 5.0):
    loss = forge.dpo_loss(m, 0.0, 0.0, 0.0, forge.DpoParams(beta=1.0))
    bar = "#" * int(loss * 20)
    print(f"  {m:+5.1f}  {loss:8.5f}  {bar}")
