#!/usr/bin/env python3
"""Evaluation harness: success rates, judge scores, and navigation."""

import math

from layoutforge.evalkit import NavTask, judge_scores, nav_eval, success_rate
from layoutforge.gateway import Gateway, ScriptedBackend, TemplateBackend
from layoutforge.prompts import build_generation_prompt
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

# ---------------------------------------------------------------- success rate

task = TaskSpec(
    room_type=RoomType.BEDROOM,
    floor=FloorPlan(((0.0, 0.0), (4.0, 0.0), (4.0, 3.0), (0.0, 3.0))),
    objects=(
        ObjectSpec("double bed", 1, BoxSize(1.8, 2.0, 0.5)),
        ObjectSpec("nightstand", 2, BoxSize(0.5, 0.4, 0.55)),
        ObjectSpec("wardrobe", 1, BoxSize(1.2, 0.6, 2.0)),
    ),
)

# script a backend that answers well 3 times out of 5
good = TemplateBackend().complete(build_generation_prompt(task), None)
script = [good, "I'd rather not.", good, "{ not even close", good]
report = success_rate([task], Gateway(ScriptedBackend(script), max_in_flight=1), n_per_task=5)
stats = report.per_room[RoomType.BEDROOM]
print(f"scripted backend: {stats.usable}/{stats.attempted} usable -> rate {stats.rate}")
for a in report.attempts:
    print(f"  attempt {a.task_index}: {'ok' if a.usable else 'failed: ' + (a.error or '')[:40]}")

# ----------------------------------------------------------------- judge scores


def obj(iid, desc, x, y, w, d, r=0.0):
    return PlacedObject(
        instance_id=iid,
        spec=ObjectSpec(description=desc, quantity=1, size=BoxSize(w, d, 0.5)),
        placement=Placement(x, y, 0.0, r),
    )


floor = FloorPlan(((0.0, 0.0), (6.0, 0.0), (6.0, 6.0), (0.0, 6.0)))
tidy = Layout(room_type=RoomType.LIVING_ROOM, floor=floor,
              objects=(obj("sofa_1", "sofa", 1.5, 1.0, 2.2, 0.9),
                       obj("table_1", "coffee table", 1.5, 2.4, 1.1, 0.6)))
outcomes = judge_scores([tidy], "open space in the middle", Gateway(TemplateBackend()))
print("\njudge:", outcomes[0].score.to_dict())

# ------------------------------------------------------------------- navigation

# can an agent starting at the west wall walk to the table and see it?
room = Layout(room_type=RoomType.LIVING_ROOM, floor=floor,
              objects=(obj("table_1", "round table", 5.0, 3.0, 0.8, 0.8),))
result = nav_eval(room, NavTask(start_pose=(1.0, 3.0, 0.0), target_instance="table_1"))
print(f"\nopen room: success={result.success}, "
      f"{len(result.path)} waypoints, final distance {result.nav_error:.2f} m")

# wall the target off and the same check fails with the start-line distance
ring = Layout(room_type=RoomType.LIVING_ROOM, floor=floor, objects=(
    obj("prize_1", "pedestal", 3.0, 3.0, 0.4, 0.4),
    obj("wall_n", "partition", 3.0, 4.3, 3.0, 0.4),
    obj("wall_s", "partition", 3.0, 1.7, 3.0, 0.4),
    obj("wall_w", "partition", 1.7, 3.0, 0.4, 3.0),
    obj("wall_e", "partition", 4.3, 3.0, 0.4, 3.0),
))
result = nav_eval(ring, NavTask(start_pose=(0.5, 0.5, 0.0), target_instance="prize_1",
                                success_radius=1.0))
print(f"walled off: success={result.success}, nav_error {result.nav_error:.2f} m "
      f"(straight-line, no path exists)")

# being close is not enough: the target must sit inside a +-30 degree cone.
# here the agent stands 1.7 m away but faces 45 degrees off.
corridor = Layout(room_type=RoomType.LIVING_ROOM, floor=floor, objects=(
    obj("wall_n", "partition", 3.0, 2.6, 5.0, 0.4),
    obj("wall_s", "partition", 3.0, 1.4, 5.0, 0.4),
    obj("cabinet_1", "display cabinet", 3.2, 3.2, 0.6, 0.6),
))
for heading, label in ((0.0, "facing down the corridor"), (math.pi / 4, "facing the cabinet")):
    result = nav_eval(corridor, NavTask(start_pose=(2.0, 2.0, heading), target_instance="cabinet_1"))
    print(f"bearing check, {label}: success={result.success}")
