"""Preference-pair construction for layout DPO training.

Stage 1 pairs a curated positive layout against sampled model
generations for the same task.  Stage 2 pairs it against a synthetically
violated copy of itself: one object pushed out of bounds, or one object
slid onto another until their footprints clearly overlap.  Negatives are
checked against a zero-tolerance validation profile so the training
signal is unambiguous.  ``dpo_loss`` evaluates the preference objective
on externally supplied log-probabilities — a reference value for
checking trainers, not a trainer.
"""

from __future__ import annotations

import json
import logging
import math
import random
from dataclasses import dataclass
from enum import Enum

from . import geometry
from .errors import NoEligibleObjectError, NonFiniteError, SchemaError, TooFewObjectsError
from .evalkit.validation import FORGE_THRESHOLDS, validate
from .prompts import build_generation_prompt, format_completion, parse_completion
from .scene import (
    Layout,
    PlacedObject,
    Placement,
    TaskSpec,
    task_from_dict,
    task_from_layout,
    task_to_dict,
)

log = logging.getLogger(__name__)

#: Reasoning line used when exporting layouts that have no stored
#: reasoning of their own (curated corpus positives, injected negatives).
_EXPORT_REASONING = (
    "The layout keeps every object inside the floor boundary with "
    "clearance between the pieces."
)

OUT_OF_BOUNDS_TAG = "out_of_bounds"
OVERLAP_TAG = "overlap"


class Stage(Enum):
    STAGE1 = "stage1"
    STAGE2 = "stage2"


@dataclass(frozen=True)
class PreferencePair:
    task: TaskSpec
    positive: Layout
    negative: Layout
    stage: Stage
    violation_tags: tuple[str, ...] = ()


@dataclass(frozen=True)
class DpoParams:
    beta: float

    def __post_init__(self):
        if not (math.isfinite(self.beta) and self.beta > 0):
            raise ValueError(f"beta must be finite and positive, got {self.beta}")


def dpo_loss(
    lp_pos_policy: float,
    lp_neg_policy: float,
    lp_pos_ref: float,
    lp_neg_ref: float,
    params: DpoParams,
) -> float:
    """−log σ(β·[(lp⁺_policy − lp⁺_ref) − (lp⁻_policy − lp⁻_ref)]).

    Minimization form: smaller when the policy prefers the positive more
    strongly than the reference does.  Computed as softplus(−margin) in
    the numerically safe branch, so huge margins neither overflow nor
    round to a negative loss.
    """
    values = (lp_pos_policy, lp_neg_policy, lp_pos_ref, lp_neg_ref)
    if not all(math.isfinite(v) for v in values):
        raise NonFiniteError(f"log-probabilities must be finite, got {values}")
    margin = params.beta * ((lp_pos_policy - lp_pos_ref) - (lp_neg_policy - lp_neg_ref))
    if margin >= 0:
        loss = math.log1p(math.exp(-margin))
        # the true value is always > 0 but underflows past margin ≈ 745;
        # the smallest positive float stands in for it
        return loss if loss > 0.0 else math.ulp(0.0)
    return -margin + math.log1p(math.exp(margin))


def _shift_object(layout: Layout, index: int, dx: float, dy: float) -> Layout:
    objects = list(layout.objects)
    obj = objects[index]
    p = obj.placement
    objects[index] = PlacedObject(
        instance_id=obj.instance_id,
        spec=obj.spec,
        placement=Placement(p.x + dx, p.y + dy, p.z, p.rotation),
    )
    return Layout(room_type=layout.room_type, floor=layout.floor, objects=tuple(objects))


def inject_out_of_bounds(layout: Layout, rng_seed: int, magnitude: float = 0.5) -> Layout:
    """Push one fully-contained object radially out of the floor.

    The object is chosen uniformly among those with zero containment
    violation; it travels along the ray from the floor's centroid
    through its own center until its footprint first pokes outside, then
    an extra ``magnitude`` meters.  Everything else is untouched.
    """
    if magnitude < 0:
        raise ValueError("magnitude must be nonnegative")
    eligible = []
    for i, obj in enumerate(layout.objects):
        rect = geometry.footprint(obj.placement, obj.size)
        if geometry.containment_violation(rect, layout.floor) == 0.0:
            eligible.append(i)
    if not eligible:
        raise NoEligibleObjectError("no object is fully inside the floor")

    rng = random.Random(rng_seed)
    index = eligible[rng.randrange(len(eligible))]
    obj = layout.objects[index]
    cx, cy = geometry.floor_centroid(layout.floor)
    dx, dy = obj.placement.x - cx, obj.placement.y - cy
    norm = math.hypot(dx, dy)
    if norm < 1e-12:
        dx, dy, norm = 1.0, 0.0, 1.0  # object sits on the centroid: push +x
    ux, uy = dx / norm, dy / norm

    xs = [v[0] for v in layout.floor.vertices]
    ys = [v[1] for v in layout.floor.vertices]
    reach = (max(xs) - min(xs)) + (max(ys) - min(ys)) + 2 * magnitude + 1.0
    step = 0.05
    t = step
    while t <= reach:
        rect = geometry.footprint(
            Placement(obj.placement.x + ux * t, obj.placement.y + uy * t,
                      obj.placement.z, obj.placement.rotation),
            obj.size,
        )
        if geometry.containment_violation(rect, layout.floor) > 0.0:
            return _shift_object(layout, index, ux * (t + magnitude), uy * (t + magnitude))
        t += step
    raise NoEligibleObjectError(
        f"object {obj.instance_id!r} never left the floor within {reach} m"
    )


def inject_overlap(layout: Layout, rng_seed: int) -> Layout:
    """Slide one object toward another until they clearly collide.

    Mover and target are chosen uniformly; the mover translates along
    the segment to the target's center, stopping at the first sampled
    position where the footprint intersection exceeds a quarter of the
    smaller footprint.  If that pairing can't reach the threshold (thin
    crossed shapes), the remaining ordered pairs are tried in a
    deterministic rotation before giving up.
    """
    n = len(layout.objects)
    if n < 2:
        raise TooFewObjectsError(f"need at least 2 objects, got {n}")
    rng = random.Random(rng_seed)
    mover0 = rng.randrange(n)
    target0 = rng.randrange(n - 1)
    if target0 >= mover0:
        target0 += 1

    ordered = [(i, j) for i in range(n) for j in range(n) if i != j]
    pivot = ordered.index((mover0, target0))
    ordered = ordered[pivot:] + ordered[:pivot]

    for mover_i, target_i in ordered:
        mover = layout.objects[mover_i]
        target = layout.objects[target_i]
        target_rect = geometry.footprint(target.placement, target.size)
        need = 0.25 * min(
            geometry.footprint(mover.placement, mover.size).area(), target_rect.area()
        )
        dx = target.placement.x - mover.placement.x
        dy = target.placement.y - mover.placement.y
        for k in range(1, 201):
            t = k / 200.0
            rect = geometry.footprint(
                Placement(mover.placement.x + dx * t, mover.placement.y + dy * t,
                          mover.placement.z, mover.placement.rotation),
                mover.size,
            )
            if geometry.overlap_area(rect, target_rect) > need:
                return _shift_object(layout, mover_i, dx * t, dy * t)
    raise NoEligibleObjectError("no object pair can reach the overlap threshold")


def _record_layout(positive) -> Layout:
    return positive.layout if hasattr(positive, "layout") else positive


def synth_stage2_pairs(
    positives,
    rng_seed: int,
    mix: float = 0.5,
    *,
    magnitude: float = 0.5,
    thresholds=FORGE_THRESHOLDS,
) -> list[PreferencePair]:
    """One synthetic pair per positive; ``mix`` is the fraction routed to
    the out-of-bounds injector, the rest to the overlap injector.

    Each positive draws its child seed and injector choice from the
    top-level seed whether or not it ends up used, so one skipped record
    never reshuffles the rest.  Records are skipped (with a log line)
    when the selected injector does not apply or when the result would
    not cleanly separate positive from negative at the forge thresholds.
    """
    if not 0.0 <= mix <= 1.0:
        raise ValueError(f"mix must be in [0, 1], got {mix}")
    rng = random.Random(rng_seed)
    pairs: list[PreferencePair] = []
    for i, positive in enumerate(positives):
        child_seed = rng.getrandbits(63)
        use_oob = rng.random() < mix
        layout = _record_layout(positive)
        if not validate(layout, thresholds).usable:
            log.warning("stage2 skip %d: positive fails forge validation", i)
            continue
        try:
            if use_oob:
                negative = inject_out_of_bounds(layout, child_seed, magnitude)
                tags = (OUT_OF_BOUNDS_TAG,)
            else:
                negative = inject_overlap(layout, child_seed)
                tags = (OVERLAP_TAG,)
        except (NoEligibleObjectError, TooFewObjectsError) as exc:
            log.warning("stage2 skip %d: %s", i, exc)
            continue
        if validate(negative, thresholds).usable:
            log.warning("stage2 skip %d: injected negative still validates", i)
            continue
        pairs.append(
            PreferencePair(
                task=task_from_layout(layout),
                positive=layout,
                negative=negative,
                stage=Stage.STAGE2,
                violation_tags=tags,
            )
        )
    return pairs


def make_stage1_pairs(positives, gateway, k: int = 2, *, params=None) -> list[PreferencePair]:
    """Pair each curated positive against k sampled generations.

    Every parseable completion becomes a negative for its positive;
    malformed completions and transport failures are logged and skipped.
    """
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    layouts = [_record_layout(p) for p in positives]
    tasks = [task_from_layout(layout) for layout in layouts]
    bundles = []
    owners = []
    for i, task in enumerate(tasks):
        bundle = build_generation_prompt(task)
        for _ in range(k):
            bundles.append(bundle)
            owners.append(i)

    results = gateway.complete_batch(bundles, params)
    pairs: list[PreferencePair] = []
    for owner, result in zip(owners, results):
        if isinstance(result, Exception):
            log.warning("stage1 skip for positive %d: %s", owner, result)
            continue
        try:
            parsed = parse_completion(result, task=tasks[owner])
        except Exception as exc:
            log.warning("stage1 skip for positive %d: %s", owner, exc)
            continue
        pairs.append(
            PreferencePair(
                task=tasks[owner],
                positive=layouts[owner],
                negative=parsed.layout,
                stage=Stage.STAGE1,
            )
        )
    return pairs


def pair_to_dict(pair: PreferencePair) -> dict:
    bundle = build_generation_prompt(pair.task)
    return {
        "task": task_to_dict(pair.task),
        "prompt_text": bundle.system_text + "\n\n" + bundle.user_text,
        "chosen": format_completion(_EXPORT_REASONING, pair.positive),
        "rejected": format_completion(_EXPORT_REASONING, pair.negative),
        "stage": pair.stage.value,
        "tags": list(pair.violation_tags),
    }


def pair_from_dict(data: dict) -> PreferencePair:
    try:
        task = task_from_dict(data["task"])
        positive = parse_completion(data["chosen"]).layout
        negative = parse_completion(data["rejected"]).layout
        stage = Stage(data["stage"])
        tags = tuple(data.get("tags", ()))
    except (KeyError, ValueError) as exc:
        raise SchemaError(f"bad preference-pair record: {exc}") from None
    return PreferencePair(
        task=task, positive=positive, negative=negative, stage=stage, violation_tags=tags
    )


def export_pairs(pairs, path) -> None:
    """JSONL, one pair per line; completions in the shipping response
    format so the file round-trips through import_pairs."""
    with open(path, "w", encoding="utf-8") as fh:
        for pair in pairs:
            fh.write(json.dumps(pair_to_dict(pair), ensure_ascii=False) + "\n")


def import_pairs(path) -> list[PreferencePair]:
    pairs = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                data = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"{path}:{lineno}: invalid JSON: {exc}") from None
            pairs.append(pair_from_dict(data))
    return pairs
