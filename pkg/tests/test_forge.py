"""Preference-pair synthesis and the DPO reference loss.

Loss oracles frozen here:
  - margin 0 gives ln 2 regardless of beta
  - lp = (-1.0, -1.2, -1.1, -1.2) at beta=1 gives a margin of 0.1,
    and -log(sigmoid(0.1)) = 0.6443966600735709
Both were computed independently with exact sigmoid arithmetic; the
second digit-for-digit with mpmath at 50 digits.
"""

import json
import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_obj
from oracles import reference_sigmoid_loss
from layoutforge.errors import (
    NoEligibleObjectError,
    NonFiniteError,
    SchemaError,
    TooFewObjectsError,
)
from layoutforge.evalkit import FORGE_THRESHOLDS, validate
from layoutforge.forge import (
    OUT_OF_BOUNDS_TAG,
    OVERLAP_TAG,
    DpoParams,
    PreferencePair,
    Stage,
    dpo_loss,
    export_pairs,
    import_pairs,
    inject_out_of_bounds,
    inject_overlap,
    make_stage1_pairs,
    pair_from_dict,
    pair_to_dict,
    synth_stage2_pairs,
)
from layoutforge.gateway import (
    GenerationParams,
    Gateway,
    ScriptedBackend,
    TemplateBackend,
)
from layoutforge.geometry import containment_violation, footprint
from layoutforge.prompts import build_generation_prompt
from layoutforge.scene import Layout, RoomType, serialize_layout, task_from_layout

LN2 = 0.6931471805599453
LOSS_AT_MARGIN_01 = 0.6443966600735709


# --- dpo loss ---------------------------------------------------------------


@pytest.mark.parametrize("beta", [0.05, 0.1, 0.5, 1.0, 2.0, 10.0])
def test_loss_is_ln2_at_zero_margin(beta):
    loss = dpo_loss(-1.0, -1.0, -2.0, -2.0, DpoParams(beta=beta))
    assert loss == pytest.approx(LN2, abs=1e-12)


def test_loss_frozen_oracle():
    loss = dpo_loss(-1.0, -1.2, -1.1, -1.2, DpoParams(beta=1.0))
    assert loss == pytest.approx(LOSS_AT_MARGIN_01, abs=1e-12)


def test_loss_matches_reference_formula():
    # the plain-formula reference is only trustworthy at moderate margins
    # (past ~|6| its naive sigmoid rounds into the log); the stable
    # implementation must agree digit-for-digit inside that window
    rng = random.Random(4242)
    params = DpoParams(beta=0.7)
    for _ in range(200):
        lps = [rng.uniform(-4.0, 0.0) for _ in range(4)]
        margin = params.beta * ((lps[0] - lps[2]) - (lps[1] - lps[3]))
        assert dpo_loss(*lps, params) == pytest.approx(
            reference_sigmoid_loss(margin), rel=1e-12
        )


def test_loss_strictly_decreasing_in_margin():
    params = DpoParams(beta=1.0)
    margins = np.linspace(-5.0, 5.0, 100)
    losses = [dpo_loss(m, 0.0, 0.0, 0.0, params) for m in margins]
    assert all(a > b for a, b in zip(losses, losses[1:]))


def test_loss_positive_even_for_huge_margin():
    # the analytic value underflows float64 around margin 745; the loss
    # must still come back strictly positive
    loss = dpo_loss(1e6, 0.0, 0.0, 0.0, DpoParams(beta=1.0))
    assert loss > 0.0
    assert loss == math.ulp(0.0)


def test_loss_large_negative_margin_no_overflow():
    loss = dpo_loss(-1e6, 0.0, 0.0, 0.0, DpoParams(beta=1.0))
    assert loss == pytest.approx(1e6, rel=1e-12)


@pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
def test_loss_rejects_non_finite(bad):
    with pytest.raises(NonFiniteError):
        dpo_loss(bad, 0.0, 0.0, 0.0, DpoParams(beta=1.0))


@pytest.mark.parametrize("beta", [0.0, -1.0, math.nan, math.inf])
def test_dpo_params_rejects_bad_beta(beta):
    with pytest.raises(ValueError):
        DpoParams(beta=beta)


@given(
    st.floats(-50, 50),
    st.floats(-50, 50),
    st.floats(-50, 50),
    st.floats(-50, 50),
    st.floats(0.01, 10.0),
)
@settings(max_examples=150, deadline=None)
def test_loss_always_positive_property(a, b, c, d, beta):
    assert dpo_loss(a, b, c, d, DpoParams(beta=beta)) > 0.0


def test_loss_reference_symmetry():
    # swapping positive and negative roles flips the margin:
    # loss(m) + loss(-m) == |m| + 2*softplus(-|m|), but the simple check
    # is that the geometric mean of sigmoids multiplies to sigmoid(m)*sigmoid(-m)
    params = DpoParams(beta=1.3)
    fwd = dpo_loss(-1.0, -3.0, -2.0, -2.0, params)
    rev = dpo_loss(-3.0, -1.0, -2.0, -2.0, params)
    margin = 1.3 * 2.0
    assert fwd + rev == pytest.approx(margin + 2 * fwd, rel=1e-9)


# --- injectors --------------------------------------------------------------


def three_piece_layout(square_floor):
    # square_floor spans (0,0)..(6,6); everything sits well inside
    return Layout(
        room_type=RoomType.BEDROOM,
        floor=square_floor,
        objects=(
            make_obj("bed_1", "double bed", 1.5, 1.5, w=1.8, d=2.0),
            make_obj("stand_2", "nightstand", 4.8, 1.2, w=0.5, d=0.4),
            make_obj("wardrobe_3", "wardrobe", 4.5, 4.8, w=1.2, d=0.6),
        ),
    )


def test_oob_injection_creates_boundary_violation(square_floor):
    layout = three_piece_layout(square_floor)
    negative = inject_out_of_bounds(layout, rng_seed=11)
    assert validate(layout, FORGE_THRESHOLDS).usable
    report = validate(negative, FORGE_THRESHOLDS)
    assert not report.usable
    assert any(area > 0 for _, area in report.boundary_violations)
    assert not report.pair_overlaps or all(
        a <= FORGE_THRESHOLDS.max_pair_overlap for _, _, a in report.pair_overlaps
    )


def test_oob_moves_exactly_one_object(square_floor):
    layout = three_piece_layout(square_floor)
    negative = inject_out_of_bounds(layout, rng_seed=5)
    moved = [
        (a.instance_id, a.placement, b.placement)
        for a, b in zip(layout.objects, negative.objects)
        if (a.placement.x, a.placement.y) != (b.placement.x, b.placement.y)
    ]
    assert len(moved) == 1
    _, before, after = moved[0]
    # rotation and z ride along unchanged
    assert before.rotation == after.rotation
    assert before.z == after.z


def test_oob_is_deterministic(square_floor):
    layout = three_piece_layout(square_floor)
    a = inject_out_of_bounds(layout, rng_seed=123)
    b = inject_out_of_bounds(layout, rng_seed=123)
    assert serialize_layout(a) == serialize_layout(b)
    # the seed genuinely drives object choice: 20 seeds hit more than one
    variants = {serialize_layout(inject_out_of_bounds(layout, s)) for s in range(20)}
    assert len(variants) > 1


def test_oob_magnitude_pushes_farther(square_floor):
    layout = Layout(
        room_type=RoomType.BEDROOM,
        floor=square_floor,
        objects=(make_obj("bed_1", "double bed", 4.0, 3.0, w=1.8, d=2.0),),
    )
    near = inject_out_of_bounds(layout, rng_seed=1, magnitude=0.0)
    far = inject_out_of_bounds(layout, rng_seed=1, magnitude=1.5)
    v_near = containment_violation(
        footprint(near.objects[0].placement, near.objects[0].size), square_floor
    )
    v_far = containment_violation(
        footprint(far.objects[0].placement, far.objects[0].size), square_floor
    )
    assert 0 < v_near < v_far


def test_oob_centroid_object_pushes_plus_x(square_floor):
    # object dead on the floor centroid (3,3): the push direction
    # degenerates and the injector falls back to +x
    layout = Layout(
        room_type=RoomType.BEDROOM,
        floor=square_floor,
        objects=(make_obj("bed_1", "double bed", 3.0, 3.0, w=1.8, d=2.0),),
    )
    negative = inject_out_of_bounds(layout, rng_seed=3)
    p = negative.objects[0].placement
    assert p.x > 3.0
    assert p.y == pytest.approx(3.0)


def test_oob_rejects_magnitude_below_zero(square_floor):
    with pytest.raises(ValueError):
        inject_out_of_bounds(three_piece_layout(square_floor), 1, magnitude=-0.1)


def test_oob_needs_a_contained_object(square_floor):
    # the only object already straddles the x=6 wall
    layout = Layout(
        room_type=RoomType.BEDROOM,
        floor=square_floor,
        objects=(make_obj("bed_1", "double bed", 6.2, 3.0, w=1.8, d=2.0),),
    )
    with pytest.raises(NoEligibleObjectError):
        inject_out_of_bounds(layout, rng_seed=1)


def test_overlap_injection_collides_two_objects(square_floor):
    layout = three_piece_layout(square_floor)
    negative = inject_overlap(layout, rng_seed=21)
    report = validate(negative, FORGE_THRESHOLDS)
    assert not report.usable
    best = max(area for _, _, area in report.pair_overlaps)
    areas = [footprint(o.placement, o.size).area() for o in negative.objects]
    assert best > 0.25 * min(areas) - 1e-9


def test_overlap_is_deterministic(square_floor):
    layout = three_piece_layout(square_floor)
    assert serialize_layout(inject_overlap(layout, 77)) == serialize_layout(
        inject_overlap(layout, 77)
    )


def test_overlap_moves_exactly_one_object(square_floor):
    layout = three_piece_layout(square_floor)
    negative = inject_overlap(layout, rng_seed=9)
    moved = [
        a.instance_id
        for a, b in zip(layout.objects, negative.objects)
        if (a.placement.x, a.placement.y) != (b.placement.x, b.placement.y)
    ]
    assert len(moved) == 1


def test_overlap_needs_two_objects(square_floor):
    layout = Layout(
        room_type=RoomType.BEDROOM,
        floor=square_floor,
        objects=(make_obj("bed_1", "double bed", 3.0, 3.0),),
    )
    with pytest.raises(TooFewObjectsError):
        inject_overlap(layout, rng_seed=1)


def test_overlap_empty_layout(square_floor):
    layout = Layout(room_type=RoomType.BEDROOM, floor=square_floor, objects=())
    with pytest.raises(TooFewObjectsError):
        inject_overlap(layout, rng_seed=1)


# --- stage 2 synthesis ------------------------------------------------------


def many_positives(square_floor, count=20):
    rng = random.Random(31337)
    out = []
    for _ in range(count):
        jx, jy = rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)
        out.append(
            Layout(
                room_type=RoomType.BEDROOM,
                floor=square_floor,
                objects=(
                    make_obj("bed_1", "double bed", 1.5 + jx, 1.5 + jy, w=1.8, d=2.0),
                    make_obj("stand_2", "nightstand", 4.8 + jx, 1.2 + jy, w=0.5, d=0.4),
                    make_obj("wardrobe_3", "wardrobe", 4.5 + jx, 4.8 + jy, w=1.2, d=0.6),
                ),
            )
        )
    return out


def test_stage2_pairs_are_sound(square_floor):
    positives = many_positives(square_floor)
    pairs = synth_stage2_pairs(positives, rng_seed=99)
    assert len(pairs) == len(positives)
    for pair in pairs:
        assert pair.stage is Stage.STAGE2
        assert validate(pair.positive, FORGE_THRESHOLDS).usable
        assert not validate(pair.negative, FORGE_THRESHOLDS).usable
    tags = {pair.violation_tags[0] for pair in pairs}
    assert tags == {OUT_OF_BOUNDS_TAG, OVERLAP_TAG}


def test_stage2_deterministic(square_floor):
    positives = many_positives(square_floor, count=8)
    a = synth_stage2_pairs(positives, rng_seed=4)
    b = synth_stage2_pairs(positives, rng_seed=4)
    assert [serialize_layout(p.negative) for p in a] == [
        serialize_layout(p.negative) for p in b
    ]


def test_stage2_mix_zero_is_all_overlap(square_floor):
    pairs = synth_stage2_pairs(many_positives(square_floor, 10), rng_seed=1, mix=0.0)
    assert pairs
    assert all(p.violation_tags == (OVERLAP_TAG,) for p in pairs)


def test_stage2_mix_one_is_all_oob(square_floor):
    pairs = synth_stage2_pairs(many_positives(square_floor, 10), rng_seed=1, mix=1.0)
    assert pairs
    assert all(p.violation_tags == (OUT_OF_BOUNDS_TAG,) for p in pairs)


def test_stage2_mix_out_of_range(square_floor):
    with pytest.raises(ValueError):
        synth_stage2_pairs([], rng_seed=1, mix=1.5)


def test_stage2_single_object_positives_skip_overlap(square_floor, caplog):
    # overlap injection needs two objects; with mix=0 every record routes
    # there and every record is skipped, loudly
    lonely = Layout(
        room_type=RoomType.BEDROOM,
        floor=square_floor,
        objects=(make_obj("bed_1", "double bed", 3.0, 3.0, w=1.8, d=2.0),),
    )
    with caplog.at_level("WARNING", logger="layoutforge.forge"):
        pairs = synth_stage2_pairs([lonely, lonely], rng_seed=2, mix=0.0)
    assert pairs == []
    assert sum("stage2 skip" in r.message for r in caplog.records) == 2


def test_stage2_invalid_positive_skipped(square_floor, caplog):
    good = many_positives(square_floor, 1)[0]
    bad = Layout(  # two coincident beds: fails forge validation up front
        room_type=RoomType.BEDROOM,
        floor=square_floor,
        objects=(
            make_obj("bed_1", "double bed", 3.0, 3.0, w=1.8, d=2.0),
            make_obj("bed_2", "double bed", 3.0, 3.0, w=1.8, d=2.0),
        ),
    )
    with caplog.at_level("WARNING", logger="layoutforge.forge"):
        pairs = synth_stage2_pairs([bad, good], rng_seed=8)
    assert len(pairs) == 1
    assert serialize_layout(pairs[0].positive) == serialize_layout(good)


def test_stage2_skip_does_not_reshuffle_survivors(square_floor):
    # dropping a record from the input changes which positives appear but
    # not the negatives synthesized for the ones that remain ahead of it
    positives = many_positives(square_floor, 5)
    full = synth_stage2_pairs(positives, rng_seed=12)
    lonely = Layout(
        room_type=RoomType.BEDROOM,
        floor=square_floor,
        objects=(make_obj("bed_1", "double bed", 10.0, 10.0, w=1.8, d=2.0),),
    )
    # replace record 2 with one that always skips (not even inside the floor)
    mixed = positives[:2] + [lonely] + positives[3:]
    partial = synth_stage2_pairs(mixed, rng_seed=12)
    assert [serialize_layout(p.negative) for p in partial] == [
        serialize_layout(p.negative) for i, p in enumerate(full) if i != 2
    ]


def test_stage2_accepts_record_wrappers(square_floor):
    class Record:
        def __init__(self, layout):
            self.layout = layout

    positives = [Record(lay) for lay in many_positives(square_floor, 3)]
    pairs = synth_stage2_pairs(positives, rng_seed=6)
    assert len(pairs) == 3
    assert all(isinstance(p.positive, Layout) for p in pairs)


def test_stage2_task_matches_positive(square_floor):
    pairs = synth_stage2_pairs(many_positives(square_floor, 2), rng_seed=3)
    for pair in pairs:
        descriptions = sorted(s.description for s in pair.task.objects)
        assert descriptions == ["double bed", "nightstand", "wardrobe"]
        assert pair.task.floor.vertices == square_floor.vertices


# --- stage 1 synthesis ------------------------------------------------------


def test_stage1_pairs_with_template_backend(square_floor):
    positives = many_positives(square_floor, 3)
    gw = Gateway(TemplateBackend())
    pairs = make_stage1_pairs(positives, gw, k=2)
    assert len(pairs) == 6
    assert all(p.stage is Stage.STAGE1 for p in pairs)
    assert all(p.violation_tags == () for p in pairs)
    # positives appear in order, twice each
    got = [serialize_layout(p.positive) for p in pairs]
    want = [serialize_layout(lay) for lay in positives for _ in range(2)]
    assert got == want


def test_stage1_skips_malformed_and_failed(square_floor, caplog):
    positives = many_positives(square_floor, 1)
    task = task_from_layout(positives[0])
    good = TemplateBackend().complete(build_generation_prompt(task), GenerationParams())
    backend = ScriptedBackend([good, "utter nonsense, no JSON here"])
    with caplog.at_level("WARNING", logger="layoutforge.forge"):
        pairs = make_stage1_pairs(positives, Gateway(backend), k=3)
    # one parseable completion, one malformed, one script exhaustion
    assert len(pairs) == 1
    assert sum("stage1 skip" in r.message for r in caplog.records) == 2


def test_stage1_rejects_zero_k(square_floor):
    with pytest.raises(ValueError):
        make_stage1_pairs([], Gateway(TemplateBackend()), k=0)


# --- export / import --------------------------------------------------------


def test_pair_round_trip_dict(square_floor):
    [pair] = synth_stage2_pairs(many_positives(square_floor, 1), rng_seed=14)
    data = pair_to_dict(pair)
    assert data["stage"] == "stage2"
    assert "prompt_text" in data and "[Task Room Type]" in data["prompt_text"]
    back = pair_from_dict(data)
    assert serialize_layout(back.positive) == serialize_layout(pair.positive)
    assert serialize_layout(back.negative) == serialize_layout(pair.negative)
    assert back.stage is Stage.STAGE2
    assert back.violation_tags == pair.violation_tags


def test_export_import_round_trip(square_floor, tmp_path):
    positives = many_positives(square_floor, 6)
    stage2 = synth_stage2_pairs(positives, rng_seed=99)
    stage1 = make_stage1_pairs(positives[:2], Gateway(TemplateBackend()), k=1)
    pairs = stage2 + stage1
    path = tmp_path / "pairs.jsonl"
    export_pairs(pairs, path)

    back = import_pairs(path)
    assert len(back) == len(pairs)
    for original, restored in zip(pairs, back):
        assert restored.stage is original.stage
        assert restored.violation_tags == original.violation_tags
        assert serialize_layout(restored.positive) == serialize_layout(original.positive)
        assert serialize_layout(restored.negative) == serialize_layout(original.negative)


def test_export_empty_writes_empty_file(tmp_path):
    path = tmp_path / "none.jsonl"
    export_pairs([], path)
    assert path.read_text() == ""
    assert import_pairs(path) == []


def test_import_rejects_broken_json(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text("{broken\n")
    with pytest.raises(SchemaError, match=":1:"):
        import_pairs(path)


def test_import_rejects_missing_fields(tmp_path):
    path = tmp_path / "short.jsonl"
    path.write_text(json.dumps({"stage": "stage2"}) + "\n")
    with pytest.raises(SchemaError, match="bad preference-pair record"):
        import_pairs(path)


def test_exported_negative_actually_violates(square_floor, tmp_path):
    pairs = synth_stage2_pairs(many_positives(square_floor, 4), rng_seed=1)
    path = tmp_path / "pairs.jsonl"
    export_pairs(pairs, path)
    for pair in import_pairs(path):
        assert validate(pair.positive, FORGE_THRESHOLDS).usable
        assert not validate(pair.negative, FORGE_THRESHOLDS).usable
