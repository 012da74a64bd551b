"""Sampler-backed evaluation: generation success rate and LLM judging.

success_rate runs the generation protocol — n completions per task,
parse, validate — and aggregates per room type.  Parse failures count
as unusable attempts.  judge_scores dispatches rating prompts and
parses the score blocks, reporting per-item failures without aborting
the batch.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..prompts import (
    JudgeScore,
    build_generation_prompt,
    build_judge_prompt,
    parse_completion,
    parse_judge,
)
from ..scene import Layout, RoomType, TaskSpec
from .validation import ValidationReport, ValidationThresholds, validate


@dataclass(frozen=True)
class Attempt:
    task_index: int
    room_type: RoomType
    usable: bool
    oor: float | None  # None when the completion did not parse
    error: str | None
    report: ValidationReport | None

    def to_dict(self) -> dict:
        return {
            "task_index": self.task_index,
            "room_type": self.room_type.value,
            "usable": self.usable,
            "oor": self.oor,
            "error": self.error,
            "report": self.report.to_dict() if self.report else None,
        }


@dataclass(frozen=True)
class RoomSuccess:
    attempted: int
    usable: int
    mean_oor: float | None  # over parsed layouts only

    @property
    def rate(self) -> float:
        return self.usable / self.attempted if self.attempted else 0.0

    def to_dict(self) -> dict:
        return {
            "attempted": self.attempted,
            "usable": self.usable,
            "success_rate": self.rate,
            "mean_oor": self.mean_oor,
        }


@dataclass(frozen=True)
class SuccessReport:
    per_room: dict[RoomType, RoomSuccess]
    attempts: tuple[Attempt, ...]

    def rate(self, room_type: RoomType) -> float:
        return self.per_room[room_type].rate

    def to_dict(self) -> dict:
        return {
            "per_room": {rt.value: rs.to_dict() for rt, rs in self.per_room.items()},
            "attempts": [a.to_dict() for a in self.attempts],
        }


def success_rate(
    tasks,
    gateway,
    n_per_task: int,
    thresholds: ValidationThresholds | None = None,
    *,
    params=None,
) -> SuccessReport:
    """Sample each task n times and count usable layouts per room type."""
    tasks = list(tasks)
    bundles = []
    owners = []
    for i, task in enumerate(tasks):
        bundle = build_generation_prompt(task)
        for _ in range(n_per_task):
            bundles.append(bundle)
            owners.append(i)

    results = gateway.complete_batch(bundles, params)
    attempts: list[Attempt] = []
    for owner, result in zip(owners, results):
        task = tasks[owner]
        if isinstance(result, Exception):
            attempts.append(Attempt(owner, task.room_type, False, None, str(result), None))
            continue
        try:
            parsed = parse_completion(result, task=task)
        except Exception as exc:
            attempts.append(Attempt(owner, task.room_type, False, None, str(exc), None))
            continue
        report = validate(parsed.layout, thresholds, task=task)
        attempts.append(
            Attempt(owner, task.room_type, report.usable, report.oor, None, report)
        )

    per_room: dict[RoomType, RoomSuccess] = {}
    for task in tasks:
        per_room.setdefault(task.room_type, RoomSuccess(0, 0, None))
    sums: dict[RoomType, list] = {rt: [0, 0, 0.0, 0] for rt in per_room}
    for attempt in attempts:
        acc = sums[attempt.room_type]
        acc[0] += 1
        acc[1] += 1 if attempt.usable else 0
        if attempt.oor is not None:
            acc[2] += attempt.oor
            acc[3] += 1
    for rt, (attempted, usable, oor_sum, oor_n) in sums.items():
        per_room[rt] = RoomSuccess(
            attempted, usable, oor_sum / oor_n if oor_n else None
        )
    return SuccessReport(per_room=per_room, attempts=tuple(attempts))


@dataclass(frozen=True)
class JudgeOutcome:
    score: JudgeScore | None
    error: str | None

    def to_dict(self) -> dict:
        return {
            "score": self.score.to_dict() if self.score else None,
            "error": self.error,
        }


def judge_scores(layouts, preferences, gateway, *, params=None) -> list[JudgeOutcome]:
    """Rate each layout against the stated preferences.

    ``preferences`` may be one string for all layouts or a sequence
    matching them one-to-one.  Outcomes keep batch order; a failed item
    carries its error message instead of a score.
    """
    layouts = list(layouts)
    if isinstance(preferences, str):
        prefs = [preferences] * len(layouts)
    else:
        prefs = list(preferences)
        if len(prefs) != len(layouts):
            raise ValueError(
                f"{len(layouts)} layouts but {len(prefs)} preference texts"
            )
    bundles = [
        build_judge_prompt(layout, pref) for layout, pref in zip(layouts, prefs)
    ]
    outcomes: list[JudgeOutcome] = []
    for result in gateway.complete_batch(bundles, params):
        if isinstance(result, Exception):
            outcomes.append(JudgeOutcome(None, str(result)))
            continue
        try:
            outcomes.append(JudgeOutcome(parse_judge(result), None))
        except Exception as exc:
            outcomes.append(JudgeOutcome(None, str(exc)))
    return outcomes
