"""Layout evaluation: soundness validation, success-rate protocol,
object-reaching navigation check, LLM judging, and SVG rendering."""

from .metrics import (
    Attempt,
    JudgeOutcome,
    RoomSuccess,
    SuccessReport,
    judge_scores,
    success_rate,
)
from .navigation import NavResult, NavTask, nav_eval
from .render import render_svg
from .validation import (
    FORGE_THRESHOLDS,
    ValidationReport,
    ValidationThresholds,
    validate,
)

__all__ = [
    "Attempt",
    "FORGE_THRESHOLDS",
    "JudgeOutcome",
    "NavResult",
    "NavTask",
    "RoomSuccess",
    "SuccessReport",
    "ValidationReport",
    "ValidationThresholds",
    "judge_scores",
    "nav_eval",
    "render_svg",
    "success_rate",
    "validate",
]
