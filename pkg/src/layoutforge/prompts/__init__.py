"""Meta-prompt construction and completion parsing.

Templates ship as text assets with ``<<<system>>>`` / ``<<<user>>>``
sections and ``{{placeholder}}`` slots.  Building a prompt is pure and
deterministic: identical inputs yield byte-identical prompts.

Completion parsing is total: any input string either yields a
CompletionParse / JudgeScore or raises one of the typed errors
(NoAnswerBlockError, MalformedLayoutError, MalformedScoreError,
RangeError) — never an unplanned exception.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from importlib import resources

from ..errors import (
    MalformedLayoutError,
    MalformedScoreError,
    NoAnswerBlockError,
    RangeError,
    UnresolvedSizeError,
    UnsupportedEditError,
)
from ..scene import (
    Layout,
    TaskSpec,
    layout_from_dict,
    serialize_layout,
)

GENERATE = "generate"
EDIT = "edit"
JUDGE = "judge"
SUMMARIZE = "summarize"

TEMPLATE_IDS = (GENERATE, EDIT, JUDGE, SUMMARIZE)

ADD_VERBS = frozenset({"add", "place", "put"})
REMOVE_VERBS = frozenset({"remove", "delete", "take"})


@dataclass(frozen=True)
class PromptBundle:
    system_text: str
    user_text: str
    template_id: str
    bound_task: object = None  # TaskSpec for generate, Layout for the others
    instruction: str | None = None  # edit bundles carry their instruction

    def fingerprint(self) -> str:
        """Stable hash of the rendered prompt, used by scripted mocks."""
        h = hashlib.sha256()
        h.update(self.template_id.encode("utf-8"))
        h.update(b"\x00")
        h.update(self.system_text.encode("utf-8"))
        h.update(b"\x00")
        h.update(self.user_text.encode("utf-8"))
        return h.hexdigest()[:16]


_template_cache: dict[str, tuple[str, str]] = {}


def load_template(template_id: str) -> tuple[str, str]:
    """Return (system_text, user_text) for a template asset."""
    if template_id not in TEMPLATE_IDS:
        raise ValueError(f"unknown template id {template_id!r}")
    if template_id not in _template_cache:
        raw = (
            resources.files(__package__)
            .joinpath("templates", f"{template_id}.txt")
            .read_text(encoding="utf-8")
        )
        m = re.match(r"<<<system>>>\n(.*)\n<<<user>>>\n(.*)$", raw, re.DOTALL)
        if m is None:
            raise ValueError(f"template asset {template_id}.txt is missing its sections")
        _template_cache[template_id] = (m.group(1), m.group(2).rstrip("\n"))
    return _template_cache[template_id]


_PLACEHOLDER_RE = re.compile(r"\{\{([a-z_]+)\}\}")


def render(text: str, mapping: dict[str, str]) -> str:
    def sub(match):
        key = match.group(1)
        if key not in mapping:
            raise KeyError(f"template placeholder {{{{{key}}}}} has no value")
        return mapping[key]

    return _PLACEHOLDER_RE.sub(sub, text)


def task_input_json(task: TaskSpec) -> str:
    """The JSON block substituted into the generation prompt: room, floor,
    and one entry per object spec with quantity and bbox dimensions."""
    payload = {
        "room_type": task.room_type.display_name,
        "floor": {"vertices": [[x, y] for x, y in task.floor.vertices]},
        "objects": [
            {
                "object": spec.description,
                "quantity": spec.quantity,
                "bbox": {
                    "width": spec.size.width,  # type: ignore[union-attr]
                    "depth": spec.size.depth,  # type: ignore[union-attr]
                    "height": spec.size.height,  # type: ignore[union-attr]
                },
            }
            for spec in task.objects
        ],
    }
    return json.dumps(payload, indent=2)


def build_generation_prompt(task: TaskSpec) -> PromptBundle:
    """Fill the generation template with the task's room, floor, and objects."""
    for spec in task.objects:
        if spec.size is None:
            raise UnresolvedSizeError(
                f"object {spec.description!r} has no bbox; run catalog retrieval first"
            )
    system_text, user_text = load_template(GENERATE)
    mapping = {
        "room_type": task.room_type.display_name,
        "task_json": task_input_json(task),
    }
    return PromptBundle(
        system_text=render(system_text, mapping),
        user_text=render(user_text, mapping),
        template_id=GENERATE,
        bound_task=task,
    )


def classify_edit(instruction: str) -> str:
    """'add' | 'remove' from the instruction's leading verb; anything else
    is out of grammar."""
    words = re.findall(r"[a-zA-Z']+", instruction.lower())
    if words:
        verb = words[0]
        if verb in ADD_VERBS:
            return "add"
        if verb in REMOVE_VERBS:
            return "remove"
    raise UnsupportedEditError(
        f"instruction must start with one of {sorted(ADD_VERBS | REMOVE_VERBS)}: {instruction!r}"
    )


def build_edit_prompt(layout: Layout, instruction: str) -> PromptBundle:
    classify_edit(instruction)  # raises UnsupportedEditError out of grammar
    system_text, user_text = load_template(EDIT)
    mapping = {
        "layout_json": serialize_layout(layout),
        "instruction": instruction,
    }
    return PromptBundle(
        system_text=render(system_text, mapping),
        user_text=render(user_text, mapping),
        template_id=EDIT,
        bound_task=layout,
        instruction=instruction,
    )


def build_judge_prompt(layout: Layout, preferences: str) -> PromptBundle:
    system_text, user_text = load_template(JUDGE)
    mapping = {
        "layout_json": serialize_layout(layout),
        "preferences": preferences,
    }
    return PromptBundle(
        system_text=render(system_text, mapping),
        user_text=render(user_text, mapping),
        template_id=JUDGE,
        bound_task=layout,
    )


def build_summary_prompt(layout: Layout) -> PromptBundle:
    system_text, user_text = load_template(SUMMARIZE)
    mapping = {
        "room_type": layout.room_type.display_name,
        "layout_json": serialize_layout(layout),
    }
    return PromptBundle(
        system_text=render(system_text, mapping),
        user_text=render(user_text, mapping),
        template_id=SUMMARIZE,
        bound_task=layout,
    )


# --- completion parsing ----------------------------------------------------

@dataclass(frozen=True)
class CompletionParse:
    reasoning: str
    layout: Layout
    raw: str


@dataclass(frozen=True)
class JudgeScore:
    functionality: int
    layout: int
    aesthetics: int
    overall: int
    comments: str

    def to_dict(self) -> dict:
        return {
            "functionality_score": self.functionality,
            "layout_score": self.layout,
            "aesthetics_score": self.aesthetics,
            "overall_score": self.overall,
            "comments": self.comments,
        }


def _byte_offset(text: str, char_index: int) -> int:
    return len(text[:char_index].encode("utf-8", errors="replace"))


def _scan_balanced(text: str, start: int) -> int | None:
    """End index (exclusive) of the bracket payload opening at ``start``,
    or None when the text ends before it balances.  String literals and
    escapes are honored so braces inside strings don't count."""
    stack = [text[start]]
    i = start + 1
    n = len(text)
    in_string = False
    escaped = False
    while i < n:
        ch = text[i]
        if in_string:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                in_string = False
        else:
            if ch == '"':
                in_string = True
            elif ch in "{[":
                stack.append(ch)
            elif ch in "}]":
                opener = stack[-1]
                if (opener == "{" and ch == "}") or (opener == "[" and ch == "]"):
                    stack.pop()
                    if not stack:
                        return i + 1
                else:
                    return None  # mismatched nesting; treat as unterminated
        i += 1
    return None


def _extract_tag_region(text: str) -> tuple[int, int] | None:
    """(start, end) of the answer payload region, or None when untagged."""
    for open_tag, close_tag in (("<answer>", "</answer>"), ("[Design]", "[/Design]")):
        start = text.find(open_tag)
        if start < 0:
            continue
        start += len(open_tag)
        end = text.find(close_tag, start)
        return (start, end if end >= 0 else len(text))
    return None


def _extract_reasoning(text: str) -> str:
    for open_tag, close_tag in (("<reasoning>", "</reasoning>"), ("[Reason]", "[/Reason]")):
        start = text.find(open_tag)
        if start < 0:
            continue
        start += len(open_tag)
        end = text.find(close_tag, start)
        if end < 0:
            for stop in ("<answer>", "[Design]"):
                cut = text.find(stop, start)
                if cut >= 0:
                    end = cut
                    break
            else:
                end = len(text)
        inner = text[start:end]
        # canonical completions nest [Reason] inside <reasoning>
        m = re.search(r"\[Reason\](.*?)(\[/Reason\]|$)", inner, re.DOTALL)
        if m:
            inner = m.group(1)
        return inner.strip()
    return ""


def _looks_like_layout(value) -> bool:
    if isinstance(value, dict):
        if "objects" in value:
            return True
        return "coordinates" in value and ("object" in value or "description" in value)
    if isinstance(value, list):
        return bool(value) and all(isinstance(v, dict) for v in value) and any(
            "coordinates" in v for v in value
        )
    return False


def parse_completion(text: str, task: TaskSpec | None = None) -> CompletionParse:
    """Extract reasoning text and the first well-formed layout payload.

    Accepts both tag grammars (<reasoning>/<answer> and [Reason]/[Design]),
    tolerates code fences and surrounding prose, normalizes rotations.
    When the completion omits floor/bbox data, it is borrowed from
    ``task``.  Raises NoAnswerBlockError when nothing resembling a layout
    payload exists and MalformedLayoutError (with a UTF-8 byte offset)
    when a payload exists but cannot be used.
    """
    if not isinstance(text, str):
        raise NoAnswerBlockError(f"completion must be text, got {type(text).__name__}")

    region = _extract_tag_region(text)
    tagged = region is not None
    lo, hi = region if tagged else (0, len(text))

    first_schema_failure: tuple[int, str] | None = None
    truncated_at: int | None = None
    saw_layoutish = False

    i = lo
    while i < hi:
        ch = text[i]
        if ch not in "{[":
            i += 1
            continue
        end = _scan_balanced(text, i)
        if end is None:
            truncated_at = i
            break
        fragment = text[i:end]
        try:
            value = json.loads(fragment)
        except json.JSONDecodeError:
            i += 1
            continue
        if not _looks_like_layout(value):
            i = end
            continue
        saw_layoutish = True
        if isinstance(value, dict) and "objects" not in value:
            value = [value]  # single bare object entry
        try:
            layout = layout_from_dict(value, strict=False, task=task)
        except Exception as exc:  # SchemaError, ValueError, DegenerateError, ...
            if first_schema_failure is None:
                first_schema_failure = (i, str(exc))
            i = end
            continue
        return CompletionParse(
            reasoning=_extract_reasoning(text), layout=layout, raw=text
        )

    if first_schema_failure is not None:
        offset, message = first_schema_failure
        raise MalformedLayoutError(
            f"layout payload rejected: {message}", offset=_byte_offset(text, offset)
        )
    if truncated_at is not None:
        raise MalformedLayoutError(
            "unterminated JSON payload", offset=_byte_offset(text, truncated_at)
        )
    if tagged and saw_layoutish:
        raise MalformedLayoutError(
            "answer block holds no usable layout", offset=_byte_offset(text, lo)
        )
    raise NoAnswerBlockError("completion carries no recognizable layout payload")


_SCORE_KEYS = ("functionality_score", "layout_score", "aesthetics_score", "overall_score")


def parse_judge(text: str) -> JudgeScore:
    """Extract the four integer scores and comments from a judge completion.

    Scores must be integers; values outside 0..10 raise RangeError, not
    clamp.  The first JSON object mentioning any score key is THE score
    block — a broken one is an error even if a valid block follows.
    """
    if not isinstance(text, str):
        raise MalformedScoreError(f"completion must be text, got {type(text).__name__}")
    i = 0
    n = len(text)
    while i < n:
        if text[i] != "{":
            i += 1
            continue
        end = _scan_balanced(text, i)
        if end is None:
            break
        fragment = text[i:end]
        try:
            value = json.loads(fragment)
        except json.JSONDecodeError:
            i += 1
            continue
        if isinstance(value, dict) and any(k in value for k in _SCORE_KEYS):
            return _judge_from_dict(value)
        i = end
    raise MalformedScoreError("no score block found in completion")


def _judge_from_dict(value: dict) -> JudgeScore:
    missing = [k for k in _SCORE_KEYS if k not in value]
    if missing:
        raise MalformedScoreError(f"score block missing: {', '.join(missing)}")
    scores = {}
    for key in _SCORE_KEYS:
        v = value[key]
        if not isinstance(v, int) or isinstance(v, bool):
            raise MalformedScoreError(f"{key} must be an integer, got {v!r}")
        if not 0 <= v <= 10:
            raise RangeError(f"{key} must be within 0..10, got {v}")
        scores[key] = v
    comments = value.get("comments")
    if not isinstance(comments, str):
        raise MalformedScoreError("score block missing 'comments' text")
    return JudgeScore(
        functionality=scores["functionality_score"],
        layout=scores["layout_score"],
        aesthetics=scores["aesthetics_score"],
        overall=scores["overall_score"],
        comments=comments,
    )


def format_completion(reasoning: str, layout: Layout) -> str:
    """Canonical tagged completion text embedding the full layout document.

    parse_completion of this text is a fixed point: it returns the same
    reasoning and a semantically equal layout.
    """
    return (
        "<reasoning>\n[Reason]\n"
        + reasoning.strip()
        + "\n[/Reason]\n</reasoning>\n<answer>\n[Design]\n"
        + serialize_layout(layout)
        + "\n[/Design]\n</answer>"
    )
