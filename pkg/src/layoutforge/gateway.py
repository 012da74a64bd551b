"""Chat-completion backends behind one small interface.

Three kinds:

- ``http_chat``      OpenAI-compatible chat-completions over HTTP, with
                     retry on 429/5xx/transport faults.
- ``mock_scripted``  serves queued responses (optionally keyed by prompt
                     fingerprint); deterministic, offline.
- ``mock_template``  synthesizes an always-parseable completion by
                     placing the task's objects on a grid inside the
                     floor; deterministic, offline.

A Gateway wraps one backend and adds bounded-parallelism batching with
order-preserving results and per-item error isolation.
"""

from __future__ import annotations

import json
import math
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import requests

from . import geometry
from .errors import AuthError, SchemaError, ScriptExhaustedError, TransportError
from .prompts import (
    EDIT,
    GENERATE,
    JUDGE,
    SUMMARIZE,
    PromptBundle,
    classify_edit,
    format_completion,
)
from .scene import (
    BoxSize,
    Layout,
    ObjectSpec,
    PlacedObject,
    Placement,
    TaskSpec,
    _slugify,
    _tokens,
)

ENV_ENDPOINT = "LAYOUTFORGE_LLM_URL"
ENV_API_KEY = "LAYOUTFORGE_API_KEY"

HTTP_CHAT = "http_chat"
MOCK_SCRIPTED = "mock_scripted"
MOCK_TEMPLATE = "mock_template"


@dataclass(frozen=True)
class GenerationParams:
    temperature: float = 0.7
    max_tokens: int = 2048
    seed: int | None = None
    model_name: str = "default"

    def __post_init__(self):
        if not math.isfinite(self.temperature) or self.temperature < 0:
            raise ValueError(f"temperature must be finite and >= 0, got {self.temperature}")
        if self.max_tokens < 1:
            raise ValueError(f"max_tokens must be positive, got {self.max_tokens}")


@dataclass(frozen=True)
class BackendConfig:
    kind: str = MOCK_TEMPLATE
    endpoint: str | None = None
    api_key: str | None = None
    max_in_flight: int = 4
    retry_attempts: int = 3
    retry_backoff_ms: int = 500
    script_path: str | None = None

    def __post_init__(self):
        if self.kind not in (HTTP_CHAT, MOCK_SCRIPTED, MOCK_TEMPLATE):
            raise ValueError(f"unknown backend kind {self.kind!r}")
        if self.kind == HTTP_CHAT and not self.endpoint:
            raise ValueError(f"http_chat backend needs an endpoint ({ENV_ENDPOINT})")
        if self.max_in_flight < 1:
            raise ValueError("max_in_flight must be positive")


def config_from_env(kind: str = HTTP_CHAT, **overrides) -> BackendConfig:
    """Backend config with endpoint/credentials from the environment."""
    return BackendConfig(
        kind=kind,
        endpoint=overrides.pop("endpoint", None) or os.environ.get(ENV_ENDPOINT),
        api_key=overrides.pop("api_key", None) or os.environ.get(ENV_API_KEY),
        **overrides,
    )


class _InFlightMeter:
    """Counts concurrently executing completions; mocks expose the
    high-water mark so tests can assert the batch bound."""

    def __init__(self):
        self._lock = threading.Lock()
        self._current = 0
        self.max_observed = 0

    def __enter__(self):
        with self._lock:
            self._current += 1
            self.max_observed = max(self.max_observed, self._current)
        return self

    def __exit__(self, *exc):
        with self._lock:
            self._current -= 1
        return False


class ScriptedBackend:
    """Replays queued responses.

    Entries with a fingerprint serve only bundles whose
    ``PromptBundle.fingerprint()`` matches; the rest form a default queue
    consumed in order.  Consumption is atomic.  ``delay_s`` simulates
    latency so batch tests can observe real concurrency.
    """

    def __init__(self, script, *, delay_s: float = 0.0):
        self._lock = threading.Lock()
        self._default: list[str] = []
        self._keyed: dict[str, list[str]] = {}
        self._delay_s = delay_s
        self.meter = _InFlightMeter()
        for entry in script:
            if isinstance(entry, str):
                self._default.append(entry)
            elif isinstance(entry, dict) and "response" in entry:
                fp = entry.get("fingerprint")
                if fp:
                    self._keyed.setdefault(fp, []).append(entry["response"])
                else:
                    self._default.append(entry["response"])
            else:
                raise SchemaError(f"bad script entry: {entry!r}")

    @classmethod
    def load(cls, path, **kwargs) -> "ScriptedBackend":
        entries = []
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    entries.append(json.loads(line))
                except json.JSONDecodeError as exc:
                    raise SchemaError(f"{path}:{lineno}: invalid JSON: {exc}") from None
        return cls(entries, **kwargs)

    def remaining(self) -> int:
        with self._lock:
            return len(self._default) + sum(len(v) for v in self._keyed.values())

    def complete(self, bundle: PromptBundle, params: GenerationParams) -> str:
        with self.meter:
            if self._delay_s > 0:
                time.sleep(self._delay_s)
            with self._lock:
                queue = self._keyed.get(bundle.fingerprint())
                if queue:
                    return queue.pop(0)
                if self._default:
                    return self._default.pop(0)
            raise ScriptExhaustedError(
                f"script exhausted for bundle {bundle.fingerprint()}"
            )


class TemplateBackend:
    """Fills the response format with a trivial but valid placement.

    generate: objects in row-major grid cells inside the floor, rotation
    0, all inside the boundary.  edit: applies add/remove directly.
    judge: a fixed score block.  summarize: fixed prose.
    """

    def __init__(self, *, default_add_size: BoxSize | None = None):
        self._add_size = default_add_size or BoxSize(0.5, 0.5, 0.5)
        self.meter = _InFlightMeter()

    def complete(self, bundle: PromptBundle, params: GenerationParams) -> str:
        with self.meter:
            if bundle.template_id == GENERATE:
                return self._generate(bundle.bound_task)
            if bundle.template_id == EDIT:
                return self._edit(bundle.bound_task, bundle.instruction or "")
            if bundle.template_id == JUDGE:
                return json.dumps(
                    {
                        "functionality_score": 8,
                        "layout_score": 8,
                        "aesthetics_score": 8,
                        "overall_score": 8,
                        "comments": "Grid placement keeps objects apart and inside the room.",
                    },
                    indent=2,
                )
            if bundle.template_id == SUMMARIZE:
                return (
                    "The objects are spread over the room in a regular grid, "
                    "each with clearance to its neighbours and to the walls."
                )
            raise SchemaError(f"template backend cannot serve {bundle.template_id!r}")

    # --- generate ---------------------------------------------------------

    def _generate(self, task) -> str:
        if not isinstance(task, TaskSpec):
            raise SchemaError("generate bundle carries no task")
        layout = grid_layout(task)
        return format_completion(
            "Each object takes its own grid cell inside the floor so nothing "
            "overlaps and every piece stays reachable.",
            layout,
        )

    # --- edit -------------------------------------------------------------

    def _edit(self, layout, instruction: str) -> str:
        if not isinstance(layout, Layout):
            raise SchemaError("edit bundle carries no layout")
        kind = classify_edit(instruction)
        if kind == "remove":
            revised = _remove_best_match(layout, instruction)
            note = "The named object is taken out; everything else stays in place."
        else:
            revised = _add_object(layout, instruction, self._add_size)
            note = "The new object takes a free spot with clearance to the rest."
        return format_completion(note, revised)


def _first_free_spot(floor, size, taken, *, steps: int = 16) -> Placement | None:
    """Row-major scan for a contained, non-overlapping axis-aligned spot.
    Falls back to merely-contained, then None."""
    xs = [v[0] for v in floor.vertices]
    ys = [v[1] for v in floor.vertices]
    minx, maxx, miny, maxy = min(xs), max(xs), min(ys), max(ys)
    contained_only: Placement | None = None
    for row in range(steps):
        for col in range(steps):
            x = minx + (col + 0.5) * (maxx - minx) / steps
            y = miny + (row + 0.5) * (maxy - miny) / steps
            placement = Placement(x, y, 0.0, 0.0)
            rect = geometry.footprint(placement, size)
            if geometry.containment_violation(rect, floor) > 0.0:
                continue
            if contained_only is None:
                contained_only = placement
            if all(geometry.overlap_area(rect, other) == 0.0 for other in taken):
                return placement
    return contained_only


def grid_layout(task: TaskSpec) -> Layout:
    """Row-major grid placement of the task's objects inside the floor.

    Each object first tries its own cell of a near-square grid; a cell
    whose footprint would poke outside the floor or overlap an earlier
    object is replaced by the first free spot of a finer scan.  Crowded
    or impossible tasks degrade to overlapping center placement rather
    than failing: the mock must always answer.
    """
    xs = [v[0] for v in task.floor.vertices]
    ys = [v[1] for v in task.floor.vertices]
    minx, maxx, miny, maxy = min(xs), max(xs), min(ys), max(ys)

    expanded: list[ObjectSpec] = []
    for spec in task.objects:
        for _ in range(spec.quantity):
            expanded.append(spec)
    n = len(expanded)
    cols = max(1, math.ceil(math.sqrt(n)))
    rows = max(1, math.ceil(n / cols))
    pitch_x = (maxx - minx) / cols
    pitch_y = (maxy - miny) / rows

    cx, cy = geometry.floor_centroid(task.floor)
    taken: list[geometry.OrientedRect2D] = []
    objects = []
    for i, spec in enumerate(expanded):
        size = spec.size or BoxSize(0.5, 0.5, 0.5)
        col, row = i % cols, i // cols
        x = minx + (col + 0.5) * pitch_x
        y = miny + (row + 0.5) * pitch_y
        placement = Placement(x, y, 0.0, 0.0)
        rect = geometry.footprint(placement, size)
        if geometry.containment_violation(rect, task.floor) > 0.0 or any(
            geometry.overlap_area(rect, other) > 0.0 for other in taken
        ):
            fallback = _first_free_spot(task.floor, size, taken)
            placement = fallback or Placement(cx, cy, 0.0, 0.0)
            rect = geometry.footprint(placement, size)
        taken.append(rect)
        objects.append(
            PlacedObject(
                instance_id=f"{_slugify(spec.description)}_{i + 1}",
                spec=replace(spec, quantity=1, size=size),
                placement=placement,
            )
        )
    return Layout(room_type=task.room_type, floor=task.floor, objects=tuple(objects))


def _remove_best_match(layout: Layout, instruction: str) -> Layout:
    want = _tokens(instruction)
    best = None
    best_score = 0
    for obj in layout.objects:
        score = len(want & _tokens(obj.description))
        if score > best_score:
            best, best_score = obj, score
    if best is None:
        return layout
    objects = tuple(o for o in layout.objects if o is not best)
    return Layout(room_type=layout.room_type, floor=layout.floor, objects=objects)


_ARTICLES = frozenset({"a", "an", "the", "one", "another"})
_LOCATION_WORDS = frozenset({"near", "beside", "by", "next", "against", "at", "in", "on", "to"})


def _description_from_instruction(instruction: str) -> str:
    words = [w for w in instruction.strip().split() if w]
    out = []
    for i, word in enumerate(words):
        lw = word.lower().strip(".,!?")
        if i == 0:  # the verb
            continue
        if lw in _ARTICLES:
            continue
        if lw in _LOCATION_WORDS:
            break
        out.append(lw)
    return " ".join(out) or "object"


def _add_object(layout: Layout, instruction: str, size: BoxSize) -> Layout:
    description = _description_from_instruction(instruction)
    existing = [geometry.footprint(o.placement, o.size) for o in layout.objects]
    chosen = _first_free_spot(layout.floor, size, existing)
    if chosen is None:  # crowded room: drop it at the centroid anyway
        ccx, ccy = geometry.floor_centroid(layout.floor)
        chosen = Placement(ccx, ccy, 0.0, 0.0)

    base = _slugify(description)
    used = {o.instance_id for o in layout.objects}
    instance_id = f"{base}_1"
    n = 1
    while instance_id in used:
        n += 1
        instance_id = f"{base}_{n}"
    new_obj = PlacedObject(
        instance_id=instance_id,
        spec=ObjectSpec(description=description, quantity=1, size=size),
        placement=chosen,
    )
    return Layout(
        room_type=layout.room_type,
        floor=layout.floor,
        objects=tuple(layout.objects) + (new_obj,),
    )


class HttpChatBackend:
    """OpenAI-compatible chat-completions client.

    Request: POST {endpoint} with {model, messages, temperature,
    max_tokens, seed?}; Authorization: Bearer {api_key} when a key is
    set.  Response: choices[0].message.content.

    Retries 429/5xx/transport faults with exponential backoff (attempts
    and initial delay from the config); 401/403 raise AuthError at once;
    other 4xx raise TransportError without retrying.
    """

    def __init__(
        self,
        endpoint: str,
        api_key: str | None = None,
        *,
        attempts: int = 3,
        backoff_ms: int = 500,
        timeout_s: float = 30.0,
        session=None,
    ):
        if not endpoint:
            raise ValueError("endpoint required")
        self._endpoint = endpoint
        self._api_key = api_key
        self._attempts = max(1, attempts)
        self._backoff_s = backoff_ms / 1000.0
        self._timeout_s = timeout_s
        self._session = session or requests.Session()

    def complete(self, bundle: PromptBundle, params: GenerationParams) -> str:
        payload = {
            "model": params.model_name,
            "messages": [
                {"role": "system", "content": bundle.system_text},
                {"role": "user", "content": bundle.user_text},
            ],
            "temperature": params.temperature,
            "max_tokens": params.max_tokens,
        }
        if params.seed is not None:
            payload["seed"] = params.seed
        headers = {}
        if self._api_key:
            headers["Authorization"] = f"Bearer {self._api_key}"

        delay = self._backoff_s
        last_fault = "no attempt made"
        for attempt in range(self._attempts):
            if attempt:
                time.sleep(delay)
                delay *= 2
            try:
                resp = self._session.post(
                    self._endpoint, json=payload, headers=headers, timeout=self._timeout_s
                )
            except requests.RequestException as exc:
                last_fault = f"transport fault: {exc}"
                continue
            if resp.status_code in (401, 403):
                raise AuthError(f"authorization rejected with HTTP {resp.status_code}")
            if resp.status_code == 429 or resp.status_code >= 500:
                last_fault = f"HTTP {resp.status_code}"
                continue
            if resp.status_code != 200:
                raise TransportError(f"HTTP {resp.status_code}: {resp.text[:200]}")
            try:
                data = resp.json()
                content = data["choices"][0]["message"]["content"]
            except (ValueError, KeyError, IndexError, TypeError) as exc:
                raise TransportError(f"malformed chat response: {exc}") from None
            if not isinstance(content, str):
                raise TransportError("chat response content is not text")
            return content
        raise TransportError(
            f"gave up after {self._attempts} attempts; last fault: {last_fault}"
        )


def make_backend(config: BackendConfig):
    if config.kind == HTTP_CHAT:
        return HttpChatBackend(
            config.endpoint,  # type: ignore[arg-type]
            config.api_key,
            attempts=config.retry_attempts,
            backoff_ms=config.retry_backoff_ms,
        )
    if config.kind == MOCK_SCRIPTED:
        if not config.script_path:
            raise ValueError("mock_scripted backend needs script_path")
        return ScriptedBackend.load(config.script_path)
    return TemplateBackend()


class Gateway:
    """Shareable front door: single completions plus bounded batches."""

    def __init__(
        self,
        backend,
        *,
        max_in_flight: int = 4,
        default_params: GenerationParams | None = None,
    ):
        if max_in_flight < 1:
            raise ValueError("max_in_flight must be positive")
        self.backend = backend
        self.max_in_flight = max_in_flight
        self.default_params = default_params or GenerationParams()

    @classmethod
    def from_config(cls, config: BackendConfig, **kwargs) -> "Gateway":
        return cls(make_backend(config), max_in_flight=config.max_in_flight, **kwargs)

    def complete(self, bundle: PromptBundle, params: GenerationParams | None = None) -> str:
        return self.backend.complete(bundle, params or self.default_params)

    def complete_batch(self, bundles, params: GenerationParams | None = None) -> list:
        """Results in input order; failed items hold their exception
        instead of aborting the batch; at most max_in_flight outstanding."""
        bundles = list(bundles)
        if not bundles:
            return []
        params = params or self.default_params

        def one(bundle):
            try:
                return self.backend.complete(bundle, params)
            except Exception as exc:  # per-item isolation
                return exc

        with ThreadPoolExecutor(max_workers=self.max_in_flight) as pool:
            return list(pool.map(one, bundles))
