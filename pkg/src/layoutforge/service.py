"""HTTP service for interactive layout sessions.

A session holds a task, the current layout, and an append-only history
of (instruction, layout, validation report, timestamp).  Endpoints:

- ``POST /sessions``                  {"task": …} → {"session_id": …}
- ``POST /sessions/{id}/generate``    → {"layout": …, "report": …}
- ``POST /sessions/{id}/edit``        {"instruction": …} → same shape
- ``GET  /sessions/{id}/layout``      → current layout document
- ``GET  /sessions/{id}/render.svg``  → top-down SVG
- ``GET  /sessions/{id}/history``     → {"history": […]}
- ``POST /validate``                  {"layout": …, "task"?: …} → report

Errors are always ``{"code": …, "message": …}``: 404 unknown session,
409 session has no layout yet, 422 bad body or unsupported edit, 502
backend/completion failure.  Per-session mutations serialize behind a
lock; concurrent sessions run in parallel.  With a persist path, every
accepted mutation is appended to a JSONL log before it is applied, and
a restart replays the log into identical serialized state.
"""

from __future__ import annotations

import json
import os
import threading
import time
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response

from .errors import (
    LayoutForgeError,
    MalformedLayoutError,
    NoAnswerBlockError,
    SchemaError,
    UnresolvedSizeError,
    UnsupportedEditError,
)
from .evalkit import ValidationThresholds, render_svg, validate
from .gateway import GenerationParams
from .prompts import build_edit_prompt, build_generation_prompt, parse_completion
from .scene import Layout, layout_to_dict, parse_layout, task_from_dict, task_to_dict


@dataclass
class HistoryEntry:
    instruction: str | None  # None marks the initial generation
    layout: Layout
    report: dict
    timestamp: float

    def to_dict(self, index: int) -> dict:
        return {
            "index": index,
            "instruction": self.instruction,
            "layout": layout_to_dict(self.layout),
            "report": self.report,
            "timestamp": self.timestamp,
        }


@dataclass
class SessionState:
    session_id: str
    task: object
    created_at: float
    history: list[HistoryEntry] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)

    @property
    def current_layout(self) -> Layout | None:
        return self.history[-1].layout if self.history else None


class SessionStore:
    def __init__(self, persist_path: str | None = None):
        self._sessions: dict[str, SessionState] = {}
        self._lock = threading.Lock()
        self._persist_path = persist_path
        self._persist_lock = threading.Lock()
        if persist_path and os.path.exists(persist_path):
            self._replay(persist_path)

    # --- persistence ------------------------------------------------------

    def _replay(self, path: str) -> None:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    event = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise SchemaError(f"{path}:{lineno}: invalid JSON: {exc}") from None
                kind = event.get("event")
                if kind == "create":
                    state = SessionState(
                        session_id=event["session_id"],
                        task=task_from_dict(event["task"]),
                        created_at=event["timestamp"],
                    )
                    self._sessions[state.session_id] = state
                elif kind == "entry":
                    state = self._sessions.get(event["session_id"])
                    if state is None:
                        raise SchemaError(
                            f"{path}:{lineno}: entry for unknown session"
                        )
                    state.history.append(
                        HistoryEntry(
                            instruction=event["instruction"],
                            layout=parse_layout(event["layout"]),
                            report=event["report"],
                            timestamp=event["timestamp"],
                        )
                    )
                else:
                    raise SchemaError(f"{path}:{lineno}: unknown event {kind!r}")

    def _append_event(self, event: dict) -> None:
        if not self._persist_path:
            return
        with self._persist_lock:
            with open(self._persist_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(event, ensure_ascii=False) + "\n")
                fh.flush()
                os.fsync(fh.fileno())

    # --- session lifecycle ------------------------------------------------

    def create(self, task) -> SessionState:
        state = SessionState(
            session_id=uuid.uuid4().hex, task=task, created_at=time.time()
        )
        self._append_event(
            {
                "event": "create",
                "session_id": state.session_id,
                "task": task_to_dict(task),
                "timestamp": state.created_at,
            }
        )
        with self._lock:
            self._sessions[state.session_id] = state
        return state

    def get(self, session_id: str) -> SessionState | None:
        with self._lock:
            return self._sessions.get(session_id)

    def append_entry(self, state: SessionState, entry: HistoryEntry) -> None:
        """Caller holds the session lock."""
        self._append_event(
            {
                "event": "entry",
                "session_id": state.session_id,
                "instruction": entry.instruction,
                "layout": layout_to_dict(entry.layout),
                "report": entry.report,
                "timestamp": entry.timestamp,
            }
        )
        state.history.append(entry)


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"code": code, "message": message})


async def _json_body(request: Request) -> dict | JSONResponse:
    try:
        body = await request.json()
    except Exception:
        return _error(422, "invalid_body", "request body must be a JSON object")
    if not isinstance(body, dict):
        return _error(422, "invalid_body", "request body must be a JSON object")
    return body


def create_app(
    gateway,
    *,
    thresholds: ValidationThresholds | None = None,
    generation_params: GenerationParams | None = None,
    persist_path: str | None = None,
    cors_origins: tuple[str, ...] = (),
) -> FastAPI:
    thresholds = thresholds or ValidationThresholds()
    params = generation_params or GenerationParams()
    store = SessionStore(persist_path)

    app = FastAPI(title="layoutforge studio service", docs_url=None, redoc_url=None)
    app.state.store = store
    if cors_origins:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(cors_origins),
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.post("/sessions")
    async def create_session(request: Request):
        body = await _json_body(request)
        if isinstance(body, JSONResponse):
            return body
        if "task" not in body:
            return _error(422, "invalid_body", 'missing "task" field')
        try:
            task = task_from_dict(body["task"])
        except (LayoutForgeError, ValueError) as exc:
            return _error(422, "invalid_task", str(exc))
        state = store.create(task)
        return {"session_id": state.session_id}

    @app.post("/sessions/{session_id}/generate")
    async def generate(session_id: str):
        state = store.get(session_id)
        if state is None:
            return _error(404, "unknown_session", f"no session {session_id!r}")
        with state.lock:
            try:
                bundle = build_generation_prompt(state.task)
            except UnresolvedSizeError as exc:
                # legal at session creation (sizes may come from catalog
                # retrieval later), but generation needs concrete boxes
                return _error(422, "invalid_task", str(exc))
            try:
                text = gateway.complete(bundle, params)
            except LayoutForgeError as exc:
                return _error(502, "gateway_error", str(exc))
            try:
                parsed = parse_completion(text, task=state.task)
            except (NoAnswerBlockError, MalformedLayoutError, SchemaError) as exc:
                return _error(502, "bad_completion", str(exc))
            report = validate(parsed.layout, thresholds, task=state.task).to_dict()
            entry = HistoryEntry(
                instruction=None,
                layout=parsed.layout,
                report=report,
                timestamp=time.time(),
            )
            store.append_entry(state, entry)
            return {"layout": layout_to_dict(parsed.layout), "report": report}

    @app.post("/sessions/{session_id}/edit")
    async def edit(session_id: str, request: Request):
        state = store.get(session_id)
        if state is None:
            return _error(404, "unknown_session", f"no session {session_id!r}")
        body = await _json_body(request)
        if isinstance(body, JSONResponse):
            return body
        instruction = body.get("instruction")
        if not isinstance(instruction, str) or not instruction.strip():
            return _error(422, "invalid_body", 'missing or empty "instruction"')
        with state.lock:
            layout = state.current_layout
            if layout is None:
                return _error(
                    409, "no_layout", "session has no layout yet; generate first"
                )
            try:
                bundle = build_edit_prompt(layout, instruction)
            except UnsupportedEditError as exc:
                return _error(422, "unsupported_edit", str(exc))
            try:
                text = gateway.complete(bundle, params)
            except LayoutForgeError as exc:
                return _error(502, "gateway_error", str(exc))
            try:
                parsed = parse_completion(text, task=state.task)
            except (NoAnswerBlockError, MalformedLayoutError, SchemaError) as exc:
                return _error(502, "bad_completion", str(exc))
            report = validate(parsed.layout, thresholds, task=state.task).to_dict()
            entry = HistoryEntry(
                instruction=instruction,
                layout=parsed.layout,
                report=report,
                timestamp=time.time(),
            )
            store.append_entry(state, entry)
            return {"layout": layout_to_dict(parsed.layout), "report": report}

    @app.get("/sessions/{session_id}/layout")
    async def get_layout(session_id: str):
        state = store.get(session_id)
        if state is None:
            return _error(404, "unknown_session", f"no session {session_id!r}")
        layout = state.current_layout
        if layout is None:
            return _error(409, "no_layout", "session has no layout yet; generate first")
        return layout_to_dict(layout)

    @app.get("/sessions/{session_id}/render.svg")
    async def render_session(session_id: str):
        state = store.get(session_id)
        if state is None:
            return _error(404, "unknown_session", f"no session {session_id!r}")
        layout = state.current_layout
        if layout is None:
            return _error(409, "no_layout", "session has no layout yet; generate first")
        svg = render_svg(layout, thresholds=thresholds)
        return Response(content=svg, media_type="image/svg+xml")

    @app.get("/sessions/{session_id}/history")
    async def history(session_id: str):
        state = store.get(session_id)
        if state is None:
            return _error(404, "unknown_session", f"no session {session_id!r}")
        return {
            "history": [e.to_dict(i) for i, e in enumerate(state.history)]
        }

    @app.post("/validate")
    async def validate_endpoint(request: Request):
        body = await _json_body(request)
        if isinstance(body, JSONResponse):
            return body
        if "layout" not in body:
            return _error(422, "invalid_body", 'missing "layout" field')
        try:
            layout = parse_layout(body["layout"])
        except (LayoutForgeError, ValueError) as exc:
            return _error(422, "invalid_layout", str(exc))
        task = None
        if body.get("task") is not None:
            try:
                task = task_from_dict(body["task"])
            except (LayoutForgeError, ValueError) as exc:
                return _error(422, "invalid_task", str(exc))
        return validate(layout, thresholds, task=task).to_dict()

    return app
