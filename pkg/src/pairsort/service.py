"""Session-oriented annotation API.

Thin HTTP skin over the session store: create sessions from uploaded data
file contents, serve the pending comparison, accept judgments (write-ahead:
events hit disk before the client sees an ack), expose rankings, stats and
full-session exports, and serve item images to the browser UI.

All operations on one session are serialized by a per-session lock, so
concurrent clients can never interleave half-applied state. Errors use one
shape everywhere: {"code", "message", "details"}.
"""

from __future__ import annotations

import json
import threading
from pathlib import Path

from fastapi import FastAPI
from fastapi.encoders import jsonable_encoder
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import FileResponse, JSONResponse, RedirectResponse
from pydantic import BaseModel

from .config import SessionConfig
from .errors import InputError, StateError
from .fileio import parse_items_jsonl, parse_similarities
from .session import Session, SessionStore
from .sorter import ComparisonRequest


class CreateSessionBody(BaseModel):
    items: str | list[dict]
    similarities: dict | str
    config: dict | None = None
    images_dir: str | None = None
    session_id: str | None = None


class JudgmentBody(BaseModel):
    request_id: int
    outcome: str


class _Registry:
    """Loaded sessions plus their locks; lazily restores from the store."""

    def __init__(self, store: SessionStore):
        self.store = store
        self._lock = threading.Lock()
        self._sessions: dict[str, tuple[threading.RLock, Session]] = {}

    def add(self, session: Session) -> None:
        with self._lock:
            self._sessions[session.session_id] = (threading.RLock(), session)

    def acquire(self, session_id: str) -> tuple[threading.RLock, Session]:
        with self._lock:
            entry = self._sessions.get(session_id)
            if entry is None:
                session = self.store.load(session_id)  # KeyError when unknown
                entry = (threading.RLock(), session)
                self._sessions[session_id] = entry
            return entry

    def evict(self, session_id: str) -> None:
        with self._lock:
            self._sessions.pop(session_id, None)


def _error(status: int, code: str, message: str, details: dict | None = None):
    return JSONResponse(
        status_code=status,
        content={"code": code, "message": message, "details": details or {}},
    )


def create_app(
    data_dir: str | Path,
    cors_origins: list[str] | None = None,
) -> FastAPI:
    store = SessionStore(data_dir)
    registry = _Registry(store)
    app = FastAPI(title="pairsort annotation service", docs_url=None, redoc_url=None)
    app.state.store = store
    app.state.registry = registry

    if cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(cors_origins),
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(InputError)
    async def _input_error(request, exc: InputError):
        return _error(400, "invalid_input", str(exc), getattr(exc, "details", None))

    @app.exception_handler(StateError)
    async def _state_error(request, exc: StateError):
        return _error(409, "conflict", str(exc))

    @app.exception_handler(KeyError)
    async def _not_found(request, exc: KeyError):
        name = exc.args[0] if exc.args else ""
        return _error(404, "not_found", f"unknown session or item {name!r}")

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request, exc: RequestValidationError):
        return _error(
            400,
            "invalid_input",
            "request body failed validation",
            {"errors": jsonable_encoder(exc.errors())},
        )

    def flush_or_evict(session: Session) -> None:
        # if persistence fails the in-memory state is ahead of disk; drop it
        # so the next request reloads the last durable state
        try:
            store.flush(session)
        except Exception:
            registry.evict(session.session_id)
            raise

    def item_view(session: Session, item_id: str) -> dict:
        ref = session.items_by_id[item_id].display_ref
        return {
            "id": item_id,
            "display_ref": ref,
            "image_url": f"/v1/sessions/{session.session_id}/items/{item_id}/image",
        }

    def request_view(session: Session, req: ComparisonRequest) -> dict:
        return {
            "request_id": req.request_id,
            "left": item_view(session, req.left),
            "right": item_view(session, req.right),
            "uncertainty": req.assessment.uncertainty,
            "theta": req.theta_at_issue,
        }

    @app.get("/v1/health")
    def health():
        return {"ok": True}

    @app.post("/v1/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        if isinstance(body.items, str):
            items = parse_items_jsonl(body.items)
        else:
            items = parse_items_jsonl(
                "\n".join(json.dumps(row) for row in body.items)
            )
        tau, similarities = parse_similarities(body.similarities)
        config = SessionConfig.from_dict(body.config or {})
        session = store.create(
            config,
            items,
            tau,
            similarities,
            images_dir=body.images_dir,
            session_id=body.session_id,
        )
        registry.add(session)
        return {
            "session_id": session.session_id,
            "status": session.status,
            "stats": session.stats(),
        }

    @app.get("/v1/sessions/{session_id}/next")
    def get_next(session_id: str):
        lock, session = registry.acquire(session_id)
        with lock:
            req = session.get_next()
            flush_or_evict(session)
            if req is None:
                return {
                    "done": True,
                    "ranking_url": f"/v1/sessions/{session_id}/ranking",
                }
            return {"done": False, "request": request_view(session, req)}

    @app.post("/v1/sessions/{session_id}/judgments")
    def post_judgment(session_id: str, body: JudgmentBody):
        lock, session = registry.acquire(session_id)
        with lock:
            session.submit_judgment(body.request_id, body.outcome)
            flush_or_evict(session)
            return {"ok": True, "stats": session.stats()}

    @app.get("/v1/sessions/{session_id}/ranking")
    def get_ranking(session_id: str):
        lock, session = registry.acquire(session_id)
        with lock:
            rows = session.ranking_rows()  # StateError -> 409 while active
            return {"session_id": session_id, "ranking": rows}

    @app.get("/v1/sessions/{session_id}/stats")
    def get_stats(session_id: str):
        lock, session = registry.acquire(session_id)
        with lock:
            return session.stats()

    @app.get("/v1/sessions/{session_id}/export")
    def export_session(session_id: str):
        lock, session = registry.acquire(session_id)
        with lock:
            return store.export_bundle(session)

    @app.get("/v1/sessions/{session_id}/items/{item_id}/image")
    def get_image(session_id: str, item_id: str):
        lock, session = registry.acquire(session_id)
        with lock:
            item = session.items_by_id.get(item_id)
            if item is None:
                raise KeyError(item_id)
            ref = item.display_ref
            if ref.startswith(("http://", "https://")):
                return RedirectResponse(ref)
            if not session.images_dir:
                return _error(
                    404,
                    "not_found",
                    f"session has no images directory to resolve {ref!r}",
                )
            root = Path(session.images_dir).resolve()
            target = (root / ref).resolve()
            if not target.is_relative_to(root):
                return _error(
                    400, "invalid_input", f"display_ref {ref!r} escapes the images directory"
                )
            if not target.is_file():
                return _error(404, "not_found", f"no image file at {ref!r}")
            return FileResponse(target)

    return app
