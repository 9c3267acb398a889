"""HTTP service exposing sessions to the CLI and the web console.

All mutating endpoints funnel through the store's per-session lock, so
responses always reflect post-apply state. The event endpoint serves
either a JSON page (incremental polling) or a live server-sent-events
stream, which is what the console subscribes to.
"""

from __future__ import annotations

import asyncio
import json
import logging
from pathlib import Path

from fastapi import Depends, FastAPI, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response, StreamingResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import session as engine
from .activities import activity_from_document, activity_to_document, builtin_activities
from .agents import provider_for_profile
from .config import ServiceConfig
from .errors import (
    AgentError,
    ChaiError,
    ConflictError,
    UnknownEntityError,
    ValidationError,
)
from .exports import FORMAT_CSV, export_session
from .prompts import SessionContext
from .session import Mode, Phase, state_to_dict
from .store import SessionStore, session_summary

logger = logging.getLogger(__name__)

_MODE_ALIASES = {
    "stepwise": Mode.STEPWISE,
    "full": Mode.FULL_RUN,
    "full_run": Mode.FULL_RUN,
    Mode.STEPWISE.value.lower(): Mode.STEPWISE,
}


class CreateSessionBody(BaseModel):
    activity: str | None = None
    activity_document: dict | None = None
    context: str
    mode: str = "stepwise"
    agent: str | None = None


class AgentResponseBody(BaseModel):
    text: str


class HumanArtifactBody(BaseModel):
    criterion: str
    text: str
    author: str


class ReviewBody(BaseModel):
    decision: str
    text: str | None = None


class ClusterBody(BaseModel):
    label: str
    artifact_ids: list[str]


class HillBody(BaseModel):
    text: str
    who_ids: list[str]
    what_ids: list[str]
    wow_ids: list[str]


class CompleteBody(BaseModel):
    override: bool = False


def _parse_mode(value: str) -> Mode:
    mode = _MODE_ALIASES.get(value.lower())
    if mode is None:
        raise ValidationError(f"unknown mode {value!r} (expected stepwise or full)")
    return mode


def create_app(config: ServiceConfig, console_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="chai session service")
    # The console may be served from a different local origin during
    # development; auth, when enabled, is the bearer token, not cookies.
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    store = SessionStore(config.data_dir)
    app.state.store = store
    app.state.config = config

    def require_token(request: Request) -> None:
        if config.api_token is None:
            return
        header = request.headers.get("authorization", "")
        if header != f"Bearer {config.api_token}":
            raise HTTPException(status_code=401, detail="missing or invalid bearer token")

    guarded = [Depends(require_token)]

    @app.exception_handler(ChaiError)
    async def chai_error_handler(request: Request, exc: ChaiError):
        if isinstance(exc, UnknownEntityError):
            status = 404
        elif isinstance(exc, ConflictError):
            status = 409
        elif isinstance(exc, AgentError):
            status = 502
        elif isinstance(exc, ValidationError):
            status = 422
        else:
            status = 500
        return JSONResponse(status_code=status, content={"detail": str(exc)})

    def resolve_activity(body: CreateSessionBody):
        if body.activity_document is not None:
            return activity_from_document(body.activity_document)
        if body.activity:
            registry = builtin_activities()
            if body.activity in registry:
                return registry[body.activity]
            raise UnknownEntityError(f"unknown activity {body.activity!r}")
        raise ValidationError("either activity or activity_document is required")

    def provider_for_session(session_id: str, state: engine.SessionState):
        profile = config.agent_profile(store.agent_spec(session_id))
        if profile.provider == "manual":
            return None
        consumed = sum(1 for m in state.conversation.messages if m.role == "AGENT")
        return provider_for_profile(profile, consumed_replies=consumed)

    # -- activities ---------------------------------------------------------

    @app.get("/activities", dependencies=guarded)
    def list_activities():
        return {
            "activities": [
                {
                    "id": key,
                    "name": activity.name,
                    "steps": len(activity.steps),
                    "criteria": [
                        {"key": c.key, "label": c.label} for c in activity.criteria
                    ],
                }
                for key, activity in builtin_activities().items()
            ]
        }

    @app.get("/activities/{activity_id}", dependencies=guarded)
    def get_activity(activity_id: str):
        registry = builtin_activities()
        if activity_id not in registry:
            raise UnknownEntityError(f"unknown activity {activity_id!r}")
        return activity_to_document(registry[activity_id])

    # -- sessions -----------------------------------------------------------

    @app.get("/sessions", dependencies=guarded)
    def list_sessions():
        return {"sessions": store.list_summaries()}

    @app.post("/sessions", status_code=201, dependencies=guarded)
    def create_session(body: CreateSessionBody):
        activity = resolve_activity(body)
        mode = _parse_mode(body.mode)
        agent = body.agent or "manual"
        config.agent_profile(agent)  # validate the spec before creating anything
        state, _ = store.create(activity, SessionContext(body.context), mode, agent=agent)
        meta = store.meta(state.id)
        return session_summary(state, meta.get("created", ""), agent)

    @app.get("/sessions/{session_id}", dependencies=guarded)
    def get_session(session_id: str):
        return state_to_dict(store.load(session_id))

    @app.post("/sessions/{session_id}/advance", dependencies=guarded)
    def advance_session(session_id: str):
        def step(state: engine.SessionState) -> engine.SessionState:
            provider = provider_for_session(session_id, state)
            if state.phase == Phase.AWAITING_AGENT:
                if provider is None:
                    raise ConflictError(
                        "session awaits a pasted agent response (manual agent)"
                    )
                return engine.run_pending_turn(state, provider, config.disclaimer_cues)
            state, _ = engine.advance(state)
            if provider is not None:
                state = engine.run_pending_turn(state, provider, config.disclaimer_cues)
            return state

        return state_to_dict(store.mutate(session_id, step))

    @app.post("/sessions/{session_id}/agent-response", dependencies=guarded)
    def paste_agent_response(session_id: str, body: AgentResponseBody):
        return state_to_dict(
            store.mutate(
                session_id,
                lambda s: engine.apply_agent_response(s, body.text, config.disclaimer_cues),
            )
        )

    @app.post("/sessions/{session_id}/artifacts", dependencies=guarded)
    def add_artifact(session_id: str, body: HumanArtifactBody):
        return state_to_dict(
            store.mutate(
                session_id,
                lambda s: engine.submit_human_artifact(s, body.criterion, body.text, body.author),
            )
        )

    @app.post("/sessions/{session_id}/artifacts/{artifact_id}/review", dependencies=guarded)
    def review_artifact(session_id: str, artifact_id: str, body: ReviewBody):
        return state_to_dict(
            store.mutate(
                session_id,
                lambda s: engine.review_artifact(s, artifact_id, body.decision, body.text),
            )
        )

    @app.post("/sessions/{session_id}/clusters", dependencies=guarded)
    def assign_cluster(session_id: str, body: ClusterBody):
        return state_to_dict(
            store.mutate(
                session_id,
                lambda s: engine.assign_cluster(s, body.artifact_ids, body.label),
            )
        )

    @app.post("/sessions/{session_id}/hills", dependencies=guarded)
    def compose_hill(session_id: str, body: HillBody):
        return state_to_dict(
            store.mutate(
                session_id,
                lambda s: engine.compose_hill(s, body.who_ids, body.what_ids, body.wow_ids, body.text),
            )
        )

    @app.post("/sessions/{session_id}/complete", dependencies=guarded)
    def complete_session(session_id: str, body: CompleteBody | None = None):
        override = bool(body and body.override)
        return state_to_dict(
            store.mutate(session_id, lambda s: engine.complete(s, override=override))
        )

    @app.get("/sessions/{session_id}/export", dependencies=guarded)
    def export(session_id: str, format: str = "md"):
        document = export_session(store.load(session_id), format)
        if document.format == FORMAT_CSV:
            media, extension = "text/csv; charset=utf-8", "csv"
        else:
            media, extension = "text/markdown; charset=utf-8", "md"
        return Response(
            content=document.content,
            media_type=media,
            headers={
                "Content-Disposition": f'attachment; filename="{session_id}.{extension}"'
            },
        )

    # -- events -------------------------------------------------------------

    def sse_chunk(event: engine.SessionEvent) -> str:
        data = json.dumps(engine.event_to_dict(event), ensure_ascii=False)
        return f"id: {event.sequence}\ndata: {data}\n\n"

    @app.get("/sessions/{session_id}/events", dependencies=guarded)
    async def session_events(session_id: str, request: Request, after: int = 0):
        store.load(session_id)  # 404 before committing to a stream
        last_event_id = request.headers.get("last-event-id")
        if last_event_id and last_event_id.isdigit():
            after = max(after, int(last_event_id))

        if "text/event-stream" not in request.headers.get("accept", ""):
            events = store.events_after(session_id, after)
            return {"events": [engine.event_to_dict(e) for e in events]}

        async def stream():
            cursor = after
            idle = 0
            while True:
                if await request.is_disconnected():
                    return
                fresh = await asyncio.to_thread(store.events_after, session_id, cursor)
                for event in fresh:
                    cursor = event.sequence
                    yield sse_chunk(event)
                if fresh:
                    idle = 0
                else:
                    idle += 1
                    if idle % 40 == 0:
                        yield ": keep-alive\n\n"
                await asyncio.sleep(0.15)

        return StreamingResponse(stream(), media_type="text/event-stream")

    if console_dir is not None and Path(console_dir).is_dir():
        app.mount("/console", StaticFiles(directory=console_dir, html=True), name="console")

    return app
