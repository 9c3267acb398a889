"""File-backed session persistence.

Each session owns an append-only JSONL event log, the durable source of
truth; a small sidecar meta file records the agent wiring (which is
deliberately kept out of the events), and index.json caches summary
rows for listings. Mutations are serialized per session with an
in-process lock plus a file lock for cross-process safety.
"""

from __future__ import annotations

import json
import logging
import threading
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Sequence

from filelock import FileLock

from .activities import ActivityDefinition
from .errors import ReplayError, UnknownEntityError
from .prompts import SessionContext
from .session import (
    Mode,
    SessionEvent,
    SessionState,
    event_from_dict,
    event_to_dict,
    new_session_id,
    replay,
    start_session,
)

logger = logging.getLogger(__name__)


def session_summary(state: SessionState, created: str, agent: str) -> dict:
    counts = {c.key: 0 for c in state.activity.criteria}
    for artifact in state.board:
        counts[artifact.criterion_key] = counts.get(artifact.criterion_key, 0) + 1
    return {
        "id": state.id,
        "activity": state.activity.name,
        "mode": state.mode.value,
        "phase": state.phase.value,
        "current_step": state.current_step,
        "counts": counts,
        "created": created,
        "agent": agent,
    }


class SessionStore:
    """Event logs, meta files, and the summary index under one data dir."""

    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self.sessions_dir = self.data_dir / "sessions"
        self.sessions_dir.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    # -- paths ------------------------------------------------------------

    def log_path(self, session_id: str) -> Path:
        return self.sessions_dir / f"{session_id}.jsonl"

    def meta_path(self, session_id: str) -> Path:
        return self.sessions_dir / f"{session_id}.meta.json"

    @property
    def index_path(self) -> Path:
        return self.data_dir / "index.json"

    def _lock(self, session_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(session_id, threading.Lock())

    def _file_lock(self, session_id: str) -> FileLock:
        return FileLock(str(self.log_path(session_id)) + ".lock")

    # -- session lifecycle --------------------------------------------------

    def create(
        self,
        activity: ActivityDefinition,
        context: SessionContext,
        mode: Mode,
        agent: str = "manual",
    ) -> tuple[SessionState, str]:
        session_id = new_session_id()
        state, outbound = start_session(activity, context, mode, session_id=session_id)
        created = datetime.now(timezone.utc).isoformat(timespec="milliseconds")
        with self._lock(session_id), self._file_lock(session_id):
            self.meta_path(session_id).write_text(
                json.dumps({"agent": agent, "created": created}, indent=2) + "\n",
                encoding="utf-8",
            )
            self._append_events(session_id, state.events)
            self._update_index(state)
        return state, outbound

    def load(self, session_id: str) -> SessionState:
        return replay(self.read_events(session_id), session_id=session_id)

    def mutate(self, session_id: str, fn: Callable[[SessionState], SessionState]) -> SessionState:
        """Apply one engine operation under the session's single-writer lock."""
        with self._lock(session_id), self._file_lock(session_id):
            state = self.load(session_id)
            new_state = fn(state)
            fresh = new_state.events[len(state.events):]
            if fresh:
                self._append_events(session_id, fresh)
                self._update_index(new_state)
            return new_state

    # -- events -------------------------------------------------------------

    def read_events(self, session_id: str) -> list[SessionEvent]:
        path = self.log_path(session_id)
        if not path.exists():
            raise UnknownEntityError(f"unknown session {session_id!r}")
        events = []
        with path.open(encoding="utf-8") as handle:
            for line_no, line in enumerate(handle, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    events.append(event_from_dict(json.loads(line)))
                except json.JSONDecodeError as exc:
                    raise ReplayError(f"{path.name}:{line_no}: invalid JSON: {exc}") from exc
        return events

    def events_after(self, session_id: str, after: int) -> list[SessionEvent]:
        return [e for e in self.read_events(session_id) if e.sequence > after]

    def _append_events(self, session_id: str, events: Sequence[SessionEvent]) -> None:
        with self.log_path(session_id).open("a", encoding="utf-8") as handle:
            for event in events:
                handle.write(json.dumps(event_to_dict(event), ensure_ascii=False) + "\n")
            handle.flush()

    # -- meta / index ---------------------------------------------------------

    def meta(self, session_id: str) -> dict:
        path = self.meta_path(session_id)
        if not path.exists():
            return {"agent": "manual", "created": ""}
        return json.loads(path.read_text(encoding="utf-8"))

    def agent_spec(self, session_id: str) -> str:
        return self.meta(session_id).get("agent", "manual")

    def _update_index(self, state: SessionState) -> None:
        meta = self.meta(state.id)
        row = session_summary(state, meta.get("created", ""), meta.get("agent", "manual"))
        rows = [r for r in self.list_summaries() if r.get("id") != state.id]
        rows.append(row)
        rows.sort(key=lambda r: (r.get("created", ""), r.get("id", "")))
        self.index_path.write_text(
            json.dumps({"sessions": rows}, indent=2, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )

    def list_summaries(self) -> list[dict]:
        if not self.index_path.exists():
            return []
        try:
            return json.loads(self.index_path.read_text(encoding="utf-8")).get("sessions", [])
        except json.JSONDecodeError:
            logger.warning("index.json unreadable; rebuilding from logs")
            return self._rebuild_index()

    def _rebuild_index(self) -> list[dict]:
        rows = []
        for path in sorted(self.sessions_dir.glob("*.jsonl")):
            session_id = path.stem
            try:
                state = self.load(session_id)
            except (ReplayError, UnknownEntityError) as exc:
                logger.warning("skipping %s: %s", path.name, exc)
                continue
            meta = self.meta(session_id)
            rows.append(session_summary(state, meta.get("created", ""), meta.get("agent", "manual")))
        return rows
