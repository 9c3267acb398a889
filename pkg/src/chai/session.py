"""Event-sourced state machine for a live co-creation session.

Every mutation goes through an event: the operation validates its
preconditions, constructs event payloads, and folds them into the
state. Replaying the event list from scratch therefore reproduces the
live state exactly, which is what the persistence layer relies on.

All state values are immutable; operations return new states.
"""

from __future__ import annotations

import secrets
import time
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from enum import Enum
from typing import Sequence

from .activities import (
    ActivityDefinition,
    activity_from_document,
    activity_to_document,
    validate_activity,
)
from .agents import ROLE_AGENT, ROLE_FACILITATOR, AgentConversation, AgentProvider
from .errors import (
    ActivityValidationError,
    ReplayError,
    TerminalStatusError,
    UnknownEntityError,
    ValidationError,
    WrongPhaseError,
)
from .parsing import (
    ArtifactDraft,
    parse_full_response,
    parse_step_response,
    render_drafts,
    split_commentary,
)
from .prompts import (
    SessionContext,
    compose_initial_prompt,
    make_full_run_directive,
    make_step_directive,
)


class Mode(str, Enum):
    STEPWISE = "STEPWISE"
    FULL_RUN = "FULL_RUN"


class Phase(str, Enum):
    AWAITING_AGENT = "AWAITING_AGENT"
    REVIEWING = "REVIEWING"
    COMPLETE = "COMPLETE"


class Origin(str, Enum):
    AGENT = "AGENT"
    HUMAN = "HUMAN"


class Status(str, Enum):
    PROPOSED = "PROPOSED"
    ACCEPTED = "ACCEPTED"
    REJECTED = "REJECTED"


DECISION_ACCEPT = "ACCEPT"
DECISION_REJECT = "REJECT"
DECISION_AMEND = "AMEND"

EV_SESSION_STARTED = "SessionStarted"
EV_AGENT_REQUESTED = "AgentRequested"
EV_AGENT_RESPONDED = "AgentResponded"
EV_ARTIFACTS_RECORDED = "ArtifactsRecorded"
EV_HUMAN_ARTIFACT_ADDED = "HumanArtifactAdded"
EV_ARTIFACT_REVIEWED = "ArtifactReviewed"
EV_CLUSTER_ASSIGNED = "ClusterAssigned"
EV_HILL_COMPOSED = "HillComposed"
EV_SESSION_COMPLETED = "SessionCompleted"

_EVENT_TYPES = {
    EV_SESSION_STARTED,
    EV_AGENT_REQUESTED,
    EV_AGENT_RESPONDED,
    EV_ARTIFACTS_RECORDED,
    EV_HUMAN_ARTIFACT_ADDED,
    EV_ARTIFACT_REVIEWED,
    EV_CLUSTER_ASSIGNED,
    EV_HILL_COMPOSED,
    EV_SESSION_COMPLETED,
}


@dataclass(frozen=True)
class Artifact:
    id: str
    criterion_key: str
    text: str
    original_text: str
    origin: Origin
    author: str | None
    status: Status
    cluster_id: str | None = None


@dataclass(frozen=True)
class Cluster:
    id: str
    label: str
    member_ids: tuple[str, ...]


@dataclass(frozen=True)
class HillStatement:
    id: str
    text: str
    who_refs: tuple[str, ...]
    what_refs: tuple[str, ...]
    wow_refs: tuple[str, ...]


@dataclass(frozen=True)
class StepCommentary:
    """Disclaimers and unclassified lines captured from one agent turn."""

    step: int | None
    disclaimers: tuple[str, ...]
    unparsed: tuple[str, ...]


@dataclass(frozen=True)
class SessionEvent:
    sequence: int
    timestamp: str
    type: str
    payload: dict


@dataclass(frozen=True)
class SessionState:
    id: str
    activity: ActivityDefinition
    context: SessionContext
    mode: Mode
    phase: Phase
    current_step: int | None
    conversation: AgentConversation
    board: tuple[Artifact, ...]
    clusters: tuple[Cluster, ...]
    hills: tuple[HillStatement, ...]
    step_commentary: tuple[StepCommentary, ...]
    pending_human_ids: tuple[str, ...]
    completed_with_override: bool
    events: tuple[SessionEvent, ...]

    def artifact(self, artifact_id: str) -> Artifact:
        for artifact in self.board:
            if artifact.id == artifact_id:
                return artifact
        raise UnknownEntityError(f"unknown artifact {artifact_id!r}")

    def cluster_by_label(self, label: str) -> Cluster | None:
        for cluster in self.clusters:
            if cluster.label == label:
                return cluster
        return None

    @property
    def last_step_index(self) -> int:
        return len(self.activity.steps)


def new_session_id() -> str:
    # Time-prefixed so ids sort by creation; suffix avoids same-ns collisions.
    return f"s-{time.time_ns():016x}-{secrets.token_hex(2)}"


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="milliseconds")


def _next_artifact_id(state: SessionState, offset: int = 0) -> str:
    return f"a-{len(state.board) + offset + 1:06d}"


# --- event folding -------------------------------------------------------


def _fold(state: SessionState | None, event: SessionEvent) -> SessionState:
    payload = event.payload
    if event.type == EV_SESSION_STARTED:
        if state is not None:
            raise ReplayError("SessionStarted must be the first event")
        return SessionState(
            id=payload.get("session_id", ""),
            activity=activity_from_document(payload["activity"]),
            context=SessionContext(payload["context"]),
            mode=Mode(payload["mode"]),
            phase=Phase.AWAITING_AGENT,
            current_step=None,
            conversation=AgentConversation(),
            board=(),
            clusters=(),
            hills=(),
            step_commentary=(),
            pending_human_ids=(),
            completed_with_override=False,
            events=(event,),
        )
    if state is None:
        raise ReplayError("event log must start with SessionStarted")

    events = state.events + (event,)
    if event.type == EV_AGENT_REQUESTED:
        return replace(
            state,
            phase=Phase.AWAITING_AGENT,
            current_step=payload["step"] if payload["step"] is not None else state.current_step,
            conversation=state.conversation.append(ROLE_FACILITATOR, payload["message"]),
            pending_human_ids=(),
            events=events,
        )
    if event.type == EV_AGENT_RESPONDED:
        return replace(
            state,
            conversation=state.conversation.append(ROLE_AGENT, payload["message"]),
            events=events,
        )
    if event.type == EV_ARTIFACTS_RECORDED:
        recorded = tuple(
            Artifact(
                id=entry["id"],
                criterion_key=entry["criterion"],
                text=entry["text"],
                original_text=entry["text"],
                origin=Origin.AGENT,
                author=None,
                status=Status.PROPOSED,
            )
            for entry in payload["artifacts"]
        )
        commentary = StepCommentary(
            step=payload["step"],
            disclaimers=tuple(payload["disclaimers"]),
            unparsed=tuple(payload["unparsed"]),
        )
        return replace(
            state,
            phase=Phase.REVIEWING,
            board=state.board + recorded,
            step_commentary=state.step_commentary + (commentary,),
            events=events,
        )
    if event.type == EV_HUMAN_ARTIFACT_ADDED:
        artifact = Artifact(
            id=payload["id"],
            criterion_key=payload["criterion"],
            text=payload["text"],
            original_text=payload["text"],
            origin=Origin.HUMAN,
            author=payload["author"],
            status=Status.PROPOSED,
        )
        return replace(
            state,
            board=state.board + (artifact,),
            pending_human_ids=state.pending_human_ids + (artifact.id,),
            events=events,
        )
    if event.type == EV_ARTIFACT_REVIEWED:
        artifact_id = payload["artifact_id"]
        decision = payload["decision"]
        board = []
        for artifact in state.board:
            if artifact.id != artifact_id:
                board.append(artifact)
            elif decision == DECISION_ACCEPT:
                board.append(replace(artifact, status=Status.ACCEPTED))
            elif decision == DECISION_REJECT:
                board.append(replace(artifact, status=Status.REJECTED, cluster_id=None))
            else:
                board.append(replace(artifact, text=payload["new_text"]))
        clusters = state.clusters
        if decision == DECISION_REJECT:
            clusters = tuple(
                replace(c, member_ids=tuple(m for m in c.member_ids if m != artifact_id))
                for c in state.clusters
            )
        return replace(state, board=tuple(board), clusters=clusters, events=events)
    if event.type == EV_CLUSTER_ASSIGNED:
        cluster_id = payload["cluster_id"]
        label = payload["label"]
        moved = set(payload["artifact_ids"])
        clusters = [
            replace(c, member_ids=tuple(m for m in c.member_ids if m not in moved))
            for c in state.clusters
        ]
        target = next((c for c in clusters if c.id == cluster_id), None)
        if target is None:
            target = Cluster(id=cluster_id, label=label, member_ids=())
            clusters.append(target)
        members = target.member_ids + tuple(
            aid for aid in payload["artifact_ids"] if aid not in target.member_ids
        )
        clusters = [
            replace(c, member_ids=members) if c.id == cluster_id else c for c in clusters
        ]
        board = tuple(
            replace(a, cluster_id=cluster_id) if a.id in moved else a for a in state.board
        )
        return replace(state, board=board, clusters=tuple(clusters), events=events)
    if event.type == EV_HILL_COMPOSED:
        hill = HillStatement(
            id=payload["id"],
            text=payload["text"],
            who_refs=tuple(payload["who_refs"]),
            what_refs=tuple(payload["what_refs"]),
            wow_refs=tuple(payload["wow_refs"]),
        )
        return replace(state, hills=state.hills + (hill,), events=events)
    if event.type == EV_SESSION_COMPLETED:
        return replace(
            state,
            phase=Phase.COMPLETE,
            completed_with_override=bool(payload["override"]),
            events=events,
        )
    raise ReplayError(f"unknown event type {event.type!r}")


def _emit(state: SessionState | None, entries: Sequence[tuple[str, dict]]) -> SessionState:
    sequence = len(state.events) if state is not None else 0
    timestamp = _now()
    for event_type, payload in entries:
        sequence += 1
        state = _fold(state, SessionEvent(sequence, timestamp, event_type, payload))
    return state


def replay(events: Sequence[SessionEvent], session_id: str = "") -> SessionState:
    """Rebuild a session by folding its event log from the start."""
    if not events:
        raise ReplayError("empty event log: SessionStarted required first")
    state: SessionState | None = None
    for position, event in enumerate(events, start=1):
        if event.sequence != position:
            raise ReplayError(
                f"event sequence gap: expected {position}, got {event.sequence}"
            )
        if event.type not in _EVENT_TYPES:
            raise ReplayError(f"unknown event type {event.type!r}")
        state = _fold(state, event)
    if session_id:
        state = replace(state, id=session_id)
    return state


# --- operations ----------------------------------------------------------


def _require_phase(state: SessionState, phase: Phase, hint: str) -> None:
    if state.phase == Phase.COMPLETE and phase != Phase.COMPLETE:
        raise WrongPhaseError("session is complete and read-only")
    if state.phase != phase:
        raise WrongPhaseError(f"{hint} requires phase {phase.value}, session is {state.phase.value}")


def _require_mutable(state: SessionState) -> None:
    if state.phase == Phase.COMPLETE:
        raise WrongPhaseError("session is complete and read-only")


def start_session(
    activity: ActivityDefinition,
    context: SessionContext,
    mode: Mode,
    session_id: str | None = None,
) -> tuple[SessionState, str]:
    """Open a session and compose the prompt that must be sent to the agent."""
    violations = validate_activity(activity)
    if violations:
        raise ActivityValidationError(violations)
    if mode == Mode.STEPWISE:
        directive = make_step_directive(activity, 1)
        step: int | None = 1
    else:
        directive = make_full_run_directive(activity)
        step = None
    prompt = compose_initial_prompt(activity, context, directive)
    state = _emit(
        None,
        [
            (
                EV_SESSION_STARTED,
                {
                    "activity": activity_to_document(activity),
                    "context": context.narrative,
                    "mode": mode.value,
                },
            ),
            (EV_AGENT_REQUESTED, {"step": step, "message": prompt.full_text}),
        ],
    )
    state = replace(state, id=session_id or new_session_id())
    return state, prompt.full_text


def apply_agent_response(
    state: SessionState,
    response_text: str,
    disclaimer_cues: Sequence[str] | None = None,
    provenance: dict | None = None,
) -> SessionState:
    """Record the agent's reply: parse it and propose its artifacts.

    provenance identifies where the reply came from (manual paste,
    scripted replay, or a remote model with its sampling settings) and
    is kept in the event log.
    """
    _require_phase(state, Phase.AWAITING_AGENT, "apply_agent_response")
    if not response_text.strip():
        raise ValidationError("agent response must be non-empty")

    if state.mode == Mode.STEPWISE:
        step = state.current_step
        criterion = state.activity.steps[step - 1].produces_criterion
        if criterion is None:
            disclaimers, rest = split_commentary(response_text, disclaimer_cues)
            drafts: tuple[ArtifactDraft, ...] = ()
            unparsed = rest
        else:
            parsed = parse_step_response(response_text, criterion, disclaimer_cues)
            drafts, disclaimers, unparsed = parsed.drafts, parsed.disclaimers, parsed.unparsed
    else:
        step = None
        parsed = parse_full_response(response_text, state.activity.criteria, disclaimer_cues)
        drafts, disclaimers, unparsed = parsed.drafts, parsed.disclaimers, parsed.unparsed

    artifacts = [
        {
            "id": _next_artifact_id(state, offset),
            "criterion": draft.criterion_key,
            "text": draft.text,
        }
        for offset, draft in enumerate(drafts)
    ]
    return _emit(
        state,
        [
            (
                EV_AGENT_RESPONDED,
                {
                    "message": response_text,
                    "provenance": provenance or {"provider": "manual"},
                },
            ),
            (
                EV_ARTIFACTS_RECORDED,
                {
                    "step": step,
                    "artifacts": artifacts,
                    "disclaimers": list(disclaimers),
                    "unparsed": list(unparsed),
                },
            ),
        ],
    )


def _pending_preamble(state: SessionState) -> str:
    pending = [
        state.artifact(aid)
        for aid in state.pending_human_ids
        if state.artifact(aid).status != Status.REJECTED
    ]
    if not pending:
        return ""
    blocks = []
    for criterion in state.activity.criteria:
        drafts = [
            ArtifactDraft(criterion_key=a.criterion_key, text=a.text)
            for a in pending
            if a.criterion_key == criterion.key
        ]
        if drafts:
            blocks.append(
                f'The human participants added the following "{criterion.key}" ideas:\n'
                + render_drafts(drafts)
                + "\n\n"
            )
    return "".join(blocks)


def advance(state: SessionState) -> tuple[SessionState, str]:
    """Move a stepwise session to the next step and compose its directive.

    Human artifacts added since the last agent turn are prepended so the
    agent can build on them.
    """
    _require_phase(state, Phase.REVIEWING, "advance")
    if state.mode != Mode.STEPWISE:
        raise WrongPhaseError("advance applies only to stepwise sessions")
    if state.current_step >= state.last_step_index:
        raise WrongPhaseError("already at the last step; use complete")
    next_step = state.current_step + 1
    directive = make_step_directive(state.activity, next_step)
    outbound = _pending_preamble(state) + directive.text
    state = _emit(state, [(EV_AGENT_REQUESTED, {"step": next_step, "message": outbound})])
    return state, outbound


def submit_human_artifact(
    state: SessionState,
    criterion_key: str,
    text: str,
    author: str,
) -> SessionState:
    """Add a participant's sticky to the board as a proposed artifact."""
    _require_mutable(state)
    if state.activity.criterion(criterion_key) is None:
        raise ValidationError(f"unknown criterion {criterion_key!r}")
    if not text.strip():
        raise ValidationError("artifact text must be non-empty")
    if not author.strip():
        raise ValidationError("author must be non-empty")
    return _emit(
        state,
        [
            (
                EV_HUMAN_ARTIFACT_ADDED,
                {
                    "id": _next_artifact_id(state),
                    "criterion": criterion_key,
                    "text": text.strip(),
                    "author": author.strip(),
                },
            )
        ],
    )


def review_artifact(
    state: SessionState,
    artifact_id: str,
    decision: str,
    new_text: str | None = None,
) -> SessionState:
    """Accept, reject, or amend a proposed artifact.

    Accept and reject are terminal; amend replaces the text but keeps
    the artifact open for a later decision.
    """
    _require_mutable(state)
    decision = decision.upper()
    if decision not in (DECISION_ACCEPT, DECISION_REJECT, DECISION_AMEND):
        raise ValidationError(f"unknown review decision {decision!r}")
    artifact = state.artifact(artifact_id)
    if artifact.status != Status.PROPOSED:
        raise TerminalStatusError(
            f"artifact {artifact_id} is already {artifact.status.value}"
        )
    payload: dict = {"artifact_id": artifact_id, "decision": decision}
    if decision == DECISION_AMEND:
        if not new_text or not new_text.strip():
            raise ValidationError("amend requires replacement text")
        payload["new_text"] = new_text.strip()
    return _emit(state, [(EV_ARTIFACT_REVIEWED, payload)])


def assign_cluster(
    state: SessionState,
    artifact_ids: Sequence[str],
    label: str,
) -> SessionState:
    """Group artifacts under a labeled theme; an artifact sits in at most one."""
    _require_mutable(state)
    if not label.strip():
        raise ValidationError("cluster label must be non-empty")
    ids = list(dict.fromkeys(artifact_ids))
    if not ids:
        raise ValidationError("at least one artifact id required")
    for aid in ids:
        artifact = state.artifact(aid)
        if artifact.status == Status.REJECTED:
            raise TerminalStatusError(f"artifact {aid} is rejected and cannot be clustered")
    existing = state.cluster_by_label(label.strip())
    cluster_id = existing.id if existing else f"c-{len(state.clusters) + 1:06d}"
    return _emit(
        state,
        [
            (
                EV_CLUSTER_ASSIGNED,
                {"cluster_id": cluster_id, "label": label.strip(), "artifact_ids": ids},
            )
        ],
    )


def compose_hill(
    state: SessionState,
    who_ids: Sequence[str],
    what_ids: Sequence[str],
    wow_ids: Sequence[str],
    text: str,
) -> SessionState:
    """Record a Hill statement built from accepted who/what/wow artifacts."""
    _require_mutable(state)
    if not text.strip():
        raise ValidationError("hill text must be non-empty")
    for name, refs in (("who", who_ids), ("what", what_ids), ("wow", wow_ids)):
        if not refs:
            raise ValidationError(f"hill requires a {name}")
        for aid in refs:
            artifact = state.artifact(aid)
            if artifact.status != Status.ACCEPTED:
                raise ValidationError(
                    f"hill references must be accepted artifacts; {aid} is"
                    f" {artifact.status.value}"
                )
    return _emit(
        state,
        [
            (
                EV_HILL_COMPOSED,
                {
                    "id": f"h-{len(state.hills) + 1:06d}",
                    "text": text.strip(),
                    "who_refs": list(who_ids),
                    "what_refs": list(what_ids),
                    "wow_refs": list(wow_ids),
                },
            )
        ],
    )


def complete(state: SessionState, override: bool = False) -> SessionState:
    """Close the session; afterwards it is read-only."""
    _require_phase(state, Phase.REVIEWING, "complete")
    if state.mode == Mode.STEPWISE and not override and state.current_step < state.last_step_index:
        raise WrongPhaseError(
            f"session is at step {state.current_step} of {state.last_step_index};"
            " pass override to complete early"
        )
    return _emit(state, [(EV_SESSION_COMPLETED, {"override": override})])


# --- driving a session with a provider ----------------------------------


def run_pending_turn(
    state: SessionState,
    provider: AgentProvider,
    disclaimer_cues: Sequence[str] | None = None,
) -> SessionState:
    """Send the pending outbound message and record the agent's reply."""
    _require_phase(state, Phase.AWAITING_AGENT, "run_pending_turn")
    reply = provider.complete(state.conversation.messages)
    provenance = getattr(provider, "provenance", None)
    return apply_agent_response(state, reply, disclaimer_cues, provenance=provenance)


def drive(
    state: SessionState,
    provider: AgentProvider,
    disclaimer_cues: Sequence[str] | None = None,
) -> SessionState:
    """Run agent turns until the session needs a human or the script ends."""
    has_more = getattr(provider, "has_more", lambda: True)
    while True:
        if state.phase == Phase.AWAITING_AGENT and has_more():
            state = run_pending_turn(state, provider, disclaimer_cues)
        elif (
            state.phase == Phase.REVIEWING
            and state.mode == Mode.STEPWISE
            and state.current_step < state.last_step_index
            and has_more()
        ):
            state, _ = advance(state)
        else:
            return state


# --- serialization -------------------------------------------------------


def event_to_dict(event: SessionEvent) -> dict:
    return {
        "sequence": event.sequence,
        "timestamp": event.timestamp,
        "type": event.type,
        "payload": event.payload,
    }


def event_from_dict(doc: dict) -> SessionEvent:
    try:
        return SessionEvent(
            sequence=int(doc["sequence"]),
            timestamp=str(doc["timestamp"]),
            type=str(doc["type"]),
            payload=dict(doc["payload"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ReplayError(f"malformed event record: {exc}") from exc


def state_to_dict(state: SessionState) -> dict:
    """JSON-ready snapshot of a session (events excluded; they stream separately)."""
    return {
        "id": state.id,
        "activity": activity_to_document(state.activity),
        "context": state.context.narrative,
        "mode": state.mode.value,
        "phase": state.phase.value,
        "current_step": state.current_step,
        "last_step": state.last_step_index,
        "conversation": [
            {"role": m.role, "text": m.text, "ordinal": m.ordinal}
            for m in state.conversation.messages
        ],
        "board": [
            {
                "id": a.id,
                "criterion": a.criterion_key,
                "text": a.text,
                "original_text": a.original_text,
                "origin": a.origin.value,
                "author": a.author,
                "status": a.status.value,
                "cluster_id": a.cluster_id,
            }
            for a in state.board
        ],
        "clusters": [
            {"id": c.id, "label": c.label, "member_ids": list(c.member_ids)}
            for c in state.clusters
        ],
        "hills": [
            {
                "id": h.id,
                "text": h.text,
                "who_refs": list(h.who_refs),
                "what_refs": list(h.what_refs),
                "wow_refs": list(h.wow_refs),
            }
            for h in state.hills
        ],
        "step_commentary": [
            {
                "step": c.step,
                "disclaimers": list(c.disclaimers),
                "unparsed": list(c.unparsed),
            }
            for c in state.step_commentary
        ],
        "pending_human_ids": list(state.pending_human_ids),
        "completed_with_override": state.completed_with_override,
        "last_sequence": len(state.events),
    }
