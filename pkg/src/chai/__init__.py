"""Facilitation toolkit for running Design Thinking sessions with a
conversational generative agent: prompt composition, reply parsing, an
event-sourced session engine, persistence, HTTP service, and CLI.
"""

from .activities import (
    ActivityDefinition,
    CriterionDefinition,
    StepDefinition,
    builtin_activities,
    builtin_hills,
    load_activity,
    serialize_activity,
    validate_activity,
)
from .agents import (
    AgentConversation,
    AgentProfile,
    Message,
    RemoteAgent,
    ScriptedAgent,
    load_transcript,
    save_transcript,
    send,
)
from .exports import ExportDocument, export_session
from .parsing import (
    ArtifactDraft,
    ParsedResponse,
    detect_disclaimer,
    parse_full_response,
    parse_step_response,
    render_drafts,
)
from .prompts import (
    ComposedPrompt,
    ExecuteDirective,
    SessionContext,
    compose_initial_prompt,
    make_full_run_directive,
    make_step_directive,
    render_full_text,
)
from .session import (
    Artifact,
    Cluster,
    HillStatement,
    Mode,
    Phase,
    SessionEvent,
    SessionState,
    Status,
    advance,
    apply_agent_response,
    assign_cluster,
    complete,
    compose_hill,
    replay,
    review_artifact,
    start_session,
    submit_human_artifact,
)
from .store import SessionStore

__version__ = "0.1.0"
