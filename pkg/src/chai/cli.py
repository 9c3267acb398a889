"""Headless facilitator CLI.

Every command maps to exactly one engine or store operation; all
formatting is plain, line-oriented text so sessions can be driven by
scripts. Exit codes: 0 ok, 1 agent transport failure, 2 validation or
state conflict.
"""

from __future__ import annotations

import sys
from contextlib import contextmanager
from pathlib import Path

import click

from . import session as engine
from .activities import builtin_activities, load_activity, serialize_activity
from .agents import provider_for_profile
from .config import ServiceConfig, load_config
from .errors import AgentError, ChaiError, UnknownEntityError, WrongPhaseError
from .exports import export_session
from .prompts import SessionContext
from .session import Mode, Phase, SessionState, replay
from .store import SessionStore


@contextmanager
def engine_errors():
    try:
        yield
    except AgentError as exc:
        click.echo(f"error: {exc}", err=True)
        raise SystemExit(1)
    except ChaiError as exc:
        click.echo(f"error: {exc}", err=True)
        raise SystemExit(2)


def _resolve_activity(ref: str):
    registry = builtin_activities()
    if ref in registry:
        return registry[ref]
    path = Path(ref)
    if path.exists():
        return load_activity(path.read_text(encoding="utf-8"))
    raise UnknownEntityError(f"unknown activity {ref!r} (not a builtin, not a file)")


def _render_board(state: SessionState) -> str:
    labels = {c.id: c.label for c in state.clusters}
    lines = []
    for criterion in state.activity.criteria:
        lines.append(f"{criterion.label}:")
        for artifact in state.board:
            if artifact.criterion_key != criterion.key:
                continue
            origin = "agent" if artifact.author is None else f"human:{artifact.author}"
            suffix = ""
            if artifact.cluster_id:
                suffix = f" {{cluster: {labels.get(artifact.cluster_id, artifact.cluster_id)}}}"
            lines.append(
                f"  {artifact.id} [{artifact.status.value}] ({origin}) {artifact.text}{suffix}"
            )
    if state.hills:
        lines.append("Hills:")
        for hill in state.hills:
            lines.append(f"  {hill.id} {hill.text}")
    return "\n".join(lines)


@click.group()
@click.option("--config", "config_path", type=click.Path(), default=None, help="Config file path.")
@click.option("--data-dir", type=click.Path(), default=None, help="Override the data directory.")
@click.pass_context
def main(ctx: click.Context, config_path: str | None, data_dir: str | None):
    """Facilitate Design Thinking sessions with a conversational agent."""
    with engine_errors():
        config = load_config(config_path)
    if data_dir:
        config.data_dir = Path(data_dir)
    ctx.obj = config


def _store(ctx: click.Context) -> SessionStore:
    return SessionStore(ctx.obj.data_dir)


@main.group()
def activities():
    """Inspect available activity definitions."""


@activities.command("list")
def activities_list():
    for key, activity in builtin_activities().items():
        criteria = ", ".join(c.key for c in activity.criteria)
        click.echo(f"{key}: {activity.name} [{len(activity.steps)} steps; criteria: {criteria}]")


@activities.command("show")
@click.argument("name")
def activities_show(name: str):
    with engine_errors():
        activity = _resolve_activity(name)
    click.echo(serialize_activity(activity), nl=False)


@main.command()
@click.option("--activity", "activity_ref", required=True, help="Builtin id or activity file path.")
@click.option("--context", "context_file", required=True, type=click.Path(exists=True))
@click.option("--mode", type=click.Choice(["stepwise", "full"]), default="stepwise")
@click.option("--agent", "agent_spec", default="manual", help="manual, remote, or scripted:FILE.")
@click.pass_context
def run(ctx, activity_ref: str, context_file: str, mode: str, agent_spec: str):
    """Create a session, print its opening prompt, and drive agent turns."""
    config: ServiceConfig = ctx.obj
    with engine_errors():
        activity = _resolve_activity(activity_ref)
        context = SessionContext(Path(context_file).read_text(encoding="utf-8").strip())
        profile = config.agent_profile(agent_spec)
        store = _store(ctx)
        state, outbound = store.create(
            activity,
            context,
            Mode.STEPWISE if mode == "stepwise" else Mode.FULL_RUN,
            agent=agent_spec,
        )
    click.echo(outbound, nl=False)
    click.echo(f"session: {state.id}")
    provider = provider_for_profile(profile)
    if provider is None:
        return
    with engine_errors():
        state = store.mutate(
            state.id, lambda s: engine.drive(s, provider, config.disclaimer_cues)
        )
    click.echo(f"phase: {state.phase.value}; artifacts: {len(state.board)}")


@main.command()
@click.option("--session", "session_id", required=True)
@click.option("--file", "reply_file", required=True, type=click.Path(exists=True))
@click.pass_context
def respond(ctx, session_id: str, reply_file: str):
    """Paste an agent reply obtained outside this tool (manual mode)."""
    config: ServiceConfig = ctx.obj
    text = Path(reply_file).read_text(encoding="utf-8")
    with engine_errors():
        state = _store(ctx).mutate(
            session_id,
            lambda s: engine.apply_agent_response(s, text, config.disclaimer_cues),
        )
    recorded = state.events[-1].payload["artifacts"]
    click.echo(f"recorded {len(recorded)} artifacts; phase: {state.phase.value}")


@main.command()
@click.option("--session", "session_id", required=True)
@click.pass_context
def board(ctx, session_id: str):
    """Print the artifact board with review statuses."""
    with engine_errors():
        state = _store(ctx).load(session_id)
    click.echo(_render_board(state))


@main.command()
@click.option("--session", "session_id", required=True)
@click.pass_context
def advance(ctx, session_id: str):
    """Send the next step directive (and run the agent turn if wired)."""
    config: ServiceConfig = ctx.obj
    store = _store(ctx)
    with engine_errors():
        profile = config.agent_profile(store.agent_spec(session_id))

        def step(state: SessionState) -> SessionState:
            provider = None
            if profile.provider != "manual":
                consumed = sum(1 for m in state.conversation.messages if m.role == "AGENT")
                provider = provider_for_profile(profile, consumed_replies=consumed)
            if state.phase == Phase.AWAITING_AGENT:
                if provider is None:
                    raise WrongPhaseError("session awaits a pasted agent response (use respond)")
                return engine.run_pending_turn(state, provider, config.disclaimer_cues)
            state, _ = engine.advance(state)
            if provider is not None:
                state = engine.run_pending_turn(state, provider, config.disclaimer_cues)
            return state

        state = store.mutate(session_id, step)
    click.echo(f"step: {state.current_step}; phase: {state.phase.value}")
    if state.phase == Phase.AWAITING_AGENT:
        click.echo(state.conversation.messages[-1].text)


@main.command()
@click.option("--session", "session_id", required=True)
@click.option("--artifact", "artifact_id", required=True)
@click.option("--accept", "decision", flag_value="ACCEPT")
@click.option("--reject", "decision", flag_value="REJECT")
@click.option("--amend", "amend_text", default=None, help="Replacement text.")
@click.pass_context
def review(ctx, session_id: str, artifact_id: str, decision: str | None, amend_text: str | None):
    """Accept, reject, or amend one artifact."""
    if amend_text is not None:
        decision = "AMEND"
    if decision is None:
        click.echo("error: one of --accept, --reject, --amend TEXT is required", err=True)
        raise SystemExit(2)
    with engine_errors():
        state = _store(ctx).mutate(
            session_id,
            lambda s: engine.review_artifact(s, artifact_id, decision, amend_text),
        )
    artifact = state.artifact(artifact_id)
    click.echo(f"{artifact.id} [{artifact.status.value}] {artifact.text}")


@main.command()
@click.option("--session", "session_id", required=True)
@click.option("--criterion", required=True)
@click.option("--text", required=True)
@click.option("--author", required=True)
@click.pass_context
def add(ctx, session_id: str, criterion: str, text: str, author: str):
    """Add a human participant's artifact."""
    with engine_errors():
        state = _store(ctx).mutate(
            session_id,
            lambda s: engine.submit_human_artifact(s, criterion, text, author),
        )
    click.echo(f"added {state.board[-1].id}")


@main.command()
@click.option("--session", "session_id", required=True)
@click.option("--label", required=True)
@click.option("--artifacts", "artifact_ids", required=True, help="Comma-separated artifact ids.")
@click.pass_context
def cluster(ctx, session_id: str, label: str, artifact_ids: str):
    """Assign artifacts to a labeled cluster."""
    ids = [part.strip() for part in artifact_ids.split(",") if part.strip()]
    with engine_errors():
        state = _store(ctx).mutate(session_id, lambda s: engine.assign_cluster(s, ids, label))
    assigned = state.cluster_by_label(label.strip())
    click.echo(f"cluster {assigned.id} '{assigned.label}': {len(assigned.member_ids)} members")


@main.command()
@click.option("--session", "session_id", required=True)
@click.option("--who", required=True, help="Comma-separated accepted who artifact ids.")
@click.option("--what", required=True, help="Comma-separated accepted what artifact ids.")
@click.option("--wow", required=True, help="Comma-separated accepted wow artifact ids.")
@click.option("--text", required=True)
@click.pass_context
def hill(ctx, session_id: str, who: str, what: str, wow: str, text: str):
    """Compose a Hill statement from accepted artifacts."""
    split = lambda s: [p.strip() for p in s.split(",") if p.strip()]
    with engine_errors():
        state = _store(ctx).mutate(
            session_id,
            lambda s: engine.compose_hill(s, split(who), split(what), split(wow), text),
        )
    click.echo(f"hill {state.hills[-1].id} recorded")


@main.command()
@click.option("--session", "session_id", required=True)
@click.option("--override", is_flag=True, default=False)
@click.pass_context
def complete(ctx, session_id: str, override: bool):
    """Mark the session complete (read-only afterwards)."""
    with engine_errors():
        state = _store(ctx).mutate(session_id, lambda s: engine.complete(s, override=override))
    click.echo(f"phase: {state.phase.value}")


@main.command()
@click.option("--session", "session_id", required=True)
@click.option("--format", "export_format", type=click.Choice(["md", "csv"]), default="md")
@click.option("--out", "out_file", type=click.Path(), default=None)
@click.pass_context
def export(ctx, session_id: str, export_format: str, out_file: str | None):
    """Export the board as markdown or CSV."""
    with engine_errors():
        document = export_session(_store(ctx).load(session_id), export_format)
    if out_file:
        Path(out_file).write_bytes(document.content)
        click.echo(f"wrote {out_file}")
    else:
        sys.stdout.write(document.text)


@main.command("replay")
@click.option("--log", "log_file", required=True, type=click.Path(exists=True))
def replay_log(log_file: str):
    """Verify an event log and print the board it folds to."""
    import json as _json

    from .session import event_from_dict

    with engine_errors():
        events = []
        with open(log_file, encoding="utf-8") as handle:
            for line in handle:
                if line.strip():
                    events.append(event_from_dict(_json.loads(line)))
        state = replay(events, session_id=Path(log_file).stem)
    click.echo(f"events: {len(events)} ok; artifacts: {len(state.board)}")
    click.echo(_render_board(state))


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=8800, type=int)
@click.option("--console", "console_dir", type=click.Path(), default=None,
              help="Static directory to serve at /console.")
@click.pass_context
def serve(ctx, host: str, port: int, console_dir: str | None):
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    app = create_app(ctx.obj, console_dir=console_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")


if __name__ == "__main__":
    main()
