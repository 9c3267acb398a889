"""Conversational-agent gateway: conversation history plus providers.

Two providers are shipped: a deterministic scripted provider replaying
a stored transcript (tests, golden runs, replays) and a remote provider
speaking the common chat-completion wire shape. The wire is stateless,
so the full history is transmitted on every call.
"""

from __future__ import annotations

import json
import logging
import os
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol, Sequence

import httpx

from .errors import (
    ScriptExhaustedError,
    TranscriptError,
    TransportError,
    ValidationError,
)

logger = logging.getLogger(__name__)

ROLE_SYSTEM = "SYSTEM"
ROLE_FACILITATOR = "FACILITATOR"
ROLE_AGENT = "AGENT"

_WIRE_ROLES = {ROLE_SYSTEM: "system", ROLE_FACILITATOR: "user", ROLE_AGENT: "assistant"}

AGENT_TOKEN_ENV = "CHAI_AGENT_TOKEN"


@dataclass(frozen=True)
class Message:
    role: str
    text: str
    ordinal: int


@dataclass(frozen=True)
class AgentConversation:
    """Append-only message history; roles alternate after any leading SYSTEM."""

    messages: tuple[Message, ...] = ()

    def append(self, role: str, text: str) -> "AgentConversation":
        if role not in _WIRE_ROLES:
            raise ValidationError(f"unknown message role {role!r}")
        if not text:
            raise ValidationError("message text must be non-empty")
        last_role = self.messages[-1].role if self.messages else None
        if role == ROLE_SYSTEM and last_role not in (None, ROLE_SYSTEM):
            raise ValidationError("SYSTEM messages are only allowed at the start")
        if role != ROLE_SYSTEM:
            if last_role in (None, ROLE_SYSTEM) and role != ROLE_FACILITATOR:
                raise ValidationError("conversation must open with a FACILITATOR message")
            if last_role == ROLE_FACILITATOR and role != ROLE_AGENT:
                raise ValidationError("expected an AGENT message after FACILITATOR")
            if last_role == ROLE_AGENT and role != ROLE_FACILITATOR:
                raise ValidationError("expected a FACILITATOR message after AGENT")
        message = Message(role=role, text=text, ordinal=len(self.messages) + 1)
        return AgentConversation(messages=self.messages + (message,))


@dataclass(frozen=True)
class AgentProfile:
    """How a session reaches its agent."""

    provider: str  # "scripted" | "remote" | "manual"
    transcript_path: str | None = None
    endpoint: str | None = None
    model: str | None = None
    temperature: float = 0.0
    timeout_seconds: float = 30.0
    max_retries: int = 2

    def __post_init__(self):
        if self.provider not in ("scripted", "remote", "manual"):
            raise ValidationError(f"unknown agent provider {self.provider!r}")
        if self.timeout_seconds <= 0:
            raise ValidationError("timeout_seconds must be > 0")
        if self.max_retries < 0:
            raise ValidationError("max_retries must be >= 0")
        if self.temperature < 0:
            raise ValidationError("temperature must be >= 0")
        if self.provider == "scripted" and not self.transcript_path:
            raise ValidationError("scripted provider requires a transcript path")
        if self.provider == "remote" and not self.endpoint:
            raise ValidationError("remote provider requires an endpoint")


class AgentProvider(Protocol):
    def complete(self, messages: Sequence[Message]) -> str: ...


class ScriptedAgent:
    """Replays a fixed list of replies in order; deterministic by design."""

    provenance = {"provider": "scripted"}

    def __init__(self, replies: Sequence[str], start_index: int = 0):
        self.replies = tuple(replies)
        self._position = start_index
        self._lock = threading.Lock()

    def complete(self, messages: Sequence[Message]) -> str:
        with self._lock:
            if self._position >= len(self.replies):
                raise ScriptExhaustedError(
                    f"scripted agent exhausted after {len(self.replies)} replies"
                )
            reply = self.replies[self._position]
            self._position += 1
            return reply

    def has_more(self) -> bool:
        with self._lock:
            return self._position < len(self.replies)


def parse_transcript(text: str) -> tuple[str, ...]:
    """Parse transcript text: a JSON list of reply strings."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TranscriptError(f"transcript is not valid JSON: {exc}") from exc
    if not isinstance(data, list) or any(not isinstance(item, str) for item in data):
        raise TranscriptError("transcript must be a JSON list of strings")
    return tuple(data)


def load_transcript(source: str | Path) -> ScriptedAgent:
    """Load a transcript file into a scripted provider."""
    path = Path(source)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise TranscriptError(f"cannot read transcript {path}: {exc}") from exc
    return ScriptedAgent(parse_transcript(text))


def save_transcript(replies: Sequence[str], path: str | Path) -> None:
    """Write a transcript in the canonical form load_transcript reads back."""
    Path(path).write_text(
        json.dumps(list(replies), indent=2, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )


class RemoteAgent:
    """Chat-completion client; sends the whole history on every call."""

    def __init__(self, profile: AgentProfile, client: httpx.Client | None = None):
        if profile.provider != "remote":
            raise ValidationError("RemoteAgent requires a remote profile")
        self.profile = profile
        self._client = client or httpx.Client(timeout=profile.timeout_seconds)

    @property
    def provenance(self) -> dict:
        # Sampling settings go into the event log; live models are not
        # reproducible, but the record shows what was asked of them.
        return {
            "provider": "remote",
            "model": self.profile.model,
            "temperature": self.profile.temperature,
        }

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        token = os.environ.get(AGENT_TOKEN_ENV)
        if token:
            headers["Authorization"] = f"Bearer {token}"
        return headers

    def complete(self, messages: Sequence[Message]) -> str:
        payload = {
            "model": self.profile.model,
            "messages": [
                {"role": _WIRE_ROLES[m.role], "content": m.text} for m in messages
            ],
            "temperature": self.profile.temperature,
        }
        attempts = self.profile.max_retries + 1
        last_error: Exception | None = None
        for attempt in range(attempts):
            if attempt:
                time.sleep(min(2.0, 0.2 * 2**attempt))
            try:
                response = self._client.post(
                    self.profile.endpoint, json=payload, headers=self._headers()
                )
            except httpx.HTTPError as exc:
                last_error = exc
                logger.warning("agent request failed (attempt %d): %s", attempt + 1, exc)
                continue
            if response.status_code >= 500:
                last_error = TransportError(f"agent returned {response.status_code}")
                logger.warning("agent returned %d (attempt %d)", response.status_code, attempt + 1)
                continue
            if response.status_code >= 400:
                raise TransportError(
                    f"agent rejected the request: {response.status_code} {response.text[:200]}"
                )
            return self._extract_reply(response)
        raise TransportError(f"agent unreachable after {attempts} attempts: {last_error}")

    @staticmethod
    def _extract_reply(response: httpx.Response) -> str:
        try:
            body = response.json()
            reply = body["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise TransportError(f"malformed agent response: {exc}") from exc
        if not isinstance(reply, str) or not reply:
            raise TransportError("agent returned an empty reply")
        return reply


def provider_for_profile(profile: AgentProfile, consumed_replies: int = 0) -> AgentProvider | None:
    """Build a provider from a profile; None for manual paste mode.

    consumed_replies fast-forwards a scripted provider so it can be
    rebuilt from a persisted session instead of held in memory.
    """
    if profile.provider == "manual":
        return None
    if profile.provider == "scripted":
        agent = load_transcript(profile.transcript_path)
        return ScriptedAgent(agent.replies, start_index=consumed_replies)
    return RemoteAgent(profile)


def send(
    conversation: AgentConversation,
    outbound: str,
    provider: AgentProvider,
) -> tuple[AgentConversation, str]:
    """Send one facilitator turn and record the agent's reply.

    The conversation grows by exactly two messages, and only after the
    provider succeeded; a failed or retried call leaves it untouched.
    """
    if not outbound or not outbound.strip():
        raise ValidationError("outbound text must be non-empty")
    pending = conversation.append(ROLE_FACILITATOR, outbound)
    reply = provider.complete(pending.messages)
    return pending.append(ROLE_AGENT, reply), reply
