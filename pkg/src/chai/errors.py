"""Error taxonomy shared by the engine, service, and CLI.

The split mirrors how callers react: validation failures are client
mistakes (HTTP 422, CLI exit 2), conflicts are attempts to act on a
session or artifact that is in the wrong state (HTTP 409), unknown
entities map to 404, and agent failures are transport-level (HTTP 502,
CLI exit 1).
"""

from __future__ import annotations


class ChaiError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(ChaiError):
    """Input violates a declared invariant or precondition."""


class ActivityParseError(ValidationError):
    """Activity document is not well-formed (bad JSON or bad shape)."""


class ActivityValidationError(ValidationError):
    """Activity document parsed but violates invariants.

    Carries every violation, not just the first.
    """

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class UnknownEntityError(ChaiError):
    """Referenced session, artifact, cluster, or activity does not exist."""


class ConflictError(ChaiError):
    """Operation is not allowed in the entity's current state."""


class WrongPhaseError(ConflictError):
    """Session is not in the phase the operation requires."""


class TerminalStatusError(ConflictError):
    """Artifact already reached a terminal review status."""


class ReplayError(ValidationError):
    """Event log is malformed: gap, unknown event, or missing start."""


class AgentError(ChaiError):
    """Base class for conversational-agent failures."""


class TransportError(AgentError):
    """Remote provider unreachable or returned a malformed response."""


class ScriptExhaustedError(AgentError):
    """Scripted provider has no replies left."""


class TranscriptError(ValidationError):
    """Transcript source is malformed."""
