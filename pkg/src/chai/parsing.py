"""Turn free-text agent replies into structured artifact drafts.

Agent replies are classified line by line into three buckets: drafts
(list items), disclaimers (hedging lines such as "Note: these are
just..."), and unparsed residue (headings, prose). Every non-blank
input line lands in exactly one bucket, so nothing is silently lost.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

from .activities import CriterionDefinition
from .errors import ValidationError

# Conservative line-prefix cues; false positives would silently drop ideas.
DEFAULT_DISCLAIMER_CUES = ("these are just", "keep in mind", "please note")

_NUMBERED_RE = re.compile(r"^\d+\.\s+")
_BULLET_RE = re.compile(r"^[-*•]\s+")


@dataclass(frozen=True)
class ArtifactDraft:
    """One sticky-note-sized idea, attributed to a criterion."""

    criterion_key: str
    text: str


@dataclass(frozen=True)
class ParsedResponse:
    drafts: tuple[ArtifactDraft, ...]
    disclaimers: tuple[str, ...]
    unparsed: tuple[str, ...]


def detect_disclaimer(line: str, cues: Sequence[str] | None = None) -> bool:
    """True when the line opens with "note:" or a configured hedging cue."""
    lowered = line.strip().lower()
    if lowered.startswith("note:"):
        return True
    for cue in DEFAULT_DISCLAIMER_CUES if cues is None else cues:
        if lowered.startswith(cue.lower()):
            return True
    return False


def _strip_markers(line: str) -> str:
    # Peel list markers until none remain so draft text never starts
    # with "1.", "-", "*", or "•".
    text = line
    while True:
        m = _NUMBERED_RE.match(text) or _BULLET_RE.match(text)
        if not m:
            return text.strip()
        text = text[m.end():]


def parse_step_response(
    text: str,
    expected_criterion: str,
    cues: Sequence[str] | None = None,
) -> ParsedResponse:
    """Parse a single-step reply; every list item becomes one draft.

    Recognized item styles: numbered ("1. "), bulleted ("- ", "* ",
    "• "), and bare lines that follow an introductory line ending with
    a colon. Plain prose and headings go to unparsed.
    """
    if not expected_criterion:
        raise ValidationError("expected_criterion must be non-empty")
    drafts: list[ArtifactDraft] = []
    disclaimers: list[str] = []
    unparsed: list[str] = []
    in_bare_list = False
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            in_bare_list = False
            continue
        if _NUMBERED_RE.match(line) or _BULLET_RE.match(line):
            content = _strip_markers(line)
            if content:
                drafts.append(ArtifactDraft(criterion_key=expected_criterion, text=content))
            else:
                unparsed.append(line)
        elif detect_disclaimer(line, cues):
            disclaimers.append(line)
        elif line.endswith(":"):
            unparsed.append(line)
            in_bare_list = True
        elif in_bare_list:
            drafts.append(ArtifactDraft(criterion_key=expected_criterion, text=line))
        else:
            unparsed.append(line)
    return ParsedResponse(tuple(drafts), tuple(disclaimers), tuple(unparsed))


def _heading_pattern(criterion: CriterionDefinition) -> re.Pattern[str]:
    # A heading is the label (or key) alone on its line, allowing
    # markdown hashes/emphasis, surrounding quotes, an optional
    # parenthesized annotation, and an optional trailing colon.
    decorations = "[\"'“”‘’*_\\s]*"
    names = "|".join(re.escape(n) for n in {criterion.label, criterion.key})
    return re.compile(
        rf"^\s*(?:#{{1,6}}\s+)?{decorations}(?:{names}){decorations}"
        rf"(?:\([^)]*\))?\s*:?\s*$",
        re.IGNORECASE,
    )


def parse_full_response(
    text: str,
    criteria: Sequence[CriterionDefinition],
    cues: Sequence[str] | None = None,
) -> ParsedResponse:
    """Parse a whole-exercise reply by splitting on criterion headings.

    Each heading opens a section parsed like a step reply for that
    criterion; text before the first heading is unparsed.
    """
    if not criteria:
        raise ValidationError("criteria must be non-empty")
    patterns = [(c.key, _heading_pattern(c)) for c in criteria]

    sections: list[tuple[str | None, list[str]]] = [(None, [])]
    for raw in text.splitlines():
        matched_key = None
        for key, pattern in patterns:
            if pattern.match(raw):
                matched_key = key
                break
        if matched_key is not None:
            sections.append((matched_key, [raw]))
        else:
            sections[-1][1].append(raw)

    drafts: list[ArtifactDraft] = []
    disclaimers: list[str] = []
    unparsed: list[str] = []
    for key, lines in sections:
        if key is None:
            unparsed.extend(line.strip() for line in lines if line.strip())
            continue
        # The heading line rides along: it ends with ":" often enough to
        # enable bare-line items, and lands in unparsed either way.
        part = parse_step_response("\n".join(lines), key, cues)
        drafts.extend(part.drafts)
        disclaimers.extend(part.disclaimers)
        unparsed.extend(part.unparsed)
    return ParsedResponse(tuple(drafts), tuple(disclaimers), tuple(unparsed))


def split_commentary(text: str, cues: Sequence[str] | None = None) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """Split a reply that produces no artifacts into (disclaimers, rest)."""
    disclaimers: list[str] = []
    rest: list[str] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if detect_disclaimer(line, cues):
            disclaimers.append(line)
        else:
            rest.append(line)
    return tuple(disclaimers), tuple(rest)


def render_drafts(drafts: Sequence[ArtifactDraft]) -> str:
    """Render drafts as a numbered list, one per line."""
    if not drafts:
        raise ValidationError("render_drafts requires at least one draft")
    return "\n".join(f"{i}. {draft.text}" for i, draft in enumerate(drafts, start=1))
