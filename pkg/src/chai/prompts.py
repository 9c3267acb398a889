"""Deterministic composition of the six-segment facilitation prompt.

Four segments come from the activity (introduction, definition,
examples, instructions) and two from the session (context, execute).
Rendering is a pure function of its inputs so composed prompts can be
compared byte-for-byte.
"""

from __future__ import annotations

from dataclasses import dataclass

from .activities import ActivityDefinition
from .errors import ValidationError

SEGMENT_KINDS = ("introduction", "definition", "examples", "instructions", "context", "execute")

SCOPE_FULL = "FULL"
SCOPE_STEP = "STEP"


@dataclass(frozen=True)
class SessionContext:
    """Free-text background for one session: why we co-create, who is involved."""

    narrative: str

    def __post_init__(self):
        if not self.narrative.strip():
            raise ValidationError("context: narrative must be non-empty")


@dataclass(frozen=True)
class ExecuteDirective:
    """The final instruction: run everything, or run one step."""

    scope: str
    step_index: int | None
    text: str

    def __post_init__(self):
        if self.scope not in (SCOPE_FULL, SCOPE_STEP):
            raise ValidationError(f"directive: unknown scope {self.scope!r}")
        if self.scope == SCOPE_STEP and (self.step_index is None or self.step_index < 1):
            raise ValidationError("directive: STEP scope requires a positive step index")
        if not self.text.strip():
            raise ValidationError("directive: text must be non-empty")


@dataclass(frozen=True)
class PromptSegment:
    kind: str
    text: str


@dataclass(frozen=True)
class ComposedPrompt:
    segments: tuple[PromptSegment, ...]
    full_text: str


def _canonical_block(text: str) -> str:
    # Whitespace canon: LF newlines, no trailing whitespace on lines,
    # no blank lines at either end of a block.
    lines = text.replace("\r\n", "\n").replace("\r", "\n").split("\n")
    return "\n".join(line.rstrip() for line in lines).strip("\n")


def _join_blocks(blocks: list[str]) -> str:
    # Exactly one blank line between blocks, single trailing newline.
    return "\n\n".join(blocks) + "\n"


def render_full_text(prompt: ComposedPrompt) -> str:
    """Render a prompt's segments to canonical text (idempotent)."""
    return _join_blocks([_canonical_block(s.text) for s in prompt.segments])


def _article(name: str) -> str:
    return "an" if name[:1].lower() in "aeiou" else "a"


def make_step_directive(activity: ActivityDefinition, index: int) -> ExecuteDirective:
    """Directive to perform one step.

    The first turn carries the context lead-in; later steps drop it
    because the context was already sent.
    """
    if not 1 <= index <= len(activity.steps):
        raise ValidationError(
            f"step index {index} out of range 1..{len(activity.steps)}"
        )
    if index == 1:
        text = f"Given the above context, perform Step {index} of the exercise."
    else:
        text = f"Perform Step {index} of the exercise."
    return ExecuteDirective(scope=SCOPE_STEP, step_index=index, text=text)


def make_full_run_directive(activity: ActivityDefinition) -> ExecuteDirective:
    """Directive to perform the whole exercise in one turn."""
    text = f"Given the above context, perform the entire {activity.name} exercise."
    return ExecuteDirective(scope=SCOPE_FULL, step_index=None, text=text)


def _examples_segment(activity: ActivityDefinition) -> str:
    # A single example block already reads as a complete sentence and is
    # emitted verbatim; multiple examples get a heading and numbering.
    if len(activity.examples) == 1:
        return activity.examples[0]
    numbered = [f"{i}. {example}" for i, example in enumerate(activity.examples, start=1)]
    return "Examples of ideal outcomes:\n" + "\n\n".join(numbered)


def compose_initial_prompt(
    activity: ActivityDefinition,
    context: SessionContext,
    directive: ExecuteDirective,
) -> ComposedPrompt:
    """Compose the six-segment prompt that opens a session."""
    if directive.scope == SCOPE_STEP and not 1 <= directive.step_index <= len(activity.steps):
        raise ValidationError(
            f"directive out of range: step {directive.step_index} of"
            f" {len(activity.steps)}"
        )
    introduction = (
        f'We are conducting {_article(activity.name)} "{activity.name}"'
        " Design Thinking exercise."
    )
    instructions = "Instructions for this activity:\n" + "\n".join(
        f"{step.index}. {step.instruction_text}" for step in activity.steps
    )
    texts = (
        introduction,
        "Activity Explanation:\n" + activity.definition_text,
        _examples_segment(activity),
        instructions,
        "Relevant Activity Context:\n" + context.narrative,
        directive.text,
    )
    segments = tuple(
        PromptSegment(kind=kind, text=_canonical_block(text))
        for kind, text in zip(SEGMENT_KINDS, texts)
    )
    return ComposedPrompt(
        segments=segments,
        full_text=_join_blocks([s.text for s in segments]),
    )
