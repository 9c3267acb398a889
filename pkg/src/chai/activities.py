"""Design Thinking activity definitions: domain types, validation, the
JSON file format, and the built-in Hills exercise.

An activity bundles everything that stays fixed across sessions: the
explanation of the exercise, exemplar end-state artifacts, the ordered
step list, and the criteria its artifacts are filed under.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from .errors import ActivityParseError, ActivityValidationError

_CRITERION_KEY_RE = re.compile(r"^[a-z0-9][a-z0-9-]*$")


@dataclass(frozen=True)
class CriterionDefinition:
    """One board column: a short key plus its display label."""

    key: str
    label: str
    description: str = ""


@dataclass(frozen=True)
class StepDefinition:
    """A single numbered instruction of the exercise.

    produces_criterion names the criterion this step's artifacts belong
    to; steps that yield free-form discussion instead of board items
    leave it unset.
    """

    index: int
    instruction_text: str
    produces_criterion: str | None = None


@dataclass(frozen=True)
class ActivityDefinition:
    name: str
    definition_text: str
    examples: tuple[str, ...]
    steps: tuple[StepDefinition, ...]
    criteria: tuple[CriterionDefinition, ...]

    def criterion_keys(self) -> tuple[str, ...]:
        return tuple(c.key for c in self.criteria)

    def criterion(self, key: str) -> CriterionDefinition | None:
        for c in self.criteria:
            if c.key == key:
                return c
        return None


def validate_activity(definition: ActivityDefinition) -> list[str]:
    """Return every invariant violation, empty list if the definition is valid."""
    violations: list[str] = []
    if not definition.name.strip():
        violations.append("name: must be non-empty")
    if not definition.examples:
        violations.append("examples: at least one required")
    if not definition.steps:
        violations.append("steps: at least one required")

    seen_keys: set[str] = set()
    for i, criterion in enumerate(definition.criteria):
        if not criterion.key:
            violations.append(f"criteria[{i}].key: must be non-empty")
        elif not _CRITERION_KEY_RE.match(criterion.key):
            violations.append(
                f"criteria[{i}].key: must be lowercase alphanumeric-plus-hyphen,"
                f" got {criterion.key!r}"
            )
        if criterion.key in seen_keys:
            violations.append(f"criteria[{i}]: duplicate key {criterion.key!r}")
        seen_keys.add(criterion.key)
        if not criterion.label.strip():
            violations.append(f"criteria[{i}].label: must be non-empty")

    indices = [s.index for s in definition.steps]
    if definition.steps and indices != list(range(1, len(indices) + 1)):
        violations.append(
            f"steps: non-contiguous indices {indices} (expected 1..{len(indices)})"
        )
    for step in definition.steps:
        if step.produces_criterion is not None and step.produces_criterion not in seen_keys:
            violations.append(
                f"steps[{step.index}]: unknown criterion {step.produces_criterion!r}"
            )
    return violations


def activity_to_document(definition: ActivityDefinition) -> dict:
    """Build the plain-dict form used by the JSON file format."""
    steps = []
    for step in definition.steps:
        entry: dict = {"index": step.index, "instruction": step.instruction_text}
        if step.produces_criterion is not None:
            entry["produces_criterion"] = step.produces_criterion
        steps.append(entry)
    return {
        "name": definition.name,
        "definition": definition.definition_text,
        "examples": list(definition.examples),
        "criteria": [
            {"key": c.key, "label": c.label, "description": c.description}
            for c in definition.criteria
        ],
        "steps": steps,
    }


def serialize_activity(definition: ActivityDefinition) -> str:
    """Canonical serialization: 2-space indent, fixed key order, LF, trailing newline."""
    return json.dumps(activity_to_document(definition), indent=2, ensure_ascii=False) + "\n"


def _expect(doc: dict, field: str, kind: type, where: str) -> object:
    if field not in doc:
        raise ActivityParseError(f"{where}: missing field {field!r}")
    value = doc[field]
    if not isinstance(value, kind) or isinstance(value, bool):
        raise ActivityParseError(f"{where}.{field}: expected {kind.__name__}")
    return value


def activity_from_document(doc: dict) -> ActivityDefinition:
    """Build and validate an ActivityDefinition from its dict form.

    Raises ActivityParseError for shape problems and
    ActivityValidationError (listing every violation) for invariant ones.
    """
    if not isinstance(doc, dict):
        raise ActivityParseError("activity document must be a JSON object")
    name = _expect(doc, "name", str, "activity")
    definition = _expect(doc, "definition", str, "activity")
    raw_examples = _expect(doc, "examples", list, "activity")
    raw_criteria = _expect(doc, "criteria", list, "activity")
    raw_steps = _expect(doc, "steps", list, "activity")

    examples = []
    for i, example in enumerate(raw_examples):
        if not isinstance(example, str):
            raise ActivityParseError(f"examples[{i}]: expected str")
        examples.append(example)

    criteria = []
    for i, entry in enumerate(raw_criteria):
        if not isinstance(entry, dict):
            raise ActivityParseError(f"criteria[{i}]: expected object")
        criteria.append(
            CriterionDefinition(
                key=str(_expect(entry, "key", str, f"criteria[{i}]")),
                label=str(_expect(entry, "label", str, f"criteria[{i}]")),
                description=str(entry.get("description", "")),
            )
        )

    steps = []
    for i, entry in enumerate(raw_steps):
        if not isinstance(entry, dict):
            raise ActivityParseError(f"steps[{i}]: expected object")
        index = _expect(entry, "index", int, f"steps[{i}]")
        produces = entry.get("produces_criterion")
        if produces is not None and not isinstance(produces, str):
            raise ActivityParseError(f"steps[{i}].produces_criterion: expected str")
        steps.append(
            StepDefinition(
                index=int(index),
                instruction_text=str(_expect(entry, "instruction", str, f"steps[{i}]")),
                produces_criterion=produces,
            )
        )

    result = ActivityDefinition(
        name=str(name),
        definition_text=str(definition),
        examples=tuple(examples),
        steps=tuple(steps),
        criteria=tuple(criteria),
    )
    violations = validate_activity(result)
    if violations:
        raise ActivityValidationError(violations)
    return result


def load_activity(document: str) -> ActivityDefinition:
    """Parse an activity file's text into a validated definition."""
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ActivityParseError(f"activity document is not valid JSON: {exc}") from exc
    return activity_from_document(doc)


# --- built-in Hills activity --------------------------------------------

_HILLS_DEFINITION = (
    "A Hill is a user-centered statements of intent that the entire team can rally"
    " around – so that everyone is pulling in the same direction. Hills describe"
    " something a specific user is enabled to do, not a specific implementation."
    " They give teams the creative space they need to come to breakthrough ideas,"
    " without the need for detailed requirements. Write Hills at the beginning of a"
    " project or initiative, after you’ve identified the real needs of your users."
    " Think of it as a team mission statement. The practice of Hills ensures that"
    " our entire team is aligned around doing what’s right for the user. They’re"
    " about keeping all of our teammates — across disciplines, oceans, and timezones"
    " — working in sync on the best experience for the user."
    "\n\n"
    "A hill is a written statement that the team writes and agrees upon together."
    " They’re fairly straightforward with three parts:"
    "\n\n"
    "The who is very clear and specific on the type of user that we are focusing"
    " on, so that could be a tech seller or a business analyst or an HR manager."
    "\n\n"
    "The what is the second part. We’ve referred to these before as a user"
    " enablement. This is a specific task, or a specific thing that the user will"
    " be able to get done or will be able to accomplish. The what for a hill may"
    " talk about being able to deploy or being able to create something or be able"
    " to run some sort of analysis. So the what is a specific enablement that the"
    " user, mentioned in your who, is able to do."
    "\n\n"
    "And last but not least, a hill includes a wow - who, what, wow. This is a"
    " specific market value or differentiating statement. It extends the what into"
    " that territory of absolute delight that we know that is required of all of"
    " our work with users these days. If you were to read your hill to a sponsor"
    " user, which you should, their reaction should be “YES. I want that. I need"
    " that. When can I have that?”"
    "\n\n"
    "So three parts to every hill: a who, a what and a wow."
)

_HILLS_EXAMPLE = (
    'Example of a good Hill Statement: "Within selected product categories,'
    " requestors can find product matches for their search queries using natural,"
    ' English-language conversation."'
)

_HILLS_STEPS: tuple[tuple[str, str | None], ...] = (
    ("Create the list “Who”", "who"),
    ("Create the list “What”", "what"),
    ("Create the list “Wow.”", "wow"),
    (
        "Diverge on many ideas for each section and quickly share them with your"
        " teammates. Build off of others’ ideas, but focus on quantity over quality"
        " and avoid drifting into features or talking about implementation details.",
        None,
    ),
    ("Build your hill statement(s) using your ideas for “Who,” “What,” and “Wow.”", None),
)


def builtin_hills() -> ActivityDefinition:
    """The built-in Hills exercise: three criteria, five steps, one exemplar."""
    return ActivityDefinition(
        name="Hills",
        definition_text=_HILLS_DEFINITION,
        examples=(_HILLS_EXAMPLE,),
        steps=tuple(
            StepDefinition(index=i, instruction_text=text, produces_criterion=criterion)
            for i, (text, criterion) in enumerate(_HILLS_STEPS, start=1)
        ),
        criteria=(
            CriterionDefinition(
                key="who",
                label="Who",
                description="The specific type of user the solution focuses on.",
            ),
            CriterionDefinition(
                key="what",
                label="What",
                description="The enablement those users gain.",
            ),
            CriterionDefinition(
                key="wow",
                label="Wow",
                description="The differentiating value or impact delivered.",
            ),
        ),
    )


def builtin_activities() -> dict[str, ActivityDefinition]:
    """Registry of shipped activities keyed by their CLI/API id."""
    return {"hills": builtin_hills()}
