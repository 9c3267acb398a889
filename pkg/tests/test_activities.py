import json

import pytest

from chai.activities import (
    ActivityDefinition,
    CriterionDefinition,
    StepDefinition,
    activity_to_document,
    builtin_hills,
    load_activity,
    serialize_activity,
    validate_activity,
)
from chai.errors import ActivityParseError, ActivityValidationError


def make_activity(**overrides) -> ActivityDefinition:
    base = dict(
        name="Probe",
        definition_text="Explain the exercise.",
        examples=("One good outcome.",),
        steps=(StepDefinition(1, "Do the thing", "only"),),
        criteria=(CriterionDefinition("only", "Only"),),
    )
    base.update(overrides)
    return ActivityDefinition(**base)


def test_builtin_hills_shape():
    hills = builtin_hills()
    assert len(hills.steps) == 5
    assert len(hills.criteria) == 3
    assert len(hills.examples) == 1
    assert hills.criterion_keys() == ("who", "what", "wow")


def test_builtin_hills_step_criteria():
    hills = builtin_hills()
    assert hills.steps[0].produces_criterion == "who"
    assert hills.steps[1].produces_criterion == "what"
    assert hills.steps[2].produces_criterion == "wow"
    assert hills.steps[3].produces_criterion is None
    assert hills.steps[4].produces_criterion is None


def test_builtin_hills_deterministic():
    assert builtin_hills() == builtin_hills()


def test_builtin_hills_validates():
    assert validate_activity(builtin_hills()) == []


def test_serialize_load_round_trip():
    hills = builtin_hills()
    assert load_activity(serialize_activity(hills)) == hills


def test_serialize_is_canonical():
    text = serialize_activity(builtin_hills())
    assert text.endswith("\n")
    assert "\r" not in text
    reloaded = load_activity(text)
    assert serialize_activity(reloaded) == text
    doc = json.loads(text)
    assert list(doc) == ["name", "definition", "examples", "criteria", "steps"]


def test_load_rejects_malformed_json():
    with pytest.raises(ActivityParseError):
        load_activity("{not json")


def test_load_rejects_missing_field():
    doc = activity_to_document(builtin_hills())
    del doc["steps"]
    with pytest.raises(ActivityParseError, match="missing field 'steps'"):
        load_activity(json.dumps(doc))


def test_load_rejects_non_contiguous_steps():
    doc = activity_to_document(make_activity())
    doc["steps"] = [
        {"index": 1, "instruction": "a"},
        {"index": 3, "instruction": "b"},
    ]
    with pytest.raises(ActivityValidationError, match="non-contiguous"):
        load_activity(json.dumps(doc))


def test_load_rejects_duplicate_criterion_key():
    doc = activity_to_document(make_activity())
    doc["criteria"] = [
        {"key": "who", "label": "Who", "description": ""},
        {"key": "who", "label": "Who again", "description": ""},
    ]
    doc["steps"] = [{"index": 1, "instruction": "a", "produces_criterion": "who"}]
    with pytest.raises(ActivityValidationError, match="duplicate key 'who'"):
        load_activity(json.dumps(doc))


def test_validate_reports_all_violations_at_once():
    bad = make_activity(
        name="  ",
        examples=(),
        steps=(
            StepDefinition(1, "a", "only"),
            StepDefinition(3, "b", "ghost"),
        ),
    )
    violations = validate_activity(bad)
    joined = "\n".join(violations)
    assert "name: must be non-empty" in joined
    assert "examples: at least one required" in joined
    assert "non-contiguous" in joined
    assert "steps[3]: unknown criterion 'ghost'" in joined
    assert len(violations) == 4


def test_validate_empty_examples():
    assert validate_activity(make_activity(examples=())) == [
        "examples: at least one required"
    ]


def test_validate_unknown_step_criterion_names_the_step():
    bad = make_activity(
        steps=(
            StepDefinition(1, "a", "only"),
            StepDefinition(2, "b", "only"),
            StepDefinition(3, "c", "wowow"),
        )
    )
    assert validate_activity(bad) == ["steps[3]: unknown criterion 'wowow'"]


def test_validate_criterion_key_charset():
    bad = make_activity(
        criteria=(CriterionDefinition("Who!", "Who"),),
        steps=(StepDefinition(1, "a", None),),
    )
    violations = validate_activity(bad)
    assert any("lowercase alphanumeric" in v for v in violations)


def test_loaded_activities_always_validate():
    # load_activity only returns definitions that validate cleanly
    hills = load_activity(serialize_activity(builtin_hills()))
    assert validate_activity(hills) == []
