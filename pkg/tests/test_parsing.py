import re

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chai.activities import CriterionDefinition
from chai.errors import ValidationError
from chai.parsing import (
    ArtifactDraft,
    detect_disclaimer,
    parse_full_response,
    parse_step_response,
    render_drafts,
    split_commentary,
)

WHO = CriterionDefinition("who", "Who")
WHAT = CriterionDefinition("what", "What")
WOW = CriterionDefinition("wow", "Wow")


# -- independent reference oracle (kept deliberately simple-minded) --------
# Splits a full-exercise reply into (criterion, item) pairs using only
# string operations; the real parser must agree with it on plain inputs.


def reference_split(text: str, criteria) -> list[tuple[str, str]]:
    current = None
    items = []
    for raw in text.splitlines():
        stripped = raw.strip().strip(":").strip().strip('"').strip("*_").strip()
        matched = None
        for criterion in criteria:
            if stripped.lower() in (criterion.label.lower(), criterion.key.lower()):
                matched = criterion.key
        if matched:
            current = matched
            continue
        m = re.match(r"^\s*(?:\d+\.|[-*•])\s+(.*\S)\s*$", raw)
        if m and current:
            items.append((current, m.group(1)))
    return items


def drafts_as_pairs(parsed):
    return [(d.criterion_key, d.text) for d in parsed.drafts]


# -- step parsing -----------------------------------------------------------


def test_numbered_items_become_drafts():
    parsed = parse_step_response("1. Retail store managers\n2. Inventory managers", "who")
    assert drafts_as_pairs(parsed) == [
        ("who", "Retail store managers"),
        ("who", "Inventory managers"),
    ]
    assert parsed.disclaimers == ()
    assert parsed.unparsed == ()


def test_trailing_note_is_a_disclaimer_not_a_draft():
    note = (
        "Note: These are just some potential users, and the team may need to"
        " further refine the list based on their research and understanding of"
        " the user needs."
    )
    parsed = parse_step_response(f"1. Retail store managers\n\n{note}", "who")
    assert len(parsed.drafts) == 1
    assert parsed.disclaimers == (note,)


def test_empty_input_yields_empty_partition():
    parsed = parse_step_response("", "who")
    assert parsed.drafts == ()
    assert parsed.disclaimers == ()
    assert parsed.unparsed == ()


def test_minimal_bullets():
    parsed = parse_step_response("- A\n- B\n- C", "who")
    assert [d.text for d in parsed.drafts] == ["A", "B", "C"]


def test_unicode_bullet_and_star():
    parsed = parse_step_response("• A\n* B", "who")
    assert [d.text for d in parsed.drafts] == ["A", "B"]


def test_bare_lines_under_colon_intro():
    parsed = parse_step_response("Here are the users:\nManagers\nClerks", "who")
    assert [d.text for d in parsed.drafts] == ["Managers", "Clerks"]
    assert parsed.unparsed == ("Here are the users:",)


def test_bare_lines_without_intro_are_unparsed():
    parsed = parse_step_response("Managers\nClerks", "who")
    assert parsed.drafts == ()
    assert parsed.unparsed == ("Managers", "Clerks")


def test_blank_line_ends_bare_list_mode():
    parsed = parse_step_response("Users:\nManagers\n\nSome closing prose", "who")
    assert [d.text for d in parsed.drafts] == ["Managers"]
    assert "Some closing prose" in parsed.unparsed


def test_mixed_multi_sentence_item_stays_one_draft():
    text = "1. Managers. They run stores.\n2. Clerks"
    parsed = parse_step_response(text, "who")
    assert [d.text for d in parsed.drafts] == ["Managers. They run stores.", "Clerks"]


def test_marker_only_line_is_unparsed():
    parsed = parse_step_response("1. \n2. Real item", "who")
    assert [d.text for d in parsed.drafts] == ["Real item"]
    assert parsed.unparsed == ("1.",)


def test_nested_markers_fully_stripped():
    parsed = parse_step_response("1. - Managers", "who")
    assert parsed.drafts == (ArtifactDraft("who", "Managers"),)


def test_requires_criterion():
    with pytest.raises(ValidationError):
        parse_step_response("1. A", "")


# -- disclaimers ------------------------------------------------------------


def test_detect_disclaimer_paper_pattern():
    assert detect_disclaimer(
        "Note: These are just some potential users, and the team may need to"
        " further refine the list based on their research and understanding of"
        " the user needs."
    )


def test_detect_disclaimer_rejects_list_item():
    assert not detect_disclaimer("1. Sales associates")


def test_detect_disclaimer_case_insensitive():
    assert detect_disclaimer("note: may need refinement")
    assert detect_disclaimer("NOTE: anything")


def test_detect_disclaimer_cues():
    assert detect_disclaimer("These are just drafts")
    assert detect_disclaimer("Keep in mind this is rough")
    assert detect_disclaimer("Please note the caveats")
    assert not detect_disclaimer("Retail store managers")


def test_detect_disclaimer_custom_cues():
    assert detect_disclaimer("Caveat: rough", cues=("caveat:",))
    assert not detect_disclaimer("These are just drafts", cues=("caveat:",))


def test_split_commentary():
    disclaimers, rest = split_commentary("Note: hedge\nFree-form discussion")
    assert disclaimers == ("Note: hedge",)
    assert rest == ("Free-form discussion",)


# -- full-response parsing ----------------------------------------------------


def test_full_response_two_sections():
    text = '"Who":\n1. X\n"What":\n1. Y'
    expected = reference_split(text, [WHO, WHAT])
    assert expected == [("who", "X"), ("what", "Y")]  # oracle sanity
    parsed = parse_full_response(text, [WHO, WHAT])
    assert drafts_as_pairs(parsed) == expected


def test_full_response_no_headings_all_unparsed():
    parsed = parse_full_response("just some prose\nwith no headings", [WHO, WHAT])
    assert parsed.drafts == ()
    assert parsed.unparsed == ("just some prose", "with no headings")


def test_full_response_swapped_heading_order():
    text = 'What:\n- enable search\n- track stock\nWho:\n1. shoppers'
    expected = reference_split(text, [WHO, WHAT, WOW])
    assert expected == [
        ("what", "enable search"),
        ("what", "track stock"),
        ("who", "shoppers"),
    ]
    parsed = parse_full_response(text, [WHO, WHAT, WOW])
    assert drafts_as_pairs(parsed) == expected


def test_full_response_markdown_and_quote_decorations():
    text = "### **Who**\n1. A\n“What” (Enablements):\n1. B"
    parsed = parse_full_response(text, [WHO, WHAT])
    assert drafts_as_pairs(parsed) == [("who", "A"), ("what", "B")]


def test_full_response_preamble_goes_unparsed():
    text = "Gladly, here is the exercise.\nWho:\n1. A"
    parsed = parse_full_response(text, [WHO])
    assert parsed.unparsed[0] == "Gladly, here is the exercise."
    assert drafts_as_pairs(parsed) == [("who", "A")]


def test_full_response_repeated_heading_accumulates():
    text = "Who:\n1. A\nWhat:\n1. B\nWho:\n2. C"
    parsed = parse_full_response(text, [WHO, WHAT])
    assert drafts_as_pairs(parsed) == [("who", "A"), ("what", "B"), ("who", "C")]


def test_full_response_requires_criteria():
    with pytest.raises(ValidationError):
        parse_full_response("Who:\n1. A", [])


def test_full_response_collects_disclaimers_per_section():
    text = "Who:\n1. A\nNote: these are drafts\nWhat:\n1. B"
    parsed = parse_full_response(text, [WHO, WHAT])
    assert parsed.disclaimers == ("Note: these are drafts",)


# -- rendering ----------------------------------------------------------------


def test_render_single_draft():
    assert render_drafts([ArtifactDraft("who", "A")]) == "1. A"


def test_render_three_drafts():
    rendered = render_drafts([ArtifactDraft("who", t) for t in "ABC"])
    assert rendered == "1. A\n2. B\n3. C"


def test_render_requires_drafts():
    with pytest.raises(ValidationError):
        render_drafts([])


# -- properties ----------------------------------------------------------------

# Draft text: one line, non-empty, no leading marker, not a disclaimer,
# no trailing colon (bare-list ambiguity), as the round-trip contract demands.
_marker = re.compile(r"^(\d+\.\s|[-*•]\s)")
_draft_text = (
    st.text(
        alphabet=st.characters(blacklist_categories=("Cc", "Cs", "Zl", "Zp")),
        min_size=1,
        max_size=60,
    )
    .map(lambda s: s.strip())
    .filter(lambda s: s and not _marker.match(s) and not s.endswith(":"))
    .filter(lambda s: not detect_disclaimer(s))
)
_criterion_key = st.from_regex(r"[a-z][a-z0-9-]{0,8}", fullmatch=True)


@settings(max_examples=500, deadline=None)
@given(key=_criterion_key, texts=st.lists(_draft_text, min_size=1, max_size=12))
def test_property_render_parse_round_trip(key, texts):
    drafts = tuple(ArtifactDraft(key, t) for t in texts)
    parsed = parse_step_response(render_drafts(drafts), key)
    assert parsed.drafts == drafts
    assert parsed.disclaimers == ()
    assert parsed.unparsed == ()


_mixed_line = st.one_of(
    _draft_text.map(lambda s: f"1. {s}"),
    _draft_text.map(lambda s: f"- {s}"),
    _draft_text.map(lambda s: f"Note: {s}"),
    _draft_text.map(lambda s: f"{s}:"),
    _draft_text,
    st.just(""),
)


@settings(max_examples=500, deadline=None)
@given(key=_criterion_key, lines=st.lists(_mixed_line, max_size=20))
def test_property_partition_covers_every_line(key, lines):
    text = "\n".join(lines)
    parsed = parse_step_response(text, key)
    non_blank = [line.strip() for line in lines if line.strip()]
    total = len(parsed.drafts) + len(parsed.disclaimers) + len(parsed.unparsed)
    assert total == len(non_blank)
    # each bucket entry is traceable to an input line (order preserved per bucket)
    remaining = list(non_blank)
    for disclaimer in parsed.disclaimers:
        assert disclaimer in remaining
        remaining.remove(disclaimer)
    for line in parsed.unparsed:
        assert line in remaining
        remaining.remove(line)
    for draft in parsed.drafts:
        assert draft.criterion_key == key
        match = next(
            (line for line in remaining if line == draft.text or line.endswith(draft.text)),
            None,
        )
        assert match is not None
        remaining.remove(match)
    assert remaining == []


@settings(max_examples=200, deadline=None)
@given(key=_criterion_key, lines=st.lists(_mixed_line, max_size=20))
def test_property_parsing_is_deterministic(key, lines):
    text = "\n".join(lines)
    assert parse_step_response(text, key) == parse_step_response(text, key)
