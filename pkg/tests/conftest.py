import json

import pytest

import golden_data
from chai.activities import builtin_hills
from chai.prompts import SessionContext
from chai.store import SessionStore


@pytest.fixture
def hills():
    return builtin_hills()


@pytest.fixture
def retailinc_context():
    return SessionContext(golden_data.retailinc_narrative())


@pytest.fixture
def golden_prompt():
    return golden_data.golden_prompt()


@pytest.fixture
def transcript_replies():
    return json.loads(golden_data.TRANSCRIPT_PATH.read_text(encoding="utf-8"))


@pytest.fixture
def store(tmp_path):
    return SessionStore(tmp_path / "data")
