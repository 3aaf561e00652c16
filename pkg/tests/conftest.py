import json
from pathlib import Path

import pytest

from lecturemap import build_map, parse_deck_file
from lecturemap.model import SlideRef, TopicMap

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(scope="session")
def algo_deck_path() -> Path:
    return FIXTURES / "algo101.json"


@pytest.fixture(scope="session")
def seminar_deck_path() -> Path:
    return FIXTURES / "seminar42.json"


@pytest.fixture(scope="session")
def algo_map(algo_deck_path) -> TopicMap:
    return build_map(parse_deck_file(algo_deck_path))


@pytest.fixture(scope="session")
def seminar_map(seminar_deck_path) -> TopicMap:
    return build_map(parse_deck_file(seminar_deck_path))


@pytest.fixture(scope="session")
def algo_deck_doc(algo_deck_path) -> dict:
    return json.loads(algo_deck_path.read_text(encoding="utf-8"))


def ref(slide_id: str, deck_id: str = "algo101") -> SlideRef:
    return SlideRef(deck_id, slide_id)
