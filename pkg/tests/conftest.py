import random
from pathlib import Path

import pytest

from kgquest.kg import RelationFilter, load_graph
from kgquest.selector import SelectorDecision

FIXTURES = Path(__file__).parent / "fixtures"
DATA = Path(__file__).parent.parent / "src" / "kgquest" / "data"


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def toy_graph():
    return load_graph(DATA / "toy_graph.jsonl")


@pytest.fixture(scope="session")
def toy_filter():
    return RelationFilter(blocklist=frozenset({"R00"}))


@pytest.fixture(scope="session")
def einstein_graph():
    return load_graph(FIXTURES / "einstein_dump.jsonl")


@pytest.fixture
def first_candidate():
    """Selector that always expands the first listed edge."""

    def select(request):
        return SelectorDecision(think="take the first option", answer=1)

    return select


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)


@pytest.fixture(scope="session")
def case1_texts():
    t1 = (FIXTURES / "case1_trajectory.txt").read_text(encoding="utf-8")
    t2 = (FIXTURES / "case1_full_coverage.txt").read_text(encoding="utf-8")
    return t1, t2


CASE1_WAYPOINTS = [
    "Annis Field Dunbar",
    "William Dunbar",
    "Dunbar and Hunter Expedition",
    "George Hunter",
]
CASE1_ANSWER = "American Philosophical Society"


@pytest.fixture(scope="session")
def case1_waypoints():
    return list(CASE1_WAYPOINTS)


@pytest.fixture(scope="session")
def case1_answer():
    return CASE1_ANSWER


def make_scripted_selector(answers):
    """Selector that replays a fixed answer sequence."""
    queue = list(answers)

    def select(request):
        if not queue:
            raise AssertionError("scripted selector ran out of answers")
        return SelectorDecision(think="scripted", answer=queue.pop(0))

    return select
