import sys
from pathlib import Path

import pytest
from hypothesis import strategies as st

from digsplit.digraph import Digraph
from digsplit.gadgets import TowerParams

sys.path.insert(0, str(Path(__file__).parent))

ACCEPTANCE_LINES: list[str] = []
TOWER_REGISTRY: list[TowerParams] = []

_post_init = TowerParams.__post_init__


def _recording_post_init(self):
    _post_init(self)
    TOWER_REGISTRY.append(self)


# every tower parameter set built anywhere in the session is audited at the end
TowerParams.__post_init__ = _recording_post_init


@st.composite
def digraphs(draw, min_n=0, max_n=10, p=None):
    n = draw(st.integers(min_n, max_n))
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    if p is None:
        chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    else:
        chosen = [e for e in pairs if draw(st.floats(0, 1)) < p]
    return Digraph.from_arcs(n, chosen)


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_collection_modifyitems(items):
    items.sort(key=lambda item: item.module.__name__ == "test_acceptance")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
