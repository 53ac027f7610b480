import json

import pytest

from dihedral2rep import bigraph


@pytest.fixture
def graph_file(tmp_path):
    """Write a BipartiteGraph to a JSON file and return its path."""
    counter = iter(range(1000))

    def write(g: bigraph.BipartiteGraph, name: str | None = None) -> str:
        path = tmp_path / (name or f"graph{next(counter)}.json")
        path.write_text(json.dumps(g.to_dict()))
        return str(path)

    return write


def pytest_terminal_summary(terminalreporter):
    """Repeat the acceptance lines at the end of the run."""
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[number].line())
