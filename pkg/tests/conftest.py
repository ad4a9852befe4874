import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from cliquepart.graph import WeightedGraph

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def graph_from_upper(n, values, integral=True, loop_offset=0.0):
    w = np.zeros((n, n))
    w[np.triu_indices(n, k=1)] = values
    return WeightedGraph(w + w.T, loop_offset=loop_offset, integral=integral)


@st.composite
def int_graphs(draw, min_n=1, max_n=7, q=5):
    n = draw(st.integers(min_n, max_n))
    m = n * (n - 1) // 2
    values = draw(st.lists(st.integers(-q, q), min_size=m, max_size=m))
    return graph_from_upper(n, values)


@st.composite
def labelings(draw, n):
    return draw(st.lists(st.integers(0, max(n - 1, 0)), min_size=n, max_size=n))


def k3():
    """Two unit positive edges closed by a -2 edge."""
    return WeightedGraph.from_edges(3, [(0, 1, 1), (0, 2, 1), (1, 2, -2)], integral=True)


def unit_star():
    """Hub 0 joined by unit edges to a triangle 1,2,3 of -1 edges."""
    edges = [(0, t, 1) for t in (1, 2, 3)] + [(1, 2, -1), (1, 3, -1), (2, 3, -1)]
    return WeightedGraph.from_edges(4, edges, integral=True)


def chain_graph(weights, closing):
    """Path 0-1-...-k with the given positive weights and a negative closer."""
    k = len(weights) + 1
    edges = [(i, i + 1, x) for i, x in enumerate(weights)] + [(0, k - 1, closing)]
    return WeightedGraph.from_edges(k, edges, integral=True)


@pytest.fixture
def k3_graph():
    return k3()


# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES: dict[str, str] = {}


def record_criterion(key: str, ok: bool, detail: str) -> None:
    line = f"criterion {key:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[key] = line
    print(line, flush=True)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    key = getattr(item.function, "criterion", None)
    if key is None or rep.when != "call" or key in ACCEPTANCE_LINES:
        return
    if rep.skipped:
        reason = rep.longrepr[2] if isinstance(rep.longrepr, tuple) else "skipped"
        ACCEPTANCE_LINES[key] = f"criterion {key:>2}: SKIP  {reason}"
    elif rep.failed:
        ACCEPTANCE_LINES[key] = f"criterion {key:>2}: FAIL  {call.excinfo.typename}"


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES, key=int):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
