import numpy as np
import pytest
from hypothesis import strategies as st

from randconsensus.graph import build_graph


def random_connected_graph(rng, n, p_lo=0.2, p_hi=0.8, extra=0.4):
    """Random spanning tree plus independent extra edges; probabilities uniform in [p_lo, p_hi]."""
    edges = {(int(rng.integers(v)), v) for v in range(1, n)}
    for u in range(n):
        for v in range(u + 1, n):
            if (u, v) not in edges and rng.random() < extra:
                edges.add((u, v))
    perm = rng.permutation(n)
    edges = sorted(tuple(sorted((int(perm[u]), int(perm[v])))) for u, v in edges)
    return build_graph(edges, rng.uniform(p_lo, p_hi, size=n))


@st.composite
def connected_graphs(draw, min_nodes=2, max_nodes=5, p_lo=0.05, p_hi=0.95):
    n = draw(st.integers(min_nodes, max_nodes))
    edges = {(draw(st.integers(0, v - 1)), v) for v in range(1, n)}
    for u in range(n):
        for v in range(u + 1, n):
            if draw(st.booleans()):
                edges.add((u, v))
    probs = draw(st.lists(st.floats(p_lo, p_hi), min_size=n, max_size=n))
    return build_graph(sorted(edges), probs)


@pytest.fixture
def single_edge():
    return build_graph([(0, 1)], [0.5, 0.5])


@pytest.fixture
def path3():
    return build_graph([(0, 1), (1, 2)], [0.5, 0.5, 0.5])


@pytest.fixture
def triangle_relaxed():
    return build_graph([(0, 1), (0, 2), (1, 2)], [1.0, 1.0, 1.0], relaxed=True)


@pytest.fixture
def mixed_triangle():
    return build_graph([(0, 1), (0, 2), (1, 2)], [0.3, 0.5, 0.7])


def complete_graph(n, p, relaxed=False):
    edges = [(u, v) for u in range(n) for v in range(u + 1, n)]
    return build_graph(edges, [p] * n, relaxed=relaxed)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
