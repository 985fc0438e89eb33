from __future__ import annotations

import random
from itertools import combinations

import pytest
from hypothesis import strategies as st

from octsuite.graph import Graph


def cycle(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete(n: int) -> Graph:
    return Graph.from_edges(n, combinations(range(n), 2))


def path(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def star(leaves: int) -> Graph:
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def complete_bipartite(a: int, b: int) -> Graph:
    return Graph.from_edges(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def er(n: int, p: float, seed: int) -> Graph:
    """Independent test-side random graph; deliberately not the package generator."""
    rng = random.Random(f"test-er-{n}-{p}-{seed}")
    return Graph.from_edges(n, [e for e in combinations(range(n), 2) if rng.random() < p])


def random_small(seed: int, n_max: int = 12, n_min: int = 1) -> Graph:
    rng = random.Random(seed)
    n = rng.randint(n_min, n_max)
    return er(n, rng.choice((0.15, 0.3, 0.45, 0.6)), seed)


@st.composite
def graphs(draw, max_n: int = 10, min_n: int = 0):
    n = draw(st.integers(min_n, max_n))
    pairs = list(combinations(range(n), 2))
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph.from_edges(n, [e for e, keep in zip(pairs, mask) if keep])


def assert_graph_invariants(g: Graph) -> None:
    assert len(g.adj) == g.n
    for v, nb in enumerate(g.adj):
        assert all(a < b for a, b in zip(nb, nb[1:])), "adjacency strictly increasing"
        assert v not in nb, "no self-loops"
        for w in nb:
            assert 0 <= w < g.n
            assert v in g.adj[w], "symmetric"
    assert g.m == sum(len(nb) for nb in g.adj) // 2


@pytest.fixture
def c5() -> Graph:
    return cycle(5)


@pytest.fixture
def k5() -> Graph:
    return complete(5)


# one verdict line per acceptance criterion, printed after the run
ACCEPTANCE: dict[int, str] = {}


def record(criterion: int, passed: bool | None, detail: str) -> None:
    verdict = {True: "PASS", False: "FAIL", None: "SKIP"}[passed]
    ACCEPTANCE[criterion] = f"criterion {criterion}: {verdict}  {detail}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])
