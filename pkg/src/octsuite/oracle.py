"""Brute-force exact solvers used as ground truth.

Deliberately naive: subsets are enumerated by increasing size in
lexicographic order and checked against the feasibility predicate.
"""

from __future__ import annotations

from itertools import combinations

from .errors import RefusedError
from .graph import Graph, verify_oct

DEFAULT_CAP = 20


def _check_cap(g: Graph, cap: int) -> None:
    if g.n > cap:
        raise RefusedError(f"oracle refuses n={g.n} (cap {cap})")


def brute_force_oct(g: Graph, cap: int = DEFAULT_CAP) -> tuple[int, tuple[int, ...]]:
    _check_cap(g, cap)
    for k in range(g.n + 1):
        for s in combinations(range(g.n), k):
            if verify_oct(g, s):
                return k, s
    raise AssertionError("deleting every vertex is always feasible")


def is_vertex_cover(g: Graph, s) -> bool:
    chosen = set(s)
    return all(u in chosen or v in chosen for u, v in g.edges())


def brute_force_vc(g: Graph, cap: int = DEFAULT_CAP) -> tuple[int, tuple[int, ...]]:
    _check_cap(g, cap)
    edges = list(g.edges())
    for k in range(g.n + 1):
        for s in combinations(range(g.n), k):
            chosen = set(s)
            if all(u in chosen or v in chosen for u, v in edges):
                return k, s
    raise AssertionError("the full vertex set is always a cover")
