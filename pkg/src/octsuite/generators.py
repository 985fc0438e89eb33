"""Seeded synthetic graph generators and look-alike configuration derivation."""

from __future__ import annotations

import random
from dataclasses import asdict, dataclass
from math import comb
from typing import Sequence

from .graph import Graph

FAMILIES = ("erdos_renyi", "tunable_oct", "chung_lu", "barabasi_albert")


@dataclass(frozen=True)
class GeneratorConfig:
    """One generator family with its parameters; unused fields stay None."""

    family: str
    seed: int = 1
    n: int | None = None
    p: float | None = None
    n_o: int | None = None
    b: float | None = None
    degrees: tuple[int, ...] | None = None
    c: int | None = None

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.p is not None and not 0 <= self.p <= 1:
            raise ValueError("p must lie in [0, 1]")
        if self.b is not None and not 0 <= self.b <= 1:
            raise ValueError("b must lie in [0, 1]")
        if self.n_o is not None and self.n is not None and self.n_o > self.n:
            raise ValueError("n_o cannot exceed n")

    def to_dict(self) -> dict:
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in asdict(self).items() if v is not None}

    def generate(self) -> Graph:
        if self.family == "erdos_renyi":
            return erdos_renyi(self.n, self.p, self.seed)
        if self.family == "tunable_oct":
            return tunable_oct(self.n, self.p, self.n_o, self.b, self.seed)
        if self.family == "chung_lu":
            return chung_lu(self.degrees, self.seed)
        return barabasi_albert(self.n, self.c, self.seed)


def erdos_renyi(n: int, p: float, seed: int) -> Graph:
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    rng = random.Random(seed)
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return Graph.from_edges(n, edges)


def tunable_oct_sides(n: int, n_o: int, b: float, rng: random.Random) -> list[int]:
    """Side of each vertex: 0 transversal pool, 1 left, 2 right."""
    return [0] * n_o + [1 if rng.random() < b else 2 for _ in range(n - n_o)]


def tunable_oct(n: int, p: float, n_o: int, b: float, seed: int) -> Graph:
    """Erdos-Renyi graph with no edges inside either partite set.

    Vertices ``0..n_o-1`` are the transversal pool; every other vertex is
    left with probability ``b``, otherwise right. Removing the pool leaves a
    bipartite graph, so the optimum is at most ``n_o``.
    """
    if n_o > n:
        raise ValueError("n_o cannot exceed n")
    rng = random.Random(seed)
    side = tunable_oct_sides(n, n_o, b, rng)
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if side[u] and side[u] == side[v]:
                continue
            if rng.random() < p:
                edges.append((u, v))
    return Graph.from_edges(n, edges)


def chung_lu_probability(degrees: Sequence[int]) -> tuple[list[list[float]], int]:
    """Pair probabilities ``d_u d_v / sum(d)`` clamped to 1, and the clamp count."""
    total = sum(degrees)
    n = len(degrees)
    probs = [[0.0] * n for _ in range(n)]
    clamped = 0
    if total == 0:
        return probs, 0
    for u in range(n):
        for v in range(u + 1, n):
            q = degrees[u] * degrees[v] / total
            if q > 1:
                q = 1.0
                clamped += 1
            probs[u][v] = q
    return probs, clamped


def chung_lu(degrees: Sequence[int], seed: int) -> Graph:
    if any(d < 0 for d in degrees):
        raise ValueError("degrees must be non-negative")
    probs, _ = chung_lu_probability(degrees)
    rng = random.Random(seed)
    n = len(degrees)
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < probs[u][v]]
    return Graph.from_edges(n, edges)


def barabasi_albert(n: int, c: int, seed: int) -> Graph:
    """Preferential attachment grown from a ``(c+1)``-clique.

    Each later vertex attaches to ``c`` distinct existing vertices drawn with
    probability proportional to their current degree.
    """
    if not 1 <= c < n:
        raise ValueError("need 1 <= c < n")
    rng = random.Random(seed)
    edges = [(u, v) for u in range(c + 1) for v in range(u + 1, c + 1)]
    # every endpoint occurrence, so uniform picks are degree-proportional
    pool = [x for e in edges for x in e]
    for v in range(c + 1, n):
        targets: list[int] = []
        while len(targets) < c:
            t = pool[rng.randrange(len(pool))]
            if t not in targets:
                targets.append(t)
        for t in targets:
            edges.append((t, v))
            pool.extend((t, v))
    return Graph.from_edges(n, edges)


def ba_edge_count(n: int, c: int) -> int:
    return comb(c + 1, 2) + c * (n - c - 1)


def lookalike_configs(g: Graph, oct_upper: int, seed: int = 1) -> list[GeneratorConfig]:
    """Generator configs matching ``g`` in density, OCT bound, degrees and size.

    The attachment count is ``max(1, round(m / n))``; graphs with fewer than
    two vertices get no Erdos-Renyi or Barabasi-Albert config, edgeless
    graphs no Barabasi-Albert config.
    """
    if oct_upper > g.n:
        raise ValueError("oct_upper cannot exceed n")
    degrees = tuple(g.degree(v) for v in range(g.n))
    configs = []
    if g.n >= 2:
        p = g.m / comb(g.n, 2)
        configs.append(GeneratorConfig("erdos_renyi", seed, n=g.n, p=p))
        configs.append(GeneratorConfig("tunable_oct", seed, n=g.n, p=p, n_o=oct_upper, b=0.5))
    configs.append(GeneratorConfig("chung_lu", seed, degrees=degrees))
    if g.n >= 2 and g.m > 0:
        c = min(max(1, round(g.m / g.n)), g.n - 1)
        configs.append(GeneratorConfig("barabasi_albert", seed, n=g.n, c=c))
    return configs
