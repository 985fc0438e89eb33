"""Linear-time randomized bipartization heuristics and their round-robin ensemble.

Each heuristic builds two partite sets and puts every other vertex into the
transversal, so its output is feasible by construction.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from typing import Callable

from .graph import Graph, OctSolution, Side, Source
from .report import Deadline, SolverReport, Termination

HEURISTICS = ("dfs", "bfs", "luby", "mindeg")

_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_seed(master: int, *counters: int) -> int:
    """Counter-mode seed mixing; stable across platforms and Python versions."""
    x = _splitmix64(master & _MASK64)
    for c in counters:
        x = _splitmix64(x ^ (c & _MASK64))
    return x


def _greedy_two_coloring(g: Graph, seed: int, breadth: bool) -> list[int]:
    rng = random.Random(seed)
    color: list[Side | None] = [None] * g.n
    s: list[int] = []
    roots = list(range(g.n))
    rng.shuffle(roots)
    for root in roots:
        if color[root] is not None:
            continue
        pending = deque([root])
        pop = pending.popleft if breadth else pending.pop
        while pending:
            v = pop()
            if color[v] is not None:
                continue
            seen = {color[w] for w in g.adj[v]} - {None, Side.DELETED}
            if len(seen) == 2:
                color[v] = Side.DELETED
                s.append(v)
            elif seen:
                color[v] = Side.RIGHT if Side.LEFT in seen else Side.LEFT
            else:
                color[v] = Side.LEFT
            nxt = [w for w in g.adj[v] if color[w] is None]
            rng.shuffle(nxt)
            pending.extend(nxt)
    return s


def dfs_two_coloring(g: Graph, seed: int) -> OctSolution:
    """Greedy 2-colouring in depth-first order; conflicting vertices are deleted."""
    return OctSolution.checked(g, _greedy_two_coloring(g, seed, False), Source.DFS)


def bfs_two_coloring(g: Graph, seed: int) -> OctSolution:
    return OctSolution.checked(g, _greedy_two_coloring(g, seed, True), Source.BFS)


def _mindeg_round(adj: dict[int, set[int]], rng: random.Random) -> set[int]:
    live = {v: set(nb) for v, nb in adj.items()}
    chosen: set[int] = set()
    while live:
        d = min(len(nb) for nb in live.values())
        v = rng.choice(sorted(u for u, nb in live.items() if len(nb) == d))
        chosen.add(v)
        for u in [v, *live[v]]:
            for w in live.pop(u):
                if w in live:
                    live[w].discard(u)
    return chosen


def mindeg_independent(g: Graph, seed: int) -> OctSolution:
    """Two rounds of minimum-degree greedy independent set.

    Ties between minimum-degree vertices are broken by the seeded RNG.
    """
    rng = random.Random(seed)
    adj = {v: set(g.adj[v]) for v in range(g.n)}
    first = _mindeg_round(adj, rng)
    rest = {v: nb - first for v, nb in adj.items() if v not in first}
    second = _mindeg_round(rest, rng)
    s = [v for v in range(g.n) if v not in first and v not in second]
    return OctSolution.checked(g, s, Source.MINDEG)


def _luby_round(adj: dict[int, set[int]], rng: random.Random) -> set[int]:
    live = set(adj)
    chosen: set[int] = set()
    while live:
        order = sorted(live)
        prio = {v: rng.random() for v in order}
        winners = [
            v for v in order if all(prio[v] > prio[w] for w in adj[v] if w in live)
        ]
        for v in winners:
            chosen.add(v)
        for v in winners:
            live.discard(v)
            live.difference_update(adj[v])
    return chosen


def luby(g: Graph, seed: int) -> OctSolution:
    """Two rounds of Luby's randomized maximal independent set.

    Priorities are redrawn for the second round.
    """
    rng = random.Random(seed)
    adj = {v: set(g.adj[v]) for v in range(g.n)}
    first = _luby_round(adj, rng)
    rest = {v: nb - first for v, nb in adj.items() if v not in first}
    second = _luby_round(rest, rng)
    s = [v for v in range(g.n) if v not in first and v not in second]
    return OctSolution.checked(g, s, Source.LUBY)


HEURISTIC_FUNCS: dict[str, Callable[[Graph, int], OctSolution]] = {
    "dfs": dfs_two_coloring,
    "bfs": bfs_two_coloring,
    "luby": luby,
    "mindeg": mindeg_independent,
}


@dataclass(frozen=True)
class EnsembleConfig:
    timeout: float = 1.0
    seed: int = 1
    enabled: tuple[str, ...] = HEURISTICS
    # fixes the number of heuristic invocations; the clock is then ignored
    max_iterations: int | None = None

    def __post_init__(self) -> None:
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if not self.enabled:
            raise ValueError("at least one heuristic must be enabled")
        unknown = set(self.enabled) - set(HEURISTICS)
        if unknown:
            raise ValueError(f"unknown heuristics: {sorted(unknown)}")


def ensemble(g: Graph, cfg: EnsembleConfig) -> SolverReport:
    """Run the enabled heuristics round-robin and keep the smallest solution.

    Order is dfs, bfs, luby, mindeg. The seed of invocation ``it`` of
    heuristic ``h`` is ``derive_seed(cfg.seed, h, it)``. One full cycle
    always runs, even past the deadline; ties keep the earlier solution.
    """
    slots = [(HEURISTICS.index(h), h) for h in HEURISTICS if h in cfg.enabled]
    deadline = Deadline(None if cfg.max_iterations is not None else cfg.timeout)
    best: OctSolution | None = None
    iterations = 0
    cycle = 0
    done = False
    while not done:
        for h_index, name in slots:
            if cfg.max_iterations is not None:
                if iterations >= cfg.max_iterations and cycle > 0:
                    done = True
                    break
            elif cycle > 0 and deadline.expired():
                done = True
                break
            sol = HEURISTIC_FUNCS[name](g, derive_seed(cfg.seed, h_index, cycle))
            iterations += 1
            if best is None or sol.size < best.size:
                best = sol
        cycle += 1
        if best is not None and best.size == 0:
            done = True
    assert best is not None
    result = OctSolution(best.vertices, best.verified, Source.ENSEMBLE)
    return SolverReport(
        solution=result,
        lower=0,
        upper=result.size,
        optimal=result.size == 0,
        elapsed=deadline.elapsed(),
        seed=cfg.seed,
        termination=Termination.COMPLETED if result.size == 0 else Termination.DEADLINE,
        iterations=iterations,
    )
