"""Iterative compression for OCT with bipartite jump-start and anytime bounds.

The outer loop walks a vertex ordering and keeps an optimal transversal of
the prefix seen so far. When the next vertex creates an odd cycle, the old
solution plus that vertex (size ``k + 1``) is handed to :func:`compress`,
which either shrinks it to size ``k`` or proves that impossible.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence

from .errors import ContractViolation
from .graph import Graph, OctSolution, Side, Source, degeneracy_ordering, verify_oct
from .heuristics import EnsembleConfig, ensemble
from .report import Deadline, SolverReport, Termination

INF = 1 << 30


class CutInfeasible(ValueError):
    """A source is adjacent to a sink, so no vertex set separates them."""


class _Interrupted(Exception):
    pass


Check = Callable[[], None]


def _no_check() -> None:
    pass


# ---------------------------------------------------------------------------
# vertex cuts via vertex-split max-flow


class _FlowNet:
    """Residual network with paired forward/backward arcs."""

    def __init__(self, size: int):
        self.head: list[list[int]] = [[] for _ in range(size)]
        self.to: list[int] = []
        self.cap: list[int] = []

    def add(self, a: int, b: int, c: int) -> None:
        self.head[a].append(len(self.to))
        self.to.append(b)
        self.cap.append(c)
        self.head[b].append(len(self.to))
        self.to.append(a)
        self.cap.append(0)

    def max_flow(self, s: int, t: int, limit: int, check: Check) -> int:
        """Edmonds-Karp; stops early once the flow exceeds ``limit``."""
        flow = 0
        while flow <= limit:
            check()
            parent_arc = [-1] * len(self.head)
            parent_arc[s] = -2
            queue = deque([s])
            while queue and parent_arc[t] == -1:
                a = queue.popleft()
                for e in self.head[a]:
                    b = self.to[e]
                    if self.cap[e] > 0 and parent_arc[b] == -1:
                        parent_arc[b] = e
                        queue.append(b)
            if parent_arc[t] == -1:
                return flow
            # unit vertex capacities: every augmenting path carries one unit
            b = t
            while b != s:
                e = parent_arc[b]
                self.cap[e] -= 1
                self.cap[e ^ 1] += 1
                b = self.to[e ^ 1]
            flow += 1
        return flow

    def reachable(self, s: int) -> list[bool]:
        seen = [False] * len(self.head)
        seen[s] = True
        queue = deque([s])
        while queue:
            a = queue.popleft()
            for e in self.head[a]:
                b = self.to[e]
                if self.cap[e] > 0 and not seen[b]:
                    seen[b] = True
                    queue.append(b)
        return seen


def _split_cut(
    adj: Sequence[Iterable[int]],
    vertices: Sequence[int],
    src_side: Iterable[int],
    snk_side: Iterable[int],
    cuttable_terminals: bool,
    limit: int,
    check: Check,
) -> tuple[int, ...] | None:
    """Minimum vertex cut between two vertex groups, or None if above ``limit``.

    Vertex ``v`` becomes arc ``2i -> 2i+1`` of capacity one (infinite for
    terminals unless ``cuttable_terminals``). A super source feeds every
    ``src_side`` vertex and every ``snk_side`` vertex drains to a super sink.
    """
    index = {v: i for i, v in enumerate(vertices)}
    src_set, snk_set = set(src_side), set(snk_side)
    size = 2 * len(vertices) + 2
    s, t = size - 2, size - 1
    net = _FlowNet(size)
    for v, i in index.items():
        terminal = v in src_set or v in snk_set
        net.add(2 * i, 2 * i + 1, INF if terminal and not cuttable_terminals else 1)
        for w in adj[v]:
            j = index.get(w)
            if j is not None:
                net.add(2 * i + 1, 2 * j, INF)
    for v in sorted(src_set):
        net.add(s, 2 * index[v], INF)
    for v in sorted(snk_set):
        net.add(2 * index[v] + 1, t, INF)
    flow = net.max_flow(s, t, limit, check)
    if flow > limit:
        return None
    seen = net.reachable(s)
    return tuple(v for v, i in index.items() if seen[2 * i] and not seen[2 * i + 1])


def min_vertex_cut(
    g: Graph, sources: Iterable[int], sinks: Iterable[int]
) -> tuple[int, ...]:
    """Smallest vertex set, avoiding both terminal groups, separating them.

    Raises :class:`CutInfeasible` when a source is adjacent to a sink.
    """
    src, snk = set(sources), set(sinks)
    if src & snk:
        raise ContractViolation("sources and sinks must be disjoint")
    for v in src:
        if any(w in snk for w in g.adj[v]):
            raise CutInfeasible(f"source {v} is adjacent to a sink")
    cut = _split_cut(g.adj, range(g.n), src, snk, False, g.n, _no_check)
    assert cut is not None
    return tuple(sorted(cut))


# ---------------------------------------------------------------------------
# compression


_T, _L, _R = 0, 1, 2


def _assignments(
    s: Sequence[int], adj_s: list[set[int]], budget: int
) -> Iterator[list[int]]:
    """Valid (transversal, left, right) assignments of ``s`` in reflected Gray order.

    Adjacent vertices never share a side, at most ``budget`` go to the
    transversal, and the first vertex placed on a side goes left (the
    mirrored assignment is equivalent).
    """
    k = len(s)
    assign = [-1] * k

    def rec(pos: int, reverse: bool, in_t: int, sided: bool) -> Iterator[list[int]]:
        if pos == k:
            yield assign
            return
        opts = (_R, _L, _T) if reverse else (_T, _L, _R)
        for idx, o in enumerate(opts):
            if o == _T:
                if in_t >= budget:
                    continue
            else:
                if not sided and o == _R:
                    continue
                if any(assign[j] == o for j in adj_s[pos] if j < pos):
                    continue
            assign[pos] = o
            yield from rec(pos + 1, idx % 2 == 1, in_t + (o == _T), sided or o != _T)
        assign[pos] = -1

    yield from rec(0, False, 0, False)


def _coloring(adj: Sequence[Iterable[int]], active: set[int], deleted: set[int]) -> dict[int, Side] | None:
    color: dict[int, Side] = {}
    for root in sorted(active):
        if root in deleted or root in color:
            continue
        color[root] = Side.LEFT
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if w not in active or w in deleted:
                    continue
                if w not in color:
                    color[w] = Side.RIGHT if color[u] == Side.LEFT else Side.LEFT
                    queue.append(w)
                elif color[w] == color[u]:
                    return None
    return color


def _compress(
    adj: Sequence[Iterable[int]],
    active: set[int],
    s: Sequence[int],
    check: Check,
) -> tuple[int, ...] | None:
    s = sorted(s)
    s_set = set(s)
    k = len(s) - 1
    color = _coloring(adj, active, s_set)
    if color is None:
        raise ContractViolation("compress needs a feasible transversal")
    pos = {v: i for i, v in enumerate(s)}
    adj_s = [{pos[w] for w in adj[v] if w in pos} for v in s]
    outer = [[w for w in adj[v] if w in active and w not in s_set] for v in s]
    rest = sorted(active - s_set)

    for assign in _assignments(s, adj_s, k):
        check()
        in_t = sum(1 for o in assign if o == _T)
        keep: set[int] = set()
        flip: set[int] = set()
        for i, o in enumerate(assign):
            if o == _T:
                continue
            need = Side.RIGHT if o == _L else Side.LEFT
            for y in outer[i]:
                (keep if color[y] == need else flip).add(y)
        budget = k - in_t
        if not keep or not flip:
            cut: tuple[int, ...] | None = ()
        else:
            cut = _split_cut(adj, rest, keep, flip, True, budget, check)
        if cut is not None and len(cut) <= budget:
            return tuple(sorted([v for v, o in zip(s, assign) if o == _T] + list(cut)))
    return None


def compress(h: Graph, s: Iterable[int]) -> tuple[int, ...] | None:
    """Shrink a feasible transversal of size ``k + 1`` to size ``k``, if possible.

    Returns None when no transversal of size ``k`` exists.
    """
    s = sorted(set(s))
    if not verify_oct(h, s):
        raise ContractViolation("compress needs a feasible transversal")
    if not s:
        return None
    return _compress(h.adj, set(range(h.n)), s, _no_check)


# ---------------------------------------------------------------------------
# outer loop


@dataclass(frozen=True)
class IcConfig:
    """Solver settings. ``level`` 0 uses id order, 1 adds the bipartite
    jump-start, 2 also sorts the remaining vertices by reverse degeneracy.
    """

    level: int = 1
    timeout: float | None = None
    seed: int = 1
    jumpstart: OctSolution | None = None
    # outer-loop steps before stopping; makes runs replayable without a clock
    max_iterations: int | None = None
    heuristic_iterations: int = 8

    def __post_init__(self) -> None:
        if self.level not in (0, 1, 2):
            raise ValueError("level must be 0, 1 or 2")


@dataclass(frozen=True)
class IcState:
    ordering: tuple[int, ...]
    frontier: int
    current: tuple[int, ...]

    @property
    def lower(self) -> int:
        return len(self.current)

    @property
    def upper(self) -> int:
        return len(self.current) + len(self.ordering) - self.frontier


def default_level(timeout: float | None) -> int:
    return 1 if timeout is not None and timeout < 1 else 2


def _jumpstart(g: Graph, cfg: IcConfig) -> tuple[int, ...]:
    if cfg.jumpstart is not None:
        s = tuple(sorted(cfg.jumpstart.vertices))
    else:
        rep = ensemble(
            g,
            EnsembleConfig(seed=cfg.seed, max_iterations=cfg.heuristic_iterations),
        )
        s = rep.solution.vertices
    if not verify_oct(g, s):
        raise ContractViolation("jump-start solution is not a valid transversal")
    return s


def _prepare(g: Graph, cfg: IcConfig) -> tuple[tuple[int, ...], int]:
    """Ordering plus the length of its bipartite head (0 for level 0)."""
    if cfg.level == 0:
        return tuple(range(g.n)), 0
    s = _jumpstart(g, cfg)
    s_set = set(s)
    head = [v for v in range(g.n) if v not in s_set]
    if cfg.level == 1:
        return tuple(head + list(s)), len(head)
    sub, back = g.induced(s)
    order, _ = degeneracy_ordering(sub)
    return tuple(head + [back[i] for i in reversed(order)]), len(head)


def build_ordering(g: Graph, cfg: IcConfig) -> tuple[int, ...]:
    return _prepare(g, cfg)[0]


def solve_ic(
    g: Graph,
    cfg: IcConfig,
    on_state: Callable[[IcState], None] | None = None,
) -> SolverReport:
    """Exact OCT by iterative compression, interruptible at any step.

    At every step the current set is optimal for the processed prefix
    (a lower bound), and adding the unprocessed suffix gives a feasible
    transversal of the whole graph (the reported solution on interruption).
    """
    deadline = Deadline(cfg.timeout)
    ordering, start = _prepare(g, cfg)
    n = g.n

    def check() -> None:
        if deadline.expired():
            raise _Interrupted

    current: list[int] = []
    active = set(ordering[:start])
    frontier = start
    iterations = 0
    if on_state:
        on_state(IcState(ordering, frontier, tuple(current)))
    finished = False
    try:
        while frontier < n:
            if cfg.max_iterations is not None and iterations >= cfg.max_iterations:
                break
            check()
            v = ordering[frontier]
            active.add(v)
            if _coloring(g.adj, active, set(current)) is None:
                grown = current + [v]
                smaller = _compress(g.adj, active, grown, check)
                current = sorted(smaller) if smaller is not None else sorted(grown)
            frontier += 1
            iterations += 1
            if on_state:
                on_state(IcState(ordering, frontier, tuple(current)))
        finished = frontier == n
    except _Interrupted:
        pass

    state = IcState(ordering, frontier, tuple(current))
    solution = OctSolution.checked(g, list(state.current) + list(ordering[frontier:]), Source.IC)
    return SolverReport(
        solution=solution,
        lower=state.lower,
        upper=state.upper,
        optimal=finished,
        elapsed=deadline.elapsed(),
        seed=cfg.seed,
        termination=Termination.COMPLETED if finished else Termination.DEADLINE,
        iterations=iterations,
    )
