"""OCT to Vertex Cover transformation and an exact branch-and-reduce VC solver.

Every vertex ``v`` of the OCT instance gets two copies ``v`` and ``v + n``;
each original edge is present on both copies and each vertex is joined to
its own copy. A vertex cover of that graph has ``n + k`` vertices exactly
when ``k`` originals have both copies in the cover, and those originals
form an odd cycle transversal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import ContractViolation
from .graph import Graph, OctSolution, Source
from .report import Deadline, SolverReport, Termination

Adjacency = dict[int, set[int]]


@dataclass(frozen=True)
class VcInstance:
    graph: Graph
    n_original: int

    def copies(self, v: int) -> tuple[int, int]:
        return v, v + self.n_original


def to_vc_instance(g: Graph) -> VcInstance:
    n = g.n
    edges = []
    for u, v in g.edges():
        edges.append((u, v))
        edges.append((u + n, v + n))
    edges.extend((v, v + n) for v in range(n))
    return VcInstance(Graph.from_edges(2 * n, edges), n)


def from_vc_solution(inst: VcInstance, s_vc: Iterable[int]) -> tuple[int, ...]:
    cover = set(s_vc)
    for u, v in inst.graph.edges():
        if u not in cover and v not in cover:
            raise ContractViolation(f"edge ({u}, {v}) is not covered")
    n = inst.n_original
    return tuple(v for v in range(n) if v in cover and v + n in cover)


# ---------------------------------------------------------------------------
# half-integral LP relaxation


def _max_bipartite_matching(left_adj: Mapping[int, list[int]]) -> dict[int, int]:
    """Maximum matching, returned as right vertex -> left vertex."""
    match_r: dict[int, int] = {}
    match_l: dict[int, int] = {}
    # greedy warm start
    for u in sorted(left_adj):
        for w in left_adj[u]:
            if w not in match_r:
                match_r[w] = u
                match_l[u] = w
                break
    for root in sorted(left_adj):
        if root in match_l:
            continue
        # iterative DFS for an augmenting path
        parent: dict[int, int] = {}
        stack = [(root, iter(left_adj[root]))]
        seen_r: set[int] = set()
        found = None
        while stack and found is None:
            u, it = stack[-1]
            for w in it:
                if w in seen_r:
                    continue
                seen_r.add(w)
                parent[w] = u
                if w not in match_r:
                    found = w
                    break
                nxt = match_r[w]
                stack.append((nxt, iter(left_adj[nxt])))
                break
            else:
                stack.pop()
        if found is None:
            continue
        w = found
        while True:
            u = parent[w]
            prev = match_l.get(u)
            match_r[w] = u
            match_l[u] = w
            if prev is None:
                break
            w = prev
    return match_r


def _lp_adj(adj: Mapping[int, Iterable[int]]) -> dict[int, float]:
    left = {v: sorted(nb) for v, nb in adj.items()}
    match_r = _max_bipartite_matching(left)
    match_l = {u: w for w, u in match_r.items()}
    # Koenig: Z = vertices alternating-reachable from unmatched left vertices
    z_left = {v for v in left if v not in match_l}
    z_right: set[int] = set()
    frontier = sorted(z_left)
    while frontier:
        nxt = []
        for u in frontier:
            for w in left[u]:
                if w in z_right or match_l.get(u) == w:
                    continue
                z_right.add(w)
                mate = match_r.get(w)
                if mate is not None and mate not in z_left:
                    z_left.add(mate)
                    nxt.append(mate)
        frontier = nxt
    return {
        v: ((v not in z_left) + (v in z_right)) / 2 for v in left
    }


def lp_half_integral(g: Graph) -> list[float]:
    """Optimal half-integral solution of the vertex cover LP relaxation.

    Solved exactly through a maximum matching on the bipartite double cover;
    values are 0, 0.5 or 1 and their sum bounds the minimum cover from below.
    """
    x = _lp_adj({v: g.adj[v] for v in range(g.n)})
    return [x[v] for v in range(g.n)]


# ---------------------------------------------------------------------------
# reduction rules on a mutable adjacency


def _remove(adj: Adjacency, v: int) -> None:
    for w in adj.pop(v):
        adj[w].discard(v)


def _dominated_by(adj: Adjacency, v: int) -> int | None:
    """A neighbour ``u`` with ``N[v]`` contained in ``N[u]``, lowest id first."""
    closed_v = adj[v] | {v}
    for u in sorted(adj[v]):
        if len(adj[u]) >= len(adj[v]) and closed_v <= (adj[u] | {u}):
            return u
    return None


def vc_fixings(g: Graph) -> tuple[set[int], set[int]]:
    """Vertices forced into / out of some common minimum vertex cover.

    Rules are applied one at a time, each on the instance left by the
    previous ones, so all fixings hold for a single optimal cover: degree-0
    vertices are excluded, a degree-1 vertex is excluded and its neighbour
    included, a dominating neighbour is included, and LP persistency fixes
    every integral variable of the half-integral optimum.
    """
    adj: Adjacency = {v: set(g.adj[v]) for v in range(g.n)}
    forced_in: set[int] = set()
    forced_out: set[int] = set()
    changed = True
    while changed and adj:
        changed = False
        for v in sorted(adj):
            if v not in adj:
                continue
            deg = len(adj[v])
            if deg == 0:
                forced_out.add(v)
                _remove(adj, v)
                changed = True
            elif deg == 1:
                (u,) = adj[v]
                forced_in.add(u)
                _remove(adj, u)
                forced_out.add(v)
                _remove(adj, v)
                changed = True
        if changed:
            continue
        for v in sorted(adj):
            if v not in adj:
                continue
            u = _dominated_by(adj, v)
            if u is not None:
                forced_in.add(u)
                _remove(adj, u)
                changed = True
                break
        if changed or not adj:
            continue
        x = _lp_adj(adj)
        ones = sorted(v for v, val in x.items() if val == 1)
        zeros = sorted(v for v, val in x.items() if val == 0)
        for v in ones:
            forced_in.add(v)
            _remove(adj, v)
        for v in zeros:
            forced_out.add(v)
            _remove(adj, v)
        changed = bool(ones or zeros)
    return forced_in, forced_out


# ---------------------------------------------------------------------------
# branch and reduce


@dataclass(frozen=True)
class VcReport:
    cover: tuple[int, ...]
    lower: int
    upper: int
    optimal: bool
    elapsed: float
    termination: Termination
    nodes: int


class _Stop(Exception):
    pass


class _BranchAndReduce:
    def __init__(self, n: int, deadline: Deadline, node_limit: int | None):
        self.next_id = n
        self.deadline = deadline
        self.node_limit = node_limit
        self.nodes = 0
        self.best: set[int] = set()
        self.best_size = math.inf
        # frames of undo operations, root first
        self.stack: list[list[tuple]] = []

    def _record(self) -> None:
        cover: set[int] = set()
        for frame in reversed(self.stack):
            for op in reversed(frame):
                kind = op[0]
                if kind == "in":
                    cover.add(op[1])
                elif kind == "set":
                    cover.update(op[1])
                else:
                    _, v, a, b, w = op
                    if w in cover:
                        cover.discard(w)
                        cover.update((a, b))
                    else:
                        cover.add(v)
        self.best = cover
        self.best_size = len(cover)

    @staticmethod
    def _cost(frame: list[tuple]) -> int:
        return sum(len(op[1]) if op[0] == "set" else 1 for op in frame)

    def _reduce(self, adj: Adjacency, frame: list[tuple]) -> float:
        """Apply reductions in place; return the LP lower bound of what is left."""
        while True:
            changed = False
            for v in sorted(adj):
                if v not in adj:
                    continue
                deg = len(adj[v])
                if deg == 0:
                    _remove(adj, v)
                    changed = True
                elif deg == 1:
                    (u,) = adj[v]
                    frame.append(("in", u))
                    _remove(adj, u)
                    _remove(adj, v)
                    changed = True
                elif deg == 2:
                    a, b = sorted(adj[v])
                    if b in adj[a]:
                        frame.append(("in", a))
                        frame.append(("in", b))
                        _remove(adj, a)
                        _remove(adj, b)
                        _remove(adj, v)
                    else:
                        w = self.next_id
                        self.next_id += 1
                        merged = (adj[a] | adj[b]) - {v, a, b}
                        _remove(adj, v)
                        _remove(adj, a)
                        _remove(adj, b)
                        adj[w] = set(merged)
                        for y in merged:
                            adj[y].add(w)
                        frame.append(("fold", v, a, b, w))
                    changed = True
            if changed:
                continue
            for v in sorted(adj):
                if v not in adj:
                    continue
                u = _dominated_by(adj, v)
                if u is not None:
                    frame.append(("in", u))
                    _remove(adj, u)
                    changed = True
            if changed:
                continue
            if not adj:
                return 0.0
            x = _lp_adj(adj)
            fixed = False
            for v in sorted(adj):
                if x[v] == 1:
                    frame.append(("in", v))
                    _remove(adj, v)
                    fixed = True
                elif x[v] == 0:
                    _remove(adj, v)
                    fixed = True
            if not fixed:
                return sum(x.values())

    def search(self, adj: Adjacency, path_cost: int) -> None:
        self.nodes += 1
        if self.deadline.expired() or (
            self.node_limit is not None and self.nodes > self.node_limit
        ):
            raise _Stop
        frame: list[tuple] = []
        self.stack.append(frame)
        try:
            bound = self._reduce(adj, frame)
            cost = path_cost + self._cost(frame)
            if cost + math.ceil(bound - 1e-9) >= self.best_size:
                return
            if not adj:
                self._record()
                return
            v = min(adj, key=lambda u: (-len(adj[u]), u))
            nbrs = sorted(adj[v])

            with_v = {u: set(nb) for u, nb in adj.items()}
            _remove(with_v, v)
            frame.append(("set", (v,)))
            self.search(with_v, cost + 1)
            frame.pop()

            if cost + len(nbrs) < self.best_size:
                _remove(adj, v)
                for u in nbrs:
                    _remove(adj, u)
                frame.append(("set", tuple(nbrs)))
                self.search(adj, cost + len(nbrs))
                frame.pop()
        finally:
            self.stack.pop()


def _greedy_cover(g: Graph) -> set[int]:
    adj: Adjacency = {v: set(g.adj[v]) for v in range(g.n)}
    cover: set[int] = set()
    while True:
        v = max(adj, key=lambda u: (len(adj[u]), -u), default=None)
        if v is None or not adj[v]:
            return cover
        cover.add(v)
        _remove(adj, v)


def solve_vc_exact(
    g: Graph, timeout: float | None = None, node_limit: int | None = None
) -> VcReport:
    """Minimum vertex cover by branch-and-reduce.

    Reductions: degree 0/1, degree 2 (triangle inclusion or folding),
    dominance, and LP persistency; the half-integral LP value prunes nodes.
    Branching picks a maximum-degree vertex (lowest id on ties) and tries
    taking it, then taking its whole neighbourhood. On deadline or node
    limit the best cover found so far is returned with the root LP bound.
    """
    deadline = Deadline(timeout)
    solver = _BranchAndReduce(g.n, deadline, node_limit)
    solver.best = _greedy_cover(g)
    solver.best_size = len(solver.best)
    root_lower = math.ceil(sum(lp_half_integral(g)) - 1e-9) if g.n else 0
    adj: Adjacency = {v: set(g.adj[v]) for v in range(g.n)}
    try:
        solver.search(adj, 0)
        done = True
    except _Stop:
        done = False
    cover = tuple(sorted(solver.best))
    upper = len(cover)
    lower = upper if done else min(root_lower, upper)
    return VcReport(
        cover=cover,
        lower=lower,
        upper=upper,
        optimal=done,
        elapsed=deadline.elapsed(),
        termination=Termination.COMPLETED if done else Termination.DEADLINE,
        nodes=solver.nodes,
    )


def solve_oct_vc(
    g: Graph,
    timeout: float | None = None,
    node_limit: int | None = None,
    reduce: bool = True,
) -> SolverReport:
    """Solve OCT end to end through the VC route, reducing the graph first."""
    from .reductions import identity_partition, lift_solution, reduce_fixpoint

    deadline = Deadline(timeout)
    part = reduce_fixpoint(g) if reduce else identity_partition(g)
    inst = to_vc_instance(part.reduced)
    remaining = None if timeout is None else max(0.0, timeout - deadline.elapsed())
    rep = solve_vc_exact(inst.graph, remaining, node_limit)
    s_reduced = from_vc_solution(inst, rep.cover)
    s = lift_solution(part, s_reduced)
    n_red = part.reduced.n
    fixed = len(part.v_oct)
    upper = len(s)
    lower = min(max(0, rep.lower - n_red) + fixed, upper)
    sol = OctSolution.checked(g, s, Source.VC)
    return SolverReport(
        solution=sol,
        lower=upper if rep.optimal else lower,
        upper=upper,
        optimal=rep.optimal,
        elapsed=deadline.elapsed(),
        seed=None,
        termination=rep.termination,
        iterations=rep.nodes,
    )
