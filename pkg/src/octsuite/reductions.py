"""Preprocessing that splits V into removable, forced-OCT, forced-bipartite and rest.

OCT-level rules (applied to exhaustion, ascending vertex id):

* ``R1`` deletes vertices of degree at most one.
* ``R2`` deletes the edges of every bipartite biconnected block; odd cycles
  never leave a block, so this keeps the set of odd cycles intact. Vertices
  left without edges are removed.
* ``R3`` deletes ``v`` from an induced four-cycle ``u-v-w-x`` in which ``v``
  and ``x`` both have exactly the neighbours ``{u, w}``; the lowest-id twin
  survives.
* ``R4`` puts ``v`` (degree at least three) into the transversal when two
  adjacent degree-two vertices ``a, b`` hang off it as a triangle: any optimum holding ``a`` or
  ``b`` may trade it for ``v``, after which ``a-b`` is a loose edge.

VC-level rules run :func:`octsuite.vc.vc_fixings` on the doubled graph: a
vertex whose two copies are both forced into the cover joins the
transversal, a vertex with an excluded copy is labelled bipartite.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field
from typing import Iterable

import networkx as nx

from .errors import ContractViolation
from .graph import Edge, Graph
from .vc import to_vc_instance, vc_fixings


@dataclass(frozen=True)
class RuleEvent:
    rule: str
    vertices: tuple[int, ...]


@dataclass(frozen=True)
class ReductionPartition:
    """Vertex partition ``Vr | Vo | Vb | V'`` plus the reduced graph.

    All vertex ids are original ids except inside ``reduced``, whose vertex
    ``i`` is original vertex ``lift_map[i]``.
    """

    n: int
    v_removed: tuple[int, ...]
    v_oct: tuple[int, ...]
    v_bip: tuple[int, ...]
    v_rest: tuple[int, ...]
    e_removed: tuple[Edge, ...]
    reduced: Graph
    lift_map: tuple[int, ...]
    log: tuple[RuleEvent, ...] = field(default=(), compare=False)

    @property
    def is_identity(self) -> bool:
        return not (self.v_removed or self.v_oct or self.v_bip)

    def to_json(self) -> str:
        record = {
            "n": self.n,
            "v_removed": list(self.v_removed),
            "v_oct": list(self.v_oct),
            "v_bip": list(self.v_bip),
            "v_rest": list(self.v_rest),
            "e_removed": [list(e) for e in self.e_removed],
            "lift_map": list(self.lift_map),
            "log": [[ev.rule, list(ev.vertices)] for ev in self.log],
        }
        return json.dumps(record, indent=1, sort_keys=True) + "\n"


class _Work:
    """Mutable working graph in original vertex ids."""

    def __init__(self, g: Graph):
        self.g = g
        self.adj: dict[int, set[int]] = {v: set(g.adj[v]) for v in range(g.n)}
        self.removed: set[int] = set()
        self.oct: set[int] = set()
        self.bip: set[int] = set()
        self.log: list[RuleEvent] = []

    def delete(self, v: int) -> None:
        for w in self.adj.pop(v):
            self.adj[w].discard(v)

    # -- OCT rules ---------------------------------------------------------

    def rule_low_degree(self) -> bool:
        changed = False
        heap = [v for v, nb in self.adj.items() if len(nb) <= 1]
        heapq.heapify(heap)
        while heap:
            v = heapq.heappop(heap)
            if v not in self.adj or len(self.adj[v]) > 1:
                continue
            nbrs = sorted(self.adj[v])
            self.delete(v)
            self.removed.add(v)
            self.log.append(RuleEvent("R1", (v,)))
            changed = True
            for w in nbrs:
                if len(self.adj[w]) <= 1:
                    heapq.heappush(heap, w)
        return changed

    def rule_bipartite_blocks(self) -> bool:
        h = nx.Graph()
        h.add_nodes_from(sorted(self.adj))
        h.add_edges_from(
            (u, w) for u in sorted(self.adj) for w in sorted(self.adj[u]) if u < w
        )
        doomed: list[Edge] = []
        for block in nx.biconnected_component_edges(h):
            edges = sorted((min(e), max(e)) for e in block)
            sub = nx.Graph(edges)
            if nx.is_bipartite(sub):
                doomed.extend(edges)
        if not doomed:
            return False
        doomed.sort()
        touched: set[int] = set()
        for u, w in doomed:
            self.adj[u].discard(w)
            self.adj[w].discard(u)
            touched.update((u, w))
        self.log.append(RuleEvent("R2-edges", tuple(x for e in doomed for x in e)))
        for v in sorted(touched):
            if not self.adj[v]:
                self.delete(v)
                self.removed.add(v)
                self.log.append(RuleEvent("R2", (v,)))
        return True

    def rule_four_cycle_twins(self) -> bool:
        groups: dict[tuple[int, int], list[int]] = {}
        for v in sorted(self.adj):
            if len(self.adj[v]) == 2:
                u, w = sorted(self.adj[v])
                if w not in self.adj[u]:
                    groups.setdefault((u, w), []).append(v)
        changed = False
        for (u, w), twins in sorted(groups.items()):
            keep = twins[0]
            for v in twins[1:]:
                # earlier deletions in this pass may have broken the pattern
                if not (
                    self._twin_of(keep, u, w)
                    and self._twin_of(v, u, w)
                    and w not in self.adj[u]
                ):
                    continue
                self.delete(v)
                self.removed.add(v)
                self.log.append(RuleEvent("R3", (v, keep, u, w)))
                changed = True
        return changed

    def rule_triangle_petals(self) -> bool:
        changed = False
        for a in sorted(self.adj):
            if a not in self.adj or len(self.adj[a]) != 2:
                continue
            for b in sorted(self.adj[a]):
                if b < a or len(self.adj[b]) != 2:
                    continue
                (v,) = self.adj[a] - {b}
                # a bare triangle is left alone; it is its own component
                if self.adj[b] != {a, v} or len(self.adj[v]) < 3:
                    continue
                self.delete(v)
                self.oct.add(v)
                self.bip.discard(v)
                self.log.append(RuleEvent("R4", (v, a, b)))
                changed = True
                break
        return changed

    def _twin_of(self, v: int, u: int, w: int) -> bool:
        return v in self.adj and self.adj[v] == {u, w}

    def oct_rules(self) -> bool:
        any_change = False
        while True:
            step = self.rule_low_degree()
            step = self.rule_bipartite_blocks() or step
            step = self.rule_four_cycle_twins() or step
            step = self.rule_triangle_petals() or step
            if not step:
                return any_change
            any_change = True

    # -- VC rules ----------------------------------------------------------

    def vc_rules(self) -> bool:
        changed = False
        for v in sorted(self.adj):
            if not self.adj[v]:
                self.delete(v)
                self.removed.add(v)
                self.log.append(RuleEvent("VC-isolated", (v,)))
                changed = True
        if not self.adj:
            return changed
        h, back = self.current()
        inst = to_vc_instance(h)
        forced_in, forced_out = vc_fixings(inst.graph)
        k = h.n
        to_oct = []
        for i, orig in enumerate(back):
            if i in forced_in and i + k in forced_in:
                to_oct.append(orig)
            elif i in forced_out or i + k in forced_out:
                if orig not in self.bip:
                    self.bip.add(orig)
                    self.log.append(RuleEvent("VC-bip", (orig,)))
        for v in to_oct:
            self.delete(v)
            self.oct.add(v)
            self.bip.discard(v)
            self.log.append(RuleEvent("VC-oct", (v,)))
        return changed or bool(to_oct)

    # -- output ------------------------------------------------------------

    def current(self) -> tuple[Graph, tuple[int, ...]]:
        alive = tuple(sorted(self.adj))
        index = {v: i for i, v in enumerate(alive)}
        adj = tuple(tuple(sorted(index[w] for w in self.adj[v])) for v in alive)
        return Graph(len(alive), adj), alive

    def partition(self) -> ReductionPartition:
        reduced, alive = self.current()
        kept_edges = {(alive[u], alive[v]) for u, v in reduced.edges()}
        bip = tuple(sorted(v for v in self.bip if v in self.adj))
        rest = tuple(v for v in alive if v not in self.bip)
        return ReductionPartition(
            n=self.g.n,
            v_removed=tuple(sorted(self.removed)),
            v_oct=tuple(sorted(self.oct)),
            v_bip=bip,
            v_rest=rest,
            e_removed=tuple(e for e in self.g.edges() if e not in kept_edges),
            reduced=reduced,
            lift_map=alive,
            log=tuple(self.log),
        )


def identity_partition(g: Graph) -> ReductionPartition:
    return _Work(g).partition()


def reduce_oct_rules(g: Graph) -> ReductionPartition:
    work = _Work(g)
    work.oct_rules()
    return work.partition()


def reduce_vc_rules(g: Graph) -> ReductionPartition:
    work = _Work(g)
    work.vc_rules()
    return work.partition()


def reduce_fixpoint(g: Graph) -> ReductionPartition:
    """Alternate OCT-level and VC-level rules until neither changes the graph."""
    work = _Work(g)
    while True:
        changed = work.oct_rules()
        changed = work.vc_rules() or changed
        if not changed:
            return work.partition()


def lift_solution(p: ReductionPartition, s_reduced: Iterable[int]) -> tuple[int, ...]:
    """Map a transversal of ``p.reduced`` back to the original graph.

    Adds the forced vertices, then undoes four-cycle twin deletions in
    reverse: a surviving twin in the solution whose cycle partners are both
    outside it is swapped for the lower partner, which keeps the size and
    makes the deleted twin harmless again.
    """
    s: set[int] = set(p.v_oct)
    for i in s_reduced:
        if not 0 <= i < p.reduced.n:
            raise ContractViolation(f"vertex {i} outside reduced graph 0..{p.reduced.n - 1}")
        s.add(p.lift_map[i])
    for ev in reversed(p.log):
        if ev.rule != "R3":
            continue
        _, keep, u, w = ev.vertices
        if keep in s and u not in s and w not in s:
            s.discard(keep)
            s.add(u)
    return tuple(sorted(s))
