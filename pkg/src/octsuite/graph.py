"""Graph representation, corpus parsers, sanitization and OCT certificates."""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import Iterable, Iterator, Sequence

from .errors import ContractViolation, ParseError

Edge = tuple[int, int]


@dataclass(frozen=True)
class Graph:
    """Immutable simple undirected graph on vertices ``0..n-1``.

    ``adj[v]`` is a strictly increasing tuple of neighbours. Build instances
    with :meth:`from_edges`; the raw constructor trusts its input.
    """

    n: int
    adj: tuple[tuple[int, ...], ...]
    m: int = field(init=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "m", sum(len(a) for a in self.adj) // 2)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Edge]) -> Graph:
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ContractViolation(f"edge ({u}, {v}) outside 0..{n - 1}")
            if u == v:
                continue
            nbrs[u].add(v)
            nbrs[v].add(u)
        return cls(n, tuple(tuple(sorted(s)) for s in nbrs))

    @classmethod
    def empty(cls, n: int = 0) -> Graph:
        return cls(n, tuple(() for _ in range(n)))

    def edges(self) -> Iterator[Edge]:
        """Edges ``(u, v)`` with ``u < v`` in lexicographic order."""
        for u, nb in enumerate(self.adj):
            for v in nb:
                if v > u:
                    yield (u, v)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def induced(self, vertices: Iterable[int]) -> tuple[Graph, tuple[int, ...]]:
        """Induced subgraph relabelled in ascending order of the kept ids.

        Returns the subgraph and the map from new id to old id.
        """
        keep = tuple(sorted(set(vertices)))
        index = {v: i for i, v in enumerate(keep)}
        adj = tuple(
            tuple(index[u] for u in self.adj[v] if u in index) for v in keep
        )
        return Graph(len(keep), adj), keep

    def to_networkx(self):
        import networkx as nx

        h = nx.Graph()
        h.add_nodes_from(range(self.n))
        h.add_edges_from(self.edges())
        return h


@dataclass(frozen=True)
class RawGraph:
    """Parsed but unsanitized input: may hold self-loops, zero weights, duplicates.

    ``numeric_labels`` marks inputs whose labels are known to be vertex ids
    (canonical files), so relabelling keeps their numeric order.
    """

    labels: list[str]
    edges: list[tuple[str, str, float]]
    numeric_labels: bool = False


class Side(IntEnum):
    LEFT = 0
    RIGHT = 1
    DELETED = 2


@dataclass(frozen=True)
class TwoColoring:
    color: tuple[Side, ...]

    def is_valid_for(self, g: Graph) -> bool:
        for u, v in g.edges():
            cu, cv = self.color[u], self.color[v]
            if cu != Side.DELETED and cu == cv:
                return False
        return True


class Source(str, Enum):
    DFS = "heuristic-dfs"
    BFS = "heuristic-bfs"
    LUBY = "heuristic-luby"
    MINDEG = "heuristic-mindeg"
    ENSEMBLE = "ensemble"
    IC = "ic"
    VC = "vc"
    ILP = "ilp"
    ORACLE = "oracle"


@dataclass(frozen=True)
class OctSolution:
    vertices: tuple[int, ...]
    verified: bool
    source: Source

    @property
    def size(self) -> int:
        return len(self.vertices)

    @classmethod
    def checked(cls, g: Graph, vertices: Iterable[int], source: Source) -> OctSolution:
        s = tuple(sorted(set(vertices)))
        return cls(s, verify_oct(g, s), source)


# ---------------------------------------------------------------------------
# parsing


def _tokens(data: bytes | str) -> Iterator[tuple[str, int]]:
    text = data.decode("ascii", errors="replace") if isinstance(data, bytes) else data
    for lineno, line in enumerate(text.splitlines(), start=1):
        for tok in line.split():
            yield tok, lineno


def _number(tok: str, lineno: int) -> float:
    try:
        return int(tok)
    except ValueError:
        pass
    try:
        return float(tok)
    except ValueError:
        raise ParseError(f"non-numeric token {tok!r}", lineno) from None


def _integer(tok: str, lineno: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected integer {what}, got {tok!r}", lineno) from None


def parse_qubo(data: bytes | str) -> list[RawGraph]:
    """Parse an OR-library style QUBO file holding one or more instances.

    Layout: instance count, then per instance ``n nnz`` followed by ``nnz``
    triples ``i j q`` with 1-indexed ``i, j``. Labels are kept as the
    original 1-indexed ids (as strings).
    """
    toks = list(_tokens(data))
    pos = 0
    last_line = toks[-1][1] if toks else 1

    def take(what: str) -> tuple[str, int]:
        nonlocal pos
        if pos >= len(toks):
            raise ParseError(f"truncated input, expected {what}", last_line)
        item = toks[pos]
        pos += 1
        return item

    tok, ln = take("instance count")
    count = _integer(tok, ln, "instance count")
    if count < 0:
        raise ParseError("negative instance count", ln)
    out: list[RawGraph] = []
    for _ in range(count):
        tok, ln = take("vertex count")
        n = _integer(tok, ln, "vertex count")
        tok, ln = take("entry count")
        nnz = _integer(tok, ln, "entry count")
        if n < 0 or nnz < 0:
            raise ParseError("negative header value", ln)
        edges: list[tuple[str, str, float]] = []
        for _ in range(nnz):
            ti, li = take("row index")
            tj, lj = take("column index")
            tq, lq = take("coefficient")
            i = _integer(ti, li, "row index")
            j = _integer(tj, lj, "column index")
            q = _number(tq, lq)
            if not (1 <= i <= n and 1 <= j <= n):
                raise ParseError(f"index ({i}, {j}) outside 1..{n}", li)
            edges.append((str(i), str(j), q))
        out.append(RawGraph([str(i) for i in range(1, n + 1)], edges))
    if pos != len(toks):
        raise ParseError("trailing data after last instance", toks[pos][1])
    return out


def _canonical_header(rows: list[tuple[int, list[str]]]) -> tuple[int, int] | None:
    if not rows or len(rows[0][1]) != 2:
        return None
    try:
        n, m = (int(t) for t in rows[0][1])
    except ValueError:
        return None
    if n < 0 or m != len(rows) - 1:
        return None
    for _, toks in rows[1:]:
        if len(toks) != 2:
            return None
        for t in toks:
            if not t.isdigit() or int(t) >= n:
                return None
    return n, m


def parse_edge_list(data: bytes | str) -> RawGraph:
    """Parse whitespace-separated label pairs; ``#`` lines are comments.

    A leading ``n m`` line followed by exactly ``m`` integer pairs in
    ``0..n-1`` is recognised as the canonical header, which keeps isolated
    vertices and numeric label order.
    """
    text = data.decode("utf-8", errors="replace") if isinstance(data, bytes) else data
    rows: list[tuple[int, list[str]]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        toks = stripped.split()
        if len(toks) % 2:
            raise ParseError(f"odd token count ({len(toks)})", lineno)
        rows.append((lineno, toks))

    header = _canonical_header(rows)
    if header is not None:
        n, _ = header
        edges = [(a, b, 1) for _, (a, b) in rows[1:]]
        return RawGraph([str(i) for i in range(n)], edges, numeric_labels=True)

    labels: dict[str, None] = {}
    edges = []
    for _, toks in rows:
        for a, b in zip(toks[::2], toks[1::2]):
            labels.setdefault(a)
            labels.setdefault(b)
            edges.append((a, b, 1))
    return RawGraph(list(labels), edges)


def _numeric_key(label: str) -> tuple:
    try:
        return (0, int(label), "")
    except ValueError:
        return (1, 0, label)


def sanitize(raw: RawGraph, numeric: bool = False) -> tuple[Graph, dict[str, int]]:
    """Drop self-loops and zero-weight edges, merge duplicates, relabel to 0..n-1.

    Labels are ordered as strings (so ``"10" < "2"``) unless ``numeric`` is
    set or the raw graph carries numeric labels.
    """
    labels = {str(x): None for x in raw.labels}
    for a, b, _ in raw.edges:
        labels.setdefault(str(a))
        labels.setdefault(str(b))
    key = _numeric_key if (numeric or raw.numeric_labels) else None
    order = sorted(labels, key=key)
    label_map = {lab: i for i, lab in enumerate(order)}

    kept: set[Edge] = set()
    for a, b, w in raw.edges:
        u, v = label_map[str(a)], label_map[str(b)]
        if u == v or w == 0:
            continue
        kept.add((min(u, v), max(u, v)))
    return Graph.from_edges(len(order), kept), label_map


def write_canonical(g: Graph) -> bytes:
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return ("\n".join(lines) + "\n").encode("ascii")


def read_graph(data: bytes | str, numeric: bool = False) -> Graph:
    """Sanitized graph from an edge-list or canonical file."""
    return sanitize(parse_edge_list(data), numeric=numeric)[0]


# ---------------------------------------------------------------------------
# certificates


def _two_color(g: Graph, deleted: Sequence[bool] | None) -> list[Side] | None:
    color = [Side.DELETED if deleted and deleted[v] else None for v in range(g.n)]
    for root in range(g.n):
        if color[root] is not None:
            continue
        color[root] = Side.LEFT
        queue = deque([root])
        while queue:
            u = queue.popleft()
            cu = color[u]
            for w in g.adj[u]:
                cw = color[w]
                if cw is None:
                    color[w] = Side.RIGHT if cu == Side.LEFT else Side.LEFT
                    queue.append(w)
                elif cw == cu:
                    return None
    return color  # type: ignore[return-value]


def is_bipartite(g: Graph) -> TwoColoring | None:
    """BFS two-colouring from the lowest id of each component, or None."""
    color = _two_color(g, None)
    return None if color is None else TwoColoring(tuple(color))


def verify_oct(g: Graph, s: Iterable[int]) -> bool:
    """True iff deleting ``s`` from ``g`` leaves a bipartite graph."""
    deleted = [False] * g.n
    for v in s:
        if not 0 <= v < g.n:
            raise ContractViolation(f"vertex {v} outside 0..{g.n - 1}")
        deleted[v] = True
    return _two_color(g, deleted) is not None


def oct_coloring(g: Graph, s: Iterable[int]) -> TwoColoring | None:
    deleted = [False] * g.n
    for v in s:
        deleted[v] = True
    color = _two_color(g, deleted)
    return None if color is None else TwoColoring(tuple(color))


def degeneracy_ordering(g: Graph) -> tuple[list[int], int]:
    """Repeatedly remove a minimum-degree vertex (lowest id on ties).

    Returns the removal order and the degeneracy, the largest degree seen at
    removal time.
    """
    deg = [len(a) for a in g.adj]
    heap = [(d, v) for v, d in enumerate(deg)]
    heapq.heapify(heap)
    removed = [False] * g.n
    order: list[int] = []
    d_max = 0
    while heap:
        d, v = heapq.heappop(heap)
        if removed[v] or d != deg[v]:
            continue
        removed[v] = True
        order.append(v)
        d_max = max(d_max, d)
        for w in g.adj[v]:
            if not removed[w]:
                deg[w] -= 1
                heapq.heappush(heap, (deg[w], w))
    return order, d_max
