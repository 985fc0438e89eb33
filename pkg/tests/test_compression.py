import random
from itertools import combinations, product

import pytest

from conftest import complete, complete_bipartite, cycle, path, random_small
from octsuite.compression import (
    CutInfeasible,
    IcConfig,
    _assignments,
    build_ordering,
    compress,
    default_level,
    min_vertex_cut,
    solve_ic,
)
from octsuite.errors import ContractViolation
from octsuite.graph import Graph, OctSolution, Source, degeneracy_ordering, verify_oct
from octsuite.oracle import brute_force_oct
from octsuite.report import Termination

# --- min_vertex_cut -------------------------------------------------------------


def _separates(g, cut, src, snk):
    blocked = set(cut)
    seen = set(src)
    stack = list(src)
    while stack:
        v = stack.pop()
        for w in g.adj[v]:
            if w not in blocked and w not in seen:
                seen.add(w)
                stack.append(w)
    return not (seen & set(snk))


def _brute_cut(g, src, snk):
    inner = [v for v in range(g.n) if v not in src and v not in snk]
    for k in range(len(inner) + 1):
        for cut in combinations(inner, k):
            if _separates(g, cut, src, snk):
                return k
    raise AssertionError


def test_cut_on_path():
    assert min_vertex_cut(path(3), {0}, {2}) == (1,)


def test_cut_two_disjoint_paths():
    g = Graph.from_edges(6, [(0, 1), (1, 2), (2, 5), (0, 3), (3, 4), (4, 5)])
    cut = min_vertex_cut(g, {0}, {5})
    assert len(cut) == 2 and _separates(g, cut, {0}, {5})


def test_cut_disconnected_is_empty():
    assert min_vertex_cut(Graph.empty(3), {0}, {2}) == ()


def test_cut_adjacent_terminals_signalled():
    with pytest.raises(CutInfeasible):
        min_vertex_cut(path(2), {0}, {1})


def test_cut_overlapping_terminals_rejected():
    with pytest.raises(ContractViolation):
        min_vertex_cut(path(3), {0, 1}, {1})


def test_cut_matches_subset_oracle():
    rng = random.Random(5)
    checked = 0
    for seed in range(300):
        g = random_small(seed, n_max=10, n_min=3)
        vs = list(range(g.n))
        rng.shuffle(vs)
        a = rng.randint(1, max(1, g.n // 3))
        src, snk = set(vs[:a]), set(vs[a : a + rng.randint(1, max(1, g.n // 3))])
        if not snk or any(w in snk for v in src for w in g.adj[v]):
            continue
        cut = min_vertex_cut(g, src, snk)
        assert not (set(cut) & (src | snk))
        assert _separates(g, cut, src, snk)
        assert len(cut) == _brute_cut(g, src, snk)
        checked += 1
    assert checked > 100


# --- assignment enumeration ------------------------------------------------------


def _valid(assign, adj_s, budget):
    if sum(o == 0 for o in assign) > budget:
        return False
    sided = [o for o in assign if o != 0]
    if sided and sided[0] != 1:
        return False
    return all(not (assign[i] == assign[j] != 0) for i in range(len(assign)) for j in adj_s[i])


@pytest.mark.parametrize("seed", range(12))
def test_assignments_complete_and_valid(seed):
    rng = random.Random(seed)
    k = rng.randint(1, 6)
    adj_s = [set() for _ in range(k)]
    for i, j in combinations(range(k), 2):
        if rng.random() < 0.4:
            adj_s[i].add(j)
            adj_s[j].add(i)
    budget = rng.randint(0, k)
    got = [tuple(a) for a in _assignments(list(range(k)), adj_s, budget)]
    expected = {a for a in product((0, 1, 2), repeat=k) if _valid(a, adj_s, budget)}
    assert len(got) == len(set(got))
    assert set(got) == expected


def test_assignments_follow_reflected_gray_order_when_unpruned():
    # with one vertex and no constraints beyond symmetry: T then L
    assert [tuple(a) for a in _assignments([0], [set()], 1)] == [(0,), (1,)]
    seq = [tuple(a) for a in _assignments([0, 1], [set(), set()], 2)]
    assert seq == [(0, 0), (0, 1), (1, 2), (1, 1), (1, 0)]


# --- compress ------------------------------------------------------------------


def test_compress_c5():
    out = compress(cycle(5), {0, 1})
    assert out is not None and len(out) == 1 and verify_oct(cycle(5), out)


def test_compress_triangle():
    out = compress(complete(3), {0, 1})
    assert out is not None and len(out) == 1
    assert compress(complete(3), {0}) is None


def test_compress_k5():
    out = compress(complete(5), {0, 1, 2, 3})
    assert out is not None and len(out) == 3 and verify_oct(complete(5), out)
    assert compress(complete(5), out) is None


def test_compress_rejects_infeasible():
    with pytest.raises(ContractViolation):
        compress(cycle(5), set())


def test_compress_contract_against_oracle():
    for seed in range(150):
        g = random_small(seed, n_max=11, n_min=4)
        opt, witness = brute_force_oct(g)
        extra = next((v for v in range(g.n) if v not in witness), None)
        if extra is not None:
            bigger = set(witness) | {extra}
            out = compress(g, bigger)
            assert out is not None and len(out) <= opt and verify_oct(g, out)
        assert opt == 0 or compress(g, witness) is None


# --- ordering and levels ------------------------------------------------------------


def test_level_zero_is_identity():
    g = random_small(4, n_max=9, n_min=9)
    assert build_ordering(g, IcConfig(level=0)) == tuple(range(g.n))


def test_level_one_puts_jumpstart_last():
    g = cycle(5)
    js = OctSolution.checked(g, [4], Source.ORACLE)
    assert build_ordering(g, IcConfig(level=1, jumpstart=js)) == (0, 1, 2, 3, 4)
    js = OctSolution.checked(g, [1], Source.ORACLE)
    assert build_ordering(g, IcConfig(level=1, jumpstart=js)) == (0, 2, 3, 4, 1)


def test_level_two_uses_reverse_degeneracy_of_suffix():
    g = complete(6)
    s = [0, 1, 2, 3]
    js = OctSolution.checked(g, s, Source.ORACLE)
    order = build_ordering(g, IcConfig(level=2, jumpstart=js))
    assert order[:2] == (4, 5)
    sub, back = g.induced(s)
    expected = tuple(back[i] for i in reversed(degeneracy_ordering(sub)[0]))
    assert order[2:] == expected


def test_infeasible_jumpstart_rejected():
    js = OctSolution(vertices=(), verified=False, source=Source.ORACLE)
    with pytest.raises(ContractViolation):
        build_ordering(cycle(5), IcConfig(level=1, jumpstart=js))


def test_default_level_follows_timeout_policy():
    assert default_level(0.01) == 1 and default_level(0.1) == 1
    assert default_level(1.0) == 2 and default_level(None) == 2


def test_bad_level_rejected():
    with pytest.raises(ValueError):
        IcConfig(level=3)


# --- solve_ic ---------------------------------------------------------------------


@pytest.mark.parametrize("g", [path(8), complete_bipartite(3, 4), Graph.empty(3), Graph.empty(0)])
def test_bipartite_is_zero_and_optimal(g):
    rep = solve_ic(g, IcConfig(level=1))
    assert rep.size == 0 and rep.optimal and rep.termination == Termination.COMPLETED


@pytest.mark.parametrize("level", [0, 1, 2])
def test_solve_ic_matches_oracle(level):
    for seed in range(60):
        g = random_small(seed, n_max=13)
        rep = solve_ic(g, IcConfig(level=level, seed=seed))
        assert rep.optimal and rep.solution.verified
        assert rep.size == brute_force_oct(g)[0]
        assert rep.lower == rep.upper == rep.size


def test_anytime_sandwich_and_gap_monotone():
    for seed in range(30):
        g = random_small(seed, n_max=12, n_min=8)
        opt = brute_force_oct(g)[0]
        for level in (0, 1, 2):
            states = []
            solve_ic(g, IcConfig(level=level, seed=seed), on_state=states.append)
            gaps = [st.upper - st.lower for st in states]
            assert all(st.lower <= opt <= st.upper for st in states)
            assert all(a >= b for a, b in zip(gaps, gaps[1:]))
            assert states[-1].lower == states[-1].upper == opt
            for st in states:
                prefix = set(st.ordering[: st.frontier])
                assert set(st.current) <= prefix
                sub, back = g.induced(prefix)
                inv = {v: i for i, v in enumerate(back)}
                assert verify_oct(sub, [inv[v] for v in st.current])


def test_iteration_budget_stops_early_with_valid_bounds():
    g = random_small(8, n_max=14, n_min=14)
    opt = brute_force_oct(g)[0]
    full = solve_ic(g, IcConfig(level=0))
    part = solve_ic(g, IcConfig(level=0, max_iterations=full.iterations // 2))
    assert not part.optimal and part.termination == Termination.DEADLINE
    assert part.lower <= opt <= part.upper
    assert part.solution.verified and part.size == part.upper


def test_expired_deadline_returns_feasible_solution():
    g = random_small(9, n_max=14, n_min=14)
    rep = solve_ic(g, IcConfig(level=0, timeout=1e-9))
    assert rep.solution.verified
    assert rep.lower <= brute_force_oct(g)[0] <= rep.upper


def test_solve_ic_is_deterministic():
    g = random_small(12, n_max=14, n_min=14)
    cfg = IcConfig(level=2, seed=77)
    assert solve_ic(g, cfg).solution == solve_ic(g, cfg).solution
