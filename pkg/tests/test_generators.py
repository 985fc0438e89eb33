import math
import statistics

import pytest

from conftest import complete, cycle
from octsuite.generators import (
    GeneratorConfig,
    ba_edge_count,
    barabasi_albert,
    chung_lu,
    chung_lu_probability,
    erdos_renyi,
    lookalike_configs,
    tunable_oct,
)
from octsuite.graph import Graph, is_bipartite
from octsuite.oracle import brute_force_oct

SEEDS = range(40)


def _within_3_sigma(samples, mean, var):
    # sample mean of independent draws against the known law
    sigma = math.sqrt(var / len(samples))
    return abs(statistics.fmean(samples) - mean) <= 3 * sigma


# --- Erdos-Renyi -------------------------------------------------------------------


def test_er_extremes():
    assert erdos_renyi(10, 0.0, 3).m == 0
    assert erdos_renyi(10, 1.0, 3) == complete(10)
    assert erdos_renyi(0, 0.5, 1).n == 0


def test_er_edge_count_law():
    n, p = 60, 0.1
    pairs = n * (n - 1) // 2
    counts = [erdos_renyi(n, p, s).m for s in SEEDS]
    assert _within_3_sigma(counts, pairs * p, pairs * p * (1 - p))


def test_er_is_seed_deterministic():
    assert erdos_renyi(30, 0.2, 7) == erdos_renyi(30, 0.2, 7)
    assert erdos_renyi(30, 0.2, 7) != erdos_renyi(30, 0.2, 8)


def test_er_rejects_bad_p():
    with pytest.raises(ValueError):
        erdos_renyi(5, 1.5, 1)


# --- tunable OCT -----------------------------------------------------------------


def test_tunable_without_pool_is_bipartite():
    for s in SEEDS:
        assert is_bipartite(tunable_oct(30, 0.5, 0, 0.5, s))


def test_tunable_full_pool_is_er():
    for s in range(10):
        assert tunable_oct(25, 0.3, 25, 0.5, s) == erdos_renyi(25, 0.3, s)


def test_tunable_pool_bounds_optimum():
    for s in range(30):
        g = tunable_oct(12, 0.5, 3, 0.5, s)
        assert brute_force_oct(g)[0] <= 3
        rest, _ = g.induced(range(3, 12))
        assert is_bipartite(rest)


def test_tunable_rejects_large_pool():
    with pytest.raises(ValueError):
        tunable_oct(5, 0.5, 6, 0.5, 1)


# --- Chung-Lu ----------------------------------------------------------------------


def test_chung_lu_zero_degrees():
    assert chung_lu([0, 0, 0], 1).m == 0
    assert chung_lu([], 1).n == 0


def test_chung_lu_single_pair():
    probs, clamped = chung_lu_probability([1, 1])
    assert probs[0][1] == 0.5 and clamped == 0


def test_chung_lu_clamping_counted():
    probs, clamped = chung_lu_probability([10, 10, 1])
    assert probs[0][1] == 1.0 and clamped == 1
    assert probs[0][2] == pytest.approx(10 / 21)


def test_chung_lu_regular_degree_law():
    n, d = 80, 6
    q = d * d / (n * d)
    pairs = n * (n - 1) // 2
    counts = [chung_lu([d] * n, s).m for s in SEEDS]
    assert _within_3_sigma(counts, pairs * q, pairs * q * (1 - q))


def test_chung_lu_rejects_negative():
    with pytest.raises(ValueError):
        chung_lu([1, -1], 1)


# --- Barabasi-Albert --------------------------------------------------------------------


@pytest.mark.parametrize("n, c", [(5, 1), (20, 2), (40, 3), (4, 3)])
def test_ba_edge_count(n, c):
    assert ba_edge_count(n, c) == comb_count(n, c)
    for s in range(5):
        g = barabasi_albert(n, c, s)
        assert g.m == ba_edge_count(n, c)
        assert all(g.degree(v) >= c for v in range(n))


def comb_count(n, c):
    return c * (c + 1) // 2 + c * (n - c - 1)


def test_ba_is_heavier_tailed_than_er():
    n, c = 200, 2
    p = ba_edge_count(n, c) / (n * (n - 1) / 2)
    wins = 0
    for s in range(100):
        ba = barabasi_albert(n, c, s)
        er = erdos_renyi(n, p, s)
        wins += max(ba.degree(v) for v in range(n)) > max(er.degree(v) for v in range(n))
    assert wins >= 95


def test_ba_rejects_bad_c():
    with pytest.raises(ValueError):
        barabasi_albert(3, 3, 1)
    with pytest.raises(ValueError):
        barabasi_albert(3, 0, 1)


# --- configs -----------------------------------------------------------------------------


def test_config_validation_and_dict():
    with pytest.raises(ValueError):
        GeneratorConfig("small_world")
    with pytest.raises(ValueError):
        GeneratorConfig("erdos_renyi", n=5, p=2.0)
    with pytest.raises(ValueError):
        GeneratorConfig("tunable_oct", n=5, p=0.5, n_o=6, b=0.5)
    cfg = GeneratorConfig("chung_lu", seed=3, degrees=(1, 2, 1))
    assert cfg.to_dict() == {"family": "chung_lu", "seed": 3, "degrees": [1, 2, 1]}
    assert cfg.generate() == chung_lu((1, 2, 1), 3)


def test_lookalike_of_k4():
    cfgs = {c.family: c for c in lookalike_configs(complete(4), 2, seed=5)}
    assert set(cfgs) == {"erdos_renyi", "tunable_oct", "chung_lu", "barabasi_albert"}
    assert cfgs["erdos_renyi"].p == 1.0
    assert cfgs["tunable_oct"].n_o == 2
    assert cfgs["chung_lu"].degrees == (3, 3, 3, 3)
    assert cfgs["barabasi_albert"].c == 2
    assert all(c.seed == 5 for c in cfgs.values())
    assert cfgs["erdos_renyi"].generate() == complete(4)


def test_lookalike_of_edgeless_graph_has_no_attachment_model():
    fams = [c.family for c in lookalike_configs(Graph.empty(5), 0)]
    assert "barabasi_albert" not in fams and "chung_lu" in fams


def test_lookalike_sizes_match():
    g = cycle(9)
    for cfg in lookalike_configs(g, 1):
        assert cfg.generate().n == 9


def test_lookalike_rejects_impossible_bound():
    with pytest.raises(ValueError):
        lookalike_configs(cycle(5), 6)
