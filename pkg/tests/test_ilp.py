import shlex
import sys

import pytest

from conftest import complete, complete_bipartite, cycle, path, random_small
from octsuite.errors import ConfigurationError, IntegrationError, ParseError
from octsuite.graph import Graph, verify_oct
from octsuite.ilp import (
    BUDGET_COMMAND,
    DEFAULT_COMMAND,
    enumerate_optimum,
    export_oct_ilp,
    export_vc_ilp,
    invoke_external,
    parse_lp,
    parse_solution,
)
from octsuite.oracle import brute_force_oct
from octsuite.report import Termination
from octsuite.vc import to_vc_instance

PY = shlex.quote(sys.executable)


def _writer(content: str) -> str:
    """Command template for a fake solver that writes ``content`` as its solution."""
    code = f"import sys; open(sys.argv[1], 'w').write({content!r})"
    return f"{PY} -c {shlex.quote(code)} {{output}} {{input}}"


# --- export ------------------------------------------------------------------------


def test_oct_export_of_single_edge():
    text = export_oct_ilp(path(2))
    assert " lo0: s0 + s1 + c0 + c1 >= 1" in text
    assert " hi0: s0 + s1 - c0 - c1 <= 1" in text
    assert text.splitlines()[-1] == "End" and text.endswith("\n")
    assert "\\ recover S" in text


def test_vc_export_of_triangle():
    text = export_vc_ilp(complete(3))
    model = parse_lp(text)
    assert model.objective == {"x0": 1.0, "x1": 1.0, "x2": 1.0}
    assert [c.coeffs for c in model.constraints] == [
        {"x0": 1.0, "x1": 1.0}, {"x0": 1.0, "x2": 1.0}, {"x1": 1.0, "x2": 1.0}
    ]
    assert model.binaries == ["x0", "x1", "x2"]


def test_long_objective_wraps_and_parses():
    g = Graph.empty(30)
    text = export_vc_ilp(g)
    assert max(len(ln) for ln in text.splitlines()) < 120
    assert len(parse_lp(text).objective) == 30


def test_empty_graph_exports():
    model = parse_lp(export_oct_ilp(Graph.empty(0)))
    assert model.constraints == [] and model.objective == {}
    assert enumerate_optimum(model) == (0.0, {})


def test_exports_are_byte_deterministic():
    g = random_small(3, n_max=12, n_min=12)
    assert export_oct_ilp(g) == export_oct_ilp(g)
    assert export_vc_ilp(g) == export_vc_ilp(g)
    assert export_oct_ilp(g).isascii()


def test_constraint_counts():
    g = random_small(6, n_max=10, n_min=10)
    assert len(parse_lp(export_oct_ilp(g)).constraints) == 2 * g.m
    assert len(parse_lp(export_vc_ilp(g)).constraints) == g.m


# --- parser -----------------------------------------------------------------------------


def test_parse_handwritten_model():
    model = parse_lp(
        "Maximize\n obj: 2 x + 3 y\nSubject To\n c1: x + y\n   <= 1\n -x + y >= -1\nBinaries\n x y\nEnd\n"
    )
    assert model.sense == "max"
    assert model.objective == {"x": 2.0, "y": 3.0}
    assert model.constraints[0].coeffs == {"x": 1.0, "y": 1.0} and model.constraints[0].rhs == 1.0
    assert model.constraints[1].coeffs == {"x": -1.0, "y": 1.0} and model.constraints[1].op == ">="
    assert enumerate_optimum(model)[0] == 3.0


def test_parse_rejects_garbage():
    with pytest.raises(ParseError):
        parse_lp("x + y >= 1\n")
    with pytest.raises(ParseError):
        parse_lp("Minimize\n x\nSubject To\n c: x + ? >= 1\nEnd\n")


# --- enumerator -------------------------------------------------------------------------


def test_enumerate_triangle_direct_form():
    opt, values = enumerate_optimum(parse_lp(export_oct_ilp(complete(3))))
    assert opt == 1
    s = [v for v in range(3) if values[f"c{v}"] == 1]
    assert verify_oct(complete(3), s)


def test_enumerate_single_edge_and_c5_cover_form():
    assert enumerate_optimum(parse_lp(export_vc_ilp(path(2))))[0] == 1
    assert enumerate_optimum(parse_lp(export_vc_ilp(cycle(5))))[0] == 3


def test_enumerate_detects_infeasibility():
    model = parse_lp("Minimize\n x\nSubject To\n a: x >= 1\n b: x <= 0\nBinary\n x\nEnd\n")
    assert enumerate_optimum(model) is None


def test_formulations_agree_with_oracle():
    # [DERIVED] both forms against brute force; the direct form is slow, so n <= 10
    for seed in range(60):
        g = random_small(seed, n_max=10)
        opt = brute_force_oct(g)[0]
        assert enumerate_optimum(parse_lp(export_oct_ilp(g)))[0] == opt
        assert enumerate_optimum(parse_lp(export_vc_ilp(to_vc_instance(g).graph)))[0] == g.n + opt


# --- solution files -----------------------------------------------------------------


def test_parse_plain_solution():
    values, obj, status = parse_solution("status optimal\nobjective 2\nx0 1\nx1 = 0\n# comment\n")
    assert values == {"x0": 1.0, "x1": 0.0} and obj == 2.0 and status == "optimal"


def test_parse_cbc_solution():
    text = "Optimal - objective value 1.00000000\n      0 c0   1   1\n      1 c1   0   1\n"
    values, obj, status = parse_solution(text)
    assert status == "optimal" and obj == 1.0 and values == {"c0": 1.0, "c1": 0.0}


def test_parse_solution_garbage():
    with pytest.raises(IntegrationError):
        parse_solution("x0 maybe\n")
    with pytest.raises(IntegrationError):
        parse_solution("a b c\n")


# --- external driver ------------------------------------------------------------------


@pytest.mark.parametrize("form", ["vc", "oct"])
def test_shim_solves_small_instances(form):
    for seed in (1, 2, 3):
        g = random_small(seed, n_max=9, n_min=6)
        rep = invoke_external(g, DEFAULT_COMMAND, timeout=30, form=form)
        assert rep.optimal and rep.solution.verified
        assert rep.size == brute_force_oct(g)[0]


def test_shim_bipartite_gives_empty_set():
    rep = invoke_external(complete_bipartite(3, 3), DEFAULT_COMMAND, timeout=30)
    assert rep.size == 0 and rep.optimal


def test_budget_command_fills_node_placeholder():
    rep = invoke_external(cycle(5), BUDGET_COMMAND, timeout=30, nodes=50)
    assert rep.solution.verified and rep.size == 1


def test_missing_binary_is_configuration_error():
    with pytest.raises(ConfigurationError):
        invoke_external(cycle(5), "/nonexistent/solver {input} {output}", timeout=5)


def test_missing_placeholder_is_configuration_error():
    with pytest.raises(ConfigurationError):
        invoke_external(cycle(5), "solver {input}", timeout=5)


def test_no_solution_file_is_integration_error():
    with pytest.raises(IntegrationError):
        invoke_external(cycle(5), f"{PY} -c pass {{input}} {{output}}", timeout=5)


def test_unreadable_solution_is_integration_error():
    with pytest.raises(IntegrationError) as exc:
        invoke_external(cycle(5), _writer("what is this\n"), timeout=5)
    assert "what is this" in exc.value.raw_output


def test_infeasible_report_is_integration_error():
    with pytest.raises(IntegrationError):
        invoke_external(cycle(5), _writer("status infeasible\n"), timeout=5)


def test_wrong_solution_is_rejected():
    # a "solver" claiming the empty cover is optimal
    with pytest.raises(IntegrationError):
        invoke_external(cycle(5), _writer("status optimal\nobjective 0\nx0 0\n"), timeout=5, form="oct")


def test_no_incumbent_falls_back_to_all_vertices():
    rep = invoke_external(cycle(5), _writer("status unknown\n"), timeout=5)
    assert rep.size == 5 and not rep.optimal
    assert rep.termination == Termination.DEADLINE and rep.lower == 0
