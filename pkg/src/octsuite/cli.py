"""Command-line entry point.

Exit codes: 0 ok, 1 invalid request, 2 parse error, 3 refused (oracle cap),
4 external-solver integration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from . import bench
from .compression import IcConfig, default_level, solve_ic
from .errors import ConfigurationError, ContractViolation, IntegrationError, ParseError, RefusedError
from .generators import FAMILIES, GeneratorConfig, lookalike_configs
from .graph import Graph, parse_edge_list, parse_qubo, sanitize, write_canonical
from .heuristics import HEURISTICS, EnsembleConfig, ensemble
from .ilp import DEFAULT_COMMAND, export_oct_ilp, export_vc_ilp, invoke_external
from .oracle import DEFAULT_CAP, brute_force_oct, brute_force_vc
from .reductions import reduce_fixpoint
from .report import SolverReport
from .vc import solve_oct_vc, to_vc_instance

EXIT_OK, EXIT_INVALID, EXIT_PARSE, EXIT_REFUSED, EXIT_EXTERNAL = 0, 1, 2, 3, 4

_GLOBAL_DEFAULTS = {"seed": 1, "timeout": None, "jobs": 1, "format": "csv"}


def _looks_like_qubo(data: bytes) -> bool:
    for line in data.decode("utf-8", errors="replace").splitlines():
        toks = line.split()
        if toks and not toks[0].startswith("#"):
            return len(toks) == 1
    return False


def load_input(path: str, numeric: bool = False, instance: int = 1) -> tuple[Graph, list[str]]:
    """Sanitized graph and the original label of each vertex id."""
    data = Path(path).read_bytes()
    if _looks_like_qubo(data):
        raws = parse_qubo(data)
        if not 1 <= instance <= len(raws):
            raise ContractViolation(f"instance {instance} outside 1..{len(raws)}")
        raw = raws[instance - 1]
        numeric = True
    else:
        raw = parse_edge_list(data)
    g, label_map = sanitize(raw, numeric=numeric)
    labels = [""] * g.n
    for lab, i in label_map.items():
        labels[i] = lab
    return g, labels


def _write_bytes(path: str, data: bytes) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_bytes(data)


def _print_report(rep: SolverReport, labels: list[str], out) -> None:
    print(f"size {rep.size}", file=out)
    print("vertices " + " ".join(labels[v] for v in rep.solution.vertices), file=out)
    print(f"lower {rep.lower}", file=out)
    print(f"upper {rep.upper}", file=out)
    print(f"optimal {str(rep.optimal).lower()}", file=out)
    print(f"termination {rep.termination.value}", file=out)
    print(f"iterations {rep.iterations}", file=out)


def _parse_params(items: Sequence[str]) -> dict:
    out: dict = {}
    for item in items:
        key, sep, val = item.partition("=")
        if not sep:
            raise ContractViolation(f"parameter {item!r} must look like key=value")
        if key == "degrees":
            out[key] = tuple(int(x) for x in val.split(",") if x)
        elif key in ("n", "n_o", "c"):
            out[key] = int(val)
        elif key in ("p", "b"):
            out[key] = float(val)
        else:
            raise ContractViolation(f"unknown generator parameter {key!r}")
    return out


# ---------------------------------------------------------------------------
# subcommands


def cmd_fetch(a, out) -> int:
    for path in bench.fetch(a.dest, a.files or None, a.base_url):
        print(path, file=out)
    return EXIT_OK


def cmd_sanitize(a, out) -> int:
    g, labels = load_input(a.input, a.numeric, a.instance)
    _write_bytes(a.output, write_canonical(g))
    if a.labels:
        _write_bytes(a.labels, ("\n".join(labels) + "\n" if labels else "").encode())
    print(f"n {g.n} m {g.m}", file=out)
    return EXIT_OK


def cmd_reduce(a, out) -> int:
    g, _ = load_input(a.input, a.numeric, a.instance)
    part = reduce_fixpoint(g)
    _write_bytes(a.output, write_canonical(part.reduced))
    if a.partition:
        _write_bytes(a.partition, part.to_json().encode())
    print(f"n {g.n} -> {part.reduced.n}, m {g.m} -> {part.reduced.m}, forced {len(part.v_oct)}", file=out)
    return EXIT_OK


def cmd_heuristic(a, out) -> int:
    g, labels = load_input(a.input, a.numeric, a.instance)
    enabled = tuple(a.only) if a.only else HEURISTICS
    cfg = EnsembleConfig(timeout=a.timeout or 1.0, seed=a.seed, enabled=enabled, max_iterations=a.iterations)
    _print_report(ensemble(g, cfg), labels, out)
    return EXIT_OK


def cmd_ic(a, out) -> int:
    g, labels = load_input(a.input, a.numeric, a.instance)
    level = a.level if a.level is not None else default_level(a.timeout)
    cfg = IcConfig(level=level, timeout=a.timeout, seed=a.seed, max_iterations=a.iterations)
    _print_report(solve_ic(g, cfg), labels, out)
    return EXIT_OK


def cmd_vc_solve(a, out) -> int:
    g, labels = load_input(a.input, a.numeric, a.instance)
    _print_report(solve_oct_vc(g, timeout=a.timeout, node_limit=a.node_limit), labels, out)
    return EXIT_OK


def cmd_vc_transform(a, out) -> int:
    g, _ = load_input(a.input, a.numeric, a.instance)
    inst = to_vc_instance(g)
    _write_bytes(a.output, write_canonical(inst.graph))
    print(f"n {inst.graph.n} m {inst.graph.m}", file=out)
    return EXIT_OK


def cmd_ilp_export(a, out) -> int:
    g, _ = load_input(a.input, a.numeric, a.instance)
    text = export_oct_ilp(g) if a.form == "oct" else export_vc_ilp(to_vc_instance(g).graph)
    _write_bytes(a.output, text.encode("ascii"))
    return EXIT_OK


def cmd_ilp_solve(a, out) -> int:
    g, labels = load_input(a.input, a.numeric, a.instance)
    rep = invoke_external(g, a.cmd, a.timeout or bench.EXACT_TIMEOUT, form=a.form, nodes=a.nodes)
    _print_report(rep, labels, out)
    return EXIT_OK


def cmd_generate(a, out) -> int:
    cfg = GeneratorConfig(a.family, seed=a.seed, **_parse_params(a.params))
    g = cfg.generate()
    _write_bytes(a.output, write_canonical(g))
    print(json.dumps(cfg.to_dict(), sort_keys=True), file=out)
    return EXIT_OK


def cmd_lookalike(a, out) -> int:
    g, _ = load_input(a.input, a.numeric, a.instance)
    outdir = Path(a.outdir)
    manifest = []
    for cfg in lookalike_configs(g, a.oct_upper, seed=a.seed):
        h = cfg.generate()
        _write_bytes(str(outdir / f"{cfg.family}.txt"), write_canonical(h))
        manifest.append({"config": cfg.to_dict(), "n": h.n, "m": h.m, "file": f"{cfg.family}.txt"})
    text = json.dumps({"source": {"n": g.n, "m": g.m}, "lookalikes": manifest}, indent=1, sort_keys=True)
    _write_bytes(str(outdir / "manifest.json"), (text + "\n").encode())
    for item in manifest:
        print(f"{item['file']} n {item['n']} m {item['m']}", file=out)
    return EXIT_OK


def cmd_oracle(a, out) -> int:
    g, labels = load_input(a.input, a.numeric, a.instance)
    fn = brute_force_oct if a.problem == "oct" else brute_force_vc
    opt, witness = fn(g, a.cap)
    print(f"opt {opt}", file=out)
    print("vertices " + " ".join(labels[v] for v in witness), file=out)
    return EXIT_OK


def _matrix(a, solvers: tuple[str, ...]) -> bench.RunMatrix:
    if a.synthetic:
        instances = bench.synthetic_instances()
    else:
        if not a.instances:
            raise ContractViolation("give instance files or --synthetic")
        instances = bench.load_instances(a.instances)
    timeouts = tuple(a.timeouts) if a.timeouts else bench.TIMEOUTS
    budgets = None
    if a.budget:
        budgets = {t: bench.DEFAULT_BUDGETS.get(t, max(1, round(64 * t))) for t in timeouts}
    return bench.RunMatrix(
        instances=tuple(instances),
        solvers=tuple(a.solvers) if a.solvers else solvers,
        timeouts=timeouts,
        seeds=tuple(a.seeds) if a.seeds else (a.seed,),
        budgets=budgets,
        exact_timeout=a.exact_timeout,
        exact_budget=a.exact_budget,
        ilp_command=a.cmd,
        jobs=a.jobs,
    )


def cmd_bench(a, out) -> int:
    formats = (a.format,) if a.format != "both" else ("csv", "md")
    if a.which == "heuristics":
        m = _matrix(a, ("HE", "IC", "ILP"))
        tables = list(bench.run_heuristic_matrix(m))
    else:
        m = _matrix(a, ("IC", "ILP", "VC"))
        tables = [bench.run_exact_matrix(m)]
    for path in bench.emit_tables(tables, a.outdir, m, formats):
        print(path, file=out)
    print(bench.render_markdown(tables[0]), file=out, end="")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _global_flags(p: argparse.ArgumentParser) -> None:
    s = argparse.SUPPRESS
    p.add_argument("--seed", type=int, default=s, help="master seed (default 1)")
    p.add_argument("--timeout", type=float, default=s, help="seconds")
    p.add_argument("--jobs", type=int, default=s, help="worker processes for bench (default 1)")
    p.add_argument("--format", choices=("csv", "md", "both"), default=s, help="bench table format")


def _input_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True)
    p.add_argument("--numeric", action="store_true", help="order labels numerically")
    p.add_argument("--instance", type=int, default=1, help="1-based instance in a QUBO file")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="octsuite", description="Odd cycle transversal solver suite")
    _global_flags(ap)
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name: str, fn, help_text: str, graph_input: bool = True) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        _global_flags(p)
        if graph_input:
            _input_flags(p)
        p.set_defaults(func=fn)
        return p

    p = add("fetch", cmd_fetch, "download the QUBO corpus", graph_input=False)
    p.add_argument("--dest", default="corpus")
    p.add_argument("--files", nargs="*", choices=sorted(bench.CORPUS_FILES))
    p.add_argument("--base-url", default=bench.ORLIB_BASE)

    p = add("sanitize", cmd_sanitize, "write the canonical form of a graph")
    p.add_argument("--output", required=True)
    p.add_argument("--labels", help="also write original labels, one per id")

    p = add("reduce", cmd_reduce, "apply reduction rules to a fixpoint")
    p.add_argument("--output", required=True)
    p.add_argument("--partition", help="JSON record of the vertex partition")

    p = add("heuristic", cmd_heuristic, "run the heuristic ensemble")
    p.add_argument("--only", nargs="+", choices=HEURISTICS)
    p.add_argument("--iterations", type=int, help="fixed number of heuristic invocations")

    p = add("ic", cmd_ic, "iterative compression")
    p.add_argument("--level", type=int, choices=(0, 1, 2))
    p.add_argument("--iterations", type=int, help="stop after this many compression steps")

    p = add("vc-solve", cmd_vc_solve, "exact OCT through vertex cover")
    p.add_argument("--node-limit", type=int)

    p = add("vc-transform", cmd_vc_transform, "write the doubled vertex-cover graph")
    p.add_argument("--output", required=True)

    p = add("ilp-export", cmd_ilp_export, "write an LP-format model")
    p.add_argument("--form", choices=("oct", "vc"), default="vc")
    p.add_argument("--output", required=True)

    p = add("ilp-solve", cmd_ilp_solve, "solve with an external MIP solver")
    p.add_argument("--cmd", default=DEFAULT_COMMAND, help="template with {input} {output} {timeout}")
    p.add_argument("--form", choices=("oct", "vc"), default="vc")
    p.add_argument("--nodes", type=int, help="value for a {nodes} placeholder")

    p = add("generate", cmd_generate, "sample a synthetic graph", graph_input=False)
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--params", nargs="*", default=[], help="key=value, e.g. n=20 p=0.3 degrees=1,2,2")
    p.add_argument("--output", required=True)

    p = add("lookalike", cmd_lookalike, "generate look-alikes of a graph")
    p.add_argument("--oct-upper", type=int, required=True)
    p.add_argument("--outdir", required=True)

    p = add("oracle", cmd_oracle, "brute-force optimum for small graphs")
    p.add_argument("--problem", choices=("oct", "vc"), default="oct")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)

    p = add("bench", cmd_bench, "run an experiment matrix", graph_input=False)
    p.add_argument("which", choices=("heuristics", "exact"))
    p.add_argument("instances", nargs="*", help="graph files or directories")
    p.add_argument("--synthetic", action="store_true", help="use the built-in generated matrix")
    p.add_argument("--solvers", nargs="+", choices=bench.SOLVERS)
    p.add_argument("--timeouts", nargs="+", type=float)
    p.add_argument("--seeds", nargs="+", type=int)
    p.add_argument("--budget", action="store_true", help="iteration-budget mode")
    p.add_argument("--exact-timeout", type=float, default=bench.EXACT_TIMEOUT)
    p.add_argument("--exact-budget", type=int)
    p.add_argument("--cmd", help="external solver command template")
    p.add_argument("--outdir", default="results")
    return ap


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    for key, val in _GLOBAL_DEFAULTS.items():
        if not hasattr(args, key):
            setattr(args, key, val)
    try:
        return args.func(args, out)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except RefusedError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except (ConfigurationError, IntegrationError) as exc:
        print(f"external solver: {exc}", file=sys.stderr)
        return EXIT_EXTERNAL
    except (ContractViolation, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
