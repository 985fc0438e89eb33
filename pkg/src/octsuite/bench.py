"""Benchmark harness: heuristic/anytime matrices, exact-solve matrices, table output.

Solvers are named ``HE`` (heuristic ensemble), ``IC`` (iterative compression),
``ILP`` (external MIP solver on an exported model) and ``VC`` (vertex-cover
branch and reduce). All solvers run on the reduced graph of each instance.

Two replay modes exist. In wall-clock mode every timeout is a real deadline.
In iteration-budget mode each nominal timeout maps to a fixed number of work
units per solver, clocks are ignored, and tables omit timing columns so that
identical inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import subprocess
import urllib.request
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .compression import IcConfig, default_level, solve_ic
from .errors import ContractViolation, RefusedError
from .generators import GeneratorConfig
from .graph import Graph, parse_qubo, read_graph, sanitize, verify_oct
from .heuristics import EnsembleConfig, ensemble
from .ilp import BUDGET_COMMAND, DEFAULT_COMMAND, invoke_external
from .oracle import DEFAULT_CAP, brute_force_oct
from .reductions import ReductionPartition, identity_partition, reduce_fixpoint
from .report import SolverReport
from .vc import solve_oct_vc

SOLVERS = ("HE", "IC", "ILP", "VC")
TIMEOUTS = (0.01, 0.1, 1.0, 10.0)
EXACT_TIMEOUT = 600.0
# work units per nominal timeout in iteration-budget mode
DEFAULT_BUDGETS = {0.01: 4, 0.1: 16, 1.0: 64, 10.0: 256}

ORLIB_BASE = "http://people.brunel.ac.uk/~mastjjb/jeb/orlib/files/"
CORPUS_FILES = {
    "gka": "bqpgka.txt",
    "b-50": "bqp50.txt",
    "b-100": "bqp100.txt",
    "b-250": "bqp250.txt",
    "b-500": "bqp500.txt",
    "b-1000": "bqp1000.txt",
    "b-2500": "bqp2500.txt",
}


# ---------------------------------------------------------------------------
# instances


@dataclass(frozen=True)
class Instance:
    dataset: str
    name: str
    graph: Graph


def qubo_instance_names(stem: str, count: int) -> list[str]:
    """``gka`` file instances become ``gka-1..``, ``b-100`` ones ``b-100-1..``."""
    return [f"{stem}-{k}" for k in range(1, count + 1)]


def load_qubo_file(path: str | Path, stem: str | None = None) -> list[Instance]:
    path = Path(path)
    if stem is None:
        inverse = {v: k for k, v in CORPUS_FILES.items()}
        stem = inverse.get(path.name, path.stem)
    raws = parse_qubo(path.read_bytes())
    names = qubo_instance_names(stem, len(raws))
    dataset = stem.split("-")[0] if stem.startswith("b-") else stem
    return [Instance(dataset, nm, sanitize(raw, numeric=True)[0]) for nm, raw in zip(names, raws)]


def load_instances(paths: Iterable[str | Path], dataset: str | None = None) -> list[Instance]:
    """Load edge-list or canonical files (one instance each) and QUBO files."""
    out: list[Instance] = []
    for p in map(Path, paths):
        if p.is_dir():
            out.extend(load_instances(sorted(p.iterdir()), dataset or p.name))
            continue
        if p.name in CORPUS_FILES.values() or p.suffix == ".qubo":
            out.extend(load_qubo_file(p))
            continue
        ds = dataset or p.parent.name or "default"
        out.append(Instance(ds, p.stem, read_graph(p.read_bytes())))
    return out


def load_corpus(directory: str | Path) -> dict[str, Graph]:
    """Named graphs from a corpus directory: QUBO files and ``*.graph`` edge lists."""
    directory = Path(directory)
    found: dict[str, Graph] = {}
    for stem, fname in CORPUS_FILES.items():
        f = directory / fname
        if f.exists():
            found.update((inst.name, inst.graph) for inst in load_qubo_file(f, stem))
    for f in sorted(directory.glob("*.graph")):
        found[f.stem] = read_graph(f.read_bytes())
    return found


def fetch(dest: str | Path, names: Sequence[str] | None = None, base_url: str = ORLIB_BASE) -> list[Path]:
    """Download corpus files into ``dest``; existing files are kept."""
    dest = Path(dest)
    dest.mkdir(parents=True, exist_ok=True)
    wanted = list(CORPUS_FILES) if names is None else list(names)
    unknown = set(wanted) - set(CORPUS_FILES)
    if unknown:
        raise ValueError(f"unknown corpus files: {sorted(unknown)}")
    written = []
    for key in wanted:
        target = dest / CORPUS_FILES[key]
        if not target.exists():
            with urllib.request.urlopen(base_url + CORPUS_FILES[key], timeout=60) as resp:
                data = resp.read()
            tmp = target.with_suffix(".part")
            tmp.write_bytes(data)
            tmp.replace(target)
        written.append(target)
    return written


def synthetic_instances(
    sizes: Sequence[int] = (10, 14),
    seeds: Sequence[int] = (1, 2),
    p: float = 0.3,
) -> list[Instance]:
    """Small fetch-free matrix: one dataset per generator family."""
    out = []
    for n in sizes:
        c = max(1, round(p * (n - 1) / 2))
        configs = [
            GeneratorConfig("erdos_renyi", n=n, p=p),
            GeneratorConfig("tunable_oct", n=n, p=p, n_o=max(1, n // 5), b=0.5),
            GeneratorConfig("chung_lu", degrees=tuple(2 + (v % 5) for v in range(n))),
            GeneratorConfig("barabasi_albert", n=n, c=c),
        ]
        for base in configs:
            for s in seeds:
                cfg = replace(base, seed=s)
                out.append(Instance(cfg.family, f"{cfg.family}-n{n}-s{s}", cfg.generate()))
    return out


# ---------------------------------------------------------------------------
# matrix configuration and single runs


@dataclass(frozen=True)
class RunMatrix:
    """What to run. ``budgets`` switches on iteration-budget mode."""

    instances: tuple[Instance, ...]
    solvers: tuple[str, ...] = ("HE", "IC", "ILP")
    timeouts: tuple[float, ...] = TIMEOUTS
    seeds: tuple[int, ...] = (1,)
    budgets: Mapping[float, int] | None = None
    exact_timeout: float = EXACT_TIMEOUT
    exact_budget: int | None = None
    ilp_command: str | None = None
    ilp_form: str = "vc"
    reduce: bool = True
    oracle_cap: int = DEFAULT_CAP
    jobs: int = 1
    reference: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.instances:
            raise ValueError("run matrix needs at least one instance")
        if not self.solvers:
            raise ValueError("run matrix needs at least one solver")
        unknown = set(self.solvers) - set(SOLVERS)
        if unknown:
            raise ValueError(f"unknown solvers: {sorted(unknown)}")
        if self.budgets is not None:
            missing = [t for t in self.timeouts if t not in self.budgets]
            if missing:
                raise ValueError(f"no iteration budget for timeouts {missing}")
        names = [i.name for i in self.instances]
        if len(set(names)) != len(names):
            raise ValueError("instance names must be unique")

    @property
    def budget_mode(self) -> bool:
        return self.budgets is not None

    def command(self) -> str:
        if self.ilp_command is not None:
            return self.ilp_command
        return BUDGET_COMMAND if self.budget_mode else DEFAULT_COMMAND

    def describe(self) -> dict:
        return {
            "instances": [[i.dataset, i.name, i.graph.n, i.graph.m] for i in self.instances],
            "solvers": list(self.solvers),
            "timeouts": list(self.timeouts),
            "seeds": list(self.seeds),
            "mode": "iteration-budget" if self.budget_mode else "wall-clock",
            "budgets": None if self.budgets is None else {f"{t:g}": b for t, b in sorted(self.budgets.items())},
            "exact_timeout": self.exact_timeout,
            "exact_budget": self.exact_budget,
            "ilp_form": self.ilp_form,
            "reduce": self.reduce,
            "oracle_cap": self.oracle_cap,
        }


# generous wall limit for budgeted ILP runs, which stop on their node budget
_BUDGET_WALL = 120.0


def run_solver(
    solver: str,
    g: Graph,
    timeout: float | None,
    seed: int,
    budget: int | None,
    m: RunMatrix,
) -> SolverReport:
    """One solver run on ``g``; ``budget`` (work units) overrides the clock."""
    clock = None if budget is not None else timeout
    if solver == "HE":
        return ensemble(g, EnsembleConfig(timeout=timeout or 1.0, seed=seed, max_iterations=budget))
    if solver == "IC":
        cfg = IcConfig(level=default_level(timeout), timeout=clock, seed=seed, max_iterations=budget)
        return solve_ic(g, cfg)
    if solver == "ILP":
        wall = _BUDGET_WALL if budget is not None else (timeout or EXACT_TIMEOUT)
        return invoke_external(g, m.command(), wall, form=m.ilp_form, nodes=budget)
    if solver == "VC":
        return solve_oct_vc(g, timeout=clock, node_limit=budget)
    raise ValueError(f"unknown solver {solver!r}")


def _reduce(m: RunMatrix, g: Graph) -> ReductionPartition:
    return reduce_fixpoint(g) if m.reduce else identity_partition(g)


def reference_opt(m: RunMatrix, inst: Instance, part: ReductionPartition) -> tuple[int | None, str]:
    """Optimum of the reduced graph and where it came from.

    Precedence: caller-supplied value, oracle under its cap, then a proven
    exact VC run. Returns ``(None, "none")`` when nothing is proven.
    """
    if inst.name in m.reference:
        return m.reference[inst.name] - len(part.v_oct), "given"
    g = part.reduced
    if g.n <= m.oracle_cap:
        return brute_force_oct(g, m.oracle_cap)[0], "oracle"
    rep = solve_oct_vc(g, timeout=None if m.exact_budget else m.exact_timeout, node_limit=m.exact_budget)
    if rep.optimal:
        return rep.solution.size, "VC"
    return None, "none"


@dataclass(frozen=True)
class Run:
    """One record of the long-format run log."""

    dataset: str
    instance: str
    solver: str
    timeout: float | None
    seed: int | None
    size: int | None
    lower: int | None
    upper: int | None
    optimal: bool
    elapsed: float | None
    status: str
    solution: tuple[int, ...] | None = None


def _heuristic_job(m: RunMatrix, inst: Instance) -> tuple[list[Run], int | None, str, Graph]:
    part = _reduce(m, inst.graph)
    opt, origin = reference_opt(m, inst, part)
    runs = []
    for solver in m.solvers:
        for t in m.timeouts:
            for seed in m.seeds:
                budget = None if m.budgets is None else m.budgets[t]
                runs.append(_safe_run(m, inst, part.reduced, solver, t, seed, budget))
    return runs, opt, origin, part.reduced


def _safe_run(m, inst, g, solver, t, seed, budget) -> Run:
    try:
        rep = run_solver(solver, g, t, seed, budget, m)
    except (RefusedError, ContractViolation):
        raise
    except Exception as exc:  # noqa: BLE001 - crash becomes an error row
        return Run(inst.dataset, inst.name, solver, t, seed, None, None, None, False, None, f"error: {exc}")
    return Run(
        inst.dataset, inst.name, solver, t, seed,
        rep.solution.size, rep.lower, rep.upper, rep.optimal,
        None if m.budget_mode else rep.elapsed,
        rep.termination.value, rep.solution.vertices,
    )


def _map(m: RunMatrix, fn, items: list) -> list:
    if m.jobs <= 1 or len(items) <= 1:
        return [fn(m, x) for x in items]
    with ProcessPoolExecutor(max_workers=m.jobs) as pool:
        return list(pool.map(fn, [m] * len(items), items))


# ---------------------------------------------------------------------------
# tables


@dataclass
class Table:
    """A rendered result table plus what is needed to re-check it."""

    name: str
    columns: list[str]
    rows: list[list[str]] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    # (graph, solution) pairs re-verified at emission time
    certificates: list[tuple[Graph, tuple[int, ...]]] = field(default_factory=list, repr=False)

    def sort(self, key_columns: int = 1) -> None:
        self.rows.sort(key=lambda r: r[:key_columns])


def fmt_float(x: float, digits: int = 3) -> str:
    if math.isinf(x):
        return "inf"
    return f"{x:.{digits}f}"


def fmt_timeout(t: float) -> str:
    return f"{t:g}s"


def approximation_ratio(size: int, opt: int) -> float:
    if opt == 0:
        return 1.0 if size == 0 else math.inf
    return size / opt


def run_heuristic_matrix(m: RunMatrix) -> tuple[Table, Table]:
    """Worst-case ratio |S|/OPT per (dataset, solver, timeout) plus the run log.

    A group whose every run proved optimality shows ``exact``. Instances
    without a trusted optimum are skipped and listed in the notes; a ratio
    below one raises :class:`ContractViolation`.
    """
    results = _map(m, _heuristic_job, list(m.instances))
    keys = [(s, t) for t in m.timeouts for s in m.solvers]
    cols = ["dataset"] + [f"{s} {fmt_timeout(t)}" for s, t in keys]
    table = Table("heuristics", cols)
    log_cols = ["dataset", "instance", "solver", "timeout", "seed", "size", "lower", "upper", "optimal", "opt", "ratio", "status"]
    if not m.budget_mode:
        log_cols.append("elapsed")
    log = Table("heuristic_runs", log_cols)

    worst: dict[str, dict[tuple[str, float], tuple[float, bool]]] = {}
    for (runs, opt, origin, g), inst in zip(results, m.instances):
        if opt is None:
            table.notes.append(f"skipped {inst.name}: no proven optimum")
        for r in runs:
            ratio = None
            if r.solution is not None:
                log.certificates.append((g, r.solution))
                table.certificates.append((g, r.solution))
                if opt is not None:
                    if r.size < opt:
                        raise ContractViolation(
                            f"{r.solver} found |S|={r.size} below reference OPT {opt} on {inst.name} ({origin})"
                        )
                    ratio = approximation_ratio(r.size, opt)
            elif opt is not None:
                ratio = math.inf
                table.notes.append(f"{r.solver} failed on {inst.name}: {r.status}")
            if ratio is not None:
                cell = worst.setdefault(inst.dataset, {})
                prev = cell.get((r.solver, r.timeout), (1.0, True))
                cell[(r.solver, r.timeout)] = (max(prev[0], ratio), prev[1] and r.optimal and ratio == 1.0)
            row = [
                r.dataset, r.instance, r.solver, fmt_timeout(r.timeout), str(r.seed),
                _opt_str(r.size), _opt_str(r.lower), _opt_str(r.upper), str(r.optimal).lower(),
                _opt_str(opt), "-" if ratio is None else fmt_float(ratio), r.status,
            ]
            if not m.budget_mode:
                row.append("-" if r.elapsed is None else fmt_float(r.elapsed, 4))
            log.rows.append(row)

    for dataset in sorted(worst):
        row = [dataset]
        for key in keys:
            if key not in worst[dataset]:
                row.append("-")
                continue
            ratio, exact = worst[dataset][key]
            row.append("exact" if exact else fmt_float(ratio))
        table.rows.append(row)
    table.sort()
    log.sort(key_columns=5)
    return table, log


def _opt_str(x: int | None) -> str:
    return "-" if x is None else str(x)


def _exact_job(m: RunMatrix, inst: Instance) -> tuple[ReductionPartition, list[Run]]:
    part = _reduce(m, inst.graph)
    runs = [
        _safe_run(m, inst, part.reduced, solver, None if m.exact_budget else m.exact_timeout, m.seeds[0], m.exact_budget)
        for solver in m.solvers
    ]
    return part, runs


def run_exact_matrix(m: RunMatrix) -> Table:
    """OPT (of the original graph) per instance and solver, ``-`` when unproven.

    Solvers run on the reduced graph; a proven optimum is shifted by the
    forced transversal vertices. A crash yields ``error`` and the run goes on.
    Time columns appear only when the runs are clock-limited.
    Proven optima that disagree raise :class:`ContractViolation`.
    """
    timed = m.exact_budget is None
    cols = ["dataset", "instance", "n", "m", "n_reduced", "m_reduced", "OPT"]
    for s in m.solvers:
        cols.append(s)
        if timed:
            cols.append(f"{s} time")
    table = Table("exact", cols)
    for (part, runs), inst in zip(_map(m, _exact_job, list(m.instances)), m.instances):
        shift = len(part.v_oct)
        proven = {r.solver: r.size + shift for r in runs if r.optimal}
        if len(set(proven.values())) > 1:
            raise ContractViolation(f"solvers disagree on {inst.name}: {proven}")
        opt = next(iter(proven.values()), None)
        row = [
            inst.dataset, inst.name, str(inst.graph.n), str(inst.graph.m),
            str(part.reduced.n), str(part.reduced.m), _opt_str(opt),
        ]
        for r in runs:
            if r.status.startswith("error"):
                row.append("error")
                table.notes.append(f"{r.solver} on {inst.name}: {r.status}")
            else:
                row.append(str(r.size + shift) if r.optimal else "-")
                table.certificates.append((part.reduced, r.solution))
            if timed:
                done = r.optimal and r.elapsed is not None
                row.append(fmt_float(r.elapsed, 3) if done else "-")
        table.rows.append(row)
    table.sort(key_columns=2)
    return table


def render_csv(table: Table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    w.writerows(table.rows)
    return buf.getvalue()


def render_markdown(table: Table) -> str:
    lines = [
        "| " + " | ".join(table.columns) + " |",
        "|" + "|".join("---" for _ in table.columns) + "|",
    ]
    lines.extend("| " + " | ".join(row) + " |" for row in table.rows)
    if table.notes:
        lines.append("")
        lines.extend(f"- {note}" for note in sorted(table.notes))
    return "\n".join(lines) + "\n"


def git_revision(cwd: str | Path | None = None) -> str:
    try:
        out = subprocess.run(
            ["git", "rev-parse", "HEAD"], capture_output=True, text=True, cwd=cwd, timeout=10
        )
    except (OSError, subprocess.SubprocessError):
        return "unknown"
    return out.stdout.strip() if out.returncode == 0 else "unknown"


def emit_tables(
    tables: Sequence[Table],
    outdir: str | Path,
    matrix: RunMatrix | None = None,
    formats: Sequence[str] = ("csv", "md"),
) -> list[Path]:
    """Write each table as CSV and/or markdown plus ``manifest.json``.

    Every certificate is re-verified first. Output depends only on the
    table contents and the matrix description, never on the clock.
    """
    for t in tables:
        for g, s in t.certificates:
            if not verify_oct(g, s):
                raise ContractViolation(f"table {t.name}: reported solution fails verification")
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    for t in tables:
        if "csv" in formats:
            written.append(_write(outdir / f"{t.name}.csv", render_csv(t)))
        if "md" in formats:
            written.append(_write(outdir / f"{t.name}.md", render_markdown(t)))
    manifest = {
        "git_revision": git_revision(Path(__file__).parent),
        "tables": [t.name for t in tables],
        "notes": {t.name: sorted(t.notes) for t in tables},
        "matrix": None if matrix is None else matrix.describe(),
        "seeds": None if matrix is None else list(matrix.seeds),
    }
    written.append(_write(outdir / "manifest.json", json.dumps(manifest, indent=1, sort_keys=True) + "\n"))
    return written


def _write(path: Path, text: str) -> Path:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


def corpus_dir() -> Path | None:
    """Corpus location from ``OCTSUITE_CORPUS``, if it exists."""
    env = os.environ.get("OCTSUITE_CORPUS")
    if env and Path(env).is_dir():
        return Path(env)
    return None
