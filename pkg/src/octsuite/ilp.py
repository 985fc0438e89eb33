"""ILP formulations in LP text format, plus an external-solver driver.

The OCT form has a side variable ``s{v}`` and a deletion variable ``c{v}``
per vertex; the VC form has one cover variable ``x{v}`` per vertex and is
meant to be applied to :func:`octsuite.vc.to_vc_instance` output.
"""

from __future__ import annotations

import os
import re
import shlex
import subprocess
import sys
import tempfile
from dataclasses import dataclass, field

from .errors import ConfigurationError, IntegrationError, ParseError
from .graph import Graph, OctSolution, Source
from .report import Deadline, SolverReport, Termination
from .vc import from_vc_solution, to_vc_instance

_WRAP = 8

DEFAULT_COMMAND = f"{shlex.quote(sys.executable)} -m octsuite.milp_shim {{input}} {{output}} --time-limit {{timeout}}"
# same solver with a branch-and-bound node budget, for clock-free replay
BUDGET_COMMAND = DEFAULT_COMMAND + " --node-limit {nodes}"


def _sum_lines(terms: list[str]) -> list[str]:
    if not terms:
        return [" obj:"]
    lines = []
    for i in range(0, len(terms), _WRAP):
        chunk = " + ".join(terms[i : i + _WRAP])
        lines.append((" obj: " if i == 0 else "   + ") + chunk)
    return lines


def export_oct_ilp(g: Graph) -> str:
    out = [
        "\\ odd cycle transversal, direct formulation",
        "\\ recover S = { v : c<v> = 1 }",
        "Minimize",
        *_sum_lines([f"c{v}" for v in range(g.n)]),
        "Subject To",
    ]
    for i, (u, v) in enumerate(g.edges()):
        out.append(f" lo{i}: s{u} + s{v} + c{u} + c{v} >= 1")
        out.append(f" hi{i}: s{u} + s{v} - c{u} - c{v} <= 1")
    out.append("Binary")
    out.extend(f" s{v} c{v}" for v in range(g.n))
    out.append("End")
    return "\n".join(out) + "\n"


def export_vc_ilp(g: Graph) -> str:
    out = [
        "\\ vertex cover formulation",
        "\\ recover cover = { v : x<v> = 1 }",
        "Minimize",
        *_sum_lines([f"x{v}" for v in range(g.n)]),
        "Subject To",
    ]
    for i, (u, v) in enumerate(g.edges()):
        out.append(f" e{i}: x{u} + x{v} >= 1")
    out.append("Binary")
    out.extend(f" x{v}" for v in range(g.n))
    out.append("End")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# reading LP text back


@dataclass
class Constraint:
    name: str
    coeffs: dict[str, float]
    op: str
    rhs: float


@dataclass
class IlpModel:
    sense: str = "min"
    objective: dict[str, float] = field(default_factory=dict)
    constraints: list[Constraint] = field(default_factory=list)
    binaries: list[str] = field(default_factory=list)

    def variables(self) -> list[str]:
        seen: dict[str, None] = {}
        for c in self.constraints:
            for name in c.coeffs:
                seen.setdefault(name)
        for name in [*self.objective, *self.binaries]:
            seen.setdefault(name)
        return list(seen)


_TERM = re.compile(r"([+-])?\s*(\d+(?:\.\d*)?(?:[eE][+-]?\d+)?)?\s*([A-Za-z_][\w.]*)")
_SECTIONS = {
    "minimize": "obj", "minimum": "obj", "min": "obj",
    "maximize": "obj", "maximum": "obj", "max": "obj",
    "subject to": "st", "such that": "st", "st": "st", "s.t.": "st",
    "binary": "bin", "binaries": "bin", "bin": "bin",
    "end": "end",
}


def _linear(expr: str, lineno: int) -> dict[str, float]:
    coeffs: dict[str, float] = {}
    pos = 0
    expr = expr.strip()
    while pos < len(expr):
        if expr[pos].isspace():
            pos += 1
            continue
        m = _TERM.match(expr, pos)
        if not m:
            # a bare constant such as "0"
            c = re.match(r"[+-]?\s*\d+(\.\d*)?", expr[pos:])
            if c and float(c.group().replace(" ", "")) == 0:
                pos += c.end()
                continue
            raise ParseError(f"cannot parse term at {expr[pos:]!r}", lineno)
        sign = -1.0 if m.group(1) == "-" else 1.0
        coef = float(m.group(2)) if m.group(2) else 1.0
        coeffs[m.group(3)] = coeffs.get(m.group(3), 0.0) + sign * coef
        pos = m.end()
    return coeffs


def parse_lp(text: str) -> IlpModel:
    """Read the LP dialect written by the exporters (and simple hand-written files)."""
    model = IlpModel()
    section = None
    obj_buf: list[str] = []
    con_buf: list[tuple[str, int]] = []

    def flush_constraint() -> None:
        if not con_buf:
            return
        body = " ".join(part for part, _ in con_buf)
        lineno = con_buf[0][1]
        con_buf.clear()
        m = re.match(r"\s*(?:([A-Za-z_][\w.]*)\s*:)?(.*?)(>=|<=|=<|=>|=)\s*([+-]?[\d.eE+-]+)\s*$", body)
        if not m:
            raise ParseError(f"malformed constraint {body!r}", lineno)
        op = {"=<": "<=", "=>": ">="}.get(m.group(3), m.group(3))
        name = m.group(1) or f"r{len(model.constraints)}"
        model.constraints.append(Constraint(name, _linear(m.group(2), lineno), op, float(m.group(4))))

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("\\", 1)[0].strip()
        if not line:
            continue
        key = line.lower()
        if key in _SECTIONS:
            flush_constraint()
            section = _SECTIONS[key]
            if section == "obj":
                model.sense = "max" if key.startswith("max") else "min"
            if section == "end":
                break
            continue
        if section == "obj":
            obj_buf.append(line)
        elif section == "st":
            starts_new = re.match(r"[A-Za-z_][\w.]*\s*:", line) is not None
            if starts_new:
                flush_constraint()
            con_buf.append((line, lineno))
            if re.search(r"(>=|<=|=<|=>|=)\s*[+-]?[\d.]+\s*$", line):
                flush_constraint()
        elif section == "bin":
            model.binaries.extend(line.split())
        else:
            raise ParseError(f"content outside any section: {line!r}", lineno)
    flush_constraint()
    obj = " ".join(obj_buf)
    obj = re.sub(r"^\s*[A-Za-z_][\w.]*\s*:", "", obj)
    model.objective = _linear(obj, 0)
    return model


def enumerate_optimum(model: IlpModel) -> tuple[float, dict[str, int]] | None:
    """Exact optimum of a pure 0-1 model by exhaustive search with pruning.

    Depth-first search over the variables (objective variables first, then
    first appearance) with bound propagation on every constraint. The
    objective enters as one more constraint, capped at one below the best
    solution found so far (integer objectives only). Returns None if the
    model is infeasible.
    """
    # objective variables first: the rest then tends to follow by propagation
    names = sorted(model.variables(), key=lambda v: model.objective.get(v, 0) == 0)
    idx = {v: i for i, v in enumerate(names)}
    sign = 1.0 if model.sense == "min" else -1.0
    obj_terms = [(idx[v], sign * c) for v, c in model.objective.items() if c != 0]
    if any(c != int(c) for _, c in obj_terms):
        raise ValueError("enumeration needs integer objective coefficients")
    rows: list[tuple[list[tuple[int, float]], str, float]] = []
    for con in model.constraints:
        rows.append(([(idx[v], c) for v, c in con.coeffs.items() if c != 0], con.op, con.rhs))
    cap_row = len(rows)
    rows.append((obj_terms, "<=", 0.0))
    watch: list[list[int]] = [[] for _ in names]
    for r, (terms, _, _) in enumerate(rows):
        for i, _ in terms:
            watch[i].append(r)
    value = [-1] * len(names)

    def bounds(terms) -> tuple[float, float]:
        lo = hi = 0.0
        for i, c in terms:
            x = value[i]
            if x >= 0:
                lo += c * x
                hi += c * x
            elif c > 0:
                hi += c
            else:
                lo += c
        return lo, hi

    def propagate(start, trail: list[int]) -> bool:
        queue = list(start)
        while queue:
            r = queue.pop()
            terms, op, rhs = rows[r]
            lo, hi = bounds(terms)
            if (op in (">=", "=") and hi < rhs - 1e-9) or (op in ("<=", "=") and lo > rhs + 1e-9):
                return False
            for i, c in terms:
                if value[i] >= 0:
                    continue
                forced = None
                if op in (">=", "=") and hi - abs(c) < rhs - 1e-9:
                    forced = 1 if c > 0 else 0
                elif op in ("<=", "=") and lo + abs(c) > rhs + 1e-9:
                    forced = 0 if c > 0 else 1
                if forced is not None:
                    value[i] = forced
                    trail.append(i)
                    queue.extend(watch[i])
                    lo, hi = bounds(terms)
        return True

    best: list = [None, None]

    def dfs(pos: int) -> None:
        terms, _, cap = rows[cap_row]
        if bounds(terms)[0] > cap + 1e-9:
            return
        while pos < len(names) and value[pos] >= 0:
            pos += 1
        if pos == len(names):
            total = sum(c * value[i] for i, c in obj_terms)
            best[0], best[1] = total, dict(zip(names, value))
            rows[cap_row] = (obj_terms, "<=", total - 1.0)
            return
        for x in (0, 1):
            trail = [pos]
            value[pos] = x
            if propagate(watch[pos], trail):
                dfs(pos + 1)
            for i in trail:
                value[i] = -1

    rows[cap_row] = (obj_terms, "<=", float(sum(c for _, c in obj_terms if c > 0)))
    if propagate(range(len(rows)), []):
        dfs(0)
    if best[1] is None:
        return None
    return sign * best[0], best[1]


# ---------------------------------------------------------------------------
# external solver


@dataclass(frozen=True)
class ExternalResult:
    values: dict[str, float]
    objective: float | None
    optimal: bool
    incumbent: bool
    raw: str


def parse_solution(text: str) -> tuple[dict[str, float], float | None, str]:
    """Read a solver solution file; returns (values, objective, status).

    Accepts ``name value`` / ``name = value`` lines with optional
    ``status ...`` and ``objective ...`` lines, and CBC's solution format.
    """
    values: dict[str, float] = {}
    objective = None
    status = "unknown"
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if lines and "objective value" in lines[0].lower():
        head = lines[0]
        status = "optimal" if head.lower().startswith("optimal") else head.split(" - ")[0].strip().lower()
        m = re.search(r"objective value\s+([-+\d.eE]+)", head)
        objective = float(m.group(1)) if m else None
        for ln in lines[1:]:
            parts = ln.replace("**", "").split()
            if len(parts) < 3:
                raise IntegrationError(f"unexpected CBC line {ln!r}", text)
            values[parts[1]] = float(parts[2])
        return values, objective, status
    for ln in lines:
        if ln.startswith("#"):
            continue
        parts = ln.replace("=", " ").split()
        if len(parts) != 2:
            raise IntegrationError(f"unexpected solution line {ln!r}", text)
        key, val = parts
        if key.lower() == "status":
            status = val.lower()
            continue
        try:
            num = float(val)
        except ValueError:
            raise IntegrationError(f"non-numeric value in {ln!r}", text) from None
        if key.lower() == "objective":
            objective = num
        else:
            values[key] = num
    return values, objective, status


def run_external(
    lp: str, cmd_template: str, timeout: float, nodes: int | None = None
) -> ExternalResult:
    """Write ``lp`` to a temp file and run ``cmd_template`` on it.

    The template may use ``{input}``, ``{output}``, ``{timeout}`` and
    ``{nodes}`` (0 when no node budget is given).
    """
    for key in ("{input}", "{output}"):
        if key not in cmd_template:
            raise ConfigurationError(f"command template lacks {key}")
    with tempfile.TemporaryDirectory(prefix="octsuite-ilp-") as tmp:
        in_path = os.path.join(tmp, "model.lp")
        out_path = os.path.join(tmp, "model.sol")
        with open(in_path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(lp)
        argv = [
            tok.format(input=in_path, output=out_path, timeout=f"{timeout:g}", nodes=nodes or 0)
            for tok in shlex.split(cmd_template)
        ]
        timed_out = False
        try:
            proc = subprocess.run(
                argv, capture_output=True, text=True, timeout=timeout + 5.0
            )
            raw = proc.stdout + proc.stderr
        except FileNotFoundError as exc:
            raise ConfigurationError(f"solver binary not found: {argv[0]}") from exc
        except subprocess.TimeoutExpired as exc:
            timed_out = True
            raw = (exc.stdout or b"").decode(errors="replace") if isinstance(exc.stdout, bytes) else (exc.stdout or "")
        if not os.path.exists(out_path):
            if timed_out:
                return ExternalResult({}, None, False, False, raw)
            raise IntegrationError("solver produced no solution file", raw)
        with open(out_path, encoding="utf-8", errors="replace") as fh:
            sol_text = fh.read()
    values, objective, status = parse_solution(sol_text)
    if status == "infeasible":
        raise IntegrationError("solver reports the model infeasible", sol_text)
    return ExternalResult(
        values=values,
        objective=objective,
        optimal=status == "optimal" and not timed_out,
        incumbent=bool(values),
        raw=raw + sol_text,
    )


def invoke_external(
    g: Graph,
    cmd_template: str,
    timeout: float,
    form: str = "vc",
    lp: str | None = None,
    nodes: int | None = None,
) -> SolverReport:
    """Solve OCT on ``g`` with an external MIP solver.

    Model build time counts against ``timeout``. Without a parsed incumbent
    the report falls back to the trivial transversal ``V`` (upper bound n).
    """
    deadline = Deadline(timeout)
    if form == "vc":
        inst = to_vc_instance(g)
        text = lp if lp is not None else export_vc_ilp(inst.graph)
    elif form == "oct":
        text = lp if lp is not None else export_oct_ilp(g)
    else:
        raise ValueError(f"unknown formulation {form!r}")
    remaining = max(0.01, timeout - deadline.elapsed())
    res = run_external(text, cmd_template, remaining, nodes)

    if not res.incumbent:
        s: tuple[int, ...] = tuple(range(g.n))
    elif form == "vc":
        cover = [v for v in range(inst.graph.n) if round(res.values.get(f"x{v}", 0)) == 1]
        s = from_vc_solution(inst, cover)
    else:
        s = tuple(v for v in range(g.n) if round(res.values.get(f"c{v}", 0)) == 1)
    sol = OctSolution.checked(g, s, Source.ILP)
    if not sol.verified:
        raise IntegrationError("solver solution is not a valid transversal", res.raw)
    return SolverReport(
        solution=sol,
        lower=sol.size if res.optimal else 0,
        upper=sol.size,
        optimal=res.optimal,
        elapsed=deadline.elapsed(),
        seed=None,
        termination=Termination.COMPLETED if res.optimal else Termination.DEADLINE,
        iterations=1,
    )
