"""Minimal command-line MIP solver for LP files, backed by SciPy's HiGHS.

Stands in for CPLEX/GLPK when none is installed::

    python -m octsuite.milp_shim model.lp model.sol --time-limit 10

Writes ``status``, ``objective`` and ``name value`` lines.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp

from .ilp import parse_lp


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="python -m octsuite.milp_shim")
    ap.add_argument("input")
    ap.add_argument("output")
    ap.add_argument("--time-limit", type=float, default=None)
    ap.add_argument("--node-limit", type=int, default=0, help="0 means unlimited")
    args = ap.parse_args(argv)

    with open(args.input, encoding="ascii") as fh:
        model = parse_lp(fh.read())
    names = model.variables()
    idx = {v: i for i, v in enumerate(names)}
    sign = 1.0 if model.sense == "min" else -1.0
    c = np.zeros(len(names))
    for v, coef in model.objective.items():
        c[idx[v]] = sign * coef

    constraints = []
    if model.constraints:
        a = np.zeros((len(model.constraints), len(names)))
        lo = np.full(len(model.constraints), -np.inf)
        hi = np.full(len(model.constraints), np.inf)
        for r, con in enumerate(model.constraints):
            for v, coef in con.coeffs.items():
                a[r, idx[v]] = coef
            if con.op in (">=", "="):
                lo[r] = con.rhs
            if con.op in ("<=", "="):
                hi[r] = con.rhs
        constraints.append(LinearConstraint(a, lo, hi))

    binary = set(model.binaries)
    integrality = np.array([1 if v in binary else 0 for v in names])
    bounds = Bounds(np.zeros(len(names)), np.array([1.0 if v in binary else np.inf for v in names]))
    options = {} if args.time_limit is None else {"time_limit": args.time_limit}
    if args.node_limit > 0:
        options["node_limit"] = args.node_limit
    if not names:
        with open(args.output, "w") as fh:
            fh.write("status optimal\nobjective 0\n")
        return 0
    res = milp(c, constraints=constraints, integrality=integrality, bounds=bounds, options=options)

    lines = []
    if res.status == 0:
        lines.append("status optimal")
    elif res.status == 2:
        lines.append("status infeasible")
    else:
        lines.append("status feasible" if res.x is not None else "status unknown")
    if res.x is not None:
        lines.append(f"objective {sign * res.fun:.6g}")
        lines.extend(f"{v} {round(x) if v in binary else x:g}" for v, x in zip(names, res.x))
    with open(args.output, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
