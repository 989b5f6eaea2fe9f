#!/usr/bin/env python3
"""Solve an MPS file with HiGHS through scipy and print a JSON summary.

    external_check.py model.mps [--solution out.txt]

The solution file has one "x <column> <value>" line per column and one
"y <row> <value>" line per row, in file order. Row duals follow the
d(objective)/d(rhs) convention.
"""

import argparse
import json
import sys

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import csr_matrix


def read_mps(path):
    rows, senses, obj_row = [], {}, None
    cols, col_index = [], {}
    cost, entries, rhs, lower, upper = {}, [], {}, {}, {}
    section = None
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("*"):
                continue
            if not line[0].isspace():
                section = line.split()[0]
                if section == "ENDATA":
                    break
                if section not in ("NAME", "ROWS", "COLUMNS", "RHS", "BOUNDS"):
                    sys.exit(f"line {lineno}: unsupported section {section}")
                continue
            tok = line.split()
            if section == "ROWS":
                kind, name = tok
                if kind == "N":
                    obj_row = obj_row or name
                else:
                    senses[name] = kind
                    rows.append(name)
            elif section == "COLUMNS":
                col = tok[0]
                if col not in col_index:
                    col_index[col] = len(cols)
                    cols.append(col)
                for r, v in zip(tok[1::2], tok[2::2]):
                    if r == obj_row:
                        cost[col] = float(v)
                    else:
                        entries.append((r, col, float(v)))
            elif section == "RHS":
                for r, v in zip(tok[1::2], tok[2::2]):
                    rhs[r] = float(v)
            elif section == "BOUNDS":
                kind, col = tok[0], tok[2]
                v = float(tok[3]) if len(tok) > 3 else None
                if kind == "UP":
                    upper[col] = v
                elif kind == "LO":
                    lower[col] = v
                elif kind == "FX":
                    lower[col] = upper[col] = v
                elif kind == "FR":
                    lower[col], upper[col] = -np.inf, np.inf
                elif kind == "MI":
                    lower[col] = -np.inf
                else:
                    sys.exit(f"line {lineno}: unsupported bound {kind}")
    return rows, senses, cols, col_index, cost, entries, rhs, lower, upper


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("mps")
    ap.add_argument("--solution")
    args = ap.parse_args()

    rows, senses, cols, col_index, cost, entries, rhs, lower, upper = read_mps(args.mps)
    row_index = {r: i for i, r in enumerate(rows)}
    n, m = len(cols), len(rows)
    c = np.array([cost.get(name, 0.0) for name in cols])
    bounds = [(lower.get(name, 0.0), upper.get(name, np.inf)) for name in cols]

    r_idx = np.array([row_index[r] for r, _, _ in entries], dtype=np.int64)
    c_idx = np.array([col_index[k] for _, k, _ in entries], dtype=np.int64)
    vals = np.array([v for _, _, v in entries])
    sign = np.array([-1.0 if senses[r] == "G" else 1.0 for r in rows])
    a = csr_matrix((vals * sign[r_idx], (r_idx, c_idx)), shape=(m, n))
    b = np.array([rhs.get(r, 0.0) for r in rows]) * sign

    eq = np.array([senses[r] == "E" for r in rows], dtype=bool)
    ub = ~eq
    res = linprog(
        c,
        A_ub=a[ub] if ub.any() else None,
        b_ub=b[ub] if ub.any() else None,
        A_eq=a[eq] if eq.any() else None,
        b_eq=b[eq] if eq.any() else None,
        bounds=bounds,
        method="highs",
    )
    status = {0: "optimal", 1: "iteration_limit", 2: "infeasible", 3: "unbounded"}.get(res.status, "error")
    print(json.dumps({"status": status, "objective": res.fun if res.status == 0 else None,
                      "columns": n, "rows": m}))
    if res.status != 0:
        return 1
    if args.solution:
        y = np.zeros(m)
        if eq.any():
            y[eq] = res.eqlin.marginals
        if ub.any():
            y[ub] = res.ineqlin.marginals
        y *= sign
        with open(args.solution, "w") as out:
            for name, v in zip(cols, res.x):
                out.write(f"x {name} {float(v)!r}\n")
            for name, v in zip(rows, y):
                out.write(f"y {name} {float(v)!r}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
