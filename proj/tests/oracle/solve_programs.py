"""Independent oracle: solve program files with cvxpy/Clarabel.

Usage: python3 solve_programs.py FILE...
Prints one "value file" line per input.  The numbers are copied into the
C++ tests by hand; rerun after changing a builder.
"""
import sys

import cvxpy as cp
import numpy as np


def parse(text):
    n = None
    obj = None
    cons = []   # (matrix, rhs, rel)
    nonneg = []
    cur = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].split()
        if not line:
            continue
        key = line[0]
        if key == "DIM":
            n = int(line[1])
        elif key == "OBJECTIVE":
            obj = np.zeros((n, n))
            cur = obj
        elif key in ("EQ", "LE"):
            m = np.zeros((n, n))
            cons.append((m, float(line[1]), key))
            cur = m
        elif key == "NONNEG":
            m = np.zeros((n, n))
            nonneg.append(m)
            cur = m
        elif key == "END":
            break
        else:
            i, j, v = int(line[0]), int(line[1]), float(line[2])
            cur[i, j] = v
            cur[j, i] = v
    return n, obj, cons, nonneg


def solve(text):
    n, obj, cons, nonneg = parse(text)
    x = cp.Variable((n, n), symmetric=True)
    rows = [x >> 0]
    for a, b, rel in cons:
        rows.append(cp.trace(a @ x) == b if rel == "EQ" else cp.trace(a @ x) <= b)
    for b in nonneg:
        rows.append(cp.trace(b @ x) >= 0)
    prob = cp.Problem(cp.Maximize(cp.trace(obj @ x)), rows)
    prob.solve(solver=cp.CLARABEL, tol_gap_abs=1e-10, tol_gap_rel=1e-10, tol_feas=1e-10)
    return prob.status, prob.value


if __name__ == "__main__":
    for path in sys.argv[1:]:
        with open(path) as f:
            status, value = solve(f.read())
        print(f"{value:.10f} {status} {path}")
