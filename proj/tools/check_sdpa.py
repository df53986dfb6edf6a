#!/usr/bin/env python3
"""Re-solve an exported .dat-s file with cvxpy for cross-checking objectives.

The file encodes the SDPA primal  min c.x  s.t.  sum_i x_i F_i - F_0 >= 0,
whose optimal value we report negated (our primal is the SDPA dual).
"""
import argparse
import sys

import cvxpy as cp
import numpy as np


def read_sdpa(path):
    with open(path) as f:
        tokens = [ln.strip() for ln in f if ln.strip() and not ln.startswith(("*", '"'))]
    m = int(tokens[0].split()[0])
    nblocks = int(tokens[1].split()[0])
    sizes = [int(s) for s in tokens[2].replace(",", " ").replace("{", " ").replace("}", " ").split()][:nblocks]
    c = np.array([float(s) for s in tokens[3].replace(",", " ").replace("{", " ").replace("}", " ").split()][:m])
    entries = []
    for ln in tokens[4:]:
        mat, blk, i, j, v = ln.split()
        entries.append((int(mat), int(blk) - 1, int(i) - 1, int(j) - 1, float(v)))
    return m, sizes, c, entries


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("file")
    ap.add_argument("--solver", default="CLARABEL")
    args = ap.parse_args()
    m, sizes, c, entries = read_sdpa(args.file)
    # F[mat][blk] as dense arrays
    mats = {}
    for mat, blk, i, j, v in entries:
        n = abs(sizes[blk])
        d = mats.setdefault((mat, blk), np.zeros((n, n)))
        d[i, j] = v
        d[j, i] = v
    x = cp.Variable(m)
    cons = []
    for b, s in enumerate(sizes):
        n = abs(s)
        expr = -mats.get((0, b), np.zeros((n, n)))
        for k in range(1, m + 1):
            if (k, b) in mats:
                expr = expr + x[k - 1] * mats[(k, b)]
        if s < 0:
            cons.append(cp.diag(expr) >= 0)
        else:
            S = cp.Variable((n, n), symmetric=True)
            cons += [S == expr, S >> 0]
    prob = cp.Problem(cp.Minimize(c @ x), cons)
    prob.solve(solver=args.solver)
    print(f"status={prob.status} objective={-prob.value:.10g}")
    return 0 if prob.status == "optimal" else 1


if __name__ == "__main__":
    sys.exit(main())
