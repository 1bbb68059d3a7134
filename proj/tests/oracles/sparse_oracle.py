"""Independent oracle for the L1 decomposition instances.

Solves  min ||s||_1  s.t.  ||f - P a - s||_2 <= eps  as a second-order cone
program with cvxpy and freezes the optimal objectives into
tests/data/sparse_oracle.json.

    build/tests/sparse_instances | python3 tests/oracles/sparse_oracle.py > tests/data/sparse_oracle.json
"""
import json
import sys

import cvxpy as cp
import numpy as np


def solve(instance):
    f = np.asarray(instance["pixels"], dtype=float)
    p = np.asarray(instance["design"], dtype=float)
    s = cp.Variable(f.size)
    a = cp.Variable(p.shape[1])
    problem = cp.Problem(cp.Minimize(cp.norm1(s)), [cp.norm2(f - p @ a - s) <= instance["epsilon"]])
    problem.solve(solver=cp.CLARABEL, tol_gap_abs=1e-10, tol_gap_rel=1e-10, tol_feas=1e-10)
    assert problem.status == cp.OPTIMAL, problem.status
    return problem.value, s.value


def main():
    instances = json.load(sys.stdin)
    out = []
    for inst in instances:
        objective, s = solve(inst)
        out.append({
            "index": inst["index"],
            "epsilon": inst["epsilon"],
            "spike": inst["spike"],
            "pixels": inst["pixels"],
            "objective": objective,
            "argmax_abs_s": int(np.argmax(np.abs(s))),
        })
    json.dump({"solver": f"cvxpy {cp.__version__} / CLARABEL", "instances": out}, sys.stdout, indent=1)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
