#!/usr/bin/env python3
"""Solve an LP-format integer program written by `verstore export-ilp`.

Reads the rigid subset of the LP file format the exporter emits
(Minimize / Subject To / Bounds / Binary / End) and solves it with
scipy's MILP interface (HiGHS). Prints `OPTIMUM <value>` on success.

Usage: solve_lp.py FILE.lp
"""

import re
import sys

TERM = re.compile(r"([+-])?\s*(\d+)?\s*([xr]_[0-9_]+)")


def parse_terms(text):
    coeffs = {}
    for sign, coef, var in TERM.findall(text):
        value = int(coef) if coef else 1
        if sign == "-":
            value = -value
        coeffs[var] = coeffs.get(var, 0) + value
    return coeffs


def parse(path):
    sections = {}
    current = None
    with open(path) as fh:
        for raw in fh:
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            if not line.startswith(" "):
                current = line.strip()
                sections[current] = []
            else:
                sections.setdefault(current, []).append(line.strip())
    return sections


def main():
    if len(sys.argv) != 2:
        print("usage: solve_lp.py FILE.lp", file=sys.stderr)
        return 2
    sections = parse(sys.argv[1])

    objective_text = " ".join(sections["Minimize"])
    objective_text = objective_text.split(":", 1)[1]
    objective = parse_terms(objective_text)

    binaries = set(sections.get("Binary", []))
    bounds_upper = {}
    for line in sections.get("Bounds", []):
        m = re.match(r"0\s*<=\s*(r_\d+)\s*<=\s*(\d+)", line)
        if m:
            bounds_upper[m.group(1)] = int(m.group(2))

    variables = sorted(set(objective) | binaries | set(bounds_upper))
    index = {v: i for i, v in enumerate(variables)}

    rows = []
    lower = []
    upper = []
    for line in sections.get("Subject To", []):
        _, rest = line.split(":", 1)
        if "<=" in rest:
            expr, rhs = rest.split("<=")
            lo, hi = -float("inf"), float(rhs)
        elif "=" in rest:
            expr, rhs = rest.split("=")
            lo = hi = float(rhs)
        else:
            raise ValueError(f"unsupported row: {line}")
        coeffs = parse_terms(expr)
        row = [0.0] * len(variables)
        for var, value in coeffs.items():
            row[index[var]] += value
        rows.append(row)
        lower.append(lo)
        upper.append(hi)

    import numpy as np
    from scipy.optimize import Bounds, LinearConstraint, milp

    cost = np.zeros(len(variables))
    for var, value in objective.items():
        cost[index[var]] = value
    integrality = np.array([1 if v in binaries else 0 for v in variables])
    lb = np.zeros(len(variables))
    ub = np.array(
        [1 if v in binaries else bounds_upper.get(v, float("inf")) for v in variables],
        dtype=float,
    )
    result = milp(
        c=cost,
        constraints=LinearConstraint(np.array(rows), lower, upper),
        integrality=integrality,
        bounds=Bounds(lb, ub),
    )
    if not result.success:
        print(f"INFEASIBLE {result.message}", file=sys.stderr)
        return 1
    print(f"OPTIMUM {round(result.fun)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
