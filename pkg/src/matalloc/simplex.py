"""Exact-rational feasibility via the two-phase simplex method.

Dense tableau over fractions.Fraction with Bland's rule (smallest-index
entering and leaving candidates), so every run terminates and returns a
basic feasible point of the original polytope. Only phase one is needed:
callers want a vertex of a feasibility system, not an optimum.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

ZERO = Fraction(0)
ONE = Fraction(1)


def feasible_point(num_vars: int,
                   constraints: Sequence[tuple[dict[int, Fraction], str, Fraction]]
                   ) -> list[Fraction] | None:
    """A basic feasible solution of {x >= 0 : constraints}, or None.

    Each constraint is (coeffs, sense, rhs) with coeffs a sparse dict
    var -> coefficient and sense one of "<=", ">=", "==".
    """
    rows = []
    for coeffs, sense, rhs in constraints:
        rhs = Fraction(rhs)
        coeffs = {j: Fraction(c) for j, c in coeffs.items() if c}
        if rhs < 0:
            coeffs = {j: -c for j, c in coeffs.items()}
            rhs = -rhs
            sense = {"<=": ">=", ">=": "<=", "==": "=="}[sense]
        rows.append((coeffs, sense, rhs))

    num_slack = sum(1 for _, sense, _ in rows if sense != "==")
    num_art = sum(1 for _, sense, _ in rows if sense != "<=")
    width = num_vars + num_slack + num_art + 1
    tableau: list[list[Fraction]] = []
    basis: list[int] = []
    art_cols: list[int] = []
    slack_at = num_vars
    art_at = num_vars + num_slack
    for coeffs, sense, rhs in rows:
        row = [ZERO] * width
        for j, c in coeffs.items():
            row[j] = c
        if sense == "<=":
            row[slack_at] = ONE
            basis.append(slack_at)
            slack_at += 1
        elif sense == ">=":
            row[slack_at] = -ONE
            slack_at += 1
            row[art_at] = ONE
            basis.append(art_at)
            art_cols.append(art_at)
            art_at += 1
        else:
            row[art_at] = ONE
            basis.append(art_at)
            art_cols.append(art_at)
            art_at += 1
        row[-1] = rhs
        tableau.append(row)

    art_set = set(art_cols)
    # phase-1 objective row: minimize the artificial sum; reduced costs start
    # as -(sum of artificial-basic rows) on non-artificial columns
    obj = [ZERO] * width
    for i, b in enumerate(basis):
        if b in art_set:
            for j in range(width):
                obj[j] -= tableau[i][j]
    for j in art_cols:
        obj[j] = ZERO

    def pivot(row_i: int, col_j: int) -> None:
        piv = tableau[row_i][col_j]
        tableau[row_i] = [v / piv for v in tableau[row_i]]
        for r in range(len(tableau)):
            if r != row_i and tableau[r][col_j]:
                f = tableau[r][col_j]
                tableau[r] = [a - f * b for a, b in zip(tableau[r], tableau[row_i])]
        if obj[col_j]:
            f = obj[col_j]
            for j in range(width):
                obj[j] -= f * tableau[row_i][j]
        basis[row_i] = col_j

    while True:
        enter = next((j for j in range(width - 1) if obj[j] < 0), None)
        if enter is None:
            break
        leave, best = None, None
        for i, row in enumerate(tableau):
            if row[enter] > 0:
                ratio = row[-1] / row[enter]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:
            return None  # unbounded phase-1 objective cannot happen; defensive
        pivot(leave, enter)

    if -obj[-1] > 0:
        return None  # artificial sum cannot reach zero: infeasible

    # drive zero-level artificials out of the basis (or drop redundant rows)
    for i in range(len(tableau) - 1, -1, -1):
        if basis[i] in art_set:
            col = next((j for j in range(num_vars + num_slack) if tableau[i][j]), None)
            if col is None:
                del tableau[i]
                del basis[i]
            else:
                pivot(i, col)

    point = [ZERO] * num_vars
    for i, b in enumerate(basis):
        if b < num_vars:
            point[b] = tableau[i][-1]
    return point
