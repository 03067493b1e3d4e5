"""Exact two-phase simplex over ``fractions.Fraction``.

Solves  min c.x  s.t.  A x = b, x >= 0.  Bland's rule guarantees
termination; no floating point is involved anywhere.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

ZERO = Fraction(0)


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: list[Fraction] | None = None
    value: Fraction | None = None


def _pivot(tab, basis, row, col):
    piv = tab[row][col]
    tab[row] = [v / piv for v in tab[row]]
    prow = tab[row]
    for r, line in enumerate(tab):
        if r != row and line[col] != 0:
            f = line[col]
            tab[r] = [a - f * b for a, b in zip(line, prow)]
    basis[row] = col


def _run(tab, basis, ncols):
    """Minimise the objective held in the last row (reduced costs, rhs last)."""
    while True:
        obj = tab[-1]
        col = next((j for j in range(ncols) if obj[j] < 0), None)
        if col is None:
            return "optimal"
        best = None
        for r in range(len(tab) - 1):
            a = tab[r][col]
            if a > 0:
                ratio = tab[r][-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[r] < basis[best[1]]):
                    best = (ratio, r)
        if best is None:
            return "unbounded"
        _pivot(tab, basis, best[1], col)


def solve_lp(
    c: Sequence[Fraction],
    a_eq: Sequence[Sequence[Fraction]],
    b_eq: Sequence[Fraction],
) -> LPResult:
    n = len(c)
    rows = []
    for line, rhs in zip(a_eq, b_eq):
        line = [Fraction(v) for v in line]
        rhs = Fraction(rhs)
        if rhs < 0:
            line, rhs = [-v for v in line], -rhs
        rows.append((line, rhs))
    m = len(rows)
    if m == 0:
        if any(Fraction(v) < 0 for v in c):
            return LPResult("unbounded")
        return LPResult("optimal", [ZERO] * n, ZERO)

    # phase 1: artificial variables n .. n+m-1
    tab = []
    for i, (line, rhs) in enumerate(rows):
        art = [ZERO] * m
        art[i] = Fraction(1)
        tab.append(line + art + [rhs])
    obj = [ZERO] * (n + m + 1)
    for line in tab:
        for j in range(n):
            obj[j] -= line[j]
        obj[-1] -= line[-1]
    tab.append(obj)
    basis = list(range(n, n + m))
    _run(tab, basis, n + m)
    if tab[-1][-1] != 0:
        return LPResult("infeasible")

    # drive zero-valued artificials out of the basis, dropping redundant rows
    r = 0
    while r < len(tab) - 1:
        if basis[r] >= n:
            col = next((j for j in range(n) if tab[r][j] != 0), None)
            if col is None:
                del tab[r]
                del basis[r]
                continue
            _pivot(tab, basis, r, col)
        r += 1
    tab = [line[:n] + [line[-1]] for line in tab[:-1]]

    # phase 2
    cost = [Fraction(v) for v in c] + [ZERO]
    for i, col in enumerate(basis):
        f = cost[col]
        if f != 0:
            cost = [a - f * b for a, b in zip(cost, tab[i])]
    tab.append(cost)
    status = _run(tab, basis, n)
    if status != "optimal":
        return LPResult(status)
    x = [ZERO] * n
    for i, col in enumerate(basis):
        x[col] = tab[i][-1]
    value = sum((Fraction(ci) * xi for ci, xi in zip(c, x)), ZERO)
    return LPResult("optimal", x, value)
