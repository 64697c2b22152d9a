"""Exact rational simplex for small linear programs.

Solves  min c.x  s.t.  A x = b, x >= 0  over fractions.Fraction with the
two-phase method and Bland's anti-cycling rule.  Deterministic and exact;
meant for desk-scale problems (tens of variables), not sparse LP work.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import NumericalError

ZERO = Fraction(0)
ONE = Fraction(1)

# Bland's rule cannot cycle, so this only guards against bugs.
MAX_PIVOTS = 100_000


class LPInfeasible(NumericalError):
    pass


class LPUnbounded(NumericalError):
    pass


@dataclass
class LPSolution:
    value: Fraction
    x: list  # list[Fraction], one entry per variable
    pivots: int


def _pivot(tab, basis, row, col):
    piv = tab[row][col]
    inv = ONE / piv
    tab[row] = [a * inv for a in tab[row]]
    prow = tab[row]
    for r in range(len(tab)):
        if r == row:
            continue
        factor = tab[r][col]
        if factor:
            tab[r] = [a - factor * p for a, p in zip(tab[r], prow)]
    basis[row] = col


def _price_out(tab, basis, cost, ncols):
    """Append the reduced-cost row for ``cost`` given the current basis."""
    z = [ZERO] * ncols
    for c, val in enumerate(cost):
        z[c] = Fraction(val)
    for r, bcol in enumerate(basis):
        cb = Fraction(cost[bcol]) if bcol < len(cost) else ZERO
        if cb:
            z = [a - cb * t for a, t in zip(z, tab[r])]
    return z


def _run(tab, basis, allowed, m):
    """Bland iterations on a tableau whose last row is the reduced-cost row."""
    pivots = 0
    zrow = tab[m]
    while True:
        col = next((j for j in allowed if zrow[j] < 0), None)
        if col is None:
            return pivots
        # ratio test; ties -> row whose basic variable has the smallest index
        best_ratio = None
        best_row = None
        for r in range(m):
            a = tab[r][col]
            if a > 0:
                ratio = tab[r][-1] / a
                if best_ratio is None or ratio < best_ratio or (
                    ratio == best_ratio and basis[r] < basis[best_row]
                ):
                    best_ratio = ratio
                    best_row = r
        if best_row is None:
            raise LPUnbounded("objective unbounded below")
        _pivot(tab, basis, best_row, col)
        zrow = tab[m]
        pivots += 1
        if pivots > MAX_PIVOTS:
            raise NumericalError(
                f"simplex exceeded {MAX_PIVOTS} pivots (m={m}, n={len(tab[0]) - 1})"
            )


def solve_lp(cost, rows, rhs) -> LPSolution:
    """Minimize ``cost . x`` subject to ``rows x = rhs``, ``x >= 0``."""
    m = len(rows)
    n = len(cost)
    cost = [Fraction(c) for c in cost]
    tab = []
    for row, b in zip(rows, rhs):
        row = [Fraction(a) for a in row]
        b = Fraction(b)
        if b < 0:
            row = [-a for a in row]
            b = -b
        tab.append(row + [b])
    if not m:
        return LPSolution(ZERO, [ZERO] * n, 0)

    # phase 1: one artificial per row
    ncols = n + m + 1
    for r in range(m):
        art = [ZERO] * m
        art[r] = ONE
        tab[r] = tab[r][:n] + art + tab[r][n:]
    basis = [n + r for r in range(m)]
    phase1_cost = [ZERO] * n + [ONE] * m
    tab.append(_price_out(tab, basis, phase1_cost, ncols))
    pivots = _run(tab, basis, range(n), m)
    if tab[m][-1] < 0:
        raise LPInfeasible(f"phase-1 optimum {-tab[m][-1]} > 0")

    # drive leftover artificials out of the basis; drop redundant rows
    drop = []
    for r in range(m):
        if basis[r] >= n:
            col = next((j for j in range(n) if tab[r][j] != 0), None)
            if col is None:
                drop.append(r)
            else:
                _pivot(tab, basis, r, col)
    if drop:
        tab = [row for r, row in enumerate(tab) if r not in drop]
        basis = [b for r, b in enumerate(basis) if r not in drop]
        m -= len(drop)

    # phase 2 on the original columns
    tab = [row[:n] + [row[-1]] for row in tab[:m]]
    tab.append(_price_out(tab, basis, cost, n + 1))
    pivots += _run(tab, basis, range(n), m)

    x = [ZERO] * n
    for r, bcol in enumerate(basis):
        x[bcol] = tab[r][-1]
    return LPSolution(-tab[m][-1], x, pivots)
