"""Exact linear programming over Fraction.

Dense two-phase primal simplex with Bland's rule. Sized for the systems
arising here (tens of rows and columns), where exact rational pivoting is
affordable and removes every tolerance question.

Problems are stated in equality standard form

    optimize c.x   subject to   A x = b,  x >= 0.

Callers add their own slack columns for inequality rows. Returned duals
follow the convention of the requested sense: for maximize, y satisfies
A^T y >= c with y.b = value; for minimize, A^T y <= c with y.b = value.
On infeasibility y is a Farkas ray: A^T y <= 0 and y.b > 0.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

from .errors import DimensionMismatch

Vec = List[Fraction]

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LPResult:
    status: str
    x: Optional[Vec]
    y: Optional[Vec]
    value: Optional[Fraction]


def solve_lp(A: Sequence[Sequence], b: Sequence, c: Sequence,
             maximize: bool = True) -> LPResult:
    m = len(A)
    n = len(c)
    for row in A:
        if len(row) != n:
            raise DimensionMismatch(
                "constraint row has %d entries, expected %d" % (len(row), n))
    if len(b) != m:
        raise DimensionMismatch("rhs has %d entries, expected %d" % (len(b), m))

    cost = [Fraction(v) for v in c]
    if not maximize:
        cost = [-v for v in cost]

    # flip rows until b >= 0 so the artificial basis is feasible
    signs = []
    tab: List[Vec] = []
    for i in range(m):
        bi = Fraction(b[i])
        s = -1 if bi < 0 else 1
        signs.append(s)
        row = [s * Fraction(v) for v in A[i]]
        row += [Fraction(1) if j == i else Fraction(0) for j in range(m)]
        row.append(s * bi)
        tab.append(row)

    basis = [n + i for i in range(m)]

    phase1 = [Fraction(0)] * n + [Fraction(-1)] * m
    _pivot_to_optimum(tab, basis, phase1, n + m)
    if _objective(tab, basis, phase1) != 0:
        ray = _dual_from_tableau(tab, basis, phase1, n, m)
        y = [-signs[i] * ray[i] for i in range(m)]
        return LPResult(INFEASIBLE, None, y, None)

    _expel_artificials(tab, basis, n, m)

    phase2 = cost + [Fraction(0)] * m
    status = _pivot_to_optimum(tab, basis, phase2, n)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED, None, None, None)

    x = [Fraction(0)] * n
    for r, j in enumerate(basis):
        if j < n:
            x[j] = tab[r][-1]
    value = _objective(tab, basis, phase2)
    dual = _dual_from_tableau(tab, basis, phase2, n, m)
    y = [signs[i] * dual[i] for i in range(m)]
    if not maximize:
        value = -value
        y = [-v for v in y]
    return LPResult(OPTIMAL, x, y, value)


def _pivot_to_optimum(tab, basis, cost, entering_limit):
    """Bland's rule: smallest eligible entering index, smallest basic
    leaving index among the ratio-test minimizers."""
    m = len(tab)
    while True:
        cb = [cost[j] for j in basis]
        enter = -1
        for j in range(entering_limit):
            r = cost[j] - sum(cb[i] * tab[i][j] for i in range(m))
            if r > 0:
                enter = j
                break
        if enter < 0:
            return OPTIMAL
        leave = -1
        best = None
        for i in range(m):
            a = tab[i][enter]
            if a > 0:
                ratio = tab[i][-1] / a
                if best is None or ratio < best or (
                        ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave < 0:
            return UNBOUNDED
        _pivot(tab, basis, leave, enter)


def _pivot(tab, basis, row, col):
    piv = tab[row][col]
    tab[row] = [v / piv for v in tab[row]]
    prow = tab[row]
    for i in range(len(tab)):
        if i == row:
            continue
        f = tab[i][col]
        if f:
            tab[i] = [v - f * p for v, p in zip(tab[i], prow)]
    basis[row] = col


def _expel_artificials(tab, basis, n, m):
    # artificials still basic after phase 1 sit at level 0; pivot them out
    # on any nonzero structural entry, or leave them parked on a redundant
    # (all-zero) row where they can never change value
    for r in range(m):
        if basis[r] >= n and tab[r][-1] == 0:
            for j in range(n):
                if tab[r][j] != 0:
                    _pivot(tab, basis, r, j)
                    break


def _objective(tab, basis, cost):
    return sum(cost[j] * tab[r][-1] for r, j in enumerate(basis))


def _dual_from_tableau(tab, basis, cost, n, m):
    """Row prices c_B . B^{-1}, read off the artificial column block.

    After phase 1 these are negated to give the Farkas ray; after phase 2
    they are the optimal duals.
    """
    cb = [cost[j] for j in basis]
    return [sum(cb[r] * tab[r][n + i] for r in range(m)) for i in range(m)]
