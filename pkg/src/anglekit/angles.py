"""Angle-structure feasibility decided by exact linear programming.

The linear system has one equation per tetrahedron corner (the three
dihedral angles meeting an ideal vertex sum to 1 in pi units, those at a
hyperideal vertex to strictly less than 1) and one per edge class (angles
around an interior edge sum to 2). Strict solutions are found by shifting
every angle by a joint slack and maximizing it; a positive optimum is a
constructive witness, a zero optimum or an empty region yields a Farkas
certificate read off the final simplex basis. Taut assignments, valued in
{0, 1}, are found by backtracking over the three per-tet patterns instead.
"""

import os
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import List, Optional, Tuple

from .errors import DimensionMismatch, PreconditionViolated, SizeCap
from .lp import INFEASIBLE, OPTIMAL, solve_lp
from .triangulation import (
    CORNER_EDGES,
    AngleAssignment,
    Triangulation,
    opposite_edge,
)

# rhs kinds, in the row order produced by assemble_angle_system
RHS_IDEAL = "one"        # ideal corner: sum = 1
RHS_HYPER = "less_one"   # hyperideal corner: sum < 1
RHS_EDGE = "two"         # interior edge class: sum = 2

DEFAULT_SIZE_CAP = 24


@dataclass(frozen=True)
class AngleSystem:
    """Coefficient matrix of the angle equations over the 6n angle columns.

    Rows are ordered corners first (by tetrahedron, then vertex), then edge
    classes by index. labels[i] is ("corner", t, k) or ("edge", j);
    rhs_kinds[i] records the right-hand side pattern of row i.
    """

    size: int
    rows: Tuple[Tuple[int, ...], ...]
    labels: Tuple[Tuple, ...]
    rhs_kinds: Tuple[str, ...]

    @property
    def columns(self) -> int:
        return 6 * self.size

    @property
    def corner_row_count(self) -> int:
        return sum(1 for lb in self.labels if lb[0] == "corner")

    @property
    def edge_row_count(self) -> int:
        return sum(1 for lb in self.labels if lb[0] == "edge")

    def supremal_rhs(self) -> List[Fraction]:
        """The rhs with hyperideal entries pushed to their upper bound 1."""
        return [Fraction(2) if k == RHS_EDGE else Fraction(1)
                for k in self.rhs_kinds]


@dataclass(frozen=True)
class FarkasCertificate:
    """Infeasibility witness: one multiplier per corner row and edge row.

    Valid when the combination of rows it defines is nonpositive on every
    angle column, not identically zero, and pairs nonnegatively with every
    admissible right-hand side.
    """

    corner: Tuple[Fraction, ...]
    edge: Tuple[Fraction, ...]

    def vector(self) -> List[Fraction]:
        return list(self.corner) + list(self.edge)

    def normalized(self) -> "FarkasCertificate":
        """Scale by a positive rational to coprime integers."""
        vec = self.vector()
        denoms = [v.denominator for v in vec]
        scale = 1
        for d in denoms:
            scale = scale * d // gcd(scale, d)
        ints = [int(v * scale) for v in vec]
        g = 0
        for v in ints:
            g = gcd(g, abs(v))
        if g > 1:
            ints = [v // g for v in ints]
        vals = tuple(Fraction(v) for v in ints)
        nc = len(self.corner)
        return FarkasCertificate(vals[:nc], vals[nc:])


@dataclass(frozen=True)
class SolveResult:
    """Outcome of an angle solve: a witness or a certificate, never both.

    An infeasible result normally carries a verifying certificate. It can
    be None on triangulations with hyperideal corners: the infeasibility
    may depend on which value each free hyperideal entry takes, in which
    case no single multiplier vector covers the whole admissible family
    (the decision itself is still exact). This never happens without
    hyperideal corners.
    """

    status: str                     # "feasible" | "infeasible"
    mode: str
    assignment: Optional[AngleAssignment]
    hyper_corner_sums: Tuple[Tuple[Tuple[int, int], Fraction], ...]
    certificate: Optional[FarkasCertificate]
    slack: Optional[Fraction]       # optimal joint slack; None if region empty

    @property
    def feasible(self) -> bool:
        return self.status == "feasible"


def assemble_angle_system(T: Triangulation) -> AngleSystem:
    n = T.size
    rows = []
    labels = []
    kinds = []
    for (t, k) in T.corners():
        row = [0] * (6 * n)
        for e in CORNER_EDGES[k]:
            row[6 * t + e] = 1
        rows.append(tuple(row))
        labels.append(("corner", t, k))
        kinds.append(RHS_HYPER if T.corner_kind(t, k) == "hyper"
                     else RHS_IDEAL)
    for c in T.edge_classes:
        row = [0] * (6 * n)
        for (t, e) in c.members:
            row[6 * t + e] += 1
        rows.append(tuple(row))
        labels.append(("edge", c.index))
        kinds.append(RHS_EDGE)
    return AngleSystem(n, tuple(rows), tuple(labels), tuple(kinds))


def verify_certificate(system: AngleSystem, cert: FarkasCertificate) -> bool:
    """Exact check of the three certificate conditions, solver-independent.

    The pairing condition must hold for every admissible rhs; since a
    hyperideal entry ranges over (0, 1), its worst case contributes
    min(0, h) rather than the supremal value h itself.
    """
    nc = system.corner_row_count
    if len(cert.corner) != nc or len(cert.edge) != system.edge_row_count:
        raise DimensionMismatch(
            "certificate has %d+%d entries, system has %d+%d rows"
            % (len(cert.corner), len(cert.edge), nc, system.edge_row_count))
    y = cert.vector()
    combo = [sum(y[i] * system.rows[i][j] for i in range(len(y)))
             for j in range(system.columns)]
    if any(v > 0 for v in combo):
        return False
    if all(v == 0 for v in combo):
        return False
    pairing = Fraction(0)
    for i, kind in enumerate(system.rhs_kinds):
        if kind == RHS_IDEAL:
            pairing += y[i]
        elif kind == RHS_EDGE:
            pairing += 2 * y[i]
        else:
            pairing += min(Fraction(0), y[i])
    return pairing >= 0


def solve_angles(T: Triangulation, mode: str) -> SolveResult:
    if mode not in ("strict", "semi"):
        raise PreconditionViolated("solve_angles mode must be strict or semi")
    system = assemble_angle_system(T)
    if mode == "strict":
        return _solve_strict(T, system)
    return _solve_semi(T, system)


def _hyper_sums(T, assignment):
    return tuple(((t, k), assignment.corner_sum(t, k))
                 for (t, k) in T.hyper_corners())


def _solve_strict(T: Triangulation, system: AngleSystem) -> SolveResult:
    """Maximize a joint slack under all angle equations.

    Columns: one shifted angle per (tet, edge) with angle = column + slack,
    then one surplus per hyperideal corner row, then the slack itself. A
    positive optimum turns back into strictly positive angles; otherwise
    the simplex dual (negated) or the infeasibility ray is the certificate.
    """
    n = system.columns
    hyper_rows = [i for i, k in enumerate(system.rhs_kinds) if k == RHS_HYPER]
    surplus_of = {r: n + j for j, r in enumerate(hyper_rows)}
    eps_col = n + len(hyper_rows)
    width = eps_col + 1

    A = []
    b = []
    for i, base in enumerate(system.rows):
        row = [Fraction(v) for v in base] + [Fraction(0)] * (width - n)
        kind = system.rhs_kinds[i]
        weight = sum(base)          # 3 per corner, valence per edge class
        if kind == RHS_IDEAL:
            row[eps_col] = Fraction(weight)
            b.append(Fraction(1))
        elif kind == RHS_HYPER:
            row[eps_col] = Fraction(weight + 1)
            row[surplus_of[i]] = Fraction(1)
            b.append(Fraction(1))
        else:
            row[eps_col] = Fraction(weight)
            b.append(Fraction(2))
        A.append(row)
    c = [Fraction(0)] * width
    c[eps_col] = Fraction(1)

    res = solve_lp(A, b, c, maximize=True)
    if res.status == INFEASIBLE:
        cert = _finalize_certificate(system, res.y)
        return SolveResult("infeasible", "strict", None, (), cert, None)
    assert res.status == OPTIMAL   # slack is bounded by the corner rows
    eps = res.value
    if eps > 0:
        values = [res.x[j] + eps for j in range(n)]
        assignment = AngleAssignment(T, values)
        return SolveResult("feasible", "strict", assignment,
                           _hyper_sums(T, assignment), None, eps)
    cert = _finalize_certificate(system, [-v for v in res.y])
    return SolveResult("infeasible", "strict", None, (), cert, Fraction(0))


def _solve_semi(T: Triangulation, system: AngleSystem) -> SolveResult:
    """Feasibility over the closed region, minimizing total quad area.

    Each edge column lies in two of a tetrahedron's three quads, so the sum
    of combinatorial areas over all quads is twice the total angle mass
    minus a constant; minimizing it drives quads away from area zero.
    """
    n = system.columns
    hyper_rows = [i for i, k in enumerate(system.rhs_kinds) if k == RHS_HYPER]
    surplus_of = {r: n + j for j, r in enumerate(hyper_rows)}
    width = n + len(hyper_rows)

    A = []
    b = []
    for i, base in enumerate(system.rows):
        row = [Fraction(v) for v in base] + [Fraction(0)] * (width - n)
        kind = system.rhs_kinds[i]
        if kind == RHS_HYPER:
            row[surplus_of[i]] = Fraction(1)
            b.append(Fraction(1))
        elif kind == RHS_IDEAL:
            b.append(Fraction(1))
        else:
            b.append(Fraction(2))
        A.append(row)
    c = [Fraction(2)] * n + [Fraction(0)] * len(hyper_rows)

    res = solve_lp(A, b, c, maximize=False)
    if res.status == INFEASIBLE:
        cert = _finalize_certificate(system, res.y)
        return SolveResult("infeasible", "semi", None, (), cert, None)
    assert res.status == OPTIMAL   # objective bounded below by 0
    assignment = AngleAssignment(T, res.x[:n])
    return SolveResult("feasible", "semi", assignment,
                       _hyper_sums(T, assignment), None, Fraction(0))


def _finalize_certificate(system: AngleSystem,
                          y: List[Fraction]) -> Optional[FarkasCertificate]:
    """Turn a simplex dual or infeasibility ray into a verifying
    certificate, or None when none exists.

    Without hyperideal corners the repair step always succeeds. With them
    a uniform certificate can be genuinely impossible even though the
    system is infeasible, because each fixed hyperideal rhs may need a
    different multiplier vector.
    """
    nc = system.corner_row_count
    cand = FarkasCertificate(tuple(y[:nc]), tuple(y[nc:]))
    cand = _perturb_if_degenerate(system, cand)
    if cand is None or not verify_certificate(system, cand):
        cand = _repair_certificate(system)
    if cand is None:
        return None
    return cand.normalized()


def _perturb_if_degenerate(system, cert):
    """The simplex dual can combine rows to exactly zero on all angle
    columns (possible only through hyperideal surplus columns). If its
    pairing value is positive, spend half of it lowering one ideal corner
    multiplier, which makes three columns strictly negative."""
    y = cert.vector()
    combo_zero = True
    for j in range(system.columns):
        v = sum(y[i] * system.rows[i][j] for i in range(len(y)))
        if v > 0:
            return cert          # broken beyond perturbing; repair instead
        if v != 0:
            combo_zero = False
    if not combo_zero:
        return cert
    pairing = Fraction(0)
    for i, kind in enumerate(system.rhs_kinds):
        if kind == RHS_IDEAL:
            pairing += y[i]
        elif kind == RHS_EDGE:
            pairing += 2 * y[i]
        else:
            pairing += min(Fraction(0), y[i])
    if pairing <= 0:
        return None
    target = system.rhs_kinds.index(RHS_IDEAL)
    h = list(cert.corner)
    h[target] -= pairing / 2
    return FarkasCertificate(tuple(h), cert.edge)


def _repair_certificate(system) -> Optional[FarkasCertificate]:
    """Search the certificate cone directly by LP.

    Free multipliers are split into signed parts, with hyperideal corner
    multipliers restricted to be nonpositive (always possible: lowering
    them past zero never hurts any condition). Scale is pinned by making
    the column combination sum to -1, which also forces it nonzero.
    """
    rows = system.rows
    m = len(rows)
    nc = system.corner_row_count
    hyper = [i for i, k in enumerate(system.rhs_kinds) if k == RHS_HYPER]
    is_hyper = [k == RHS_HYPER for k in system.rhs_kinds]

    # columns: pos part / neg part per non-hyper row, neg magnitude per
    # hyper row, one slack per angle column, one slack for the pairing row
    cols = []
    for i in range(m):
        if is_hyper[i]:
            cols.append(("hneg", i))
        else:
            cols.append(("pos", i))
            cols.append(("neg", i))
    slack0 = len(cols)
    width = slack0 + system.columns + 1

    def row_coeff(i, j):
        return rows[i][j]

    A = []
    b = []
    for j in range(system.columns):
        row = [Fraction(0)] * width
        for idx, (tag, i) in enumerate(cols):
            coef = Fraction(row_coeff(i, j))
            if tag == "pos":
                row[idx] = coef
            else:
                row[idx] = -coef
        row[slack0 + j] = Fraction(1)
        A.append(row)
        b.append(Fraction(0))
    # pin the scale: total column combination equals -1
    row = [Fraction(0)] * width
    for j in range(system.columns):
        row[slack0 + j] = Fraction(1)
    A.append(row)
    b.append(Fraction(1))
    # pairing with the supremal rhs stays nonnegative
    row = [Fraction(0)] * width
    for idx, (tag, i) in enumerate(cols):
        w = Fraction(2) if system.rhs_kinds[i] == RHS_EDGE else Fraction(1)
        row[idx] = w if tag == "pos" else -w
    row[width - 1] = Fraction(-1)
    A.append(row)
    b.append(Fraction(0))

    res = solve_lp(A, b, [Fraction(0)] * width, maximize=True)
    if res.status != OPTIMAL:
        return None
    y = [Fraction(0)] * m
    for idx, (tag, i) in enumerate(cols):
        if tag == "pos":
            y[i] += res.x[idx]
        else:
            y[i] -= res.x[idx]
    return FarkasCertificate(tuple(y[:nc]), tuple(y[nc:]))


# ------------------------------------------------------------------ taut

def _size_cap(explicit: Optional[int]) -> int:
    if explicit is not None:
        return explicit
    env = os.environ.get("ANGLEKIT_SIZE_CAP")
    return int(env) if env else DEFAULT_SIZE_CAP


def search_taut(T: Triangulation,
                size_cap: Optional[int] = None) -> Optional[AngleAssignment]:
    """Backtracking search for a {0, 1} angle assignment.

    An ideal or flat tetrahedron meets every corner equation with exactly
    one edge from each opposite pair, so its only candidate patterns put 1
    on one of the three opposite pairs. A truncated tetrahedron admits no
    pattern at all: whichever pair is chosen contributes 1 to the
    hyperideal corner, whose sum must stay below 1. Patterns are tried in
    pair order per tetrahedron, so the first hit is lexicographically
    least in the pattern tuple.
    """
    cap = _size_cap(size_cap)
    if T.size > cap:
        raise SizeCap("taut search capped at %d tets, got %d" % (cap, T.size))
    if any(t.kind == "trunc" for t in T.tets):
        return None

    nclasses = len(T.edge_classes)
    # contribution[t][p][j] and per-tet member totals per class
    totals = [[0] * nclasses for _ in range(T.size)]
    contrib = [[[0] * nclasses for _ in range(3)] for _ in range(T.size)]
    for c in T.edge_classes:
        for (t, e) in c.members:
            totals[t][c.index] += 1
            for p in range(3):
                if e == p or e == opposite_edge(p):
                    contrib[t][p][c.index] += 1

    sums = [0] * nclasses
    remaining = [0] * nclasses
    for t in range(T.size):
        for j in range(nclasses):
            remaining[j] += totals[t][j]

    pattern: List[int] = []

    def admissible(t, p):
        for j in range(nclasses):
            s = sums[j] + contrib[t][p][j]
            rest = remaining[j] - totals[t][j]
            if s > 2 or s + rest < 2:
                return False
        return True

    def dfs(t):
        if t == T.size:
            return True
        for p in range(3):
            if not admissible(t, p):
                continue
            for j in range(nclasses):
                sums[j] += contrib[t][p][j]
                remaining[j] -= totals[t][j]
            pattern.append(p)
            if dfs(t + 1):
                return True
            pattern.pop()
            for j in range(nclasses):
                sums[j] -= contrib[t][p][j]
                remaining[j] += totals[t][j]
        return False

    if not dfs(0):
        return None
    values = [Fraction(0)] * (6 * T.size)
    for t, p in enumerate(pattern):
        values[6 * t + p] = Fraction(1)
        values[6 * t + opposite_edge(p)] = Fraction(1)
    return AngleAssignment(T, values)
