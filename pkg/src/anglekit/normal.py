"""Normal-disc coordinates and the sufficiency checks built on them.

Coordinates have length 7n: the 3n quadrilateral counts first (by tet,
then by opposite-pair index), then the 4n corner-triangle counts (by tet,
then corner). Compatibility equations match normal arcs across each face
gluing; their kernel is the solution space the generalized Euler
characteristic and combinatorial area act on.
"""

import os
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import (
    DimensionMismatch,
    MissingSemiAngle,
    NegativeQuad,
    PreconditionViolated,
    SizeCap,
    ZeroValence,
)
from .lp import OPTIMAL, solve_lp
from .triangulation import (
    CORNER_EDGES,
    EDGE_INDEX,
    FACE_VERTICES,
    AngleAssignment,
    Triangulation,
    validate_angles,
)

# edges met by quad p (it misses exactly the opposite pair {p, 5-p})
QUAD_EDGES = tuple(tuple(e for e in range(6) if e not in (p, 5 - p))
                   for p in range(3))

# vertex enumeration is exponential in the kernel dimension; past ten
# tetrahedra the ray count explodes, so opt in via ANGLEKIT_SIZE_CAP
DEFAULT_COLUMN_CAP = 7 * 10


@dataclass(frozen=True, order=True)
class DiscType:
    """One of the seven normal disc types of a tetrahedron."""

    tet: int
    kind: str        # "quad" | "triangle"
    index: int       # opposite-pair index 0..2, or corner 0..3

    def edges(self) -> Tuple[int, ...]:
        if self.kind == "quad":
            return QUAD_EDGES[self.index]
        return CORNER_EDGES[self.index]

    def column(self, size: int) -> int:
        if self.kind == "quad":
            return 3 * self.tet + self.index
        return 3 * size + 4 * self.tet + self.index


def disc_types(T: Triangulation) -> List[DiscType]:
    """All 7n types in coordinate-column order."""
    out = [DiscType(t, "quad", p) for t in range(T.size) for p in range(3)]
    out += [DiscType(t, "triangle", k)
            for t in range(T.size) for k in range(4)]
    return out


def quad_column(size: int, tet: int, pairing: int) -> int:
    return 3 * tet + pairing


def triangle_column(size: int, tet: int, corner: int) -> int:
    return 3 * size + 4 * tet + corner


def _arc_quad(face: int, corner: int) -> int:
    # the quad whose arc in this face cuts off this corner is the one
    # pairing the corner with the omitted vertex
    e = EDGE_INDEX[(face, corner)]
    return min(e, 5 - e)


@dataclass(frozen=True)
class CompatibilityMatrix:
    """Arc-matching equations: 3 rows per face gluing over 7n columns.

    Entries are accumulated, so a self-gluing that matches a disc type
    with itself cancels to 0 and the row carries fewer than 4 nonzeros.
    """

    columns: int
    rows: Tuple[Tuple[int, ...], ...]
    labels: Tuple[Tuple[int, int], ...]    # (gluing index, face-a corner)


def compatibility_matrix(T: Triangulation) -> CompatibilityMatrix:
    n = T.size
    rows = []
    labels = []
    for gi, g in enumerate(T.gluings):
        vmap = g.vertex_map()
        for x in FACE_VERTICES[g.face_a]:
            row = [0] * (7 * n)
            row[triangle_column(n, g.tet_a, x)] += 1
            row[quad_column(n, g.tet_a, _arc_quad(g.face_a, x))] += 1
            y = vmap[x]
            row[triangle_column(n, g.tet_b, y)] -= 1
            row[quad_column(n, g.tet_b, _arc_quad(g.face_b, y))] -= 1
            rows.append(tuple(row))
            labels.append((gi, x))
    return CompatibilityMatrix(7 * n, tuple(rows), tuple(labels))


# ---------------------------------------------------------- linear algebra

def _rref(rows: Sequence[Sequence[Fraction]], width: int):
    """Reduced row echelon form; returns (reduced rows, pivot columns)."""
    mat = [list(map(Fraction, r)) for r in rows]
    pivots = []
    r = 0
    for c in range(width):
        pr = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if pr is None:
            continue
        mat[r], mat[pr] = mat[pr], mat[r]
        inv = mat[r][c]
        mat[r] = [v / inv for v in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [v - f * p for v, p in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return mat[:r], pivots


def kernel_basis(Q: CompatibilityMatrix) -> List[Tuple[Fraction, ...]]:
    """Canonical rational basis of the null space.

    One vector per free column: 1 there, minus the reduced-echelon entry
    at each pivot column, 0 elsewhere.
    """
    reduced, pivots = _rref(Q.rows, Q.columns)
    pivot_set = set(pivots)
    basis = []
    for f in range(Q.columns):
        if f in pivot_set:
            continue
        vec = [Fraction(0)] * Q.columns
        vec[f] = Fraction(1)
        for r, p in enumerate(pivots):
            vec[p] = -reduced[r][f]
        basis.append(tuple(vec))
    return basis


# ------------------------------------------------------------- functionals

def _edge_valences(T: Triangulation) -> Dict[Tuple[int, int], int]:
    val = {}
    for c in T.edge_classes:
        for (t, e) in c.members:
            val[(t, e)] = c.valence
    return val


def _check_length(T, s):
    if len(s) != 7 * T.size:
        raise DimensionMismatch(
            "coordinate has %d entries, expected %d" % (len(s), 7 * T.size))


def chi_star(T: Triangulation, s: Sequence[Fraction],
             b_table: Optional[Dict[int, int]] = None) -> Fraction:
    """Generalized Euler characteristic.

    Per disc: -(1+b)/2 for a triangle, -(2+b)/2 for a quad, plus 1/d over
    the valences d of the disc's intersected edges. b counts boundary arcs
    per type, zero by default for all seven types.
    """
    _check_length(T, s)
    val = _edge_valences(T)
    total = Fraction(0)
    for d in disc_types(T):
        col = d.column(T.size)
        x = Fraction(s[col])
        if x == 0:
            continue
        b = (b_table or {}).get(col, 0)
        base = Fraction(-(1 + b), 2) if d.kind == "triangle" \
            else Fraction(-(2 + b), 2)
        for e in d.edges():
            dv = val[(d.tet, e)]
            if dv < 1:
                raise ZeroValence("edge (%d,%d) has valence %d"
                                  % (d.tet, e, dv))
            base += Fraction(1, dv)
        total += x * base
    return total


def combinatorial_area(T: Triangulation, a: AngleAssignment,
                       d: DiscType) -> Fraction:
    """Angle sum over the disc's intersected edges minus (k-2), pi units."""
    if len(a.values) != 6 * T.size:
        raise DimensionMismatch("assignment does not fit triangulation")
    edges = d.edges()
    return sum(a.value(d.tet, e) for e in edges) - (len(edges) - 2)


def chi_A(T: Triangulation, a: AngleAssignment,
          s: Sequence[Fraction]) -> Fraction:
    """Half the triangle-weighted combinatorial area of s."""
    _check_length(T, s)
    total = Fraction(0)
    for t in range(T.size):
        for k in range(4):
            y = Fraction(s[triangle_column(T.size, t, k)])
            if y:
                total += y * combinatorial_area(
                    T, a, DiscType(t, "triangle", k))
    return total / 2


def _in_kernel(T, s):
    Q = compatibility_matrix(T)
    return all(sum(Fraction(r[j]) * Fraction(s[j]) for j in range(Q.columns))
               == 0 for r in Q.rows)


def lt_identity_residual(T: Triangulation, a: AngleAssignment,
                         s: Sequence[Fraction]) -> Fraction:
    """chi*(s) - chi_A(s) - half the quad-weighted area; exactly 0 for a
    semi-angle structure and a compatibility-kernel element."""
    _check_length(T, s)
    if not validate_angles(T, a, "semi").ok:
        raise PreconditionViolated(
            "assignment is not a semi-angle structure: %s"
            % validate_angles(T, a, "semi").first_violation)
    if not _in_kernel(T, s):
        raise PreconditionViolated(
            "coordinate does not satisfy the compatibility equations")
    quad_term = Fraction(0)
    for t in range(T.size):
        for p in range(3):
            x = Fraction(s[quad_column(T.size, t, p)])
            if x:
                quad_term += x * combinatorial_area(T, a, DiscType(t, "quad", p))
    return chi_star(T, s) - chi_A(T, a, s) - quad_term / 2


def vertical_quads(T: Triangulation,
                   a: AngleAssignment) -> Tuple[DiscType, ...]:
    """Quad types of combinatorial area exactly zero."""
    out = []
    for t in range(T.size):
        for p in range(3):
            d = DiscType(t, "quad", p)
            if combinatorial_area(T, a, d) == 0:
                out.append(d)
    return tuple(out)


# ------------------------------------------------------ extreme points

@dataclass(frozen=True)
class ConeConstraints:
    """Polytope description over normal coordinates: selected columns kept
    nonnegative, selected columns pinned to zero, and one normalization
    (the stated columns sum to 1)."""

    nonnegative: Tuple[int, ...]
    zero: Tuple[int, ...] = ()
    normalize: Tuple[int, ...] = ()


def _column_cap(explicit: Optional[int]) -> int:
    if explicit is not None:
        return explicit
    env = os.environ.get("ANGLEKIT_SIZE_CAP")
    return 7 * int(env) if env else DEFAULT_COLUMN_CAP


def cone_extreme_points(Q: CompatibilityMatrix, constraints: ConeConstraints,
                        column_cap: Optional[int] = None,
                        ) -> List[Tuple[Fraction, ...]]:
    """Exact vertex enumeration of the constrained solution polytope.

    Works inside the kernel of the compatibility rows (with the pinned
    columns appended), runs the double description method over the
    nonnegativity halfspaces there, and scales the extreme rays onto the
    normalization plane. The underlying cone must be pointed, which holds
    whenever every column is constrained nonnegative. An independent LP
    feasibility probe cross-checks emptiness.
    """
    cap = _column_cap(column_cap)
    if Q.columns > cap:
        raise SizeCap("extreme-point enumeration capped at %d columns, got %d"
                      % (cap, Q.columns))
    if not constraints.normalize:
        raise PreconditionViolated("normalization subset must be nonempty")

    width = Q.columns
    ext_rows = list(Q.rows)
    for j in constraints.zero:
        row = [0] * width
        row[j] = 1
        ext_rows.append(tuple(row))
    basis = kernel_basis(CompatibilityMatrix(width, tuple(ext_rows), ()))
    kdim = len(basis)

    vertices: List[Tuple[Fraction, ...]] = []
    if kdim > 0:
        # inequality normals in kernel coordinates
        normals = []
        for i in constraints.nonnegative:
            normals.append(tuple(b[i] for b in basis))
        _, piv = _rref(normals, kdim)
        if len(piv) < kdim:
            raise PreconditionViolated(
                "extreme points undefined: the cone contains a line")
        rays = _double_description(normals, kdim)
        norm_fun = tuple(
            sum(b[j] for j in constraints.normalize) for b in basis)
        seen = set()
        for r in rays:
            scale = sum(f * v for f, v in zip(norm_fun, r))
            if scale <= 0:
                continue
            point = tuple(
                sum(b[j] * v for b, v in zip(basis, r)) / scale
                for j in range(width))
            if point not in seen:
                seen.add(point)
                vertices.append(point)
        vertices.sort()

    assert _polytope_nonempty_lp(Q, constraints) == bool(vertices)
    return vertices


def _primitive(vec):
    den = 1
    for v in vec:
        den = lcm(den, v.denominator)
    ints = [int(v * den) for v in vec]
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    if g > 1:
        ints = [v // g for v in ints]
    return tuple(Fraction(v) for v in ints)


def _double_description(normals, dim):
    """Extreme rays of the cone cut out by the given halfspace normals.

    Maintains a lineality basis plus extreme rays, processing one
    halfspace at a time; adjacency of rays is decided combinatorially on
    the zero sets of the halfspaces handled so far.
    """
    lineality = [tuple(Fraction(i == j) for j in range(dim))
                 for i in range(dim)]
    rays: List[Tuple[Fraction, ...]] = []
    processed: List[Tuple[Fraction, ...]] = []

    def dot(a, v):
        return sum(x * y for x, y in zip(a, v))

    for a in normals:
        pivot = next((l for l in lineality if dot(a, l) != 0), None)
        if pivot is not None:
            rest = [l for l in lineality if l is not pivot]
            cut = pivot if dot(a, pivot) > 0 else tuple(-v for v in pivot)
            d0 = dot(a, cut)
            lineality = [
                tuple(lv - dot(a, l) / d0 * cv for lv, cv in zip(l, cut))
                for l in rest]
            rays = [_primitive(tuple(rv - dot(a, r) / d0 * cv
                                     for rv, cv in zip(r, cut)))
                    for r in rays]
            rays.append(_primitive(cut))
        else:
            plus = [r for r in rays if dot(a, r) > 0]
            zero = [r for r in rays if dot(a, r) == 0]
            minus = [r for r in rays if dot(a, r) < 0]
            if minus:
                def zset(r):
                    return frozenset(
                        i for i, p in enumerate(processed) if dot(p, r) == 0)
                zplus = {r: zset(r) for r in plus}
                zminus = {r: zset(r) for r in minus}
                fresh = []
                for rp in plus:
                    for rm in minus:
                        common = zplus[rp] & zminus[rm]
                        adjacent = not any(
                            r3 is not rp and r3 is not rm
                            and common <= zset(r3) for r3 in rays)
                        if adjacent:
                            comb = tuple(
                                dot(a, rp) * mv - dot(a, rm) * pv
                                for pv, mv in zip(rp, rm))
                            fresh.append(_primitive(comb))
                rays = plus + zero + list(dict.fromkeys(fresh))
            else:
                rays = plus + zero
        processed.append(a)
    return rays


def _polytope_nonempty_lp(Q, constraints) -> bool:
    width = Q.columns
    nonneg = set(constraints.nonnegative)
    zero = set(constraints.zero)
    # free columns are split into signed parts
    cols = []
    for j in range(width):
        if j in zero:
            continue
        cols.append((j, 1))
        if j not in nonneg:
            cols.append((j, -1))

    def build(row):
        return [Fraction(row[j]) * s for (j, s) in cols]

    A = [build(r) for r in Q.rows]
    b = [Fraction(0)] * len(Q.rows)
    norm = [0] * width
    for j in constraints.normalize:
        norm[j] = 1
    A.append(build(norm))
    b.append(Fraction(1))
    res = solve_lp(A, b, [Fraction(0)] * len(cols))
    return res.status == OPTIMAL


# ------------------------------------------------------- sufficiency

@dataclass(frozen=True)
class CheckReport:
    """Outcome of a sufficiency check, with exact witnesses.

    For the vertex-quantified check, holds means the generalized Euler
    characteristic is negative at every vertex of the quad-normalized
    polytope (vacuously when empty); witness is the worst vertex. For the
    vertical-quad check, holds means the vertical polytope is empty, so an
    angle structure is guaranteed; otherwise witness is a point of it.
    """

    mode: str
    holds: bool
    vertex_count: int
    witness: Optional[Tuple[Fraction, ...]]
    witness_value: Optional[Fraction]
    note: str


def check_sufficiency(T: Triangulation, mode: str,
                      a: Optional[AngleAssignment] = None) -> CheckReport:
    if mode not in ("main1", "prop0"):
        raise PreconditionViolated("mode must be main1 or prop0")
    Q = compatibility_matrix(T)
    n = T.size
    quads = tuple(range(3 * n))
    if mode == "main1":
        verts = cone_extreme_points(
            Q, ConeConstraints(nonnegative=tuple(range(7 * n)),
                               normalize=quads))
        note = ("quantifier read over the nonnegative orthant; sign-free "
                "triangle coordinates would make the condition vacuous "
                "whenever geodesic boundary is present")
        if not verts:
            return CheckReport("main1", True, 0, None, None,
                               "no admissible quad-normalized point; " + note)
        worst = max(verts, key=lambda v: (chi_star(T, v), v))
        value = chi_star(T, worst)
        return CheckReport("main1", value < 0, len(verts), worst, value, note)

    if a is None:
        raise MissingSemiAngle("vertical-quad check needs an angle structure")
    vertical = {d.column(n) for d in vertical_quads(T, a)}
    if not vertical:
        return CheckReport("prop0", True, 0, None, None,
                           "no vertical quads exist, the region is empty")
    forced = tuple(j for j in range(3 * n) if j not in vertical)
    cons = ConeConstraints(nonnegative=tuple(range(7 * n)),
                           zero=forced,
                           normalize=tuple(sorted(vertical)))
    verts = cone_extreme_points(Q, cons)
    if not verts:
        return CheckReport("prop0", True, 0, None, None,
                           "vertical-quad polytope is empty")
    return CheckReport("prop0", False, len(verts), verts[0], None,
                       "vertical-quad polytope is nonempty")


# ------------------------------------------------------------ integrality

def link_coordinate(T: Triangulation, vertex_class: int
                    ) -> Tuple[Fraction, ...]:
    """Triangle indicator of one vertex class; quads zero. Always lies in
    the compatibility kernel, since matched arcs see matching corners."""
    vec = [Fraction(0)] * (7 * T.size)
    for (t, k) in T.vertex_classes[vertex_class].members:
        vec[triangle_column(T.size, t, k)] += 1
    return tuple(vec)


def integerize(T: Triangulation,
               s: Sequence[Fraction]) -> Tuple[int, ...]:
    """Scale a kernel element to integers, then add vertex links until all
    triangle entries are nonnegative. Quad entries must start nonnegative
    and come out as the scale times the originals."""
    _check_length(T, s)
    vals = [Fraction(v) for v in s]
    for t in range(T.size):
        for p in range(3):
            if vals[quad_column(T.size, t, p)] < 0:
                raise NegativeQuad(
                    "quad (%d, %d) is negative: %s"
                    % (t, p, vals[quad_column(T.size, t, p)]))
    if not _in_kernel(T, vals):
        raise PreconditionViolated(
            "coordinate does not satisfy the compatibility equations")
    N = 1
    for v in vals:
        N = lcm(N, v.denominator)
    scaled = [v * N for v in vals]
    out = list(scaled)
    for vc in T.vertex_classes:
        entries = [scaled[triangle_column(T.size, t, k)]
                   for (t, k) in vc.members]
        lift = max(Fraction(0), -min(entries))
        if lift:
            link = link_coordinate(T, vc.index)
            out = [o + lift * l for o, l in zip(out, link)]
    return tuple(int(v) for v in out)
