"""Combinatorial triangulations built from ideal and partially truncated
tetrahedra.

Conventions fixed here and used by every other module:

- Vertices of a tetrahedron are labelled 0..3.
- The six edges are indexed by the vertex pairs
      0:{0,1}  1:{0,2}  2:{0,3}  3:{1,2}  4:{1,3}  5:{2,3}
  so opposite edges pair up as (e, 5 - e).
- Face f is the face opposite vertex f; its vertices are listed in
  ascending label order.
- Corner k (the corner at vertex k) carries the three edges containing k.
- Dihedral angles are exact rationals in units of pi.

A tetrahedron is `ideal` (all four vertices ideal), `flat` (ideal with zero
volume, used for layered insertions) or `trunc` (exactly one vertex
hyperideal and truncated; the truncation triangle is an external face that
is never glued, while all four tetrahedron faces remain internal and
gluable).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import (
    DimensionMismatch,
    DuplicateGluing,
    IdealHyperidealMismatch,
    MalformedIndex,
    PreconditionViolated,
)

EDGE_VERTICES = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))

EDGE_INDEX = {pair: e for e, pair in enumerate(EDGE_VERTICES)}
EDGE_INDEX.update({(b, a): e for (a, b), e in list(EDGE_INDEX.items())})

FACE_VERTICES = tuple(
    tuple(v for v in range(4) if v != f) for f in range(4)
)

# Edges at corner k: all edges containing vertex k.
CORNER_EDGES = tuple(
    tuple(e for e, pair in enumerate(EDGE_VERTICES) if k in pair)
    for k in range(4)
)

# The two faces containing a given edge (the faces opposite its two
# complementary vertices).
EDGE_FACES = tuple(
    tuple(f for f in range(4) if set(EDGE_VERTICES[e]) <= set(FACE_VERTICES[f]))
    for e in range(6)
)


def opposite_edge(e: int) -> int:
    return 5 - e


def edge_index(a: int, b: int) -> int:
    return EDGE_INDEX[(a, b)]


KIND_IDEAL = "ideal"
KIND_FLAT = "flat"
KIND_TRUNC = "trunc"

_KINDS = (KIND_IDEAL, KIND_FLAT, KIND_TRUNC)


@dataclass(frozen=True)
class Tetrahedron:
    index: int
    kind: str = KIND_IDEAL
    hyper: Optional[int] = None  # hyperideal vertex label, kind == "trunc" only

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise MalformedIndex("unknown tetrahedron kind %r" % (self.kind,))
        if self.kind == KIND_TRUNC:
            if self.hyper not in (0, 1, 2, 3):
                raise MalformedIndex(
                    "trunc tetrahedron %d needs hyper vertex 0..3" % self.index
                )
        elif self.hyper is not None:
            raise MalformedIndex(
                "tetrahedron %d of kind %s cannot carry a hyperideal vertex"
                % (self.index, self.kind)
            )

    def vertex_kind(self, v: int) -> str:
        return "hyper" if self.kind == KIND_TRUNC and v == self.hyper else "ideal"


@dataclass(frozen=True)
class FaceGluing:
    """Identification of face `face_a` of tet `tet_a` with face `face_b` of
    tet `tet_b`.

    `image` lists the images in tet_b of the vertices of face_a taken in
    ascending label order, so the induced vertex bijection is
    FACE_VERTICES[face_a][i] -> image[i].
    """

    tet_a: int
    face_a: int
    tet_b: int
    face_b: int
    image: Tuple[int, int, int]

    def vertex_map(self) -> Dict[int, int]:
        return dict(zip(FACE_VERTICES[self.face_a], self.image))

    def inverse_map(self) -> Dict[int, int]:
        return {b: a for a, b in self.vertex_map().items()}


@dataclass(frozen=True)
class EdgeClass:
    """Orbit of tetrahedron edges under the gluing identifications.

    `members` lists (tet, edge) incidences in rotation order around the
    quotient edge, with multiplicity: an edge glued to itself with a flip is
    traversed twice by the rotation walk and appears twice.  `valence` is the
    incidence count, i.e. len(members).  `closed` is False when the walk
    terminates on unglued faces at both ends.
    """

    index: int
    members: Tuple[Tuple[int, int], ...]
    closed: bool

    @property
    def valence(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class VertexClass:
    index: int
    members: Tuple[Tuple[int, int], ...]  # (tet, vertex), ascending
    kind: str  # "ideal" or "hyper"


class Triangulation:
    """Immutable-by-convention result of build_triangulation."""

    def __init__(self, tets, gluings, glue_lookup, edge_classes,
                 edge_class_of, vertex_classes, vertex_class_of, open_faces):
        self.tets: Tuple[Tetrahedron, ...] = tets
        self.gluings: Tuple[FaceGluing, ...] = gluings
        self._glue_lookup = glue_lookup
        self.edge_classes: Tuple[EdgeClass, ...] = edge_classes
        self.edge_class_of: Dict[Tuple[int, int], int] = edge_class_of
        self.vertex_classes: Tuple[VertexClass, ...] = vertex_classes
        self.vertex_class_of: Dict[Tuple[int, int], int] = vertex_class_of
        self.open_faces: Tuple[Tuple[int, int], ...] = open_faces

    @property
    def size(self) -> int:
        return len(self.tets)

    def glued_to(self, tet: int, face: int):
        """Return (tet', face', vertex_map) across the gluing, or None."""
        return self._glue_lookup.get((tet, face))

    def corners(self):
        for t in range(self.size):
            for k in range(4):
                yield (t, k)

    def corner_kind(self, tet: int, vertex: int) -> str:
        return self.tets[tet].vertex_kind(vertex)

    def hyper_corners(self) -> List[Tuple[int, int]]:
        return [(t, k) for (t, k) in self.corners()
                if self.corner_kind(t, k) == "hyper"]


def _check_gluing(tets: Sequence[Tetrahedron], g: FaceGluing):
    n = len(tets)
    for t, f in ((g.tet_a, g.face_a), (g.tet_b, g.face_b)):
        if not (0 <= t < n):
            raise MalformedIndex("gluing references tet %d of %d" % (t, n))
        if f not in (0, 1, 2, 3):
            raise MalformedIndex("gluing references face %d" % f)
    if (g.tet_a, g.face_a) == (g.tet_b, g.face_b):
        raise MalformedIndex(
            "face %d.%d glued to itself" % (g.tet_a, g.face_a))
    if sorted(g.image) != list(FACE_VERTICES[g.face_b]):
        raise MalformedIndex(
            "gluing %d.%d-%d.%d image %r is not a bijection onto face %d"
            % (g.tet_a, g.face_a, g.tet_b, g.face_b, g.image, g.face_b))
    for a, b in g.vertex_map().items():
        ka = tets[g.tet_a].vertex_kind(a)
        kb = tets[g.tet_b].vertex_kind(b)
        if ka != kb:
            raise IdealHyperidealMismatch(
                "gluing %d.%d-%d.%d maps %s vertex %d to %s vertex %d"
                % (g.tet_a, g.face_a, g.tet_b, g.face_b, ka, a, kb, b))


def _walk_edge(glue_lookup, tet: int, edge: int):
    """Rotate around edge `edge` of tet `tet` and return (closed, states).

    A state is (tet, (a, b), exit_face): the directed edge together with the
    face about to be crossed.  The step map is a bijection, so the walk
    either returns to the start state (closed class) or reaches an unglued
    face in both directions (open class).  States are re-anchored so open
    walks start at one boundary end.
    """
    a, b = EDGE_VERTICES[edge]
    f_exit, f_enter = EDGE_FACES[edge]

    def step(state):
        t, (x, y), f = state
        hit = glue_lookup.get((t, f))
        if hit is None:
            return None
        t2, f2, vmap = hit
        x2, y2 = vmap[x], vmap[y]
        e2 = EDGE_INDEX[(x2, y2)]
        g0, g1 = EDGE_FACES[e2]
        f_next = g1 if g0 == f2 else g0
        return (t2, (x2, y2), f_next)

    def step_back(state):
        # Invert `step`: enter through the other face of the current wedge,
        # then cross it backwards.
        t, (x, y), f = state
        g0, g1 = EDGE_FACES[EDGE_INDEX[(x, y)]]
        f_in = g1 if g0 == f else g0
        hit = glue_lookup.get((t, f_in))
        if hit is None:
            return None
        t2, f2, vmap = hit
        x2, y2 = vmap[x], vmap[y]
        return (t2, (x2, y2), f2)

    start = (tet, (a, b), f_exit)
    forward = [start]
    state = start
    while True:
        state = step(state)
        if state is None:
            closed = False
            break
        if state == start:
            closed = True
            break
        forward.append(state)

    if closed:
        return True, forward

    back = []
    state = start
    while True:
        state = step_back(state)
        if state is None:
            break
        back.append(state)
    return False, list(reversed(back)) + forward


def build_triangulation(tets: Sequence[Tetrahedron],
                        gluings: Sequence[FaceGluing]) -> Triangulation:
    """Assemble tetrahedra and face gluings into a Triangulation with derived
    edge classes, vertex classes and boundary inventory.

    Raises MalformedIndex, DuplicateGluing or IdealHyperidealMismatch on
    ill-formed input.  Orientation-reversing gluings are accepted; the
    quotient may be non-orientable.
    """
    tets = tuple(tets)
    if not tets:
        raise MalformedIndex("a triangulation needs at least one tetrahedron")
    for i, tet in enumerate(tets):
        if tet.index != i:
            raise MalformedIndex(
                "tetrahedron at position %d carries index %d" % (i, tet.index))

    glue_lookup = {}
    for g in gluings:
        _check_gluing(tets, g)
        vmap = g.vertex_map()
        inv = g.inverse_map()
        for side, other, m in (
            ((g.tet_a, g.face_a), (g.tet_b, g.face_b), vmap),
            ((g.tet_b, g.face_b), (g.tet_a, g.face_a), inv),
        ):
            if side in glue_lookup:
                raise DuplicateGluing("face %d.%d glued twice" % side)
            glue_lookup[side] = (other[0], other[1], m)

    gluings = tuple(gluings)
    n = len(tets)

    # Edge classes by rotation walk, discovered in lexicographic seed order.
    edge_classes = []
    edge_class_of = {}
    for t in range(n):
        for e in range(6):
            if (t, e) in edge_class_of:
                continue
            closed, states = _walk_edge(glue_lookup, t, e)
            members = tuple(
                (st, EDGE_INDEX[pair]) for st, pair, _ in states)
            idx = len(edge_classes)
            edge_classes.append(EdgeClass(idx, members, closed))
            for m in members:
                edge_class_of.setdefault(m, idx)

    # Vertex classes by union-find over (tet, vertex).
    parent = {(t, k): (t, k) for t in range(n) for k in range(4)}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)

    for g in gluings:
        for a, b in g.vertex_map().items():
            union((g.tet_a, a), (g.tet_b, b))

    groups: Dict[Tuple[int, int], List[Tuple[int, int]]] = {}
    for key in sorted(parent):
        groups.setdefault(find(key), []).append(key)
    vertex_classes = []
    vertex_class_of = {}
    for i, root in enumerate(sorted(groups)):
        members = tuple(groups[root])
        kinds = {tets[t].vertex_kind(k) for t, k in members}
        if len(kinds) != 1:
            raise IdealHyperidealMismatch(
                "vertex class %r mixes ideal and hyperideal corners"
                % (members,))
        vertex_classes.append(VertexClass(i, members, kinds.pop()))
        for m in members:
            vertex_class_of[m] = i

    open_faces = tuple(
        (t, f) for t in range(n) for f in range(4)
        if (t, f) not in glue_lookup)

    return Triangulation(
        tets, gluings, glue_lookup,
        tuple(edge_classes), edge_class_of,
        tuple(vertex_classes), vertex_class_of, open_faces,
    )


class AngleAssignment:
    """Table of dihedral angles: one rational per (tet, edge), in pi units."""

    def __init__(self, triangulation: Triangulation,
                 values: Sequence[Fraction]):
        values = tuple(Fraction(v) for v in values)
        if len(values) != 6 * triangulation.size:
            raise DimensionMismatch(
                "expected %d angles, got %d"
                % (6 * triangulation.size, len(values)))
        self.triangulation = triangulation
        self.values = values

    @classmethod
    def constant(cls, triangulation: Triangulation, value) -> "AngleAssignment":
        return cls(triangulation, [Fraction(value)] * (6 * triangulation.size))

    def value(self, tet: int, edge: int) -> Fraction:
        return self.values[6 * tet + edge]

    def corner_sum(self, tet: int, vertex: int) -> Fraction:
        return sum(self.value(tet, e) for e in CORNER_EDGES[vertex])

    def edge_class_sum(self, cls: EdgeClass) -> Fraction:
        return sum(self.value(t, e) for t, e in cls.members)


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    closed: bool
    checks: Tuple[CheckResult, ...]
    open_internal_faces: Tuple[Tuple[int, int], ...]

    @property
    def first_violation(self) -> Optional[str]:
        for c in self.checks:
            if not c.ok:
                return "%s: %s" % (c.name, c.detail)
        return None


def validate_triangulation(T: Triangulation) -> ValidationReport:
    """Structural validation report.

    `ok` covers the structural checks (orbit closure bookkeeping, vertex kind
    homogeneity, gluing kind preservation).  Unglued internal faces are not a
    structural failure; they are inventoried in `open_internal_faces` and
    `closed` is False, since a manifold target requires every internal face
    to be glued.
    """
    checks = []

    bad = [c.index for c in T.edge_classes
           if not c.closed and not _touches_boundary(T, c)]
    checks.append(CheckResult(
        "edge_orbit_closure", not bad,
        "" if not bad else "open walk without boundary face in classes %r" % bad))

    mixed = []
    for vc in T.vertex_classes:
        kinds = {T.tets[t].vertex_kind(k) for t, k in vc.members}
        if len(kinds) != 1:
            mixed.append(vc.index)
    checks.append(CheckResult(
        "vertex_kind_homogeneity", not mixed,
        "" if not mixed else "mixed classes %r" % mixed))

    bad_glue = []
    for g in T.gluings:
        for a, b in g.vertex_map().items():
            if T.tets[g.tet_a].vertex_kind(a) != T.tets[g.tet_b].vertex_kind(b):
                bad_glue.append((g.tet_a, g.face_a))
    checks.append(CheckResult(
        "gluing_kind_preservation", not bad_glue,
        "" if not bad_glue else "kind-mixing gluings at %r" % bad_glue))

    ok = all(c.ok for c in checks)
    closed = not T.open_faces
    checks.append(CheckResult(
        "closed", closed,
        "" if closed else "open internal faces %r" % (list(T.open_faces),)))
    return ValidationReport(ok, closed, tuple(checks), T.open_faces)


def _touches_boundary(T: Triangulation, cls: EdgeClass) -> bool:
    for t, e in cls.members:
        for f in EDGE_FACES[e]:
            if T.glued_to(t, f) is None:
                return True
    return False


ANGLE_MODES = ("strict", "semi", "taut")

ZERO = Fraction(0)
ONE = Fraction(1)
TWO = Fraction(2)


def validate_angles(T: Triangulation, assignment: AngleAssignment,
                    mode: str) -> ValidationReport:
    """Check an angle assignment against the structure equations, in pi units.

    In order: (i) every edge class sums to 2; (ii) every ideal corner sums to
    1; (iii) every hyperideal corner sums to strictly less than 1 (strict and
    taut modes) or at most 1 (semi mode, matching the closed feasible region
    the solver optimizes over); then the entry range for the mode: strict
    (0, 1), semi [0, 1], taut {0, 1}.

    Returns a ValidationReport; first_violation names the earliest failure.
    """
    if mode not in ANGLE_MODES:
        raise PreconditionViolated("unknown mode %r" % (mode,))
    if assignment.triangulation is not T:
        if len(assignment.values) != 6 * T.size:
            raise DimensionMismatch("assignment does not fit triangulation")
    checks = []

    bad = [(c.index, assignment.edge_class_sum(c))
           for c in T.edge_classes if assignment.edge_class_sum(c) != TWO]
    checks.append(CheckResult(
        "edge_sums", not bad,
        "" if not bad else "class %d sums to %s" % (bad[0][0], bad[0][1])))

    bad = [(t, k, assignment.corner_sum(t, k))
           for (t, k) in T.corners()
           if T.corner_kind(t, k) == "ideal"
           and assignment.corner_sum(t, k) != ONE]
    checks.append(CheckResult(
        "ideal_corner_sums", not bad,
        "" if not bad else "corner %d.%d sums to %s" % bad[0]))

    if mode == "semi":
        bad = [(t, k, assignment.corner_sum(t, k))
               for (t, k) in T.hyper_corners()
               if assignment.corner_sum(t, k) > ONE]
    else:
        bad = [(t, k, assignment.corner_sum(t, k))
               for (t, k) in T.hyper_corners()
               if assignment.corner_sum(t, k) >= ONE]
    checks.append(CheckResult(
        "hyperideal_corner_sums", not bad,
        "" if not bad else "corner %d.%d sums to %s" % bad[0]))

    if mode == "strict":
        out = [v for v in assignment.values if not (ZERO < v < ONE)]
    elif mode == "semi":
        out = [v for v in assignment.values if not (ZERO <= v <= ONE)]
    else:
        out = [v for v in assignment.values if v not in (ZERO, ONE)]
    checks.append(CheckResult(
        "range", not out,
        "" if not out else "angle %s outside %s range" % (out[0], mode)))

    ok = all(c.ok for c in checks)
    return ValidationReport(ok, True, tuple(checks), ())


@dataclass(frozen=True)
class LinkSurface:
    """Cell-count summary of the normal surface linking one vertex class.

    Triangles are the corner cross-sections (external faces at hyperideal
    corners), edges the normal arcs paired across face gluings, vertices the
    arc endpoints identified around tetrahedron edges.
    """

    vertex_class: int
    kind: str
    triangle_count: int
    edge_count: int
    vertex_count: int
    boundary_arc_count: int

    @property
    def euler_characteristic(self) -> int:
        return self.vertex_count - self.edge_count + self.triangle_count

    @property
    def closed(self) -> bool:
        return self.boundary_arc_count == 0


def link_surface(T: Triangulation, vertex_class: int) -> LinkSurface:
    """Assemble the link of a vertex class by direct cell counting.

    This is deliberately independent of the weighted Euler characteristic
    formula in the normal-surface module; the two are cross-checked in tests.
    """
    vc = T.vertex_classes[vertex_class]
    corners = set(vc.members)

    # Arcs: (tet, corner, face) for faces containing the corner.
    arcs = [(t, k, f) for (t, k) in sorted(corners)
            for f in range(4) if f != k]

    arc_parent = {a: a for a in arcs}

    def find(p, x):
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(p, x, y):
        rx, ry = find(p, x), find(p, y)
        if rx != ry:
            p[max(rx, ry)] = min(rx, ry)

    boundary_arcs = 0
    for (t, k, f) in arcs:
        hit = T.glued_to(t, f)
        if hit is None:
            boundary_arcs += 1
            continue
        t2, f2, vmap = hit
        union(arc_parent, (t, k, f), (t2, vmap[k], f2))

    edge_count = len({find(arc_parent, a) for a in arcs})

    # Arc endpoints: (tet, edge, end-vertex) with the end at a class corner.
    points = [(t, e, k) for (t, k) in sorted(corners)
              for e in CORNER_EDGES[k]]
    pt_parent = {q: q for q in points}
    for (t, k, f) in arcs:
        hit = T.glued_to(t, f)
        if hit is None:
            continue
        t2, f2, vmap = hit
        for x in FACE_VERTICES[f]:
            if x == k:
                continue
            e = EDGE_INDEX[(k, x)]
            e2 = EDGE_INDEX[(vmap[k], vmap[x])]
            union(pt_parent, (t, e, k), (t2, e2, vmap[k]))
    vertex_count = len({find(pt_parent, q) for q in points})

    return LinkSurface(
        vertex_class=vertex_class,
        kind=vc.kind,
        triangle_count=len(corners),
        edge_count=edge_count,
        vertex_count=vertex_count,
        boundary_arc_count=boundary_arcs,
    )
