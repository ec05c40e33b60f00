"""Polyhedral decompositions and their conversion to ideal triangulations.

A decomposition is a set of combinatorial polyhedra (each with at most one
hyperideal vertex) glued face to face. Subdivision cones every polyhedron
from one vertex, chosen by leaf-pruning a spanning tree of the dual graph
so that tree gluings never produce mismatched face triangulations; the
remaining mismatches (pillows) are bridged by layering flat tetrahedra.
"""

from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .errors import (
    ApexOnFace,
    ConeVertexOnBase,
    DisconnectedDualGraph,
    DuplicateGluing,
    IdealHyperidealMismatch,
    MalformedIndex,
    NotAFan,
    PreconditionViolated,
)
from .triangulation import (
    Tetrahedron,
    FaceGluing,
    Triangulation,
    build_triangulation,
    validate_triangulation,
)


@dataclass(frozen=True)
class Polyhedron:
    """Combinatorial polyhedron: vertex kinds plus faces as vertex cycles."""

    index: int
    vertex_kinds: Tuple[str, ...]
    faces: Tuple[Tuple[int, ...], ...]

    @property
    def hyper_vertex(self) -> Optional[int]:
        for i, k in enumerate(self.vertex_kinds):
            if k == "hyper":
                return i
        return None

    @property
    def truncated(self) -> bool:
        return self.hyper_vertex is not None

    def face_edges(self, f: int) -> List[Tuple[int, int]]:
        cyc = self.faces[f]
        return [(cyc[i], cyc[(i + 1) % len(cyc)]) for i in range(len(cyc))]


@dataclass(frozen=True)
class PolyGluing:
    """Identification of two polyhedron faces by a vertex bijection."""

    poly_a: int
    face_a: int
    poly_b: int
    face_b: int
    pairs: Tuple[Tuple[int, int], ...]

    def vertex_map(self) -> Dict[int, int]:
        return dict(self.pairs)

    def inverse_map(self) -> Dict[int, int]:
        return {b: a for a, b in self.pairs}


@dataclass(frozen=True)
class VertexOrbit:
    index: int
    members: Tuple[Tuple[int, int], ...]    # (polyhedron, vertex)
    kind: str


class Decomposition:
    def __init__(self, polyhedra, gluings, glue_lookup, vertex_orbits,
                 open_faces):
        self.polyhedra: Tuple[Polyhedron, ...] = polyhedra
        self.gluings: Tuple[PolyGluing, ...] = gluings
        self.glue_lookup: Dict[Tuple[int, int], int] = glue_lookup
        self.vertex_orbits: Tuple[VertexOrbit, ...] = vertex_orbits
        self.open_faces: Tuple[Tuple[int, int], ...] = open_faces

    @property
    def size(self) -> int:
        return len(self.polyhedra)


def _check_polyhedron(P: Polyhedron) -> None:
    nv = len(P.vertex_kinds)
    if nv < 4:
        raise MalformedIndex("polyhedron %d needs at least 4 vertices"
                             % P.index)
    for k in P.vertex_kinds:
        if k not in ("ideal", "hyper"):
            raise MalformedIndex("bad vertex kind %r in polyhedron %d"
                                 % (k, P.index))
    if sum(k == "hyper" for k in P.vertex_kinds) > 1:
        raise IdealHyperidealMismatch(
            "polyhedron %d has more than one hyperideal vertex" % P.index)
    if not P.faces:
        raise MalformedIndex("polyhedron %d has no faces" % P.index)
    edge_count: Dict[FrozenSet[int], int] = {}
    for f, cyc in enumerate(P.faces):
        if len(cyc) < 3:
            raise MalformedIndex(
                "face %d.%d has fewer than 3 vertices" % (P.index, f))
        if len(set(cyc)) != len(cyc):
            raise MalformedIndex(
                "face %d.%d repeats a vertex" % (P.index, f))
        for v in cyc:
            if not 0 <= v < nv:
                raise MalformedIndex(
                    "face %d.%d uses unknown vertex %d" % (P.index, f, v))
        for u, v in P.face_edges(f):
            key = frozenset((u, v))
            edge_count[key] = edge_count.get(key, 0) + 1
    for key in sorted(edge_count, key=sorted):
        if edge_count[key] != 2:
            raise MalformedIndex(
                "edge %s of polyhedron %d lies in %d faces, expected 2"
                % (tuple(sorted(key)), P.index, edge_count[key]))
    # two faces may meet in at most one edge; more overlap breaks coning
    for f in range(len(P.faces)):
        for g in range(f + 1, len(P.faces)):
            shared = set(P.faces[f]) & set(P.faces[g])
            if len(shared) > 2:
                raise MalformedIndex(
                    "faces %d and %d of polyhedron %d share %d vertices"
                    % (f, g, P.index, len(shared)))
            if len(shared) == 2 and frozenset(shared) not in edge_count:
                raise MalformedIndex(
                    "faces %d and %d of polyhedron %d meet in a non-edge pair"
                    % (f, g, P.index))


def _cycles_match(cycle_a, cycle_b, vmap) -> bool:
    image = tuple(vmap[v] for v in cycle_a)
    m = len(cycle_b)
    doubled = cycle_b + cycle_b
    for start in range(m):
        fwd = doubled[start:start + m]
        if tuple(fwd) == image or tuple(reversed(fwd)) == image:
            return True
    return False


def build_decomposition(polyhedra: Sequence[Polyhedron],
                        gluings: Sequence[PolyGluing]) -> Decomposition:
    polyhedra = tuple(polyhedra)
    ids = [P.index for P in polyhedra]
    if ids != list(range(len(polyhedra))):
        raise MalformedIndex("polyhedron ids %r are not 0..%d"
                             % (ids, len(polyhedra) - 1))
    for P in polyhedra:
        _check_polyhedron(P)

    glue_lookup: Dict[Tuple[int, int], int] = {}
    for gi, g in enumerate(gluings):
        for (p, f) in ((g.poly_a, g.face_a), (g.poly_b, g.face_b)):
            if not 0 <= p < len(polyhedra):
                raise MalformedIndex("gluing names unknown polyhedron %d" % p)
            if not 0 <= f < len(polyhedra[p].faces):
                raise MalformedIndex("gluing names unknown face %d.%d"
                                     % (p, f))
        if (g.poly_a, g.face_a) == (g.poly_b, g.face_b):
            raise MalformedIndex("face %d.%d glued to itself"
                                 % (g.poly_a, g.face_a))
        cyc_a = polyhedra[g.poly_a].faces[g.face_a]
        cyc_b = polyhedra[g.poly_b].faces[g.face_b]
        vmap = g.vertex_map()
        if sorted(vmap) != sorted(cyc_a) or len(vmap) != len(cyc_a):
            raise MalformedIndex(
                "gluing %d map domain does not equal face %d.%d"
                % (gi, g.poly_a, g.face_a))
        if sorted(vmap.values()) != sorted(cyc_b):
            raise MalformedIndex(
                "gluing %d map image does not equal face %d.%d"
                % (gi, g.poly_b, g.face_b))
        for a, b in g.pairs:
            ka = polyhedra[g.poly_a].vertex_kinds[a]
            kb = polyhedra[g.poly_b].vertex_kinds[b]
            if ka != kb:
                raise IdealHyperidealMismatch(
                    "gluing %d maps %s vertex %d.%d to %s vertex %d.%d"
                    % (gi, ka, g.poly_a, a, kb, g.poly_b, b))
        if not _cycles_match(cyc_a, cyc_b, vmap):
            raise MalformedIndex(
                "gluing %d does not carry the face cycle onto its target"
                % gi)
        for side in ((g.poly_a, g.face_a), (g.poly_b, g.face_b)):
            if side in glue_lookup:
                raise DuplicateGluing("face %d.%d glued twice" % side)
            glue_lookup[side] = gi

    # vertex orbits under the gluing identifications
    offsets = []
    total = 0
    for P in polyhedra:
        offsets.append(total)
        total += len(P.vertex_kinds)
    parent = list(range(total))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for g in gluings:
        for a, b in g.pairs:
            ra, rb = find(offsets[g.poly_a] + a), find(offsets[g.poly_b] + b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)

    groups: Dict[int, List[Tuple[int, int]]] = {}
    for p, P in enumerate(polyhedra):
        for v in range(len(P.vertex_kinds)):
            groups.setdefault(find(offsets[p] + v), []).append((p, v))
    orbits = []
    for root in sorted(groups):
        members = tuple(sorted(groups[root]))
        kind = polyhedra[members[0][0]].vertex_kinds[members[0][1]]
        orbits.append(VertexOrbit(len(orbits), members, kind))

    open_faces = tuple(
        (p, f) for p, P in enumerate(polyhedra)
        for f in range(len(P.faces)) if (p, f) not in glue_lookup)
    return Decomposition(polyhedra, tuple(gluings), glue_lookup,
                         tuple(orbits), open_faces)


# ------------------------------------------------------------- dual graph

@dataclass(frozen=True)
class DualGraph:
    size: int
    edges: Tuple[Tuple[int, int, int], ...]    # (gluing index, poly, poly)

    def connected(self) -> bool:
        return not self.unreached()

    def unreached(self) -> Tuple[int, ...]:
        if self.size == 0:
            return ()
        seen = {0}
        frontier = [0]
        while frontier:
            node = frontier.pop()
            for _, a, b in self.edges:
                for x, y in ((a, b), (b, a)):
                    if x == node and y not in seen:
                        seen.add(y)
                        frontier.append(y)
        return tuple(sorted(set(range(self.size)) - seen))


def dual_graph(D: Decomposition) -> DualGraph:
    return DualGraph(D.size, tuple(
        (gi, g.poly_a, g.poly_b) for gi, g in enumerate(D.gluings)))


@dataclass(frozen=True)
class ConeAssignment:
    """Spanning tree of the dual graph plus a cone vertex per polyhedron."""

    cone_vertex: Tuple[int, ...]
    tree_gluings: Tuple[int, ...]


def maximal_tree_cone_assignment(D: Decomposition) -> ConeAssignment:
    """Leaf-prune a spanning tree, coning each pruned polyhedron away from
    its remaining tree face (truncated polyhedra always cone at their
    hyperideal vertex). Ties break to the smallest index everywhere.
    """
    graph = dual_graph(D)
    missing = graph.unreached()
    if missing:
        raise DisconnectedDualGraph(
            "polyhedra unreachable from 0: %s" % (missing,))

    adjacency: Dict[int, List[Tuple[int, int]]] = {
        n: [] for n in range(D.size)}
    for gi, a, b in graph.edges:
        if a != b:
            adjacency[a].append((gi, b))
            adjacency[b].append((gi, a))
    for lst in adjacency.values():
        lst.sort()

    seen = {0}
    order = [0]
    tree: Dict[int, List[Tuple[int, int]]] = {n: [] for n in range(D.size)}
    tree_gluings: List[int] = []
    while order:
        node = order.pop(0)
        for gi, other in adjacency[node]:
            if other not in seen:
                seen.add(other)
                order.append(other)
                tree[node].append((gi, other))
                tree[other].append((gi, node))
                tree_gluings.append(gi)

    cone: List[Optional[int]] = [None] * D.size
    remaining = set(range(D.size))
    degree = {n: len(tree[n]) for n in range(D.size)}
    while len(remaining) > 1:
        leaf = min(n for n in remaining if degree[n] == 1)
        gi, parent = next((gi, o) for gi, o in tree[leaf] if o in remaining)
        cone[leaf] = _prune_choice(D, leaf, gi)
        remaining.discard(leaf)
        degree[parent] -= 1
        degree[leaf] = 0
    last = remaining.pop()
    P = D.polyhedra[last]
    cone[last] = P.hyper_vertex if P.truncated else 0
    return ConeAssignment(tuple(cone), tuple(sorted(tree_gluings)))


def _prune_choice(D: Decomposition, leaf: int, tree_gluing: int) -> int:
    P = D.polyhedra[leaf]
    if P.truncated:
        return P.hyper_vertex
    g = D.gluings[tree_gluing]
    face = g.face_a if g.poly_a == leaf else g.face_b
    on_face = set(P.faces[face])
    for v in range(len(P.vertex_kinds)):
        if v not in on_face:
            return v
    raise PreconditionViolated(
        "every vertex of polyhedron %d lies on its tree face" % leaf)


# ------------------------------------------------------------------ fans

def _fan_diagonals(cycle, apex):
    m = len(cycle)
    i = cycle.index(apex)
    banned = {apex, cycle[(i + 1) % m], cycle[(i - 1) % m]}
    return frozenset(frozenset((apex, u)) for u in cycle if u not in banned)


def _fan_triangles(cycle, apex):
    m = len(cycle)
    i = cycle.index(apex)
    rot = cycle[i:] + cycle[:i]
    return [(apex, rot[t], rot[t + 1]) for t in range(1, m - 1)]


def face_apex_tables(D: Decomposition,
                     assignment: ConeAssignment) -> Tuple[Dict[int, int], ...]:
    """Fan apex for every face not containing its polyhedron's cone vertex.

    A glued face whose far side is coned from a vertex on that face copies
    the far fan apex through the bijection; otherwise both sides share the
    least vertex of the lexicographically smaller side. Unglued faces use
    their own least vertex.
    """
    tables: Tuple[Dict[int, int], ...] = tuple({} for _ in range(D.size))
    for p, P in enumerate(D.polyhedra):
        c = assignment.cone_vertex[p]
        for f, cyc in enumerate(P.faces):
            if c in cyc:
                continue
            gi = D.glue_lookup.get((p, f))
            if gi is None:
                tables[p][f] = min(cyc)
                continue
            g = D.gluings[gi]
            if (g.poly_a, g.face_a) == (p, f):
                q, fq, to_here = g.poly_b, g.face_b, g.inverse_map()
            else:
                q, fq, to_here = g.poly_a, g.face_a, g.vertex_map()
            far_cone = assignment.cone_vertex[q]
            if far_cone in D.polyhedra[q].faces[fq]:
                tables[p][f] = to_here[far_cone]
            elif (q, fq) < (p, f):
                tables[p][f] = to_here[min(D.polyhedra[q].faces[fq])]
            else:
                tables[p][f] = min(cyc)
    return tables


def _induced_apex(D, assignment, tables, p, f):
    c = assignment.cone_vertex[p]
    if c in D.polyhedra[p].faces[f]:
        return c
    return tables[p][f]


# ------------------------------------------------------------------ cones

@dataclass(frozen=True)
class ConeTet:
    """One tetrahedron of a coned polyhedron: vertex ids (cone, apex, x, y)."""

    poly: int
    vertices: Tuple[int, int, int, int]
    kind: str
    base_face: Optional[int]


def cone_polyhedron(P: Polyhedron, cone_vertex: int,
                    face_apex: Dict[int, int]) -> Tuple[ConeTet, ...]:
    """Cone every face avoiding cone_vertex over its assigned fan apex."""
    if not 0 <= cone_vertex < len(P.vertex_kinds):
        raise MalformedIndex("cone vertex %d out of range" % cone_vertex)
    if P.truncated and cone_vertex != P.hyper_vertex:
        raise PreconditionViolated(
            "truncated polyhedron %d must cone at its hyperideal vertex"
            % P.index)
    kind = "trunc" if P.truncated else "ideal"
    out = []
    for f, cyc in enumerate(P.faces):
        if cone_vertex in cyc:
            if f in face_apex:
                raise ConeVertexOnBase(
                    "face %d contains the cone vertex but was given an apex"
                    % f)
            continue
        if f not in face_apex:
            raise PreconditionViolated("face %d needs a fan apex" % f)
        apex = face_apex[f]
        if apex not in cyc:
            raise ApexOnFace(
                "apex %d is not a vertex of face %d" % (apex, f))
        for (w, x, y) in _fan_triangles(cyc, apex):
            out.append(ConeTet(P.index, (cone_vertex, w, x, y), kind, f))
    return tuple(out)


# ---------------------------------------------------------------- pillows

@dataclass(frozen=True)
class Pillow:
    """A glued face whose two induced fan triangulations disagree.

    The face cycle and both paths are in side-a vertex labels; apex_top is
    the far side's fan apex transported through the gluing.
    """

    gluing_index: int
    cycle: Tuple[int, ...]
    apex_bottom: int
    apex_top: int
    path_a: Tuple[int, ...]
    path_b: Tuple[int, ...]
    diagonals_bottom: FrozenSet[FrozenSet[int]]
    diagonals_top: FrozenSet[FrozenSet[int]]
    note: str = ""


def _paths_between(cycle, v, vp):
    m = len(cycle)
    i = cycle.index(v)
    forward = []
    k = (i + 1) % m
    while cycle[k] != vp:
        forward.append(cycle[k])
        k = (k + 1) % m
    backward = []
    k = (i - 1) % m
    while cycle[k] != vp:
        backward.append(cycle[k])
        k = (k - 1) % m
    first_f = cycle[(i + 1) % m]
    first_b = cycle[(i - 1) % m]
    if first_f <= first_b:
        return tuple(forward), tuple(backward)
    return tuple(backward), tuple(forward)


def detect_pillows(D: Decomposition,
                   assignment: ConeAssignment) -> Tuple[Pillow, ...]:
    """Compare induced face triangulations across every gluing."""
    tables = face_apex_tables(D, assignment)
    out = []
    for gi, g in enumerate(D.gluings):
        cyc = D.polyhedra[g.poly_a].faces[g.face_a]
        va = _induced_apex(D, assignment, tables, g.poly_a, g.face_a)
        vb_far = _induced_apex(D, assignment, tables, g.poly_b, g.face_b)
        vb = g.inverse_map()[vb_far]
        diag_a = _fan_diagonals(cyc, va)
        diag_b = _fan_diagonals(cyc, vb)
        if diag_a == diag_b:
            continue
        path_a, path_b = _paths_between(cyc, va, vb)
        note = ""
        if len(cyc) > 6:
            note = ("face of size %d; geometric decompositions only "
                    "produce quadrilateral or hexagon mismatches" % len(cyc))
        out.append(Pillow(gi, tuple(cyc), va, vb, path_a, path_b,
                          diag_a, diag_b, note))
    return tuple(out)


@dataclass(frozen=True)
class PillowStack:
    """Flat tetrahedra interpolating between a pillow's two fans.

    Tetrahedra are (v, x, y, v') vertex quadruples in face labels. Gluings
    join consecutive layers; bottom and top list the exposed faces as
    (tet index, omitted vertex id), matching the two fans on the regions
    that actually need flipping.
    """

    tets: Tuple[Tuple[int, int, int, int], ...]
    gluings: Tuple[Tuple[int, int, int, int], ...]
    bottom: Tuple[Tuple[int, int], ...]
    top: Tuple[Tuple[int, int], ...]


def layer_pillow(p: Pillow) -> PillowStack:
    if p.apex_bottom == p.apex_top:
        return PillowStack((), (), (), ())
    if p.diagonals_bottom != _fan_diagonals(p.cycle, p.apex_bottom):
        raise NotAFan("bottom triangulation is not the fan from %d"
                      % p.apex_bottom)
    if p.diagonals_top != _fan_diagonals(p.cycle, p.apex_top):
        raise NotAFan("top triangulation is not the fan from %d"
                      % p.apex_top)
    tets: List[Tuple[int, int, int, int]] = []
    gluings: List[Tuple[int, int, int, int]] = []
    bottom: List[Tuple[int, int]] = []
    top: List[Tuple[int, int]] = []
    v, vp = p.apex_bottom, p.apex_top
    for path in (p.path_a, p.path_b):
        seq = (v,) + path + (vp,)
        first = len(tets)
        count = len(path) - 1
        for k in range(1, len(path)):
            tets.append((v, seq[k], seq[k + 1], vp))
        for j in range(count):
            idx = first + j
            bottom.append((idx, vp))              # (v, p_k, p_k+1)
            top.append((idx, v))                  # (p_k, p_k+1, v')
            if j + 1 < count:
                gluings.append((idx, seq[j + 1], idx + 1, seq[j + 3]))
        if count > 0:
            bottom.append((first + count - 1, seq[count]))   # (v, p_i, v')
            top.append((first, seq[2]))                      # (v, p_1, v')
    return PillowStack(tuple(tets), tuple(gluings),
                       tuple(bottom), tuple(top))


# ------------------------------------------------------------- subdivide

def _triangle_of(vertices, omitted):
    return frozenset(vertices) - {omitted}


def _local_face(vertices, omitted):
    return vertices.index(omitted)


def _emit_gluing(tet_a, verts_a, face_a_local, tet_b, verts_b, face_b_local,
                 correspondence):
    locals_a = [i for i in range(4) if i != face_a_local]
    image = tuple(verts_b.index(correspondence[verts_a[i]])
                  for i in locals_a)
    return FaceGluing(tet_a, face_a_local, tet_b, face_b_local, image)


def subdivide(D: Decomposition) -> Triangulation:
    """Cone, reconcile glued faces, and layer flat tetrahedra at pillows.

    The output lists cone tetrahedra by polyhedron then face, then the
    pillow layers by gluing index; it always passes validate_triangulation
    and contains only ideal, flat and singly-truncated cells.
    """
    assignment = maximal_tree_cone_assignment(D)
    tables = face_apex_tables(D, assignment)

    tets: List[Tetrahedron] = []
    quads: List[Tuple[int, ...]] = []      # vertex ids per output tet
    registry: Dict[Tuple[int, FrozenSet[int]], List[Tuple[int, int]]] = {}

    for p, P in enumerate(D.polyhedra):
        cone = assignment.cone_vertex[p]
        for ct in cone_polyhedron(P, cone, tables[p]):
            idx = len(quads)
            quads.append(ct.vertices)
            hyper = 0 if ct.kind == "trunc" else None
            tets.append(Tetrahedron(idx, ct.kind, hyper))
            for omit_local in range(4):
                tri = frozenset(ct.vertices) - {ct.vertices[omit_local]}
                registry.setdefault((p, tri), []).append((idx, omit_local))

    gluings: List[FaceGluing] = []
    paired = set()
    face_tris: Dict[Tuple[int, int], Dict[FrozenSet[int], Tuple[int, int]]] = {}

    for key, entries in registry.items():
        if len(entries) > 2:
            raise PreconditionViolated(
                "triangle %s of polyhedron %d borders %d tetrahedra"
                % (tuple(sorted(key[1])), key[0], len(entries)))

    # face triangle ownership: fans over base faces come from their own
    # cone tets; faces through the cone vertex expose side triangles
    for p, P in enumerate(D.polyhedra):
        cone = assignment.cone_vertex[p]
        for f, cyc in enumerate(P.faces):
            tris = face_tris.setdefault((p, f), {})
            if cone not in cyc:
                apex = tables[p][f]
                for (w, x, y) in _fan_triangles(tuple(cyc), apex):
                    tri = frozenset((w, x, y))
                    entries = registry[(p, tri)]
                    assert len(entries) == 1
                    tris[tri] = entries[0]
            else:
                for (u, w) in P.face_edges(f):
                    if cone in (u, w):
                        continue
                    tri = frozenset((cone, u, w))
                    entries = registry.get((p, tri), [])
                    if len(entries) != 1:
                        raise PreconditionViolated(
                            "face %d.%d triangle %s has no unique cone "
                            "tetrahedron" % (p, f, tuple(sorted(tri))))
                    tris[tri] = entries[0]

    # interior walls pair up by vertex set inside each polyhedron
    boundary_keys = {(p, tri)
                     for (p, f), tris in face_tris.items() for tri in tris}
    for (p, tri), entries in sorted(
            registry.items(),
            key=lambda item: (item[0][0], sorted(item[0][1]))):
        if len(entries) == 2 and (p, tri) not in boundary_keys:
            (ta, fa), (tb, fb) = entries
            ident = {v: v for v in tri}
            gluings.append(_emit_gluing(ta, quads[ta], fa,
                                        tb, quads[tb], fb, ident))

    pillows = detect_pillows(D, assignment)
    pillow_by_gluing = {pw.gluing_index: pw for pw in pillows}
    assert not (set(pillow_by_gluing) & set(assignment.tree_gluings)), \
        "a maximal-tree gluing produced a pillow"

    for gi, g in enumerate(D.gluings):
        vmap = g.vertex_map()
        cyc = D.polyhedra[g.poly_a].faces[g.face_a]
        va = _induced_apex(D, assignment, tables, g.poly_a, g.face_a)
        vb_far = _induced_apex(D, assignment, tables, g.poly_b, g.face_b)
        vb = g.inverse_map()[vb_far]
        fan_a = {frozenset(t) for t in _fan_triangles(tuple(cyc), va)}
        fan_b = {frozenset(t) for t in _fan_triangles(tuple(cyc), vb)}
        a_side = face_tris[(g.poly_a, g.face_a)]
        b_side = face_tris[(g.poly_b, g.face_b)]

        for tri in sorted(fan_a & fan_b, key=sorted):
            ta, fa = a_side[tri]
            tb, fb = b_side[frozenset(vmap[v] for v in tri)]
            gluings.append(_emit_gluing(ta, quads[ta], fa,
                                        tb, quads[tb], fb, vmap))
        if fan_a == fan_b:
            continue

        stack = layer_pillow(pillow_by_gluing[gi])
        base = len(quads)
        kinds = D.polyhedra[g.poly_a].vertex_kinds
        for tv in stack.tets:
            idx = len(quads)
            quads.append(tv)
            tets.append(Tetrahedron(idx, "flat", None))
            assert all(kinds[v] == "ideal" for v in tv), \
                "flat tetrahedron with a hyperideal vertex"
        for (i, oi, j, oj) in stack.gluings:
            ident = {v: v for v in _triangle_of(stack.tets[i], oi)}
            gluings.append(_emit_gluing(
                base + i, quads[base + i], _local_face(stack.tets[i], oi),
                base + j, quads[base + j], _local_face(stack.tets[j], oj),
                ident))
        for (i, omit) in stack.bottom:
            tri = _triangle_of(stack.tets[i], omit)
            ta, fa = a_side[tri]
            ident = {v: v for v in tri}
            gluings.append(_emit_gluing(
                ta, quads[ta], fa,
                base + i, quads[base + i], _local_face(stack.tets[i], omit),
                ident))
        for (i, omit) in stack.top:
            tri = _triangle_of(stack.tets[i], omit)
            tb, fb = b_side[frozenset(vmap[v] for v in tri)]
            gluings.append(_emit_gluing(
                base + i, quads[base + i], _local_face(stack.tets[i], omit),
                tb, quads[tb], fb, vmap))

    T = build_triangulation(tets, gluings)
    report = validate_triangulation(T)
    assert report.ok, report.first_violation
    return T
