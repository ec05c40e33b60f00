"""Mod-2 cellular homology of the compactified manifold.

Each tetrahedron is truncated at its corners: 12 vertices, 6 shortened
long edges plus 12 rim edges, 4 hexagonal faces plus 4 corner triangles,
one 3-cell. Face gluings identify hexagons (and the induced edges and
vertices); the corner triangles and rim edges form the marked boundary
subcomplex. Everything downstream is bitmask linear algebra over GF(2).
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from . import gf2
from .errors import OpenFace, PreconditionViolated
from .triangulation import (
    EDGE_INDEX,
    EDGE_VERTICES,
    FACE_VERTICES,
    Triangulation,
)


@dataclass(frozen=True)
class CellComplex:
    """Chain complex data with a marked boundary subcomplex.

    Boundary matrices are column lists: d1[e] is the vertex bitmask of
    edge e, d2[f] the edge bitmask of face f, d3[c] the face bitmask of
    cell c. Every vertex lies in the boundary subcomplex; boundary edges
    and faces are flagged by mask.
    """

    vertex_count: int
    edge_count: int
    face_count: int
    cell_count: int
    d1: Tuple[int, ...]
    d2: Tuple[int, ...]
    d3: Tuple[int, ...]
    boundary_edge_mask: int
    boundary_face_mask: int
    vertex_labels: Tuple[tuple, ...]
    edge_labels: Tuple[tuple, ...]
    face_labels: Tuple[tuple, ...]

    def is_boundary_edge(self, e: int) -> bool:
        return bool((self.boundary_edge_mask >> e) & 1)


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, i):
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if ra > rb:
                ra, rb = rb, ra
            self.parent[rb] = ra

    def quotient(self):
        roots = sorted({self.find(i) for i in range(len(self.parent))})
        index = {r: q for q, r in enumerate(roots)}
        return [index[self.find(i)] for i in range(len(self.parent))], roots


def _vertex_index(t, k, e):
    # k must be an endpoint of e; slot 0 or 1 within the edge
    slot = EDGE_VERTICES[e].index(k)
    return 12 * t + 2 * e + slot


def _long_index(t, e):
    return 6 * t + e


def _rim_index(n, t, k, f):
    slot = [x for x in range(4) if x != k].index(f)
    return 6 * n + 12 * t + 3 * k + slot


def _hex_index(t, f):
    return 4 * t + f


def _tri_index(n, t, k):
    return 4 * n + 4 * t + k


def compact_complex(T: Triangulation,
                    require_closed: bool = True) -> CellComplex:
    """Quotient cell structure of the corner-truncated tetrahedra.

    With require_closed, any unglued face raises OpenFace; allowing open
    faces leaves their hexagons free (the marked boundary stays the
    truncation part only, so such complexes model manifolds with extra,
    unmarked boundary).
    """
    if require_closed and T.open_faces:
        raise OpenFace("faces without a gluing: %s"
                       % ", ".join("%d.%d" % of for of in T.open_faces))
    n = T.size

    verts = _UnionFind(12 * n)
    edges = _UnionFind(18 * n)
    faces = _UnionFind(8 * n)

    for g in T.gluings:
        vmap = g.vertex_map()
        faces.union(_hex_index(g.tet_a, g.face_a),
                    _hex_index(g.tet_b, g.face_b))
        fverts = FACE_VERTICES[g.face_a]
        for k in fverts:
            edges.union(_rim_index(n, g.tet_a, k, g.face_a),
                        _rim_index(n, g.tet_b, vmap[k], g.face_b))
        for i in range(3):
            for j in range(i + 1, 3):
                u, v = fverts[i], fverts[j]
                e_a = EDGE_INDEX[(u, v)]
                e_b = EDGE_INDEX[(vmap[u], vmap[v])]
                edges.union(_long_index(g.tet_a, e_a),
                            _long_index(g.tet_b, e_b))
                verts.union(_vertex_index(g.tet_a, u, e_a),
                            _vertex_index(g.tet_b, vmap[u], e_b))
                verts.union(_vertex_index(g.tet_a, v, e_a),
                            _vertex_index(g.tet_b, vmap[v], e_b))

    vq, vroots = verts.quotient()
    eq, eroots = edges.quotient()
    fq, froots = faces.quotient()

    def vlabel(pre):
        t, rem = divmod(pre, 12)
        e, slot = divmod(rem, 2)
        return ("v", t, EDGE_VERTICES[e][slot], e)

    def elabel(pre):
        if pre < 6 * n:
            return ("long", pre // 6, pre % 6)
        pre -= 6 * n
        t, rem = divmod(pre, 12)
        k, slot = divmod(rem, 3)
        return ("rim", t, k, [x for x in range(4) if x != k][slot])

    def flabel(pre):
        if pre < 4 * n:
            return ("hex", pre // 4, pre % 4)
        pre -= 4 * n
        return ("tri", pre // 4, pre % 4)

    d1 = [0] * len(eroots)
    for t in range(n):
        for e in range(6):
            u, v = EDGE_VERTICES[e]
            q = eq[_long_index(t, e)]
            if elabel(eroots[q]) == ("long", t, e):
                d1[q] ^= 1 << vq[_vertex_index(t, u, e)]
                d1[q] ^= 1 << vq[_vertex_index(t, v, e)]
        for k in range(4):
            for f in range(4):
                if f == k:
                    continue
                q = eq[_rim_index(n, t, k, f)]
                if elabel(eroots[q]) == ("rim", t, k, f):
                    for o in FACE_VERTICES[f]:
                        if o != k:
                            e = EDGE_INDEX[(k, o)]
                            d1[q] ^= 1 << vq[_vertex_index(t, k, e)]

    d2 = [0] * len(froots)
    boundary_face_mask = 0
    for t in range(n):
        for f in range(4):
            q = fq[_hex_index(t, f)]
            if flabel(froots[q]) == ("hex", t, f):
                fverts = FACE_VERTICES[f]
                for i in range(3):
                    for j in range(i + 1, 3):
                        e = EDGE_INDEX[(fverts[i], fverts[j])]
                        d2[q] ^= 1 << eq[_long_index(t, e)]
                for k in fverts:
                    d2[q] ^= 1 << eq[_rim_index(n, t, k, f)]
        for k in range(4):
            q = fq[_tri_index(n, t, k)]
            boundary_face_mask |= 1 << q
            for f in range(4):
                if f != k:
                    d2[q] ^= 1 << eq[_rim_index(n, t, k, f)]

    d3 = [0] * n
    for t in range(n):
        for f in range(4):
            d3[t] ^= 1 << fq[_hex_index(t, f)]
            d3[t] ^= 1 << fq[_tri_index(n, t, f)]

    boundary_edge_mask = 0
    for q, root in enumerate(eroots):
        if elabel(root)[0] == "rim":
            boundary_edge_mask |= 1 << q

    C = CellComplex(
        vertex_count=len(vroots),
        edge_count=len(eroots),
        face_count=len(froots),
        cell_count=n,
        d1=tuple(d1),
        d2=tuple(d2),
        d3=tuple(d3),
        boundary_edge_mask=boundary_edge_mask,
        boundary_face_mask=boundary_face_mask,
        vertex_labels=tuple(vlabel(r) for r in vroots),
        edge_labels=tuple(elabel(r) for r in eroots),
        face_labels=tuple(flabel(r) for r in froots),
    )
    # chain-complex law, cheap enough to enforce on every build
    for c in range(C.cell_count):
        acc = 0
        for f in range(C.face_count):
            if (C.d3[c] >> f) & 1:
                acc ^= C.d2[f]
        assert acc == 0
    for f in range(C.face_count):
        acc = 0
        for e in range(C.edge_count):
            if (C.d2[f] >> e) & 1:
                acc ^= C.d1[e]
        assert acc == 0
    return C


# -------------------------------------------------------------- homology

def _vertex_rows(C: CellComplex) -> List[int]:
    rows = [0] * C.vertex_count
    for e, col in enumerate(C.d1):
        m = col
        while m:
            v = (m & -m).bit_length() - 1
            rows[v] |= 1 << e
            m &= m - 1
    return rows


def _mask_bits(mask: int) -> List[int]:
    out = []
    while mask:
        out.append((mask & -mask).bit_length() - 1)
        mask &= mask - 1
    return out


def _compact(vec: int, positions: Sequence[int]) -> int:
    out = 0
    for j, p in enumerate(positions):
        if (vec >> p) & 1:
            out |= 1 << j
    return out


def _expand(vec: int, positions: Sequence[int]) -> int:
    out = 0
    for j, p in enumerate(positions):
        if (vec >> j) & 1:
            out |= 1 << p
    return out


def _h1_generator_masks(C: CellComplex, mode: str) -> List[int]:
    if mode == "absolute":
        cycles = gf2.kernel(_vertex_rows(C), C.edge_count)
        return gf2.quotient_basis(cycles, C.d2)
    if mode == "boundary":
        rim = _mask_bits(C.boundary_edge_mask)
        rows = [_compact(r & C.boundary_edge_mask, rim)
                for r in _vertex_rows(C)]
        cycles = gf2.kernel(rows, len(rim))
        tris = [_compact(C.d2[f], rim)
                for f in _mask_bits(C.boundary_face_mask)]
        return [_expand(v, rim) for v in gf2.quotient_basis(cycles, tris)]
    if mode == "relative":
        interior = ((1 << C.edge_count) - 1) ^ C.boundary_edge_mask
        longs = _mask_bits(interior)
        units = [1 << j for j in range(len(longs))]
        hexes = [_compact(C.d2[f], longs) for f in range(C.face_count)
                 if not (C.boundary_face_mask >> f) & 1]
        return [_expand(v, longs)
                for v in gf2.quotient_basis(units, hexes)]
    raise PreconditionViolated(
        "mode must be absolute, boundary or relative")


def h1_rank(C: CellComplex, mode: str) -> Tuple[int, Tuple[Tuple[int, ...], ...]]:
    """First mod-2 Betti number and explicit generating 1-cycles.

    Cycles are tuples of edge indices into the complex; relative cycles
    are supported on interior (long) edges only.
    """
    gens = _h1_generator_masks(C, mode)
    return len(gens), tuple(tuple(_mask_bits(g)) for g in gens)


@dataclass(frozen=True)
class ZeroMapReport:
    """Verdict on whether absolute H1 dies in the pair (manifold, boundary).

    `matrix` expresses each absolute generator in the relative generator
    basis; the map is zero exactly when every row is zero.
    """

    is_zero: bool
    matrix: Tuple[Tuple[int, ...], ...]
    generators: Tuple[Tuple[int, ...], ...]
    relative_basis: Tuple[Tuple[int, ...], ...]
    witness: Optional[Tuple[int, ...]]


def zero_map_check(C: CellComplex) -> ZeroMapReport:
    abs_gens = _h1_generator_masks(C, "absolute")
    rel_gens = _h1_generator_masks(C, "relative")
    interior = ((1 << C.edge_count) - 1) ^ C.boundary_edge_mask
    longs = _mask_bits(interior)
    hexes = [_compact(C.d2[f], longs) for f in range(C.face_count)
             if not (C.boundary_face_mask >> f) & 1]
    rel_compact = [_compact(g, longs) for g in rel_gens]

    span = list(C.d2) + [1 << e for e in _mask_bits(C.boundary_edge_mask)]
    reduced = gf2.row_reduce(span)

    matrix = []
    witness = None
    for z in abs_gens:
        target = _compact(z & interior, longs)
        sol = gf2.solve(rel_compact + hexes, target)
        assert sol is not None    # relative 1-chains are always cycles
        coords = tuple((sol >> i) & 1 for i in range(len(rel_compact)))
        matrix.append(coords)
        vanishes = gf2.reduce_vector(z, reduced) == 0
        assert vanishes == (not any(coords))
        if not vanishes and witness is None:
            witness = tuple(_mask_bits(z))
    return ZeroMapReport(
        is_zero=all(not any(row) for row in matrix),
        matrix=tuple(matrix),
        generators=tuple(tuple(_mask_bits(g)) for g in abs_gens),
        relative_basis=tuple(tuple(_mask_bits(g)) for g in rel_gens),
        witness=witness,
    )
