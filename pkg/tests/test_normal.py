"""Normal coordinates: layout, kernel, functionals, vertex enumeration."""

import itertools
import random
from fractions import Fraction

import pytest

from anglekit.angles import search_taut, solve_angles
from anglekit.errors import (
    DimensionMismatch,
    MissingSemiAngle,
    NegativeQuad,
    PreconditionViolated,
    SizeCap,
)
from anglekit.normal import (
    CompatibilityMatrix,
    ConeConstraints,
    DiscType,
    check_sufficiency,
    chi_A,
    chi_star,
    combinatorial_area,
    compatibility_matrix,
    cone_extreme_points,
    disc_types,
    integerize,
    kernel_basis,
    link_coordinate,
    lt_identity_residual,
    quad_column,
    triangle_column,
    vertical_quads,
)
from anglekit.triangulation import (
    AngleAssignment,
    Tetrahedron,
    build_triangulation,
    link_surface,
)

F = Fraction


def lone_tet():
    return build_triangulation([Tetrahedron(0, "ideal", None)], [])


# --------------------------------------------------------------- oracles

def rational_rank(rows, width):
    """Rank by fraction-free (Bareiss) elimination, independent of the
    production echelon code."""
    mat = [[F(v) for v in r] for r in rows]
    rank = 0
    prev = F(1)
    for col in range(width):
        piv = next((i for i in range(rank, len(mat)) if mat[i][col] != 0),
                   None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        for i in range(rank + 1, len(mat)):
            for j in range(col + 1, width):
                mat[i][j] = (mat[rank][col] * mat[i][j]
                             - mat[i][col] * mat[rank][j]) / prev
            mat[i][col] = F(0)
        prev = mat[rank][col]
        rank += 1
    return rank


def solve_unique(rows, rhs, width):
    """Unique solution of rows * x = rhs, or None (no or many solutions)."""
    aug = [[F(v) for v in r] + [F(c)] for r, c in zip(rows, rhs)]
    pivots = []
    r = 0
    for c in range(width):
        piv = next((i for i in range(r, len(aug)) if aug[i][c] != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = aug[r][c]
        aug[r] = [v / inv for v in aug[r]]
        for i in range(len(aug)):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [v - f * p for v, p in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
    for i in range(r, len(aug)):
        if aug[i][width] != 0:
            return None
    if len(pivots) < width:
        return None
    x = [F(0)] * width
    for row, c in enumerate(pivots):
        x[c] = aug[row][width]
    return tuple(x)


def brute_force_vertices(Q, cons):
    """Active-set vertex enumeration: every basis of equality rows plus
    tight nonnegativity rows of full rank gives at most one vertex."""
    width = Q.columns
    base = [list(r) for r in Q.rows]
    for j in cons.zero:
        row = [0] * width
        row[j] = 1
        base.append(row)
    norm = [0] * width
    for j in cons.normalize:
        norm[j] = 1
    base.append(norm)
    rhs = [0] * (len(base) - 1) + [1]
    need = width - rational_rank(base, width)
    found = set()
    for S in itertools.combinations(cons.nonnegative, need):
        rows = base + [[1 if j == i else 0 for j in range(width)] for i in S]
        x = solve_unique(rows, rhs + [0] * need, width)
        if x is None:
            continue
        if all(x[i] >= 0 for i in cons.nonnegative):
            found.add(x)
    return sorted(found)


# ---------------------------------------------------------------- layout

def test_disc_type_columns_cover_coordinate_in_order(fig8):
    ds = disc_types(fig8)
    assert len(ds) == 14
    assert [d.column(fig8.size) for d in ds] == list(range(14))
    assert ds[0] == DiscType(0, "quad", 0)
    assert ds[3] == DiscType(1, "quad", 0)
    assert ds[6] == DiscType(0, "triangle", 0)
    assert quad_column(2, 1, 2) == 5
    assert triangle_column(2, 1, 3) == 6 + 4 + 3


def test_quad_edges_avoid_their_pairing():
    for p in range(3):
        edges = DiscType(0, "quad", p).edges()
        assert len(edges) == 4
        assert p not in edges and 5 - p not in edges


def test_quad_arc_sits_at_partner_corner():
    # pairing p joins the endpoints of edge p and those of edge 5-p
    from anglekit.normal import _arc_quad
    from anglekit.triangulation import EDGE_VERTICES
    partner = {}
    for p in range(3):
        for e in (p, 5 - p):
            u, v = EDGE_VERTICES[e]
            partner[(p, u)] = v
            partner[(p, v)] = u
    for face in range(4):
        for corner in range(4):
            if corner == face:
                continue
            p = _arc_quad(face, corner)
            assert partner[(p, face)] == corner


def test_fig8_compatibility_matrix_shape(fig8):
    Q = compatibility_matrix(fig8)
    assert Q.columns == 14
    assert len(Q.rows) == 12
    assert Q.labels[0][0] == 0 and Q.labels[3][0] == 1
    for row in Q.rows:
        nz = [v for v in row if v != 0]
        assert sorted(nz) == [-1, -1, 1, 1]
        # sides live in different tets here, positives in tet 0
        assert all(row[c] >= 0 for c in (0, 1, 2, 6, 7, 8, 9))


def test_lone_tet_has_no_compatibility_rows():
    Q = compatibility_matrix(lone_tet())
    assert Q.rows == ()
    basis = kernel_basis(Q)
    assert len(basis) == 7
    for i, vec in enumerate(basis):
        assert vec[i] == 1 and sum(map(abs, vec)) == 1


# ---------------------------------------------------------------- kernel

@pytest.mark.parametrize("name", ["fig8", "gieseking", "valence1"])
def test_kernel_dimension_matches_rank_oracle(name, request):
    T = request.getfixturevalue(name)
    Q = compatibility_matrix(T)
    basis = kernel_basis(Q)
    assert len(basis) == Q.columns - rational_rank(Q.rows, Q.columns)
    for vec in basis:
        for row in Q.rows:
            assert sum(F(r) * v for r, v in zip(row, vec)) == 0


def test_kernel_basis_is_echelon_normalized(fig8):
    Q = compatibility_matrix(fig8)
    basis = kernel_basis(Q)
    frees = []
    for vec in basis:
        own = [j for j in range(Q.columns)
               if vec[j] == 1 and all(o[j] == 0 for o in basis if o is not vec)]
        assert own
        frees.append(own[-1])
    assert len(set(frees)) == len(basis)


def test_duplicate_rows_leave_kernel_unchanged(fig8):
    Q = compatibility_matrix(fig8)
    doubled = CompatibilityMatrix(Q.columns, Q.rows + Q.rows,
                                  Q.labels + Q.labels)
    assert kernel_basis(doubled) == kernel_basis(Q)


@pytest.mark.parametrize("name", ["fig8", "gieseking", "valence1"])
def test_link_coordinates_lie_in_kernel(name, request):
    T = request.getfixturevalue(name)
    Q = compatibility_matrix(T)
    for vc in T.vertex_classes:
        vec = link_coordinate(T, vc.index)
        assert all(v == 0 for v in vec[:3 * T.size])
        for row in Q.rows:
            assert sum(F(r) * v for r, v in zip(row, vec)) == 0


# ----------------------------------------------------------- functionals

def test_chi_star_single_discs_in_lone_tet():
    T = lone_tet()
    tri = [F(0)] * 7
    tri[triangle_column(1, 0, 2)] = F(1)
    assert chi_star(T, tri) == F(5, 2)          # -1/2 + 1 + 1 + 1
    quad = [F(0)] * 7
    quad[quad_column(1, 0, 1)] = F(1)
    assert chi_star(T, quad) == F(3)            # -1 + 4 * 1
    assert chi_star(T, [F(0)] * 7) == 0


def test_chi_star_boundary_arc_table():
    T = lone_tet()
    tri = [F(0)] * 7
    col = triangle_column(1, 0, 0)
    tri[col] = F(1)
    assert chi_star(T, tri, b_table={col: 3}) == F(1)


def test_chi_star_is_linear(fig8):
    rng = random.Random(20260815)
    basis = kernel_basis(compatibility_matrix(fig8))
    for _ in range(25):
        s = [F(rng.randint(-6, 6), rng.randint(1, 4)) for _ in range(14)]
        t = [F(rng.randint(-6, 6), rng.randint(1, 4)) for _ in range(14)]
        a, b = F(rng.randint(-3, 3)), F(rng.randint(-3, 3), 2)
        combo = [a * x + b * y for x, y in zip(s, t)]
        assert chi_star(fig8, combo) == a * chi_star(fig8, s) + b * chi_star(fig8, t)
    assert basis  # fixture sanity


@pytest.mark.parametrize("name", ["fig8", "gieseking", "valence1"])
def test_chi_star_of_links_matches_direct_cell_count(name, request):
    T = request.getfixturevalue(name)
    for vc in T.vertex_classes:
        expected = link_surface(T, vc.index).euler_characteristic
        assert chi_star(T, link_coordinate(T, vc.index)) == expected


def test_chi_star_of_cusp_links_vanishes(fig8, gieseking):
    for T in (fig8, gieseking):
        for vc in T.vertex_classes:
            assert chi_star(T, link_coordinate(T, vc.index)) == 0


def test_chi_star_rejects_wrong_length(fig8):
    with pytest.raises(DimensionMismatch):
        chi_star(fig8, [F(0)] * 13)


def test_combinatorial_area_flat_pattern():
    T = lone_tet()
    a = AngleAssignment(T, [F(1), F(0), F(0), F(0), F(0), F(1)])
    areas = [combinatorial_area(T, a, DiscType(0, "quad", p))
             for p in range(3)]
    assert areas == [F(-2), F(0), F(0)]
    for k in range(4):
        assert combinatorial_area(T, a, DiscType(0, "triangle", k)) == 0


def test_strict_structure_makes_all_quads_negative(fig8):
    a = solve_angles(fig8, "strict").assignment
    for t in range(2):
        for p in range(3):
            assert combinatorial_area(fig8, a, DiscType(t, "quad", p)) < 0
        for k in range(4):
            assert combinatorial_area(fig8, a, DiscType(t, "triangle", k)) == 0
    assert vertical_quads(fig8, a) == ()


def test_vertical_quads_of_taut_pattern(fig8):
    a = search_taut(fig8)
    assert a is not None
    vq = vertical_quads(fig8, a)
    assert len(vq) == 4 and all(d.kind == "quad" for d in vq)
    for d in vq:
        assert combinatorial_area(fig8, a, d) == 0


def test_chi_A_of_link_with_ideal_structure(fig8):
    a = solve_angles(fig8, "strict").assignment
    assert chi_A(fig8, a, link_coordinate(fig8, 0)) == 0


def test_identity_residual_vanishes_on_seeded_kernel_sample(fig8):
    a = solve_angles(fig8, "semi").assignment
    basis = kernel_basis(compatibility_matrix(fig8))
    rng = random.Random(1729)
    for _ in range(100):
        coeffs = [F(rng.randint(-9, 9), rng.randint(1, 5)) for _ in basis]
        s = [sum(c * vec[j] for c, vec in zip(coeffs, basis))
             for j in range(14)]
        assert lt_identity_residual(fig8, a, s) == 0


def test_identity_residual_names_failed_precondition(fig8):
    bad_angles = AngleAssignment(fig8, [F(2)] + [F(0)] * 11)
    s = [F(0)] * 14
    with pytest.raises(PreconditionViolated) as info:
        lt_identity_residual(fig8, bad_angles, s)
    assert "semi" in str(info.value)
    good = solve_angles(fig8, "semi").assignment
    off_kernel = [F(1)] + [F(0)] * 13
    with pytest.raises(PreconditionViolated) as info:
        lt_identity_residual(fig8, good, off_kernel)
    assert "compatibility" in str(info.value)


# -------------------------------------------------------- extreme points

def test_simplex_vertices_of_lone_tet():
    Q = compatibility_matrix(lone_tet())
    verts = cone_extreme_points(
        Q, ConeConstraints(nonnegative=tuple(range(7)),
                           normalize=tuple(range(7))))
    assert len(verts) == 7
    for v in verts:
        assert sorted(v) == [0] * 6 + [1]


def test_quad_normalized_lone_tet_has_three_vertices():
    Q = compatibility_matrix(lone_tet())
    verts = cone_extreme_points(
        Q, ConeConstraints(nonnegative=tuple(range(7)),
                           normalize=(0, 1, 2)))
    assert len(verts) == 3
    for v in verts:
        assert sum(v[:3]) == 1 and all(x == 0 for x in v[3:])


def test_empty_polytope_yields_no_vertices():
    Q = compatibility_matrix(lone_tet())
    verts = cone_extreme_points(
        Q, ConeConstraints(nonnegative=tuple(range(7)),
                           zero=(0, 1, 2),
                           normalize=(0, 1, 2)))
    assert verts == []


def test_extreme_points_match_brute_force_on_fig8(fig8):
    Q = compatibility_matrix(fig8)
    cons = ConeConstraints(nonnegative=tuple(range(14)),
                           normalize=tuple(range(6)))
    verts = cone_extreme_points(Q, cons)
    assert verts == brute_force_vertices(Q, cons)
    assert verts
    for v in verts:
        assert sum(v[:6]) == 1 and min(v) >= 0


def test_extreme_points_match_brute_force_on_gieseking(gieseking):
    Q = compatibility_matrix(gieseking)
    cons = ConeConstraints(nonnegative=tuple(range(7)),
                           normalize=(0, 1, 2))
    verts = cone_extreme_points(Q, cons)
    assert verts == brute_force_vertices(Q, cons)


def test_extreme_points_column_cap(fig8):
    Q = compatibility_matrix(fig8)
    with pytest.raises(SizeCap):
        cone_extreme_points(
            Q, ConeConstraints(nonnegative=tuple(range(14)),
                               normalize=(0,)),
            column_cap=7)


def test_extreme_points_reject_unpointed_cone():
    Q = compatibility_matrix(lone_tet())
    with pytest.raises(PreconditionViolated):
        cone_extreme_points(
            Q, ConeConstraints(nonnegative=(0,), normalize=(0,)))
    with pytest.raises(PreconditionViolated):
        cone_extreme_points(
            Q, ConeConstraints(nonnegative=tuple(range(7)), normalize=()))


# ------------------------------------------------------------ sufficiency

def test_main1_holds_on_fig8(fig8):
    report = check_sufficiency(fig8, "main1")
    assert report.mode == "main1" and report.holds
    assert report.vertex_count > 0
    assert report.witness_value < 0
    assert chi_star(fig8, report.witness) == report.witness_value
    assert "orthant" in report.note


def test_main1_witness_is_worst_vertex(fig8):
    Q = compatibility_matrix(fig8)
    cons = ConeConstraints(nonnegative=tuple(range(14)),
                           normalize=tuple(range(6)))
    vals = [chi_star(fig8, v) for v in brute_force_vertices(Q, cons)]
    report = check_sufficiency(fig8, "main1")
    assert report.witness_value == max(vals)
    assert report.vertex_count == len(vals)


def test_prop0_guaranteed_with_strict_structure(fig8):
    a = solve_angles(fig8, "strict").assignment
    report = check_sufficiency(fig8, "prop0", a)
    assert report.holds
    assert report.vertex_count == 0
    assert "no vertical quads" in report.note


def test_prop0_requires_angles(fig8):
    with pytest.raises(MissingSemiAngle):
        check_sufficiency(fig8, "prop0")
    with pytest.raises(PreconditionViolated):
        check_sufficiency(fig8, "nope")


def test_prop0_with_taut_pattern_reports_exact_region(fig8):
    a = search_taut(fig8)
    report = check_sufficiency(fig8, "prop0", a)
    assert report.mode == "prop0"
    if report.holds:
        assert report.vertex_count == 0 and report.witness is None
    else:
        w = report.witness
        vert_cols = {d.column(2) for d in vertical_quads(fig8, a)}
        assert sum(w[c] for c in vert_cols) == 1
        for j in range(6):
            if j not in vert_cols:
                assert w[j] == 0


# ------------------------------------------------------------ integrality

def test_integerize_scales_and_keeps_quads(fig8):
    link = link_coordinate(fig8, 0)
    s = [v / 2 for v in link]
    assert integerize(fig8, s) == tuple(int(v) for v in link)


def test_integerize_lifts_negative_triangles(valence1):
    l0 = link_coordinate(valence1, 0)
    l1 = link_coordinate(valence1, 1)
    s = [a - b for a, b in zip(l0, l1)]
    assert integerize(valence1, s) == tuple(int(v) for v in l0)


def test_integerize_flags_zero_after_cancellation(fig8):
    s = [-v for v in link_coordinate(fig8, 0)]
    out = integerize(fig8, s)
    assert set(out) == {0}


def test_integerize_rejects_negative_quads():
    T = lone_tet()
    s = [F(0)] * 7
    s[0] = F(-1)
    with pytest.raises(NegativeQuad):
        integerize(T, s)


def test_integerize_requires_kernel_membership(fig8):
    s = [F(0)] * 14
    s[6] = F(1, 2)
    with pytest.raises(PreconditionViolated):
        integerize(fig8, s)
