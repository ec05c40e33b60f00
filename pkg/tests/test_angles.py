import itertools
import random
from fractions import Fraction

import pytest

from anglekit.angles import (
    RHS_EDGE,
    RHS_HYPER,
    RHS_IDEAL,
    FarkasCertificate,
    assemble_angle_system,
    search_taut,
    solve_angles,
    verify_certificate,
)
from anglekit.errors import DimensionMismatch, PreconditionViolated, SizeCap
from anglekit.triangulation import (
    AngleAssignment,
    FaceGluing,
    Tetrahedron,
    build_triangulation,
    opposite_edge,
    validate_angles,
)

F = Fraction


# ------------------------------------------------------------- assemble

def test_assemble_fig8(fig8):
    S = assemble_angle_system(fig8)
    assert S.columns == 12
    assert S.corner_row_count == 8
    assert S.edge_row_count == 2
    assert S.labels[:2] == (("corner", 0, 0), ("corner", 0, 1))
    for i in range(8):
        assert sum(S.rows[i]) == 3
        assert all(v in (0, 1) for v in S.rows[i])
        assert S.rhs_kinds[i] == RHS_IDEAL
    for i in (8, 9):
        assert sum(S.rows[i]) == 6
        assert S.rhs_kinds[i] == RHS_EDGE


def test_assemble_unglued_tet():
    T = build_triangulation([Tetrahedron(0)], [])
    S = assemble_angle_system(T)
    assert S.corner_row_count == 4
    assert S.edge_row_count == 6
    for i in range(4, 10):
        assert sum(S.rows[i]) == 1


def test_assemble_flags_hyperideal_corner():
    T = build_triangulation([Tetrahedron(0, kind="trunc", hyper=3)], [])
    S = assemble_angle_system(T)
    flagged = [i for i, k in enumerate(S.rhs_kinds) if k == RHS_HYPER]
    assert flagged == [3]
    assert S.labels[3] == ("corner", 0, 3)


def test_supremal_rhs(fig8):
    S = assemble_angle_system(fig8)
    assert S.supremal_rhs() == [F(1)] * 8 + [F(2)] * 2


# ----------------------------------------------------------- solve strict

def test_fig8_strict_recovers_reference_point(fig8):
    res = solve_angles(fig8, "strict")
    assert res.feasible
    assert res.slack == F(1, 3)
    assert validate_angles(fig8, res.assignment, "strict").ok
    # slack 1/3 forces every shifted angle to zero
    assert res.assignment.values == (F(1, 3),) * 12
    assert res.certificate is None
    assert res.hyper_corner_sums == ()


def test_gieseking_strict(gieseking):
    res = solve_angles(gieseking, "strict")
    assert res.feasible
    assert res.slack == F(1, 3)
    assert validate_angles(gieseking, res.assignment, "strict").ok


def test_valence1_strict_infeasible(valence1):
    res = solve_angles(valence1, "strict")
    assert not res.feasible
    assert res.assignment is None
    assert res.slack is None    # even the closed region is empty
    S = assemble_angle_system(valence1)
    assert verify_certificate(S, res.certificate)


def test_valence1_semi_infeasible(valence1):
    res = solve_angles(valence1, "semi")
    assert not res.feasible
    S = assemble_angle_system(valence1)
    assert verify_certificate(S, res.certificate)


def test_certificate_is_normalized(valence1):
    cert = solve_angles(valence1, "strict").certificate
    vec = cert.vector()
    assert all(v.denominator == 1 for v in vec)
    from math import gcd
    g = 0
    for v in vec:
        g = gcd(g, abs(int(v)))
    assert g == 1


def test_strict_implies_semi(fig8, gieseking):
    for T in (fig8, gieseking):
        assert solve_angles(T, "strict").feasible
        res = solve_angles(T, "semi")
        assert res.feasible
        assert res.slack == 0
        assert validate_angles(T, res.assignment, "semi").ok


def test_trunc_mirror_pair_certified_infeasible():
    # mirror-gluing two truncated tets makes six valence-2 edge classes,
    # each demanding two angles of 1; the certificate survives
    T = build_triangulation(
        [Tetrahedron(0, kind="trunc", hyper=3),
         Tetrahedron(1, kind="trunc", hyper=3)],
        [FaceGluing(0, 0, 1, 0, (1, 2, 3)),
         FaceGluing(0, 1, 1, 1, (0, 2, 3)),
         FaceGluing(0, 2, 1, 2, (0, 1, 3)),
         FaceGluing(0, 3, 1, 3, (0, 1, 2))],
    )
    res = solve_angles(T, "strict")
    assert not res.feasible
    assert verify_certificate(assemble_angle_system(T), res.certificate)


def _trunc_gap_example():
    # base-to-base with both edge classes of valence 6: summing the corner
    # rows forces the two hyperideal sums to total exactly 2, so strict
    # fails for every choice of hyperideal rhs, yet no single multiplier
    # vector witnesses all those choices at once
    return build_triangulation(
        [Tetrahedron(0, kind="trunc", hyper=3),
         Tetrahedron(1, kind="trunc", hyper=3)],
        [FaceGluing(0, 3, 1, 3, (0, 1, 2)),
         FaceGluing(0, 0, 0, 1, (2, 0, 3)),
         FaceGluing(0, 2, 1, 0, (1, 2, 3)),
         FaceGluing(1, 1, 1, 2, (1, 0, 3))],
    )


def test_trunc_gap_case_decided_without_certificate():
    T = _trunc_gap_example()
    assert [c.valence for c in T.edge_classes] == [6, 6]
    res = solve_angles(T, "strict")
    assert not res.feasible
    assert res.certificate is None
    assert res.slack == 0       # the closed region is nonempty


def test_trunc_gap_case_semi_feasible_on_the_bound():
    T = _trunc_gap_example()
    res = solve_angles(T, "semi")
    assert res.feasible
    assert validate_angles(T, res.assignment, "semi").ok
    # both hyperideal sums are pinned to the closed bound
    assert [s for (_, s) in res.hyper_corner_sums] == [1, 1]
    assert not validate_angles(T, res.assignment, "strict").ok


def test_unknown_mode_rejected(fig8):
    with pytest.raises(PreconditionViolated):
        solve_angles(fig8, "taut")


# ------------------------------------------------------------ certificates

def test_zero_certificate_rejected(valence1):
    S = assemble_angle_system(valence1)
    zero = FarkasCertificate((F(0),) * S.corner_row_count,
                             (F(0),) * S.edge_row_count)
    assert not verify_certificate(S, zero)


def test_sign_flips_break_certificate(valence1):
    S = assemble_angle_system(valence1)
    cert = solve_angles(valence1, "strict").certificate
    vec = cert.vector()
    nc = S.corner_row_count
    flipped_any = False
    for i, v in enumerate(vec):
        if v == 0:
            continue
        mutated = list(vec)
        mutated[i] = -v
        bad = FarkasCertificate(tuple(mutated[:nc]), tuple(mutated[nc:]))
        assert not verify_certificate(S, bad)
        flipped_any = True
    assert flipped_any


def test_positive_scaling_preserves_validity(valence1):
    S = assemble_angle_system(valence1)
    cert = solve_angles(valence1, "strict").certificate
    scaled = FarkasCertificate(tuple(F(7, 3) * v for v in cert.corner),
                               tuple(F(7, 3) * v for v in cert.edge))
    assert verify_certificate(S, scaled)


def test_certificate_dimension_check(fig8, valence1):
    cert = solve_angles(valence1, "strict").certificate
    with pytest.raises(DimensionMismatch):
        verify_certificate(assemble_angle_system(fig8), cert)


def test_fuzz_never_certifies_feasible_system(fig8):
    S = assemble_angle_system(fig8)
    rng = random.Random(991)
    for _ in range(200):
        h = tuple(F(rng.randint(-6, 6), rng.randint(1, 4))
                  for _ in range(S.corner_row_count))
        z = tuple(F(rng.randint(-6, 6), rng.randint(1, 4))
                  for _ in range(S.edge_row_count))
        assert not verify_certificate(S, FarkasCertificate(h, z))


# ------------------------------------------------------------------ taut

def _taut_oracle(T):
    """Exhaust all per-tet opposite-pair patterns in tuple order."""
    hits = []
    for pattern in itertools.product(range(3), repeat=T.size):
        values = [F(0)] * (6 * T.size)
        for t, p in enumerate(pattern):
            values[6 * t + p] = F(1)
            values[6 * t + opposite_edge(p)] = F(1)
        a = AngleAssignment(T, values)
        if validate_angles(T, a, "taut").ok:
            hits.append((pattern, a))
    return hits


def test_fig8_taut_matches_bruteforce(fig8):
    hits = _taut_oracle(fig8)
    assert len(hits) == 3
    found = search_taut(fig8)
    assert found is not None
    assert found.values == hits[0][1].values
    assert validate_angles(fig8, found, "taut").ok


def test_gieseking_taut_matches_bruteforce(gieseking):
    hits = _taut_oracle(gieseking)
    found = search_taut(gieseking)
    if hits:
        assert found.values == hits[0][1].values
    else:
        assert found is None


def test_valence1_has_no_taut(valence1):
    assert _taut_oracle(valence1) == []
    assert search_taut(valence1) is None


def test_truncated_tet_kills_taut():
    T = build_triangulation(
        [Tetrahedron(0, kind="trunc", hyper=3),
         Tetrahedron(1, kind="trunc", hyper=3)],
        [FaceGluing(0, 0, 1, 0, (1, 2, 3))],
    )
    assert search_taut(T) is None


def test_size_cap(fig8, monkeypatch):
    with pytest.raises(SizeCap):
        search_taut(fig8, size_cap=1)
    monkeypatch.setenv("ANGLEKIT_SIZE_CAP", "1")
    with pytest.raises(SizeCap):
        search_taut(fig8)
    monkeypatch.setenv("ANGLEKIT_SIZE_CAP", "30")
    assert search_taut(fig8) is not None
