"""Command line surface.

Commands: validate, subdivide, angles, normal, check, verdict. Reports are
canonical JSON (sorted keys, two-space indent, rationals as "p/q" strings)
so repeated runs produce byte-identical output. Exit codes: 0 when the
requested property is established, 1 when it is not, 2 on input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Optional

from .angles import (
    assemble_angle_system,
    search_taut,
    solve_angles,
)
from .errors import AnglekitError, CertificateUnavailable, OpenFace, SizeCap
from .formats import (
    DEC_HEADER,
    TRI_HEADER,
    format_rational,
    parse_dec,
    parse_rational,
    parse_tri,
    serialize_tri,
)
from .homology import compact_complex, h1_rank, zero_map_check
from .normal import (
    check_sufficiency,
    chi_star,
    compatibility_matrix,
    disc_types,
    kernel_basis,
)
from .subdivision import (
    detect_pillows,
    maximal_tree_cone_assignment,
    subdivide,
)
from .triangulation import AngleAssignment, validate_triangulation

SCHEMA = "anglekit/1"

NOTES = {
    "strict": "constructive witness: positive angles, corner sums one per "
              "ideal corner and below one per hyperideal corner, edge sums "
              "two",
    "semi": "boundary-case witness with angles in [0, 1]",
    "taut": "exhaustive search over angle patterns drawn from {0, 1}",
    "prop0": "a semi-angle structure with no vertical quadrilaterals "
             "implies an angle structure",
    "main1": "negative generalized Euler characteristic at every extreme "
             "point of the solution cone implies an angle structure",
    "homology": "vanishing map from boundary first homology to total first "
                "homology over GF(2) is the hypothesis of the topological "
                "existence criterion",
}


def _dump(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _rat(x: Fraction) -> str:
    return format_rational(x)


def _load(path: str):
    """Sniff the header and parse; returns (kind, triangulation, dec)."""
    with open(path) as fh:
        text = fh.read()
    header = ""
    for line in text.splitlines():
        stripped = line.split("#", 1)[0].strip()
        if stripped:
            header = stripped
            break
    if header == DEC_HEADER:
        D = parse_dec(text)
        return "dec", subdivide(D), D
    if header == TRI_HEADER:
        return "tri", parse_tri(text), None
    raise AnglekitError("unrecognized header %r; expected %r or %r"
                        % (header, TRI_HEADER, DEC_HEADER))


def _angles_doc(assignment: Optional[AngleAssignment]):
    if assignment is None:
        return None
    return [_rat(v) for v in assignment.values]


def _load_angles(path: str, T) -> AngleAssignment:
    with open(path) as fh:
        doc = json.load(fh)
    if isinstance(doc, dict):
        doc = doc.get("angles", doc)
    return AngleAssignment(T, [parse_rational(s) for s in doc])


def _label_str(label) -> str:
    return " ".join(str(part) for part in label)


def _certificate_doc(system, cert, with_rows: bool):
    if cert is None:
        return None
    doc = {
        "corner": [_rat(v) for v in cert.corner],
        "edge": [_rat(v) for v in cert.edge],
    }
    if with_rows:
        corner_rows = [_label_str(l) for l in system.labels
                       if l[0] == "corner"]
        edge_rows = [_label_str(l) for l in system.labels if l[0] == "edge"]
        doc["rows"] = {"corner": corner_rows, "edge": edge_rows}
    return doc


# ---------------------------------------------------------------- commands

def cmd_validate(args) -> int:
    kind, T, D = _load(args.input)
    report = validate_triangulation(T)
    doc = {
        "schema": SCHEMA,
        "command": "validate",
        "format": kind,
        "ok": report.ok,
        "closed": report.closed,
        "checks": [{"name": c.name, "ok": c.ok, "detail": c.detail}
                   for c in report.checks],
        "open_internal_faces": ["%d.%d" % side
                                for side in report.open_internal_faces],
    }
    sys.stdout.write(_dump(doc))
    return 0 if report.ok else 1


def cmd_subdivide(args) -> int:
    kind, T, D = _load(args.input)
    if D is None:
        raise AnglekitError("subdivide expects a .dec decomposition")
    text = serialize_tri(T)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    if args.report:
        assignment = maximal_tree_cone_assignment(D)
        pillows = detect_pillows(D, assignment)
        kinds = [t.kind for t in T.tets]
        doc = {
            "schema": SCHEMA,
            "command": "subdivide",
            "polyhedra": D.size,
            "cone_vertex": list(assignment.cone_vertex),
            "tree_gluings": list(assignment.tree_gluings),
            "tets": T.size,
            "ideal": kinds.count("ideal"),
            "truncated": kinds.count("trunc"),
            "flat": kinds.count("flat"),
            "pillows": [{
                "gluing": p.gluing_index,
                "cycle": list(p.cycle),
                "apexes": [p.apex_bottom, p.apex_top],
                "note": p.note,
            } for p in pillows],
        }
        sys.stdout.write(_dump(doc))
    elif not args.output:
        sys.stdout.write(text)
    return 0


def cmd_angles(args) -> int:
    kind, T, D = _load(args.input)
    if args.mode == "taut":
        assignment = search_taut(T)
        status = "feasible" if assignment is not None else "infeasible"
        doc = {
            "schema": SCHEMA,
            "command": "angles",
            "mode": "taut",
            "status": status,
            "angles": _angles_doc(assignment),
        }
        if args.certificate:
            raise CertificateUnavailable(
                "taut search does not produce certificates")
        sys.stdout.write(_dump(doc))
        return 0 if assignment is not None else 1

    result = solve_angles(T, args.mode)
    system = assemble_angle_system(T)
    doc = {
        "schema": SCHEMA,
        "command": "angles",
        "mode": result.mode,
        "status": result.status,
        "angles": _angles_doc(result.assignment),
        "slack": None if result.slack is None else _rat(result.slack),
        "hyper_corner_sums": [
            ["%d.%d" % corner, _rat(value)]
            for corner, value in result.hyper_corner_sums],
        "certificate": _certificate_doc(system, result.certificate, False),
    }
    if args.certificate:
        if result.certificate is None:
            raise CertificateUnavailable(
                "no certificate available for this %s result" % result.status)
        cert_doc = {
            "schema": SCHEMA,
            "kind": "farkas",
            "mode": result.mode,
        }
        cert_doc.update(_certificate_doc(system, result.certificate, True))
        with open(args.certificate, "w") as fh:
            fh.write(_dump(cert_doc))
    sys.stdout.write(_dump(doc))
    return 0 if result.feasible else 1


def cmd_normal(args) -> int:
    kind, T, D = _load(args.input)
    Q = compatibility_matrix(T)
    if args.kernel:
        basis = kernel_basis(Q)
        doc = {
            "schema": SCHEMA,
            "command": "normal",
            "columns": Q.columns,
            "ordering": "three quadrilaterals per tetrahedron (separating "
                        "edge pairs 01|23, 02|13, 03|12), then four "
                        "triangles per tetrahedron (corners 0..3)",
            "disc_types": ["%s %d.%d" % (d.kind, d.tet, d.index)
                           for d in disc_types(T)],
            "kernel_dimension": len(basis),
            "kernel": [[_rat(v) for v in vec] for vec in basis],
        }
        sys.stdout.write(_dump(doc))
        return 0
    if args.chistar:
        with open(args.chistar) as fh:
            raw = json.load(fh)
        if isinstance(raw, dict):
            raw = raw.get("coordinates", raw)
        s = [parse_rational(tok) for tok in raw]
        doc = {
            "schema": SCHEMA,
            "command": "normal",
            "columns": Q.columns,
            "chi_star": _rat(chi_star(T, s)),
        }
        sys.stdout.write(_dump(doc))
        return 0
    a = _load_angles(args.angles, T) if args.angles else None
    if args.check == "prop0" and a is None:
        semi = solve_angles(T, "semi")
        a = semi.assignment
    report = check_sufficiency(T, args.check, a)
    doc = {
        "schema": SCHEMA,
        "command": "normal",
        "check": report.mode,
        "holds": report.holds,
        "vertex_count": report.vertex_count,
        "witness": None if report.witness is None
        else [_rat(v) for v in report.witness],
        "witness_value": None if report.witness_value is None
        else _rat(report.witness_value),
        "note": report.note,
    }
    sys.stdout.write(_dump(doc))
    return 0 if report.holds else 1


def _homology_doc(T):
    C = compact_complex(T)
    rank, gens = h1_rank(C, "absolute")
    boundary_rank, _ = h1_rank(C, "boundary")
    relative_rank, _ = h1_rank(C, "relative")
    zmap = zero_map_check(C)
    return {
        "h1_rank": rank,
        "h1_boundary_rank": boundary_rank,
        "h1_relative_rank": relative_rank,
        "zero_map": zmap.is_zero,
        "witnesses": {
            "h1_generators": [list(g) for g in gens],
            "nonzero_boundary_generator":
                None if zmap.witness is None else list(zmap.witness),
        },
    }


def cmd_check(args) -> int:
    kind, T, D = _load(args.input)
    doc = {"schema": SCHEMA, "command": "check", "criterion": args.criterion}
    doc.update(_homology_doc(T))
    sys.stdout.write(_dump(doc))
    return 0 if doc["zero_map"] else 1


def cmd_verdict(args) -> int:
    kind, T, D = _load(args.input)
    doc = {
        "schema": SCHEMA,
        "command": "verdict",
        "format": kind,
        "notes": NOTES,
    }
    if D is not None:
        assignment = maximal_tree_cone_assignment(D)
        kinds = [t.kind for t in T.tets]
        doc["subdivision"] = {
            "polyhedra": D.size,
            "tets": T.size,
            "flat": kinds.count("flat"),
            "truncated": kinds.count("trunc"),
            "pillows": len(detect_pillows(D, assignment)),
        }
    report = validate_triangulation(T)
    doc["validation"] = {"ok": report.ok, "closed": report.closed}
    if not report.ok:
        raise AnglekitError("structural validation failed: %s"
                            % report.first_violation)

    system = assemble_angle_system(T)
    strict = solve_angles(T, "strict")
    criteria = {"strict": {
        "status": strict.status,
        "angles": _angles_doc(strict.assignment),
        "slack": None if strict.slack is None else _rat(strict.slack),
        "certificate": _certificate_doc(system, strict.certificate, False),
    }}
    doc["criteria"] = criteria

    if strict.feasible:
        doc["top_line"] = "angle structure exists (constructive)"
        code = 0
    elif strict.certificate is not None:
        doc["top_line"] = "no angle structure (certified infeasible)"
        code = 1
    else:
        doc["top_line"] = "no angle structure (exact infeasibility)"
        code = 1

    if not strict.feasible or args.explain:
        semi = solve_angles(T, "semi")
        criteria["semi"] = {
            "status": semi.status,
            "angles": _angles_doc(semi.assignment),
            "certificate": _certificate_doc(system, semi.certificate, False),
        }
        try:
            taut = search_taut(T)
            criteria["taut"] = {
                "status": "feasible" if taut is not None else "infeasible",
                "angles": _angles_doc(taut),
            }
        except SizeCap as exc:
            criteria["taut"] = {"status": "skipped", "note": str(exc)}
        for mode in ("prop0", "main1"):
            try:
                rep = check_sufficiency(
                    T, mode, semi.assignment if mode == "prop0" else None)
                criteria[mode] = {
                    "holds": rep.holds,
                    "witness_value": None if rep.witness_value is None
                    else _rat(rep.witness_value),
                    "note": rep.note,
                }
            except (SizeCap, AnglekitError) as exc:
                criteria[mode] = {"holds": None, "note": str(exc)}
        try:
            criteria["homology"] = dict(_homology_doc(T), available=True)
        except (OpenFace, AnglekitError) as exc:
            criteria["homology"] = {"available": False, "note": str(exc)}

    text = _dump(doc)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    sys.stdout.write(text)
    if args.report_dir:
        from . import report as report_mod
        report_mod.write_report(doc, T, args.report_dir)
    return code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="anglekit",
        description="decide existence of angle structures on ideal and "
                    "partially truncated triangulations")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="structural validation report")
    p.add_argument("input")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("subdivide",
                       help="triangulate a polyhedral decomposition")
    p.add_argument("input")
    p.add_argument("-o", "--output", help="write .tri output here")
    p.add_argument("--report", action="store_true",
                   help="print a JSON summary instead of .tri text")
    p.set_defaults(func=cmd_subdivide)

    p = sub.add_parser("angles", help="solve an angle-structure program")
    p.add_argument("input")
    p.add_argument("--mode", choices=("strict", "semi", "taut"),
                   default="strict")
    p.add_argument("--certificate", metavar="OUT.json",
                   help="export the infeasibility certificate")
    p.set_defaults(func=cmd_angles)

    p = sub.add_parser("normal", help="normal-surface coordinate tools")
    p.add_argument("input")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--kernel", action="store_true",
                       help="print a basis of the compatibility kernel")
    group.add_argument("--chistar", metavar="S.json",
                       help="generalized Euler characteristic of a "
                            "coordinate vector")
    group.add_argument("--check", choices=("main1", "prop0"),
                       help="run a sufficiency check")
    p.add_argument("--angles", metavar="A.json",
                   help="angle assignment for --check prop0")
    p.set_defaults(func=cmd_normal)

    p = sub.add_parser("check", help="topological criteria")
    p.add_argument("input")
    p.add_argument("--criterion", choices=("homology",), required=True)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("verdict", help="full decision pipeline")
    p.add_argument("input")
    p.add_argument("--explain", action="store_true",
                   help="run all advisory criteria even when strict "
                        "feasibility already decides")
    p.add_argument("-o", "--output", help="also write the JSON here")
    p.add_argument("--report-dir", metavar="DIR",
                   help="render figures and a delimited summary here")
    p.set_defaults(func=cmd_verdict)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except AnglekitError as exc:
        sys.stderr.write("error: %s\n" % exc)
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        sys.stderr.write("error: %s\n" % exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
