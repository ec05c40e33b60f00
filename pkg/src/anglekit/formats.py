"""Plain-text formats for triangulations (.tri) and polyhedral
decompositions (.dec), plus the JSON conventions shared by the CLI.

.tri format, one directive per line, "#" starts a comment:

    tri v1
    tet <id> kind=<ideal|flat|trunc> hyper=<-|0|1|2|3>
    glue <t>.<f> <t'>.<f'> perm=<xyz>

`perm` lists the images in tet t' of the vertices of face f taken in
ascending label order.  Unknown directives are rejected.

.dec format:

    dec v1
    poly <id>
    vtx <id> kind=<ideal|hyper>
    face <id> cycle=<v,v,...>
    glue <p>.<f> <p'>.<f'> map=<v:v',...>

`vtx` and `face` directives attach to the most recent `poly`.

Rationals in JSON are encoded as strings in lowest terms, "p/q", with the
denominator omitted when it is 1 (e.g. "1/3", "2", "-5/12").
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Tuple

from .errors import BadPermutation, TriSyntaxError, UnknownDirective
from .subdivision import (
    Decomposition,
    PolyGluing,
    Polyhedron,
    build_decomposition,
)
from .triangulation import (
    FACE_VERTICES,
    FaceGluing,
    Tetrahedron,
    Triangulation,
    build_triangulation,
)

TRI_HEADER = "tri v1"
DEC_HEADER = "dec v1"


def format_rational(x: Fraction) -> str:
    return str(Fraction(x))


def parse_rational(s: str) -> Fraction:
    try:
        return Fraction(s.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise TriSyntaxError("bad rational %r: %s" % (s, exc)) from exc


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def _parse_side(tok: str, lineno: int) -> Tuple[int, int]:
    parts = tok.split(".")
    if len(parts) != 2:
        raise TriSyntaxError("expected <tet>.<face>, got %r" % tok, lineno)
    try:
        t, f = int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise TriSyntaxError("bad side %r" % tok, lineno) from exc
    return t, f


def parse_tri(text: str) -> Triangulation:
    """Parse .tri text into a built Triangulation.

    Raises TriSyntaxError / UnknownDirective / BadPermutation with line
    numbers on malformed input; structural errors from build_triangulation
    propagate unchanged.
    """
    lines = text.splitlines()
    body = [(i + 1, _strip(ln)) for i, ln in enumerate(lines)]
    body = [(no, ln) for no, ln in body if ln]
    if not body or body[0][1] != TRI_HEADER:
        raise TriSyntaxError("missing '%s' header" % TRI_HEADER,
                             body[0][0] if body else 1)

    tets: Dict[int, Tetrahedron] = {}
    gluings: List[FaceGluing] = []
    for no, ln in body[1:]:
        fields = ln.split()
        directive = fields[0]
        if directive == "tet":
            if len(fields) < 2:
                raise TriSyntaxError("tet needs <id> kind= hyper=", no)
            try:
                idx = int(fields[1])
            except ValueError as exc:
                raise TriSyntaxError("bad tet id %r" % fields[1], no) from exc
            kv = _keyvals(fields[2:], no, ("kind", "hyper"))
            hyper = kv["hyper"]
            if hyper == "-":
                hv = None
            else:
                try:
                    hv = int(hyper)
                except ValueError as exc:
                    raise TriSyntaxError("bad hyper %r" % hyper, no) from exc
            if idx in tets:
                raise TriSyntaxError("tet %d declared twice" % idx, no)
            tets[idx] = Tetrahedron(index=idx, kind=kv["kind"], hyper=hv)
        elif directive == "glue":
            if len(fields) < 3:
                raise TriSyntaxError("glue needs two sides and perm=", no)
            ta, fa = _parse_side(fields[1], no)
            tb, fb = _parse_side(fields[2], no)
            if fa not in (0, 1, 2, 3) or fb not in (0, 1, 2, 3):
                raise TriSyntaxError("face indices must be 0..3", no)
            kv = _keyvals(fields[3:], no, ("perm",))
            perm = kv["perm"]
            if len(perm) != 3 or not all(c in "0123" for c in perm):
                raise BadPermutation("perm %r must be three of 0123" % perm, no)
            image = tuple(int(c) for c in perm)
            if sorted(image) != list(FACE_VERTICES[fb]):
                raise BadPermutation(
                    "perm %r does not map onto face %d" % (perm, fb), no)
            gluings.append(FaceGluing(ta, fa, tb, fb, image))
        else:
            raise UnknownDirective("unknown directive %r" % directive, no)

    ids = sorted(tets)
    if ids != list(range(len(ids))):
        raise TriSyntaxError("tet ids %r are not 0..%d" % (ids, len(ids) - 1))
    return build_triangulation([tets[i] for i in ids], gluings)


def _keyvals(fields, lineno, expected):
    kv = {}
    for field in fields:
        if "=" not in field:
            raise TriSyntaxError("expected key=value, got %r" % field, lineno)
        k, v = field.split("=", 1)
        kv[k] = v
    for key in expected:
        if key not in kv:
            raise TriSyntaxError("missing %s=" % key, lineno)
    for key in kv:
        if key not in expected:
            raise UnknownDirective("unknown key %r" % key, lineno)
    return kv


def parse_dec(text: str) -> Decomposition:
    """Parse .dec text into a built Decomposition.

    vtx and face directives attach to the most recent poly; ids must be
    contiguous from 0 within each scope. Structural errors from
    build_decomposition propagate unchanged.
    """
    lines = text.splitlines()
    body = [(i + 1, _strip(ln)) for i, ln in enumerate(lines)]
    body = [(no, ln) for no, ln in body if ln]
    if not body or body[0][1] != DEC_HEADER:
        raise TriSyntaxError("missing '%s' header" % DEC_HEADER,
                             body[0][0] if body else 1)

    polys: List[Tuple[int, Dict[int, str], Dict[int, Tuple[int, ...]]]] = []
    gluings: List[PolyGluing] = []
    for no, ln in body[1:]:
        fields = ln.split()
        directive = fields[0]
        if directive == "poly":
            if len(fields) != 2:
                raise TriSyntaxError("poly needs <id>", no)
            try:
                idx = int(fields[1])
            except ValueError as exc:
                raise TriSyntaxError("bad poly id %r" % fields[1], no) from exc
            if idx != len(polys):
                raise TriSyntaxError("poly ids must ascend from 0", no)
            polys.append((idx, {}, {}))
        elif directive == "vtx":
            if not polys:
                raise TriSyntaxError("vtx before any poly", no)
            if len(fields) < 2:
                raise TriSyntaxError("vtx needs <id> kind=", no)
            try:
                idx = int(fields[1])
            except ValueError as exc:
                raise TriSyntaxError("bad vtx id %r" % fields[1], no) from exc
            kv = _keyvals(fields[2:], no, ("kind",))
            kinds = polys[-1][1]
            if idx in kinds:
                raise TriSyntaxError("vtx %d declared twice" % idx, no)
            kinds[idx] = kv["kind"]
        elif directive == "face":
            if not polys:
                raise TriSyntaxError("face before any poly", no)
            if len(fields) < 2:
                raise TriSyntaxError("face needs <id> cycle=", no)
            try:
                idx = int(fields[1])
            except ValueError as exc:
                raise TriSyntaxError("bad face id %r" % fields[1], no) from exc
            kv = _keyvals(fields[2:], no, ("cycle",))
            try:
                cycle = tuple(int(tok) for tok in kv["cycle"].split(","))
            except ValueError as exc:
                raise TriSyntaxError("bad cycle %r" % kv["cycle"], no) from exc
            faces = polys[-1][2]
            if idx in faces:
                raise TriSyntaxError("face %d declared twice" % idx, no)
            faces[idx] = cycle
        elif directive == "glue":
            if len(fields) < 3:
                raise TriSyntaxError("glue needs two sides and map=", no)
            pa, fa = _parse_side(fields[1], no)
            pb, fb = _parse_side(fields[2], no)
            kv = _keyvals(fields[3:], no, ("map",))
            pairs = []
            for tok in kv["map"].split(","):
                halves = tok.split(":")
                if len(halves) != 2:
                    raise TriSyntaxError("expected v:v', got %r" % tok, no)
                try:
                    pairs.append((int(halves[0]), int(halves[1])))
                except ValueError as exc:
                    raise TriSyntaxError("bad map entry %r" % tok, no) from exc
            gluings.append(PolyGluing(pa, fa, pb, fb, tuple(pairs)))
        else:
            raise UnknownDirective("unknown directive %r" % directive, no)

    built = []
    for idx, kinds, faces in polys:
        for name, table in (("vtx", kinds), ("face", faces)):
            ids = sorted(table)
            if ids != list(range(len(ids))):
                raise TriSyntaxError(
                    "%s ids of poly %d are not 0..%d"
                    % (name, idx, len(ids) - 1))
        built.append(Polyhedron(
            idx,
            tuple(kinds[i] for i in range(len(kinds))),
            tuple(faces[i] for i in range(len(faces)))))
    return build_decomposition(built, gluings)


def canonical_poly_gluing(g: PolyGluing) -> PolyGluing:
    """Orient a gluing so side a is the lexicographically smaller side."""
    if (g.poly_b, g.face_b) < (g.poly_a, g.face_a):
        pairs = tuple(sorted((b, a) for a, b in g.pairs))
        return PolyGluing(g.poly_b, g.face_b, g.poly_a, g.face_a, pairs)
    return PolyGluing(g.poly_a, g.face_a, g.poly_b, g.face_b,
                      tuple(sorted(g.pairs)))


def serialize_dec(D: Decomposition) -> str:
    """Canonical .dec text: polyhedra ascending, gluings by smaller side."""
    out = [DEC_HEADER]
    for P in D.polyhedra:
        out.append("poly %d" % P.index)
        for v, kind in enumerate(P.vertex_kinds):
            out.append("vtx %d kind=%s" % (v, kind))
        for f, cycle in enumerate(P.faces):
            out.append("face %d cycle=%s"
                       % (f, ",".join(str(v) for v in cycle)))
    canon = sorted(
        (canonical_poly_gluing(g) for g in D.gluings),
        key=lambda g: (g.poly_a, g.face_a),
    )
    for g in canon:
        out.append("glue %d.%d %d.%d map=%s" % (
            g.poly_a, g.face_a, g.poly_b, g.face_b,
            ",".join("%d:%d" % p for p in g.pairs)))
    return "\n".join(out) + "\n"


def canonical_gluing(g: FaceGluing) -> FaceGluing:
    """Orient a gluing so side a is the lexicographically smaller side."""
    if (g.tet_b, g.face_b) < (g.tet_a, g.face_a):
        inv = g.inverse_map()
        image = tuple(inv[v] for v in FACE_VERTICES[g.face_b])
        return FaceGluing(g.tet_b, g.face_b, g.tet_a, g.face_a, image)
    return g


def serialize_tri(T: Triangulation) -> str:
    """Canonical .tri text: tets ascending, gluings sorted by smaller side."""
    out = [TRI_HEADER]
    for tet in T.tets:
        hyper = "-" if tet.hyper is None else str(tet.hyper)
        out.append("tet %d kind=%s hyper=%s" % (tet.index, tet.kind, hyper))
    canon = sorted(
        (canonical_gluing(g) for g in T.gluings),
        key=lambda g: (g.tet_a, g.face_a),
    )
    for g in canon:
        out.append("glue %d.%d %d.%d perm=%s" % (
            g.tet_a, g.face_a, g.tet_b, g.face_b,
            "".join(str(v) for v in g.image)))
    return "\n".join(out) + "\n"
