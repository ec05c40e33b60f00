"""Rendering of verdict documents: a delimited summary plus figures.

Everything here is presentation only; the JSON document produced by the
verdict command is the authoritative record. matplotlib is imported
lazily so library users without a display stack never pay for it.
"""

import csv
import os
from typing import List

from .formats import parse_rational
from .normal import chi_star, link_coordinate
from .triangulation import Triangulation


def _criterion_rows(doc):
    rows = []
    for name in ("strict", "semi", "taut", "prop0", "main1", "homology"):
        entry = doc.get("criteria", {}).get(name)
        if entry is None:
            continue
        if "status" in entry:
            outcome = entry["status"]
        elif "holds" in entry:
            holds = entry["holds"]
            outcome = "holds" if holds else \
                "fails" if holds is not None else "unavailable"
        elif "zero_map" in entry:
            outcome = "holds" if entry["zero_map"] else "fails"
        else:
            outcome = "unavailable"
        detail = entry.get("note") or entry.get("witness_value") \
            or entry.get("slack") or ""
        rows.append((name, outcome, detail))
    return rows


def write_summary_tsv(doc, path: str) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, delimiter="\t", lineterminator="\n")
        writer.writerow(("criterion", "outcome", "detail"))
        for row in _criterion_rows(doc):
            writer.writerow(row)


def _angle_values(doc):
    for name in ("strict", "semi"):
        entry = doc.get("criteria", {}).get(name, {})
        raw = entry.get("angles")
        if raw:
            return name, [parse_rational(tok) for tok in raw]
    return None, None


def render_angles_png(doc, path: str) -> bool:
    source, values = _angle_values(doc)
    if values is None:
        return False
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(max(4, len(values) / 4), 3))
    ax.bar(range(len(values)), [float(v) for v in values], color="#4878a8")
    ax.axhline(1 / 3, color="#888888", linewidth=0.8, linestyle="--")
    ax.set_xlabel("tetrahedron edge (6 per tet)")
    ax.set_ylabel("angle / pi")
    ax.set_title("%s angle witness" % source)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return True


def render_euler_png(T: Triangulation, path: str) -> bool:
    if not T.vertex_classes:
        return False
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    values = []
    colors = []
    for vc in T.vertex_classes:
        values.append(float(chi_star(T, link_coordinate(T, vc.index))))
        colors.append("#4878a8" if vc.kind == "ideal" else "#a85448")
    fig, ax = plt.subplots(figsize=(max(4, len(values) / 2), 3))
    ax.bar(range(len(values)), values, color=colors)
    ax.axhline(0, color="#444444", linewidth=0.8)
    ax.set_xlabel("vertex class (dark red = hyperideal)")
    ax.set_ylabel("generalized Euler characteristic of link")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return True


def write_report(doc, T: Triangulation, out_dir: str) -> List[str]:
    """Write verdict.json, summary.tsv and figures; returns written paths."""
    os.makedirs(out_dir, exist_ok=True)
    written = []

    import json
    json_path = os.path.join(out_dir, "verdict.json")
    with open(json_path, "w") as fh:
        fh.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    written.append(json_path)

    tsv_path = os.path.join(out_dir, "summary.tsv")
    write_summary_tsv(doc, tsv_path)
    written.append(tsv_path)

    angles_path = os.path.join(out_dir, "angles.png")
    if render_angles_png(doc, angles_path):
        written.append(angles_path)
    euler_path = os.path.join(out_dir, "euler.png")
    if render_euler_png(T, euler_path):
        written.append(euler_path)
    return written
