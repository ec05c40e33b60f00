import io
import json
import os
from contextlib import redirect_stdout

from anglekit import cli
from anglekit.formats import parse_tri

from conftest import fixture_path


def run(args):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = cli.main(args)
    return code, buf.getvalue()


def run_json(args):
    code, out = run(args)
    return code, json.loads(out)


def test_validate_ok_fixture():
    code, doc = run_json(["validate", fixture_path("fig8.tri")])
    assert code == 0
    assert doc["ok"] and doc["closed"]


def test_validate_reports_open_faces(tmp_path):
    path = tmp_path / "open.tri"
    path.write_text("tri v1\ntet 0 kind=ideal hyper=-\n")
    code, doc = run_json(["validate", str(path)])
    assert code == 0                  # open faces are not structural errors
    assert doc["ok"] and not doc["closed"]
    assert len(doc["open_internal_faces"]) == 4


def test_missing_file_is_input_error(capsys):
    assert cli.main(["validate", "no-such-file.tri"]) == 2
    assert "error:" in capsys.readouterr().err


def test_bad_header_is_input_error(tmp_path, capsys):
    path = tmp_path / "x.tri"
    path.write_text("nonsense v9\n")
    assert cli.main(["validate", str(path)]) == 2
    assert "header" in capsys.readouterr().err


def test_angles_feasible_exit_zero():
    code, doc = run_json(["angles", fixture_path("fig8.tri"),
                          "--mode", "strict"])
    assert code == 0
    assert doc["status"] == "feasible"
    assert doc["angles"] == ["1/3"] * 12
    assert doc["certificate"] is None


def test_angles_infeasible_exit_one():
    code, doc = run_json(["angles", fixture_path("valence1.tri")])
    assert code == 1
    assert doc["status"] == "infeasible"
    assert doc["angles"] is None
    assert doc["certificate"] is not None


def test_angles_certificate_export(tmp_path):
    out = tmp_path / "cert.json"
    code, doc = run_json(["angles", fixture_path("valence1.tri"),
                          "--certificate", str(out)])
    assert code == 1
    cert = json.loads(out.read_text())
    assert cert["kind"] == "farkas"
    assert len(cert["rows"]["corner"]) == len(cert["corner"])
    assert len(cert["rows"]["edge"]) == len(cert["edge"])
    assert cert["rows"]["corner"][0] == "corner 0 0"


def test_angles_certificate_unavailable_when_feasible(tmp_path, capsys):
    out = tmp_path / "cert.json"
    code = cli.main(["angles", fixture_path("fig8.tri"),
                     "--certificate", str(out)])
    assert code == 2
    assert "certificate" in capsys.readouterr().err
    assert not out.exists()


def test_angles_taut_mode():
    code, doc = run_json(["angles", fixture_path("fig8.tri"),
                          "--mode", "taut"])
    assert doc["mode"] == "taut"
    assert (code == 0) == (doc["status"] == "feasible")


def test_subdivide_writes_tri(tmp_path):
    out = tmp_path / "out.tri"
    code, text = run(["subdivide", fixture_path("sample_mixed.dec"),
                      "-o", str(out)])
    assert code == 0 and text == ""
    T = parse_tri(out.read_text())
    assert T.size == 15


def test_subdivide_report():
    code, doc = run_json(["subdivide", fixture_path("sample_mixed.dec"),
                          "--report"])
    assert code == 0
    assert doc["tets"] == 15 and doc["flat"] == 1
    assert doc["cone_vertex"] == [2, 4, 4]
    assert [p["gluing"] for p in doc["pillows"]] == [1]


def test_subdivide_rejects_tri_input(capsys):
    assert cli.main(["subdivide", fixture_path("fig8.tri")]) == 2
    assert "decomposition" in capsys.readouterr().err


def test_normal_kernel():
    code, doc = run_json(["normal", fixture_path("fig8.tri"), "--kernel"])
    assert code == 0
    assert doc["columns"] == 14
    assert len(doc["disc_types"]) == 14
    assert doc["disc_types"][0] == "quad 0.0"
    assert doc["kernel_dimension"] == len(doc["kernel"])


def test_normal_chistar_roundtrip(tmp_path):
    _, kernel_doc = run_json(["normal", fixture_path("fig8.tri"),
                              "--kernel"])
    vec = kernel_doc["kernel"][0]
    path = tmp_path / "s.json"
    path.write_text(json.dumps(vec))
    code, doc = run_json(["normal", fixture_path("fig8.tri"),
                          "--chistar", str(path)])
    assert code == 0
    assert "/" in doc["chi_star"] or doc["chi_star"].lstrip("-").isdigit()


def test_normal_check_main1():
    code, doc = run_json(["normal", fixture_path("fig8.tri"),
                          "--check", "main1"])
    assert code == 0
    assert doc["holds"] and doc["witness_value"].startswith("-")


def test_normal_check_prop0_solves_semi_itself():
    code, doc = run_json(["normal", fixture_path("fig8.tri"),
                          "--check", "prop0"])
    assert code == 0 and doc["holds"]


def test_check_homology():
    code, doc = run_json(["check", fixture_path("fig8.tri"),
                          "--criterion", "homology"])
    assert code == 0
    assert doc["h1_rank"] == 1 and doc["zero_map"]
    assert doc["h1_boundary_rank"] == 2
    assert doc["witnesses"]["nonzero_boundary_generator"] is None


def test_verdict_feasible():
    code, doc = run_json(["verdict", fixture_path("fig8.tri")])
    assert code == 0
    assert doc["top_line"] == "angle structure exists (constructive)"
    assert set(doc["criteria"]) == {"strict"}


def test_verdict_explain_adds_advisory_criteria():
    code, doc = run_json(["verdict", fixture_path("fig8.tri"), "--explain"])
    assert code == 0
    assert set(doc["criteria"]) == {"strict", "semi", "taut", "prop0",
                                    "main1", "homology"}
    assert doc["criteria"]["homology"]["available"]


def test_verdict_infeasible_runs_advisories():
    code, doc = run_json(["verdict", fixture_path("valence1.tri")])
    assert code == 1
    assert doc["top_line"].startswith("no angle structure")
    assert doc["criteria"]["strict"]["certificate"] is not None
    assert "homology" in doc["criteria"]


def test_verdict_dec_input_summarizes_subdivision():
    code, doc = run_json(["verdict", fixture_path("sample_mixed.dec")])
    assert code == 1
    assert doc["subdivision"]["tets"] == 15
    assert doc["subdivision"]["pillows"] == 1
    assert doc["criteria"]["homology"]["available"] is False


def test_verdict_output_file_matches_stdout(tmp_path):
    out = tmp_path / "v.json"
    code, text = run(["verdict", fixture_path("fig8.tri"),
                      "-o", str(out)])
    assert out.read_text() == text


def test_verdict_report_dir(tmp_path):
    rep = tmp_path / "rep"
    code, _ = run(["verdict", fixture_path("fig8.tri"), "--explain",
                   "--report-dir", str(rep)])
    assert code == 0
    names = sorted(os.listdir(rep))
    assert names == ["angles.png", "euler.png", "summary.tsv",
                     "verdict.json"]
    lines = (rep / "summary.tsv").read_text().splitlines()
    assert lines[0] == "criterion\toutcome\tdetail"
    assert len(lines) == 7


def test_verdict_report_dir_without_witness_skips_angle_figure(tmp_path):
    rep = tmp_path / "rep"
    code, _ = run(["verdict", fixture_path("valence1.tri"),
                   "--report-dir", str(rep)])
    assert code == 1
    names = sorted(os.listdir(rep))
    assert "angles.png" not in names
    assert "euler.png" in names
