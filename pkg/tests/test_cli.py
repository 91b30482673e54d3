"""End-to-end runs of the command line, exit codes, and output formats."""

import csv
import json
import os

import pytest

from floerbench import ainfty, cli


def run(capsys, argv):
    rc = cli.main(argv)
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


def run_json(capsys, argv):
    rc, out, err = run(capsys, argv + ["--json"])
    return rc, json.loads(out), err


def strip_elapsed(obj):
    if isinstance(obj, dict):
        return {k: strip_elapsed(v) for k, v in obj.items() if k != "elapsed_s"}
    if isinstance(obj, list):
        return [strip_elapsed(v) for v in obj]
    return obj


# ---------------------------------------------------------------------------
# beta


def test_beta_build(capsys):
    rc, doc, _ = run_json(
        capsys, ["beta", "build", "--punctures", "0,1", "--weights", "1,1"]
    )
    assert rc == 0
    assert doc["schema"] == "floerbench-report-1"
    assert doc["payload"]["critical_points"] == [0.5]


def test_beta_build_renders_figure(capsys, tmp_path):
    figdir = tmp_path / "figs"
    rc, doc, _ = run_json(
        capsys,
        ["beta", "build", "--punctures", "0,1", "--weights", "1,1",
         "--figures", str(figdir)],
    )
    assert rc == 0
    assert os.path.isfile(doc["payload"]["figure"])
    assert doc["payload"]["figure"].endswith("slit_domain.png")


def test_beta_verify_defaults_to_unit_spacing(capsys):
    rc, doc, _ = run_json(capsys, ["beta", "verify", "--weights", "1,1", "--grid", "80"])
    assert rc == 0
    assert doc["passed"] is True
    assert doc["payload"]["slit_map"]["punctures"] == [0.0, 1.0]


def test_beta_glue(capsys, tmp_path):
    figdir = tmp_path / "figs"
    rc, doc, _ = run_json(
        capsys,
        ["beta", "glue", "--outer-punctures", "0,1.5", "--outer-weights", "2,1",
         "--inner-punctures", "0,1", "--inner-weights", "1,1",
         "--slot", "1", "--lengths", "2,4,8", "--figures", str(figdir)],
    )
    assert rc == 0
    assert doc["payload"]["decreasing"] is True
    assert os.path.isfile(doc["payload"]["figure"])


def test_beta_usage_errors(capsys):
    rc, _, err = run(capsys, ["beta", "build", "--punctures", "1,0", "--weights", "1,1"])
    assert rc == 2 and "error:" in err
    # malformed values are rejected by the argument parser itself
    with pytest.raises(SystemExit) as exc:
        cli.main(["beta", "build", "--punctures", "x", "--weights", "1"])
    assert exc.value.code == 2
    capsys.readouterr()


# ---------------------------------------------------------------------------
# trees


def test_trees_enumerate(capsys):
    rc, doc, _ = run_json(capsys, ["trees", "enumerate", "--k", "4"])
    assert rc == 0 and doc["payload"]["count"] == 11
    rc, doc, _ = run_json(capsys, ["trees", "enumerate", "--k", "3", "--space", "N"])
    assert rc == 0
    assert doc["payload"]["count"] == 15
    assert doc["payload"]["top_dimension"] == 2
    rc, doc, _ = run_json(capsys, ["trees", "enumerate", "--k", "2", "--space", "L"])
    assert rc == 0 and doc["payload"]["top_dimension"] == 2


def test_trees_facets(capsys):
    for space in ("N", "L"):
        rc, doc, _ = run_json(
            capsys, ["trees", "facets", "--k", "3", "--space", space]
        )
        assert rc == 0
        assert doc["payload"]["relation_term_bijection"] is True


def test_trees_invalid_arity(capsys):
    rc, _, err = run(capsys, ["trees", "enumerate", "--k", "1"])
    assert rc == 2


# ---------------------------------------------------------------------------
# signs


def test_signs_pass(capsys):
    rc, doc, _ = run_json(
        capsys, ["signs", "verify", "--identity", "m", "--deg-max", "2",
                 "--arity-max", "4"]
    )
    assert rc == 0 and doc["passed"] is True


def test_signs_fprime_fails_with_revalidation(capsys):
    rc, doc, _ = run_json(capsys, ["signs", "verify", "--identity", "fprime"])
    assert rc == 1
    assert doc["passed"] is False
    reval = doc["payload"]["revalidation"]
    assert reval["mismatch"] is True and reval["matches_report"] is True


# ---------------------------------------------------------------------------
# ainfty


def test_ainfty_fixture_and_file(capsys, tmp_path):
    rc, doc, _ = run_json(capsys, ["ainfty", "verify", "--kind", "m",
                                   "--fixture", "dga", "--kmax", "5"])
    assert rc == 0 and doc["payload"]["checked"] == 62
    path = tmp_path / "cat.json"
    path.write_text(json.dumps(ainfty.dga_fixture().to_dict()))
    rc, doc, _ = run_json(capsys, ["ainfty", "verify", "--kind", "m",
                                   "--in", str(path)])
    assert rc == 0


def test_ainfty_club_reading_rejected(capsys):
    rc, doc, _ = run_json(capsys, ["ainfty", "verify", "--kind", "h",
                                   "--fixture", "homotopy",
                                   "--club-reading", "lam"])
    assert rc == 1 and doc["passed"] is False


def test_ainfty_usage_errors(capsys, tmp_path):
    rc, _, _ = run(capsys, ["ainfty", "verify", "--kind", "m"])
    assert rc == 2
    rc, _, _ = run(capsys, ["ainfty", "verify", "--kind", "m",
                            "--fixture", "dga", "--in", "x.json"])
    assert rc == 2
    rc, _, _ = run(capsys, ["ainfty", "verify", "--kind", "f", "--fixture", "dga"])
    assert rc == 2
    rc, _, _ = run(capsys, ["ainfty", "verify", "--kind", "m",
                            "--in", str(tmp_path / "missing.json")])
    assert rc == 2


# ---------------------------------------------------------------------------
# chords


def test_chords_spectrum_with_csv_and_figure(capsys, tmp_path):
    csv_path = tmp_path / "spectrum.csv"
    figdir = tmp_path / "figs"
    rc, doc, _ = run_json(
        capsys,
        ["chords", "spectrum", "--csv", str(csv_path), "--figures", str(figdir)],
    )
    assert rc == 0
    assert doc["payload"]["count_nonconstant"] == 8
    assert doc["payload"]["action_gap"] == "1/2"
    with open(csv_path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 9
    assert rows[0]["label"] == "const"
    assert os.path.isfile(doc["payload"]["figure"])


def test_chords_spectrum_t2(capsys):
    rc, doc, _ = run_json(
        capsys, ["chords", "spectrum", "--model", "t2", "--gram", "1,0,1"]
    )
    assert rc == 0 and doc["payload"]["count_nonconstant"] == 12


def test_chords_lipschitz(capsys):
    rc, doc, _ = run_json(
        capsys, ["chords", "lipschitz", "--g1", "2,0.5,1", "--g2", "6,1.5,3"]
    )
    assert rc == 0
    assert doc["payload"]["constant"] == pytest.approx(3.0, rel=1e-12)


def test_chords_xh(capsys):
    rc, doc, _ = run_json(
        capsys,
        ["chords", "xh", "--point", "0.5,0.3,0.4,1.0,-2.0,0.7", "--chart", "r"],
    )
    assert rc == 0
    assert doc["payload"]["fd_residual"] < 1e-10
    rc, _, _ = run(capsys, ["chords", "xh", "--point", "1,2,3"])
    assert rc == 2


# ---------------------------------------------------------------------------
# grading


def test_grading_rs(capsys, tmp_path):
    path_doc = tmp_path / "path.json"
    ref_doc = tmp_path / "ref.json"
    path_doc.write_text(json.dumps({"rotation": 1.0, "start": [[1.0, 0.0]]}))
    ref_doc.write_text(json.dumps({"rows": [[1.0, 0.0]]}))
    rc, doc, _ = run_json(
        capsys, ["grading", "rs", "--path", str(path_doc), "--ref", str(ref_doc)]
    )
    assert rc == 0
    assert doc["payload"]["value"] == "1"
    rc, _, _ = run(capsys, ["grading", "rs", "--path", str(tmp_path / "no.json"),
                            "--ref", str(ref_doc)])
    assert rc == 2


# ---------------------------------------------------------------------------
# suite


def test_suite_text_output(capsys):
    rc, out, _ = run(capsys, ["suite"])
    assert rc == 0
    lines = [l for l in out.splitlines() if l]
    assert len(lines) == len(cli.DEFAULT_CHECKS)
    assert all(l.startswith("[PASS]") for l in lines)


def test_suite_json_is_seed_stable(capsys):
    rc1, doc1, _ = run_json(capsys, ["suite", "--seed", "7"])
    rc2, doc2, _ = run_json(capsys, ["suite", "--seed", "7"])
    assert rc1 == rc2 == 0
    assert strip_elapsed(doc1) == strip_elapsed(doc2)
    assert doc1["passed"] is True
    assert len(doc1["payload"]["checks"]) == len(cli.DEFAULT_CHECKS)


def test_suite_out_file(capsys, tmp_path):
    out_path = tmp_path / "suite.txt"
    rc, out, _ = run(capsys, ["suite", "--out", str(out_path)])
    assert rc == 0
    assert out == ""
    text = out_path.read_text()
    assert text.startswith("schema:")


def test_suite_config_env(capsys, tmp_path, monkeypatch):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"checks": ["trees", "spectra"], "seed": 3}))
    monkeypatch.setenv("FLOERBENCH_CONFIG", str(cfg))
    rc, out, _ = run(capsys, ["suite"])
    assert rc == 0
    lines = [l for l in out.splitlines() if l]
    assert len(lines) == 2
    assert lines[0].startswith("[PASS] trees")


def test_suite_rejects_unknown_check(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"checks": ["nope"]}))
    rc, _, err = run(capsys, ["suite", "--config", str(cfg)])
    assert rc == 2 and "unknown suite check" in err
