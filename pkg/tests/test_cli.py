"""End-to-end tests of the ``qhflow`` command line."""
import csv
import json
from pathlib import Path

import pytest

from qhflow.cli import main

DATA = Path(__file__).parent / "data"
GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, (json.loads(out) if out.strip() else None), err


def write_system(tmp_path, name, P, Q, t=None, **extra):
    rec = lambda d: [{"x": i, "y": j, "c": c} for (i, j), c in d.items()]
    body = {"name": name, "P": rec(P), "Q": rec(Q), **extra}
    if t is not None:
        body["type"] = list(t)
    path = tmp_path / f"{name}.json"
    path.write_text(json.dumps(body))
    return path


# -- golden files ----------------------------------------------------------------

@pytest.mark.parametrize("argv, golden", [
    (["classify", DATA / "cusp_aiif.json"], "classify_cusp_aiif.json"),
    (["classify", DATA / "degenerate_quartic.json"], "classify_degenerate_quartic.json"),
    (["index-set", "--type", "3,4"], "index_set_3_4.json"),
])
def test_golden(capsys, argv, golden, monkeypatch):
    # file paths are not echoed, so the reports do not depend on the cwd
    monkeypatch.chdir(DATA.parent)
    code, out, _ = run(capsys, *argv)
    assert code == 0
    assert out == (GOLDEN / golden).read_text()


def test_deterministic_bytes(capsys):
    outs = {run(capsys, "classify", DATA / "cubic_cusp.json")[1] for _ in range(3)}
    assert len(outs) == 1


def test_json_round_trip(capsys):
    _, out, _ = run(capsys, "classify", DATA / "cusp_aiif.json")
    rep = json.loads(out)
    assert json.loads(json.dumps(rep)) == rep
    assert json.dumps(rep, sort_keys=True, indent=2) + "\n" == out


def test_exact_fields_are_strings(capsys):
    _, rep, _ = run_json(capsys, "classify", DATA / "cusp_aiif.json")

    def walk(o):
        if isinstance(o, dict):
            if "exact" in o:
                assert isinstance(o["exact"], str)
            if "approx" in o:
                assert isinstance(o["approx"], float)
            if "c" in o:
                assert isinstance(o["c"], str)
            for v in o.values():
                walk(v)
        elif isinstance(o, list):
            for v in o:
                walk(v)
    walk(rep)
    assert rep["verdict"]["exponent"] == {"exact": "13/12"}


# -- exit codes --------------------------------------------------------------------

@pytest.mark.parametrize("argv, expected", [
    (["index-set", "--type", "3,4"], 0),
    (["bases", "--type", "1,2", "--degree", "4"], 0),
    (["check-h", "--h", DATA / "quartic_h.json", "--type", "1,1"], 0),
    (["check-h", "--h", DATA / "cusp_h.json", "--type", "3,4"], 0),
    (["classify", DATA / "cusp_aiif.json"], 0),
    (["classify", DATA / "degenerate_quartic.json"], 0),
    (["classify", DATA / "harmonic.json"], 0),
    (["center", DATA / "nilpotent_center.json"], 0),
    (["center", DATA / "quartic_focus.json"], 0),
    (["verify-iif", DATA / "cubic_cusp.json", "--w", DATA / "cubic_cusp_w.json",
      "--exponent", "13/12"], 0),
    # invalid input
    (["index-set", "--type", "2,4"], 2),
    (["index-set", "--type", "three,4"], 2),
    (["bases", "--type", "1,2", "--degree", "-1"], 2),
    (["classify", DATA / "float_coeff.json"], 2),
    (["classify", DATA / "does_not_exist.json"], 2),
    (["check-h", "--h", DATA / "quartic_h.json"], 2),
    (["verify-iif", DATA / "cubic_cusp.json", "--w", DATA / "cubic_cusp_w.json",
      "--exponent", "one"], 2),
    (["frobnicate"], 2),
    ([], 2),
    # hypothesis or monodromy failures
    (["check-h", "--h", DATA / "x2y_h.json", "--type", "1,1"], 3),
    (["classify", DATA / "not_hamiltonian.json"], 3),
    (["classify", DATA / "repeated_factor.json"], 3),
    (["center", DATA / "cusp_aiif.json"], 3),
    (["center", DATA / "degenerate_quartic.json"], 3),
    # inconclusive center
    (["center", DATA / "harmonic.json"], 4),
])
def test_exit_codes(capsys, argv, expected):
    code, _, _ = run(capsys, *argv)
    assert code == expected


def test_every_exit_code_is_reachable(capsys):
    seen = {run(capsys, *a)[0] for a in (
        ["index-set", "--type", "3,4"], ["index-set", "--type", "2,4"],
        ["check-h", "--h", DATA / "x2y_h.json", "--type", "1,1"],
        ["center", DATA / "harmonic.json"])}
    assert seen == {0, 2, 3, 4}


def test_precondition_failure_still_reports(capsys):
    code, rep, err = run_json(capsys, "center", DATA / "cusp_aiif.json")
    assert code == 3
    assert "not monodromic" in err
    assert rep["monodromy"] == {"monodromic": False, "sign": 0}
    assert "error" in rep


def test_input_error_message(capsys):
    code, out, err = run(capsys, "classify", DATA / "float_coeff.json")
    assert code == 2 and out == ""
    assert "invalid input" in err


def test_duplicate_monomials_are_summed(capsys, tmp_path):
    p = tmp_path / "dup.json"
    p.write_text(json.dumps({"type": [1, 1],
                             "P": [{"x": 0, "y": 1, "c": "-1/2"}, {"x": 0, "y": 1, "c": "-1/2"}],
                             "Q": [{"x": 1, "y": 0, "c": "1"}], "truncation_degree": 4}))
    code, rep, _ = run_json(capsys, "classify", p)
    assert code == 0
    assert rep["system"]["P"] == [{"c": "-1", "x": 0, "y": 1}]


# -- individual commands ---------------------------------------------------------------

def test_index_set(capsys):
    _, rep, _ = run_json(capsys, "index-set", "--type", "3,4")
    assert rep["index_set_complement"] == [1, 2, 5]


def test_bases(capsys):
    _, rep, _ = run_json(capsys, "bases", "--type", "1,2", "--degree", "4")
    assert sorted(rep["basis"]) == sorted(["x^4", "x^2*y", "y^2"])


@pytest.mark.parametrize("hfile, t, monodromic, sign", [
    ("cusp_h.json", "3,4", False, 0),
    ("quartic_h.json", "1,1", True, 1),
])
def test_check_h(capsys, hfile, t, monodromic, sign):
    code, rep, _ = run_json(capsys, "check-h", "--h", DATA / hfile, "--type", t)
    assert code == 0
    hyp = rep["hypothesis"]
    assert hyp["h1"] and hyp["h2"]
    assert (hyp["monodromic"], hyp["sign"]) == (monodromic, sign)


def test_check_h_from_system(capsys):
    code, rep, _ = run_json(capsys, "check-h", "--system", DATA / "cusp_aiif.json")
    assert code == 0
    assert rep["h"]["text"] == "-1/3*y^3 + 1/4*x^4"


def test_check_h_x2y(capsys):
    code, rep, _ = run_json(capsys, "check-h", "--h", DATA / "x2y_h.json", "--type", "1,1")
    assert code == 3
    assert rep["hypothesis"]["h1"] is False


def test_classify_verdicts(capsys):
    _, rep, _ = run_json(capsys, "classify", DATA / "degenerate_quartic.json", "--degree", "14")
    assert rep["verdict"]["kind"] == "NoAIIF"
    assert rep["verdict"]["witness_degree"] == 5
    _, rep, _ = run_json(capsys, "classify", DATA / "cusp_aiif.json")
    assert rep["verdict"]["kind"] == "AIIF"
    assert rep["verdict"]["formal_iif"] is False
    assert "center" not in rep
    _, rep, _ = run_json(capsys, "classify", DATA / "harmonic.json")
    assert rep["verdict"]["kind"] == "IntegrableUpToD"


def test_classify_runs_center_stage(capsys):
    code, rep, _ = run_json(capsys, "classify", DATA / "quartic_focus.json")
    assert code == 0
    assert rep["verdict"]["kind"] == "AIIF"
    assert rep["center"]["verdict"] == "UnstableFocus"
    assert rep["center"]["I"]["approx"] > 0


def test_center_certificates(capsys):
    _, rep, _ = run_json(capsys, "center", DATA / "nilpotent_center.json")
    assert rep["center"]["verdict"] == "Center"
    assert rep["center"]["certificate"] == "parity"
    assert rep["center"]["sign"] == -1


def test_center_inconclusive(capsys):
    code, rep, _ = run_json(capsys, "center", DATA / "harmonic.json")
    assert code == 4
    assert rep["center"]["verdict"] == "Inconclusive"


def test_type_inference_adds_note(capsys, tmp_path):
    p = write_system(tmp_path, "untyped", {(0, 3): "-1", (5, 0): "1/4", (1, 4): "1/4"},
                     {(3, 0): "1", (4, 1): "1/4", (0, 5): "1/4"}, truncation_degree=8)
    code, rep, _ = run_json(capsys, "classify", p)
    assert code == 0
    assert rep["type"] == [1, 1]
    assert any("type" in n for n in rep["notes"])


@pytest.mark.parametrize("w, s, P, Q", [
    ({(0, 3): "4", (4, 0): "-3"}, "13/12",
     {(0, 2): "1", (3, 0): "1"}, {(3, 0): "1", (2, 1): "4/3"}),
    ({(0, 3): "1/3", (4, 0): "-1/4", (5, 0): "-3"}, "6/5",
     {(0, 2): "1", (1, 2): "60"}, {(3, 0): "1", (0, 3): "100"}),
    ({(4, 0): "1/4", (0, 4): "1/4"}, "1",
     {(0, 3): "-1"}, {(3, 0): "1"}),
])
def test_verify_iif_examples(capsys, tmp_path, w, s, P, Q):
    sysf = write_system(tmp_path, "sys", P, Q)
    wf = tmp_path / "w.json"
    wf.write_text(json.dumps({"w": [{"x": i, "y": j, "c": c} for (i, j), c in w.items()]}))
    code, rep, _ = run_json(capsys, "verify-iif", sysf, "--w", wf, "--exponent", s)
    assert code == 0
    assert rep["ok"] is True
    assert rep["defect"]["terms"] == []


def test_verify_iif_reports_defect(capsys):
    code, rep, _ = run_json(capsys, "verify-iif", DATA / "cubic_cusp.json",
                            "--w", DATA / "cubic_cusp_w.json", "--exponent", "7/6")
    assert code == 0
    assert rep["ok"] is False
    assert rep["defect"]["text"] == "4/3*x^2*y^3 - x^6"


def test_verify_iif_truncated(capsys):
    # the exact defect lives in degree 18, so a degree-17 check passes
    _, rep, _ = run_json(capsys, "verify-iif", DATA / "cubic_cusp.json",
                         "--w", DATA / "cubic_cusp_w.json", "--exponent", "7/6", "--degree", "17")
    assert rep["ok"] is True


# -- formats, batch and orbit output ---------------------------------------------------

def test_text_format(capsys):
    code, out, _ = run(capsys, "check-h", "--h", DATA / "quartic_h.json", "--type", "1,1",
                       "--format", "text")
    assert code == 0
    assert "monodromic: True" in out
    with pytest.raises(json.JSONDecodeError):
        json.loads(out)


@pytest.mark.parametrize("threads", ["1", "4"])
def test_batch(capsys, monkeypatch, threads):
    monkeypatch.setenv("QHFLOW_THREADS", threads)
    files = [DATA / "cusp_aiif.json", DATA / "harmonic.json", DATA / "float_coeff.json",
             DATA / "not_hamiltonian.json"]
    code, rep, _ = run_json(capsys, "classify", "--batch", *files)
    assert [r["file"] for r in rep["reports"]] == [str(f) for f in files]
    kinds = [r.get("verdict", {}).get("kind") for r in rep["reports"]]
    assert kinds == ["AIIF", "IntegrableUpToD", None, None]
    assert code == 3


def test_batch_independent_of_threads(capsys, monkeypatch):
    files = [DATA / "cusp_aiif.json", DATA / "quartic_focus.json", DATA / "cubic_cusp.json"]
    outs = []
    for n in ("1", "3"):
        monkeypatch.setenv("QHFLOW_THREADS", n)
        outs.append(run(capsys, "classify", "--batch", *files)[1])
    assert outs[0] == outs[1]


def test_emit_orbit(capsys, tmp_path):
    path = tmp_path / "orbit.csv"
    code, rep, _ = run_json(capsys, "center", DATA / "quartic_focus.json", "--emit-orbit", path)
    assert code == 0
    rows = list(csv.reader(path.open()))
    assert rows[0][:3] == ["theta", "cs", "sn"]
    assert len(rows) > 10
    th = [float(r[0]) for r in rows[1:]]
    assert th == sorted(th)
    assert th[-1] == pytest.approx(rep["center"]["period"]["approx"], rel=1e-9)
