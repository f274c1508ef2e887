import argparse
import csv
import io
import json
import subprocess
import sys

import pytest

from twistjones.cli import main, parse_range


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_parse_range():
    assert parse_range("5") == [5]
    assert parse_range("3,5,8") == [3, 5, 8]
    assert parse_range("2:6:2") == [2, 4, 6]
    assert parse_range("4:5") == [4, 5]
    for bad in ("5:1", "1:4:0", "1:2:3:4"):
        with pytest.raises((argparse.ArgumentTypeError, ValueError)):
            parse_range(bad)


def test_jones_N1(capsys):
    code, out = run(capsys, "jones", "--p", "6", "--N", "1")
    rec = json.loads(out)
    assert code == 0
    assert rec["value"] == {"re": 1.0, "im": 0.0}
    assert rec["p"] == 6 and rec["N"] == 1
    assert rec["meta"]["precision"] == "machine-double"
    assert "newton_tol" in rec["meta"]["tolerances"]
    assert rec["meta"]["paper_refs"]


def test_constants_p100(capsys):
    code, out = run(capsys, "constants", "--p", "100")
    rec = json.loads(out)
    assert code == 0
    assert abs(rec["value"]["re"] - 3.6636144) < 1e-6
    assert abs(rec["value"]["im"] + 1043.809608) < 1e-6


def test_critical_and_volume(capsys):
    _, out = run(capsys, "critical", "--p", "100")
    t0 = json.loads(out)["data"]["t0"]
    assert abs(t0["re"] - 0.8237997818) < 1e-9
    _, out = run(capsys, "volume", "--p", "6")
    rec = json.loads(out)
    assert abs(rec["data"]["volume"] - rec["data"]["two_pi_zeta_R"]) < 1e-8


def test_lemmas_hessian_passes(capsys):
    code, out = run(capsys, "lemmas", "--suite", "hessian")
    rec = json.loads(out)
    assert code == 0 and rec["data"]["passed"] is True


def test_lemmas_region_reports_each_check(capsys):
    code, out = run(capsys, "lemmas", "--suite", "region", "--grid", "200", "--p-range", "6:11")
    recs = json.loads(out)
    names = {r["data"]["check"]: r["data"]["passed"] for r in recs}
    assert names["high-region-in-Dprime0"] is True
    assert names["U0-vertex-lines p=10"] is True
    assert names["U0-in-Ddoubleprime0 p=10"] is True
    # the exit status reflects the failing inclusions below p = 10
    assert code == (0 if all(names.values()) else 1)


def test_fourier_command(capsys):
    code, out = run(capsys, "fourier", "--p", "6", "--N", "8", "--n", "-1")
    rec = json.loads(out)
    assert code == 0
    assert rec["data"]["n"] == -1
    assert abs(complex(rec["value"]["re"], rec["value"]["im"])) <= rec["data"]["quad_error"]
    assert rec["meta"]["tolerances"]["fourier_rel_tol"] == 1e-8


def test_verify_asymptotics_csv(capsys):
    code, out = run(capsys, "verify-asymptotics", "--p", "6", "--N", "10,20", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert list(rows[0]) == ["N", "re_logJ_scaled", "target", "gap"]
    assert [int(r["N"]) for r in rows] == [10, 20]
    for r in rows:
        assert float(r["gap"]) == pytest.approx(float(r["re_logJ_scaled"]) - float(r["target"]))


def test_csv_is_projection_of_json(capsys):
    _, js = run(capsys, "jones", "--p", "7", "--N", "3:5")
    _, cs = run(capsys, "jones", "--p", "7", "--N", "3:5", "--format", "csv")
    recs = json.loads(js)
    rows = list(csv.DictReader(io.StringIO(cs)))
    assert len(rows) == len(recs) == 3
    for rec, row in zip(recs, rows):
        assert float(row["value_re"]) == rec["value"]["re"]
        assert float(row["value_im"]) == rec["value"]["im"]
        assert int(row["N"]) == rec["N"]


def test_output_file_and_determinism(tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for path in paths:
        assert main(["constants", "--p", "9", "-o", str(path)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_determinism_across_processes():
    cmd = [sys.executable, "-m", "twistjones.cli", "jones", "--p", "6", "--N", "4,9"]
    outs = [subprocess.run(cmd, capture_output=True, check=True).stdout for _ in range(2)]
    assert outs[0] == outs[1] and outs[0]


def test_error_json(capsys):
    code, out = run(capsys, "jones", "--p", "6", "--N", "0")
    err = json.loads(out)["error"]
    assert code == 2
    assert err["type"] == "DomainError" and err["command"] == "jones"
    code, out = run(capsys, "constants", "--p", "3")
    assert code == 2 and "p >= 6" in json.loads(out)["error"]["message"]


def test_precision_flag_and_environment(capsys, monkeypatch):
    _, out = run(capsys, "jones", "--p", "6", "--N", "5", "--precision", "extended")
    assert json.loads(out)["meta"]["precision"] == "extended"
    monkeypatch.setenv("TWISTJONES_PRECISION", "extended")
    _, out = run(capsys, "jones", "--p", "6", "--N", "5")
    assert json.loads(out)["meta"]["precision"] == "extended"


def test_bad_arguments_exit_nonzero(capsys):
    with pytest.raises(SystemExit) as info:
        main(["jones", "--p", "6"])
    assert info.value.code != 0
