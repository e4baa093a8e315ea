import csv
import io
import json
import math

import pytest

from wiltonlab.cli import main

A1 = 1.260661401507812623


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cf_expand(capsys):
    code, out, _ = run(capsys, "cf", "expand", "2/7")
    rec = json.loads(out)
    assert code == 0
    assert rec["quotients"] == [3, 2] and rec["depth"] == 2
    assert rec["convergents"][-1] == {"p": 2, "q": 7}


def test_cf_orbit_golden(capsys):
    code, out, _ = run(capsys, "cf", "orbit", "golden", "--depth", "5")
    rec = json.loads(out)
    assert code == 0 and rec["quotients"] == [1] * 5
    assert "orbit" in rec


def test_eval_A(capsys):
    code, out, _ = run(capsys, "eval", "--fn", "A", "--x", "1")
    rec = json.loads(out)
    assert code == 0 and abs(rec["value"] - A1) < 1e-4
    code, out, _ = run(capsys, "eval", "--fn", "A", "--x", "1", "--method", "phi2")
    assert json.loads(out)["method"] == "via_phi2"


def test_eval_wilton_rational(capsys):
    code, out, _ = run(capsys, "eval", "--fn", "W", "--x", "1/5")
    assert json.loads(out)["value"] == math.log(5)


def test_eval_bad_x(capsys):
    with pytest.raises(SystemExit):
        main(["eval", "--fn", "W", "--x", "banana"])


def test_eval_domain_error_exit_code(capsys):
    code, _, err = run(capsys, "eval", "--fn", "F", "--x", "3/2")
    assert code == 2 and "error" in err


def test_oracle_landau(capsys):
    code, out, _ = run(capsys, "oracle", "landau", "--max", "4")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "1 1 1/12 PASS" and lines[-1] == "PASS: 16/16"


def test_table_csv(capsys, tmp_path):
    f = tmp_path / "a.csv"
    code, _, _ = run(capsys, "table", "--fn", "A", "--from", "0.5", "--to", "1", "--n", "3",
                     "--file", str(f))
    assert code == 0
    raw = f.read_bytes()
    assert raw.count(b"\r\n") == 4
    rows = list(csv.reader(io.StringIO(raw.decode())))
    assert rows[0] == ["lambda", "value", "err", "method"]
    assert float(rows[3][0]) == 1.0 and abs(float(rows[3][1]) - A1) < 1e-4


def test_table_json(capsys):
    code, out, _ = run(capsys, "table", "--fn", "delta-div", "--from", "1", "--to", "3", "--step", "1",
                       "--out", "json")
    rec = json.loads(out)
    assert code == 0 and [r["x"] for r in rec["rows"]] == [1.0, 2.0, 3.0]


def test_check_text_and_json(capsys):
    code, out, _ = run(capsys, "check", "--suite", "landau")
    assert code == 0 and out.startswith("PASS landau: 900/900")
    code, out, _ = run(capsys, "check", "--suite", "cf-identities", "--out", "json")
    assert code == 0 and json.loads(out)["suite"] == "cf-identities"


def test_check_exit_code_on_failure(capsys, tmp_path, monkeypatch):
    from wiltonlab import config
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"sylvester_C": 1e-6}))
    monkeypatch.setenv(config.ENV_VAR, str(bad))
    config.constants.cache_clear()
    try:
        code, out, _ = run(capsys, "check", "--suite", "phi1-sylvester")
    finally:
        monkeypatch.delenv(config.ENV_VAR)
        config.constants.cache_clear()
    assert code == 1 and out.startswith("FAIL phi1-sylvester")


def test_calibrate(capsys, tmp_path):
    out_file = tmp_path / "k.json"
    code, out, _ = run(capsys, "calibrate", "--name", "F-sup", "--out", str(out_file))
    assert code == 0 and "F_sup" in json.loads(out_file.read_text())
