import csv
import io
import json
import math
from fractions import Fraction

import pytest

from wiltonlab import harness as h
from wiltonlab.config import shipped


def test_case_helpers():
    c = h.case({"x": 1}, 1.0, 1.0 + 1e-10, 1e-9)
    assert c.passed and c.residual == pytest.approx(-1e-10)
    assert not h.case({}, float("nan"), 0.0, 1.0).passed
    assert h.upper({}, 0.5, 1.0).passed and not h.upper({}, 1.5, 1.0).passed
    assert h.upper({}, 1.5, 1.0).residual == 0.5
    e = h.exact({}, Fraction(1, 3), Fraction(2, 6))
    assert e.passed and e.inputs["lhs_exact"] == "1/3"


def test_unknown_suite():
    with pytest.raises(ValueError, match="unknown suite"):
        h.run_suite("nope")


def test_report_json_roundtrip():
    rep = h.run_suite("landau", {"max": 6})
    text = rep.to_json()
    data = json.loads(text)
    assert data["schema"] == 1 and data["suite"] == "landau"
    assert set(data["cases"][0]) == {"inputs", "lhs", "rhs", "residual", "bound", "pass"}
    back = h.CheckReport.from_json(text)
    assert back == rep
    assert back.to_json() == text


def test_report_json_rejects_other_schema():
    text = json.dumps({"schema": 2, "suite": "x", "cases": [], "frozen_constants": {}})
    with pytest.raises(ValueError, match="schema"):
        h.CheckReport.from_json(text)


def test_report_csv_format():
    rep = h.run_suite("landau", {"max": 3})
    text = rep.to_csv()
    assert text.endswith("\r\n") and "\n" not in text.replace("\r\n", "")
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["suite", "case", "inputs", "lhs", "rhs", "residual", "bound", "pass"]
    assert len(rows) == 1 + len(rep.cases)
    for row in rows[1:]:
        assert row[7] in ("true", "false")
        assert float(row[3]) == float(format(float(row[3]), ".17g"))
        json.loads(row[2])


def test_reports_deterministic():
    a = h.run_suite("cf-identities").to_json()
    b = h.run_suite("cf-identities").to_json()
    assert a == b


@pytest.mark.parametrize("name", ["cf-identities", "landau", "A-reflection", "gauss-invariance"])
def test_fast_suites_pass(name):
    rep = h.run_suite(name)
    assert rep.cases and rep.passed, [c.to_dict() for c in rep.failures]
    assert rep.frozen_constants["schema"] == 1


def test_gauss_branches_closed_form():
    # each branch is the integral of f(1/t - k)/(1 + t) over [1/(k+1), 1/k]
    from scipy import integrate
    for f, fn in (("t", lambda t: t), ("log", lambda s: -math.log(s) if s > 0 else 0.0)):
        for k in (1, 2, 7, 50):
            want = integrate.quad(lambda t: fn(1 / t - k) / (1 + t), 1 / (k + 1), 1 / k,
                                  epsabs=1e-14, epsrel=1e-13)[0]
            assert h.gauss_branch(f, k) == pytest.approx(want, rel=1e-10, abs=1e-15)


def test_phi1_rational_oracle_small_case():
    # phi1(1/2) = 0, phi1(1/3) from the digamma formula
    assert h.phi1_rational(Fraction(1, 2)) == pytest.approx(0.0, abs=1e-15)
    assert h.phi1_rational(Fraction(1, 3)) == pytest.approx(-0.10076663134634543614, abs=1e-13)


def test_calibrate_writes_only_target(tmp_path):
    before = shipped()
    out = tmp_path / "c.json"
    res = h.calibrate("F-sup", str(out))
    data = json.loads(out.read_text())
    assert data["schema"] == 1
    assert data["F_sup"] == res["F_sup"] >= res["F_sup_measured"]
    assert shipped() == before
    with pytest.raises(ValueError):
        h.calibrate("nope")


def test_shipped_constants_cover_measurements():
    c = shipped()
    for key, _, margin in h.CALIBRATIONS.values():
        assert c[key] >= c[key + "_measured"]
