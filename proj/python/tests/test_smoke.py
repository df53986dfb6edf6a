import os
import pathlib

import pytest

import confreach

ROOT = pathlib.Path(os.environ.get("CONFREACH_SOURCE_DIR", pathlib.Path(__file__).resolve().parents[2]))
DRIFT = str(ROOT / "configs" / "theta_drift.json")


def test_poly_round_trip():
    p = confreach.parse_poly("x1^2*theta1 - 0.5*x1 + 3")
    assert confreach.parse_poly(str(p)) == p
    assert p.evaluate([2.0, 1.0]) == pytest.approx(6.0)
    assert p.degree() == 3


def test_bad_poly_raises():
    with pytest.raises(ValueError):
        confreach.parse_poly("x1^")


def test_relaxation_summary():
    r = confreach.solve_relaxation(DRIFT, degree=4)
    assert r["status"] == "optimal"
    assert r["objective"] >= 1.0
    # w over-approximates the reach indicator: w(0, 0) >= 1
    assert r["w"].evaluate([0.0, 0.0]) >= 1.0 - 1e-6


def test_alpha_set_contains_reaching_core():
    s = confreach.alpha_set(DRIFT, 0.2, degree=4)
    lo, hi = s["intervals"][0] if len(s["intervals"]) == 1 else max(s["intervals"], key=lambda iv: iv[1] - iv[0])
    assert lo <= -0.85 and hi >= 0.85
    assert s["area"] > 1.7


def test_empirical_confidence_at_origin():
    p, hw = confreach.empirical_confidence(DRIFT, [[0.0], [2.0]], samples=400)
    assert abs(p[0] - 0.25) <= 4 * (0.25 * 0.75 / 400) ** 0.5
    assert p[1] == 0.0


def test_export_starts_with_constraint_count():
    text = confreach.export_standard_form(DRIFT, degree=2)
    assert int(text.split()[0]) > 0


def test_config_error_exit_code(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(open(DRIFT).read().replace('"degree": 8', '"degree": 7'))
    assert confreach.cmd_solve(str(bad), out=str(tmp_path / "out")) == 1
    with pytest.raises(confreach.ConfigError):
        confreach.solve_relaxation(str(bad))


def test_export_verb(tmp_path):
    assert confreach.cmd_export(DRIFT, out=str(tmp_path), degree=4) == 0
    assert (tmp_path / "problem.dat-s").exists()
