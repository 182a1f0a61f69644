import csv
import io
import json

import jsonschema
import pytest

import cvsynth
from cvsynth import cli
from cvsynth.errors import UnknownTable

SCHEMA = cvsynth.report_schema()


def run(argv):
    buf = io.StringIO()
    code = cli.run(argv, stdout=buf)
    return code, buf.getvalue()


def run_json(argv):
    code, text = run(argv)
    rep = json.loads(text)
    jsonschema.validate(rep, SCHEMA)
    return code, rep


def test_unknown_command_exits_2(capsys):
    code, _ = run(["frobnicate"])
    assert code == 2
    assert "usage" in capsys.readouterr().err


def test_missing_required_flag_exits_2():
    assert run(["plan-kerr"])[0] == 2


def test_plan_kerr_report():
    code, rep = run_json(["plan-kerr", "--y", "0.1"])
    assert code == 0
    plan = rep["outputs"]["plan"]
    assert (plan["p"], plan["k"], plan["l"]) == (18, 2, 8)
    quantities = {d["quantity"] for d in rep["discrepancies"]}
    assert "asymptotic gate count" in quantities
    assert "angle c2" in quantities
    assert set(rep["sources"]) == set(rep["outputs"])


def test_plan_kerr_floor_reproduces_angles():
    _, rep = run_json(["plan-kerr", "--y", "0.1", "--p-rounding", "floor"])
    assert not any(d["quantity"].startswith("angle") for d in rep["discrepancies"])


def test_plan_kerr_materialize_cap():
    assert run(["plan-kerr", "--y", "0.1", "--materialize", "--cap", "1000"])[0] == 2


def test_decompose_reports_residual():
    code, rep = run_json(["decompose", "--gate", "beamsplitter", "--param", "0.3"])
    assert code == 0
    assert rep["outputs"]["residual"] < 1e-12
    assert len(rep["outputs"]["gates"]) == 15


def test_gkp_row_and_curve(tmp_path):
    out = tmp_path / "wave.csv"
    code, rep = run_json(["gkp", "--m", "2", "--eta", "1e-3", "--curve", str(out), "--points", "50"])
    assert code == 0
    row = rep["outputs"]["row"]
    assert row["ratio"] == "35/8"
    assert row["success_probability"] == pytest.approx(row["success_probability_closed_form"])
    lines = out.read_text().splitlines()
    assert lines[0] == "q,binomial,gaussian" and len(lines) == 51


def test_gkp_grid_cross_check():
    code, rep = run_json(["gkp", "--m", "1", "--eta", repr(3.141592653589793**0.5 / 316), "--grid"])
    assert code == 0
    assert rep["outputs"]["grid"]["fidelity"] > 0.999


def test_gkp_flags_quoted_squeezing_at_m6():
    code, rep = run_json(["gkp", "--m", "6", "--eta", "1e-6"])
    assert code == 0
    (d,) = rep["discrepancies"]
    assert d["quantity"] == "squeezing_db" and d["reference_value"] == "19"
    assert round(d["computed_value"], 2) == 20.02


def test_ft_budget_cviqp():
    code, rep = run_json(["ft-budget", "--model", "cviqp", "--eps-th", "1e-6", "--y", "1e-3"])
    assert code == 0
    assert rep["outputs"]["minimal_m"]["m_min"] == 5
    assert rep["outputs"]["minimal_m"]["caveat"]


def test_ft_budget_universal_flags_mismatches():
    _, rep = run_json(["ft-budget", "--y", "0.1"])
    assert rep["outputs"]["p_succ"] == pytest.approx(0.97, abs=0.01)
    assert "d" in {d["quantity"] for d in rep["discrepancies"]}


def test_gkp_binom_table():
    code, text = run(["tables", "--name", "gkp-binom"])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(text)))
    assert [int(r["m"]) for r in rows] == [1, 2, 3, 4]
    assert [round(float(r["squeezing_db"])) for r in rows] == [5, 8, 11, 14]
    assert rows[0]["overlap"] == "0.997636"
    assert "\r" not in text and text.endswith("\n")


@pytest.mark.parametrize("name", ["params-universal", "params-cviqp"])
def test_param_tables_have_flags(name):
    rows = list(csv.DictReader(io.StringIO(run(["tables", "--name", name])[1])))
    assert [r["symbol"] for r in rows] == ["d", "s1", "s2", "b1", "b2", "c1", "c2"]
    assert {r["match"] for r in rows} <= {"true", "false"}


def test_tables_bit_stable():
    assert run(["tables", "--name", "params-cviqp"])[1] == run(["tables", "--name", "params-cviqp"])[1]


def test_unknown_table():
    assert run(["tables", "--name", "nope"])[0] == 2
    with pytest.raises(UnknownTable):
        cli.emit_table("nope")


def test_psucc_curve():
    text = run(["curves", "--name", "psucc-vs-y", "--points", "7"])[1]
    assert text.splitlines()[0] == "y,p_succ_literal,p_succ_gaussian_tail"
    assert len(text.splitlines()) == 8


def test_sample_writes_csv(tmp_path):
    out = tmp_path / "runs.csv"
    argv = ["sample", "--model", "cviqp", "--modes", "1", "--depth", "8", "--K", "8", "--shots", "1000",
            "--seed", "7", "--out", str(out)]  # fmt: skip
    code, rep = run_json(argv)
    assert code == 0
    first = out.read_text()
    lines = first.splitlines()
    assert lines[0] == "shot,mode,bin_index,bin_center" and len(lines) == 1001
    assert not any(g["kind"] == "fourier" for g in rep["outputs"]["circuit"]["gates"])
    run(argv)
    assert out.read_text() == first


def test_verify_quick():
    code, rep = run_json(["verify", "--quick"])
    assert code == 0
    assert rep["outputs"]["failed"] == []


def test_verify_failure_exits_3(monkeypatch):
    monkeypatch.setattr(cli, "verify_checks", lambda quick=False: [{"name": "x", "value": 1, "tolerance": 0, "passed": False}])
    assert run(["verify"])[0] == 3


def test_config_defaults_and_override(tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text("y = 0.1\n\n[plan-kerr]\np-rounding = floor\n")
    _, rep = run_json(["--config", str(cfg), "plan-kerr"])
    assert rep["outputs"]["plan"]["p"] == 17
    _, rep = run_json(["--config", str(cfg), "plan-kerr", "--p-rounding", "ceil"])
    assert rep["outputs"]["plan"]["p"] == 18


def test_config_unknown_key(tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text("bogus = 1\n")
    assert run(["--config", str(cfg), "plan-kerr", "--y", "0.1"])[0] == 2


def test_out_file(tmp_path):
    out = tmp_path / "r.json"
    code, text = run(["plan-kerr", "--y", "0.2", "--out", str(out)])
    assert code == 0 and text == ""
    jsonschema.validate(json.loads(out.read_text()), SCHEMA)
