import json
import subprocess
import sys

import pytest

from sqpow2 import cli


def run(capsys, *argv):
    rc = cli.main(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


def test_order(capsys):
    rc, out, _ = run(capsys, "order", "--q", "15015")
    assert rc == 0 and json.loads(out) == {"q": 15015, "rho": 60}


def test_bad_input_exit_code(capsys):
    rc, _, err = run(capsys, "order", "--q", "8")
    assert rc == cli.EXIT_ERROR
    assert json.loads(err)["error"] == "DomainError"


def test_pcc_and_beta(capsys):
    rc, out, _ = run(capsys, "pcc", "--q", "3", "--t", "7")
    assert rc == 0 and json.loads(out)["n"] == 5462
    rc, out, _ = run(capsys, "beta", "--d", "1")
    assert json.loads(out)["beta"] == "8192/2731"


def test_bbold_and_local_factor(capsys):
    rc, out, _ = run(capsys, "bbold", "--p", "5", "--h", "1")
    d = json.loads(out)
    assert d["counted"] == d["closed_form"] == -176 and d["agree"]
    rc, out, _ = run(capsys, "local-factor", "--n", "4", "--p", "3")
    assert json.loads(out)["B"] == 32


def test_dyadic_and_sumA(capsys):
    rc, out, _ = run(capsys, "dyadic-factor", "--k", "10")
    assert json.loads(out)["value"] == "4"
    rc, out, _ = run(capsys, "sumA", "--p", "13")
    assert json.loads(out)["holds"] is True


def test_rt_csv(capsys):
    rc, out, _ = run(capsys, "rt", "--t", "1", "--L", "6", "--csv")
    rows = [line.split(",") for line in out.strip().splitlines()]
    assert rows[0] == ["h", "r_t"]
    assert ["0", "3"] in rows and ["16", "1"] in rows


def test_sum_r7(capsys):
    rc, out, _ = run(capsys, "sum-r7", "--L", "10", "--mode", "lemma43")
    d = json.loads(out)
    assert rc == 0 and d["symmetric"] and d["zero_unless_3"]
    rc, _, _ = run(capsys, "sum-r7", "--L", "30")
    assert rc == cli.EXIT_ERROR


def test_mratio_exit(capsys):
    rc, out, _ = run(capsys, "mratio", "--xmax", "20")
    assert rc == 0
    assert json.loads(out)[0]["x"] == 3


def test_lemmaj_and_integral(capsys):
    rc, out, _ = run(capsys, "lemmaj", "--P", "2")
    assert json.loads(out) == {"P": 2, "J_total": "33", "J_diag": "25", "J_offdiag": "8"}
    rc, out, _ = run(capsys, "integral", "--kind", "I", "--h", "1", "--eta", "0.01")
    lo, hi = json.loads(out)["value"]
    assert lo <= 5.34e-6 and hi >= 5.33e-6


def test_margin_printed(capsys):
    rc, out, _ = run(capsys, "margin", "--c0", "0.69")
    d = json.loads(out)
    assert d["minimal_k"] == 44


def test_verify_all_small_config(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    out_path = tmp_path / "report.json"
    cfg.write_text(json.dumps({"M": 20, "L_values": [10], "residue_samples": 2, "output_path": str(out_path)}))
    rc, out, _ = run(capsys, "verify-all", "--config", str(cfg))
    rep = json.loads(out)
    assert rep["config"]["M"] == 20
    assert "timing_ms" not in rep
    assert json.loads(out_path.read_text()) == rep
    assert rc == (0 if rep["overall"] == "pass" else 2)
    # deterministic apart from timing
    rc2, out2, _ = run(capsys, "verify-all", "--config", str(cfg))
    assert out2 == out


def test_verify_all_rejects_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"nope": 1}))
    rc, _, err = run(capsys, "verify-all", "--config", str(cfg))
    assert rc == cli.EXIT_ERROR


def test_verdict_recompute():
    e = cli.Entry("x", 0.1, 0.2, 0.69, "<", "pass")
    assert cli.recompute_verdict(e) == "pass"
    e = cli.Entry("x", 0.5, 0.8, 0.69, "<", "fail")
    assert cli.recompute_verdict(e) == "fail"


def test_console_script():
    res = subprocess.run([sys.executable, "-m", "sqpow2.cli", "order", "--q", "7"], capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["rho"] == 3


def test_verify_all_failure_exit_code(tmp_path, capsys):
    # M = 12 leaves a tail term large enough to push c0 above 0.69
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"M": 12, "L_values": [10], "residue_samples": 1}))
    rc, out, _ = run(capsys, "verify-all", "--config", str(cfg), "--timing")
    rep = json.loads(out)
    assert rep["overall"] == "fail" and rc == cli.EXIT_FAIL
    assert "timing_ms" in rep
    c0 = next(e for e in rep["entries"] if e["name"] == "c0")
    assert c0["verdict"] == "fail" and c0["lo"] > 0.69
