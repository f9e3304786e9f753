import json
import subprocess
import sys

import pytest

from ellface import cli
from ellface.errors import ConfigError


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_special_passes(tmp_path, capsys):
    out = tmp_path / "rep.json"
    code, _, err = run(["verify", "--suite", "special", "--seed", "42", "--out", str(out)], capsys)
    assert code == cli.EXIT_PASS, err
    rep = json.loads(out.read_text())
    assert rep["schema"] == cli.SCHEMA_NAME and rep["schema_version"] == 1
    assert rep["summary"]["failed"] == 0 and rep["summary"]["total"] == len(rep["records"])
    rec = rep["records"][0]
    assert set(rec) >= {"check_id", "reference", "parameters", "residual", "tolerance", "passed", "wall_time_ms"}
    assert all(r["reference"] for r in rep["records"])
    assert rec["wall_time_ms"] is None


def test_rmatrix_defaults(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, _, _ = run(["verify", "--suite", "rmatrix", "--seed", "42", "--out", str(out)], capsys)
    rep = json.loads(out.read_text())
    assert code == 0 and rep["summary"]["worst_residual"] < 1e-8


def test_same_seed_same_bytes(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        run(["verify", "--suite", "currents", "--seed", "5", "--out", str(p)], capsys)
    assert a.read_bytes() == b.read_bytes()


def test_different_seed_different_points(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(["verify", "--suite", "special", "--seed", "1", "--out", str(a)], capsys)
    run(["verify", "--suite", "special", "--seed", "2", "--out", str(b)], capsys)
    assert a.read_bytes() != b.read_bytes()


def test_no_overwrite(tmp_path, capsys):
    out = tmp_path / "rep.json"
    out.write_text("keep")
    code, _, err = run(["verify", "--suite", "special", "--out", str(out)], capsys)
    assert code == cli.EXIT_CONFIG and out.read_text() == "keep"


def test_small_r(capsys):
    code, _, err = run(["verify", "--suite", "special", "--r", "3"], capsys)
    assert code == cli.EXIT_CONFIG and "allow-small-r" in err
    code, out, _ = run(["verify", "--suite", "special", "--r", "3", "--allow-small-r"], capsys)
    assert code == cli.EXIT_PASS and json.loads(out)["params"]["r"] == 3.0


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sample\nx = 0.25\nr = 7   # level\ntarget_tol = 1e-15\n")
    code, out, _ = run(["verify", "--suite", "special", "--config", str(cfg)], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["params"]["x"] == 0.25 and rep["params"]["r"] == 7.0
    assert rep["truncation"]["target_tol"] == 1e-15


def test_config_flag_overrides_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("r = 7\n")
    _, out, _ = run(["verify", "--suite", "special", "--config", str(cfg), "--r", "8"], capsys)
    assert json.loads(out)["params"]["r"] == 8.0


@pytest.mark.parametrize("text", ["bogus = 1\n", "r = abc\n", "max_modes = 1.5\n", "r = 6+1j\n"])
def test_bad_config(tmp_path, capsys, text):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(text)
    code, _, _ = run(["verify", "--suite", "special", "--config", str(cfg)], capsys)
    assert code == cli.EXIT_CONFIG


def test_missing_config(capsys):
    code, _, _ = run(["verify", "--config", "/nonexistent/run.cfg"], capsys)
    assert code == cli.EXIT_CONFIG


def test_env_override(monkeypatch, capsys):
    monkeypatch.setenv("ELLFACE_MAX_SUM", "1234")
    _, out, _ = run(["verify", "--suite", "special"], capsys)
    assert json.loads(out)["truncation"]["max_sum_terms"] == 1234
    monkeypatch.setenv("ELLFACE_TOL", "nope")
    code, _, _ = run(["verify", "--suite", "special"], capsys)
    assert code == cli.EXIT_CONFIG


def test_failing_check_exit_one(monkeypatch, capsys):
    # a truncation cap too small to converge turns checks into failures
    monkeypatch.setenv("ELLFACE_MAX_PRODUCT", "3")
    code, out, _ = run(["verify", "--suite", "special"], capsys)
    rep = json.loads(out)
    assert code == cli.EXIT_FAIL and rep["summary"]["failed"] > 0 and rep["summary"]["errors"] > 0


def test_timings_flag(capsys):
    _, out, _ = run(["verify", "--suite", "special", "--timings"], capsys)
    assert all(r["wall_time_ms"] >= 0 for r in json.loads(out)["records"])


def test_usage_error(capsys):
    assert cli.main(["verify", "--suite", "nope"]) == cli.EXIT_CONFIG
    assert cli.main([]) == cli.EXIT_CONFIG


class TestEval:
    def value(self, argv, capsys):
        code, out, _ = run(["eval"] + argv, capsys)
        assert code == 0
        d = json.loads(out)
        return complex(*d["value"]), d["error_estimate"]

    def test_bracket_zero(self, capsys):
        v, err = self.value(["bracket", "0", "6"], capsys)
        assert v == 0 and err == 0

    def test_kappa_zero(self, capsys):
        v, err = self.value(["kappa", "0"], capsys)
        assert abs(v - 1) < 1e-12 and err < 1e-12

    def test_weight(self, capsys):
        v, err = self.value(["weight", "a", "0.8", "2.5"], capsys)
        assert abs(v - 5.472526199565409) < 1e-12 and 0 <= err < 1e-8

    def test_parameters(self, capsys):
        v, _ = self.value(["bracket", "0.3", "6", "--x", "0.2"], capsys)
        from ellface import ModelParams
        from ellface.special_functions import bracket
        assert v == complex(bracket(0.3, 6, ModelParams(x=0.2)))

    def test_negative_argument(self, capsys):
        a, _ = self.value(["bracket", "m0.3", "6"], capsys)
        b, _ = self.value(["bracket", "0.3", "6"], capsys)
        assert abs(a + b) < 1e-14
        c, _ = self.value(["bracket", "--", "-0.3", "6"], capsys)
        assert c == a

    def test_unknown(self, capsys):
        code, _, _ = run(["eval", "nope"], capsys)
        assert code == cli.EXIT_CONFIG
        code, _, _ = run(["eval", "bracket", "1"], capsys)
        assert code == cli.EXIT_CONFIG


def test_make_params_direct():
    params, trig, cfg = cli.make_params({"x": "0.3+0.1j", "c": "2", "eta": "0.1"})
    assert params.x == 0.3 + 0.1j and params.c == 2.0 and trig.eta == 0.1 and trig.c == 2.0
    with pytest.raises(ConfigError):
        cli.make_params({"r": "4"})


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "ellface", "eval", "kappa", "0"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["value"][0] == 1.0
