import csv
import json
import shutil
import subprocess
import sys
from importlib import resources
from pathlib import Path

import jsonschema
import pytest

from diracflow import cli, parse

GOLDEN = Path(__file__).parent / "golden"
SCHEMA = json.loads(resources.files("diracflow").joinpath("data/report.schema.json").read_text())


def run(*argv):
    return cli.main([str(a) for a in argv])


def load(path):
    report = json.loads(Path(path).read_text())
    jsonschema.validate(report, SCHEMA)
    return report


def test_golden_files_match():
    assert run("series", "--golden-dir", GOLDEN) == 0


def test_bless_and_mismatch(tmp_path):
    gdir = tmp_path / "g"
    shutil.copytree(GOLDEN, gdir)
    assert run("series", "--golden-dir", gdir) == 0
    (gdir / "h_4.txt").write_text("E\n")
    assert run("series", "--golden-dir", gdir) == 1
    assert run("series", "--what", "h", "--golden-dir", gdir, "--bless") == 0
    assert (gdir / "h_4.txt").read_text() == (GOLDEN / "h_4.txt").read_text()


def test_missing_golden_is_failure(tmp_path):
    assert run("series", "--what", "h", "--golden-dir", tmp_path) == 1


def test_series_writes_one_file_per_order(tmp_path):
    assert run("series", "--what", "omega", "--max-order", 2, "--output-path", tmp_path) == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == ["omega_1.txt", "omega_2.txt"]
    assert (tmp_path / "omega_2.txt").read_text() == "0\n"
    assert parse((tmp_path / "omega_1.txt").read_text()) == parse("(-2*exp[-4s])*b*O")


def test_series_json_format(tmp_path):
    assert run("series", "--what", "h", "--max-order", 2, "--output-format", "json", "--output-path", tmp_path) == 0
    doc = json.loads((tmp_path / "h_2.json").read_text())
    assert {t["beta"] for t in doc["terms"]} == {0, 1}


def test_series_field_f(tmp_path):
    assert run("series", "--what", "h", "--max-order", 2, "--field", "F", "--output-path", tmp_path) == 0
    assert "F" in (tmp_path / "h_2.txt").read_text()


def test_verify_symbolic_default(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert run("verify-symbolic", "--output-path", out) == 0
    rep = load(out)
    assert rep["pass"] and rep["check"] == "verify-symbolic"
    assert all(v["status"] == "holds" for v in rep["values"].values())


def test_verify_symbolic_single_check(tmp_path):
    out = tmp_path / "r.json"
    assert run("verify-symbolic", "--only", "cancellation", "--n", 3, "--output-path", out) == 0
    assert list(load(out)["values"]) == ["cancellation-3"]


def test_verify_symbolic_perturbation(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert run("verify-symbolic", "--inject-perturbation", "1/1000", "--output-path", out) == 1
    rep = load(out)
    assert not rep["pass"]
    assert rep["values"]["discrepancy"]["status"] == "fails"
    assert rep["values"]["discrepancy"]["residual"] == "-(1/1000)*b*O^6"


def test_verify_symbolic_unknown_check(tmp_path):
    assert run("verify-symbolic", "--only", "nonsense", "--output-path", tmp_path / "r.json") == 1


def test_verify_numeric_default(tmp_path):
    out = tmp_path / "n.json"
    assert run("verify-numeric", "--output-path", out) == 0
    rep = load(out)
    assert rep["pass"] and (rep["dim"], rep["seed"], rep["kappa"]) == (8, 1, 0.2)
    assert 7.5 <= rep["values"]["slope_6"] <= 8.5


def test_verify_numeric_zero_coupling(tmp_path):
    out = tmp_path / "n.json"
    assert run("verify-numeric", "--dim", 4, "--kappa", 0, "--no-sweeps", "--output-path", out) == 0
    vals = load(out)["values"]
    for key in ("z_involution", "t_vs_ue", "nw_commutator", "riccati_residual"):
        assert vals[key] < 1e-12


def test_verify_numeric_special_class(tmp_path):
    out = tmp_path / "n.json"
    assert run("verify-numeric", "--special-class", "--no-sweeps", "--output-path", out) == 0
    vals = load(out)["values"]
    assert vals["special_class_z0_vs_z"] <= 1e-8


def test_degenerate_exit_code(tmp_path, monkeypatch):
    from diracflow import matrixlab

    monkeypatch.setattr(matrixlab, "SPECTRAL_GAP", 1e9)
    assert run("verify-numeric", "--no-sweeps", "--output-path", tmp_path / "n.json") == 3
    assert run("flow", "--output-path", tmp_path) == 3


def test_nonconvergent_exit_code(monkeypatch):
    from diracflow.expoly import NonConvergent

    def boom(*a, **k):
        raise NonConvergent("s*exp[0s]")

    monkeypatch.setattr(cli, "omega_u_limit", boom)
    assert run("series", "--what", "Omega-inf", "--output-path", "-") == 2


def test_bad_dimension_exit_code(tmp_path):
    assert run("verify-numeric", "--dim", 5, "--output-path", tmp_path / "n.json") == 1


def test_flow_outputs(tmp_path):
    assert run("flow", "--output-path", tmp_path) == 0
    rep = load(tmp_path / "flow.json")
    assert rep["values"]["phi_monotone"] and rep["values"]["final_commutator"] <= 1e-6
    with open(tmp_path / "flow.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == ["s", "phi", "off_block_norm", "representation_residual"]
    phis = [float(r["phi"]) for r in rows]
    assert all(b <= a + 1e-12 for a, b in zip(phis, phis[1:]))
    assert max(float(r["representation_residual"]) for r in rows if r["representation_residual"]) <= 1e-6


def test_flow_zero_coupling(tmp_path):
    assert run("flow", "--kappa", 0, "--s-max", 1, "--output-path", tmp_path) == 0
    with open(tmp_path / "flow.csv", newline="") as fh:
        assert {r["phi"] for r in csv.DictReader(fh)} == {"0.0"}


def test_flow_step_collapse(tmp_path, monkeypatch):
    from diracflow import flow

    monkeypatch.setattr(flow.kernels, "rk4_steps", lambda h, b, step, n: h * 2)
    assert run("flow", "--s-max", 0.1, "--output-path", tmp_path) == 1


def _cli(*argv, cwd, env=None):
    return subprocess.run([sys.executable, "-m", "diracflow", *map(str, argv)], cwd=cwd, env=env,
                          capture_output=True, text=True)


def test_determinism(tmp_path):
    for d in ("a", "b"):
        assert _cli("flow", "--output-path", tmp_path / d, cwd=tmp_path).returncode == 0
        assert _cli("verify-numeric", "--no-sweeps", "--output-path", tmp_path / d / "n.json",
                    cwd=tmp_path).returncode == 0
    for name in ("flow.csv", "flow.json", "n.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_seed_from_environment(tmp_path):
    import os

    env = dict(os.environ, DIRACFLOW_SEED="7")
    r = _cli("verify-numeric", "--no-sweeps", "--output-path", "-", cwd=tmp_path, env=env)
    assert json.loads(r.stdout[r.stdout.index("{"):])["seed"] == 7
    r = _cli("verify-numeric", "--no-sweeps", "--seed", 3, "--output-path", "-", cwd=tmp_path, env=env)
    assert json.loads(r.stdout[r.stdout.index("{"):])["seed"] == 3


def test_stdout_report_is_schema_valid(capsys):
    assert run("verify-symbolic", "--only", "tanh-relation", "--output-path", "-") == 0
    text = capsys.readouterr().out
    jsonschema.validate(json.loads(text[text.index("{"):]), SCHEMA)


@pytest.mark.parametrize("argv", [[], ["series", "--what", "bogus"], ["flow", "--dim", "x"]])
def test_usage_errors(argv):
    with pytest.raises(SystemExit) as exc:
        run(*argv)
    assert exc.value.code == 1  # 2 is reserved for non-convergent limits
