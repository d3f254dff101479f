import csv
import io
import json
import subprocess
import sys

import pytest

from staticspace.cli import EXIT_FAIL, EXIT_INPUT, EXIT_OK, EXIT_SOLVER, OUTPUT_DIR_ENV, run

ADS = {"catalog": {"entry": "AntiDeSitter", "params": {"s": 3}}, "grid": 512}
PERTURBED = {"geometry": {"kind": "revolution", "s": 2, "r_min": 0, "r_max": 3.141592653589793,
                          "psi": "perturbed_sin:0.1", "n": 512}}


def call(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(argv, stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def cfg(tmp_path):
    def make(doc, name="cfg.json"):
        p = tmp_path / name
        p.write_text(json.dumps(doc))
        return str(p)

    return make


def test_verify_all_checks(cfg):
    code, out, _ = call(["verify", "--spacetime", cfg(ADS), "--checks", "all"])
    assert code == EXIT_OK
    doc = json.loads(out)
    names = {r["name"] for r in doc["reports"]}
    assert {"einstein_relations", "hessian_remark"} <= names
    assert all(isinstance(v, float) for r in doc["reports"] for v in r["residuals"].values())
    assert doc["tolerances"]["conclusion"] == 1e-4


def test_verify_reports_fail_exit_code(cfg):
    doc = dict(ADS, tolerances={"conclusion": 1e-3, "hypothesis": 1e-6})
    strict = {"geometry": {"kind": "hyperbolic_space", "s": 3, "n": 64}, "warping": "cosh",
              "tolerances": {"conclusion": 1e-5}}
    code, _, _ = call(["verify", "--spacetime", cfg(doc), "--checks", "einstein_relations"])
    assert code == EXIT_OK
    # a coarse grid with a strict tolerance breaks the Einstein hypothesis, not the conclusion
    code, out, _ = call(["verify", "--spacetime", cfg(strict), "--checks", "einstein_relations"])
    assert code == EXIT_OK and json.loads(out)["reports"][0]["verdict"] == "HypothesesNotMet"
    wrong = {"geometry": {"kind": "euclidean_interval", "c": 0, "d": 1, "n": 64}, "warping": [1.0 + 0.3 * i / 64 for i in range(64)]}
    code, out, _ = call(["verify", "--spacetime", cfg(wrong), "--checks", "einstein_bounds"])
    assert code == EXIT_FAIL


def test_verify_csv(cfg):
    code, out, _ = call(["verify", "--spacetime", cfg(ADS), "--checks", "einstein_relations,hessian_remark",
                         "--format", "csv"])
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == EXIT_OK and {r["check"] for r in rows} == {"einstein_relations", "hessian_remark"}


def test_verify_unknown_check(cfg):
    code, _, err = call(["verify", "--spacetime", cfg(ADS), "--checks", "nonsense"])
    assert code == EXIT_INPUT and "nonsense" in err


def test_eigen_report(cfg, tmp_path):
    out_path = tmp_path / "out" / "eig.json"
    coo = tmp_path / "out" / "L.coo"
    code, _, _ = call(["eigen", "--geometry", cfg(PERTURBED), "--tol", "1e-8", "--out", str(out_path),
                       "--export-coo", str(coo)])
    assert code == EXIT_OK
    rep = json.loads(out_path.read_text())
    assert rep["tau"] == pytest.approx(2 * rep["lambda1"], rel=1e-15)
    assert rep["residual"] <= 1e-8 and rep["gap"] > 0
    assert {"lambda1", "tau", "residual", "gap", "constancy_residual"} <= set(rep)
    f_rows = list(csv.DictReader(io.StringIO((tmp_path / "out" / "eig.f.csv").read_text())))
    assert len(f_rows) == 512 and all(float(r["f"]) > 0 for r in f_rows)
    assert len(coo.read_text().splitlines()) == 3 * 512 - 2


def test_eigen_non_convergence_exit_code(cfg):
    torus = {"geometry": {"kind": "conformal_torus", "nx": 32, "ny": 32, "u": "sinsin:0.4"}}
    code, _, err = call(["eigen", "--geometry", cfg(torus), "--tol", "1e-14", "--max-iter", "2"])
    assert code == EXIT_SOLVER and "residual" in err


def test_eigen_noncompact_is_input_error(cfg):
    code, _, _ = call(["eigen", "--geometry", cfg({"geometry": {"kind": "hyperbolic_space", "s": 3}})])
    assert code == EXIT_INPUT


def test_ode2d_flat_family():
    code, out, _ = call(["ode2d", "--tau", "0", "--c1", "1", "--c2", "1", "--domain", "0,1", "--samples", "11"])
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0].startswith("#") and "sqrt(|tau|/2)" in lines[0]
    rows = list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))
    assert len(rows) == 11 and all(float(r["tau"]) == 0.0 for r in rows)
    assert float(rows[-1]["f"]) == 2.0


def test_ode2d_domain_error():
    code, _, err = call(["ode2d", "--tau", "2", "--c1", "1", "--c2", "0", "--domain=-2,2"])
    assert code == EXIT_INPUT and "not positive" in err


def test_ode2d_bad_domain_syntax():
    code, _, _ = call(["ode2d", "--tau", "0", "--c1", "1", "--c2", "1", "--domain", "0;1"])
    assert code == EXIT_INPUT


def test_catalog_subcommand_json_and_csv():
    code, out, _ = call(["catalog", "--entry", "EinsteinStaticUniverse", "--grid", "128"])
    doc = json.loads(out)
    assert code == EXIT_OK and doc["entry"] == "EinsteinStaticUniverse(s=3)"
    code, out, _ = call(["catalog", "--entry", "AntiDeSitter", "--grid", "256", "--format", "csv"])
    assert code == EXIT_OK and out.startswith("check,verdict")


def test_catalog_grid_too_small():
    code, _, _ = call(["catalog", "--entry", "Minkowski", "--grid", "16"])
    assert code == EXIT_INPUT


def test_invalid_config_exit_code(cfg):
    code, _, err = call(["verify", "--spacetime", cfg({"catalog": {"entry": "AntiDeSitter"}, "warpfunc": 1})])
    assert code == EXIT_INPUT and "warping" in err


def test_curvature_csv_to_env_directory(cfg, tmp_path, monkeypatch):
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path / "env"))
    code, out, _ = call(["curvature", "--spacetime", cfg(ADS), "--format", "csv", "--grid", "128"])
    assert code == EXIT_OK and out == ""
    rows = list(csv.DictReader(io.StringIO((tmp_path / "env" / "curvature.csv").read_text())))
    assert len(rows) == 128 and set(rows[0]) == {"r", "f", "tau_F", "tau"}


def test_reports_are_byte_identical(cfg):
    path = cfg(ADS)
    assert call(["verify", "--spacetime", path])[1] == call(["verify", "--spacetime", path])[1]


def test_non_finite_numbers_abort(monkeypatch, cfg):
    from staticspace import cli

    monkeypatch.setattr(cli.einstein, "verify", lambda st, names, tol: [
        cli.einstein.make_report("x", [], {"r": float("nan")}, 1e-4)])
    code, _, err = call(["verify", "--spacetime", cfg(ADS)])
    assert code == EXIT_SOLVER and "non-finite" in err


def test_console_script_runs():
    proc = subprocess.run([sys.executable, "-m", "staticspace.cli", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and "staticspace" in proc.stdout
