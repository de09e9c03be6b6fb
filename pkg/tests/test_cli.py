"""Command-line layer: spec merging, artifacts, exit codes, determinism."""

from __future__ import annotations

import json

import numpy as np
import pytest
from click.testing import CliRunner

from sopslab.cli import main
from sopslab.limiting import make_profile, nu_star


@pytest.fixture()
def runner():
    return CliRunner()


def test_profile_command(tmp_path, runner):
    r = runner.invoke(
        main, ["profile", "--alpha", "0", "--a", "2", "--b", "1", "--out", str(tmp_path)]
    )
    assert r.exit_code == 0
    payload = json.loads(r.output)
    assert payload["omega_star"] == pytest.approx(4.5, abs=1e-14)
    assert payload["beta_hopf"] == pytest.approx(np.pi / 2.0, abs=1e-14)
    on_disk = json.loads((tmp_path / "profile.json").read_text())
    assert on_disk == payload

    lines = (tmp_path / "nu_table.csv").read_text().strip().split("\n")
    assert lines[0] == "lambda,nu,abs_nu"
    assert len(lines) == 92
    prof = make_profile(0.0, 2.0, 1.0)
    for ln in lines[1:10]:
        lam, nu, mod = (float(c) for c in ln.split(","))
        assert nu == pytest.approx(float(np.real(nu_star(prof, lam))), abs=1e-15)
        assert mod == pytest.approx(abs(nu_star(prof, lam)), abs=1e-15)


def test_spec_file_with_flag_override(tmp_path, runner):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"alpha": 1.0, "a": 2.0, "b": 1.0}))
    base = runner.invoke(main, ["profile", "--spec", str(spec), "--out", str(tmp_path)])
    assert base.exit_code == 0
    assert json.loads(base.output)["alpha"] == 1.0
    moved = runner.invoke(
        main, ["profile", "--spec", str(spec), "--alpha", "0", "--out", str(tmp_path)]
    )
    assert moved.exit_code == 0
    assert json.loads(moved.output)["omega_star"] == pytest.approx(4.5, abs=1e-14)


def test_missing_parameter_exits_2(runner):
    r = runner.invoke(main, ["profile", "--alpha", "0", "--a", "2"])
    assert r.exit_code == 2
    assert "validation error" in r.output
    assert "'b'" in r.output


def test_sops_command_artifacts(tmp_path, runner):
    r = runner.invoke(
        main,
        ["sops", "--alpha", "1", "--beta", "30", "--a", "2", "--b", "1",
         "--h", "0.005", "--tol", "1e-4", "--out", str(tmp_path)],
    )
    assert r.exit_code == 0
    payload = json.loads(r.output)
    assert payload["omega"] == pytest.approx(3.10663, abs=1e-3)
    for name in ("sops.csv", "sops.json", "residuals.json"):
        assert (tmp_path / name).exists()
    sidecar = json.loads((tmp_path / "sops.json").read_text())
    assert sidecar["omega"] == payload["omega"]
    resid = json.loads((tmp_path / "residuals.json").read_text())
    assert set(resid) == {"z1_err", "z2_err", "omega_err", "pbar_sup_err", "pbardot_sup_err"}


def test_sops_rejects_bad_step(runner):
    r = runner.invoke(
        main, ["sops", "--alpha", "1", "--beta", "30", "--a", "2", "--b", "1", "--h", "0.3"]
    )
    assert r.exit_code == 2
    assert "validation error" in r.output


def test_sops_budget_exhaustion_exits_3(tmp_path, runner):
    spec = tmp_path / "spec.json"
    spec.write_text(
        json.dumps({"alpha": 1.0, "beta": 30.0, "a": 2.0, "b": 1.0,
                    "h": 0.001, "transient": 5.0, "max_time": 12.0})
    )
    r = runner.invoke(main, ["sops", "--spec", str(spec), "--out", str(tmp_path)])
    assert r.exit_code == 3
    assert "numerical failure" in r.output


def test_classify_mean_field_stable(tmp_path, runner):
    r = runner.invoke(
        main,
        ["classify", "--rule", "mean-field", "--alpha", "0.5", "--a", "2", "--b", "1",
         "--kappa", "0.5", "--out", str(tmp_path)],
    )
    assert r.exit_code == 0
    payload = json.loads(r.output)
    assert payload["verdict"] == "Stable"
    assert json.loads((tmp_path / "verdict.json").read_text()) == payload


def test_classify_kappa_window_messages_name_the_rule(runner):
    r = runner.invoke(
        main,
        ["classify", "--rule", "mean-field", "--alpha", "0.5", "--a", "2", "--b", "1",
         "--kappa", "1.5"],
    )
    assert r.exit_code == 2
    assert "mean-field rule" in r.output
    r = runner.invoke(
        main,
        ["classify", "--rule", "ring", "--alpha", "0.5", "--a", "2", "--b", "1",
         "--n", "4", "--kappa", "1.5"],
    )
    assert r.exit_code == 2
    assert "symmetric ring rule" in r.output


def test_classify_rejects_bad_matrix(tmp_path, runner):
    bad = tmp_path / "g.csv"
    bad.write_text("0.6,0.3\n0.5,0.5\n")
    r = runner.invoke(
        main,
        ["classify", "--rule", "general", "--alpha", "1", "--a", "2", "--b", "1",
         "--matrix", str(bad)],
    )
    assert r.exit_code == 2
    assert "sum" in r.output


def test_classify_weak_via_matrix_file(tmp_path, runner):
    H = tmp_path / "h.csv"
    H.write_text("-1,1\n1,-1\n")
    r = runner.invoke(main, ["classify", "--rule", "weak", "--matrix", str(H),
                             "--out", str(tmp_path)])
    assert r.exit_code == 0
    assert json.loads(r.output)["verdict"] == "Stable"


def test_region_crossings(tmp_path, runner):
    r = runner.invoke(
        main,
        ["region", "--alpha", "0.125", "--a", "24", "--b", "1", "--delta", "0",
         "--samples", "256", "--out", str(tmp_path)],
    )
    assert r.exit_code == 0
    assert json.loads(r.output)["count"] == 256
    lines = (tmp_path / "boundary.csv").read_text().strip().split("\n")
    assert lines[0] == "re,im"
    pts = np.asarray([[float(c) for c in ln.split(",")] for ln in lines[1:]])
    assert pts.shape == (256, 2)
    crossings = pts[np.abs(pts[:, 1]) < 1e-9, 0]
    assert crossings.size >= 2
    assert np.any(np.abs(crossings - 1.0) < 1e-12)
    assert crossings.min() < 0.98665 < crossings.max()


def test_region_rejects_bad_delta(runner):
    r = runner.invoke(main, ["region", "--alpha", "0.125", "--a", "24", "--b", "1",
                             "--delta", "-0.5"])
    assert r.exit_code == 2


def test_simulate_is_deterministic(tmp_path, runner):
    args = ["simulate", "--alpha", "0.125", "--beta", "1.67", "--a", "24", "--b", "1",
            "--n", "3", "--kappa1", "0.0089", "--kappa2", "0.0089",
            "--history", "ramp", "--perturb", "0.07", "--horizon", "5", "--h", "0.005"]
    out1, out2 = tmp_path / "one", tmp_path / "two"
    r1 = runner.invoke(main, args + ["--out", str(out1)])
    r2 = runner.invoke(main, args + ["--out", str(out2)])
    assert r1.exit_code == 0 and r2.exit_code == 0
    assert r1.output == r2.output
    for name in ("trajectory.csv", "sync.csv"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
    payload = json.loads(r1.output)
    assert payload["n"] == 3
    assert payload["g_max"] >= payload["g_final"] >= 0.0


def test_figure_bundle(tmp_path, runner):
    r = runner.invoke(
        main,
        ["figure", "--level", "0.9", "--horizon", "15", "--h", "0.005",
         "--out", str(tmp_path)],
    )
    assert r.exit_code == 0
    runs = json.loads(r.output)["runs"]
    assert len(runs) == 1
    assert set(runs[0]) == {"level", "lambda", "kappa", "beta", "slope"}
    assert runs[0]["level"] == 0.9
    assert runs[0]["lambda"] == pytest.approx(0.9866495774689139, abs=1e-12)
    assert (tmp_path / "figure_0p9_trajectory.csv").exists()
    assert (tmp_path / "figure_0p9_sync.csv").exists()


def test_floquet_command(tmp_path, runner):
    r = runner.invoke(
        main,
        ["floquet", "--alpha", "1", "--beta", "10", "--a", "2", "--b", "1",
         "--h", "0.005", "--m", "16", "--lam", "1", "--lam", "0.4+0.7j",
         "--out", str(tmp_path)],
    )
    assert r.exit_code == 0
    payload = json.loads(r.output)
    assert len(payload["modes"]) == 2
    trivial = payload["modes"][0]
    assert complex(trivial["dominant_re"], trivial["dominant_im"]) == pytest.approx(
        1.0, abs=5e-3
    )
    lines = (tmp_path / "multipliers.csv").read_text().strip().split("\n")
    assert lines[0] == "lambda_re,lambda_im,dominant_re,dominant_im,spectral_radius"
    assert len(lines) == 3
