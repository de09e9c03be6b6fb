"""Orbit finder: retiming conventions, periodicity, exports, limit residuals."""

from __future__ import annotations

import csv
import json

import numpy as np
import pytest

from sopslab import (
    DomainError,
    NonConvergenceError,
    find_sops,
    integrate_scalar,
    tanh_feedback,
)
from sopslab.limiting import make_profile
from sopslab.sops import default_step, export_sops, limit_residuals, normalize_sops


def test_reference_orbit_frozen(sops_factory):
    s = sops_factory(1.0, 30.0)
    assert s.omega == pytest.approx(3.1066299529564367, abs=5e-9)
    assert s.z1 == pytest.approx(0.30396636730328197, abs=5e-9)
    assert s.residual < 1e-6
    assert s.omega == s.z2 + 1.0


def test_phase_anchor(sops_factory):
    # Retimed so the orbit crosses zero upward at t = -1.
    s = sops_factory(1.0, 30.0)
    assert s.pdot_at(-1.0) > 0.0
    assert abs(s.p_at(-1.0)) <= 10.0 * s.h * abs(s.pdot_at(-1.0))


def test_sign_pattern(sops_factory):
    s = sops_factory(1.0, 30.0)
    pad = 2.0 * s.h
    up = (s.t > -1.0 + pad) & (s.t < s.z1 - pad)
    down = (s.t > s.z1 + pad) & (s.t < s.z2 - pad)
    assert np.all(s.p[up] > 0.0)
    assert np.all(s.p[down] < 0.0)
    t_peak = s.t[np.argmax(s.p)]
    assert -1.0 < t_peak < s.z1


def test_forward_reintegration_stays_on_orbit(sops_factory):
    alpha, beta = 1.0, 30.0
    s = sops_factory(alpha, beta)
    T = np.floor(s.omega / s.h) * s.h
    re = integrate_scalar(alpha, beta, tanh_feedback(2.0, 1.0), s.p_at, T, h=s.h)
    probes = np.linspace(0.0, T, 67)
    sup = max(abs(float(re.eval(t)) - float(s.p_at(t))) for t in probes)
    assert sup < 2e-6


def test_finder_is_deterministic():
    fb = tanh_feedback(2.0, 1.0)
    s1 = find_sops(0.5, 20.0, fb, h=2e-3)
    s2 = find_sops(0.5, 20.0, fb, h=2e-3)
    assert s1.omega == s2.omega
    assert np.array_equal(s1.p, s2.p)
    assert np.array_equal(s1.pdot, s2.pdot)


def test_short_budget_raises():
    fb = tanh_feedback(2.0, 1.0)
    with pytest.raises(NonConvergenceError):
        find_sops(1.0, 30.0, fb, h=1e-3, transient=5.0, max_time=12.0)


def test_subcritical_gain_rejected():
    fb = tanh_feedback(2.0, 1.0)
    with pytest.raises(DomainError, match="bifurcation"):
        find_sops(1.0, 2.0, fb, h=2e-3)


def test_default_step_divides_the_delay():
    for beta in (5.0, 30.0, 100.0):
        h = default_step(beta)
        assert h == 1e-3
        assert round(1.0 / h) * h == 1.0


def test_normalize_divides_by_gain(sops_factory):
    s = sops_factory(1.0, 30.0)
    norm = normalize_sops(s)
    assert np.array_equal(norm.pbar, s.p / s.beta)
    assert np.array_equal(norm.pbardot, s.pdot / s.beta)
    assert (norm.omega, norm.z1, norm.z2) == (s.omega, s.z1, s.z2)
    assert (norm.alpha, norm.beta) == (s.alpha, s.beta)


def test_export_roundtrip(tmp_path, sops_factory):
    s = sops_factory(1.0, 30.0)
    csv_path = tmp_path / "orbit.csv"
    side_path = tmp_path / "orbit.json"
    export_sops(s, csv_path, side_path)

    with open(csv_path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "p", "pdot"]
    body = np.asarray([[float(c) for c in r] for r in rows[1:]])
    assert body.shape == (len(s.t), 3)
    assert np.array_equal(body[:, 0], s.t)
    assert np.array_equal(body[:, 1], s.p)
    assert np.array_equal(body[:, 2], s.pdot)

    meta = json.loads(side_path.read_text())
    assert set(meta) == {"omega", "z1", "z2", "residual", "alpha", "beta"}
    assert meta["omega"] == s.omega
    assert meta["z1"] == s.z1
    assert meta["beta"] == 30.0


def test_limit_residuals_fall_along_gain_ladder(sops_factory):
    # Raising the gain pulls every deviation measure toward zero. One
    # non-monotone step per measure is tolerated with 10% headroom since
    # finite-gain wobble is real, but the endpoints must improve outright.
    prof = make_profile(0.0, 2.0, 1.0)
    reports = [limit_residuals(sops_factory(0.0, b), prof, 0.05) for b in (10.0, 30.0, 100.0)]
    table = np.array(
        [
            [r.z1_err, r.z2_err, r.omega_err, r.pbar_sup_err, r.pbardot_sup_err]
            for r in reports
        ]
    )
    assert np.all(np.isfinite(table)) and np.all(table >= 0.0)
    for j in range(5):
        first, mid, last = table[:, j]
        assert last < first
        steps_ok = [mid < first or mid <= 1.1 * first, last < mid or last <= 1.1 * mid]
        slack_used = (not (mid < first)) + (not (last < mid))
        assert all(steps_ok)
        assert slack_used <= 1
