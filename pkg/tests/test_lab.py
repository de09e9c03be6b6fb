"""Synchrony measure and the ring destabilization experiment."""

from __future__ import annotations

import numpy as np
import pytest

from sopslab import DomainError, integrate_coupled, tanh_feedback
from sopslab.ddesolve import Trajectory
from sopslab.lab import (
    figure_experiment,
    level_lambda,
    ramp_history,
    sync_measure,
    write_sync_csv,
)
from sopslab.limiting import hopf_beta, make_profile


@pytest.fixture(scope="module")
def steep():
    return make_profile(0.125, 24.0, 1.0)


def flat_pair(c1, c2, n_nodes=41, h=0.1):
    # Node grid spans [0, 4]: the stored block starts one delay before
    # t_start by convention.
    vals = np.column_stack([np.full(n_nodes, c1), np.full(n_nodes, c2)])
    return Trajectory(t_start=1.0, h=h, values=vals, derivs=np.zeros_like(vals))


def test_level_lambda(steep):
    assert level_lambda(steep, 1.0) == pytest.approx(1.0, abs=1e-12)
    assert level_lambda(steep, 0.9) == pytest.approx(0.9866495774689139, abs=1e-12)
    assert level_lambda(steep, 1.1) == pytest.approx(1.0130387956771871, abs=1e-12)
    with pytest.raises(DomainError):
        level_lambda(steep, -0.2)


def test_ramp_history_shape():
    pert = np.array([0.0, 0.05, -0.05])
    hist = ramp_history(30.0, pert)
    assert np.allclose(hist(-1.0), -30.0 + pert)
    assert np.allclose(hist(0.0), pert)
    assert np.allclose(hist(-0.5), -15.0 + pert)


def test_ramp_history_rejects_bad_perturbation():
    with pytest.raises(DomainError):
        ramp_history(30.0, None)
    with pytest.raises(DomainError):
        ramp_history(30.0, np.array([0.0, np.inf]))


def test_sync_constant_components():
    ss = sync_measure(flat_pair(1.0, -0.75), 1.5, np.array([2.0, 2.5, 3.0]))
    assert np.allclose(ss.g, 1.75)
    assert ss.window == 1.5


def test_sync_exact_synchrony_is_identically_zero():
    ss = sync_measure(flat_pair(0.3, 0.3), 1.5, np.linspace(0.0, 4.0, 9))
    assert np.all(ss.g == 0.0)


def test_sync_window_retains_then_forgets():
    vals = np.zeros((41, 2))
    vals[10, 1] = 0.5
    tr = Trajectory(t_start=1.0, h=0.1, values=vals, derivs=np.zeros_like(vals))
    ss = sync_measure(tr, 1.5, np.array([0.5, 1.0, 2.4, 2.5, 2.6, 3.5]))
    assert ss.g == pytest.approx([0.0, 0.5, 0.5, 0.5, 0.0, 0.0])


def test_sync_validation():
    tr = flat_pair(1.0, 2.0)
    single = Trajectory(
        t_start=1.0, h=0.1, values=np.ones((11, 1)), derivs=np.zeros((11, 1))
    )
    with pytest.raises(DomainError):
        sync_measure(single, 1.0, np.array([0.5]))
    with pytest.raises(DomainError):
        sync_measure(tr, 0.0, np.array([0.5]))
    with pytest.raises(DomainError):
        sync_measure(tr, 1.0, np.array([]))
    with pytest.raises(DomainError):
        sync_measure(tr, 1.0, np.array([-0.5]))
    with pytest.raises(DomainError):
        sync_measure(tr, 1.0, np.array([4.5]))


def test_figure_stable_level(steep):
    r = figure_experiment(0.9, T=30.0, h=2e-3, slope_window=(10.0, 25.0))
    assert r.slope is not None and r.slope < 0.0
    assert r.lam == pytest.approx(0.9866495774689139, abs=1e-12)
    assert r.kappa == pytest.approx(0.008900281687390729, abs=1e-12)
    assert r.beta == pytest.approx(hopf_beta(0.125, -1.0) + 0.01, abs=1e-12)
    assert len(r.sync.times) == 301
    window = r.sync.g[(r.sync.times >= 10.0) & (r.sync.times <= 25.0)]
    assert np.all(window > 0.0)


def test_figure_zero_perturbation_reports_no_slope():
    r = figure_experiment(
        0.9, T=5.0, h=5e-3, perturbation=np.zeros(3), slope_window=(1.0, 4.0)
    )
    assert r.slope is None
    assert r.sync.g.max() < 1e-14


def test_decoupled_network_plateaus(steep):
    # Without coupling each unit settles onto the same orbit with its own
    # phase, so the gap neither vanishes nor grows: it parks at the level
    # set by the initial phase offsets.
    fb = tanh_feedback(24.0, 1.0)
    beta = hopf_beta(0.125, fb.fprime0) + 0.01
    pert = np.array([0.0, 1.0, -1.0]) / (10.0 * np.sqrt(2.0))
    traj = integrate_coupled(
        0.125, beta, fb, np.eye(3), ramp_history(beta, pert), 30.0, h=2e-3
    )
    ss = sync_measure(traj, steep.omega_star, np.arange(0.0, 30.0 + 1e-9, 0.1))
    late = ss.g[ss.times >= 20.0]
    assert late.min() > 0.01
    assert late.max() < 0.25


def test_sync_csv_round_trip(tmp_path):
    ss = sync_measure(flat_pair(1.0, -0.75), 1.5, np.array([2.0, 2.5, 3.0]))
    path = tmp_path / "sync.csv"
    write_sync_csv(ss, path)
    lines = path.read_text().strip().split("\n")
    assert lines[0] == "t,g,log_g"
    body = np.asarray([[float(c) for c in ln.split(",")] for ln in lines[1:]])
    assert np.array_equal(body[:, 0], ss.times)
    assert np.array_equal(body[:, 1], ss.g)
    assert np.allclose(body[:, 2], np.log(ss.g))
