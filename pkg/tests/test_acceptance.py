"""End-to-end acceptance battery.

Each test is one advertised guarantee of the package, stated with the
tolerance and runtime budget it ships with. Run this file alone with
``pytest tests/test_acceptance.py -v`` to get one pass or fail line per
guarantee. Orbits are built through the shared session cache, so the
first run pays the full integration cost and later files reuse it.
"""

from __future__ import annotations

import math
import time

import numpy as np
import pytest

from sopslab import (
    classify_empirical,
    classify_general,
    decomposition_check,
    dominant_multiplier,
    figure_experiment,
    hopf_beta,
    limit_residuals,
    limiting_monodromy_dominant,
    limiting_variational_solve,
    make_profile,
    mean_field,
    nu_star,
    nu_star_real_form,
    ring,
    ring_spectrum,
)

GAIN_LADDER = (10.0, 30.0, 100.0)


def test_criterion_1_hopf_threshold_value_and_speed():
    start = time.monotonic()
    for _ in range(1000):
        value = hopf_beta(0.125, -1.0)
    elapsed = time.monotonic() - start
    assert value == pytest.approx(1.65, abs=0.01)
    assert elapsed < 1.0, "threshold formula must cost well under a millisecond"


def test_criterion_2_gain_ladder_approaches_limit_profile(sops_factory):
    p = make_profile(0.0, 2.0, 1.0)
    assert p.omega_star == pytest.approx(4.5, abs=1e-14)

    orbits = []
    for beta in GAIN_LADDER:
        start = time.monotonic()
        orbits.append(sops_factory(0.0, beta))
        assert time.monotonic() - start < 30.0
    gaps = [abs(s.omega - 4.5) for s in orbits]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[-1] < 0.15

    report = limit_residuals(orbits[-1], p, 0.05)
    assert report.pbar_sup_err < 0.1


def test_criterion_3_trivial_multiplier_at_fine_grid(sops_factory):
    s = sops_factory(0.0, 100.0)
    start = time.monotonic()
    lam = dominant_multiplier(1.0, s, m=128)
    assert time.monotonic() - start < 60.0
    assert abs(lam - 1.0) < 5e-3


def test_criterion_4_multiplier_ladder_tracks_limit_prediction(sops_factory):
    # The gain ladder only separates cleanly from discretization error on
    # a fine grid, hence the smaller step here.
    p = make_profile(0.0, 2.0, 1.0)
    orbits = [sops_factory(0.0, beta, h=1.25e-4) for beta in GAIN_LADDER]
    for lam in (0.3, 0.6, 0.5 + 0.9j):
        target = nu_star(p, lam)
        gaps = [abs(dominant_multiplier(lam, s, m=64) - target) for s in orbits]
        assert gaps[0] > gaps[1] > gaps[2]
        assert gaps[-1] < max(0.25 * abs(target), 0.05)


def test_criterion_5_ring_block_decomposition(sops_factory):
    s = sops_factory(0.0, 100.0)
    start = time.monotonic()
    report = decomposition_check(ring(3, 0.13, 0.13), s, m=64)
    assert time.monotonic() - start < 300.0
    assert report.passed
    assert report.hausdorff < 1e-8


def test_criterion_6_limiting_oracles_are_exact():
    rng = np.random.default_rng(11)
    for p in (make_profile(1.0, 2.0, 1.0), make_profile(0.125, 24.0, 1.0)):
        for _ in range(100):
            lam = complex(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0))
            gap = abs(limiting_monodromy_dominant(p, lam) - nu_star(p, lam))
            assert gap < 1e-12

    # The solver's value after each of the two delayed jumps has a short
    # closed form; both must be reproduced essentially exactly.
    p = make_profile(1.0, 2.0, 1.0)
    s = -p.q1 / 2.0
    lam = 0.8 - 0.3j
    psi = lambda theta: 1.0 + 0.5 * theta + 0.25j * theta * theta
    y0 = psi(0.0) * math.exp(p.alpha * s) - lam * (1.0 + p.a / p.b) * psi(-1.0 - s)
    got0 = limiting_variational_solve(p, lam, s, psi, 0.0)
    assert got0 == pytest.approx(y0, rel=1e-12, abs=1e-13)

    t1 = p.q1 + 1.25
    y1 = -y0 * (lam - p.rho1) / (1.0 - p.rho2) * math.exp(-p.alpha * 0.25)
    got1 = limiting_variational_solve(p, lam, s, psi, t1)
    assert got1 == pytest.approx(y1, rel=1e-12, abs=1e-13)


def test_criterion_7_transverse_perturbation_slopes():
    # Below the threshold level the synchrony gap must shrink; above it
    # the gap must grow. Default settings: three nodes, steep feedback,
    # gain just past the threshold, slope fit over t in [10, 80].
    start = time.monotonic()
    contracting = figure_experiment(0.9)
    assert time.monotonic() - start < 120.0
    assert contracting.slope is not None
    assert contracting.slope < 0.0

    start = time.monotonic()
    expanding = figure_experiment(1.1)
    assert time.monotonic() - start < 120.0
    assert expanding.slope is not None
    assert expanding.slope > 0.0


def test_criterion_8_spectral_identities():
    rng = np.random.default_rng(7)
    for _ in range(100):
        n = int(rng.integers(3, 13))
        k1, k2 = rng.uniform(0.01, 1.0, size=2)
        predicted = ring_spectrum(n, k1, k2)
        computed = np.linalg.eigvals(ring(n, k1, k2).entries)
        dist = np.abs(predicted[:, None] - computed[None, :])
        assert max(dist.min(axis=0).max(), dist.min(axis=1).max()) < 1e-9

    for p in (make_profile(1.0, 2.0, 1.0), make_profile(0.0, 2.0, 1.0),
              make_profile(0.125, 24.0, 1.0)):
        for r in np.linspace(p.r0 - 3.0, p.r0 + 3.0, 241):
            direct = nu_star(p, complex(r))
            assert abs(direct.imag) < 1e-13
            assert direct.real == pytest.approx(nu_star_real_form(p, r), abs=1e-12)

    # Above this decay rate the unit level set of the limit multiplier is
    # a single oval regardless of the nonlinearity shape.
    threshold = math.log((1.0 + math.sqrt(2.0)) / 2.0)
    for _ in range(1000):
        a = 10.0 ** rng.uniform(-1.0, 1.5)
        b = 10.0 ** rng.uniform(-1.0, 1.5)
        alpha = threshold + rng.uniform(1e-9, 2.5)
        assert make_profile(alpha, a, b).delta_disc < 0.0


def test_criterion_9_classifiers_agree_when_decisive(sops_factory):
    orbits = {
        0.0: sops_factory(0.0, 100.0),
        0.125: sops_factory(0.125, 100.0, tol=1e-5),
        1.0: sops_factory(1.0, 100.0, tol=1e-5),
    }
    decisive_pairs = 0
    for alpha, s in orbits.items():
        p = make_profile(alpha, 2.0, 1.0)
        for kappa in np.linspace(0.05, 1.0, 20):
            for G in (mean_field(4, float(kappa)), ring(3, float(kappa), float(kappa))):
                general = classify_general(p, G, 0.1)
                empirical = classify_empirical(s, G, m=32, margin=0.1)
                if "Indeterminate" in (general.verdict, empirical.verdict):
                    continue
                decisive_pairs += 1
                assert general.verdict == empirical.verdict, (
                    f"alpha={alpha} kappa={kappa:.3f} {G.family_tag}: "
                    f"{general.verdict} vs {empirical.verdict}"
                )
    # The sweep must actually exercise both classifiers, not skate
    # through on indeterminate outcomes.
    assert decisive_pairs >= 100
