"""Exact linearized solutions around the limiting cycle.

The solver composes pure exponential decay with two delayed jumps per
period, so every value it returns has a short closed form. These tests
walk that composition explicitly and then cross-check the one-period
return map against the quadratic limit multiplier.
"""

from __future__ import annotations

import cmath
import math

import pytest
from hypothesis import given, settings, strategies as st

from sopslab import (
    DomainError,
    limiting_monodromy_dominant,
    limiting_variational_solve,
    make_profile,
    nu_star,
    variational_growth_bound,
)

PROFILES = [
    make_profile(1.0, 2.0, 1.0),
    make_profile(0.0, 2.0, 1.0),
    make_profile(0.125, 24.0, 1.0),
    make_profile(0.7, 1.0, 3.0),  # swapped orientation
]

lam_strategy = st.complex_numbers(max_magnitude=2.5, allow_nan=False, allow_infinity=False)


def eigenfunction(alpha):
    return lambda theta: cmath.exp(-alpha * (theta + 1.0))


@pytest.mark.parametrize("p", PROFILES)
def test_history_readback(p):
    s = -p.q1 / 3.0
    psi = lambda theta: 1.0 + 2.0 * theta
    for t in (s - 1.0, s - 0.5, s):
        assert limiting_variational_solve(p, 0.7, s, psi, t) == pytest.approx(psi(t - s))


@pytest.mark.parametrize("p", PROFILES)
def test_pure_decay_until_the_first_jump(p):
    # The earliest atom acting after the start lies one delay before 0,
    # so on (s, 0) nothing has fired yet.
    s = -p.q1 / 2.0
    psi = lambda theta: 0.3 - 1.1j * theta
    lam = 0.8 + 0.3j
    t = s / 2.0
    expected = psi(0.0) * math.exp(-p.alpha * (t - s))
    assert limiting_variational_solve(p, lam, s, psi, t) == pytest.approx(expected, abs=1e-14)


@pytest.mark.parametrize("p", PROFILES)
@pytest.mark.parametrize("lam", [0.4, -0.25 + 0.6j, 1.3 - 0.2j])
def test_two_jump_closed_forms(p, lam):
    s = -p.q1 / 2.0
    psi = lambda theta: 1.0 + 0.5 * theta + 0.25j * theta * theta
    alpha = p.alpha

    # First jump lands at t = 0 and feeds back the history one delay earlier.
    y0 = psi(0.0) * math.exp(alpha * s) - lam * (1.0 + p.a / p.b) * psi(-1.0 - s)
    got0 = limiting_variational_solve(p, lam, s, psi, 0.0)
    assert got0 == pytest.approx(y0, rel=1e-13, abs=1e-13)

    # Second jump lands at q1 + 1; composing decay with the jump collapses
    # to a single factor expressible through the branch-point constants.
    # Evaluate a little past the jump (at exactly q1 + 1 the half-open
    # atom window can round the atom out) and decay the closed form by
    # the same offset.
    t1 = p.q1 + 1.25
    y1 = y0 * (math.exp(-alpha * (p.q1 + 1.0)) - lam * (1.0 + p.b / p.a) * math.exp(-alpha * p.q1))
    rho_form = -y0 * (lam - p.rho1) / (1.0 - p.rho2)
    got1 = limiting_variational_solve(p, lam, s, psi, t1)
    tail = math.exp(-alpha * 0.25)
    assert got1 == pytest.approx(y1 * tail, rel=1e-12, abs=1e-13)
    assert got1 == pytest.approx(rho_form * tail, rel=1e-12, abs=1e-13)


@settings(max_examples=60)
@given(lam=lam_strategy, frac=st.floats(min_value=0.05, max_value=0.95))
def test_eigenfunction_reproduces_the_multiplier(lam, frac):
    for p in PROFILES:
        s = -p.q1 * frac
        psi = eigenfunction(p.alpha)
        end = limiting_variational_solve(p, lam, s, psi, s + p.omega_star)
        expected = nu_star(p, lam) * psi(0.0)
        assert cmath.isclose(end, expected, rel_tol=1e-11, abs_tol=1e-11)


def test_solution_is_linear_in_the_history():
    p = make_profile(1.0, 2.0, 1.0)
    s = -p.q1 / 4.0
    lam = 0.6 - 0.8j
    psi1 = lambda theta: math.cos(3.0 * theta)
    psi2 = lambda theta: theta + 0.7j
    combo = lambda theta: 2.5 * psi1(theta) - 1.5j * psi2(theta)
    for t in (s / 2.0, 0.0, p.q1 + 1.0, s + p.omega_star):
        y1 = limiting_variational_solve(p, lam, s, psi1, t)
        y2 = limiting_variational_solve(p, lam, s, psi2, t)
        yc = limiting_variational_solve(p, lam, s, combo, t)
        assert yc == pytest.approx(2.5 * y1 - 1.5j * y2, rel=1e-12, abs=1e-12)


@settings(max_examples=100)
@given(lam=lam_strategy)
def test_dominant_matches_the_quadratic(lam):
    for p in PROFILES:
        assert abs(limiting_monodromy_dominant(p, lam) - nu_star(p, lam)) < 1e-12


def test_dominant_is_phase_independent():
    p = make_profile(0.125, 24.0, 1.0)
    lam = 0.9 + 0.4j
    a = limiting_monodromy_dominant(p, lam, s=-0.9 * p.q1)
    b = limiting_monodromy_dominant(p, lam, s=-0.1 * p.q1)
    assert abs(a - b) < 1e-12


@settings(max_examples=40)
@given(
    lam=lam_strategy,
    frac=st.floats(min_value=0.1, max_value=0.9),
    offset=st.floats(min_value=0.0, max_value=1.0),
)
def test_growth_bound_holds(lam, frac, offset):
    p = make_profile(0.5, 3.0, 1.0)
    s = -p.q1 * frac
    bound = variational_growth_bound(p, lam)
    psi = lambda theta: cmath.exp(1j * 5.0 * theta)  # modulus one everywhere
    t = s + offset * p.omega_star
    assert abs(limiting_variational_solve(p, lam, s, psi, t)) <= bound + 1e-12


def test_domain_validation():
    p = make_profile(1.0, 2.0, 1.0)
    psi = lambda theta: 1.0
    with pytest.raises(DomainError):
        limiting_variational_solve(p, 1.0, 0.0, psi, 0.5)  # s must be negative
    with pytest.raises(DomainError):
        limiting_variational_solve(p, 1.0, -2.0 * p.q1, psi, 0.5)
    s = -p.q1 / 2.0
    with pytest.raises(DomainError):
        limiting_variational_solve(p, 1.0, s, psi, s - 1.5)
    with pytest.raises(DomainError):
        limiting_variational_solve(p, 1.0, s, psi, s + p.omega_star + 0.1)
    with pytest.raises(DomainError):
        limiting_monodromy_dominant(p, 1.0, s=0.5)
