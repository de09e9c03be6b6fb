"""Shared fixtures.

Periodic-orbit searches dominate the suite's runtime, so found orbits are
memoized per parameter set and shared across modules through a factory
fixture. Everything handed out is treated as read-only by convention.
"""

from __future__ import annotations

import pytest

from sopslab import find_sops, make_profile, tanh_feedback

_ORBITS: dict[tuple, object] = {}


@pytest.fixture(scope="session")
def sops_factory():
    def factory(alpha, beta, a=2.0, b=1.0, h=1e-3, tol=1e-6):
        key = (alpha, beta, a, b, h, tol)
        if key not in _ORBITS:
            _ORBITS[key] = find_sops(alpha, beta, tanh_feedback(a, b), h=h, tol=tol)
        return _ORBITS[key]

    return factory


@pytest.fixture(scope="session")
def tanh21():
    return tanh_feedback(2.0, 1.0)


@pytest.fixture(scope="session")
def profile121():
    return make_profile(1.0, 2.0, 1.0)


@pytest.fixture(scope="session")
def profile021():
    return make_profile(0.0, 2.0, 1.0)
