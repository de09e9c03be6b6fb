"""Stability regions of the limiting multiplier map in the eigenvalue plane.

The level sets of |nu_star| are Ovals of Cassini with foci rho1, rho2:
inside the 1 - delta level the networked cycle is asymptotically stable for
large gain, outside the 1 + delta level it is unstable. This module
classifies points against those levels, traces the boundary curve, and
evaluates the two explicit certificate neighborhoods near lam = 1 (any
alpha) and near lam = 0 (alpha = 0 only) that decide weakly coupled and
near-uniform networks.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from .profile import LimitProfile, nu_star, nu_star_prime

__all__ = [
    "CassiniVerdict",
    "RegionConstants",
    "cassini_classify",
    "cassini_boundary",
    "region_a1_constants",
    "region_a0_constants",
    "region_A1",
    "region_A0",
]

STABLE_REGION = "StableRegion"
UNSTABLE_REGION = "UnstableRegion"
INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class CassiniVerdict:
    tag: str
    modulus: float
    margin: float


def cassini_classify(p: LimitProfile, lam: complex, delta: float) -> CassiniVerdict:
    """Place one eigenvalue against the 1 -/+ delta modulus bands."""
    if not (0.0 < delta < 1.0):
        raise DomainError("delta must lie in (0, 1)")
    modulus = abs(complex(nu_star(p, lam)))
    if modulus < 1.0 - delta:
        tag = STABLE_REGION
    elif modulus > 1.0 + delta:
        tag = UNSTABLE_REGION
    else:
        tag = INDETERMINATE
    margin = min(abs(modulus - (1.0 - delta)), abs(modulus - (1.0 + delta)))
    return CassiniVerdict(tag=tag, modulus=modulus, margin=margin)


def _trace_ray(p: LimitProfile, center: complex, theta: float, level: float, r_cap: float | None):
    """Bisect |nu_star| - level along one ray. Returns the point or None."""
    direction = cmath.exp(1j * theta)

    def g(rr: float) -> float:
        return abs(complex(nu_star(p, center + rr * direction))) - level

    if g(0.0) >= 0.0:
        return None
    hi = 1e-3
    cap = r_cap if r_cap is not None else math.inf
    for _ in range(80):
        if hi >= cap:
            hi = cap
            break
        if g(hi) > 0.0:
            break
        hi *= 2.0
    if g(hi) <= 0.0:
        return None
    lo = 0.0
    while hi - lo > 1e-15 * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if g(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    point = center + 0.5 * (lo + hi) * direction
    if abs(g(0.5 * (lo + hi))) >= 1e-10:
        return None
    return point


def cassini_boundary(p: LimitProfile, delta: float = 0.0, nsamples: int = 64) -> list[complex]:
    """Sample the |nu_star| = 1 - delta boundary curve.

    Rays are bisected from the focus midpoint when the level set is one
    loop, and from one seed per real-axis crossing cluster when it splits
    into two lobes (which happens exactly when (1-delta) (1-rho1) (1-rho2)
    drops below ((rho1-rho2)/2)^2). Rays that fail to bracket or to meet
    the 1e-10 residual are reported as warnings and skipped, so the result
    can be shorter than requested but never raises for a bad ray.
    """
    if not (0.0 <= delta < 1.0):
        raise DomainError("delta must lie in [0, 1)")
    if nsamples < 8:
        raise DomainError("nsamples must be at least 8")
    level = 1.0 - delta
    D = (1.0 - p.rho1) * (1.0 - p.rho2)
    e = (p.rho1 - p.rho2) / 2.0
    K = level * D  # |lam - rho1| |lam - rho2| on the boundary
    points: list[complex] = []
    if K > e * e:
        # single loop, star shaped about the focus midpoint
        for k in range(nsamples):
            theta = 2.0 * math.pi * k / nsamples
            pt = _trace_ray(p, complex(p.r0), theta, level, None)
            if pt is None:
                warnings.warn(f"cassini_boundary: ray {k} at angle {theta:.4f} failed")
            else:
                points.append(pt)
    else:
        # two lobes; seed a fan at the midpoint of each real crossing pair
        r_out = math.sqrt(e * e + K)
        r_in = math.sqrt(max(e * e - K, 0.0))
        per_lobe = max(nsamples // 2, 4)
        for side in (+1.0, -1.0):
            center = complex(p.r0 + side * 0.5 * (r_in + r_out))
            for k in range(per_lobe):
                theta = 2.0 * math.pi * k / per_lobe
                # cap rays pointing at the other lobe at the symmetry line
                dx = math.cos(theta) * side
                cap = None
                if dx < 0.0:
                    cap = (center.real - p.r0) * side / (-dx)
                pt = _trace_ray(p, center, theta, level, cap)
                if pt is None:
                    warnings.warn(
                        f"cassini_boundary: lobe {side:+.0f} ray {k} failed"
                    )
                else:
                    points.append(pt)
    return points


@dataclass(frozen=True)
class RegionConstants:
    """Constants behind one certificate neighborhood.

    epsilon is the radius of the disk the Taylor bound lives on; m and N
    bound |nu_star| on it from below and above; d is half the relevant
    derivative of nu_star at the center; c scales the quadratic remainder.
    """

    center: complex
    epsilon: float
    m: float
    d: float
    delta: float
    N: float
    c: float


def _disk_extrema(p: LimitProfile, center: complex, epsilon: float) -> tuple[float, float]:
    # deterministic polar grid, 100 radii x 100 angles = 1e4 points,
    # outermost ring exactly on the boundary circle
    radii = np.linspace(0.0, epsilon, 100)
    angles = np.linspace(0.0, 2.0 * math.pi, 100, endpoint=False)
    grid = center + np.outer(radii, np.exp(1j * angles)).ravel()
    mods = np.abs(nu_star(p, grid))
    return float(np.min(mods)), float(np.max(mods))


def region_a1_constants(p: LimitProfile) -> RegionConstants:
    """Constants of the certificate neighborhoods around lam = 1."""
    epsilon = (1.0 - p.rho1) / 2.0
    m, sup = _disk_extrema(p, 1.0 + 0.0j, epsilon)
    d = float(nu_star_prime(p, 1.0)) / 2.0
    delta = min(m, d)
    N = sup + delta
    c = epsilon * epsilon / (4.0 * N)
    return RegionConstants(center=1.0 + 0.0j, epsilon=epsilon, m=m, d=d, delta=delta, N=N, c=c)


def region_a0_constants(p: LimitProfile) -> RegionConstants:
    """Constants of the certificate neighborhoods around lam = 0; only the
    undamped case has them, so alpha must be 0."""
    if p.alpha != 0.0:
        raise DomainError("the lam = 0 certificate exists only for alpha = 0")
    epsilon = p.rho2 / 2.0
    m, sup = _disk_extrema(p, 0.0 + 0.0j, epsilon)
    d = -float(nu_star_prime(p, 0.0)) / 2.0
    delta = min(m, d)
    N = sup + delta
    c = epsilon * epsilon / (4.0 * N)
    return RegionConstants(center=0.0 + 0.0j, epsilon=epsilon, m=m, d=d, delta=delta, N=N, c=c)


IN_A_LESS1 = "InA_less1"
IN_A_GREATER1 = "InA_greater1"
IN_A_GREATER0 = "InA_greater0"
IN_A_LESS0 = "InA_less0"
NEITHER = "Neither"


def region_A1(p: LimitProfile, lam: complex) -> str:
    """Membership test for the certificate neighborhoods at lam = 1.

    Points strictly left of Re lam = 1 with g1 < 1 are certified stable
    directions; points strictly right with g2 > 1 are certified unstable
    directions. lam = 1 itself always returns Neither since g1(1) = 1.
    """
    k = region_a1_constants(p)
    lam = complex(lam)
    if abs(lam - 1.0) >= k.epsilon / 2.0:
        return NEITHER
    g1 = abs(1.0 + k.d * (lam.real - 1.0) + 1j * 3.0 * k.d * lam.imag) + abs(lam - 1.0) ** 2 / k.c
    g2 = abs(1.0 + k.d * (lam.real - 1.0) + 1j * k.d * lam.imag) - abs(lam - 1.0) ** 2 / k.c
    if lam.real < 1.0 and g1 < 1.0:
        return IN_A_LESS1
    if lam.real > 1.0 and g2 > 1.0:
        return IN_A_GREATER1
    return NEITHER


def region_A0(p: LimitProfile, lam: complex) -> str:
    """Membership test for the certificate neighborhoods at lam = 0,
    alpha = 0 only. The sign convention flips relative to lam = 1: the
    right half side is the stable one here."""
    k = region_a0_constants(p)
    lam = complex(lam)
    if abs(lam) >= k.epsilon / 2.0:
        return NEITHER
    g1 = abs(1.0 - k.d * lam.real + 1j * 3.0 * k.d * lam.imag) + abs(lam) ** 2 / k.c
    g2 = abs(1.0 - k.d * lam.real + 1j * k.d * lam.imag) - abs(lam) ** 2 / k.c
    if lam.real > 0.0 and g1 < 1.0:
        return IN_A_GREATER0
    if lam.real < 0.0 and g2 > 1.0:
        return IN_A_LESS0
    return NEITHER
