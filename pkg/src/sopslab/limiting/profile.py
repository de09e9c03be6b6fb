"""Closed-form strong-feedback limit of the slowly oscillating cycle.

As the feedback gain grows, the rescaled periodic solution of

    x'(t) = -alpha x(t) + beta f(x(t - 1))

approaches a sawtooth-like profile that depends only on the decay rate
alpha and the saturation limits a, b of the nonlinearity. Everything about
that limit is explicit: the zero offsets q1, q2, the period, the profile
and its derivative, the square-wave drive, the atomic limit of the
linearized coefficient, and the quadratic multiplier map nu_star that
governs stability of networked copies. This module evaluates all of it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError

__all__ = [
    "LimitProfile",
    "MeasureAtom",
    "make_profile",
    "nu_star",
    "nu_star_prime",
    "nu_star_real_form",
    "pbar_star",
    "pbar_star_dot",
    "h_star",
    "mu_star_atoms",
    "hopf_beta",
]


@dataclass(frozen=True)
class LimitProfile:
    """Constants of the strong-feedback limit for one (alpha, a, b).

    The saturation limits are stored with a >= b; when the caller passed
    them the other way round ``swapped`` is True and the orbit is the
    reflection of the stored one. All stability quantities are invariant
    under that reflection.
    """

    alpha: float
    a: float
    b: float
    rho1: float
    rho2: float
    q1: float
    q2: float
    omega_star: float
    r0: float
    delta_disc: float
    swapped: bool = False


def make_profile(alpha: float, a: float, b: float) -> LimitProfile:
    """Assemble the limit constants for decay rate alpha and limits a, b.

    alpha = 0 takes an exact branch (q1 = b/a, q2 = a/b) rather than the
    limit of the logarithmic formulas.
    """
    if not (a > 0 and b > 0):
        raise DomainError("saturation limits a and b must be positive")
    if alpha < 0:
        raise DomainError("decay rate alpha must be nonnegative")
    swapped = a < b
    if swapped:
        a, b = b, a
    alpha = float(alpha)
    a = float(a)
    b = float(b)
    ealpha = math.exp(-alpha)
    rho1 = a / (a + b) * ealpha
    rho2 = b / (a + b) * ealpha
    if alpha > 0:
        # expm1 keeps the tiny-alpha limit q1 -> b/a free of cancellation.
        one_minus = -math.expm1(-alpha)
        q1 = math.log1p((b / a) * one_minus) / alpha
        q2 = math.log1p((a / b) * one_minus) / alpha
    else:
        q1 = b / a
        q2 = a / b
    r0 = 0.5 * ealpha
    delta_disc = ((rho1 - rho2) / 2.0) ** 2 - (1.0 - rho1) * (1.0 - rho2)
    return LimitProfile(
        alpha=alpha,
        a=a,
        b=b,
        rho1=rho1,
        rho2=rho2,
        q1=q1,
        q2=q2,
        omega_star=q1 + q2 + 2.0,
        r0=r0,
        delta_disc=delta_disc,
        swapped=swapped,
    )


def nu_star(p: LimitProfile, lam):
    """Limiting dominant multiplier map: a quadratic in the network
    eigenvalue lam, with roots at rho1 and rho2 and value 1 at lam = 1."""
    lam = np.asarray(lam)
    val = (lam - p.rho1) * (lam - p.rho2) / ((1.0 - p.rho1) * (1.0 - p.rho2))
    return val if val.ndim else val[()]


def nu_star_prime(p: LimitProfile, lam):
    """Derivative of :func:`nu_star` with respect to lam."""
    lam = np.asarray(lam)
    val = (2.0 * lam - p.rho1 - p.rho2) / ((1.0 - p.rho1) * (1.0 - p.rho2))
    return val if val.ndim else val[()]


def nu_star_real_form(p: LimitProfile, r):
    """Centered rewrite of nu_star on the real axis.

    nu_star(r) = -1 - (delta_disc - (r - r0)^2) / ((1-rho1)(1-rho2)),
    which makes the band structure visible: for delta_disc > 0 the value
    is exactly -1 at r = r0 +/- sqrt(delta_disc).
    """
    r = np.asarray(r, dtype=float)
    denom = (1.0 - p.rho1) * (1.0 - p.rho2)
    val = -1.0 - (p.delta_disc - (r - p.r0) ** 2) / denom
    return val if val.ndim else val[()]


def _wrap(t, left: float, period: float):
    """Shift t by whole periods into [left, left + period)."""
    return t - period * np.floor((t - left) / period)


def _decay_ratio(x):
    """(1 - exp(-x)) / x continued through x = 0, stable for tiny x."""
    x = np.asarray(x, dtype=float)
    safe = np.where(x == 0.0, 1.0, x)
    return np.where(x == 0.0, 1.0, -np.expm1(-safe) / safe)


def pbar_star(p: LimitProfile, t):
    """Limit profile value at time t (any real; the profile is periodic).

    Normalization: zero at t = -1 going up, zero at t = q1 going down,
    maximum b-side excursion at t = 0. Both arcs are written as
    slope * elapsed * decay_ratio, which covers alpha = 0 and denormal
    alpha in one expression.
    """
    t = np.asarray(t, dtype=float)
    tau = _wrap(t, -p.q2 - 1.0, p.omega_star)
    up = p.b * (tau + 1.0) * _decay_ratio(p.alpha * (tau + 1.0))
    down = -p.a * (tau - p.q1) * _decay_ratio(p.alpha * (tau - p.q1))
    val = np.where(tau <= 0.0, up, down)
    return val if val.ndim else val[()]


def pbar_star_dot(p: LimitProfile, t):
    """Derivative of the limit profile, right-continuous at its jumps
    (which sit at integer multiples of the period and at q1 + 1 shifted
    by periods)."""
    t = np.asarray(t, dtype=float)
    tau = _wrap(t, -p.q2 - 1.0, p.omega_star)
    if p.alpha > 0:
        up = p.b * np.exp(-p.alpha * (tau + 1.0))
        down = -p.a * np.exp(-p.alpha * (tau - p.q1))
    else:
        up = np.full_like(tau, p.b)
        down = np.full_like(tau, -p.a)
    val = np.where(tau < 0.0, up, down)
    return val if val.ndim else val[()]


def h_star(p: LimitProfile, t):
    """Square-wave drive of the limit profile: -a while the delayed
    profile value is positive, b while it is negative; right-continuous.

    The switches sit one delay after the zeros of the profile, so that
    d/dt pbar = -alpha pbar + h holds between them.
    """
    t = np.asarray(t, dtype=float)
    tau = _wrap(t, 0.0, p.omega_star)
    val = np.where(tau < p.q1 + 1.0, -p.a, p.b)
    return val if val.ndim else val[()]


@dataclass(frozen=True)
class MeasureAtom:
    time: float
    weight: float


def mu_star_atoms(p: LimitProfile, t0: float, t1: float) -> list[MeasureAtom]:
    """Atoms of the limiting linearization measure in the window (t0, t1].

    The measure is purely atomic: weight -(1 + a/b) at times -1 + k*period
    and -(1 + b/a) at times q1 + k*period, for every integer k.
    """
    if not (t1 > t0):
        return []
    om = p.omega_star
    atoms: list[MeasureAtom] = []
    for base, weight in ((-1.0, -(1.0 + p.a / p.b)), (p.q1, -(1.0 + p.b / p.a))):
        k_lo = math.floor((t0 - base) / om)
        k_hi = math.ceil((t1 - base) / om)
        for k in range(k_lo - 1, k_hi + 2):
            u = base + k * om
            if t0 < u <= t1:
                atoms.append(MeasureAtom(time=u, weight=weight))
    atoms.sort(key=lambda atom: atom.time)
    return atoms


def hopf_beta(alpha: float, fprime0: float = -1.0) -> float:
    """Gain at which the zero solution of the scalar delay equation first
    loses linear stability.

    For alpha > 0 the critical frequency theta0 is the unique root of
    theta + alpha * tan(theta) = 0 in (pi/2, pi); for alpha = 0 it is
    exactly pi/2. The returned gain is theta0 / (|fprime0| sin(theta0)).
    Bisection is run to 1e-12 absolute width.
    """
    if alpha < 0:
        raise DomainError("decay rate alpha must be nonnegative")
    if not fprime0 < 0:
        raise DomainError("fprime0 must be negative for negative feedback")
    if alpha == 0:
        theta0 = math.pi / 2.0
    else:
        lo = math.pi / 2.0 + 1e-15
        hi = math.pi - 1e-15
        # g(theta) = theta + alpha tan(theta) increases from -inf to pi
        while hi - lo > 1e-12:
            mid = 0.5 * (lo + hi)
            if mid + alpha * math.tan(mid) < 0.0:
                lo = mid
            else:
                hi = mid
        theta0 = 0.5 * (lo + hi)
    return theta0 / (abs(fprime0) * math.sin(theta0))
