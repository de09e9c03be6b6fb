"""Exact solutions of the linearization around the limiting cycle.

In the strong-feedback limit the linearized delay equation degenerates into
pure exponential decay punctuated by jumps: one jump per atom of the
limiting coefficient measure, each jump feeding back the solution value one
delay earlier scaled by the network eigenvalue lam and the atom weight.
Over one period this defines a rank-one return map whose single nonzero
eigenvalue is nu_star(lam). Because everything here is closed form, these
routines serve as machine-precision oracles for the finite-gain monodromy
discretization.
"""

from __future__ import annotations

import math
from typing import Callable

from ..errors import DomainError
from .profile import LimitProfile, mu_star_atoms

__all__ = [
    "limiting_variational_solve",
    "limiting_monodromy_dominant",
    "variational_growth_bound",
]


def _check_phase(p: LimitProfile, s: float) -> None:
    if not (-p.q1 < s < 0.0):
        raise DomainError(
            f"start phase s must lie in (-q1, 0) = ({-p.q1:.6g}, 0); got {s:.6g}"
        )


def limiting_variational_solve(
    p: LimitProfile,
    lam: complex,
    s: float,
    psi: Callable[[float], complex],
    t: float,
) -> complex:
    """Value at time t of the limiting linearized solution started at
    phase s with history psi on [-1, 0].

    Between jump times the solution decays like exp(-alpha dt); when t
    crosses one delay past an atom of the limiting measure the solution
    gains lam * weight * (its own value at the atom time). Valid for
    t in [s - 1, s + omega_star].
    """
    _check_phase(p, s)
    lam = complex(lam)
    if not (s - 1.0 <= t <= s + p.omega_star):
        raise DomainError(
            f"t must lie in [s - 1, s + omega_star] = [{s - 1.0:.6g}, {s + p.omega_star:.6g}]"
        )
    if t <= s:
        return complex(psi(t - s))

    alpha = p.alpha

    def delayed(u: float, t_last: float, y_last: complex) -> complex:
        if u <= s:
            return complex(psi(u - s))
        return y_last * math.exp(-alpha * (u - t_last))

    t_last = s
    y_last = complex(psi(0.0))
    for atom in mu_star_atoms(p, s - 1.0, t - 1.0):
        tj = atom.time + 1.0
        y_before = y_last * math.exp(-alpha * (tj - t_last))
        y_last = y_before + lam * atom.weight * delayed(atom.time, t_last, y_last)
        t_last = tj
    return y_last * math.exp(-alpha * (t - t_last))


def limiting_monodromy_dominant(p: LimitProfile, lam: complex, s: float | None = None) -> complex:
    """Unique nonzero eigenvalue of the limiting one-period return map.

    Evaluated through the rank-one gain of the return map applied to its
    eigenfunction exp(-alpha (theta + 1)), not through the nu_star
    quadratic, so the two routes cross-check each other. The result is
    independent of the start phase s.
    """
    if s is None:
        s = -p.q1 / 2.0
    _check_phase(p, s)
    lam = complex(lam)
    alpha, a, b = p.alpha, p.a, p.b
    z1 = math.exp(-alpha)  # eigenfunction at theta = 0
    z2 = math.exp(alpha * s)  # eigenfunction at theta = -1 - s
    gain = -(z1 - lam * z2 * (1.0 + a / b) * math.exp(-alpha * s)) * (
        (lam - p.rho1) / (1.0 - p.rho2)
    ) * math.exp(-alpha * (p.q2 + 1.0))
    return gain * math.exp(alpha)


def variational_growth_bound(p: LimitProfile, lam: complex) -> float:
    """Bound for |solution| / sup|psi| over one period: the product of the
    two worst-case jump amplifications."""
    mag = abs(complex(lam))
    return (1.0 + mag * (1.0 + p.a / p.b)) * (1.0 + mag * (1.0 + p.b / p.a))
