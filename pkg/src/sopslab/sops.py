"""Locate the slowly oscillating periodic solution of the scalar equation
and measure how close its rescaled shape is to the large-gain limit.

The finder leans on the fact that for gain above the first bifurcation
value the attracting periodic orbit pulls in any positive constant
history, so a plain forward integration plus a periodicity check is a
reliable and parameter-free search. The returned orbit is retimed so its
ascending zero sits at t = -1; then p > 0 on (-1, z1), p < 0 on (z1, z2),
and the period is z2 + 1.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .ddesolve import Trajectory, _check_step, _history_closure, _ScalarStepper
from .errors import DomainError, NonConvergenceError, NumericsError
from .feedback import FeedbackFunction
from .limiting import LimitProfile, hopf_beta, pbar_star, pbar_star_dot

__all__ = [
    "Sops",
    "NormalizedSops",
    "ResidualReport",
    "find_sops",
    "normalize_sops",
    "limit_residuals",
    "export_sops",
]


@dataclass
class Sops:
    """One period of a slowly oscillating periodic solution.

    t, p, pdot hold the integrator-grid samples of one period in the
    retimed clock (t runs from -1 to omega - 1). The full source
    trajectory is kept privately so the orbit can be evaluated densely
    and periodically at any time.
    """

    omega: float
    z1: float
    z2: float
    t: np.ndarray
    p: np.ndarray
    pdot: np.ndarray
    alpha: float
    beta: float
    feedback: FeedbackFunction
    residual: float
    h: float
    _traj: Trajectory = field(repr=False)
    _anchor: float = field(repr=False)

    def _absolute(self, t) -> np.ndarray:
        tau = -1.0 + np.mod(np.asarray(t, dtype=float) + 1.0, self.omega)
        return self._anchor + tau

    def p_at(self, t):
        """Periodic orbit value at any retimed time (scalar or array)."""
        out = self._traj.eval(self._absolute(t))
        return out if np.ndim(t) else float(out)

    def pdot_at(self, t):
        out = self._traj.eval_deriv(self._absolute(t))
        return out if np.ndim(t) else float(out)


@dataclass(frozen=True)
class NormalizedSops:
    """Samples of the orbit divided by the gain, the shape that has a
    finite limit as the gain grows."""

    t: np.ndarray
    pbar: np.ndarray
    pbardot: np.ndarray
    omega: float
    z1: float
    z2: float
    alpha: float
    beta: float


@dataclass(frozen=True)
class ResidualReport:
    """Distance of a found orbit from the limiting sawtooth profile: zero
    times, period, sup norm of the rescaled orbit over one period, and
    sup norm of its derivative away from eps-windows around the times
    where the delayed limit profile vanishes (the derivative jumps
    there, so uniform convergence can only hold off those windows)."""

    z1_err: float
    z2_err: float
    omega_err: float
    pbar_sup_err: float
    pbardot_sup_err: float

    def as_dict(self) -> dict[str, float]:
        return {
            "z1_err": self.z1_err,
            "z2_err": self.z2_err,
            "omega_err": self.omega_err,
            "pbar_sup_err": self.pbar_sup_err,
            "pbardot_sup_err": self.pbardot_sup_err,
        }


def _upward_crossings(times: np.ndarray, vals: np.ndarray, t_min: float, h: float) -> np.ndarray:
    v0, v1 = vals[:-1], vals[1:]
    hit = (v0 < 0.0) & (v1 >= 0.0) & (times[:-1] >= t_min)
    idx = np.nonzero(hit)[0]
    return times[idx] + h * (-v0[idx]) / (v1[idx] - v0[idx])


def default_step(beta: float) -> float:
    """Step small enough that the sharp switching layers of the orbit
    (width of order 1/beta) are resolved by a few steps."""
    return min(1e-3, 1.0 / (4 * math.ceil(beta)))


def find_sops(
    alpha: float,
    beta: float,
    f: FeedbackFunction,
    h: float | None = None,
    tol: float = 1e-6,
    transient: float = 50.0,
    max_time: float = 500.0,
) -> Sops:
    """Find the attracting slowly oscillating periodic orbit of
    x'(t) = -alpha x(t) + beta f(x(t-1)).

    Integrates from the constant history 1, discards a transient, then
    reads the period off consecutive ascending zero crossings (linear
    inverse interpolation between grid nodes, averaged over the last
    three cycles) and accepts once the sup periodicity defect over one
    period drops below tol. Integration continues period by period until
    acceptance or until max_time units past the transient, at which point
    a non-convergence error carrying the best residual is raised.
    """
    alpha = float(alpha)
    beta = float(beta)
    if alpha < 0:
        raise DomainError(f"decay rate alpha must be nonnegative; got {alpha}")
    beta_min = hopf_beta(alpha, f.fprime0)
    if not beta > beta_min:
        raise DomainError(
            f"beta = {beta:g} is at or below the first bifurcation value {beta_min:.6g}; "
            "there is no slowly oscillating periodic orbit to find"
        )
    if h is None:
        h = default_step(beta)
    if tol <= 0:
        raise DomainError("tol must be positive")
    N = _check_step(h)
    transient = max(float(transient), 2.0)
    max_end = transient + float(max_time)

    stepper = _ScalarStepper(alpha, beta, f, _history_closure(1.0, 1, 0.0), 0.0, h, N)
    stepper.extend(int(round(transient / h)))

    best = math.inf
    omega = None
    while True:
        vals = np.asarray(stepper.vals)
        times = -1.0 + h * np.arange(vals.size)
        cross = _upward_crossings(times, vals, transient, h)
        if cross.size >= 5:
            omega = (cross[-1] - cross[-4]) / 3.0
            traj = stepper.to_trajectory()
            t0 = cross[-1] - 2.0 * omega
            i_lo = int(math.ceil((t0 + 1.0) / h - 1e-9))
            i_hi = int(math.floor((t0 + omega + 1.0) / h + 1e-9))
            window = times[i_lo : i_hi + 1]
            res = float(np.max(np.abs(traj.eval(window + omega) - vals[i_lo : i_hi + 1])))
            best = min(best, res)
            if res < tol:
                return _assemble(traj, vals, times, cross, omega, res, alpha, beta, f, h)
        if times[-1] >= max_end - 0.5 * h:
            raise NonConvergenceError(
                f"periodicity defect stalled at {best:.3e} (tol = {tol:g}) after "
                f"{max_time:g} time units past the transient",
                best_residual=None if math.isinf(best) else best,
            )
        span = 3.0 * omega if omega is not None else 10.0
        chunk = min(span, max_end - times[-1] + h)
        stepper.extend(max(1, int(math.ceil(chunk / h))))


def _assemble(
    traj: Trajectory,
    vals: np.ndarray,
    times: np.ndarray,
    cross: np.ndarray,
    omega: float,
    residual: float,
    alpha: float,
    beta: float,
    f: FeedbackFunction,
    h: float,
) -> Sops:
    c0 = float(cross[-4])
    anchor = c0 + 1.0
    i_lo = int(math.ceil((c0 + 1.0) / h - 1e-9))
    i_hi = int(math.floor((c0 + omega + 1.0) / h + 1e-9))
    t_nodes = times[i_lo : i_hi + 1]
    p = traj.values[i_lo : i_hi + 1, 0].copy()
    pdot = traj.derivs[i_lo : i_hi + 1, 0].copy()

    v0 = traj.values[i_lo:i_hi, 0]
    v1 = traj.values[i_lo + 1 : i_hi + 1, 0]
    down = np.nonzero((v0 > 0.0) & (v1 <= 0.0))[0]
    if down.size == 0:
        raise NumericsError("no descending zero within one period; the orbit is not slowly oscillating")
    j = int(down[0])
    t_down = t_nodes[j] + h * v0[j] / (v0[j] - v1[j])
    z1 = float(t_down - anchor)
    z2 = omega - 1.0
    if not (z1 > 0.0 and z2 - z1 > 1.0):
        raise NumericsError(
            f"found orbit violates slow oscillation: z1 = {z1:.6g}, z2 = {z2:.6g} "
            "(zeros must be separated by more than the delay)"
        )

    s = Sops(
        omega=float(omega),
        z1=z1,
        z2=float(z2),
        t=t_nodes - anchor,
        p=p,
        pdot=pdot,
        alpha=alpha,
        beta=beta,
        feedback=f,
        residual=float(residual),
        h=h,
        _traj=traj,
        _anchor=anchor,
    )
    p_m1 = s.p_at(-1.0)
    pd_m1 = s.pdot_at(-1.0)
    if not (pd_m1 > 0.0 and abs(p_m1) <= 10.0 * h * abs(pd_m1)):
        raise NumericsError(
            f"phase normalization failed: p(-1) = {p_m1:.3e} with pdot(-1) = {pd_m1:.3e}"
        )
    return s


def normalize_sops(s: Sops) -> NormalizedSops:
    """Divide the orbit samples by the gain."""
    return NormalizedSops(
        t=s.t.copy(),
        pbar=s.p / s.beta,
        pbardot=s.pdot / s.beta,
        omega=s.omega,
        z1=s.z1,
        z2=s.z2,
        alpha=s.alpha,
        beta=s.beta,
    )


def _circular_distance(t: np.ndarray, offset: float, period: float) -> np.ndarray:
    return np.abs(np.mod(t - offset + period / 2.0, period) - period / 2.0)


def limit_residuals(s: Sops, p: LimitProfile, eps: float) -> ResidualReport:
    """Compare a found orbit with the limiting sawtooth profile.

    The derivative comparison skips eps-windows around the two families
    of times per period where the delayed limit profile vanishes, since
    the limit derivative jumps there. eps must lie in (0, q1/2) with q1
    the positive-arc parameter in the orientation of the orbit.
    """
    if p.swapped:
        q1_eff, q2_eff = p.q2, p.q1
    else:
        q1_eff, q2_eff = p.q1, p.q2
    if not (0.0 < eps < q1_eff / 2.0):
        raise DomainError(f"eps must lie in (0, {q1_eff / 2.0:.6g}); got {eps}")
    ns = normalize_sops(s)
    keep = ns.t <= s.omega - 1.0 + 1e-12
    t = ns.t[keep]
    if p.swapped:
        ref_p = -pbar_star(p, t + p.q1 + 1.0)
        ref_d = -pbar_star_dot(p, t + p.q1 + 1.0)
    else:
        ref_p = pbar_star(p, t)
        ref_d = pbar_star_dot(p, t)

    pbar_sup = float(np.max(np.abs(ns.pbar[keep] - ref_p)))
    d_zero = _circular_distance(t, 0.0, p.omega_star)
    d_drop = _circular_distance(t, q1_eff + 1.0, p.omega_star)
    off_windows = (d_zero >= eps) & (d_drop >= eps)
    if not np.any(off_windows):
        raise DomainError("eps-windows cover the whole period; decrease eps")
    pdot_sup = float(np.max(np.abs(ns.pbardot[keep][off_windows] - ref_d[off_windows])))

    return ResidualReport(
        z1_err=abs(s.z1 - q1_eff),
        z2_err=abs(s.z2 - (q1_eff + q2_eff + 1.0)),
        omega_err=abs(s.omega - p.omega_star),
        pbar_sup_err=pbar_sup,
        pbardot_sup_err=pdot_sup,
    )


def export_sops(s: Sops, csv_path, sidecar_path=None) -> None:
    """Write one period as CSV `t,p,pdot` plus a JSON sidecar holding the
    scalar summary {omega, z1, z2, residual, alpha, beta}."""
    with open(csv_path, "w", newline="") as fh:
        fh.write("t,p,pdot\n")
        for t, pv, dv in zip(s.t, s.p, s.pdot):
            fh.write(f"{t:.17g},{pv:.17g},{dv:.17g}\n")
    if sidecar_path is None:
        sidecar_path = str(csv_path) + ".json"
    summary = {
        "omega": s.omega,
        "z1": s.z1,
        "z2": s.z2,
        "residual": s.residual,
        "alpha": s.alpha,
        "beta": s.beta,
    }
    with open(sidecar_path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
