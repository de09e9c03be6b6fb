"""Fixed-step integration of delay equations with unit delay.

The step size is locked to h = 1/N so the delayed argument always lands on
the stored grid: stage values one delay back are then either exact node
values or one cubic Hermite interpolation away, and the classical fourth
order of the Runge-Kutta scheme survives because the solution's smoothness
breakpoints (propagated images of the start time) are themselves grid
points.

Three integrators share the machinery: the scalar nonlinear equation, the
networked system with a row-stochastic coupling matrix, and the linear
variational equation along a stored orbit, whose coefficient
lam * beta * f'(p(t-1)) is evaluated once per step pattern and whose steps
are subdivided where the coefficient spikes near zeros of the delayed
orbit.
"""

from __future__ import annotations

import csv
import math
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, NumericsError
from .feedback import FeedbackFunction

__all__ = [
    "Trajectory",
    "integrate_scalar",
    "integrate_coupled",
    "integrate_variational",
    "trajectory_to_csv",
    "load_trajectory_csv",
]


def _check_step(h: float) -> int:
    """The step must be the reciprocal of a positive integer."""
    if not (0.0 < h <= 1.0):
        raise DomainError(f"step h must lie in (0, 1]; got {h}")
    N = round(1.0 / h)
    if N < 1 or abs(N * h - 1.0) > 1e-12:
        raise DomainError(
            f"step h must be 1/N for a positive integer N so the delay lands on the grid; got h = {h}"
        )
    return N


class Trajectory:
    """Dense solution record: node values and node derivatives on a uniform
    grid, starting one delay before the integration start time.

    Node k sits at time t_start - 1 + k h. Evaluation between nodes is
    cubic Hermite from the two bracketing nodes, which reproduces node
    values exactly and keeps interpolation error at the O(h^4) level of
    the integrator itself.
    """

    def __init__(self, t_start: float, h: float, values: np.ndarray, derivs: np.ndarray):
        values = np.atleast_2d(np.asarray(values).T).T  # (nodes,) -> (nodes, 1)
        derivs = np.atleast_2d(np.asarray(derivs).T).T
        if values.shape != derivs.shape:
            raise DomainError("values and derivs must have matching shapes")
        self.t_start = float(t_start)
        self.h = float(h)
        self.values = values
        self.derivs = derivs

    @property
    def n_components(self) -> int:
        return self.values.shape[1]

    @property
    def t0(self) -> float:
        """Time of the first stored node (one delay before t_start)."""
        return self.t_start - 1.0

    @property
    def t_end(self) -> float:
        return self.t0 + (self.values.shape[0] - 1) * self.h

    def times(self) -> np.ndarray:
        return self.t0 + self.h * np.arange(self.values.shape[0])

    def _locate(self, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        x = (t - self.t0) / self.h
        n_last = self.values.shape[0] - 1
        if np.any(x < -1e-9) or np.any(x > n_last + 1e-9):
            bad = t[(x < -1e-9) | (x > n_last + 1e-9)]
            raise DomainError(
                f"time {float(np.ravel(bad)[0]):.9g} outside trajectory coverage "
                f"[{self.t0:.9g}, {self.t_end:.9g}]"
            )
        k = np.clip(np.floor(x).astype(int), 0, n_last - 1)
        return k, x - k

    def eval(self, t):
        """Value at time t (scalar or array). The component axis is
        squeezed away for single-component trajectories."""
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        k, s = self._locate(t_arr)
        s = s[:, None]
        h00 = (1.0 + 2.0 * s) * (1.0 - s) ** 2
        h10 = s * (1.0 - s) ** 2
        h01 = s * s * (3.0 - 2.0 * s)
        h11 = s * s * (s - 1.0)
        out = (
            h00 * self.values[k]
            + h10 * self.h * self.derivs[k]
            + h01 * self.values[k + 1]
            + h11 * self.h * self.derivs[k + 1]
        )
        if self.n_components == 1:
            out = out[:, 0]
        return out if np.ndim(t) else out[0]

    def eval_deriv(self, t):
        """Interpolated time derivative at t, same shape rules as eval."""
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        k, s = self._locate(t_arr)
        s = s[:, None]
        d00 = 6.0 * s * (s - 1.0)
        d10 = (1.0 - s) * (1.0 - 3.0 * s)
        d01 = -6.0 * s * (s - 1.0)
        d11 = s * (3.0 * s - 2.0)
        out = (
            d00 * self.values[k] / self.h
            + d10 * self.derivs[k]
            + d01 * self.values[k + 1] / self.h
            + d11 * self.derivs[k + 1]
        )
        if self.n_components == 1:
            out = out[:, 0]
        return out if np.ndim(t) else out[0]


def _history_closure(history, n: int, t_start: float, dtype=float) -> Callable:
    """Normalize the accepted history forms into one callable of absolute
    time, valid on [t_start - 1, t_start], returning shape (n,)."""
    if callable(history):
        def fn(t):
            val = np.asarray(history(t - 0.0), dtype=dtype)
            val = np.broadcast_to(np.atleast_1d(val), (n,))
            return val
        return fn
    arr = np.asarray(history, dtype=dtype)
    if arr.ndim == 0:
        const = np.full(n, arr[()], dtype=dtype)
        return lambda t: const
    if arr.ndim == 1 and arr.shape[0] == n:
        const = arr.copy()
        return lambda t: const
    raise DomainError(
        f"history must be a constant, an (n,) vector, or a callable of time; got shape {arr.shape}"
    )


def _sample_history(hist_fn: Callable, t_start: float, h: float, N: int, n: int, dtype=float):
    times = t_start - 1.0 + h * np.arange(N + 1)
    vals = np.empty((N + 1, n), dtype=dtype)
    for i, t in enumerate(times):
        vals[i] = hist_fn(t)
    ders = np.gradient(vals, h, axis=0)
    return vals, ders


def _check_horizon(T: float, h: float) -> int:
    if T <= 0:
        raise DomainError("horizon T must be positive")
    nsteps = round(T / h)
    if nsteps < 1 or abs(nsteps * h - T) > 1e-9 * max(1.0, abs(T)):
        raise DomainError(f"horizon T = {T} must be a whole number of steps of h = {h}")
    return nsteps


def integrate_scalar(
    alpha: float,
    beta: float,
    f: FeedbackFunction,
    history,
    T: float,
    h: float = 1e-3,
    t_start: float = 0.0,
) -> Trajectory:
    """Integrate x'(t) = -alpha x(t) + beta f(x(t-1)) from t_start to
    t_start + T with the given history on [t_start - 1, t_start]."""
    N = _check_step(h)
    nsteps = _check_horizon(T, h)
    hist_fn = _history_closure(history, 1, t_start)
    stepper = _ScalarStepper(alpha, beta, f, hist_fn, t_start, h, N)
    stepper.extend(nsteps)
    return stepper.to_trajectory()


class _ScalarStepper:
    """Grow-able scalar integration; the periodic-orbit search extends it
    chunk by chunk instead of restarting."""

    def __init__(self, alpha, beta, f, hist_fn, t_start, h, N):
        self.alpha = float(alpha)
        self.beta = float(beta)
        self.f = f
        self.hist_fn = hist_fn
        self.t_start = float(t_start)
        self.h = float(h)
        self.N = N
        vals, ders = _sample_history(hist_fn, t_start, h, N, 1)
        self.vals = [float(v) for v in vals[:, 0]]
        self.ders = [float(d) for d in ders[:, 0]]
        # right-sided derivative at the seam comes from the equation
        self.ders[N] = self._rhs(self.vals[N], self.vals[0])
        self.k = 0  # completed steps

    def _rhs(self, x: float, xd: float) -> float:
        return -self.alpha * x + self.beta * float(self.f(xd))

    def _delayed(self, idx: int, frac: float) -> float:
        """State one delay behind stage time node idx + frac."""
        if idx + frac <= self.N:
            # still inside the supplied history: evaluate it exactly
            return float(self.hist_fn(self.t_start - 1.0 + (idx + frac) * self.h)[0])
        if frac == 0.0:
            return self.vals[idx]
        v0, v1 = self.vals[idx], self.vals[idx + 1]
        d0, d1 = self.ders[idx], self.ders[idx + 1]
        s = frac
        return (
            (1.0 + 2.0 * s) * (1.0 - s) ** 2 * v0
            + s * (1.0 - s) ** 2 * self.h * d0
            + s * s * (3.0 - 2.0 * s) * v1
            + s * s * (s - 1.0) * self.h * d1
        )

    def extend(self, nsteps: int) -> None:
        h = self.h
        alpha, beta, f = self.alpha, self.beta, self.f
        for _ in range(nsteps):
            k = self.k
            x = self.vals[self.N + k]
            u0 = self._delayed(k, 0.0) if k > 0 else self.vals[0]
            um = self._delayed(k, 0.5)
            u1 = self._delayed(k + 1, 0.0) if k + 1 <= self.k + self.N else self.vals[k + 1]
            fu0 = beta * float(f(u0))
            fum = beta * float(f(um))
            fu1 = beta * float(f(u1))
            k1 = -alpha * x + fu0
            k2 = -alpha * (x + 0.5 * h * k1) + fum
            k3 = -alpha * (x + 0.5 * h * k2) + fum
            k4 = -alpha * (x + h * k3) + fu1
            x_new = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if math.isnan(x_new) or math.isinf(x_new):
                raise NumericsError(
                    f"non-finite state at t = {self.t_start + (k + 1) * h:.6g}"
                )
            self.vals.append(x_new)
            self.ders.append(-alpha * x_new + fu1)
            self.k += 1

    def to_trajectory(self) -> Trajectory:
        return Trajectory(
            self.t_start,
            self.h,
            np.asarray(self.vals),
            np.asarray(self.ders),
        )


def _check_row_stochastic(G) -> np.ndarray:
    G = np.asarray(getattr(G, "entries", G), dtype=float)
    if G.ndim != 2 or G.shape[0] != G.shape[1] or G.shape[0] < 1:
        raise DomainError("coupling matrix must be square")
    rows = G.sum(axis=1)
    if np.max(np.abs(rows - 1.0)) > 1e-12:
        worst = int(np.argmax(np.abs(rows - 1.0)))
        raise DomainError(
            f"coupling matrix rows must sum to 1 within 1e-12; row {worst} sums to {rows[worst]!r}"
        )
    return G


def integrate_coupled(
    alpha: float,
    beta: float,
    f: FeedbackFunction,
    G,
    history,
    T: float,
    h: float = 1e-3,
    t_start: float = 0.0,
) -> Trajectory:
    """Integrate the network x_j' = -alpha x_j + beta sum_k G_jk f(x_k(t-1)).

    G must have unit row sums: that is what lets a synchronized state obey
    the scalar equation.
    """
    G = _check_row_stochastic(G)
    n = G.shape[0]
    N = _check_step(h)
    nsteps = _check_horizon(T, h)
    hist_fn = _history_closure(history, n, t_start)
    vals, ders = _sample_history(hist_fn, t_start, h, N, n)

    alpha = float(alpha)
    beta = float(beta)
    out_v = np.empty((N + nsteps + 1, n))
    out_d = np.empty_like(out_v)
    out_v[: N + 1] = vals
    out_d[: N + 1] = ders

    def rhs(x, xd):
        return -alpha * x + beta * (G @ np.asarray(f(xd)))

    out_d[N] = rhs(out_v[N], out_v[0])

    def delayed(idx: int, frac: float):
        if idx + frac <= N:
            return hist_fn(t_start - 1.0 + (idx + frac) * h)
        if frac == 0.0:
            return out_v[idx]
        s = frac
        return (
            (1.0 + 2.0 * s) * (1.0 - s) ** 2 * out_v[idx]
            + s * (1.0 - s) ** 2 * h * out_d[idx]
            + s * s * (3.0 - 2.0 * s) * out_v[idx + 1]
            + s * s * (s - 1.0) * h * out_d[idx + 1]
        )

    for k in range(nsteps):
        x = out_v[N + k]
        u0 = delayed(k, 0.0)
        um = delayed(k, 0.5)
        u1 = delayed(k + 1, 0.0)
        k1 = rhs(x, u0)
        k2 = -alpha * (x + 0.5 * h * k1) + beta * (G @ np.asarray(f(um)))
        k3 = -alpha * (x + 0.5 * h * k2) + beta * (G @ np.asarray(f(um)))
        k4 = -alpha * (x + h * k3) + beta * (G @ np.asarray(f(u1)))
        x_new = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(x_new)):
            raise NumericsError(f"non-finite state at t = {t_start + (k + 1) * h:.6g}")
        out_v[N + k + 1] = x_new
        out_d[N + k + 1] = rhs(x_new, u1)

    return Trajectory(t_start, h, out_v, out_d)


# --- linear variational machinery -----------------------------------------

_HERMITE_CACHE: dict[int, np.ndarray] = {}


def _hermite_rows(q: int) -> np.ndarray:
    """Hermite basis weights at the RK4 stage offsets of q equal substeps:
    rows indexed by (substep, stage) with stage fractions 0, 1/2, 1."""
    rows = _HERMITE_CACHE.get(q)
    if rows is None:
        fracs = (np.arange(q)[:, None] + np.array([0.0, 0.5, 1.0])[None, :]) / q
        s = fracs.reshape(-1)
        rows = np.stack(
            [
                (1.0 + 2.0 * s) * (1.0 - s) ** 2,
                s * (1.0 - s) ** 2,
                s * s * (3.0 - 2.0 * s),
                s * s * (s - 1.0),
            ],
            axis=1,
        ).reshape(q, 3, 4)
        _HERMITE_CACHE[q] = rows
    return rows


class _VariationalPlan:
    """Per-step coefficient table for y' = -alpha y + lam c(t) y(t-1) with
    c(t) = beta f'(p(t-1)), plus the sub-step counts chosen where the
    delayed orbit passes near zero and c spikes."""

    def __init__(self, alpha: float, nsteps: int, h: float, c_nodes, c_half, spiked):
        self.alpha = alpha
        self.nsteps = nsteps
        self.h = h
        self.c_nodes = c_nodes  # (nsteps + 1,)
        self.c_half = c_half  # (nsteps,)
        self.spiked = spiked  # dict step -> (q, c-array of shape (q, 3))


def _build_plan(
    alpha: float,
    beta: float,
    f: FeedbackFunction,
    p_of: Callable[[np.ndarray], np.ndarray],
    s: float,
    nsteps: int,
    h: float,
) -> _VariationalPlan:
    node_times = s - 1.0 + h * np.arange(nsteps + 1)
    p_nodes = p_of(node_times)
    p_half = p_of(node_times[:-1] + 0.5 * h)
    c_nodes = beta * np.asarray(f.deriv(p_nodes))
    c_half = beta * np.asarray(f.deriv(p_half))

    threshold = 5.0 * f.a / beta
    lo = np.minimum(np.abs(p_nodes[:-1]), np.abs(p_nodes[1:]))
    crossing = p_nodes[:-1] * p_nodes[1:] < 0.0
    near = (lo < threshold) | crossing | (np.abs(p_half) < threshold)
    q = max(1, math.ceil(beta * h * f.max_abs_deriv / 0.1))
    spiked: dict[int, tuple[int, np.ndarray]] = {}
    if q > 1:
        for k in np.nonzero(near)[0]:
            fracs = (np.arange(q)[:, None] + np.array([0.0, 0.5, 1.0])[None, :]) / q
            times = s - 1.0 + k * h + h * fracs
            spiked[int(k)] = (q, beta * np.asarray(f.deriv(p_of(times.reshape(-1)))).reshape(q, 3))
    return _VariationalPlan(float(alpha), nsteps, h, c_nodes, c_half, spiked)


def _variational_batch(
    lam: complex,
    plan: _VariationalPlan,
    hist_fn: Callable[[float], np.ndarray],
    s: float,
    N: int,
    mix: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Run the variational step loop for a whole batch of histories at
    once. hist_fn(t) must return the batch of history values at absolute
    time t in [s - 1, s]; any leading axes are carried through, so a
    networked state of shape (n, batch) works as well. When mix is given
    it multiplies the delayed term from the left (the coupling matrix of
    the networked variational equation). Returns node values and node
    derivatives of shape (N + nsteps + 1, *state), complex."""
    alpha, h, nsteps = plan.alpha, plan.h, plan.nsteps
    lam = complex(lam)
    state0 = np.asarray(hist_fn(s), dtype=complex)
    Y = np.empty((N + nsteps + 1,) + state0.shape, dtype=complex)
    Dv = np.empty_like(Y)
    hist_times = s - 1.0 + h * np.arange(N + 1)
    for i, t in enumerate(hist_times):
        Y[i] = hist_fn(t)
    Dv[:N] = np.gradient(Y[: N + 1], h, axis=0)[:N]

    def delayed_exact(time: float) -> np.ndarray:
        return np.asarray(hist_fn(time), dtype=complex)

    def lagged(v: np.ndarray) -> np.ndarray:
        return v if mix is None else mix @ v

    c0_all = plan.c_nodes
    Dv[N] = -alpha * Y[N] + lam * c0_all[0] * lagged(delayed_exact(s - 1.0))

    for k in range(nsteps):
        entry = plan.spiked.get(k)
        if entry is None:
            q, carr = 1, None
        else:
            q, carr = entry
        hq = h / q
        if k < N:
            # delayed interval still inside the supplied history
            base = s - 1.0 + k * h
            reads = [
                (
                    delayed_exact(base + (j + 0.0) / q * h),
                    delayed_exact(base + (j + 0.5) / q * h),
                    delayed_exact(base + (j + 1.0) / q * h),
                )
                for j in range(q)
            ]
        else:
            rows = _hermite_rows(q)
            v0, d0 = Y[k], Dv[k]
            v1, d1 = Y[k + 1], Dv[k + 1]
            reads = []
            for j in range(q):
                trio = []
                for st in range(3):
                    w = rows[j, st]
                    trio.append(w[0] * v0 + w[1] * h * d0 + w[2] * v1 + w[3] * h * d1)
                reads.append(tuple(trio))
        y = Y[N + k]
        for j in range(q):
            if carr is None:
                cs = (lam * c0_all[k], lam * plan.c_half[k], lam * c0_all[k + 1])
            else:
                cj = carr[j]
                cs = (lam * cj[0], lam * cj[1], lam * cj[2])
            yd0, ydm, yd1 = (lagged(r) for r in reads[j])
            k1 = -alpha * y + cs[0] * yd0
            k2 = -alpha * (y + 0.5 * hq * k1) + cs[1] * ydm
            k3 = -alpha * (y + 0.5 * hq * k2) + cs[1] * ydm
            k4 = -alpha * (y + hq * k3) + cs[2] * yd1
            y = y + hq / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            last_read = yd1
        if not np.all(np.isfinite(y)):
            raise NumericsError(f"non-finite variational state at t = {s + (k + 1) * h:.6g}")
        Y[N + k + 1] = y
        last_c = lam * (c0_all[k + 1] if carr is None else carr[-1][2])
        Dv[N + k + 1] = -alpha * y + last_c * last_read
    return Y, Dv


def integrate_variational(
    lam: complex,
    p_traj: Trajectory,
    alpha: float,
    beta: float,
    f: FeedbackFunction,
    s: float,
    psi: Callable[[float], complex],
    T: float,
    h: float | None = None,
) -> Trajectory:
    """Integrate y'(t) = -alpha y(t) + lam beta f'(p(t-1)) y(t-1) from
    phase s with history psi on [-1, 0] (psi(theta) pairs with absolute
    time s + theta).

    p_traj must cover [s - 1, s + T]; the integration step must equal the
    orbit's step or subdivide it evenly. The horizon T may be any positive
    real; the grid extends to the next whole step past it.
    """
    if p_traj.n_components != 1:
        raise DomainError("variational integration expects a scalar orbit")
    if h is None:
        h = p_traj.h
    N = _check_step(h)
    ratio = round(p_traj.h / h)
    if ratio < 1 or abs(ratio * h - p_traj.h) > 1e-12:
        raise DomainError(
            f"step h = {h} must equal the orbit step {p_traj.h} or subdivide it evenly"
        )
    if T <= 0:
        raise DomainError("horizon T must be positive")
    if p_traj.t0 > s - 1.0 + 1e-12 or p_traj.t_end < s + T - 1e-12:
        raise DomainError(
            f"orbit trajectory covers [{p_traj.t0:.6g}, {p_traj.t_end:.6g}] but "
            f"[{s - 1.0:.6g}, {s + T:.6g}] is required"
        )
    nsteps = math.ceil(T / h - 1e-9)

    def p_of(times: np.ndarray) -> np.ndarray:
        return np.asarray(p_traj.eval(np.minimum(times, p_traj.t_end)))

    plan = _build_plan(alpha, beta, f, p_of, s, nsteps, h)

    def hist_fn(t: float) -> np.ndarray:
        return np.atleast_1d(np.asarray(psi(t - s), dtype=complex))

    Y, Dv = _variational_batch(lam, plan, hist_fn, s, N)
    return Trajectory(s, h, Y[:, 0], Dv[:, 0])


def trajectory_to_csv(traj: Trajectory, path, include_derivs: bool = False) -> None:
    """Write node times, values, and optionally derivatives as CSV with
    header t,x1..xn[,dx1..dxn]. Full float precision, so a re-import is
    bit-faithful."""
    n = traj.n_components
    header = ["t"] + [f"x{j + 1}" for j in range(n)]
    if include_derivs:
        header += [f"dx{j + 1}" for j in range(n)]
    times = traj.times()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i, t in enumerate(times):
            row = [f"{t:.17g}"] + [f"{v:.17g}" for v in np.real(traj.values[i])]
            if include_derivs:
                row += [f"{d:.17g}" for d in np.real(traj.derivs[i])]
            writer.writerow(row)


def load_trajectory_csv(path) -> dict[str, np.ndarray]:
    """Read a CSV produced by :func:`trajectory_to_csv`; returns a dict of
    column name to array."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(c) for c in row] for row in reader if row]
    data = np.asarray(rows)
    if data.ndim != 2 or data.shape[1] != len(header):
        raise DomainError(f"malformed trajectory CSV {path}")
    return {name: data[:, j] for j, name in enumerate(header)}
