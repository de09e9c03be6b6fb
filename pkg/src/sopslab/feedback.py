"""Negative-feedback nonlinearities and checks of the standing assumptions.

Every solver in this package consumes a :class:`FeedbackFunction`: a smooth
decreasing sigmoid f with f(0) = 0, f'(0) < 0, xi * f(xi) < 0 away from the
origin, and saturation limits f(+inf) = -a, f(-inf) = b for positive a, b.
The canonical family is the piecewise-scaled tanh built by
:func:`tanh_feedback`; measured response curves can be brought in through
:func:`load_feedback_table`.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import PchipInterpolator

from .errors import DomainError

__all__ = [
    "FeedbackFunction",
    "ValidationReport",
    "tanh_feedback",
    "tabulated_feedback",
    "load_feedback_table",
    "validate_assumption",
]


@dataclass(frozen=True)
class FeedbackFunction:
    """A feedback nonlinearity together with its derivative and limits.

    Parameters
    ----------
    fun, deriv : callable
        Vectorized evaluations of f and f'. Both must accept floats and
        numpy arrays.
    a, b : float
        Saturation magnitudes: f(+inf) = -a and f(-inf) = b.
    fprime0 : float
        Slope at the origin, negative.
    max_abs_deriv : float
        Upper bound for |f'| on the real line, used to budget sub-steps
        when the variational coefficient spikes. For the tanh family the
        slope is largest at the origin, so this defaults to |fprime0|.
    """

    fun: Callable
    deriv: Callable
    a: float
    b: float
    fprime0: float
    max_abs_deriv: float = field(default=0.0)

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise DomainError("saturation limits a and b must be positive")
        if self.max_abs_deriv == 0.0:
            object.__setattr__(self, "max_abs_deriv", abs(self.fprime0))

    def __call__(self, xi):
        return self.fun(xi)


def tanh_feedback(a: float = 1.0, b: float = 1.0) -> FeedbackFunction:
    """Piecewise tanh with saturation -a on the right and b on the left.

    f(xi) = -a tanh(xi / a) for xi >= 0 and -b tanh(xi / b) for xi < 0.
    Both branches have slope -1 at the origin, so the glued function is
    continuously differentiable with f'(0) = -1.
    """
    if a <= 0 or b <= 0:
        raise DomainError("tanh_feedback requires a > 0 and b > 0")

    def fun(xi):
        xi = np.asarray(xi, dtype=float)
        val = np.where(xi >= 0.0, -a * np.tanh(xi / a), -b * np.tanh(xi / b))
        return val if val.ndim else float(val)

    def deriv(xi):
        # sech^2 written as 1 - tanh^2 to stay finite for large arguments
        xi = np.asarray(xi, dtype=float)
        t = np.where(xi >= 0.0, np.tanh(xi / a), np.tanh(xi / b))
        val = -(1.0 - t * t)
        return val if val.ndim else float(val)

    return FeedbackFunction(fun=fun, deriv=deriv, a=float(a), b=float(b), fprime0=-1.0)


def tabulated_feedback(xi: np.ndarray, f: np.ndarray, fprime: np.ndarray) -> FeedbackFunction:
    """Build a feedback function from sampled values by monotone cubic
    interpolation. Outside the tabulated range the value clamps to the
    saturation limits read off the table edges and the slope clamps to 0.
    """
    xi = np.asarray(xi, dtype=float)
    f = np.asarray(f, dtype=float)
    fprime = np.asarray(fprime, dtype=float)
    if xi.ndim != 1 or xi.size < 4:
        raise DomainError("need a 1-d table with at least 4 rows")
    if f.shape != xi.shape or fprime.shape != xi.shape:
        raise DomainError("xi, f, fprime columns must have equal length")
    if np.any(np.diff(xi) <= 0):
        raise DomainError("xi column must be strictly increasing")
    a = -float(f[-1])
    b = float(f[0])
    if a <= 0 or b <= 0:
        raise DomainError("table edges must satisfy f(right) < 0 < f(left)")

    val_ip = PchipInterpolator(xi, f, extrapolate=False)
    der_ip = PchipInterpolator(xi, fprime, extrapolate=False)
    lo, hi = xi[0], xi[-1]

    def fun(x):
        x = np.asarray(x, dtype=float)
        out = val_ip(np.clip(x, lo, hi))
        out = np.where(x > hi, -a, out)
        out = np.where(x < lo, b, out)
        return out if out.ndim else float(out)

    def deriv(x):
        x = np.asarray(x, dtype=float)
        out = der_ip(np.clip(x, lo, hi))
        out = np.where((x > hi) | (x < lo), 0.0, out)
        return out if out.ndim else float(out)

    i0 = int(np.searchsorted(xi, 0.0))
    fp0 = float(der_ip(0.0)) if 0.0 >= lo and 0.0 <= hi else float(fprime[min(i0, xi.size - 1)])
    return FeedbackFunction(
        fun=fun,
        deriv=deriv,
        a=a,
        b=b,
        fprime0=fp0,
        max_abs_deriv=float(np.max(np.abs(fprime))),
    )


def load_feedback_table(path) -> FeedbackFunction:
    """Read a CSV with header ``xi,f,fprime`` and build the interpolant."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if [c.strip() for c in header] != ["xi", "f", "fprime"]:
            raise DomainError(f"expected header xi,f,fprime in {path}, got {header}")
        rows = [[float(c) for c in row] for row in reader if row]
    data = np.asarray(rows, dtype=float)
    if data.size == 0:
        raise DomainError(f"no data rows in {path}")
    return tabulated_feedback(data[:, 0], data[:, 1], data[:, 2])


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of :func:`validate_assumption`, one flag per requirement.

    ``details`` holds the measured quantities behind each flag so a failed
    report can say how far off the candidate was.
    """

    sign_condition: bool
    negative_slope_at_zero: bool
    bounded_tails: bool
    integrable_derivative: bool
    derivative_tail_decay: bool
    details: dict

    @property
    def passed(self) -> bool:
        return (
            self.sign_condition
            and self.negative_slope_at_zero
            and self.bounded_tails
            and self.integrable_derivative
            and self.derivative_tail_decay
        )


def validate_assumption(
    f: FeedbackFunction,
    grid_half_width: float = 50.0,
    tol: float = 1e-6,
) -> ValidationReport:
    """Check a candidate nonlinearity against the standing assumptions.

    The checks are numerical, not symbolic: the sign condition is sampled
    on a log-spaced grid of both signs, the saturation limits are compared
    at +-grid_half_width, |f'| is integrated adaptively over a wide window,
    and the decay of xi * f'(xi) is sampled along the tails.
    """
    if grid_half_width <= 0:
        raise DomainError("grid_half_width must be positive")
    W = float(grid_half_width)

    mags = np.logspace(np.log10(W) - 12.0, np.log10(W), 200)
    grid = np.concatenate([-mags[::-1], mags])
    vals = np.asarray(f(grid), dtype=float)
    sign_ok = bool(np.all(grid * vals < 0.0))
    worst_sign = float(np.max(grid * vals))

    fp0 = float(f.deriv(0.0))
    slope_ok = fp0 < 0.0

    right = float(f(W))
    left = float(f(-W))
    tails_ok = abs(right + f.a) <= tol and abs(left - f.b) <= tol

    # |f'| should integrate to about a + b; adaptive quadrature over a very
    # wide window catches slowly decaying tails that a fixed grid would miss.
    integrand = lambda x: abs(float(f.deriv(x)))
    total = 0.0
    quad_ok = True
    for lo, hi in ((-1e6, -W), (-W, 0.0), (0.0, W), (W, 1e6)):
        try:
            piece, _ = quad(integrand, lo, hi, limit=200)
        except Exception:
            quad_ok = False
            piece = np.inf
        total += piece
    integrable = quad_ok and np.isfinite(total) and total <= 10.0 * (f.a + f.b) + 1.0

    tail_mags = np.logspace(np.log10(W), 6.0, 25)
    tail_pts = np.concatenate([-tail_mags, tail_mags])
    xi_fp = np.abs(tail_pts * np.asarray(f.deriv(tail_pts), dtype=float))
    # demand decay by the far end of the tail, not right at the grid edge
    far = xi_fp[np.abs(tail_pts) >= 10.0 ** 4.5]
    decay_ok = bool(far.size and np.max(far) <= tol)

    return ValidationReport(
        sign_condition=sign_ok,
        negative_slope_at_zero=slope_ok,
        bounded_tails=tails_ok,
        integrable_derivative=integrable,
        derivative_tail_decay=decay_ok,
        details={
            "worst_sign_product": worst_sign,
            "fprime0": fp0,
            "right_tail_error": abs(right + f.a),
            "left_tail_error": abs(left - f.b),
            "abs_deriv_integral": total,
            "max_far_tail_xi_fprime": float(np.max(far)) if far.size else np.inf,
        },
    )
