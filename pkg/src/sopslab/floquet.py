"""Monodromy matrices for the variational equation along a periodic
orbit, for one scalar mode at a coupling eigenvalue lambda or for the
full network at once.

The state space of segments over one delay is discretized with hat
functions on the uniform grid theta_i = -1 + i/m; each matrix column is
the variational solution over one period started from one hat, sampled
back on the grid. All columns propagate together through a single step
loop, so the cost is one pass over the period regardless of m.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .coupling import as_matrix
from .ddesolve import _build_plan, _check_step, _variational_batch
from .errors import DomainError, NumericsError
from .limiting import make_profile
from .sops import Sops

__all__ = [
    "MonodromyMatrix",
    "SpectrumReport",
    "DecompositionReport",
    "monodromy_matrix",
    "coupled_monodromy",
    "spectrum",
    "dominant_multiplier",
    "decomposition_check",
    "matrix_to_csv",
    "spectrum_to_csv",
]

DOMINANCE_GAP = 1e-6
COUPLED_SIZE_LIMIT = 2000


@dataclass(frozen=True, eq=False)
class MonodromyMatrix:
    """Dense discretization of the period map acting on delay segments.

    Column j holds the variational solution started from the j-th hat
    function, evaluated at time start_phase + omega + theta_i. lam is the
    coupling eigenvalue for a scalar-mode matrix and None for the full
    coupled matrix.
    """

    m: int
    entries: np.ndarray
    lam: complex | None
    provenance: dict


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    """Eigenvalues sorted by descending modulus, cut at a modulus floor.

    dominant is the top eigenvalue only when it beats the runner-up by a
    strict separation factor; a tied conjugate pair (the usual way a real
    multiplier presents after discretization noise) leaves it None and
    callers fall back on spectral_radius.
    """

    eigenvalues: np.ndarray
    dominant: complex | None
    spectral_radius: float
    truncation: int


def _hat_values(m: int, theta: float) -> np.ndarray:
    x = (theta + 1.0) * m
    return np.clip(1.0 - np.abs(x - np.arange(m + 1)), 0.0, 1.0)


def _default_phase(s: Sops) -> float:
    prof = make_profile(s.alpha, s.feedback.a, s.feedback.b)
    q1_eff = prof.q2 if prof.swapped else prof.q1
    phase = -q1_eff / 2.0
    if not -s.z1 < phase < 0.0:
        phase = -s.z1 / 2.0
    return phase


def _check_sops(s: Sops) -> None:
    if not (np.isfinite(s.omega) and s.omega > 2.0 and s.z1 > 0.0):
        raise DomainError("degenerate orbit: need a slowly oscillating period above 2")


def _eval_nodes(Y: np.ndarray, Dv: np.ndarray, h: float, t0: float, times: np.ndarray) -> np.ndarray:
    """Cubic Hermite read of the batch arrays at the given absolute times;
    returns shape (len(times), *state)."""
    x = (times - t0) / h
    last = Y.shape[0] - 1
    if np.any(x < -1e-9) or np.any(x > last + 1e-9):
        raise DomainError("sample time outside the integrated range")
    k = np.clip(np.floor(x).astype(int), 0, last - 1)
    sig = (x - k).reshape((-1,) + (1,) * (Y.ndim - 1))
    h00 = (1.0 + 2.0 * sig) * (1.0 - sig) ** 2
    h10 = sig * (1.0 - sig) ** 2
    h01 = sig * sig * (3.0 - 2.0 * sig)
    h11 = sig * sig * (sig - 1.0)
    return h00 * Y[k] + h10 * h * Dv[k] + h01 * Y[k + 1] + h11 * h * Dv[k + 1]


def monodromy_matrix(
    lam: complex,
    s: Sops,
    m: int = 64,
    start_phase: float | None = None,
) -> MonodromyMatrix:
    """Discretized period map of y'(t) = -alpha y + lam beta f'(p(t-1)) y(t-1).

    start_phase defaults to the midpoint of the descending half of the
    positive arc in the limiting clock, away from the switching times; the
    spectrum does not depend on it.
    """
    if m < 16:
        raise DomainError(f"grid resolution m must be at least 16; got {m}")
    _check_sops(s)
    if start_phase is None:
        start_phase = _default_phase(s)
    phase = float(start_phase)
    h = s.h
    N = _check_step(h)
    nsteps = math.ceil(s.omega / h - 1e-9)
    plan = _build_plan(s.alpha, s.beta, s.feedback, s.p_at, phase, nsteps, h)

    def hist_fn(t: float) -> np.ndarray:
        theta = min(max(t - phase, -1.0), 0.0)
        return _hat_values(m, theta)

    Y, Dv = _variational_batch(lam, plan, hist_fn, phase, N)
    thetas = -1.0 + np.arange(m + 1) / m
    entries = _eval_nodes(Y, Dv, h, phase - 1.0, phase + s.omega + thetas)
    return MonodromyMatrix(
        m=m,
        entries=entries,
        lam=complex(lam),
        provenance={
            "kind": "scalar",
            "alpha": s.alpha,
            "beta": s.beta,
            "h": h,
            "omega": s.omega,
            "start_phase": phase,
        },
    )


def coupled_monodromy(
    G,
    s: Sops,
    m: int = 64,
    start_phase: float | None = None,
) -> MonodromyMatrix:
    """Period map of the full networked variational equation
    Y'(t) = -alpha Y + beta f'(p(t-1)) G Y(t-1) around the synchronous
    orbit, on the same grid and integrator as the scalar modes.

    Matrix side n(m+1) is capped at a desk scale; raise m or shrink the
    network rather than lifting the cap.
    """
    Gm = as_matrix(G)
    n = Gm.shape[0]
    if m < 16:
        raise DomainError(f"grid resolution m must be at least 16; got {m}")
    size = n * (m + 1)
    if size > COUPLED_SIZE_LIMIT:
        raise DomainError(
            f"coupled matrix side n (m + 1) = {size} exceeds the {COUPLED_SIZE_LIMIT} limit"
        )
    _check_sops(s)
    if start_phase is None:
        start_phase = _default_phase(s)
    phase = float(start_phase)
    h = s.h
    N = _check_step(h)
    nsteps = math.ceil(s.omega / h - 1e-9)
    plan = _build_plan(s.alpha, s.beta, s.feedback, s.p_at, phase, nsteps, h)

    def hist_fn(t: float) -> np.ndarray:
        theta = min(max(t - phase, -1.0), 0.0)
        hats = _hat_values(m, theta)
        state = np.zeros((n, size))
        for u in range(n):
            state[u, u * (m + 1) : (u + 1) * (m + 1)] = hats
        return state

    Y, Dv = _variational_batch(1.0, plan, hist_fn, phase, N, mix=Gm)
    thetas = -1.0 + np.arange(m + 1) / m
    samples = _eval_nodes(Y, Dv, h, phase - 1.0, phase + s.omega + thetas)
    # samples[i, u, c]: component u of column c at theta_i; rows are
    # ordered unit-major to match the column convention
    entries = samples.transpose(1, 0, 2).reshape(size, size)
    return MonodromyMatrix(
        m=m,
        entries=entries,
        lam=None,
        provenance={
            "kind": "coupled",
            "n": n,
            "alpha": s.alpha,
            "beta": s.beta,
            "h": h,
            "omega": s.omega,
            "start_phase": phase,
        },
    )


def spectrum(M: MonodromyMatrix, floor: float = 1e-4) -> SpectrumReport:
    """Dense eigensolve of the discretized period map. Eigenvalues below
    the modulus floor are dropped from the report (the underlying
    operator is compact; the far tail of the matrix spectrum is
    discretization noise) but still counted in truncation."""
    entries = M.entries
    if not np.all(np.isfinite(entries)):
        raise DomainError("monodromy matrix has non-finite entries")
    try:
        vals = np.linalg.eigvals(entries)
    except np.linalg.LinAlgError as exc:
        raise NumericsError(
            f"eigensolve failed for the {entries.shape[0]}x{entries.shape[1]} monodromy matrix "
            f"(norm {np.linalg.norm(entries):.3e}): {exc}"
        ) from exc
    order = np.lexsort((vals.imag, vals.real, -np.abs(vals)))
    vals = vals[order]
    dominant = None
    if vals.size == 1 or abs(vals[0]) > (1.0 + DOMINANCE_GAP) * abs(vals[1]):
        dominant = complex(vals[0])
    kept = vals[np.abs(vals) >= floor]
    return SpectrumReport(
        eigenvalues=kept,
        dominant=dominant,
        spectral_radius=float(abs(vals[0])) if vals.size else 0.0,
        truncation=int(vals.size - kept.size),
    )


def dominant_multiplier(
    lam: complex,
    s: Sops,
    m: int = 64,
    start_phase: float | None = None,
) -> complex:
    """Top eigenvalue of the scalar-mode period map at lam. Raises when
    the top two are tied (conjugate pair), naming both."""
    report = spectrum(monodromy_matrix(lam, s, m, start_phase))
    if report.dominant is None:
        pair = report.eigenvalues[:2]
        raise NumericsError(
            f"no strictly dominant multiplier at lam = {lam}: top eigenvalues {pair[0]} and {pair[1]}"
        )
    return report.dominant


def _dedupe_complex(vals: np.ndarray, tol: float = 1e-10) -> list[complex]:
    out: list[complex] = []
    for v in vals:
        if all(abs(v - u) > tol for u in out):
            out.append(complex(v))
    return out


def _hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    if a.size == 0 and b.size == 0:
        return 0.0
    if a.size == 0 or b.size == 0:
        return math.inf
    d = np.abs(a[:, None] - b[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


@dataclass(frozen=True, eq=False)
class DecompositionReport:
    """Comparison of the coupled period-map spectrum with the union of
    scalar-mode spectra over the coupling eigenvalues, both cut at the
    same modulus floor."""

    hausdorff: float
    coupled: np.ndarray
    mode_union: np.ndarray
    lambdas: tuple[complex, ...]
    floor: float
    tol: float
    passed: bool


def decomposition_check(
    G,
    s: Sops,
    m: int = 64,
    tol: float = 1e-8,
    floor: float = 0.05,
    start_phase: float | None = None,
) -> DecompositionReport:
    """Check that the coupled spectrum equals the union over the coupling
    spectrum of the scalar-mode spectra. On a shared grid and step this
    is an exact linear-algebra identity, so the Hausdorff distance should
    sit at rounding level."""
    Gm = as_matrix(G)
    if start_phase is None:
        start_phase = _default_phase(s)
    lambdas = _dedupe_complex(np.linalg.eigvals(Gm))
    mode_vals: list[np.ndarray] = []
    for lam in lambdas:
        rep = spectrum(monodromy_matrix(lam, s, m, start_phase), floor=floor)
        mode_vals.append(rep.eigenvalues)
    union = np.concatenate(mode_vals) if mode_vals else np.empty(0, dtype=complex)
    coupled_rep = spectrum(coupled_monodromy(Gm, s, m, start_phase), floor=floor)
    dist = _hausdorff(coupled_rep.eigenvalues, union)
    return DecompositionReport(
        hausdorff=dist,
        coupled=coupled_rep.eigenvalues,
        mode_union=union,
        lambdas=tuple(lambdas),
        floor=floor,
        tol=tol,
        passed=bool(dist <= tol),
    )


def matrix_to_csv(M: MonodromyMatrix, path) -> None:
    """Debug dump: each entry as adjacent real and imaginary columns."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in M.entries:
            flat: list[str] = []
            for z in row:
                flat.append(f"{z.real:.17g}")
                flat.append(f"{z.imag:.17g}")
            writer.writerow(flat)


def spectrum_to_csv(report: SpectrumReport, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("re,im,modulus\n")
        for z in report.eigenvalues:
            fh.write(f"{z.real:.17g},{z.imag:.17g},{abs(z):.17g}\n")
