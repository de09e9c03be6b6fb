"""Stability verdicts for the synchronous periodic state of a coupled
system, from the closed-form large-gain criteria or from a finite-gain
Floquet computation.

Every classifier returns a StabilityVerdict rather than a boolean:
Indeterminate is a first-class outcome because the criteria are
one-sided, and each verdict carries the eigenvalue witnesses that
decided it plus a caveat saying whether the statement is asymptotic in
the gain or empirical at a concrete gain.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .coupling import as_matrix, sigma_minus_one
from .errors import DomainError
from .floquet import monodromy_matrix, spectrum
from .limiting import LimitProfile, nu_star
from .sops import Sops

__all__ = [
    "STABLE",
    "UNSTABLE",
    "INDETERMINATE",
    "Witness",
    "StabilityVerdict",
    "classify_general",
    "classify_weak",
    "classify_near_uniform",
    "classify_doubly_nonneg",
    "classify_mean_field",
    "classify_ring_symmetric",
    "classify_empirical",
    "verdict_to_json",
]

STABLE = "Stable"
UNSTABLE = "Unstable"
INDETERMINATE = "Indeterminate"

ASYMPTOTIC_CAVEAT = "asymptotic in beta"


@dataclass(frozen=True)
class Witness:
    """One eigenvalue with the scalar that decided its test: the limit
    multiplier modulus, a spectral radius, or a real part, depending on
    the rule."""

    lam: complex
    value: float


@dataclass(frozen=True)
class StabilityVerdict:
    verdict: str
    rule: str
    witnesses: tuple[Witness, ...]
    caveat: str

    def __str__(self) -> str:
        return f"{self.verdict} [{self.rule}; {self.caveat}]"


def _abs_nu(p: LimitProfile, lam: complex) -> float:
    return float(abs(nu_star(p, lam)))


def classify_general(p: LimitProfile, G, delta: float) -> StabilityVerdict:
    """Asymptotic verdict for an arbitrary coupling matrix with unit row
    sums: stable when 1 is a simple coupling eigenvalue and the limit
    multiplier modulus stays below 1 - delta on the rest of the spectrum,
    unstable when it exceeds 1 + delta anywhere."""
    if not 0.0 < delta < 1.0:
        raise DomainError(f"delta must lie in (0, 1); got {delta}")
    entries = as_matrix(G)
    sig = sigma_minus_one(entries)
    witnesses = tuple(Witness(lam=complex(z), value=_abs_nu(p, z)) for z in sig.minus_one)
    violating = tuple(w for w in witnesses if w.value > 1.0 + delta)
    if violating:
        return StabilityVerdict(UNSTABLE, "general spectral criterion", violating, ASYMPTOTIC_CAVEAT)
    if sig.one_is_simple and all(w.value < 1.0 - delta for w in witnesses):
        return StabilityVerdict(STABLE, "general spectral criterion", witnesses, ASYMPTOTIC_CAVEAT)
    return StabilityVerdict(INDETERMINATE, "general spectral criterion", witnesses, ASYMPTOTIC_CAVEAT)


def _zero_row_sums(H) -> np.ndarray:
    arr = np.asarray(H, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DomainError("perturbation matrix must be square")
    dev = np.max(np.abs(arr.sum(axis=1)))
    if dev > 1e-12:
        raise DomainError(f"perturbation rows must sum to 0 within 1e-12; worst {dev:.3e}")
    return arr


def _sigma_minus_zero(arr: np.ndarray) -> tuple[np.ndarray, bool]:
    vals = np.linalg.eigvals(arr)
    tol = 1e-8 * max(1.0, np.linalg.norm(arr, 2))
    close = np.nonzero(np.abs(vals) <= tol)[0]
    if close.size == 1:
        return np.delete(vals, close[0]), True
    return vals, False


def classify_weak(H, sign: int) -> StabilityVerdict:
    """Weak coupling near the identity: I + eta sign H for small eta > 0.
    The verdict is read off the real parts of the nonzero spectrum of H;
    eigenvalues on the imaginary axis leave it open."""
    if sign not in (1, -1):
        raise DomainError(f"sign must be +1 or -1; got {sign}")
    arr = _zero_row_sums(H)
    rest, zero_simple = _sigma_minus_zero(arr)
    tol = 1e-12 * (1.0 + np.linalg.norm(arr, 2))
    parts = sign * rest.real
    witnesses = tuple(Witness(lam=complex(z), value=float(sign * z.real)) for z in rest)
    if np.any(parts > tol):
        bad = tuple(w for w in witnesses if w.value > tol)
        return StabilityVerdict(UNSTABLE, "weak coupling", bad, ASYMPTOTIC_CAVEAT)
    if zero_simple and rest.size and np.all(parts < -tol):
        return StabilityVerdict(STABLE, "weak coupling", witnesses, ASYMPTOTIC_CAVEAT)
    return StabilityVerdict(INDETERMINATE, "weak coupling", witnesses, ASYMPTOTIC_CAVEAT)


def classify_near_uniform(p: LimitProfile, H) -> StabilityVerdict:
    """Coupling near the flat average: J + eta H for small eta > 0. With
    positive decay rate the synchronous state is stable no matter the
    perturbation; without decay the real parts of the nonzero spectrum
    of H decide, with the opposite sign convention to the weak-coupling
    case."""
    arr = _zero_row_sums(H)
    if p.alpha > 0.0:
        return StabilityVerdict(STABLE, "near-uniform coupling, positive decay", (), ASYMPTOTIC_CAVEAT)
    rest, zero_simple = _sigma_minus_zero(arr)
    tol = 1e-12 * (1.0 + np.linalg.norm(arr, 2))
    witnesses = tuple(Witness(lam=complex(z), value=float(z.real)) for z in rest)
    if np.any(rest.real < -tol):
        bad = tuple(w for w in witnesses if w.value < -tol)
        return StabilityVerdict(UNSTABLE, "near-uniform coupling, zero decay", bad, ASYMPTOTIC_CAVEAT)
    if zero_simple and rest.size and np.all(rest.real > tol):
        return StabilityVerdict(STABLE, "near-uniform coupling, zero decay", witnesses, ASYMPTOTIC_CAVEAT)
    return StabilityVerdict(INDETERMINATE, "near-uniform coupling, zero decay", witnesses, ASYMPTOTIC_CAVEAT)


def classify_doubly_nonneg(p: LimitProfile, G, eps: float | None = None) -> StabilityVerdict:
    """Irreducible doubly nonnegative coupling: the verdict depends only
    on where the (real) coupling spectrum sits relative to the interval
    of radius sqrt(delta_disc) around r0.

    With delta_disc < 0 the interval is empty and the synchronous state
    is always stable. Otherwise eps fixes a collar around the interval
    boundary inside which no verdict is issued; it must satisfy
    0 < eps < min(sqrt(delta_disc), r0 - sqrt(delta_disc)).
    """
    from .coupling import structure_check

    entries = as_matrix(G)
    report = structure_check(entries)
    if not report.irreducible:
        raise DomainError("coupling matrix is not irreducible")
    if not report.nonneg_entries:
        raise DomainError("coupling matrix has negative entries")
    if report.positive_semidefinite is None:
        raise DomainError(
            "coupling matrix is not symmetric; definiteness is undecided, so this rule does not apply"
        )
    if not report.positive_semidefinite:
        raise DomainError("coupling matrix is not positive semidefinite")
    if p.alpha == 0.0 and not report.positive_definite:
        raise DomainError("zero decay rate requires a positive definite coupling matrix")

    sig = sigma_minus_one(entries)
    lams = sig.minus_one.real
    witnesses = tuple(Witness(lam=complex(z), value=_abs_nu(p, z)) for z in sig.minus_one)
    rule = "doubly nonnegative coupling"
    if p.delta_disc < 0.0:
        return StabilityVerdict(STABLE, rule, witnesses, ASYMPTOTIC_CAVEAT)
    root = float(np.sqrt(p.delta_disc))
    cap = min(root, p.r0 - root)
    if eps is None or not 0.0 < eps < cap:
        raise DomainError(
            f"delta_disc > 0 requires a collar width eps in (0, {cap:.6g}); got {eps}"
        )
    dist = np.abs(lams - p.r0)
    if np.any(dist < root - eps):
        bad = tuple(w for w, d in zip(witnesses, dist) if d < root - eps)
        return StabilityVerdict(UNSTABLE, rule, bad, ASYMPTOTIC_CAVEAT)
    if sig.one_is_simple and np.all(dist > root + eps):
        return StabilityVerdict(STABLE, rule, witnesses, ASYMPTOTIC_CAVEAT)
    return StabilityVerdict(INDETERMINATE, rule, witnesses, ASYMPTOTIC_CAVEAT)


def _band_verdict(
    p: LimitProfile,
    zs: np.ndarray,
    eps: float | None,
    rule: str,
) -> StabilityVerdict:
    """Shared band logic for real coupling spectra: unstable below
    2 r0 - 1 (the limit multiplier exceeds 1 there) or inside the
    delta_disc interval; stable strictly outside both."""
    witnesses = tuple(Witness(lam=complex(z), value=_abs_nu(p, z)) for z in zs)
    low = 2.0 * p.r0 - 1.0
    below = zs < low
    if np.any(below):
        bad = tuple(w for w, b in zip(witnesses, below) if b)
        return StabilityVerdict(UNSTABLE, rule, bad, ASYMPTOTIC_CAVEAT)
    if p.delta_disc < 0.0:
        if np.all(zs > low):
            return StabilityVerdict(STABLE, rule, witnesses, ASYMPTOTIC_CAVEAT)
        return StabilityVerdict(INDETERMINATE, rule, witnesses, ASYMPTOTIC_CAVEAT)
    root = float(np.sqrt(p.delta_disc))
    cap = min(root, p.r0 - root)
    if eps is None or not 0.0 < eps < cap:
        raise DomainError(
            f"delta_disc > 0 requires a collar width eps in (0, {cap:.6g}); got {eps}"
        )
    dist = np.abs(zs - p.r0)
    if np.any(dist < root - eps):
        bad = tuple(w for w, d in zip(witnesses, dist) if d < root - eps)
        return StabilityVerdict(UNSTABLE, rule, bad, ASYMPTOTIC_CAVEAT)
    if np.all(dist > root + eps) and np.all(zs > low):
        return StabilityVerdict(STABLE, rule, witnesses, ASYMPTOTIC_CAVEAT)
    return StabilityVerdict(INDETERMINATE, rule, witnesses, ASYMPTOTIC_CAVEAT)


def classify_mean_field(p: LimitProfile, n: int, kappa: float, eps: float | None = None) -> StabilityVerdict:
    """All-to-all coupling of strength kappa: the only nontrivial
    coupling eigenvalue is 1 - kappa (multiplicity n - 1), so the band
    test reduces to a single point. kappa must lie in (0, 1], strictly
    below 1 when the decay rate is zero."""
    if n < 2:
        raise DomainError(f"mean-field coupling needs n >= 2; got {n}")
    if p.alpha == 0.0:
        if not 0.0 < kappa < 1.0:
            raise DomainError(
                "mean-field rule with zero decay rate requires kappa in "
                f"(0, 1) exclusive; got {kappa}"
            )
    elif not 0.0 < kappa <= 1.0:
        raise DomainError(f"mean-field rule requires kappa in (0, 1]; got {kappa}")
    zs = np.array([1.0 - kappa])
    return _band_verdict(p, zs, eps, "mean-field coupling")


def classify_ring_symmetric(p: LimitProfile, n: int, kappa: float, eps: float | None = None) -> StabilityVerdict:
    """Symmetric nearest-neighbor ring of strength kappa per side. The
    coupling spectrum is {1 - kappa (1 - cos(2 pi j / n))}; modes pushed
    below 2 r0 - 1 (possible once kappa exceeds 1 - r0 for even n, or
    the corresponding cosine-corrected threshold for odd n) force
    instability, and the remaining modes go through the usual band test.
    """
    if n < 3:
        raise DomainError(f"ring coupling needs n >= 3; got {n}")
    if not 0.0 < kappa <= 1.0:
        raise DomainError(f"symmetric ring rule requires kappa in (0, 1]; got {kappa}")
    j = np.arange(1, n // 2 + 1)
    zs = 1.0 - kappa * (1.0 - np.cos(2.0 * np.pi * j / n))
    return _band_verdict(p, zs, eps, "symmetric ring coupling")


def _mode_radius(s: Sops, lam: complex, m: int) -> float:
    """Largest multiplier modulus of one coupling mode.

    The mode at lam = 1 always contains the orbit's own phase direction,
    whose multiplier sits at 1 no matter how stable the orbit is, so that
    single eigenvalue is excluded before taking the modulus. Any other
    mode is scored by its plain spectral radius.
    """
    rep = spectrum(monodromy_matrix(lam, s, m))
    eig = np.asarray(rep.eigenvalues)
    if abs(lam - 1.0) <= 1e-10 and eig.size:
        keep = np.delete(np.abs(eig), int(np.argmin(np.abs(eig - 1.0))))
        return float(keep.max()) if keep.size else 0.0
    return rep.spectral_radius


def classify_empirical(s: Sops, G, m: int = 64, margin: float = 0.1) -> StabilityVerdict:
    """Finite-gain verdict: largest multiplier modulus of the discretized
    period map at every coupling eigenvalue left after removing one copy
    of 1. Conjugate eigenvalues share their moduli, so only one of each
    pair is integrated. A repeated coupling eigenvalue at 1 (a decoupled
    or block network) is legal here: each copy is its own replica of the
    scalar orbit, so the verdict falls back to scalar stability."""
    if not 0.0 < margin < 1.0:
        raise DomainError(f"margin must lie in (0, 1); got {margin}")
    entries = as_matrix(G)
    sig = sigma_minus_one(entries)
    caveat = f"empirical at beta = {s.beta:g}"
    rule = "empirical period map"

    distinct: list[complex] = []
    for z in sig.minus_one:
        zc = complex(z) if z.imag >= 0 else complex(z).conjugate()
        if all(abs(zc - u) > 1e-10 for u in distinct):
            distinct.append(zc)
    witnesses = []
    for lam in distinct:
        witnesses.append(Witness(lam=lam, value=_mode_radius(s, lam, m)))
    witnesses = tuple(witnesses)
    if any(w.value > 1.0 + margin for w in witnesses):
        bad = tuple(w for w in witnesses if w.value > 1.0 + margin)
        return StabilityVerdict(UNSTABLE, rule, bad, caveat)
    if all(w.value < 1.0 - margin for w in witnesses):
        return StabilityVerdict(STABLE, rule, witnesses, caveat)
    return StabilityVerdict(INDETERMINATE, rule, witnesses, caveat)


def verdict_to_json(v: StabilityVerdict, path=None) -> dict:
    """Serialize a verdict; optionally write it to a file."""
    payload = {
        "verdict": v.verdict,
        "rule": v.rule,
        "witnesses": [
            {"lambda_re": w.lam.real, "lambda_im": w.lam.imag, "value": w.value}
            for w in v.witnesses
        ],
        "caveat": v.caveat,
    }
    if path is not None:
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return payload
