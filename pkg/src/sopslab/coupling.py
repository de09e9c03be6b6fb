"""Coupling matrices with unit row sums: the two closed-form families
(all-to-all averaging and a nearest-neighbor ring), general matrices
loaded from CSV, and the spectral and structural queries the stability
theory needs.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import DomainError, NumericsError

__all__ = [
    "CouplingMatrix",
    "SpectrumSigma",
    "StructureReport",
    "mean_field",
    "ring",
    "ring_spectrum",
    "sigma_minus_one",
    "structure_check",
    "solve_ring_kappa",
    "load_coupling_csv",
]

ROW_SUM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class CouplingMatrix:
    n: int
    entries: np.ndarray
    family_tag: str
    params: tuple[float, ...] = ()

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=float)
        if entries.shape != (self.n, self.n):
            raise DomainError(f"entries must be {self.n}x{self.n}; got {entries.shape}")
        if self.n < 2:
            raise DomainError("coupling needs at least two units")
        dev = np.max(np.abs(entries.sum(axis=1) - 1.0))
        if dev > ROW_SUM_TOL:
            raise DomainError(f"rows must sum to 1 within {ROW_SUM_TOL:g}; worst deviation {dev:.3e}")
        object.__setattr__(self, "entries", entries)


def as_matrix(G) -> np.ndarray:
    """Accept a CouplingMatrix or a plain array; validate row sums."""
    if isinstance(G, CouplingMatrix):
        return G.entries
    arr = np.asarray(G, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DomainError("coupling matrix must be square")
    dev = np.max(np.abs(arr.sum(axis=1) - 1.0))
    if dev > ROW_SUM_TOL:
        raise DomainError(f"rows must sum to 1 within {ROW_SUM_TOL:g}; worst deviation {dev:.3e}")
    return arr


def mean_field(n: int, kappa: float) -> CouplingMatrix:
    """All-to-all averaging: diagonal 1 - (n-1) kappa / n, off-diagonal
    kappa / n. kappa = 0 gives the identity, kappa = 1 the flat average."""
    if n < 2:
        raise DomainError(f"mean-field coupling needs n >= 2; got {n}")
    kappa = float(kappa)
    entries = np.full((n, n), kappa / n)
    np.fill_diagonal(entries, 1.0 - (n - 1) * kappa / n)
    return CouplingMatrix(n=n, entries=entries, family_tag="mean_field", params=(kappa,))


def ring(n: int, kappa1: float, kappa2: float) -> CouplingMatrix:
    """Directed nearest-neighbor ring: each unit keeps weight
    1 - (kappa1 + kappa2)/2 on itself, feels its left neighbor with
    kappa1/2 and its right neighbor with kappa2/2."""
    if n < 3:
        raise DomainError(f"ring coupling needs n >= 3; got {n}")
    kappa1 = float(kappa1)
    kappa2 = float(kappa2)
    if kappa1 == 0.0 and kappa2 == 0.0:
        raise DomainError("ring coupling needs at least one nonzero neighbor weight")
    entries = np.zeros((n, n))
    for k in range(n):
        entries[k, k] = 1.0 - (kappa1 + kappa2) / 2.0
        entries[k, (k - 1) % n] += kappa1 / 2.0
        entries[k, (k + 1) % n] += kappa2 / 2.0
    return CouplingMatrix(n=n, entries=entries, family_tag="ring", params=(kappa1, kappa2))


def ring_spectrum(n: int, kappa1: float, kappa2: float) -> np.ndarray:
    """Closed-form circulant eigenvalues of the ring, indexed j = 0..n-1:

        z_j = 1 - (k1 + k2)/2 (1 - cos(2 pi j / n))
                + i (k1 - k2)/2 sin(2 pi j / n)

    z_0 = 1 always; the rest pair up into conjugates when k1 = k2.
    """
    if n < 3:
        raise DomainError(f"ring coupling needs n >= 3; got {n}")
    theta = 2.0 * np.pi * np.arange(n) / n
    return (
        1.0
        - (kappa1 + kappa2) / 2.0 * (1.0 - np.cos(theta))
        + 1j * (kappa1 - kappa2) / 2.0 * np.sin(theta)
    )


def _sorted_spectrum(vals: np.ndarray) -> np.ndarray:
    order = np.lexsort((vals.imag, vals.real, -np.abs(vals)))
    return vals[order]


@dataclass(frozen=True, eq=False)
class SpectrumSigma:
    """Eigenvalues of a coupling matrix, with the trivial row-sum
    eigenvalue 1 split off when it is simple."""

    full: np.ndarray
    minus_one: np.ndarray
    one_is_simple: bool


def sigma_minus_one(G, tol: float | None = None) -> SpectrumSigma:
    """Numerical spectrum with the eigenvalue 1 removed once, provided it
    is simple. If the cluster of eigenvalues within tol of 1 has more
    than one member, nothing is removed and one_is_simple is False.

    Default tol is 1e-8 times the spectral norm, scale-aware but tight
    enough that genuine near-1 eigenvalues at interesting parameters stay
    distinct.
    """
    entries = as_matrix(G)
    if tol is None:
        tol = 1e-8 * np.linalg.norm(entries, 2)
    try:
        vals = np.linalg.eigvals(entries)
    except np.linalg.LinAlgError as exc:
        raise NumericsError(f"eigensolve failed: {exc}") from exc
    vals = _sorted_spectrum(vals)
    close = np.nonzero(np.abs(vals - 1.0) <= tol)[0]
    if close.size == 0:
        raise NumericsError(
            "no eigenvalue within tolerance of 1; row sums guarantee one, so the eigensolve is suspect"
        )
    if close.size == 1:
        minus_one = np.delete(vals, close[0])
        return SpectrumSigma(full=vals, minus_one=minus_one, one_is_simple=True)
    return SpectrumSigma(full=vals, minus_one=vals.copy(), one_is_simple=False)


@dataclass(frozen=True)
class StructureReport:
    row_sum_ok: bool
    irreducible: bool
    nonneg_entries: bool
    positive_semidefinite: bool | None
    positive_definite: bool | None

    def doubly_nonnegative(self) -> bool:
        return bool(self.nonneg_entries and self.positive_semidefinite)


def structure_check(G, tol: float = 1e-12) -> StructureReport:
    """Structural findings about a coupling matrix: row sums, strong
    connectivity of the support digraph, entrywise nonnegativity, and
    (for symmetric matrices) definiteness. Non-symmetric input gets None
    for the definiteness fields plus a warning quoting the symmetric
    part, since definiteness of a non-symmetric matrix is a convention
    choice the caller should make explicitly.
    """
    if isinstance(G, CouplingMatrix):
        entries = G.entries
    else:
        entries = np.asarray(G, dtype=float)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise DomainError("coupling matrix must be square")
    row_sum_ok = bool(np.max(np.abs(entries.sum(axis=1) - 1.0)) <= ROW_SUM_TOL)
    support = csr_matrix((entries != 0.0).astype(int))
    ncomp, _ = connected_components(support, directed=True, connection="strong")
    irreducible = bool(ncomp == 1)
    nonneg = bool(np.min(entries) >= -tol)

    sym_gap = float(np.max(np.abs(entries - entries.T))) if entries.size else 0.0
    sym_eigs = np.linalg.eigvalsh((entries + entries.T) / 2.0)
    if sym_gap <= tol:
        psd = bool(sym_eigs.min() >= -tol)
        pd = bool(sym_eigs.min() > tol)
    else:
        warnings.warn(
            f"matrix is not symmetric (max asymmetry {sym_gap:.3e}); symmetric part has "
            f"smallest eigenvalue {sym_eigs.min():.6g}, but no definiteness verdict is issued",
            stacklevel=2,
        )
        psd = None
        pd = None
    return StructureReport(
        row_sum_ok=row_sum_ok,
        irreducible=irreducible,
        nonneg_entries=nonneg,
        positive_semidefinite=psd,
        positive_definite=pd,
    )


def solve_ring_kappa(n: int, j: int, target: complex) -> tuple[float, float]:
    """Invert the ring eigenvalue formula: find (kappa1, kappa2) placing
    the j-th circulant eigenvalue at the target.

    The map is linear: the real part fixes kappa1 + kappa2 and the
    imaginary part fixes kappa1 - kappa2. At angles where sin vanishes
    (j = n/2 for even n) only the sum is determined; a real target is
    then required and the symmetric split is returned.
    """
    if n < 3:
        raise DomainError(f"ring coupling needs n >= 3; got {n}")
    j = int(j)
    if not 1 <= j <= n - 1:
        raise DomainError(
            f"mode index j must lie in 1..{n - 1}; the j = 0 eigenvalue is pinned at 1"
        )
    target = complex(target)
    theta = 2.0 * np.pi * j / n
    one_minus_cos = 1.0 - np.cos(theta)
    sin = np.sin(theta)
    if abs(sin) < 1e-14:
        if abs(target.imag) > 1e-12:
            raise DomainError(
                f"mode j = {j} of n = {n} has a real eigenvalue; target {target} is unreachable"
            )
        kappa = (1.0 - target.real) / one_minus_cos
        pair = (kappa, kappa)
    else:
        ksum = 2.0 * (1.0 - target.real) / one_minus_cos
        kdiff = 2.0 * target.imag / sin
        pair = ((ksum + kdiff) / 2.0, (ksum - kdiff) / 2.0)
    achieved = ring_spectrum(n, *pair)[j]
    if abs(achieved - target) > 1e-9 * (1.0 + abs(target)):
        raise NumericsError(
            f"ring inversion failed to reproduce the target: got {achieved}, wanted {target}"
        )
    return pair


def load_coupling_csv(path) -> CouplingMatrix:
    """Read a general coupling matrix: n rows of n comma-separated reals.
    Row sums are validated on load."""
    with open(path, newline="") as fh:
        rows = [[float(c) for c in row] for row in csv.reader(fh) if row]
    if not rows:
        raise DomainError(f"empty coupling CSV {path}")
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise DomainError(f"coupling CSV {path} must be square; got {n} rows of varying width")
    return CouplingMatrix(n=n, entries=np.asarray(rows), family_tag="general")
