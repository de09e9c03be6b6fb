"""Numerical laboratory for networks of delayed negative-feedback
oscillators: periodic-orbit search, period-map spectra, and closed-form
large-gain stability classification."""

from .errors import DomainError, NonConvergenceError, NumericsError
from .feedback import (
    FeedbackFunction,
    ValidationReport,
    load_feedback_table,
    tabulated_feedback,
    tanh_feedback,
    validate_assumption,
)
from .limiting import (
    LimitProfile,
    MeasureAtom,
    RegionConstants,
    CassiniVerdict,
    cassini_boundary,
    cassini_classify,
    hopf_beta,
    h_star,
    limiting_monodromy_dominant,
    limiting_variational_solve,
    make_profile,
    mu_star_atoms,
    nu_star,
    nu_star_prime,
    nu_star_real_form,
    pbar_star,
    pbar_star_dot,
    region_A0,
    region_A1,
    region_a0_constants,
    region_a1_constants,
    variational_growth_bound,
)
from .ddesolve import (
    Trajectory,
    integrate_coupled,
    integrate_scalar,
    integrate_variational,
    load_trajectory_csv,
    trajectory_to_csv,
)
from .sops import (
    NormalizedSops,
    ResidualReport,
    Sops,
    export_sops,
    find_sops,
    limit_residuals,
    normalize_sops,
)
from .coupling import (
    CouplingMatrix,
    SpectrumSigma,
    StructureReport,
    load_coupling_csv,
    mean_field,
    ring,
    ring_spectrum,
    sigma_minus_one,
    solve_ring_kappa,
    structure_check,
)
from .floquet import (
    DecompositionReport,
    MonodromyMatrix,
    SpectrumReport,
    coupled_monodromy,
    decomposition_check,
    dominant_multiplier,
    matrix_to_csv,
    monodromy_matrix,
    spectrum,
    spectrum_to_csv,
)
from .classify import (
    INDETERMINATE,
    STABLE,
    UNSTABLE,
    StabilityVerdict,
    Witness,
    classify_doubly_nonneg,
    classify_empirical,
    classify_general,
    classify_mean_field,
    classify_near_uniform,
    classify_ring_symmetric,
    classify_weak,
    verdict_to_json,
)
from .lab import (
    FigureResult,
    SyncSeries,
    figure_experiment,
    level_lambda,
    ramp_history,
    sync_measure,
    write_sync_csv,
)

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "NumericsError",
    "NonConvergenceError",
    "FeedbackFunction",
    "ValidationReport",
    "tanh_feedback",
    "tabulated_feedback",
    "load_feedback_table",
    "validate_assumption",
    "LimitProfile",
    "MeasureAtom",
    "RegionConstants",
    "CassiniVerdict",
    "make_profile",
    "nu_star",
    "nu_star_prime",
    "nu_star_real_form",
    "pbar_star",
    "pbar_star_dot",
    "h_star",
    "mu_star_atoms",
    "hopf_beta",
    "cassini_classify",
    "cassini_boundary",
    "region_A1",
    "region_A0",
    "region_a1_constants",
    "region_a0_constants",
    "limiting_variational_solve",
    "limiting_monodromy_dominant",
    "variational_growth_bound",
    "Trajectory",
    "integrate_scalar",
    "integrate_coupled",
    "integrate_variational",
    "trajectory_to_csv",
    "load_trajectory_csv",
    "Sops",
    "NormalizedSops",
    "ResidualReport",
    "find_sops",
    "normalize_sops",
    "limit_residuals",
    "export_sops",
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
    "StabilityVerdict",
    "Witness",
    "STABLE",
    "UNSTABLE",
    "INDETERMINATE",
    "classify_general",
    "classify_weak",
    "classify_near_uniform",
    "classify_doubly_nonneg",
    "classify_mean_field",
    "classify_ring_symmetric",
    "classify_empirical",
    "verdict_to_json",
    "SyncSeries",
    "FigureResult",
    "sync_measure",
    "level_lambda",
    "ramp_history",
    "figure_experiment",
    "write_sync_csv",
]
