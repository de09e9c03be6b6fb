"""Everything knowable in closed form about the strong-feedback limit."""

from .profile import (
    LimitProfile,
    MeasureAtom,
    make_profile,
    nu_star,
    nu_star_prime,
    nu_star_real_form,
    pbar_star,
    pbar_star_dot,
    h_star,
    mu_star_atoms,
    hopf_beta,
)
from .regions import (
    CassiniVerdict,
    RegionConstants,
    cassini_classify,
    cassini_boundary,
    region_a1_constants,
    region_a0_constants,
    region_A1,
    region_A0,
)
from .variational import (
    limiting_variational_solve,
    limiting_monodromy_dominant,
    variational_growth_bound,
)

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
    "CassiniVerdict",
    "RegionConstants",
    "cassini_classify",
    "cassini_boundary",
    "region_a1_constants",
    "region_a0_constants",
    "region_A1",
    "region_A0",
    "limiting_variational_solve",
    "limiting_monodromy_dominant",
    "variational_growth_bound",
]
