"""Effort equilibria for crowd-sensing games on referral trees with passive rewards."""
from .equilibrium import (
    EquilibriumResult,
    VerificationReport,
    best_response,
    best_response_dynamics,
    construct_z3_profile,
    is_psne,
    psne_closed_form_r4,
    solve,
)
from .game import ModelParams, Region, Zone, classify_region, classify_zone, effort_shares, utilities, utility
from .rewards import RewardScheme, anonymous_scheme, delta, geometric_scheme, validate_budget
from .sim import SimConfig, compare_analytic, simulate
from .tree import ReferralTree, build_tree, hop_distance, random_tree, subtree

__version__ = "0.1.0"
