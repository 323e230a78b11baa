"""Achievable DoF of the 2-user MIMO interference channel under partial CSIT."""

from .core import (AntennaConfig, BetaBar, CaseLabel, CsitProfile, DecodePlan, DecodeStage,
                   DofPoint, RelabelRequired, SchemeSpec, StreamSpec, ValidationError, validate)
from .dof_formula import (TermBreakdown, classify_case, closed_form_d2, dof_user1_given_user2_max,
                          dof_user2_given_user1_max, minplus, sweep_beta, term_a, term_b, term_c)
from .scheme_builder import beta_bars, build_corner_scheme, build_scheme, stage_mac_views
from .channel import ChannelSet, RealizedPrecoders, null_basis, realize_precoders, sample_channels
from .mac_region import MacCheck, MacInstance, mac_mi_slope_oracle, mac_region_contains
from .rate_engine import (SlopeReport, StageMargin, estimate_dof_slopes, gaussian_mi,
                          interference_floor_probe, stage_margins)

__version__ = "0.1.0"

__all__ = [
    "AntennaConfig",
    "BetaBar",
    "CaseLabel",
    "ChannelSet",
    "CsitProfile",
    "DecodePlan",
    "DecodeStage",
    "DofPoint",
    "MacCheck",
    "MacInstance",
    "RealizedPrecoders",
    "RelabelRequired",
    "SchemeSpec",
    "SlopeReport",
    "StageMargin",
    "StreamSpec",
    "TermBreakdown",
    "ValidationError",
    "beta_bars",
    "build_corner_scheme",
    "build_scheme",
    "classify_case",
    "closed_form_d2",
    "dof_user1_given_user2_max",
    "dof_user2_given_user1_max",
    "estimate_dof_slopes",
    "gaussian_mi",
    "interference_floor_probe",
    "mac_mi_slope_oracle",
    "mac_region_contains",
    "minplus",
    "null_basis",
    "realize_precoders",
    "sample_channels",
    "stage_mac_views",
    "stage_margins",
    "sweep_beta",
    "term_a",
    "term_b",
    "term_c",
    "validate",
]

