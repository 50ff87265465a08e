"""Glued Bridgeland stability conditions on equivariant sheaves of ramified double covers."""

from .errors import (GlustabError, NotInRegion, PreconditionError, Undecidable)
from .klattice import (CentralCharge, FrameAction, Gauss, Geometry, KClass, Twist, coset_classes,
                       det2, eval_charge, rotate_charge, standard_charge, twist_charge)
from .slicing import (ChainObject, HNResult, charge_norm, closeness_check, hn_direct_sum,
                      hn_exhaustive, hn_polygon, min_charge_modulus, num_lem_bound, phase,
                      sector_bound_check, torsion_chain)
from .local_stab import (LocalObject, LocalStability, act_C, chamber, chart_transition, delta,
                         f_of, hn_local, oracle_chamber, uniformize)
from .glue import (Decomposition, ExceptionalCollection, ExtPattern, StabilitySummary,
                   check_gluing_condition_a, check_gluing_condition_b, check_hearts_orthogonal,
                   exc_P1_check, find_gluing_parameter, glue_charge, macri_glued)
from .doublecover import (GlobalObject, GlobalStability, PartitionData, ThetaPoint, build_from_theta,
                          build_stability, check_U_bar, classify_in_U, hn_global, parse_object,
                          reduce_line_bundle, theta_map)

__version__ = "0.1.0"

__all__ = [
    "GlustabError",
    "NotInRegion",
    "PreconditionError",
    "Undecidable",
    "CentralCharge",
    "FrameAction",
    "Gauss",
    "Geometry",
    "KClass",
    "Twist",
    "coset_classes",
    "det2",
    "eval_charge",
    "rotate_charge",
    "standard_charge",
    "twist_charge",
    "ChainObject",
    "HNResult",
    "charge_norm",
    "closeness_check",
    "hn_direct_sum",
    "hn_exhaustive",
    "hn_polygon",
    "min_charge_modulus",
    "num_lem_bound",
    "phase",
    "sector_bound_check",
    "torsion_chain",
    "LocalObject",
    "LocalStability",
    "act_C",
    "chamber",
    "chart_transition",
    "delta",
    "f_of",
    "hn_local",
    "oracle_chamber",
    "uniformize",
    "Decomposition",
    "ExceptionalCollection",
    "ExtPattern",
    "StabilitySummary",
    "check_gluing_condition_a",
    "check_gluing_condition_b",
    "check_hearts_orthogonal",
    "exc_P1_check",
    "find_gluing_parameter",
    "glue_charge",
    "macri_glued",
    "GlobalObject",
    "GlobalStability",
    "PartitionData",
    "ThetaPoint",
    "build_from_theta",
    "build_stability",
    "check_U_bar",
    "classify_in_U",
    "hn_global",
    "parse_object",
    "reduce_line_bundle",
    "theta_map",
]
