"""Exact Waring ranks of forms of border rank 5 in degree d >= 9."""

from __future__ import annotations

from .apolar import apolar_ideal_slice, border_rank_lower_bound, catalecticant, catalecticant_rank, essential_vars
from .classify import RankReport, classify_rank, rank_from_type, recover_scheme, verify_certificate
from .construct import SamplePoint, canonical_scheme, random_projectivity, sample_point, transform_sample
from .decomposition import Decomposition, verify_decomposition
from .errors import Waring5Error
from .poly import CurvePath, HomogPoly, apolar_apply, parse_poly, power_of_linear, substitute_linear
from .schemes import (
    DEGREE_FIVE_TYPES,
    JetComponent,
    JetScheme,
    SchemeType,
    hilbert_h0_h1,
    low_degree_curve_witness,
    points_h1,
)
from .strata import StratumProbe, stratum_dimension
from .sylvester import binary_decomposition, binary_rank, curve_rank_decomposition
from .witness import decompose, plane_upper_bound, structure_check

__version__ = "0.1.0"

__all__ = [
    "DEGREE_FIVE_TYPES",
    "CurvePath",
    "Decomposition",
    "HomogPoly",
    "JetComponent",
    "JetScheme",
    "RankReport",
    "SamplePoint",
    "SchemeType",
    "StratumProbe",
    "Waring5Error",
    "apolar_apply",
    "apolar_ideal_slice",
    "binary_decomposition",
    "binary_rank",
    "border_rank_lower_bound",
    "canonical_scheme",
    "catalecticant",
    "catalecticant_rank",
    "classify_rank",
    "curve_rank_decomposition",
    "decompose",
    "essential_vars",
    "hilbert_h0_h1",
    "low_degree_curve_witness",
    "parse_poly",
    "plane_upper_bound",
    "points_h1",
    "power_of_linear",
    "random_projectivity",
    "rank_from_type",
    "recover_scheme",
    "sample_point",
    "stratum_dimension",
    "structure_check",
    "substitute_linear",
    "transform_sample",
    "verify_certificate",
    "verify_decomposition",
]
