"""Disjoint cycles through prescribed vertices of a digraph."""

from .cyclable import find_w_cycle, theorem5_factor
from .digraph import (
    CycleFactorCertificate,
    Digraph,
    Partition,
    VertexSet,
    build_symmetric,
    min_semi_degree,
    validate_certificate,
)
from .errors import BelowThresholdError, DcfError, ParseError, PreconditionError, TheoremViolation
from .factor import NoFactorReport, solve_w_cycle_factor

__all__ = [
    "BelowThresholdError",
    "CycleFactorCertificate",
    "DcfError",
    "Digraph",
    "NoFactorReport",
    "ParseError",
    "Partition",
    "PreconditionError",
    "TheoremViolation",
    "VertexSet",
    "build_symmetric",
    "find_w_cycle",
    "min_semi_degree",
    "solve_w_cycle_factor",
    "theorem5_factor",
    "validate_certificate",
]
