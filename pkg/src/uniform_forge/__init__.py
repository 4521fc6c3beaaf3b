"""Exact construction and certification of uniformly approximable points."""

from .engine import ConstructionSpec, ConstructionTrace, construct, dominate, realize_sumset, step
from .exactnum import Box, PowerLaw, StepTable, parse_approx
from .families import AvoidanceSet, ManifoldFamily, ManifoldGraph, MatrixFamily, PairFamily
from .systems import parse_system, psi_inf, psi_sup
from .verifier import Certificate, check_certificate, irrationality_report, produce_certificate

__all__ = [
    "AvoidanceSet",
    "Box",
    "Certificate",
    "ConstructionSpec",
    "ConstructionTrace",
    "ManifoldFamily",
    "ManifoldGraph",
    "MatrixFamily",
    "PairFamily",
    "PowerLaw",
    "StepTable",
    "check_certificate",
    "construct",
    "dominate",
    "irrationality_report",
    "parse_approx",
    "parse_system",
    "produce_certificate",
    "psi_inf",
    "psi_sup",
    "realize_sumset",
    "step",
]
