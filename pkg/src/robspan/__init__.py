"""Robust geometric spanners: builders, casualty-set certificates, attacks, oracles."""

from .geometry import GeomGraph, InputError, ParseError, PointSet
from .iterated import IteratedFunction, preset
from .metrics import RobustnessCertificate, certify, minimal_splus, verify

__all__ = [
    "GeomGraph",
    "InputError",
    "IteratedFunction",
    "ParseError",
    "PointSet",
    "RobustnessCertificate",
    "certify",
    "minimal_splus",
    "preset",
    "verify",
]

__version__ = "0.1.0"
