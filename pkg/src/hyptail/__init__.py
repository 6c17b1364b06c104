"""Hypergeometric tail inversion bounds on the true risk of a classifier."""
from ._kernel import BACKEND
from .bounds import BoundQuery, BoundResult
from .growth import Constant, SauerShelah
from .hypergeom import HypParams
from .mprime import MprimeScan, MprimeResult, optimize_mprime

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BoundQuery",
    "BoundResult",
    "Constant",
    "HypParams",
    "MprimeResult",
    "MprimeScan",
    "SauerShelah",
    "optimize_mprime",
]
