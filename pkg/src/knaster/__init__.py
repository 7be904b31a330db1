"""Pointed finite linear graphs, their amalgamation, generic towers, Ramsey witnesses and PL maps."""

from .errors import KnasterError
from .lingraph import (
    FoldDecomposition,
    Morphism,
    PointedLinearGraph,
    compose,
    count_epi,
    degree,
    enumerate_epi,
    identity,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "KnasterError",
    "FoldDecomposition",
    "Morphism",
    "PointedLinearGraph",
    "compose",
    "count_epi",
    "degree",
    "enumerate_epi",
    "identity",
    "validate",
]
