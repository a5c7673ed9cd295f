"""Structural identifiability analysis of rational ODE models."""

from .errors import (
    AmbiguousSymbol,
    DegeneratePoint,
    DivisionNotExact,
    DuplicateDefinition,
    JobCancelled,
    ModelError,
    ModelSyntaxError,
    NonRationalError,
    NotZeroDimensional,
    ResourceLimit,
    UnknownSymbolUse,
)
from .orders import TermOrder
from .poly import Poly, PolyRing, QQ, RatFun, poly_gcd, poly_lcm
from .groebner import Budget, GroebnerBasis, groebner, normal_form
from .zerodim import (
    SolutionCount,
    algebraic_relation,
    distinct_root_count,
    minimal_polynomial,
    solution_count,
    squarefree_part,
)

__all__ = [
    "AmbiguousSymbol",
    "Budget",
    "DegeneratePoint",
    "DivisionNotExact",
    "DuplicateDefinition",
    "GroebnerBasis",
    "JobCancelled",
    "ModelError",
    "ModelSyntaxError",
    "NonRationalError",
    "NotZeroDimensional",
    "Poly",
    "PolyRing",
    "QQ",
    "RatFun",
    "ResourceLimit",
    "SolutionCount",
    "TermOrder",
    "UnknownSymbolUse",
    "algebraic_relation",
    "distinct_root_count",
    "groebner",
    "minimal_polynomial",
    "normal_form",
    "poly_gcd",
    "poly_lcm",
    "solution_count",
    "squarefree_part",
]

__version__ = "0.1.0"
