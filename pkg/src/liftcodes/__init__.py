"""Lifted affine-invariant codes over finite fields.

Finite-field arithmetic, function tables on F_Q^m, degree-set lifting,
code construction, local correction and testing, and exhaustive oracles.
"""

from __future__ import annotations

from .codes import (
    BaseCode,
    ConstructionParams,
    LiftedCode,
    base_from_degrees,
    base_parity_multivariate,
    base_parity_univariate,
    base_reed_solomon,
    construct,
    lift,
)
from .degrees import DegreeSet, lift_degree_set, modstar, p_shadow_leq
from .errors import DecodeFailure, GuardError, LiftCodesError, ParameterError, UsageError
from .gf import FieldCtx, FieldElement, field_for, get_field
from .space import AffineMap, AffineSubspace, FuncTable

__all__ = [
    "AffineMap", "AffineSubspace", "BaseCode", "ConstructionParams", "DecodeFailure", "DegreeSet",
    "FieldCtx", "FieldElement", "FuncTable", "GuardError", "LiftCodesError", "LiftedCode",
    "ParameterError", "UsageError", "base_from_degrees", "base_parity_multivariate",
    "base_parity_univariate", "base_reed_solomon", "construct", "field_for", "get_field",
    "lift", "lift_degree_set", "modstar", "p_shadow_leq",
]

__version__ = "0.1.0"
