"""Λ-bracket engine for SUSY vertex algebras, free-field Fock oracle,
generalized-geometry checks and the topological twist of the flat model."""
from .bracket import lambda_bracket, verify_jacobi, verify_skew
from .fields import (CoeffMul, Gen, NO, S, Sum, T, Vac, apply_S, apply_T,
                     canonical, normal_order, reassociate)
from .presentation import Presentation
from .presentations import (build_H, build_J, flat_patch, free_sigma_model, named_fields,
                            uch_patch, verify_n22, verify_single_n2)

__all__ = [
    "lambda_bracket", "verify_jacobi", "verify_skew",
    "CoeffMul", "Gen", "NO", "S", "Sum", "T", "Vac",
    "apply_S", "apply_T", "canonical", "normal_order", "reassociate",
    "Presentation", "build_H", "build_J", "flat_patch", "free_sigma_model",
    "named_fields", "uch_patch", "verify_n22", "verify_single_n2",
]
__version__ = "0.1.0"
