"""Exact symbolic kernel over multivariate rational functions."""

from .calculus import antiderivative, partial, substitute, total_time_derivative
from .grammar import parse, render
from .linalg import (
    ExprMatrix,
    affine_coefficients,
    det,
    is_symmetric,
    jacobian,
    linear_solve,
    matrix_rank,
)
from .poly import ONE, ZERO, Expr, is_zero, normalize
from .variables import Var, VariableContext, jet_name, split_jet

__all__ = [
    "Expr",
    "ExprMatrix",
    "ONE",
    "Var",
    "VariableContext",
    "ZERO",
    "affine_coefficients",
    "antiderivative",
    "det",
    "is_symmetric",
    "is_zero",
    "jacobian",
    "jet_name",
    "linear_solve",
    "matrix_rank",
    "normalize",
    "parse",
    "partial",
    "render",
    "split_jet",
    "substitute",
    "total_time_derivative",
]
