"""Exact Legendre transformations for higher-order Lagrangians.

The main entry points are re-exported here; see the submodules for the
full interfaces.
"""

from .bridge import generating_map_even, generating_map_odd, verify_canonical
from .canonical import dirac_chain, poisson_bracket
from .ostro import hamilton_equations, ostrogradsky_hamiltonian
from .schmidt import schmidt_even, schmidt_odd, solve_auxiliary_even
from .symcore import Expr, parse, render
from .variational import LagrangianSpec, euler_lagrange

__version__ = "0.1.0"

__all__ = [
    "Expr",
    "LagrangianSpec",
    "dirac_chain",
    "euler_lagrange",
    "generating_map_even",
    "generating_map_odd",
    "hamilton_equations",
    "ostrogradsky_hamiltonian",
    "parse",
    "poisson_bracket",
    "render",
    "schmidt_even",
    "schmidt_odd",
    "solve_auxiliary_even",
    "verify_canonical",
]
