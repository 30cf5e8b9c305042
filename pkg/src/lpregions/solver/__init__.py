"""Conic relaxation engine and branch-and-bound."""
from .ipm import IPMSettings, RelaxSolution, solve_relaxation, solve_standard
from .standard import StandardForm, compile_model

__all__ = ["IPMSettings", "RelaxSolution", "solve_relaxation", "solve_standard",
           "StandardForm", "compile_model"]
