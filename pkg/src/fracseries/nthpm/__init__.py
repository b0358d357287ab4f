"""Natural-transform homotopy perturbation engine."""

from .grammar import Equation, LinearTerm, Monomial, parse_equation
from .problem import ProblemSpec, load_problem, parse_problem
from .solver import (
    ClosedForm,
    Diagnostics,
    SolutionBundle,
    detect_closed_form,
    he_polynomial,
    iterate,
    residual,
    residual_series,
    rhs_series,
)

__all__ = [
    "ClosedForm",
    "Diagnostics",
    "Equation",
    "LinearTerm",
    "Monomial",
    "ProblemSpec",
    "SolutionBundle",
    "detect_closed_form",
    "he_polynomial",
    "iterate",
    "load_problem",
    "parse_equation",
    "parse_problem",
    "residual",
    "residual_series",
    "rhs_series",
]
