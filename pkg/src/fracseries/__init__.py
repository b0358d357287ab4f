"""fracseries: fractional power-series solutions of time-fractional PDEs.

The solver combines the natural transform with homotopy perturbation:
the PDE is rewritten as a fixed point of the Riemann-Liouville integral,
the solution is expanded as sum_k a_k(x) t^(k alpha), and nonlinear terms
are handled through He polynomials.  Closed Mittag-Leffler forms are
recognised when the coefficients allow it, and every result can be
checked by residual substitution or against an independent L1
finite-difference solver.

>>> from fracseries import ProblemSpec, iterate
>>> spec = ProblemSpec.build(0.5, ["Dt^a v = v_xx"], {"v": "sin(x)"})
>>> sol = iterate(spec, 10)
>>> cf = sol.diagnostics.closed_forms["v"]
>>> round(cf.lam, 12), str(cf.profile)
(-1.0, 'sin(x)')
"""

__version__ = "0.1.0"

from .nthpm import (
    ProblemSpec,
    detect_closed_form,
    he_polynomial,
    iterate,
    load_problem,
    parse_equation,
    parse_problem,
    residual,
)
from .series_algebra import FracSeries, caputo_derivative, eval_series, frac_integral, product
from .spatial_expr import SpatialExpr, parse_spatial
from .special_functions import gamma, gamma_ratio, mittag_leffler

__all__ = [
    "FracSeries",
    "ProblemSpec",
    "SpatialExpr",
    "caputo_derivative",
    "detect_closed_form",
    "eval_series",
    "frac_integral",
    "gamma",
    "gamma_ratio",
    "he_polynomial",
    "iterate",
    "load_problem",
    "mittag_leffler",
    "parse_equation",
    "parse_problem",
    "parse_spatial",
    "product",
    "residual",
]
