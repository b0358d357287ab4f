"""Homotopy-perturbation recursion in the natural-transform formulation.

For ``Dt^a u = L(u) + F(u) + g`` with ``u(x, 0) = f(x)`` the transformed
fixed-point equation is ``u = G + I^a[L(u) + F(u)]`` with
``G = f + I^a g``.  Expanding ``u = sum p^n u_n`` and ``F(u) = sum p^n H_n``
and matching powers of p gives

    u_0     = G
    u_{n+1} = I^a[ L(u_n) + H_n ]

where ``I^a`` is applied as the multiplication by ``u^a / s^a`` in the
transform domain followed by inversion; on the t^(k a) lattice that is
exactly the Riemann-Liouville power rule of :func:`frac_integral`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

import numpy as np

from ..errors import MissingIterateError
from ..series_algebra import FracSeries, caputo_derivative, eval_series, frac_integral
from ..special_functions import gamma
from ..spatial_expr import VARIABLES, SpatialExpr, max_sample_diff, sample_points
from .grammar import Equation, Monomial
from .problem import ProblemSpec

__all__ = [
    "ClosedForm",
    "Diagnostics",
    "SolutionBundle",
    "compositions",
    "partial",
    "he_polynomial",
    "iterate",
    "detect_closed_form",
    "rhs_series",
    "residual_series",
    "residual",
    "DETECT_TOL",
    "DEFAULT_TERMS",
]

DETECT_TOL = 1e-9
DEFAULT_TERMS = 10


def compositions(n: int, parts: int) -> Iterator[tuple[int, ...]]:
    """All ``(i_1, ..., i_parts)`` of nonnegative integers summing to ``n``."""
    if parts == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in compositions(n - first, parts - 1):
            yield (first,) + rest


def partial(obj, deriv: str):
    """Apply the spatial derivative named by letters such as ``"xx"``."""
    for letter in sorted(set(deriv)):
        obj = obj.diff(VARIABLES.index(letter), deriv.count(letter))
    return obj


def he_polynomial(monomial: Monomial, iterates: Mapping[str, Sequence], n: int):
    """n-th He polynomial of a multilinear monomial.

    For ``F = c * prod_j D_j u_{c_j}`` the n-th p-coefficient of
    ``F(sum_k p^k u_k)`` is ``c * sum_{i_1+...+i_r = n} prod_j D_j u_{c_j, i_j}``.
    ``iterates[name][k]`` may be a :class:`SpatialExpr` or a :class:`FracSeries`.
    """
    if n < 0:
        raise ValueError("He polynomial index must be >= 0")
    for name, _ in monomial.factors:
        seq = iterates.get(name)
        if seq is None or len(seq) <= n:
            have = -1 if seq is None else len(seq) - 1
            raise MissingIterateError(
                f"H_{n} of {monomial} needs {name}_0..{name}_{n}; have up to {name}_{have}"
            )
    cache: dict[tuple[str, int, str], object] = {}

    def term(name, i, deriv):
        key = (name, i, deriv)
        if key not in cache:
            cache[key] = partial(iterates[name][i], deriv)
        return cache[key]

    total = None
    for idx in compositions(n, monomial.degree):
        prod = None
        for (name, deriv), i in zip(monomial.factors, idx):
            f = term(name, i, deriv)
            prod = f if prod is None else prod * f
        total = prod if total is None else total + prod
    return total.scale(monomial.coef)


@dataclass(frozen=True)
class ClosedForm:
    """profile(x) * E_alpha(lam * t^alpha)."""

    lam: float
    profile: SpatialExpr

    def __str__(self):
        return f"({self.profile})*E_a({self.lam:.12g}*t^a)"


@dataclass
class Diagnostics:
    terms: int
    coefficient_norms: dict[str, list[float]] = field(default_factory=dict)
    closed_forms: dict[str, ClosedForm | None] = field(default_factory=dict)


@dataclass(frozen=True)
class SolutionBundle:
    spec: ProblemSpec
    series: Mapping[str, FracSeries]
    iterates: Mapping[str, tuple[FracSeries, ...]]
    he_table: Mapping[tuple[str, int], tuple[FracSeries, ...]]
    diagnostics: Diagnostics
    # residual series keyed by truncation order, filled lazily by residual()
    _residuals: dict = field(default_factory=dict, compare=False, repr=False)

    def evaluate(self, component: str, point, t, up_to: int | None = None):
        return eval_series(self.series[component], point, t, up_to)


def _linear_part(eq: Equation, current: Mapping[str, FracSeries], alpha, dim) -> FracSeries:
    total = FracSeries.zeros(alpha, dim)
    for lt in eq.linear:
        total = total + partial(current[lt.component], lt.deriv).scale(lt.coef)
    return total


def iterate(spec: ProblemSpec, n_terms: int = DEFAULT_TERMS) -> SolutionBundle:
    """Run the recursion for ``n_terms`` steps; series are truncated at order ``n_terms``."""
    if n_terms < 1:
        raise ValueError("need at least one term")
    a, dim, N = spec.alpha, spec.dim, n_terms
    iterates: dict[str, list[FracSeries]] = {}
    for c in spec.components:
        v0 = FracSeries.constant(a, spec.ics[c])
        src = spec.source(c)
        if not src.is_zero:
            v0 = v0 + frac_integral(src)
        iterates[c] = [v0.truncate(N)]
    he_table: dict[tuple[str, int], list[FracSeries]] = {
        (c, j): [] for c in spec.components for j in range(len(spec.equations[c].monomials))
    }
    for n in range(N):
        step = {c: iterates[c][n] for c in spec.components}
        new = {}
        for c in spec.components:
            eq = spec.equations[c]
            rhs = _linear_part(eq, step, a, dim)
            for j, mono in enumerate(eq.monomials):
                h = he_polynomial(mono, iterates, n).truncate(N)
                he_table[(c, j)].append(h)
                rhs = rhs + h
            new[c] = frac_integral(rhs).truncate(N)
        for c in spec.components:
            iterates[c].append(new[c])

    series = {}
    for c in spec.components:
        total = iterates[c][0]
        for v in iterates[c][1:]:
            total = total + v
        series[c] = total.truncate(N)

    diag = Diagnostics(terms=N)
    P = sample_points(dim)
    for c, s in series.items():
        diag.coefficient_norms[c] = [float(np.max(np.abs(a_k.eval(P)))) for a_k in s.coeffs]
        diag.closed_forms[c] = detect_closed_form(s)
    return SolutionBundle(
        spec,
        series,
        {c: tuple(v) for c, v in iterates.items()},
        {k: tuple(v) for k, v in he_table.items()},
        diag,
    )


def detect_closed_form(s: FracSeries, tol: float = DETECT_TOL) -> ClosedForm | None:
    """Recognise ``a_k = lam^k / Gamma(k a + 1) * a_0`` for every stored k.

    ``lam`` is fitted from a_1 by least squares over the sample points; the
    pattern is then checked coefficient by coefficient under sampling
    equality.  Returns None when any coefficient disagrees.
    """
    phi = s.coeffs[0]
    if s.order == 0:
        return ClosedForm(0.0, phi)
    if phi.is_zero:
        return None
    P = sample_points(s.dim)
    a0 = phi.eval(P)
    a1 = s.coeffs[1].eval(P)
    denom = float(np.dot(a0, a0))
    if denom == 0.0:
        return None
    lam = gamma(s.alpha + 1.0) * float(np.dot(a1, a0)) / denom
    for k in range(1, s.order + 1):
        expected = phi.scale(lam**k / gamma(k * s.alpha + 1.0))
        if max_sample_diff(s.coeffs[k], expected) > tol:
            return None
    if lam == 0.0:
        lam = 0.0  # drop a negative zero
    return ClosedForm(lam, phi)


def rhs_series(spec: ProblemSpec, u: Mapping[str, FracSeries], component: str) -> FracSeries:
    """Right-hand side L(u) + F(u) + g for one component, at full product order."""
    eq = spec.equations[component]
    total = _linear_part(eq, u, spec.alpha, spec.dim)
    for mono in eq.monomials:
        prod = None
        for name, deriv in mono.factors:
            f = partial(u[name], deriv)
            prod = f if prod is None else prod * f
        total = total + prod.scale(mono.coef)
    return total + spec.source(component)


def residual_series(spec: ProblemSpec, u: Mapping[str, FracSeries]) -> dict[str, FracSeries]:
    """``Dt^a u_c - RHS_c(u)`` for candidate series ``u`` (any truncation)."""
    return {c: caputo_derivative(u[c]) - rhs_series(spec, u, c) for c in spec.components}


def residual(spec: ProblemSpec, sol: SolutionBundle, point, t, up_to: int | None = None):
    """|Dt^a u - RHS(u)| per component for the series truncated at ``up_to``."""
    n = sol.diagnostics.terms if up_to is None else up_to
    if n > sol.diagnostics.terms:
        raise ValueError(f"up_to = {n} exceeds the truncation order {sol.diagnostics.terms}")
    key = (id(spec), n)
    if key not in sol._residuals:
        u = {c: s.truncate(n) for c, s in sol.series.items()}
        sol._residuals[key] = (spec, residual_series(spec, u))
    res = sol._residuals[key][1]
    out = {}
    for c, r in res.items():
        val = np.abs(eval_series(r, point, t))
        out[c] = float(val) if np.ndim(val) == 0 else val
    return out
