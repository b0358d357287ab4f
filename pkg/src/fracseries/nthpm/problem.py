"""Problem specifications and the line-oriented ``.frac`` problem file format.

A problem file looks like::

    # coupled Burgers system
    alpha 0.5
    component v
    component w
    equation Dt^a v = v_xx + 2*v*v_x - (v*w)_x
    equation Dt^a w = w_xx + 2*w*w_x - (v*w)_x
    ic v = sin(x)
    ic w = sin(x)

``source v 1 = sin(x)`` adds ``sin(x) * t^(1*alpha)`` to the source of
``v``; ``dim 3`` forces the spatial dimension.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping

from ..errors import ParseError, ProblemFileError
from ..series_algebra import FracSeries
from ..spatial_expr import SpatialExpr, const, parse_spatial
from ..special_functions import check_order
from .grammar import Equation, parse_equation

__all__ = ["ProblemSpec", "parse_problem", "load_problem"]


@dataclass(frozen=True)
class ProblemSpec:
    """A system ``Dt^a u_c = RHS_c(u)`` with ``u_c(x, 0) = ic_c(x)``."""

    alpha: float
    components: tuple[str, ...]
    equations: Mapping[str, Equation]
    ics: Mapping[str, SpatialExpr]
    sources: Mapping[str, FracSeries] = field(default_factory=dict)
    dim: int = 1

    @classmethod
    def build(cls, alpha: float, equations, ics, sources=None, dim: int | None = None):
        """Assemble and validate a spec from text or parsed pieces.

        ``equations`` is a list (or component-keyed mapping) of equation
        strings or :class:`Equation`; ``ics`` maps components to spatial
        expression text or :class:`SpatialExpr`.
        """
        alpha = check_order(alpha)
        eq_items = list(equations.values()) if isinstance(equations, Mapping) else list(equations)
        parsed = [e if isinstance(e, Equation) else parse_equation(e) for e in eq_items]
        components = tuple(e.component for e in parsed)
        if len(set(components)) != len(components):
            raise ValueError("each component needs exactly one equation")
        eqs = {e.component: e for e in parsed}
        for e in parsed:
            unknown = e.components() - set(components)
            if unknown:
                raise ValueError(f"equation for {e.component!r} uses unknown components "
                                 f"{sorted(unknown)}")
        missing = set(components) - set(ics)
        if missing:
            raise ValueError(f"missing initial conditions for {sorted(missing)}")
        extra = set(ics) - set(components)
        if extra:
            raise ValueError(f"initial conditions for unknown components {sorted(extra)}")
        ic_exprs = {c: (v if isinstance(v, SpatialExpr) else parse_spatial(v))
                    for c, v in ics.items()}
        sources = dict(sources or {})
        need = max([e.max_var() + 1 for e in parsed]
                   + [max(x.variables(), default=-1) + 1 for x in ic_exprs.values()]
                   + [s.dim for s in sources.values()] + [1])
        if dim is None:
            dim = need
        elif dim < need:
            raise ValueError(f"problem needs dimension {need}, got dim {dim}")
        ic_exprs = {c: ic_exprs[c].with_dim(dim) for c in components}
        src: dict[str, FracSeries] = {}
        for c in components:
            s = sources.get(c)
            if s is not None:
                if s.alpha != alpha:
                    s = FracSeries.make(alpha, s.coeffs, s.dim)
                if s.dim != dim:
                    s = FracSeries.make(alpha, [a.with_dim(dim) for a in s.coeffs], dim)
            if eqs[c].constant:
                k = FracSeries.constant(alpha, const(eqs[c].constant, dim))
                s = k if s is None else s + k
                eqs[c] = replace(eqs[c], constant=0.0)
            if s is not None and not s.is_zero:
                src[c] = s
        return cls(alpha, components, eqs, ic_exprs, src, dim)

    def with_alpha(self, alpha: float) -> "ProblemSpec":
        alpha = check_order(alpha)
        sources = {c: FracSeries.make(alpha, s.coeffs, s.dim) for c, s in self.sources.items()}
        return replace(self, alpha=alpha, sources=sources)

    def source(self, component: str) -> FracSeries:
        s = self.sources.get(component)
        return s if s is not None else FracSeries.zeros(self.alpha, self.dim)

    def render(self) -> str:
        lines = [f"alpha {self.alpha!r}", f"dim {self.dim}"]
        lines += [f"component {c}" for c in self.components]
        lines += [f"equation {self.equations[c].render()}" for c in self.components]
        lines += [f"ic {c} = {self.ics[c]}" for c in self.components]
        for c, s in self.sources.items():
            for k, a in enumerate(s.coeffs):
                if not a.is_zero:
                    lines.append(f"source {c} {k} = {a}")
        return "\n".join(lines) + "\n"


def parse_problem(text: str, path: str | None = None, alpha: float | None = None) -> ProblemSpec:
    """Parse problem-file text; ``alpha`` overrides any ``alpha`` line."""
    file_alpha = None
    dim = None
    declared: list[str] = []
    equations: list[tuple[int, str]] = []
    ics: dict[str, tuple[int, str]] = {}
    sources: list[tuple[int, str, int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        word, _, rest = line.partition(" ")
        rest = rest.strip()
        try:
            if word == "alpha":
                file_alpha = float(rest)
            elif word == "dim":
                dim = int(rest)
            elif word == "component":
                if not rest.isidentifier():
                    raise ValueError(f"bad component name {rest!r}")
                declared.append(rest)
            elif word == "equation":
                equations.append((lineno, rest))
            elif word == "ic":
                name, eq, expr = rest.partition("=")
                if not eq:
                    raise ValueError("expected 'ic <name> = <expr>'")
                ics[name.strip()] = (lineno, expr.strip())
            elif word == "source":
                head, eq, expr = rest.partition("=")
                parts = head.split()
                if not eq or len(parts) != 2:
                    raise ValueError("expected 'source <name> <k> = <expr>'")
                sources.append((lineno, parts[0], int(parts[1]), expr.strip()))
            else:
                raise ValueError(f"unknown directive {word!r}")
        except (ValueError, ParseError) as exc:
            raise ProblemFileError(str(exc), path, lineno) from None

    if alpha is None:
        alpha = file_alpha
    if alpha is None:
        raise ProblemFileError("no alpha given (add an 'alpha' line or pass --alpha)", path)
    try:
        alpha = check_order(alpha)
    except ValueError as exc:
        raise ProblemFileError(str(exc), path) from None
    if not equations:
        raise ProblemFileError("no equations", path)

    names = set(declared) if declared else None
    parsed = []
    for lineno, eq_text in equations:
        try:
            parsed.append(parse_equation(eq_text, names))
        except ParseError as exc:
            raise ProblemFileError(str(exc), path, lineno) from None
    comps = [e.component for e in parsed]
    if declared and set(declared) != set(comps):
        raise ProblemFileError(f"declared components {declared} but equations for {comps}", path)

    ic_exprs = {}
    for name, (lineno, expr) in ics.items():
        try:
            ic_exprs[name] = parse_spatial(expr)
        except ParseError as exc:
            raise ProblemFileError(str(exc), path, lineno) from None

    src_terms: dict[str, list] = {}
    for lineno, name, k, expr in sources:
        if name not in comps:
            raise ProblemFileError(f"source for unknown component {name!r}", path, lineno)
        if k < 0:
            raise ProblemFileError("source power index must be >= 0", path, lineno)
        try:
            src_terms.setdefault(name, []).append((k, parse_spatial(expr)))
        except ParseError as exc:
            raise ProblemFileError(str(exc), path, lineno) from None

    ic_dim = max([e.dim for e in ic_exprs.values()] + [1])
    src_dim = max([p.dim for ts in src_terms.values() for _, p in ts] + [1])
    need = max([ic_dim, src_dim] + [e.max_var() + 1 for e in parsed])
    dim = dim or need
    srcs = {}
    for name, items in src_terms.items():
        n = max(k for k, _ in items)
        coeffs = [const(0.0, dim)] * (n + 1)
        for k, p in items:
            coeffs[k] = coeffs[k] + p.with_dim(dim)
        srcs[name] = FracSeries.make(alpha, coeffs, dim)
    try:
        return ProblemSpec.build(alpha, parsed, ic_exprs, srcs, dim)
    except ValueError as exc:
        raise ProblemFileError(str(exc), path) from None


def load_problem(path, alpha: float | None = None) -> ProblemSpec:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ProblemFileError("file not found", str(path)) from None
    except OSError as exc:
        raise ProblemFileError(f"cannot read file: {exc.strerror}", str(path)) from None
    return parse_problem(text, str(path), alpha)
