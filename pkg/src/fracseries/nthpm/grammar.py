"""Equation front end: ``Dt^a v = v_xx + 2*v*v_x - (v*w)_x``.

Both sides are parsed into polynomials over derivative references, a
derivative suffix on a parenthesised group is distributed by the sum and
product rules, everything is moved to one side, and the result is divided
by the coefficient of the single Caputo term.  What remains is the normal
form ``Dt^a u = sum linear terms + sum monomials + constant``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .._lexer import TokenStream
from ..errors import ParseError
from ..spatial_expr import VARIABLES

__all__ = ["LinearTerm", "Monomial", "Equation", "parse_equation", "canonical_deriv"]

CAPUTO = "Dt^a"

Factor = tuple[str, str]  # (component, derivative letters) or (CAPUTO, component)
Poly = dict[tuple[Factor, ...], float]


def canonical_deriv(letters: str) -> str:
    """Sorted derivative letters, e.g. ``"yx" -> "xy"``."""
    return "".join(sorted(letters, key=VARIABLES.index))


def _fmt(c: float) -> str:
    if c == int(c) and abs(c) < 1e15:
        return str(int(c))
    return repr(float(c))


def _ref(component: str, deriv: str) -> str:
    return f"{component}_{deriv}" if deriv else component


@dataclass(frozen=True, order=True)
class LinearTerm:
    """``coef * d^deriv component``; ``deriv`` is e.g. ``"xx"`` or ``""``."""

    component: str
    deriv: str = ""
    coef: float = field(default=1.0, compare=True)

    @property
    def var(self) -> str | None:
        """Single differentiation variable, or None for none/mixed."""
        letters = set(self.deriv)
        return letters.pop() if len(letters) == 1 else None

    @property
    def order(self) -> int:
        return len(self.deriv)


@dataclass(frozen=True, order=True)
class Monomial:
    """``coef * prod d^deriv_j component_j`` of degree >= 2."""

    factors: tuple[Factor, ...]
    coef: float = 1.0

    @property
    def degree(self) -> int:
        return len(self.factors)

    def __str__(self):
        return "*".join(_ref(c, d) for c, d in self.factors)


@dataclass(frozen=True)
class Equation:
    """Normal form ``Dt^a component = linear + monomials + constant``."""

    component: str
    linear: tuple[LinearTerm, ...] = ()
    monomials: tuple[Monomial, ...] = ()
    constant: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "linear", tuple(sorted(self.linear)))
        object.__setattr__(self, "monomials", tuple(sorted(self.monomials)))

    def components(self) -> set[str]:
        used = {self.component}
        used.update(t.component for t in self.linear)
        for m in self.monomials:
            used.update(c for c, _ in m.factors)
        return used

    def max_var(self) -> int:
        letters = {ch for t in self.linear for ch in t.deriv}
        letters |= {ch for m in self.monomials for _, d in m.factors for ch in d}
        return max((VARIABLES.index(ch) for ch in letters), default=-1)

    def render(self) -> str:
        pieces: list[tuple[float, str]] = []
        for t in self.linear:
            pieces.append((t.coef, _ref(t.component, t.deriv)))
        for m in self.monomials:
            pieces.append((m.coef, str(m)))
        if self.constant:
            pieces.append((self.constant, ""))
        out = ""
        for i, (c, body) in enumerate(pieces):
            mag = abs(c)
            if not body:
                text = _fmt(mag)
            elif mag == 1.0:
                text = body
            else:
                text = f"{_fmt(mag)}*{body}"
            if i == 0:
                out = ("-" if c < 0 else "") + text
            else:
                out += (" - " if c < 0 else " + ") + text
        return f"{CAPUTO} {self.component} = {out or '0'}"

    __str__ = render


# -- polynomial helpers -----------------------------------------------------------


def _padd(a: Poly, b: Poly, sign: float = 1.0) -> Poly:
    out = dict(a)
    for k, c in b.items():
        out[k] = out.get(k, 0.0) + sign * c
    return {k: c for k, c in out.items() if c != 0.0}


def _pmul(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for ka, ca in a.items():
        for kb, cb in b.items():
            k = tuple(sorted(ka + kb))
            out[k] = out.get(k, 0.0) + ca * cb
    return {k: c for k, c in out.items() if c != 0.0}


def _pscale(a: Poly, s: float) -> Poly:
    return {k: c * s for k, c in a.items() if c * s != 0.0}


class _EquationParser:
    def __init__(self, text: str, components: Iterable[str] | None):
        self.ts = TokenStream(text)
        self.components = set(components) if components is not None else None

    def error(self, msg, tok=None):
        self.ts.error(msg, tok)

    def apply_suffix(self, poly: Poly, tok) -> Poly:
        letters = tok.text[1:]
        self.check_letters(letters, tok)
        for ch in letters:
            out: Poly = {}
            for key, c in poly.items():
                for j, (name, d) in enumerate(key):
                    if name == CAPUTO:
                        raise ParseError("derivative of the Caputo term is not allowed",
                                         self.ts.text, tok.pos)
                    new = key[:j] + ((name, canonical_deriv(d + ch)),) + key[j + 1:]
                    new = tuple(sorted(new))
                    out[new] = out.get(new, 0.0) + c
            poly = {k: c for k, c in out.items() if c != 0.0}
        return poly

    def check_letters(self, letters: str, tok):
        if "t" in letters:
            raise ParseError("time derivatives other than the single Caputo term are not "
                             "allowed", self.ts.text, tok.pos)
        bad = [ch for ch in letters if ch not in VARIABLES]
        if bad:
            self.error(f"unknown derivative variable {bad[0]!r}", tok)

    def check_name(self, tok):
        if self.components is not None and tok.text not in self.components:
            raise ParseError(f"unknown component {tok.text!r}", self.ts.text, tok.pos)

    def expr(self) -> Poly:
        ts = self.ts
        if ts.accept("-"):
            out = _pscale(self.term(), -1.0)
        else:
            ts.accept("+")
            out = self.term()
        while True:
            if ts.accept("+"):
                out = _padd(out, self.term())
            elif ts.accept("-"):
                out = _padd(out, self.term(), -1.0)
            else:
                return out

    def term(self) -> Poly:
        ts = self.ts
        out = self.factor()
        while True:
            if ts.accept("*"):
                out = _pmul(out, self.factor())
            elif ts.peek.kind == "op" and ts.peek.text == "/":
                tok = ts.next()
                num = ts.next()
                if num.kind != "num" or float(num.text) == 0.0:
                    self.error("division only by a nonzero number", tok)
                out = _pscale(out, 1.0 / float(num.text))
            else:
                return out

    def factor(self) -> Poly:
        base = self.primary()
        ts = self.ts
        if ts.peek.kind == "op" and ts.peek.text == "^":
            ts.next()
            tok = ts.next()
            if tok.kind != "num" or not tok.text.isdigit():
                self.error("power must be a nonnegative integer", tok)
            out: Poly = {(): 1.0}
            for _ in range(int(tok.text)):
                out = _pmul(out, base)
            return out
        return base

    def primary(self) -> Poly:
        ts = self.ts
        tok = ts.peek
        if ts.accept("-"):
            return _pscale(self.factor(), -1.0)
        if tok.kind == "num":
            ts.next()
            return {(): float(tok.text)}
        if tok.kind == "caputo":
            ts.next()
            name = ts.next()
            if name.kind != "name":
                self.error("expected a component after Dt^a", name)
            self.check_name(name)
            if ts.peek.kind == "suffix":
                raise ParseError("derivative of the Caputo term is not allowed",
                                 ts.text, ts.peek.pos)
            return {((CAPUTO, name.text),): 1.0}
        if tok.kind == "name":
            ts.next()
            self.check_name(tok)
            deriv = ""
            if ts.peek.kind == "suffix":
                s = ts.next()
                self.check_letters(s.text[1:], s)
                deriv = canonical_deriv(s.text[1:])
            return {((tok.text, deriv),): 1.0}
        if ts.accept("("):
            inner = self.expr()
            ts.expect(")")
            if ts.peek.kind == "suffix":
                inner = self.apply_suffix(inner, ts.next())
            return inner
        if tok.kind == "suffix":
            self.error("derivative suffix must follow a name or parenthesis", tok)
        self.error(f"unexpected {tok.text or 'end of input'!r}", tok)


def parse_equation(text: str, components: Iterable[str] | None = None) -> Equation:
    """Parse one equation into its normal form.

    ``components`` (optional) is the set of legal component names; any other
    identifier is a semantic error.
    """
    p = _EquationParser(text, components)
    lhs = p.expr()
    p.ts.expect("=")
    rhs = p.expr()
    if p.ts.peek.kind != "eof":
        p.error(f"unexpected {p.ts.peek.text!r}")
    total = _padd(lhs, rhs, -1.0)
    caputo = {k: c for k, c in total.items() if any(n == CAPUTO for n, _ in k)}
    if len(caputo) != 1:
        raise ParseError(f"expected exactly one Caputo term, found {len(caputo)}", text, 0)
    (key, c), = caputo.items()
    if len(key) != 1:
        raise ParseError("the Caputo term must appear linearly (not inside a product)", text, 0)
    component = key[0][1]
    rest = _pscale({k: v for k, v in total.items() if k != key}, -1.0 / c)
    linear, monomials, constant = [], [], 0.0
    for k, v in rest.items():
        if not k:
            constant = v
        elif len(k) == 1:
            linear.append(LinearTerm(k[0][0], k[0][1], v))
        else:
            monomials.append(Monomial(k, v))
    return Equation(component, tuple(linear), tuple(monomials), constant)
