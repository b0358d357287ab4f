"""Closed symbolic algebra for spatial profiles a(x), a(x, y) or a(x, y, z).

An expression is a finite sum of scaled products of primitive factors:

    c * exp(k . x) * x^n1 y^n2 z^n3 * prod sin(w x_i)^p cos(w x_i)^q

This class is closed under addition, multiplication and partial
differentiation, and contains every profile the solver meets (exp(x+y+z),
sin x, and products of those).  Each product is stored once under a
canonical key, so structurally identical terms cancel on addition and
the canonical zero is the empty sum.  Trigonometric identities are not
applied: ``sin(x)^2 + cos(x)^2`` stays two terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ._lexer import TokenStream
from .errors import DimensionError, ParseError

__all__ = [
    "VARIABLES",
    "Trig",
    "SpatialExpr",
    "const",
    "zero",
    "var",
    "monomial",
    "sin",
    "cos",
    "exp_linear",
    "combine",
    "diff",
    "evaluate",
    "parse_spatial",
    "sample_points",
    "sample_equal",
    "max_sample_diff",
    "spatial_basis",
]

VARIABLES = ("x", "y", "z")
MAX_DIM = 3
# relative size below which a like-term sum counts as exact cancellation
CANCEL_RTOL = 1e-13


@dataclass(frozen=True, order=True)
class Trig:
    """sin(freq * x_var)**sin_pow * cos(freq * x_var)**cos_pow, freq > 0."""

    var: int
    freq: float
    sin_pow: int
    cos_pow: int


# (exp coefficients, monomial powers, trig factors)
Key = tuple[tuple[float, ...], tuple[int, ...], tuple[Trig, ...]]


def _unit_key(dim: int) -> Key:
    return ((0.0,) * dim, (0,) * dim, ())


def _merge_trig(a: tuple[Trig, ...], b: tuple[Trig, ...]) -> tuple[Trig, ...]:
    acc: dict[tuple[int, float], list[int]] = {}
    for t in a + b:
        p = acc.setdefault((t.var, t.freq), [0, 0])
        p[0] += t.sin_pow
        p[1] += t.cos_pow
    return tuple(
        Trig(v, f, p[0], p[1]) for (v, f), p in sorted(acc.items()) if p[0] or p[1]
    )


def _mul_keys(a: Key, b: Key) -> Key:
    return (
        tuple(x + y + 0.0 for x, y in zip(a[0], b[0])),
        tuple(x + y for x, y in zip(a[1], b[1])),
        _merge_trig(a[2], b[2]),
    )


def _collect(dim: int, pairs: Iterable[tuple[Key, float]]) -> tuple:
    groups: dict[Key, list[float]] = {}
    for key, c in pairs:
        if c != 0.0:
            groups.setdefault(key, []).append(c)
    terms = []
    for key, cs in groups.items():
        c = cs[0] if len(cs) == 1 else math.fsum(cs)
        if c == 0.0 or abs(c) <= CANCEL_RTOL * max(abs(x) for x in cs):
            continue
        terms.append((key, c))
    terms.sort(key=lambda kc: kc[0])
    return tuple(terms)


class SpatialExpr:
    """Immutable sum of scaled primitive products in ``dim`` variables."""

    __slots__ = ("dim", "terms", "_hash")

    def __init__(self, dim: int, terms: tuple = ()):
        if not 1 <= dim <= MAX_DIM:
            raise DimensionError(f"spatial dimension must be 1..3, got {dim}")
        self.dim = dim
        self.terms = terms
        self._hash = None

    @classmethod
    def from_pairs(cls, dim: int, pairs: Iterable[tuple[Key, float]]) -> "SpatialExpr":
        return cls(dim, _collect(dim, pairs))

    # -- structure ----------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, SpatialExpr):
            return NotImplemented
        return self.dim == other.dim and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.dim, self.terms))
        return self._hash

    def __repr__(self):
        return f"SpatialExpr(dim={self.dim}, {str(self)!r})"

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_constant(self) -> bool:
        unit = _unit_key(self.dim)
        return all(k == unit for k, _ in self.terms)

    def constant_value(self) -> float:
        if not self.is_constant:
            raise ValueError(f"{self} is not constant")
        return self.terms[0][1] if self.terms else 0.0

    def variables(self) -> set[int]:
        used = set()
        for (e, m, trig), _ in self.terms:
            used.update(i for i in range(self.dim) if e[i] or m[i])
            used.update(t.var for t in trig)
        return used

    def with_dim(self, dim: int) -> "SpatialExpr":
        """Re-embed in ``dim`` variables; unused trailing variables may be dropped."""
        if dim == self.dim:
            return self
        if self.variables() and max(self.variables()) >= dim:
            raise DimensionError(f"{self} uses variables beyond dimension {dim}")
        pad = max(0, dim - self.dim)
        pairs = [
            (((tuple(e[:dim]) + (0.0,) * pad), (tuple(m[:dim]) + (0,) * pad), trig), c)
            for (e, m, trig), c in self.terms
        ]
        return SpatialExpr.from_pairs(dim, pairs)

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> "SpatialExpr":
        if isinstance(other, SpatialExpr):
            if other.dim != self.dim:
                raise DimensionError(f"dimension mismatch: {self.dim} vs {other.dim}")
            return other
        if isinstance(other, (int, float, np.integer, np.floating)):
            return const(float(other), self.dim)
        raise TypeError(f"cannot combine SpatialExpr with {type(other).__name__}")

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        if other.is_zero:
            return self
        if self.is_zero:
            return other
        return SpatialExpr.from_pairs(self.dim, self.terms + other.terms)

    __radd__ = __add__

    def __neg__(self):
        return SpatialExpr(self.dim, tuple((k, -c) for k, c in self.terms))

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, k: float) -> "SpatialExpr":
        k = float(k)
        if k == 0.0:
            return SpatialExpr(self.dim)
        if k == 1.0:
            return self
        # products can underflow to zero, so keep the canonical-form filter
        return SpatialExpr(self.dim, tuple((key, k * c) for key, c in self.terms if k * c != 0.0))

    def __mul__(self, other):
        if isinstance(other, (int, float, np.integer, np.floating)):
            return self.scale(other)
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        if self.is_zero or other.is_zero:
            return SpatialExpr(self.dim)
        pairs = [
            (_mul_keys(ka, kb), ca * cb)
            for ka, ca in self.terms
            for kb, cb in other.terms
        ]
        return SpatialExpr.from_pairs(self.dim, pairs)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, (int, np.integer)) or n < 0:
            raise ValueError("only nonnegative integer powers are supported")
        out = const(1.0, self.dim)
        for _ in range(int(n)):
            out = out * self
        return out

    # -- calculus -----------------------------------------------------------

    def diff(self, var: int, order: int = 1) -> "SpatialExpr":
        """Exact partial derivative of the given order in variable ``var``."""
        if not 0 <= var < self.dim:
            raise DimensionError(f"variable index {var} outside dimension {self.dim}")
        if order < 0:
            raise ValueError("derivative order must be >= 0")
        out = self
        for _ in range(order):
            out = SpatialExpr.from_pairs(self.dim, out._diff_pairs(var))
        return out

    def _diff_pairs(self, var: int):
        for key, c in self.terms:
            e, m, trig = key
            if e[var]:
                yield key, c * e[var]
            if m[var]:
                m2 = list(m)
                m2[var] -= 1
                yield (e, tuple(m2), trig), c * m[var]
            for j, t in enumerate(trig):
                if t.var != var:
                    continue
                rest = trig[:j] + trig[j + 1:]
                if t.sin_pow:
                    new = Trig(t.var, t.freq, t.sin_pow - 1, t.cos_pow + 1)
                    yield (e, m, _merge_trig(rest, (new,))), c * t.sin_pow * t.freq
                if t.cos_pow:
                    new = Trig(t.var, t.freq, t.sin_pow + 1, t.cos_pow - 1)
                    yield (e, m, _merge_trig(rest, (new,))), -c * t.cos_pow * t.freq

    # -- evaluation ---------------------------------------------------------

    def _points(self, point) -> np.ndarray:
        X = np.asarray(point, dtype=float)
        if X.ndim == 0:
            X = X[None]
        if self.dim == 1 and X.shape[-1:] != (1,):
            X = X[..., None]
        if X.shape[-1] != self.dim:
            raise DimensionError(f"point dimension {X.shape[-1]} != {self.dim}")
        return X

    def eval(self, point):
        """Value at a point of shape (dim,) or at points of shape (..., dim).

        For dim 1 a bare scalar or 1-D array of x values is accepted.
        """
        X = self._points(point)
        shape = X.shape[:-1]
        out = np.zeros(shape)
        cache: dict = {}

        def trigval(kind, v, f):
            k = (kind, v, f)
            if k not in cache:
                cache[k] = (np.sin if kind == "s" else np.cos)(f * X[..., v])
            return cache[k]

        for (e, m, trig), c in self.terms:
            val = np.full(shape, c)
            if any(e):
                val = val * np.exp(X @ np.asarray(e))
            for i, n in enumerate(m):
                if n:
                    val = val * X[..., i] ** n
            for t in trig:
                if t.sin_pow:
                    val = val * trigval("s", t.var, t.freq) ** t.sin_pow
                if t.cos_pow:
                    val = val * trigval("c", t.var, t.freq) ** t.cos_pow
            out = out + val
        if not shape:
            return float(out)
        return out

    __call__ = eval

    # -- text ---------------------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        out = ""
        for i, (key, c) in enumerate(self.terms):
            factors = _render_key(key)
            mag = abs(c)
            if factors and mag == 1.0:
                body = "*".join(factors)
            else:
                body = "*".join([_fmt(mag)] + factors)
            if i == 0:
                out = ("-" if c < 0 else "") + body
            else:
                out += (" - " if c < 0 else " + ") + body
        return out


def _fmt(x: float) -> str:
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


def _render_linear(coeffs: Sequence[float]) -> str:
    out = ""
    for i, a in enumerate(coeffs):
        if not a:
            continue
        term = VARIABLES[i] if abs(a) == 1.0 else f"{_fmt(abs(a))}*{VARIABLES[i]}"
        if not out:
            out = ("-" if a < 0 else "") + term
        else:
            out += ("-" if a < 0 else "+") + term
    return out


def _render_key(key: Key) -> list[str]:
    e, m, trig = key
    factors = []
    if any(e):
        factors.append(f"exp({_render_linear(e)})")
    for i, n in enumerate(m):
        if n:
            factors.append(VARIABLES[i] if n == 1 else f"{VARIABLES[i]}^{n}")
    for t in trig:
        arg = VARIABLES[t.var] if t.freq == 1.0 else f"{_fmt(t.freq)}*{VARIABLES[t.var]}"
        for name, p in (("sin", t.sin_pow), ("cos", t.cos_pow)):
            if p:
                factors.append(f"{name}({arg})" if p == 1 else f"{name}({arg})^{p}")
    return factors


# -- constructors -------------------------------------------------------------


def zero(dim: int = 1) -> SpatialExpr:
    return SpatialExpr(dim)


def const(c: float, dim: int = 1) -> SpatialExpr:
    return SpatialExpr.from_pairs(dim, [(_unit_key(dim), float(c))])


def monomial(var_index: int, power: int, dim: int = 1) -> SpatialExpr:
    if not 0 <= var_index < dim:
        raise DimensionError(f"variable index {var_index} outside dimension {dim}")
    m = [0] * dim
    m[var_index] = int(power)
    return SpatialExpr.from_pairs(dim, [(((0.0,) * dim, tuple(m), ()), 1.0)])


def var(var_index: int, dim: int = 1) -> SpatialExpr:
    return monomial(var_index, 1, dim)


def _trig(kind: str, var_index: int, freq: float, dim: int) -> SpatialExpr:
    if not 0 <= var_index < dim:
        raise DimensionError(f"variable index {var_index} outside dimension {dim}")
    freq = float(freq)
    sign = 1.0
    if freq < 0:
        freq = -freq
        sign = -1.0 if kind == "sin" else 1.0
    if freq == 0.0:
        return zero(dim) if kind == "sin" else const(1.0, dim)
    t = Trig(var_index, freq, 1, 0) if kind == "sin" else Trig(var_index, freq, 0, 1)
    return SpatialExpr.from_pairs(dim, [(((0.0,) * dim, (0,) * dim, (t,)), sign)])


def sin(var_index: int = 0, freq: float = 1.0, dim: int = 1) -> SpatialExpr:
    """sin(freq * x_var)."""
    return _trig("sin", var_index, freq, dim)


def cos(var_index: int = 0, freq: float = 1.0, dim: int = 1) -> SpatialExpr:
    """cos(freq * x_var)."""
    return _trig("cos", var_index, freq, dim)


def exp_linear(coeffs: Sequence[float], shift: float = 0.0) -> SpatialExpr:
    """exp(coeffs . x + shift); the dimension is ``len(coeffs)``."""
    dim = len(coeffs)
    e = tuple(float(a) + 0.0 for a in coeffs)
    return SpatialExpr.from_pairs(dim, [((e, (0,) * dim, ()), math.exp(shift))])


def combine(op: str, *operands) -> SpatialExpr:
    """``combine("add", a, b, ...)``, ``combine("mul", a, b, ...)`` or ``combine("scale", c, e)``."""
    if op == "scale":
        c, e = operands
        return e.scale(c)
    if not operands:
        raise ValueError("combine needs at least one operand")
    out = operands[0]
    for e in operands[1:]:
        if op == "add":
            out = out + e
        elif op == "mul":
            out = out * e
        else:
            raise ValueError(f"unknown combine op {op!r}")
    return out


def diff(e: SpatialExpr, var_index: int, order: int = 1) -> SpatialExpr:
    return e.diff(var_index, order)


def evaluate(e: SpatialExpr, point):
    return e.eval(point)


# -- parsing --------------------------------------------------------------------


class _SpatialParser:
    def __init__(self, text: str):
        self.ts = TokenStream(text)
        self.dim = MAX_DIM

    def parse(self) -> SpatialExpr:
        e = self.expr()
        if self.ts.peek.kind != "eof":
            self.ts.error(f"unexpected {self.ts.peek.text!r}")
        return e

    def expr(self) -> SpatialExpr:
        ts = self.ts
        if ts.accept("-"):
            out = -self.term()
        else:
            ts.accept("+")
            out = self.term()
        while True:
            if ts.accept("+"):
                out = out + self.term()
            elif ts.accept("-"):
                out = out - self.term()
            else:
                return out

    def term(self) -> SpatialExpr:
        ts = self.ts
        out = self.power()
        while True:
            if ts.accept("*"):
                out = out * self.power()
            elif ts.peek.kind == "op" and ts.peek.text == "/":
                tok = ts.next()
                d = self.power()
                if not d.is_constant or d.constant_value() == 0.0:
                    ts.error("division only by a nonzero constant", tok)
                out = out.scale(1.0 / d.constant_value())
            else:
                return out

    def power(self) -> SpatialExpr:
        base = self.atom()
        if self.ts.peek.kind == "op" and self.ts.peek.text == "^":
            self.ts.next()
            tok = self.ts.next()
            if tok.kind != "num" or not tok.text.isdigit():
                self.ts.error("exponent must be a nonnegative integer", tok)
            return base ** int(tok.text)
        return base

    def atom(self) -> SpatialExpr:
        ts = self.ts
        tok = ts.peek
        if ts.accept("-"):
            return -self.power()
        if ts.accept("("):
            e = self.expr()
            ts.expect(")")
            return e
        if tok.kind == "num":
            ts.next()
            return const(float(tok.text), self.dim)
        if tok.kind == "name":
            ts.next()
            name = tok.text
            if name in VARIABLES:
                return var(VARIABLES.index(name), self.dim)
            if name == "pi":
                return const(math.pi, self.dim)
            if name in ("sin", "cos", "exp"):
                ts.expect("(")
                arg = self.expr()
                ts.expect(")")
                return self.apply(name, arg, tok)
            ts.error(f"unknown name {name!r}", tok)
        ts.error(f"unexpected {tok.text or 'end of input'!r}", tok)

    def apply(self, name: str, arg: SpatialExpr, tok) -> SpatialExpr:
        shift = 0.0
        coeffs = [0.0] * self.dim
        for (e, m, trig), c in arg.terms:
            if any(e) or trig or sum(m) > 1:
                self.ts.error(f"{name}() argument must be linear in x, y, z", tok)
            if sum(m) == 0:
                shift += c
            else:
                coeffs[m.index(1)] += c
        if name == "exp":
            return exp_linear(coeffs, shift)
        used = [i for i, a in enumerate(coeffs) if a]
        if shift or len(used) > 1:
            self.ts.error(f"{name}() argument must be c*x_i (one variable, no offset)", tok)
        if not used:
            return zero(self.dim) if name == "sin" else const(1.0, self.dim)
        return _trig(name, used[0], coeffs[used[0]], self.dim)


def parse_spatial(text: str, dim: int | None = None) -> SpatialExpr:
    """Parse e.g. ``"sin(x)"``, ``"exp(x+y+z)"``, ``"2*x^2 - cos(3*y)"``.

    ``dim`` defaults to the highest variable used (at least 1).
    """
    e = _SpatialParser(text).parse()
    used = e.variables()
    need = max(used) + 1 if used else 1
    if dim is None:
        dim = need
    elif need > dim:
        raise ParseError(f"expression uses {VARIABLES[need - 1]} but dimension is {dim}", text, 0)
    return e.with_dim(dim)


# -- sampling equality ----------------------------------------------------------


def sample_points(dim: int, n: int = 32, seed: int = 0, box=(-2.0, 2.0)) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.uniform(box[0], box[1], size=(n, dim))


def max_sample_diff(a: SpatialExpr, b: SpatialExpr, n: int = 32, seed: int = 0) -> float:
    """Largest scaled pointwise difference |a-b| / max(1, |a|, |b|) over sample points."""
    if a.dim != b.dim:
        raise DimensionError(f"dimension mismatch: {a.dim} vs {b.dim}")
    P = sample_points(a.dim, n, seed)
    va, vb = a.eval(P), b.eval(P)
    scale = np.maximum(1.0, np.maximum(np.abs(va), np.abs(vb)))
    return float(np.max(np.abs(va - vb) / scale))


def sample_equal(a: SpatialExpr, b: SpatialExpr, tol: float = 1e-10, n: int = 32,
                 seed: int = 0) -> bool:
    """Equality for test purposes: agreement at ``n`` pseudo-random points."""
    return max_sample_diff(a, b, n, seed) <= tol


def spatial_basis(dim: int = 1) -> list[SpatialExpr]:
    """Small family of profiles used for randomised tests and demos."""
    out = [const(1.0, dim)]
    for i in range(dim):
        out += [
            var(i, dim),
            monomial(i, 2, dim),
            sin(i, 1.0, dim),
            cos(i, 1.0, dim),
            sin(i, 2.0, dim),
        ]
    out.append(exp_linear([1.0] * dim))
    out.append(exp_linear([-0.5] + [0.0] * (dim - 1)))
    return out
