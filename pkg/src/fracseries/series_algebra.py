"""Fractional power series v(x, t) = sum_k a_k(x) t^(k alpha).

Coefficients are the raw multipliers of t^(k alpha) (no Gamma
normalisation), so products are plain Cauchy convolutions and the Gamma
factors live only in :func:`frac_integral` and :func:`caputo_derivative`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .errors import AlphaMismatchError, DimensionError, LatticeError
from .natural_transform import TransformImage, as_fraction
from .special_functions import check_order, gamma, gamma_ratio
from .spatial_expr import SpatialExpr, const, zero

__all__ = [
    "FracSeries",
    "frac_integral",
    "caputo_derivative",
    "product",
    "spatial_derivative",
    "eval_series",
    "to_image",
    "mittag_leffler_series",
]


@dataclass(frozen=True, eq=False)
class FracSeries:
    """Truncated series ``sum_{k<=N} coeffs[k] * t**(k*alpha)``.

    Build with :meth:`make` so that dimensions are checked and trailing
    zero coefficients trimmed (``a_0`` is always kept).
    """

    alpha: float
    coeffs: tuple[SpatialExpr, ...]
    dim: int

    @classmethod
    def make(cls, alpha: float, coeffs: Iterable, dim: int | None = None) -> "FracSeries":
        alpha = check_order(alpha)
        items = list(coeffs)
        if dim is None:
            dims = {c.dim for c in items if isinstance(c, SpatialExpr)}
            dim = dims.pop() if len(dims) == 1 else None
            if dim is None:
                if dims:
                    raise DimensionError("coefficients have mixed dimensions")
                dim = 1
        out = []
        for c in items:
            if not isinstance(c, SpatialExpr):
                c = const(float(c), dim)
            if c.dim != dim:
                raise DimensionError(f"coefficient dimension {c.dim} != {dim}")
            out.append(c)
        while len(out) > 1 and out[-1].is_zero:
            out.pop()
        if not out:
            out = [zero(dim)]
        return cls(alpha, tuple(out), dim)

    @classmethod
    def constant(cls, alpha: float, profile: SpatialExpr) -> "FracSeries":
        return cls.make(alpha, [profile], profile.dim)

    @classmethod
    def zeros(cls, alpha: float, dim: int = 1) -> "FracSeries":
        return cls.make(alpha, [], dim)

    @classmethod
    def from_terms(cls, alpha: float, terms: Iterable[tuple[SpatialExpr, object]],
                   dim: int | None = None) -> "FracSeries":
        """Series from ``(profile, exponent)`` pairs; every exponent must be k*alpha."""
        a = as_fraction(check_order(alpha))
        slots: dict[int, list[SpatialExpr]] = {}
        for profile, exponent in terms:
            q = as_fraction(exponent) / a
            if q.denominator != 1 or q < 0:
                raise LatticeError(f"exponent {exponent} is not a multiple of alpha = {alpha}")
            slots.setdefault(int(q), []).append(profile)
            dim = dim or profile.dim
        if dim is None:
            dim = 1
        n = max(slots, default=0)
        coeffs = []
        for k in range(n + 1):
            total = zero(dim)
            for p in slots.get(k, []):
                total = total + p
            coeffs.append(total)
        return cls.make(alpha, coeffs, dim)

    # -- structure ----------------------------------------------------------

    @property
    def order(self) -> int:
        """Truncation order N (index of the last stored coefficient)."""
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return all(c.is_zero for c in self.coeffs)

    def exponent(self, k: int) -> Fraction:
        return k * as_fraction(self.alpha)

    def __getitem__(self, k: int) -> SpatialExpr:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        if k < 0:
            raise IndexError(k)
        return zero(self.dim)

    def __eq__(self, other):
        if not isinstance(other, FracSeries):
            return NotImplemented
        return (self.alpha == other.alpha and self.dim == other.dim
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.alpha, self.dim, self.coeffs))

    def truncate(self, n: int) -> "FracSeries":
        if n >= self.order:
            return self
        return FracSeries.make(self.alpha, self.coeffs[: n + 1], self.dim)

    def _check(self, other: "FracSeries"):
        if self.alpha != other.alpha:
            raise AlphaMismatchError(f"alpha mismatch: {self.alpha} vs {other.alpha}")
        if self.dim != other.dim:
            raise DimensionError(f"dimension mismatch: {self.dim} vs {other.dim}")

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, FracSeries):
            return NotImplemented
        self._check(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return FracSeries.make(self.alpha, [self[k] + other[k] for k in range(n)], self.dim)

    def __neg__(self):
        return FracSeries(self.alpha, tuple(-c for c in self.coeffs), self.dim)

    def __sub__(self, other):
        if not isinstance(other, FracSeries):
            return NotImplemented
        return self + (-other)

    def scale(self, k: float) -> "FracSeries":
        return FracSeries.make(self.alpha, [c.scale(k) for c in self.coeffs], self.dim)

    def __mul__(self, other):
        if isinstance(other, FracSeries):
            return product(self, other)
        if isinstance(other, (int, float, np.integer, np.floating)):
            return self.scale(other)
        return NotImplemented

    __rmul__ = __mul__

    def diff(self, var: int, order: int = 1) -> "FracSeries":
        return spatial_derivative(self, var, order)

    def evaluate(self, point, t, up_to: int | None = None):
        return eval_series(self, point, t, up_to)

    def __str__(self):
        parts = []
        for k, c in enumerate(self.coeffs):
            if c.is_zero and k:
                continue
            if k == 0:
                parts.append(f"({c})")
            elif k == 1:
                parts.append(f"({c})*t^a")
            else:
                parts.append(f"({c})*t^({k}a)")
        return " + ".join(parts)


def frac_integral(v: FracSeries) -> FracSeries:
    """Riemann-Liouville integral I^alpha, term-wise power rule.

    a_k t^(k a) -> a_k * Gamma(k a + 1) / Gamma((k+1) a + 1) * t^((k+1) a).
    """
    a = v.alpha
    coeffs = [zero(v.dim)]
    coeffs += [c.scale(gamma_ratio(k * a, a)) for k, c in enumerate(v.coeffs)]
    return FracSeries.make(a, coeffs, v.dim)


def caputo_derivative(v: FracSeries) -> FracSeries:
    """Caputo derivative D^alpha: drops a_0, maps a_k to slot k-1."""
    a = v.alpha
    coeffs = [c.scale(1.0 / gamma_ratio((k - 1) * a, a)) for k, c in enumerate(v.coeffs) if k]
    return FracSeries.make(a, coeffs or [zero(v.dim)], v.dim)


def product(v: FracSeries, w: FracSeries) -> FracSeries:
    """Cauchy product, kept to full order N_v + N_w."""
    v._check(w)
    n = v.order + w.order
    coeffs = []
    for k in range(n + 1):
        acc = zero(v.dim)
        for i in range(max(0, k - w.order), min(k, v.order) + 1):
            acc = acc + v.coeffs[i] * w.coeffs[k - i]
        coeffs.append(acc)
    return FracSeries.make(v.alpha, coeffs, v.dim)


def spatial_derivative(v: FracSeries, var: int, order: int = 1) -> FracSeries:
    return FracSeries.make(v.alpha, [c.diff(var, order) for c in v.coeffs], v.dim)


def eval_series(v: FracSeries, point, t, up_to: int | None = None):
    """Partial sum sum_{k<=up_to} a_k(point) t^(k alpha).

    ``point`` may be an array of points (shape (..., dim)); ``t`` a scalar or
    an array broadcastable against the point batch.
    """
    n = v.order if up_to is None else min(up_to, v.order)
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("series evaluation needs t >= 0")
    # start from a correctly shaped zero even when every coefficient vanishes
    total = v.coeffs[0].eval(point) * t**0.0
    for k in range(1, n + 1):
        c = v.coeffs[k]
        if c.is_zero:
            continue
        total = total + c.eval(point) * t ** (k * v.alpha)
    total = np.asarray(total, dtype=float)
    return float(total) if total.ndim == 0 else total


def to_image(v: FracSeries) -> TransformImage:
    """Natural-transform image of a spatially constant series.

    c t^beta has image c Gamma(beta+1) u^beta / s^(beta+1).
    """
    atoms = []
    for k, c in enumerate(v.coeffs):
        if not c.is_constant:
            raise ValueError("to_image needs spatially constant coefficients")
        value = c.constant_value()
        if value:
            beta = v.exponent(k)
            atoms.append((value * gamma(float(beta) + 1.0), beta))
    return TransformImage.from_atoms(atoms)


def mittag_leffler_series(alpha: float, lam: float, profile: SpatialExpr, n: int) -> FracSeries:
    """Truncation of profile(x) * E_alpha(lam t^alpha) at order n."""
    coeffs = [profile.scale(lam**k / gamma(k * alpha + 1.0)) for k in range(n + 1)]
    return FracSeries.make(alpha, coeffs, profile.dim)
