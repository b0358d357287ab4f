"""Independent reference solver: L1 finite differences for 1-D problems

    Dt^a v = kappa * v_xx + r * v,    0 < a < 1,

with Dirichlet data on both ends.  The Caputo derivative at t_n is
approximated by

    Dt^a v(t_n) ~ 1/(Gamma(2-a) dt^a) * sum_{j=0}^{n-1} b_j (v^{n-j} - v^{n-j-1}),
    b_j = (j+1)^(1-a) - j^(1-a),

and the spatial operator is treated implicitly with second-order central
differences.  This module deliberately shares no code with the series
engine: it may import only ``special_functions`` and ``spatial_expr``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy import integrate
from scipy.linalg import solve_banded

from .errors import DomainMismatchError, FracSeriesError
from .special_functions import gamma
from .spatial_expr import SpatialExpr

__all__ = [
    "OracleGrid",
    "ErrorReport",
    "SingularSystemError",
    "l1_weights",
    "l1_solve",
    "compare",
    "caputo_quadrature",
    "write_grid_csv",
    "MAX_NX",
    "MAX_NT",
]

MAX_NX = 2048
MAX_NT = 8192


class SingularSystemError(FracSeriesError, ArithmeticError):
    """The implicit step matrix is singular or numerically unusable."""


@dataclass(frozen=True)
class OracleGrid:
    x: np.ndarray
    t: np.ndarray
    values: np.ndarray  # shape (len(t), len(x))
    alpha: float

    @property
    def n_x(self) -> int:
        return len(self.x)

    @property
    def n_t(self) -> int:
        return len(self.t) - 1


def l1_weights(n: int, alpha: float) -> np.ndarray:
    """b_0 .. b_{n-1}."""
    j = np.arange(n, dtype=float)
    return (j + 1.0) ** (1.0 - alpha) - j ** (1.0 - alpha)


def _profile(ic) -> Callable[[np.ndarray], np.ndarray]:
    if isinstance(ic, SpatialExpr):
        if ic.dim != 1:
            raise ValueError("the L1 oracle is one-dimensional")
        return lambda x: np.asarray(ic.eval(np.asarray(x, dtype=float)), dtype=float)
    return ic


def l1_solve(
    alpha: float,
    diffusivity: float,
    ic,
    domain: tuple[float, float],
    n_x: int,
    n_t: int,
    T: float,
    boundary: Callable[[float, float], float] | None = None,
    reaction: float = 0.0,
) -> OracleGrid:
    """March the implicit L1 scheme from t = 0 to T.

    ``ic`` is a 1-D :class:`SpatialExpr` or a vectorised callable.
    ``boundary(x, t)`` supplies Dirichlet values at the two end nodes; when
    omitted the initial end values are held fixed.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"L1 oracle needs 0 < alpha < 1, got {alpha}")
    if not 3 <= n_x <= MAX_NX:
        raise ValueError(f"n_x must be in [3, {MAX_NX}], got {n_x}")
    if not 1 <= n_t <= MAX_NT:
        raise ValueError(f"n_t must be in [1, {MAX_NT}], got {n_t}")
    if not T > 0.0:
        raise ValueError("T must be positive")
    x0, x1 = map(float, domain)
    x = np.linspace(x0, x1, n_x)
    t = np.linspace(0.0, T, n_t + 1)
    h = x[1] - x[0]
    dt = T / n_t
    b = l1_weights(n_t, alpha)
    mu = dt**alpha * gamma(2.0 - alpha)

    f0 = _profile(ic)
    V = np.empty((n_t + 1, n_x))
    V[0] = f0(x)
    if boundary is None:
        left, right = V[0, 0], V[0, -1]
        boundary = lambda xb, tb: left if xb == x0 else right  # noqa: E731

    m = n_x - 2
    r = mu * diffusivity / h**2
    ab = np.zeros((3, m))
    ab[0, 1:] = -r
    ab[1, :] = 1.0 + 2.0 * r - mu * reaction
    ab[2, :-1] = -r
    if np.any(ab[1] == 0.0) or not np.all(np.isfinite(ab)):
        raise SingularSystemError("step matrix has a zero or non-finite diagonal")

    D = np.empty((n_t, n_x))  # D[k] = V[k+1] - V[k]
    for n in range(1, n_t + 1):
        hist = V[n - 1].copy()
        if n > 1:
            # sum_{j=1}^{n-1} b_j D[n-1-j]
            hist -= b[1:n] @ D[n - 2::-1]
        lo = boundary(x0, t[n])
        hi = boundary(x1, t[n])
        rhs = hist[1:-1].copy()
        rhs[0] += r * lo
        rhs[-1] += r * hi
        try:
            inner = solve_banded((1, 1), ab, rhs)
        except np.linalg.LinAlgError as exc:
            raise SingularSystemError(str(exc)) from exc
        if not np.all(np.isfinite(inner)):
            raise SingularSystemError(f"non-finite solution at step {n}")
        V[n, 0] = lo
        V[n, -1] = hi
        V[n, 1:-1] = inner
        D[n - 1] = V[n] - V[n - 1]
    return OracleGrid(x, t, V, float(alpha))


class ErrorReport(NamedTuple):
    max_abs: float
    rms: float
    per_level: np.ndarray  # max |err| at each t > 0
    series: np.ndarray  # values on the grid, shape (n_t, n_x) for t > 0
    abs_err: np.ndarray


def compare(series, grid: OracleGrid, up_to: int | None = None) -> ErrorReport:
    """Pointwise comparison of a 1-D series solution with an oracle grid (t > 0).

    ``series`` is anything with ``alpha``, ``dim`` and
    ``evaluate(points, t, up_to)``, such as a FracSeries.
    """
    if getattr(series, "dim", 1) != 1:
        raise DomainMismatchError("oracle grids are one-dimensional")
    if abs(series.alpha - grid.alpha) > 1e-15:
        raise DomainMismatchError(f"alpha mismatch: series {series.alpha}, grid {grid.alpha}")
    tt = grid.t[1:, None]
    xx = grid.x[None, :]
    vals = np.asarray(series.evaluate(np.broadcast_to(xx, (len(tt), grid.n_x)), tt, up_to))
    err = np.abs(vals - grid.values[1:])
    return ErrorReport(
        float(err.max()),
        float(np.sqrt(np.mean(err**2))),
        err.max(axis=1),
        vals,
        err,
    )


def caputo_quadrature(dv: Callable[[float], float], alpha: float, t: float) -> float:
    """Caputo derivative from its definition, given the first derivative ``dv``.

    (1/Gamma(1-a)) * int_0^t (t-s)^(-a) v'(s) ds, with the endpoint
    singularity handled by QUADPACK's algebraic weight.  ``alpha == 1``
    returns ``dv(t)``.
    """
    if alpha == 1.0:
        return float(dv(t))
    if t == 0.0:
        return 0.0
    val, _ = integrate.quad(dv, 0.0, t, weight="alg", wvar=(0.0, -alpha),
                            epsabs=1e-13, epsrel=1e-12, limit=200)
    return val / gamma(1.0 - alpha)


def write_grid_csv(grid: OracleGrid, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["t", "x", "value"])
    for i, tv in enumerate(grid.t):
        for j, xv in enumerate(grid.x):
            w.writerow([repr(float(tv)), repr(float(xv)), repr(float(grid.values[i, j]))])
