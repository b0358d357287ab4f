"""Command-line front end.

Subcommands::

    fracseries solve --problem burgers.frac --alpha 0.5 --terms 10 --out sol.csv
    fracseries residual --problem diffusion3d.frac --terms 15 --tol 1e-6
    fracseries compare --problem diffusion1d.frac --terms 12 --out cmp.csv
    fracseries transform-check
    fracseries ml-eval --alpha 0.5 1 --out ml.csv

Exit codes: 0 success, 2 configuration/parse error, 3 tolerance breach.
The environment variable FRACSERIES_SEED is reserved and currently unused.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import math
import sys
from contextlib import contextmanager
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .errors import FracSeriesError, ProblemFileError
from .natural_transform import default_su_grid, table_check
from .nthpm import ProblemSpec, iterate, load_problem, residual
from .nthpm.solver import DEFAULT_TERMS
from .oracle import compare, l1_solve
from .series_algebra import eval_series
from .spatial_expr import VARIABLES, parse_spatial
from .special_functions import check_order, mittag_leffler

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BREACH = 3


class ConfigError(FracSeriesError, ValueError):
    pass


def _real(text: str) -> float:
    """Float or constant expression such as ``pi/2``."""
    try:
        e = parse_spatial(text)
    except FracSeriesError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    if not e.is_constant:
        raise argparse.ArgumentTypeError(f"{text!r} is not a constant")
    return e.constant_value()


def _fmt(x) -> str:
    return repr(float(x))


@dataclass(frozen=True)
class RunConfig:
    problem: str | None
    alpha: float | None
    terms: int
    x_range: tuple[float, float]
    x_count: int
    t_range: tuple[float, float]
    t_count: int
    out: str | None

    def validate(self) -> "RunConfig":
        if self.terms < 1:
            raise ConfigError("--terms must be >= 1")
        if self.x_count < 2 or self.t_count < 2:
            raise ConfigError("grid counts must be >= 2")
        if self.alpha is not None:
            check_order(self.alpha)
        if self.t_range[0] < 0:
            raise ConfigError("t range must be nonnegative")
        return self


def _resolve_problem(name: str) -> Path:
    p = Path(name)
    if p.exists():
        return p
    fixtures = resources.files("fracseries") / "problems"
    for candidate in (name, f"{name}.frac"):
        f = fixtures / candidate
        if f.is_file():
            return Path(str(f))
    raise ProblemFileError("file not found", name)


def _load(cfg) -> ProblemSpec:
    return load_problem(_resolve_problem(cfg.problem), cfg.alpha)


@contextmanager
def _output(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _spatial_grid(spec: ProblemSpec, cfg: RunConfig) -> np.ndarray:
    axis = np.linspace(cfg.x_range[0], cfg.x_range[1], cfg.x_count)
    pts = list(itertools.product(axis, repeat=spec.dim))
    return np.asarray(pts, dtype=float).reshape(-1, spec.dim)


def _run_config(args) -> RunConfig:
    return RunConfig(
        problem=args.problem,
        alpha=args.alpha,
        terms=args.terms,
        x_range=tuple(args.x_range),
        x_count=args.nx,
        t_range=tuple(args.t_range),
        t_count=args.nt,
        out=getattr(args, "out", None),
    ).validate()


def _summary(spec: ProblemSpec, sol, path: str) -> None:
    print(f"problem {path}  alpha={spec.alpha!r}  terms={sol.diagnostics.terms}  dim={spec.dim}")
    for c in spec.components:
        print(f"  {spec.equations[c].render()}")
        print(f"  {c}(x, 0) = {spec.ics[c]}")
        cf = sol.diagnostics.closed_forms[c]
        if cf is None:
            print(f"  {c}: no closed form detected")
        else:
            print(f"  {c}: closed form {cf.profile} * E_a({cf.lam:.12g} * t^a)"
                  f"  (lambda={cf.lam:.12g}, phi={cf.profile})")
        print("    k  coefficient of t^(k a)")
        for k, a in enumerate(sol.series[c].coeffs):
            print(f"  {k:3d}  {a}")


def cmd_solve(args) -> int:
    cfg = _run_config(args)
    spec = _load(cfg)
    sol = iterate(spec, cfg.terms)
    _summary(spec, sol, cfg.problem)
    if cfg.out:
        pts = _spatial_grid(spec, cfg)
        ts = np.linspace(cfg.t_range[0], cfg.t_range[1], cfg.t_count)
        with _output(cfg.out) as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["component", *VARIABLES[: spec.dim], "t", "value", "residual"])
            for c in spec.components:
                for tv in ts:
                    vals = np.atleast_1d(sol.evaluate(c, pts, tv))
                    res = np.atleast_1d(residual(spec, sol, pts, tv)[c])
                    for p, v, r in zip(pts, vals, res):
                        w.writerow([c, *map(_fmt, p), _fmt(tv), _fmt(v), _fmt(r)])
    return EXIT_OK


def cmd_residual(args) -> int:
    cfg = _run_config(args)
    spec = _load(cfg)
    sol = iterate(spec, cfg.terms)
    up_to = args.up_to if args.up_to is not None else cfg.terms
    pts = _spatial_grid(spec, cfg)
    ts = np.linspace(cfg.t_range[0], cfg.t_range[1], cfg.t_count)
    worst = {c: 0.0 for c in spec.components}
    for tv in ts:
        for c, r in residual(spec, sol, pts, tv, up_to).items():
            worst[c] = max(worst[c], float(np.max(r)))
    status = EXIT_OK
    for c, r in worst.items():
        flag = ""
        if args.tol is not None:
            flag = "  ok" if r <= args.tol else "  BREACH"
            if r > args.tol:
                status = EXIT_BREACH
        print(f"{c}: max residual {r:.6e} (N={up_to}){flag}")
    return status


def cmd_compare(args) -> int:
    cfg = _run_config(args)
    spec = _load(cfg)
    if spec.dim != 1 or len(spec.components) != 1:
        raise ConfigError("compare needs a single-component 1-D problem")
    (c,) = spec.components
    eq = spec.equations[c]
    if eq.monomials or spec.sources:
        raise ConfigError("compare supports only linear problems without sources")
    kappa, reaction = 0.0, 0.0
    for lt in eq.linear:
        if lt.component != c or lt.deriv not in ("", "xx"):
            raise ConfigError(f"compare cannot discretise the term {lt}")
        if lt.deriv == "xx":
            kappa += lt.coef
        else:
            reaction += lt.coef
    if not spec.alpha < 1.0:
        raise ConfigError("the L1 oracle needs alpha < 1")
    sol = iterate(spec, cfg.terms)
    series = sol.series[c]
    cf = sol.diagnostics.closed_forms[c]
    if cf is not None:
        def boundary(x, t):
            return cf.profile.eval(x) * mittag_leffler(spec.alpha, cf.lam * t**spec.alpha)
    else:
        def boundary(x, t):
            return eval_series(series, x, t)
    grid = l1_solve(spec.alpha, kappa, spec.ics[c], cfg.x_range, cfg.x_count,
                    args.steps, args.T, boundary=boundary, reaction=reaction)
    rep = compare(series, grid)
    if cfg.out:
        with _output(cfg.out) as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["x", "t", "series", "oracle", "abs_err"])
            for i, tv in enumerate(grid.t[1:]):
                for j, xv in enumerate(grid.x):
                    w.writerow([_fmt(xv), _fmt(tv), _fmt(rep.series[i, j]),
                                _fmt(grid.values[i + 1, j]), _fmt(rep.abs_err[i, j])])
    print(f"{c}: max abs {rep.max_abs:.6e}  rms {rep.rms:.6e}  "
          f"(N={cfg.terms}, n_x={grid.n_x}, n_t={grid.n_t}, T={args.T})")
    if args.tol is not None and rep.max_abs > args.tol:
        print(f"tolerance {args.tol} breached", file=sys.stderr)
        return EXIT_BREACH
    return EXIT_OK


def cmd_transform_check(args) -> int:
    rows = table_check(default_su_grid())
    status = EXIT_OK
    by_name: dict[str, float] = {}
    for name, s, u, num, exact, err, _ in rows:
        by_name[name] = max(by_name.get(name, 0.0), err)
    for name, err in by_name.items():
        ok = err <= args.tol
        print(f"{'PASS' if ok else 'FAIL'}  {name:<12s} max |numeric - closed form| = {err:.3e}")
        if not ok:
            status = EXIT_BREACH
    if args.out:
        with _output(args.out) as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["row", "s", "u", "numeric", "closed_form", "abs_err", "quad_err"])
            for name, s, u, num, exact, err, qerr in rows:
                w.writerow([name, _fmt(s), _fmt(u), _fmt(num), _fmt(exact), _fmt(err), _fmt(qerr)])
    return status


def cmd_ml_eval(args) -> int:
    for a in args.alpha:
        check_order(a, solver=False)
    ts = np.linspace(args.t_range[0], args.t_range[1], args.nt)
    if ts[0] < 0:
        raise ConfigError("t range must be nonnegative")
    with _output(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["alpha", "t", "z", "value"])
        for a in args.alpha:
            for tv in ts:
                z = args.lam * tv**a
                w.writerow([_fmt(a), _fmt(tv), _fmt(z), _fmt(mittag_leffler(a, z))])
    return EXIT_OK


def _add_grid(p, t_default=(0.0, 1.0)):
    p.add_argument("--problem", required=True, help="problem file (or shipped fixture name)")
    p.add_argument("--alpha", type=_real, help="fractional order, overrides the file")
    p.add_argument("--terms", type=int, default=DEFAULT_TERMS, help="series order N")
    p.add_argument("--x-range", type=_real, nargs=2, default=(0.0, math.pi),
                   metavar=("X0", "X1"), help="spatial range on every axis")
    p.add_argument("--nx", type=int, default=11, help="points per spatial axis")
    p.add_argument("--t-range", type=_real, nargs=2, default=t_default, metavar=("T0", "T1"))
    p.add_argument("--nt", type=int, default=11, help="number of time samples")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracseries",
        description="Fractional power-series solutions of time-fractional PDEs.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="compute the series solution and tabulate it")
    _add_grid(p)
    p.add_argument("--out", help="CSV output (component, x[, y, z], t, value, residual)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("residual", help="substitute the truncated series back into the PDE")
    _add_grid(p, t_default=(0.0, 0.5))
    p.add_argument("--up-to", type=int, help="truncation used for the residual (default N)")
    p.add_argument("--tol", type=float, help="exit 3 if the max residual exceeds this")
    p.set_defaults(func=cmd_residual)

    p = sub.add_parser("compare", help="compare a 1-D linear problem with the L1 oracle")
    _add_grid(p)
    p.set_defaults(terms=12, nx=201)
    p.add_argument("--steps", type=int, default=2000, help="L1 time steps")
    p.add_argument("--T", type=float, default=0.5, help="final time")
    p.add_argument("--tol", type=float, help="exit 3 if max abs error exceeds this")
    p.add_argument("--out", help="CSV output (x, t, series, oracle, abs_err)")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("transform-check", help="verify the transform table numerically")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--out", help="CSV with every (row, s, u) sample")
    p.set_defaults(func=cmd_transform_check)

    p = sub.add_parser("ml-eval", help="tabulate E_a(lam t^a)")
    p.add_argument("--alpha", type=_real, nargs="+", default=[0.25, 0.5, 0.75, 1.0])
    p.add_argument("--lam", type=_real, default=-1.0)
    p.add_argument("--t-range", type=_real, nargs=2, default=(0.0, 3.0), metavar=("T0", "T1"))
    p.add_argument("--nt", type=int, default=31)
    p.add_argument("--out", help="CSV output (default stdout)")
    p.set_defaults(func=cmd_ml_eval)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ProblemFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (FracSeriesError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc.filename}: {exc.strerror}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
