"""End-to-end acceptance checks, one group per criterion.

Run with ``pytest tests/test_acceptance.py -v``; the terminal summary
prints one PASS/FAIL line per criterion.
"""

from __future__ import annotations

import math
import random
import time
from importlib import resources

import numpy as np
import pytest

from fracseries import cli
from fracseries.natural_transform import (
    TimeSignal,
    default_su_grid,
    nt_caputo_image,
    nt_forward_numeric,
    nt_of_power,
    table_check,
)
from fracseries.nthpm import iterate, load_problem, residual, residual_series
from fracseries.nthpm.grammar import parse_equation
from fracseries.nthpm.solver import detect_closed_form, he_polynomial, partial
from fracseries.oracle import caputo_quadrature, compare, l1_solve
from fracseries.series_algebra import (
    FracSeries,
    caputo_derivative,
    eval_series,
    frac_integral,
    mittag_leffler_series,
    to_image,
)
from fracseries.spatial_expr import (
    max_sample_diff,
    parse_spatial,
    sample_points,
    spatial_basis,
)
from fracseries.special_functions import gamma, mittag_leffler

FIXTURES = resources.files("fracseries") / "problems"


def fixture(name, alpha=None):
    return load_problem(str(FIXTURES / name), alpha)


def erfc_series(x: float) -> float:
    """1 - erf(x) from the Maclaurin series of erf, summed with fsum."""
    terms = []
    n, fact = 0, 1.0
    while True:
        t = (-1) ** n * x ** (2 * n + 1) / (fact * (2 * n + 1))
        terms.append(t)
        if abs(t) < 1e-20:
            break
        n += 1
        fact *= n
    return 1.0 - 2.0 / math.sqrt(math.pi) * math.fsum(terms)


# 1 ---------------------------------------------------------------------------

@pytest.mark.criterion(1, "transform table within 1e-6 at 25 (s,u) points, < 5 s")
def test_transform_table():
    start = time.perf_counter()
    grid = default_su_grid()
    rows = table_check(grid)
    elapsed = time.perf_counter() - start
    assert len(grid) == 25
    assert all(0.5 <= s / u <= 5.0 for s, u in grid)
    worst = max(r[5] for r in rows)
    assert worst <= 1e-6, worst
    assert elapsed < 5.0, elapsed


# 2 ---------------------------------------------------------------------------

CAPUTO_SIGNALS = {
    "1": (0.0, lambda t: np.zeros_like(t)),
    "t": (1.0, lambda t: np.ones_like(t)),
    "t^2/2": (2.0, lambda t: t),
}


@pytest.mark.criterion(2, "Caputo image rule vs quadrature + numeric transform, 1e-5")
@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.9, 1.0])
@pytest.mark.parametrize("name", list(CAPUTO_SIGNALS))
def test_caputo_image_rule(alpha, name):
    beta, dv = CAPUTO_SIGNALS[name]
    v0 = 1.0 if name == "1" else 0.0
    image = nt_caputo_image(nt_of_power(beta), alpha, v0)

    def caputo_values(t):
        t = np.asarray(t, dtype=float)
        return np.array([caputo_quadrature(lambda s: float(dv(np.array(s))), alpha, ti)
                         for ti in t.ravel()]).reshape(t.shape)

    signal = TimeSignal(caputo_values, (1e3, 10.0), f"Dt^a[{name}]")
    for s, u in [(1.0, 1.0), (2.0, 0.8), (1.5, 2.0)]:
        numeric = nt_forward_numeric(signal, s, u).value
        assert abs(image(s, u) - numeric) <= 1e-5, (s, u, image(s, u), numeric)


# 3 ---------------------------------------------------------------------------

@pytest.mark.criterion(3, "Mittag-Leffler: E_1 = exp on [-5,5] to 1e-10, E_1/2(-1) = e erfc(1)")
def test_mittag_leffler_exp():
    z = np.linspace(-5.0, 5.0, 101)
    err = max(abs(mittag_leffler(1.0, zi) - math.exp(zi)) for zi in z)
    assert err <= 1e-10, err


@pytest.mark.criterion(3, "Mittag-Leffler: E_1 = exp on [-5,5] to 1e-10, E_1/2(-1) = e erfc(1)")
def test_mittag_leffler_erfc():
    assert abs(erfc_series(1.0) - math.erfc(1.0)) < 1e-15
    assert abs(mittag_leffler(0.5, -1.0) - math.e * erfc_series(1.0)) <= 1e-8


# 4 ---------------------------------------------------------------------------

@pytest.mark.criterion(4, "coupled Burgers reproduction, closed form (-1, sin x), < 10 s")
def test_burgers_reproduction():
    start = time.perf_counter()
    sinx = parse_spatial("sin(x)")
    for alpha in (0.5, 0.75, 1.0):
        spec = fixture("burgers.frac", alpha)
        n_terms = 20 if alpha == 1.0 else 6
        sol = iterate(spec, n_terms)
        for c in ("v", "w"):
            s = sol.series[c]
            for k in range(7):
                expected = sinx.scale((-1) ** k / gamma(k * alpha + 1.0))
                assert max_sample_diff(s[k], expected) <= 1e-9, (alpha, c, k)
            cf = detect_closed_form(s)
            assert cf is not None
            assert abs(cf.lam + 1.0) <= 1e-9
            assert max_sample_diff(cf.profile, sinx) <= 1e-12
        if alpha == 1.0:
            x = np.linspace(0.0, math.pi, 101)
            for t in np.linspace(0.0, 1.0, 51):
                exact = np.exp(-t) * np.sin(x)
                for c in ("v", "w"):
                    assert np.max(np.abs(sol.evaluate(c, x, t) - exact)) <= 1e-8
    assert time.perf_counter() - start < 10.0


# 5 ---------------------------------------------------------------------------

def _printed_he(iterates):
    """The listed H_0..H_2 for v v_x, w w_x and v_x w_x, written out by hand."""
    v = iterates["v"]
    w = iterates["w"]
    vx = [partial(s, "x") for s in v]
    wx = [partial(s, "x") for s in w]
    return {
        "v*v_x": [v[0] * vx[0], v[0] * vx[1] + v[1] * vx[0],
                  v[0] * vx[2] + v[1] * vx[1] + v[2] * vx[0]],
        "w*w_x": [w[0] * wx[0], w[0] * wx[1] + w[1] * wx[0],
                  w[0] * wx[2] + w[1] * wx[1] + w[2] * wx[0]],
        "v_x*w_x": [vx[0] * wx[0], vx[0] * wx[1] + vx[1] * wx[0],
                    vx[2] * wx[0] + vx[1] * wx[1] + vx[0] * wx[2]],
    }


def _brute_force_he(factors, iterates, n, x):
    """n-th p-coefficient of prod_j D_j(sum_k p^k u_k), by polynomial multiplication in p."""
    total = np.ones((1, len(x)))
    for name, deriv in factors:
        poly = np.array([partial(iterates[name][k], deriv).eval(x) for k in range(n + 1)])
        out = np.zeros((total.shape[0] + poly.shape[0] - 1, len(x)))
        for i, row in enumerate(total):
            out[i : i + len(poly)] += row * poly
        total = out
    return total[n]


@pytest.mark.criterion(5, "He polynomial listings and brute-force oracle for n <= 4")
def test_he_polynomial_listings():
    spec = fixture("burgers_printed.frac", 0.5)
    sol = iterate(spec, 5)
    iterates = {c: list(sol.iterates[c]) for c in ("v", "w")}
    printed = _printed_he(iterates)
    monos = {
        "v*v_x": parse_equation("Dt^a v = v*v_x").monomials[0],
        "w*w_x": parse_equation("Dt^a w = w*w_x").monomials[0],
        "v_x*w_x": parse_equation("Dt^a v = v_x*w_x").monomials[0],
    }
    for key, mono in monos.items():
        for n in range(3):
            generated = he_polynomial(mono, iterates, n)
            expected = printed[key][n]
            assert generated.order == expected.order
            for k in range(expected.order + 1):
                assert max_sample_diff(generated[k], expected[k]) <= 1e-10, (key, n, k)


@pytest.mark.criterion(5, "He polynomial listings and brute-force oracle for n <= 4")
def test_he_polynomial_brute_force():
    rng = random.Random(5)
    basis = spatial_basis(1)
    iterates = {c: [basis[rng.randrange(len(basis))].scale(rng.uniform(-1, 1))
                    for _ in range(5)] for c in ("v", "w")}
    x = sample_points(1)[:, 0]
    for text in ("v*v_x", "w*w_x", "v_x*w_x"):
        mono = parse_equation(f"Dt^a v = {text}").monomials[0]
        for n in range(5):
            got = he_polynomial(mono, iterates, n).eval(x)
            ref = _brute_force_he(mono.factors, iterates, n, x)
            assert np.max(np.abs(got - ref)) <= 1e-10 * max(1.0, np.max(np.abs(ref)))


# 6 ---------------------------------------------------------------------------

@pytest.mark.criterion(6, "3-D diffusion: E_a(-3 t^a) closed form, small residual, printed form fails")
@pytest.mark.parametrize("alpha", [0.5, 1.0])
def test_diffusion3d_coefficients(alpha):
    spec = fixture("diffusion3d.frac", alpha)
    sol = iterate(spec, 10)
    phi = parse_spatial("exp(x+y+z)")
    s = sol.series["v"]
    for k in range(11):
        expected = phi.scale((-3.0) ** k / gamma(k * alpha + 1.0))
        assert max_sample_diff(s[k], expected) <= 1e-9, k
    cf = sol.diagnostics.closed_forms["v"]
    assert cf is not None and abs(cf.lam + 3.0) <= 1e-9


@pytest.mark.criterion(6, "3-D diffusion: E_a(-3 t^a) closed form, small residual, printed form fails")
def test_diffusion3d_residuals():
    spec = fixture("diffusion3d.frac", 1.0)
    sol = iterate(spec, 15)
    rng = np.random.default_rng(6)
    pts = rng.uniform(0.0, 1.0, size=(64, 3))
    ts = np.linspace(0.0, 0.5, 11)
    worst = max(float(np.max(residual(spec, sol, pts, t)["v"])) for t in ts)
    assert worst <= 1e-6, worst

    # e^(x+y+z-t) as a (long) power series in t, substituted into the same equation
    printed = mittag_leffler_series(1.0, -1.0, parse_spatial("exp(x+y+z)"), 40)
    res = residual_series(spec, {"v": printed})["v"]
    smallest = min(float(np.min(np.abs(eval_series(res.truncate(38), pts, t)))) for t in ts)
    assert smallest >= 1.0, smallest


# 7 ---------------------------------------------------------------------------

def _diffusion_oracle(n_t):
    spec = fixture("diffusion1d.frac", 0.5)
    series = iterate(spec, 12).series["v"]

    def boundary(x, t):
        return math.sin(x) * mittag_leffler(0.5, -(t**0.5))

    grid = l1_solve(0.5, 1.0, spec.ics["v"], (0.0, math.pi), 201, n_t, 0.5, boundary=boundary)
    return compare(series, grid)


@pytest.mark.criterion(7, "L1 oracle agreement 5e-3 and time order 2-alpha +- 0.3")
def test_oracle_agreement():
    assert _diffusion_oracle(2000).max_abs <= 5e-3


@pytest.mark.criterion(7, "L1 oracle agreement 5e-3 and time order 2-alpha +- 0.3")
def test_oracle_time_order():
    errors = [_diffusion_oracle(n).max_abs for n in (2000, 4000, 8000)]
    orders = [math.log2(errors[i] / errors[i + 1]) for i in range(2)]
    for p in orders:
        assert abs(p - 1.5) <= 0.3, (errors, orders)


# 8 ---------------------------------------------------------------------------

def _random_series(rng, alpha):
    basis = spatial_basis(1)
    n = rng.randint(0, 8)
    coeffs = []
    for _ in range(n + 1):
        a = basis[rng.randrange(len(basis))].scale(rng.uniform(-2.0, 2.0))
        if rng.random() < 0.5:
            a = a + basis[rng.randrange(len(basis))].scale(rng.uniform(-2.0, 2.0))
        coeffs.append(a)
    return FracSeries.make(alpha, coeffs, 1)


def _pointwise_gap(a, b):
    x = sample_points(1)[:, 0]
    gap = 0.0
    for t in (0.0, 0.25, 0.5, 1.0):
        va = np.asarray(eval_series(a, x, t))
        vb = np.asarray(eval_series(b, x, t))
        gap = max(gap, float(np.max(np.abs(va - vb) / np.maximum(1.0, np.abs(vb)))))
    return gap


@pytest.mark.criterion(8, "inverse pair on 50 random series, 1e-12 pointwise")
def test_inverse_pair():
    rng = random.Random(8)
    for _ in range(50):
        alpha = rng.choice([0.25, 0.3, 0.5, 0.75, 0.9, 1.0])
        v = _random_series(rng, alpha)
        assert _pointwise_gap(caputo_derivative(frac_integral(v)), v) <= 1e-12
        a0 = FracSeries.constant(alpha, v[0])
        assert _pointwise_gap(frac_integral(caputo_derivative(v)), v - a0) <= 1e-12


# 9 ---------------------------------------------------------------------------

@pytest.mark.criterion(9, "image of I^a v equals (u/s)^a times image of v")
@pytest.mark.parametrize("alpha", [0.25, 1 / 3, 0.5, 0.7, 1.0])
def test_transform_consistency(alpha):
    rng = random.Random(9)
    for _ in range(20):
        coeffs = [parse_spatial(repr(rng.uniform(-3, 3))) for _ in range(rng.randint(1, 7))]
        v = FracSeries.make(alpha, coeffs, 1)
        lhs = to_image(frac_integral(v))
        rhs = to_image(v).shift(alpha)
        assert lhs.betas == rhs.betas
        for (c1, _), (c2, _) in zip(lhs.atoms, rhs.atoms):
            assert c1 == pytest.approx(c2, rel=1e-13)
        for s, u in default_su_grid()[:5]:
            assert lhs(s, u) == pytest.approx(rhs(s, u), rel=1e-12)


# 10 --------------------------------------------------------------------------

@pytest.mark.criterion(10, "solve CSV is byte-identical across runs; transform-check exits 0")
@pytest.mark.parametrize("name", ["burgers.frac", "burgers_printed.frac",
                                  "diffusion1d.frac", "diffusion3d.frac"])
def test_cli_determinism(name, tmp_path, capsys):
    outputs = []
    for run in range(2):
        out = tmp_path / f"run{run}.csv"
        nx = "4" if name == "diffusion3d.frac" else "11"
        rc = cli.main(["solve", "--problem", name, "--terms", "6", "--nx", nx,
                       "--nt", "5", "--out", str(out)])
        assert rc == 0
        outputs.append(out.read_bytes())
    capsys.readouterr()
    assert outputs[0] == outputs[1]
    assert len(outputs[0]) > 0


@pytest.mark.criterion(10, "solve CSV is byte-identical across runs; transform-check exits 0")
def test_cli_transform_check(capsys):
    assert cli.main(["transform-check"]) == 0
    assert "FAIL" not in capsys.readouterr().out
