import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from fracseries.errors import DivergenceError, RepresentationError
from fracseries.natural_transform import (
    TABLE1,
    FractionalPowerSum,
    TimeSignal,
    TransformImage,
    default_su_grid,
    nt_caputo_image,
    nt_derivative_image,
    nt_forward_numeric,
    nt_invert,
    nt_of_power,
    power_growth,
)
from fracseries.series_algebra import FracSeries, frac_integral, to_image
from fracseries.spatial_expr import const
from fracseries.special_functions import gamma

SU = [(1.0, 1.0), (2.0, 1.0), (1.0, 0.5), (3.0, 2.0), (2.5, 4.0)]

SIGNALS = {
    "1": TimeSignal(lambda t: np.ones_like(t), (1.0, 10.0)),
    "t": TimeSignal(lambda t: t, power_growth(1.0)),
    "sin": TimeSignal(np.sin, (1.0, 1e3)),
    "exp0.3": TimeSignal(lambda t: np.exp(0.3 * t), (1.01, 1 / 0.3)),
}


def _quad(g, upper):
    return integrate.quad(g, 0.0, upper, epsabs=1e-13, epsrel=1e-12, limit=1000)[0]


def laplace(f, p):
    """Adaptive QUADPACK quadrature, independent of the library's panel rules.

    The range stops where the damped growth bound has fallen by e^-60.
    """
    upper = 60.0 / (p - 1.0 / f.tau)
    return _quad(lambda t: math.exp(-p * t) * float(f(np.array(t))), upper)


def sumudu(f, w):
    upper = 60.0 / (1.0 - w / f.tau)
    return _quad(lambda t: math.exp(-t) * float(f(np.array(w * t))), upper)


def test_power_images():
    assert nt_of_power(0).atoms == ((1.0, Fraction(0)),)
    assert nt_of_power(1).atoms == ((1.0, Fraction(1)),)
    img = nt_of_power(0.5)
    sig = TimeSignal(lambda t: t**0.5 / gamma(1.5), power_growth(0.5))
    for s, u in SU:
        assert img(s, u) == pytest.approx(u**0.5 / s**1.5, rel=1e-14)
        assert nt_forward_numeric(sig, s, u).value == pytest.approx(img(s, u), abs=1e-9)
    with pytest.raises(RepresentationError):
        nt_of_power(-0.5)


def test_forward_examples():
    assert nt_forward_numeric(lambda t: np.ones_like(t), 2.0, 1.0).value == pytest.approx(0.5, abs=1e-12)
    assert nt_forward_numeric(np.sin, 1.0, 1.0).value == pytest.approx(0.5, abs=1e-12)
    res = nt_forward_numeric(TimeSignal(np.exp, (1.0, 1.0)), 2.0, 1.0)
    assert res.value == pytest.approx(1.0, abs=1e-10)
    assert res.error <= 1e-8


def test_forward_divergence_and_domain():
    with pytest.raises(DivergenceError):
        nt_forward_numeric(TimeSignal(np.exp, (1.0, 1.0)), 1.0, 1.0)
    with pytest.raises(DivergenceError):
        nt_forward_numeric(np.sin, -1.0, 1.0)
    with pytest.raises(DivergenceError):
        nt_forward_numeric(np.sin, 1.0, 0.0)


def test_table_rows_default_grid():
    grid = default_su_grid()
    for row in TABLE1:
        for s, u in grid:
            assert nt_forward_numeric(row.signal, s, u).value == pytest.approx(
                row.closed_form(s, u), abs=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(list(SIGNALS)), st.sampled_from(list(SIGNALS)),
       st.floats(-2, 2), st.floats(-2, 2))
def test_linearity(name_f, name_g, a, b):
    f, g = SIGNALS[name_f], SIGNALS[name_g]
    combo = f.scale(a) + g.scale(b)
    for s, u in SU:
        lhs = nt_forward_numeric(combo, s, u).value
        rhs = a * nt_forward_numeric(f, s, u).value + b * nt_forward_numeric(g, s, u).value
        assert lhs == pytest.approx(rhs, abs=1e-7)


@pytest.mark.parametrize("row", TABLE1, ids=lambda r: r.name)
def test_laplace_and_sumudu_duality(row):
    for s, u in SU[:3]:
        nt = nt_forward_numeric(row.signal, s, u).value
        assert nt == pytest.approx(laplace(row.signal, s / u) / u, abs=1e-7)
        assert nt == pytest.approx(sumudu(row.signal, u / s) / s, abs=1e-7)


@pytest.mark.parametrize("row", TABLE1, ids=lambda r: r.name)
def test_u1_is_laplace_s1_is_sumudu(row):
    assert nt_forward_numeric(row.signal, 2.0, 1.0).value == pytest.approx(
        laplace(row.signal, 2.0), abs=1e-7)
    assert nt_forward_numeric(row.signal, 1.0, 0.5).value == pytest.approx(
        sumudu(row.signal, 0.5), abs=1e-7)


@pytest.mark.parametrize("beta", [0.5, 2.0, 3.0])
@pytest.mark.parametrize("name", list(SIGNALS))
def test_scaling(beta, name):
    f = SIGNALS[name]
    for s, u in [(2.0, 1.0), (3.0, 0.5)]:
        lhs = nt_forward_numeric(f.dilate(beta), s, u).value
        rhs = nt_forward_numeric(f, s / beta, u).value / beta
        assert lhs == pytest.approx(rhs, abs=1e-7)


SHORTCUT_CASES = [
    # (alpha, beta, scale): f = scale * t^beta, which must lie on the alpha lattice
    (0.3, 0, 1.0), (0.5, 0, 1.0), (0.8, 0, 1.0), (1.0, 0, 1.0),
    (0.5, 1, 1.0), (0.25, 1, 1.0), (1.0, 1, 1.0),
    (0.5, 0.5, 1.0 / gamma(1.5)), (0.25, 0.5, 1.0 / gamma(1.5)),
]


@pytest.mark.parametrize("alpha, beta, scale", SHORTCUT_CASES)
def test_integral_shortcut_numeric(alpha, beta, scale):
    f = FracSeries.from_terms(alpha, [(const(scale), beta)])
    integ = frac_integral(f)
    powers = [(integ[k].constant_value(), float(integ.exponent(k)))
              for k in range(integ.order + 1) if not integ[k].is_zero]
    sig = TimeSignal(lambda t: sum(c * t**b for c, b in powers), power_growth(2.0))
    expected = to_image(f).shift(alpha)
    for s, u in SU[:3]:
        assert nt_forward_numeric(sig, s, u).value == pytest.approx(expected(s, u), abs=1e-7)


def test_caputo_image_examples():
    assert nt_caputo_image(nt_of_power(0), 0.7, 1.0).is_zero
    img = nt_caputo_image(nt_of_power(1), 0.5, 0.0)
    assert img.atoms == ((1.0, Fraction(1, 2)),)
    assert nt_caputo_image(nt_of_power(1), 1.0, 0.0).atoms == ((1.0, Fraction(0)),)
    with pytest.raises(RepresentationError):
        nt_caputo_image(nt_of_power(0), 0.5, 0.0)


def test_derivative_rule_first_and_second_order():
    # v = 1 + 2t + 3t^2 : image atoms (1,0), (2,1), (6,2)
    V = TransformImage.from_atoms([(1.0, 0), (2.0, 1), (6.0, 2)])
    d1 = nt_derivative_image(V, 1, [1.0])  # v' = 2 + 6t
    assert d1.atoms == ((2.0, Fraction(0)), (6.0, Fraction(1)))
    d2 = nt_derivative_image(V, 2, [1.0, 2.0])  # v'' = 6
    assert d2.atoms == ((6.0, Fraction(0)),)
    with pytest.raises(ValueError):
        nt_derivative_image(V, 2, [1.0])


def test_invert_examples():
    assert nt_invert(nt_of_power(0))(np.array([0.0, 2.0])).tolist() == [1.0, 1.0]
    assert nt_invert(TransformImage(())).is_zero
    a = 0.5
    V = TransformImage.from_atoms([(1.0, 0), (-1.0, a)])
    inv = nt_invert(V)
    t = np.array([0.3, 1.0, 2.0])
    assert inv(t) == pytest.approx(1 - t**a / gamma(a + 1), rel=1e-14)
    for s, u in SU[:3]:
        assert nt_forward_numeric(inv.as_signal(), s, u).value == pytest.approx(V(s, u), abs=1e-8)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.floats(-5, 5).filter(lambda c: abs(c) > 1e-3),
                          st.fractions(min_value=0, max_value=6, max_denominator=8)),
                min_size=0, max_size=6, unique_by=lambda p: p[1]))
def test_round_trip(pairs):
    V = TransformImage.from_atoms(pairs)
    inv = nt_invert(V)
    assert isinstance(inv, FractionalPowerSum)
    assert inv.image() == V


def test_image_arithmetic():
    a = TransformImage.from_atoms([(1.0, 0), (2.0, Fraction(1, 2))])
    b = TransformImage.from_atoms([(-1.0, 0), (1.0, 1)])
    total = a + b
    assert total.betas == (Fraction(1, 2), Fraction(1))
    assert (a - a).is_zero
    assert a.scale(2.0)(1.0, 1.0) == pytest.approx(2 * a(1.0, 1.0))
    assert a.shift(0.5).betas == (Fraction(1, 2), Fraction(1))
    with pytest.raises(ValueError):
        TransformImage(((1.0, Fraction(1)), (1.0, Fraction(0))))
    with pytest.raises(ValueError):
        TransformImage(((0.0, Fraction(1)),))
