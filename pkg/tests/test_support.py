import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rosettefront import NotARosette, Rosette, SupportFunction, support_function
from rosettefront.support import quotient_derivatives

OVAL = support_function(31, [(2, 2, 0), (5, 0, 1)])
TWO = support_function(11, [(1, 0, 1), (3, -7, 0), (4, 0, -0.5)], m=2)

coef = st.floats(-3, 3, allow_nan=False)
terms = st.lists(st.tuples(st.integers(1, 6), coef, coef), min_size=1, max_size=4)


def test_constant_values_and_derivatives():
    one = SupportFunction.constant(1.0)
    assert one(0.7) == 1.0
    for order in range(1, 5):
        assert one(0.7, order) == 0.0


def test_oval_value_at_zero():
    assert OVAL(0.0) == pytest.approx(33.0, abs=1e-13)


def test_two_rosette_first_derivative_at_pi():
    # 1/2 cos(pi/2) + 21/2 sin(3 pi/2) - cos(2 pi)
    assert TWO(np.pi, 1) == pytest.approx(-11.5, abs=1e-12)
    h = 1e-5
    fd = (TWO(np.pi + h) - TWO(np.pi - h)) / (2 * h)
    assert abs(TWO(np.pi, 1) - fd) < 1e-8


def test_radius_of_curvature():
    assert np.allclose(SupportFunction.constant(2.5).radius_of_curvature(np.linspace(0, 6, 7)), 2.5)
    assert OVAL.radius_of_curvature(0.0) == pytest.approx(25.0, abs=1e-12)


def test_small_oval_positive_radius_on_dense_scan():
    sf = support_function(11, [(2, -0.5, 0), (3, 0, 1)])
    theta = np.linspace(0, 2 * np.pi, 10**6, endpoint=False)
    assert sf.radius_of_curvature(theta).min() > 0
    check = sf.is_rosette()
    assert check.ok and check.rho_min == pytest.approx(sf.radius_of_curvature(theta).min(), rel=1e-6)


def test_is_rosette_verdicts():
    unit = SupportFunction.constant(1.0).is_rosette()
    assert unit.ok and unit.rho_min == 1.0
    assert OVAL.is_rosette().ok
    bad = support_function(1, [(2, 10, 0)]).is_rosette()
    assert not bad.ok
    assert bad.rho_min == pytest.approx(-29.0)
    with pytest.raises(NotARosette):
        Rosette(support_function(1, [(2, 10, 0)]))


def test_period_follows_m():
    assert OVAL.period == pytest.approx(2 * np.pi)
    assert TWO.period == pytest.approx(4 * np.pi)


def test_quotient_derivatives_against_closed_form():
    x = np.linspace(0.1, 1.0, 5)
    num = [np.sin(x), np.cos(x), -np.sin(x)]
    den = [np.cos(x), -np.sin(x), -np.cos(x)]
    q = quotient_derivatives(num, den)
    assert np.allclose(q[0], np.tan(x))
    assert np.allclose(q[1], 1 / np.cos(x) ** 2)
    assert np.allclose(q[2], 2 * np.tan(x) / np.cos(x) ** 2)


@settings(max_examples=40, deadline=None)
@given(a0=st.floats(0, 5), terms=terms, theta=st.floats(0, 2 * np.pi), order=st.integers(0, 4))
def test_derivatives_match_finite_differences(a0, terms, theta, order):
    sf = support_function(a0, terms)
    h = 1e-4
    fd = (sf(theta + h, order) - sf(theta - h, order)) / (2 * h)
    scale = 1 + sum(abs(a) + abs(b) for _, a, b in terms) * 6 ** (order + 3)
    assert abs(sf(theta, order + 1) - fd) < 1e-6 * scale


@settings(max_examples=40, deadline=None)
@given(terms=terms, delta=st.floats(-7, 7), theta=st.floats(-7, 7))
def test_shift_is_translation(terms, delta, theta):
    sf = support_function(1.0, terms)
    assert sf.shifted(delta)(theta) == pytest.approx(sf(theta + delta), abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(t1=terms, t2=terms, c=coef, theta=st.floats(0, 7))
def test_linear_operations(t1, t2, c, theta):
    f, g = support_function(1.0, t1), support_function(-2.0, t2)
    assert (f + g)(theta) == pytest.approx(f(theta) + g(theta), abs=1e-9)
    assert (f - g)(theta) == pytest.approx(f(theta) - g(theta), abs=1e-9)
    assert (c * f)(theta) == pytest.approx(c * f(theta), abs=1e-9)


def test_to_dict_round_trip():
    d = TWO.to_dict()
    again = support_function(d["a0"], d["terms"], m=d["m"])
    theta = np.linspace(0, 4 * np.pi, 11)
    assert np.array_equal(again(theta), TWO(theta))
