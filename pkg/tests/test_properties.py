import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from ctunnel.action import agmon_action, complex_action, plateau, truncated_actions
from ctunnel.gap import asymptotic_constant_A, gap_prediction
from ctunnel.jets import Jet
from ctunnel.potential import custom, eval_potential, figure, quadratic_model, quartic, seal
from ctunnel.quadrature import gk15
from ctunnel.sweep import fmt

QUARTIC, FIGURE = quartic(), figure()
alphas = st.floats(min_value=-3.1, max_value=3.1, allow_nan=False)
xs = st.floats(min_value=-6.0, max_value=6.0, allow_nan=False)
fast = settings(max_examples=40, deadline=None)


@fast
@given(x=xs)
def test_builtins_even(x):
    for spec in (QUARTIC, FIGURE):
        assert spec(x) == pytest.approx(spec(-x), rel=1e-15, abs=1e-15)


@fast
@given(x=xs, eta=st.floats(0.05, 0.95), amp=st.floats(0.1, 20.0))
def test_seal_leaves_left_side_unchanged(x, eta, amp):
    for spec in (QUARTIC, FIGURE):
        sl = seal(spec, "right", eta, amp)
        if x <= spec.x_right - eta:
            assert sl(x) == spec(x)
        else:
            assert sl(x) >= spec(x)


@fast
@given(scale=st.floats(0.2, 5.0))
def test_quadratic_model_matches_curvature(scale):
    spec = custom(f"{scale}*(1 - x^2)^2", -1.0)
    assert 2 * quadratic_model(spec).a ** 2 == pytest.approx(eval_potential(spec, spec.x_left, 2), rel=1e-12)


@fast
@given(pts=st.lists(st.floats(-2.5, 2.5), min_size=3, max_size=3))
def test_action_additivity(pts):
    a, b, c = sorted(pts)
    whole = agmon_action(QUARTIC, a, c)
    parts = agmon_action(QUARTIC, a, b) + agmon_action(QUARTIC, b, c)
    assert whole == pytest.approx(parts, rel=1e-9, abs=1e-13)


@fast
@given(alpha=alphas)
def test_complex_action_phase_relation(alpha):
    for spec in (QUARTIC, FIGURE):
        S0 = complex_action(spec, 0.0)
        Sa = complex_action(spec, alpha)
        assert Sa == np.exp(0.5j * alpha) * S0
        assert Sa.real == pytest.approx(math.cos(alpha / 2) * S0.real, rel=1e-12)


@fast
@given(alpha=alphas, g1=st.floats(0.0, 1.5), g2=st.floats(0.0, 1.5))
def test_side_actions_monotone_in_gamma(alpha, g1, g2):
    sl = seal(QUARTIC, "right", 0.4, 1.0)
    lo, hi = sorted((g1, g2))
    a, b = truncated_actions(sl, alpha, lo), truncated_actions(sl, alpha, hi)
    assert a.S_minus_gamma <= b.S_minus_gamma + 1e-14
    assert a.S_plus_gamma <= b.S_plus_gamma + 1e-14


@fast
@given(e1=st.floats(0.01, 0.95), e2=st.floats(0.01, 0.95))
def test_s_eta_nonincreasing(e1, e2):
    lo, hi = sorted((e1, e2))
    a = truncated_actions(seal(QUARTIC, "right", lo, 1.0), 0.3, 0.1).S_eta
    b = truncated_actions(seal(QUARTIC, "right", hi, 1.0), 0.3, 0.1).S_eta
    assert b <= a + 1e-14


@fast
@given(x=xs, A=st.floats(0.5, 5.0))
def test_plateau_bounds(x, A):
    v = plateau(x, A)
    assert 0.0 <= v <= 1.0
    assert v == plateau(-x, A)


@fast
@given(coeffs=st.lists(st.floats(-3, 3), min_size=1, max_size=6), x0=st.floats(-2, 2))
def test_jet_polynomial_derivatives(coeffs, x0):
    p = np.polynomial.Polynomial(coeffs)
    x = Jet.variable(x0, 3)
    j = sum((c * x ** k for k, c in enumerate(coeffs)), Jet.constant(0.0, 3))
    for k in range(4):
        assert j.derivative(k) == pytest.approx(p.deriv(k)(x0), rel=1e-10, abs=1e-10)


@fast
@given(coeffs=st.lists(st.floats(-3, 3), min_size=1, max_size=10), a=st.floats(-2, 0), b=st.floats(0, 2))
def test_gk15_exact_on_polynomials(coeffs, a, b):
    p = np.polynomial.Polynomial(coeffs)
    P = p.integ()
    val, _ = gk15(p, a, b)
    assert val == pytest.approx(P(b) - P(a), rel=1e-12, abs=1e-12)


@fast
@given(x=st.floats(allow_nan=False, allow_infinity=False, width=64))
def test_fmt_round_trips(x):
    s = fmt(x)
    assert float(s) == x
    assert fmt(float(s)) == s


@fast
@given(alpha=alphas)
def test_constant_phase_law(alpha):
    assert np.angle(asymptotic_constant_A(QUARTIC, alpha)) == pytest.approx(0.75 * alpha, abs=1e-12)


@fast
@given(a1=st.floats(0, 3.1), a2=st.floats(0, 3.1), h=st.floats(0.02, 0.2))
def test_prediction_grows_with_alpha(a1, a2, h):
    assume(abs(a1 - a2) > 1e-6)
    lo, hi = sorted((a1, a2))
    assert abs(gap_prediction(QUARTIC, hi, h)) >= abs(gap_prediction(QUARTIC, lo, h))
    assert abs(gap_prediction(QUARTIC, -hi, h)) == pytest.approx(abs(gap_prediction(QUARTIC, hi, h)))
