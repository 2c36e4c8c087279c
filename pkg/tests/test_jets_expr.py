import math

import numpy as np
import pytest

from ctunnel import jets
from ctunnel.errors import ConfigurationError
from ctunnel.expr import parse_expression
from ctunnel.jets import Jet, Laurent


def test_jet_derivatives_of_polynomial():
    x = Jet.variable(0.5, 4)
    p = (1 - x * x) ** 2
    assert p.value == pytest.approx(0.5625)
    assert p.derivative(1) == pytest.approx(-4 * 0.5 * (1 - 0.25))
    assert p.derivative(2) == pytest.approx(-4 + 12 * 0.25)
    assert p.derivative(3) == pytest.approx(24 * 0.5)
    assert p.derivative(4) == pytest.approx(24.0)


def test_jet_transcendentals_match_closed_forms():
    x0 = 0.3
    x = Jet.variable(x0, 3)
    e = jets.exp(2 * x)
    assert e.derivative(3) == pytest.approx(8 * math.exp(2 * x0))
    lg = jets.log(1 + x)
    assert lg.derivative(2) == pytest.approx(-1 / (1 + x0) ** 2)
    sq = jets.sqrt(1 + x)
    assert sq.derivative(2) == pytest.approx(-0.25 * (1 + x0) ** -1.5)


def test_jet_division_and_arrays():
    x = Jet.variable(np.array([0.5, 1.5]), 2)
    r = 1 / (2 + x ** 4)
    D = 2 + np.array([0.5, 1.5]) ** 4
    np.testing.assert_allclose(r.value, 1 / D)
    np.testing.assert_allclose(r.derivative(1), -4 * np.array([0.5, 1.5]) ** 3 / D ** 2)


def test_jet_order_errors():
    with pytest.raises(ValueError):
        Jet.variable(0.0, 2).derivative(3)


def test_laurent_reciprocal_and_residue():
    y = Laurent([0, 1, 1], 0)  # y + y^2, known to power 2
    r = y.reciprocal()  # 1/y - 1 + ...
    assert r.val == -1
    assert r.coeff(-1) == pytest.approx(1)
    assert r.coeff(0) == pytest.approx(-1)
    assert r.residue() == pytest.approx(1)


def test_laurent_diff_regular_at_zero():
    s = Laurent([2.0, 3.0, 4.0], 0)
    d = s.diff()
    assert d(np.array([0.0]))[0] == pytest.approx(3.0)
    assert d(np.array([0.5]))[0] == pytest.approx(3.0 + 8.0 * 0.5)


def test_laurent_exp_matches_numpy():
    s = Laurent([0.0, 1.0] + [0.0] * 10, 0)
    e = s.exp()
    assert e(np.array([0.2]))[0] == pytest.approx(math.exp(0.2), rel=1e-9)


def test_parse_expression_quartic():
    f = parse_expression("(1 - x^2)^2")
    assert f(0.0) == 1.0
    assert f(np.array([1.0, 2.0])).tolist() == [0.0, 9.0]


def test_parse_expression_on_jets():
    f = parse_expression("4*(1-x^2)^2/(2+x^4)")
    j = f(Jet.variable(0.0, 2))
    assert j.value == pytest.approx(2.0)


@pytest.mark.parametrize("text", ["", "import os", "y + 1", "__import__('os')", "x.real", "1 +"])
def test_parse_expression_rejects(text):
    with pytest.raises(ConfigurationError):
        parse_expression(text)
