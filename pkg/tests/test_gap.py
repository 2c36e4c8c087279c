import math
from types import SimpleNamespace

import mpmath
import numpy as np
import pytest
import sympy as sp

from ctunnel.action import complex_action
from ctunnel.errors import AliasingError, ContractViolation
from ctunnel.gap import (GroundstateData, asymptotic_constant_A, direct_gap, fit_exponential_rate,
                         gap_prediction, gap_report, left_transport_integral,
                         one_well_groundstate_data, rotation_analysis, wronskian_at_zero,
                         wronskian_constant, wronskian_gap)
from ctunnel.potential import default_seal

SQ = math.sqrt


@pytest.fixture(scope="module")
def report_01(quartic_spec):
    return gap_report(quartic_spec, 0.0, 0.1)


def test_transport_integral_symbolic(quartic_spec):
    s = sp.symbols("s")
    sqrtV = 1 - s ** 2
    integrand = sp.simplify((sp.diff(sqrtV, s) - 2) / sqrtV)
    I = sp.integrate(integrand, (s, -1, 0))
    assert sp.simplify(I + 2 * sp.log(2)) == 0
    assert left_transport_integral(quartic_spec) == pytest.approx(float(I), rel=1e-12)


def test_constant_closed_forms(quartic_spec):
    # exponent 2: 4 sqrt(V(0)/pi) sqrt(a) e^{4 log 2} = 64 sqrt(2/pi)
    closed = sp.nsimplify(4 * sp.sqrt(1 / sp.pi) * sp.sqrt(2) * 16)
    assert asymptotic_constant_A(quartic_spec, 0.0, exponent=2.0) == pytest.approx(float(closed), rel=1e-12)
    assert abs(asymptotic_constant_A(quartic_spec, 0.0, exponent=2.0)) == pytest.approx(51.0646, rel=1e-5)
    assert asymptotic_constant_A(quartic_spec, 0.0) == pytest.approx(16 * SQ(2 / math.pi), rel=1e-12)


def test_constant_figure_against_mpmath(figure_spec):
    mpmath.mp.dps = 30
    a = mpmath.sqrt(mpmath.mpf(32) / 3 / 2)
    sqrtV = lambda s: 2 * (1 - s ** 2) / mpmath.sqrt(2 + s ** 4)
    f = lambda s: (mpmath.diff(sqrtV, s) - a) / sqrtV(s)
    I = mpmath.quad(f, [-1, -0.5, 0])
    ref = 4 * mpmath.sqrt(2 / mpmath.pi) * mpmath.sqrt(a) * mpmath.exp(-I)
    mpmath.mp.dps = 15
    assert left_transport_integral(figure_spec) == pytest.approx(float(I), rel=1e-9)
    assert asymptotic_constant_A(figure_spec, 0.0).real == pytest.approx(float(ref), rel=1e-9)


@pytest.mark.parametrize("alpha", [0.3, -1.1, 2.5])
def test_constant_phase(quartic_spec, alpha):
    assert np.angle(asymptotic_constant_A(quartic_spec, alpha)) == pytest.approx(0.75 * alpha)


def test_prediction_value_extended_precision(quartic_spec):
    mpmath.mp.dps = 40
    ref = 64 * mpmath.sqrt(2 / mpmath.pi) * mpmath.sqrt(mpmath.mpf("0.1")) * mpmath.exp(-mpmath.mpf(40) / 3)
    mpmath.mp.dps = 15
    got = gap_prediction(quartic_spec, 0.0, 0.1, exponent=2.0)
    assert got.real == pytest.approx(float(ref), rel=1e-10)
    assert abs(got) == pytest.approx(2.61e-5, rel=5e-3)


def test_prediction_alpha_dependence(quartic_spec):
    S, h = 4 / 3, 0.1
    for alpha in (0.5, 1.5, -2.0):
        p, p0 = gap_prediction(quartic_spec, alpha, h), gap_prediction(quartic_spec, 0.0, h)
        assert abs(p) / abs(p0) == pytest.approx(math.exp(S * (1 - math.cos(alpha / 2)) / h), rel=1e-9)
        expected = 0.75 * alpha - S * math.sin(alpha / 2) / h
        assert math.remainder(np.angle(p) - expected, 2 * math.pi) == pytest.approx(0.0, abs=1e-9)
    with pytest.raises(ContractViolation):
        gap_prediction(quartic_spec, 0.0, -0.1)


def test_wronskian_assembly():
    d = GroundstateData(psi0=0.3 + 0.1j, dpsi0=-2.0 + 0.5j, selfpair=1.0, mu=0.2, method="riccati",
                        overlap=1.0, n_points=1000)
    assert wronskian_at_zero(d, 0.1) == pytest.approx(2j * 0.1 * (0.3 + 0.1j) * (-2.0 + 0.5j))


def test_wronskian_constant_closed_form(quartic_spec):
    assert wronskian_constant(quartic_spec, 0.0, exponent=2.0) == pytest.approx(-2j * SQ(2 / math.pi) * 16)


def test_wronskian_asymptotics(quartic_spec, sealed_quartic):
    h = 0.02
    for alpha in (0.0, math.pi / 2):
        d = one_well_groundstate_data(sealed_quartic, alpha, h)
        w0 = wronskian_at_zero(d, h) * SQ(h) * np.exp(complex_action(quartic_spec, alpha) / h)
        assert abs(w0 / wronskian_constant(quartic_spec, alpha) - 1) < 0.05
        target = np.exp(-0.25j * alpha) * SQ(math.cos(alpha / 2))
        assert abs(d.selfpair / target - 1) < 0.05


def test_riccati_and_grid_paths_agree(sealed_quartic):
    a = one_well_groundstate_data(sealed_quartic, 0.7, 0.08, method="riccati")
    b = one_well_groundstate_data(sealed_quartic, 0.7, 0.08, method="grid")
    assert a.psi0 * a.dpsi0 == pytest.approx(b.psi0 * b.dpsi0, rel=1e-6)


def test_overlap_window(report_01):
    r = report_01
    assert r.gap_wronskian.real > 0 and abs(r.gap_wronskian.imag) < 1e-12 * abs(r.gap_wronskian)
    assert abs(r.gap_wronskian / r.gap_direct - 1) < 0.05
    assert abs(r.gap_wronskian ** 2 / r.gap_direct ** 2 - 1) < 1e-3
    for v in (r.ratio_direct, r.ratio_wronskian, abs(r.gap_direct) / abs(r.gap_wronskian)):
        assert 0.8 <= v <= 1.25
    assert r.flags == ()


def test_deep_tunneling_window(quartic_spec):
    r = gap_report(quartic_spec, 0.0, 0.04)
    assert "under_resolved" in r.flags
    assert 0.85 <= r.ratio_wronskian <= 1.15


def test_large_h_report_well_formed(quartic_spec):
    r = gap_report(quartic_spec, 0.0, 0.5)
    assert np.isfinite(r.gap_wronskian) and np.isfinite(r.ratio_wronskian)
    assert set(r.ratios) == {"direct", "wronskian"}


def test_selfadjoint_gap_real_positive(quartic_spec):
    g = wronskian_gap(quartic_spec, 0.0, 0.12)
    d = direct_gap(quartic_spec, 0.0, 0.12)
    assert g.real > 0 and abs(g.imag) < 1e-10 * abs(g)
    assert d.gap.real > 0 and abs(d.gap.imag) <= d.floor


def test_rotated_gap_larger(quartic_spec, report_01):
    g = wronskian_gap(quartic_spec, math.pi / 2, 0.1)
    assert abs(g) > abs(report_01.gap_wronskian)


def test_duet_mean(quartic_spec):
    for alpha, h in ((0.0, 0.1), (math.pi / 3, 0.1), (math.pi / 3, 0.08)):
        d = direct_gap(quartic_spec, alpha, h)
        mean = 0.5 * (d.mu1 + d.mu2)
        assert abs(mean / (2 * h * np.exp(0.5j * alpha)) - 1) <= 0.5 * h


def test_rotation_zero_alpha(quartic_spec):
    reps = [gap_report(quartic_spec, 0.0, 1 / k, direct=False) for k in (5, 6, 7, 8, 9)]
    fit = rotation_analysis(reps)
    assert abs(fit.c1) < 1e-9
    assert fit.expected == 0.0


def test_rotation_aliasing_guard():
    # Delta(1/h) = 4 at alpha = pi/2 advances the phase by 4 * 0.943 > pi
    S = 4 / 3 * np.exp(1j * math.pi / 4)
    reps = [SimpleNamespace(h=1 / k, alpha=math.pi / 2, S_alpha=S, gap_wronskian=1.0 + 0j)
            for k in (5, 9, 13, 17, 21)]
    with pytest.raises(AliasingError):
        rotation_analysis(reps)


def test_rotation_contracts():
    S = 4 / 3 * np.exp(1j * math.pi / 4)
    few = [SimpleNamespace(h=1 / k, alpha=math.pi / 2, S_alpha=S, gap_wronskian=1.0 + 0j) for k in (5, 6)]
    with pytest.raises(ContractViolation):
        rotation_analysis(few)
    mixed = [SimpleNamespace(h=1 / k, alpha=0.1 * k, S_alpha=S, gap_wronskian=1.0 + 0j) for k in range(5, 10)]
    with pytest.raises(ContractViolation):
        rotation_analysis(mixed)


def test_rotation_fit_on_synthetic_phase():
    S = 4 / 3 * np.exp(1j * math.pi / 4)
    reps = [SimpleNamespace(h=1 / k, alpha=math.pi / 2, S_alpha=S,
                            gap_wronskian=np.exp(1j * (0.3 - S.imag * k)), gap_direct=-np.exp(1j * (0.3 - S.imag * k)))
            for k in range(5, 26)]
    for source in ("wronskian", "direct"):
        fit = rotation_analysis(reps, source=source)
        assert fit.c1 == pytest.approx(-S.imag, rel=1e-10)
        assert abs(fit.deviation) < 1e-10


def test_fit_exponential_rate_synthetic():
    hs = np.array([0.15, 0.12, 0.1, 0.08, 0.06])
    gaps = 12.0 * np.sqrt(hs) * np.exp(-1.25 / hs)
    fit = fit_exponential_rate(hs, gaps)
    assert fit.rate == pytest.approx(-1.25, rel=1e-10)
    assert math.exp(fit.intercept) == pytest.approx(12.0, rel=1e-9)
    raw = fit_exponential_rate(hs, gaps, prefactor_power=0.0)
    assert raw.rate != pytest.approx(-1.25, rel=1e-3)


def test_default_seal_used(quartic_spec):
    a = wronskian_gap(quartic_spec, 0.2, 0.1)
    b = wronskian_gap(default_seal(quartic_spec), 0.2, 0.1)
    assert a == b
