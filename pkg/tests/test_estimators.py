import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from ctunnel.estimators import SpectrumEstimator, TunnelingGap, WKBQuasimode
from ctunnel.gap import gap_prediction, wronskian_gap
from ctunnel.wkb import wkb_quasimode


def test_spectrum_estimator(quartic_spec):
    est = SpectrumEstimator(alpha=0.0, h=0.1, n_points=600).fit(quartic_spec)
    assert [len(c) for c in est.clusters_] == [2, 2]
    assert est.eigenvalues_[0] == pytest.approx(0.2, rel=0.05)
    assert clone(est).get_params() == est.get_params()


def test_wkb_quasimode_transformer(sealed_quartic):
    tr = WKBQuasimode(n=1, J=2, alpha=0.4, h=0.1)
    with pytest.raises(NotFittedError):
        tr.transform(np.zeros(3))
    x = np.linspace(-1.5, 0.3, 11)
    out = tr.fit(sealed_quartic).transform(x)
    ref = wkb_quasimode(sealed_quartic, 0.4, 0.1, 1, 2, grid=x).quasimode
    np.testing.assert_allclose(out, ref)
    assert tr.mu_ == pytest.approx(tr.mu_coeffs_[0] * 0.1 + tr.mu_coeffs_[1] * 0.01)


def test_tunneling_gap(quartic_spec):
    hs = [0.12, 0.1]
    w = TunnelingGap(alpha=0.3).fit(quartic_spec).predict(hs)
    np.testing.assert_allclose(w, [wronskian_gap(quartic_spec, 0.3, h) for h in hs])
    p = TunnelingGap(alpha=0.3, method="asymptotic").fit(quartic_spec).predict(0.1)
    assert p[0] == gap_prediction(quartic_spec, 0.3, 0.1)
    with pytest.raises(ValueError):
        TunnelingGap(method="magic").fit(quartic_spec)
    with pytest.raises(NotFittedError):
        TunnelingGap().predict([0.1])
