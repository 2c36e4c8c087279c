"""scikit-learn style wrappers around the functional core.

``fit`` takes a potential (a :class:`~ctunnel.potential.PotentialSpec` or a
sealed potential) in place of a data matrix; fitted state lives in
attributes with a trailing underscore.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .gap import direct_gap, gap_prediction, wronskian_gap
from .potential import seal
from .specsolve import assemble, low_lying_spectrum
from .wkb import wkb_quasimode

__all__ = ["SpectrumEstimator", "WKBQuasimode", "TunnelingGap"]


class SpectrumEstimator(BaseEstimator):
    """Low-lying spectrum of -h^2 d^2 + e^{i alpha} V in the disk D(0, R h)."""

    def __init__(self, alpha=0.0, h=0.1, X=None, n_points=800, scheme="fd4", R=7.0):
        self.alpha = alpha
        self.h = h
        self.X = X
        self.n_points = n_points
        self.scheme = scheme
        self.R = R

    def fit(self, potential, y=None):
        op = assemble(potential, self.alpha, self.h, self.X, self.n_points, self.scheme)
        self.operator_ = op
        self.result_ = low_lying_spectrum(op, self.R)
        self.eigenvalues_ = self.result_.eigenvalues
        self.clusters_ = self.result_.clusters
        return self


class WKBQuasimode(TransformerMixin, BaseEstimator):
    """WKB quasimode of level ``n`` and order ``J`` for a sealed potential.

    ``transform(x)`` evaluates psi^wkb on the points ``x``.
    """

    def __init__(self, n=1, J=1, alpha=0.0, h=0.1):
        self.n = n
        self.J = J
        self.alpha = alpha
        self.h = h

    def fit(self, sealed, y=None):
        probe = wkb_quasimode(sealed, self.alpha, self.h, self.n, self.J,
                              grid=np.array([sealed.well]))
        self.sealed_ = sealed
        self.mu_coeffs_ = np.array(probe.mu_coeffs)
        self.mu_ = probe.mu_wkb
        return self

    def transform(self, x):
        check_is_fitted(self, "mu_coeffs_")
        x = np.asarray(x, dtype=float)
        exp = wkb_quasimode(self.sealed_, self.alpha, self.h, self.n, self.J, grid=x.ravel())
        return exp.quasimode.reshape(x.shape)


class TunnelingGap(BaseEstimator):
    """Tunneling gap of a double well as a function of h.

    ``method`` is ``"wronskian"`` (default), ``"direct"`` or ``"asymptotic"``;
    ``predict(hs)`` returns complex gaps.
    """

    def __init__(self, alpha=0.0, method="wronskian", seal_eta=None, seal_amplitude=None,
                 X=None, n_points=800):
        self.alpha = alpha
        self.method = method
        self.seal_eta = seal_eta
        self.seal_amplitude = seal_amplitude
        self.X = X
        self.n_points = n_points

    def fit(self, spec, y=None):
        if self.method not in ("wronskian", "direct", "asymptotic"):
            raise ValueError(f"unknown method {self.method!r}")
        self.spec_ = spec
        self.sealed_ = seal(spec, "right", self.seal_eta, self.seal_amplitude)
        return self

    def predict(self, hs):
        check_is_fitted(self, "spec_")
        hs = np.atleast_1d(np.asarray(hs, dtype=float))
        out = np.empty(hs.shape, dtype=complex)
        for i, h in enumerate(hs):
            if self.method == "wronskian":
                out[i] = wronskian_gap(self.sealed_, self.alpha, h)
            elif self.method == "direct":
                out[i] = direct_gap(self.spec_, self.alpha, h, self.X, self.n_points).gap
            else:
                out[i] = gap_prediction(self.spec_, self.alpha, h)
        return out
