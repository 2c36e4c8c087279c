"""The tunneling gap mu_2 - mu_1 by direct eigensolve, by the Wronskian of
one-well groundstates, and by the closed-form asymptotic law.

Conventions.  ``psi_l`` is the L^2-normalized groundstate of the right-sealed
operator, ``psi_r(x) = psi_l(-x)``.  With ``W = psi_l (hD psi_r) - psi_r (hD psi_l)``
one has ``W(0) = 2ih psi_l(0) psi_l'(0)`` and the gap is
``2 Delta = 2ih W(0) / <psi_r, conj psi_r>``, the denominator being the
bilinear pairing ``int psi_r^2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg as sla
from scipy.integrate import solve_ivp

from .action import check_alpha, complex_action
from .errors import AliasingError, ContractViolation, NormalizationError, NumericFailure
from .potential import default_seal, seal
from .specsolve import EPS, assemble, refine_eigenpair
from .wkb import wkb_eigenvalue, wkb_profile

__all__ = ["GapReport", "GroundstateData", "DirectGap", "RotationFit", "ExponentialFit",
           "asymptotic_constant_A", "wronskian_constant", "gap_prediction",
           "one_well_groundstate_data", "wronskian_gap", "direct_gap", "rotation_analysis",
           "gap_report", "fit_exponential_rate", "left_transport_integral"]

OVERLAP_THRESHOLD = 0.5
RESOLUTION_FACTOR = 50.0


def _wrap(angle: float) -> float:
    """Wrap to (-pi, pi]."""
    w = math.remainder(angle, 2 * math.pi)
    return math.pi if w == -math.pi else w


# ---------------------------------------------------------------------------
# closed-form constants
# ---------------------------------------------------------------------------

def left_transport_integral(spec) -> float:
    """int_{x_l}^0 ((sqrt V)' - a) / sqrt V.

    The removable singularity at x_l is handled by the WKB series patch:
    the integral equals -2 log a_{1,0}(0) for the leading transport amplitude.
    """
    prof = wkb_profile(default_seal(spec), 0.0, 1, 1)
    a0 = prof.evaluate(np.array([0.0]))["A"][0, 0]
    return float(-2.0 * math.log(a0.real))


def asymptotic_constant_A(spec, alpha: float, exponent: float = 1.0) -> complex:
    """Gap constant A in |mu_2 - mu_1| ~ |A| sqrt(h) e^{-S cos(alpha/2)/h}.

    A = 4 e^{3i alpha/4} sqrt(V(0)/pi) a^{1/2} exp(-exponent * I) with
    I = :func:`left_transport_integral`.  ``exponent=1`` is the value produced
    by the groundstate normalization (a_{1,0}(0)^2 = e^{-I}) and is what the
    direct and Wronskian gaps converge to; ``exponent=2`` gives the doubled
    exponential factor of the alternative closed form (64 sqrt(2/pi) for the
    quartic).
    """
    alpha = check_alpha(alpha)
    V0 = float(spec(0.0))
    I = left_transport_integral(spec)
    mag = 4.0 * math.sqrt(V0 / math.pi) * math.sqrt(spec.a) * math.exp(-exponent * I)
    return complex(mag * np.exp(0.75j * alpha))


def wronskian_constant(spec, alpha: float, exponent: float = 1.0) -> complex:
    """w_0 in W(0) ~ w_0 h^{-1/2} e^{-S(alpha)/h}."""
    alpha = check_alpha(alpha)
    V0 = float(spec(0.0))
    I = left_transport_integral(spec)
    mag = 2.0 * math.sqrt(V0) * math.sqrt(math.cos(alpha / 2) * spec.a / math.pi) \
        * math.exp(-exponent * I)
    return complex(-1j * np.exp(0.5j * alpha) * mag)


def gap_prediction(spec, alpha: float, h: float, exponent: float = 1.0) -> complex:
    """A sqrt(h) e^{-S(alpha)/h}."""
    if not h > 0:
        raise ContractViolation("h must be positive")
    A = asymptotic_constant_A(spec, alpha, exponent)
    S_alpha = complex_action(spec, alpha)
    return complex(A * math.sqrt(h) * np.exp(-S_alpha / h))


# ---------------------------------------------------------------------------
# one-well groundstate and the Wronskian route
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GroundstateData:
    psi0: complex
    dpsi0: complex
    selfpair: complex
    mu: complex
    method: str
    overlap: float
    n_points: int

    def __iter__(self):
        return iter((self.psi0, self.dpsi0, self.selfpair))


def wronskian_at_zero(data: GroundstateData, h: float) -> complex:
    """W(0) = 2ih psi_l(0) psi_l'(0)."""
    return complex(2j * h * data.psi0 * data.dpsi0)


def _default_points(h: float, X: float) -> int:
    # fd4 with dx ~ h/25 resolves the groundstate to well below 1e-8
    return int(max(1200, math.ceil(2 * X / (h / 25.0))))


def _lagrange(grid, values, x, npts=6):
    """Value and first derivative at x of the local interpolating polynomial."""
    i = int(np.searchsorted(grid, x))
    lo = max(0, min(i - npts // 2, len(grid) - npts))
    xs = grid[lo: lo + npts]
    ys = values[lo: lo + npts]
    scale = xs[1] - xs[0]
    t = (xs - x) / scale
    coef = np.polynomial.polynomial.polyfit(t, ys, npts - 1)
    return complex(coef[0]), complex(coef[1] / scale)


def _sealed_eigenpair(sealed, alpha, h, X, n_points):
    op = assemble(sealed, alpha, h, X, n_points, "fd4", dense=False)
    mus = wkb_eigenvalue(sealed, alpha, 1, 3)
    sigma = sum(m * h ** (k + 1) for k, m in enumerate(mus))
    mu, v = refine_eigenpair(op, sigma, iterations=3)
    mu, v = refine_eigenpair(op, mu, iterations=3, start=v, update_shift=True)
    v = v / op.l2norm(v)
    r = op.l2norm(op.matvec(v) - mu * v)
    if not r <= 1e-8 * op.norm:
        raise NumericFailure(f"sealed groundstate residual {r:.3e} too large")
    # phase: <psi, psi_wkb> real positive
    prof = wkb_profile(sealed, alpha, 1, 1)
    ev = prof.evaluate(op.grid)
    psi_wkb = np.exp(-prof.e * ev["Phi0"] / h) * ev["A"][0]
    ov = op.inner(v, psi_wkb) / op.l2norm(psi_wkb)
    if abs(ov) < OVERLAP_THRESHOLD:
        raise NormalizationError(f"overlap with the WKB quasimode is only {abs(ov):.3f}")
    v = v * (np.conj(ov) / abs(ov))
    return op, complex(mu), v, float(abs(ov))


def _sealed(spec, seal_eta, seal_amplitude):
    if hasattr(spec, "base"):
        return spec
    return seal(spec, "right", seal_eta, seal_amplitude)


def one_well_groundstate_data(sealed, alpha: float, h: float, method: str = "riccati",
                              X: Optional[float] = None, n_points: Optional[int] = None
                              ) -> GroundstateData:
    """psi_l(0), psi_l'(0) and int psi_l^2 for the normalized sealed groundstate.

    ``method="grid"`` interpolates the discrete eigenvector at 0.
    ``method="riccati"`` integrates ``h w' = e^{i alpha} V_l - mu - w^2`` for
    ``w = h psi'/psi`` from the right end down to the well together with
    ``log psi``, so the exponentially small value at 0 is reached through
    its logarithm; only ``psi_l(x_l)`` is taken from the grid.
    """
    alpha = check_alpha(alpha)
    if not h > 0:
        raise ContractViolation("h must be positive")
    if method not in ("riccati", "grid"):
        raise ContractViolation(f"unknown method {method!r}")
    X = 3.0 * sealed.extent if X is None else float(X)
    n_points = _default_points(h, X) if n_points is None else int(n_points)
    op, mu, v, ov = _sealed_eigenpair(sealed, alpha, h, X, n_points)
    selfpair = complex(op.bilinear(v, v))
    if method == "grid":
        psi0, dpsi0 = _lagrange(op.grid, v, 0.0)
    else:
        x_m = float(sealed.well)
        psi_m, _ = _lagrange(op.grid, v, x_m)
        ea = np.exp(1j * alpha)

        def rhs(x, y):
            w = y[0]
            V = float(sealed(np.array([x]))[0])
            return [(ea * V - mu - w * w) / h, w / h]

        x_s = float(op.grid[-1])
        w_s = -np.sqrt(ea * float(sealed(np.array([x_s]))[0]) - mu)
        sol = solve_ivp(rhs, (x_s, x_m), [complex(w_s), 0j], method="DOP853",
                        t_eval=[0.0, x_m], rtol=1e-11, atol=1e-12)
        if not sol.success:
            raise NumericFailure(f"Riccati integration failed: {sol.message}")
        w0 = sol.y[0, 0]
        logratio = sol.y[1, 0] - sol.y[1, 1]
        psi0 = complex(psi_m * np.exp(logratio))
        dpsi0 = complex(w0 * psi0 / h)
    return GroundstateData(psi0=psi0, dpsi0=dpsi0, selfpair=selfpair, mu=mu, method=method,
                           overlap=ov, n_points=op.n_points)


def wronskian_gap(spec, alpha: float, h: float, seal_eta: Optional[float] = None,
                  seal_amplitude: Optional[float] = None, method: str = "riccati",
                  X: Optional[float] = None, n_points: Optional[int] = None,
                  return_data: bool = False):
    """2 Delta(h) = 2ih W(0) / <psi_r, conj psi_r> from the sealed groundstate."""
    sealed = _sealed(spec, seal_eta, seal_amplitude)
    data = one_well_groundstate_data(sealed, alpha, h, method, X, n_points)
    W0 = wronskian_at_zero(data, h)
    gap = complex(2j * h * W0 / data.selfpair)
    return (gap, data) if return_data else gap


# ---------------------------------------------------------------------------
# direct route
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DirectGap:
    mu1: complex
    mu2: complex
    gap: complex
    floor: float
    under_resolved: bool
    clustered: bool


def direct_gap(spec, alpha: float, h: float, X: Optional[float] = None, n_points: int = 800,
               scheme: str = "fd4", operator=None, eigenvalues=None) -> DirectGap:
    """mu_2 - mu_1 for the two smallest-modulus double-well eigenvalues.

    The resolution floor is ``50 * eps * ||A|| * kappa`` with ``kappa`` the
    eigenvector condition number; gaps below it are flagged under-resolved.
    """
    alpha = check_alpha(alpha)
    op = assemble(spec, alpha, h, X, n_points, scheme) if operator is None else operator
    try:
        vals = sla.eigvals(op.matrix, check_finite=False) if eigenvalues is None \
            else np.asarray(eigenvalues)
    except (sla.LinAlgError, ValueError) as exc:
        raise NumericFailure(f"dense eigensolver failed: {exc}") from exc
    if not np.all(np.isfinite(vals)):
        raise NumericFailure("dense eigensolver returned non-finite eigenvalues")
    order = sorted(range(len(vals)), key=lambda i: (abs(vals[i]), np.angle(vals[i])))
    mu1, mu2 = complex(vals[order[0]]), complex(vals[order[1]])
    if op.banded is not None:
        _, v = refine_eigenpair(op, mu1, iterations=2)
    else:
        w, vr = sla.eig(op.matrix, check_finite=False)
        v = vr[:, order[0]]
    kappa = float(np.sum(np.abs(v) ** 2) / abs(np.dot(v, v)))
    floor = RESOLUTION_FACTOR * EPS * op.norm * kappa
    gap = mu2 - mu1
    clustered = abs(gap) < 0.3 * spec.a * h
    return DirectGap(mu1=mu1, mu2=mu2, gap=complex(gap), floor=float(floor),
                     under_resolved=bool(abs(gap) < floor), clustered=bool(clustered))


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GapReport:
    alpha: float
    h: float
    mu1: complex
    mu2: complex
    gap_direct: complex
    gap_wronskian: complex
    gap_asymptotic: complex
    A_const: complex
    S_alpha: complex
    ratios: dict
    arg_dev: float
    error_bars: dict
    flags: tuple = ()
    wronskian_data: Optional[GroundstateData] = field(default=None, repr=False)

    @property
    def ratio_direct(self) -> float:
        return self.ratios.get("direct", math.nan)

    @property
    def ratio_wronskian(self) -> float:
        return self.ratios.get("wronskian", math.nan)


def gap_report(spec, alpha: float, h: float, seal_eta: Optional[float] = None,
               seal_amplitude: Optional[float] = None, X: Optional[float] = None,
               n_points: int = 800, scheme: str = "fd4", direct: bool = True,
               agreement_tol: float = 0.1, operator=None, eigenvalues=None) -> GapReport:
    """Assemble direct, Wronskian and asymptotic gaps; disagreement is flagged.

    Error bars: the direct gap carries its resolution floor, the Wronskian gap
    the difference between its Riccati and grid evaluations.
    """
    alpha = check_alpha(alpha)
    flags = []
    nan = complex(math.nan, math.nan)
    mu1 = mu2 = gdir = gw = nan
    bars = {}
    data = None
    ok_direct = ok_w = False
    if direct:
        try:
            d = direct_gap(spec, alpha, h, X, n_points, scheme, operator, eigenvalues)
            mu1, mu2, gdir = d.mu1, d.mu2, d.gap
            bars["direct"] = d.floor
            ok_direct = not d.under_resolved
            if d.under_resolved:
                flags.append("under_resolved")
            if not d.clustered:
                flags.append("no_duet")
        except NumericFailure:
            flags.append("direct_failed")
    try:
        gw, data = wronskian_gap(spec, alpha, h, seal_eta, seal_amplitude, "riccati",
                                 return_data=True)
        sealed = _sealed(spec, seal_eta, seal_amplitude)
        ggrid = wronskian_gap(sealed, alpha, h, method="grid", n_points=data.n_points)
        bars["wronskian"] = abs(gw - ggrid)
        ok_w = True
    except NumericFailure:
        flags.append("wronskian_failed")
    if not (ok_direct or ok_w or (direct and "direct_failed" not in flags)):
        raise NumericFailure(f"all gap methods failed at alpha={alpha}, h={h}")
    A = asymptotic_constant_A(spec, alpha)
    S_alpha = complex_action(spec, alpha)
    gasym = complex(A * math.sqrt(h) * np.exp(-S_alpha / h))
    ratios = {"direct": abs(gdir) / abs(gasym) if direct and "direct_failed" not in flags else math.nan,
              "wronskian": abs(gw) / abs(gasym) if ok_w else math.nan}
    arg_dev = _wrap(np.angle(gdir) - np.angle(gasym)) if np.isfinite(gdir) else math.nan
    if ok_direct and ok_w and abs(gw ** 2 / gdir ** 2 - 1) > agreement_tol:
        flags.append("methods_disagree")
    return GapReport(alpha=alpha, h=float(h), mu1=mu1, mu2=mu2, gap_direct=gdir,
                     gap_wronskian=gw, gap_asymptotic=gasym, A_const=A, S_alpha=S_alpha,
                     ratios=ratios, arg_dev=float(arg_dev), error_bars=bars, flags=tuple(flags),
                     wronskian_data=data)


# ---------------------------------------------------------------------------
# fits over h
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExponentialFit:
    rate: float
    intercept: float
    prefactor_power: float
    stderr: float


def fit_exponential_rate(hs, gaps, prefactor_power: float = 0.5) -> ExponentialFit:
    """Least-squares fit  log(|gap| / h^p) = c + rate / h.

    ``prefactor_power=0.5`` strips the sqrt(h) of the asymptotic law, so
    ``rate`` estimates -S cos(alpha/2) without the bias a pure exponential fit
    picks up from the algebraic prefactor; ``prefactor_power=0`` is the raw
    slope of log|gap| against 1/h.
    """
    hs = np.asarray(hs, dtype=float)
    g = np.abs(np.asarray(gaps))
    if hs.size < 2:
        raise ContractViolation("need at least two points")
    xs = 1.0 / hs
    ys = np.log(g) - prefactor_power * np.log(hs)
    coef, cov = np.polyfit(xs, ys, 1, cov=True) if hs.size > 2 else (np.polyfit(xs, ys, 1), None)
    err = float(math.sqrt(cov[0, 0])) if cov is not None else math.nan
    return ExponentialFit(rate=float(coef[0]), intercept=float(coef[1]),
                          prefactor_power=float(prefactor_power), stderr=err)


@dataclass(frozen=True)
class RotationFit:
    c0: float
    c1: float
    c1_stderr: float
    expected: float
    deviation: float
    unwrapped: np.ndarray
    inv_h: np.ndarray


def rotation_analysis(reports, source: str = "wronskian") -> RotationFit:
    """Fit the unwrapped arg(gap) as c0 + c1/h along an h-grid.

    ``source="wronskian"`` uses the Wronskian gaps, whose labeling is tied to
    the sealed groundstate and therefore consistent along the grid.
    ``source="direct"`` uses arg(gap_direct^2)/2 so the modulus-based labeling
    of the direct eigenvalues cannot flip the sign between points.
    """
    reports = sorted(reports, key=lambda r: 1.0 / r.h)
    if len(reports) < 5:
        raise ContractViolation("rotation analysis needs at least 5 reports")
    alphas = {r.alpha for r in reports}
    if len(alphas) != 1:
        raise ContractViolation("reports must share one alpha")
    S_sin = abs(reports[0].S_alpha.imag)
    inv_h = np.array([1.0 / r.h for r in reports])
    step = np.max(np.diff(inv_h))
    if step * S_sin > math.pi:
        raise AliasingError(f"phase advances {step * S_sin:.3f} > pi between grid points")
    if source == "wronskian":
        gaps = np.array([r.gap_wronskian for r in reports])
        args = np.unwrap(np.angle(gaps))
    elif source == "direct":
        gaps = np.array([r.gap_direct for r in reports])
        args = 0.5 * np.unwrap(np.angle(gaps ** 2))
    else:
        raise ContractViolation(f"unknown source {source!r}")
    if not np.all(np.isfinite(args)):
        raise NumericFailure("missing gap values along the rotation grid")
    coef, cov = np.polyfit(inv_h, args, 1, cov=True) if len(inv_h) > 2 else (np.polyfit(inv_h, args, 1), np.zeros((2, 2)))
    expected = -reports[0].S_alpha.imag
    return RotationFit(c0=float(coef[1]), c1=float(coef[0]), c1_stderr=float(math.sqrt(abs(cov[0, 0]))),
                       expected=float(expected), deviation=float(coef[0] - expected),
                       unwrapped=args, inv_h=inv_h)
