"""WKB quasimodes of the one-well operator -h^2 d^2 + e^{i alpha} V_l.

Notation.  ``x0`` is the open well, ``a = sqrt(V''(x0)/2)``, ``e = e^{i alpha/2}``,
``s(x) = sign(x - x0) sqrt(V_l(x))`` (smooth through ``x0``) and the phase is
``phi = e * Phi0`` with ``Phi0(x) = int_{x0}^x s``.  With
``psi = e^{-phi/h} a(x; h)`` the eigenvalue problem becomes

    h (2 phi' a' + phi'' a) - h^2 a'' = mu(h) a,

and matching powers of h gives the transport hierarchy for ``a_j`` and
``mu_j``.  Two independent routes are implemented:

* the *transport route* solves the hierarchy in truncated Laurent series at
  ``x0``: writing ``a_{k-1} = a_0 v`` turns each equation into
  ``v' = (F_k + mu_k a_0) / (2 phi' a_0)`` and ``mu_k`` is the unique value
  removing the residue at ``x0``;
* the *Riccati route* expands the log-derivative ``h psi'/psi = sum h^k y_k``,
  which obeys ``y_k = -(y_{k-1}' + mu_k + sum_{0<i<k} y_i y_{k-i}) / (2 y_0)``;
  again ``mu_k`` cancels the residue.

Away from ``x0`` the Riccati quantities are smooth and are evaluated
pointwise with Taylor jets, then integrated along the grid; inside a patch
``|x - x0| <= delta`` the Laurent series are used directly, so the removable
singularities never appear as 0/0 quotients.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import jets
from .action import check_alpha, cumulative_action
from .errors import ContractViolation, NumericFailure
from .jets import Jet, Laurent

__all__ = ["WkbExpansion", "phase", "transport_leading", "wkb_eigenvalue", "riccati_eigenvalue",
           "transport_series", "wkb_quasimode", "weighted_residual", "wkb_norms", "WkbNorms",
           "wkb_profile", "fd4_apply"]

DELTA_PATCH = 0.1
SERIES_ORDER = 40
MAX_PANEL = 0.02
_GL_X, _GL_W = np.polynomial.legendre.leggauss(10)


def _j_cap(pot, J):
    base = getattr(pot, "base", pot)
    custom = getattr(base, "kind", "") == "custom"
    cap = 4 if custom else 8
    if not 1 <= J <= cap:
        raise ContractViolation(f"WKB order J must lie in 1..{cap} for this potential, got {J}")


def _well_data(pot):
    if getattr(pot, "side", "right") != "right":
        raise ContractViolation("WKB objects are built for the left well; use reflection for the right one")
    return float(pot.well)


# ---------------------------------------------------------------------------
# Laurent-series machinery at the well bottom
# ---------------------------------------------------------------------------

def _series_s(pot, order):
    x0 = _well_data(pot)
    v = np.asarray(pot.jet(x0, order).c, dtype=float)
    W = Laurent(v[2:], 0)            # V / y^2
    sw = W.sqrt()
    a = float(sw.c[0].real)
    if not a > 0:
        raise NumericFailure("degenerate well: V''(x0) must be positive")
    return Laurent(sw.c, 1), a       # s = y sqrt(W)


def _zero_residue(L: Laurent) -> Laurent:
    if L.val <= -1 <= L.top:
        c = L.c.copy()
        c[-1 - L.val] = 0.0
        return Laurent(c, L.val)
    return L


def _clean_poles(L: Laurent, what: str, tol: float = 1e-8) -> Laurent:
    """Remove round-off sized negative powers from a series that must be regular."""
    if L.val >= 0:
        return L
    scale = max(float(np.max(np.abs(L.c))), 1e-300)
    neg = L.c[: -L.val]
    if np.max(np.abs(neg)) > tol * scale:
        raise NumericFailure(f"{what}: unexpected pole in a regular series")
    return Laurent(L.c[-L.val:], 0)


def _one(length):
    c = np.zeros(length, dtype=complex)
    c[0] = 1.0
    return Laurent(c, 0)


def transport_series(pot, alpha: float, n: int, J: int, kernel_shift: complex = 0.0,
                     order: int = SERIES_ORDER):
    """Solve the transport hierarchy in Laurent series at the well.

    Returns ``(mus, amplitudes)`` with ``mus = [mu_1..mu_J]`` and
    ``amplitudes = [a_0..a_{J-1}]`` as :class:`Laurent` series in x - x0.
    ``kernel_shift`` adds ``c * a_0`` to ``a_1`` before the recursion
    continues; the eigenvalue coefficients must not depend on it.
    """
    if n < 1:
        raise ContractViolation("level n must be >= 1")
    s, a = _series_s(pot, order)
    e = np.exp(0.5j * alpha)
    phip2 = s.scale(2 * e)                               # 2 phi'
    q = (s.diff().add_constant(-a)).normalized() / s.scale(2.0)
    I0 = q.integrate()
    a0 = I0.scale(-(2 * n - 1)).exp()
    for _ in range(n - 1):
        a0 = a0 * s.scale(1.0 / a)
    mu1 = (2 * n - 1) * e * a
    inv_phip2 = phip2.reciprocal()
    res_unit = inv_phip2.residue()                       # = 1 / (2 e a)
    inv_phip2_a0 = (phip2 * a0).reciprocal()
    mus = [complex(mu1)]
    amps = [a0]
    for k in range(2, J + 1):
        F = amps[k - 2].diff().diff()
        for j in range(2, k):
            F = F + amps[k - j].scale(mus[j - 1])
        G = F * inv_phip2_a0
        mu_k = -G.residue() / res_unit
        vprime = _zero_residue(G + inv_phip2.scale(mu_k))
        v = vprime.integrate()
        amp = a0 * v
        if n == 1 or amp.val >= 0:
            amp = _clean_poles(amp, f"a_{k - 1}")
        if k == 2 and kernel_shift:
            amp = amp + a0.scale(kernel_shift)
        mus.append(complex(mu_k))
        amps.append(amp)
    return mus, amps


def _riccati_series(pot, alpha, n, J, order=SERIES_ORDER):
    s, a = _series_s(pot, order)
    e = np.exp(0.5j * alpha)
    y0 = s.scale(-e)
    inv2y0 = y0.scale(2.0).reciprocal()
    res_unit = inv2y0.residue()
    mu1 = (2 * n - 1) * e * a
    ys = [y0, (y0.diff().add_constant(mu1) * inv2y0).scale(-1.0)]
    mus = [complex(mu1)]
    for k in range(2, J + 1):
        N = ys[k - 1].diff()
        for i in range(1, k):
            N = N + ys[i] * ys[k - i]
        mu_k = -(N * inv2y0).residue() / res_unit
        yk = _zero_residue((N.add_constant(mu_k) * inv2y0).scale(-1.0))
        mus.append(complex(mu_k))
        ys.append(yk)
    return s, a, mus, ys


def riccati_eigenvalue(pot, alpha: float, n: int, J: int):
    """mu_{n,1..J} from the Riccati (log-derivative) recursion; cross-check route."""
    check_alpha(alpha)
    _j_cap(pot, J)
    return _riccati_series(pot, alpha, n, J)[2]


def wkb_eigenvalue(pot, alpha: float, n: int, J: int):
    """Eigenvalue coefficients mu_{n,1..J} from the transport solvability conditions."""
    check_alpha(alpha)
    _j_cap(pot, J)
    if n < 1:
        raise ContractViolation("level n must be >= 1")
    return transport_series(pot, alpha, n, J)[0]


# ---------------------------------------------------------------------------
# global profiles
# ---------------------------------------------------------------------------

def _exp_poly(Z, dZ=None, d2Z=None):
    """Coefficients E_j of exp(sum_{k>=1} h^k Z_k), with optional derivatives.

    ``Z[k-1]`` holds Z_k.  Works for arrays and Laurent series alike.
    """
    J = len(Z) + 1
    one = _one(len(Z[0].c) + 2) if isinstance(Z[0], Laurent) and Z else 1.0
    E = [one]
    dE = [0.0] if dZ is not None else None
    d2E = [0.0] if d2Z is not None else None
    for j in range(1, J):
        acc = None
        dacc = 0.0
        d2acc = 0.0
        for k in range(1, j + 1):
            term = (Z[k - 1] * E[j - k]) * k
            acc = term if acc is None else acc + term
            if dZ is not None:
                dacc = dacc + k * (dZ[k - 1] * E[j - k] + Z[k - 1] * dE[j - k])
            if d2Z is not None:
                d2acc = d2acc + k * (d2Z[k - 1] * E[j - k] + 2 * dZ[k - 1] * dE[j - k]
                                     + Z[k - 1] * d2E[j - k])
        E.append(acc.scale(1.0 / j) if isinstance(acc, Laurent) else acc / j)
        if dZ is not None:
            dE.append(dacc / j)
        if d2Z is not None:
            d2E.append(d2acc / j)
    return E, dE, d2E


class _Profile:
    """Evaluator of phase and amplitudes at arbitrary points (internal)."""

    def __init__(self, pot, alpha, n, J, delta=DELTA_PATCH, order=SERIES_ORDER):
        self.pot, self.alpha, self.n, self.J = pot, float(alpha), int(n), int(J)
        self.x0 = _well_data(pot)
        self.e = np.exp(0.5j * alpha)
        s, a, mus, ys = _riccati_series(pot, alpha, n, J, order)
        self.s_ser, self.a, self.mus, self.y_ser = s, a, mus, ys
        self.Phi0_ser = s.integrate()
        q = (s.diff().add_constant(-a)).normalized() / s.scale(2.0)
        self.I0_ser = q.integrate()
        a0 = self.I0_ser.scale(-(2 * n - 1)).exp()
        for _ in range(n - 1):
            a0 = a0 * s.scale(1.0 / a)
        self.a0_ser = a0
        self.Y_ser = [ys[k].integrate() for k in range(2, J + 1)]        # Y_2..Y_J
        E, _, _ = _exp_poly(self.Y_ser) if J > 1 else ([_one(len(a0.c))], None, None)
        self.amp_ser = []
        for j, Ej in enumerate(E[:J]):
            amp = a0 * Ej if j else a0
            self.amp_ser.append(_clean_poles(amp, f"a_{j}") if amp.val < 0 else amp)
        self.delta = self._fit_delta(delta)

    def _fit_delta(self, delta):
        """Shrink the patch until the series tails are negligible."""
        series = [self.Phi0_ser, self.s_ser] + self.amp_ser
        while delta > 0.005:
            ok = True
            for L in series:
                powers = L.val + np.arange(len(L.c))
                terms = np.abs(L.c) * delta ** powers.astype(float)
                if terms[-4:].max() > 1e-14 * max(terms.max(), 1e-300):
                    ok = False
                    break
            if ok:
                return delta
            delta *= 0.7
        raise NumericFailure("series patch: Taylor data too rough near the well")

    # -- pointwise Riccati data --------------------------------------------
    def _pointwise(self, t):
        """s, s', y_1..y_J and y_1'..y_J' at points away from x0."""
        J = self.J
        M = J + 2
        Vj = self.pot.jet(t, M)
        sign = np.sign(t - self.x0)
        sj = jets.sqrt(Vj) * sign
        y0 = sj * (-self.e)
        two_y0 = y0 * 2.0
        ys = [y0]
        y1 = -(y0.diff() + self.mus[0]) / two_y0.truncate(M - 1)
        ys.append(y1)
        for k in range(2, J + 1):
            N = ys[k - 1].diff()
            for i in range(1, k):
                N = N + ys[i].truncate(N.order) * ys[k - i].truncate(N.order)
            ys.append(-(N + self.mus[k - 1]) / two_y0.truncate(N.order))
        s = sj.c[0]
        ds = sj.c[1]
        yv = [y.c[0] for y in ys]
        dy = [y.c[1] for y in ys]
        return s, ds, yv, dy

    def _integrands(self, t):
        s, ds, yv, _ = self._pointwise(t)
        rows = [s, (ds - self.a) / (2.0 * s)] + [yv[k] for k in range(2, self.J + 1)]
        return np.array(rows, dtype=complex)

    def _cumulative(self, targets, start, start_vals):
        """Integrate the integrand rows from ``start`` to each of ``targets`` (monotone)."""
        pts = np.concatenate([[start], targets])
        steps = np.diff(pts)
        m = np.maximum(1, np.ceil(np.abs(steps) / MAX_PANEL).astype(int))
        edges = [np.array([start])]
        for p, st, k in zip(pts[:-1], steps, m):
            edges.append(p + st * np.arange(1, k + 1) / k)
        edges = np.concatenate(edges)
        lo, hi = edges[:-1], edges[1:]
        c, r = 0.5 * (lo + hi), 0.5 * (hi - lo)
        nodes = (c[:, None] + r[:, None] * _GL_X[None, :]).ravel()
        vals = self._integrands(nodes).reshape(-1, len(lo), len(_GL_X))
        panel = r[None, :] * (vals @ _GL_W)
        cum = np.cumsum(panel, axis=1)
        idx = np.cumsum(m) - 1
        return start_vals[:, None] + cum[:, idx]

    def evaluate(self, x, derivatives: bool = False):
        x = np.asarray(x, dtype=float)
        flat = x.ravel()
        npts = flat.size
        J = self.J
        y = flat - self.x0
        inside = np.abs(y) <= self.delta
        Phi0 = np.zeros(npts, dtype=complex)
        s = np.zeros(npts, dtype=complex)
        ds = np.zeros(npts, dtype=complex)
        A = np.zeros((J, npts), dtype=complex)
        dA = np.zeros((J, npts), dtype=complex) if derivatives else None
        d2A = np.zeros((J, npts), dtype=complex) if derivatives else None
        if np.any(inside):
            yi = y[inside]
            Phi0[inside] = self.Phi0_ser(yi)
            s[inside] = self.s_ser(yi)
            ds[inside] = self.s_ser.deriv_eval(yi, 1)
            for j, L in enumerate(self.amp_ser):
                A[j, inside] = L(yi)
                if derivatives:
                    dA[j, inside] = L.deriv_eval(yi, 1)
                    d2A[j, inside] = L.deriv_eval(yi, 2)
        for side in (1.0, -1.0):
            sel = np.nonzero((side * y > self.delta))[0]
            if sel.size == 0:
                continue
            order = sel[np.argsort(side * y[sel])]
            start = self.x0 + side * self.delta
            ys = side * self.delta
            start_vals = np.array([self.Phi0_ser(ys), self.I0_ser(ys)]
                                  + [Y(ys) for Y in self.Y_ser], dtype=complex)
            cum = self._cumulative(flat[order], start, start_vals)
            sv, dsv, yv, dyv = self._pointwise(flat[order])
            Phi0[order] = cum[0]
            s[order] = sv
            ds[order] = dsv
            n = self.n
            a0 = (sv / self.a) ** (n - 1) * np.exp(-(2 * n - 1) * cum[1])
            Z = [cum[2 + k] for k in range(J - 1)]                       # Y_2..Y_J
            dZ = [yv[k + 2] for k in range(J - 1)]
            d2Z = [dyv[k + 2] for k in range(J - 1)]
            if J > 1:
                E, dE, d2E = _exp_poly(Z, dZ, d2Z)
            else:
                E, dE, d2E = [1.0], [0.0], [0.0]
            da0 = a0 * yv[1]
            d2a0 = a0 * (dyv[1] + yv[1] ** 2)
            for j in range(J):
                A[j, order] = a0 * E[j]
                if derivatives:
                    dA[j, order] = da0 * E[j] + a0 * dE[j]
                    d2A[j, order] = d2a0 * E[j] + 2 * da0 * dE[j] + a0 * d2E[j]
        out = {"Phi0": Phi0.reshape(x.shape), "s": s.reshape(x.shape), "ds": ds.reshape(x.shape),
               "A": A.reshape((J,) + x.shape)}
        if derivatives:
            out["dA"] = dA.reshape((J,) + x.shape)
            out["d2A"] = d2A.reshape((J,) + x.shape)
        return out


def wkb_profile(pot, alpha: float, n: int = 1, J: int = 1, delta: float = DELTA_PATCH):
    """Internal evaluator object exposing the series and pointwise machinery."""
    check_alpha(alpha)
    _j_cap(pot, J)
    return _Profile(pot, alpha, n, J, delta)


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def phase(pot, alpha: float, x):
    """phi_l(x) = e^{i alpha/2} |int_{x_l}^x sqrt(V_l)| (adaptive quadrature)."""
    alpha = check_alpha(alpha)
    x0 = _well_data(pot)
    val = cumulative_action(pot, x0, np.atleast_1d(np.asarray(x, dtype=float)))
    out = np.exp(0.5j * alpha) * val
    return complex(out[0]) if np.ndim(x) == 0 else out.reshape(np.shape(x))


def transport_leading(pot, alpha: float, n: int, x):
    """Leading amplitude a_{n,0}(x) (series patch at the well, quadrature elsewhere)."""
    if n < 1:
        raise ContractViolation("level n must be >= 1")
    prof = wkb_profile(pot, alpha, n, 1)
    A = prof.evaluate(np.atleast_1d(np.asarray(x, dtype=float)))["A"][0]
    return complex(A[0]) if np.ndim(x) == 0 else A.reshape(np.shape(x))


@dataclass(frozen=True, eq=False)
class WkbExpansion:
    n: int
    J: int
    alpha: float
    h: float
    grid: np.ndarray
    phase: np.ndarray
    amplitudes: np.ndarray
    mu_coeffs: tuple
    quasimode: np.ndarray
    weighted_residual: Optional[float] = None
    well: float = -1.0
    amplitude_derivs: Optional[tuple] = field(default=None, repr=False)

    @property
    def mu_wkb(self) -> complex:
        return complex(sum(m * self.h ** (k + 1) for k, m in enumerate(self.mu_coeffs)))

    @property
    def amplitude(self) -> np.ndarray:
        """a^wkb(x; h) = sum_j h^j a_{n,j}(x)."""
        return np.tensordot(self.h ** np.arange(self.J), self.amplitudes, axes=1)

    def reflected(self) -> "WkbExpansion":
        """Right-well counterpart (sigma psi)(x) = psi(-x)."""
        derivs = None
        if self.amplitude_derivs is not None:
            dA, d2A = self.amplitude_derivs
            derivs = (-dA[:, ::-1], d2A[:, ::-1])
        return WkbExpansion(self.n, self.J, self.alpha, self.h, -self.grid[::-1], self.phase[::-1],
                            self.amplitudes[:, ::-1], self.mu_coeffs, self.quasimode[::-1],
                            self.weighted_residual, -self.well, derivs)


def wkb_quasimode(pot, alpha: float, h: float, n: int = 1, J: int = 1, grid=None,
                  K=None) -> WkbExpansion:
    """Assemble psi^wkb = e^{-phi/h} sum_{j<J} h^j a_{n,j} on ``grid``.

    When the grid is uniform the weighted residual on ``K`` (default: the
    grid points within [x_l - 0.8|x_l|, |x_l|/2]) is filled in.
    """
    alpha = check_alpha(alpha)
    if not h > 0:
        raise ContractViolation("h must be positive")
    _j_cap(pot, J)
    x0 = _well_data(pot)
    if grid is None:
        ext = getattr(pot, "extent", abs(x0))
        grid = np.linspace(-3 * ext, 3 * ext, 2401)
    grid = np.asarray(grid, dtype=float)
    prof = _Profile(pot, alpha, n, J)
    ev = prof.evaluate(grid, derivatives=True)
    phi = prof.e * ev["Phi0"]
    A = ev["A"]
    amp = np.tensordot(h ** np.arange(J), A, axes=1)
    psi = np.exp(-phi / h) * amp
    exp = WkbExpansion(n=int(n), J=int(J), alpha=alpha, h=float(h), grid=grid, phase=phi,
                       amplitudes=A, mu_coeffs=tuple(prof.mus), quasimode=psi, well=x0,
                       amplitude_derivs=(ev["dA"], ev["d2A"]))
    d = np.diff(grid)
    if grid.size > 5 and np.allclose(d, d[0], rtol=1e-9, atol=0):
        if K is None:
            K = (x0 - 0.8 * abs(x0), 0.5 * abs(x0))
        inK = (grid >= K[0]) & (grid <= K[1])
        if np.count_nonzero(inK[2:-2]):
            r = weighted_residual(exp, pot, K)
            exp = WkbExpansion(**{**exp.__dict__, "weighted_residual": r})
    return exp


def fd4_apply(u, dx: float, h: float):
    """-h^2 u'' by the fourth-order central stencil at interior points 2..n-3."""
    k = h * h / (12.0 * dx * dx)
    return k * (u[:-4] - 16 * u[1:-3] + 30 * u[2:-2] - 16 * u[3:-1] + u[4:])


def weighted_residual(exp: WkbExpansion, pot, K, method: str = "stencil") -> float:
    """sup over grid points in K of |e^{phi/h} (L_l - mu^wkb) psi^wkb|.

    ``method="stencil"`` applies the fd4 stencil used by the discretizer on
    the expansion's (uniform) grid, with the exponential weight folded into
    the stencil so nothing overflows.  ``method="analytic"`` uses the exact
    derivatives of the amplitudes instead.
    """
    x = exp.grid
    lo, hi = float(K[0]), float(K[1])
    if not lo <= exp.well <= hi:
        raise ContractViolation("K must contain the well")
    h = exp.h
    mu = exp.mu_wkb
    amp = exp.amplitude
    e_V = np.exp(1j * exp.alpha) * np.asarray(pot(x), dtype=float)
    if method == "analytic":
        if exp.amplitude_derivs is None:
            raise ContractViolation("expansion carries no amplitude derivatives")
        dA, d2A = exp.amplitude_derivs
        pw = h ** np.arange(exp.J)
        dAmp = np.tensordot(pw, dA, axes=1)
        d2Amp = np.tensordot(pw, d2A, axes=1)
        s = np.sign(x - exp.well) * np.sqrt(np.maximum(np.asarray(pot(x), float), 0.0))
        ds = _s_prime(pot, x, exp.well)
        e = np.exp(0.5j * exp.alpha)
        r = -h * h * d2Amp + h * (2 * e * s * dAmp + e * ds * amp) - mu * amp
        sel = (x >= lo) & (x <= hi)
        return float(np.max(np.abs(r[sel])))
    d = np.diff(x)
    if not np.allclose(d, d[0], rtol=1e-9, atol=0):
        raise ContractViolation("stencil residual needs a uniform grid")
    dx = float(d[0])
    idx = np.arange(2, len(x) - 2)
    idx = idx[(x[idx] >= lo) & (x[idx] <= hi)]
    if idx.size == 0:
        raise ContractViolation("K contains no interior grid points")
    k = h * h / (12.0 * dx * dx)
    coef = np.array([1.0, -16.0, 30.0, -16.0, 1.0]) * k
    r = (e_V[idx] - mu) * amp[idx]
    for off, c in zip(range(-2, 3), coef):
        dphi = exp.phase[idx + off] - exp.phase[idx]
        r = r + c * amp[idx + off] * np.exp(-dphi / h)
    return float(np.max(np.abs(r)))


def _s_prime(pot, x, x0):
    """s'(x) for s = sign(x - x0) sqrt(V), exact at x0 as well."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    near = np.abs(x - x0) < 1e-6
    far = ~near
    if np.any(far):
        V = np.asarray(pot(x[far]), float)
        dV = np.asarray(pot.derivative(x[far], 1), float)
        out[far] = np.sign(x[far] - x0) * dV / (2 * np.sqrt(V))
    if np.any(near):
        s_ser, _ = _series_s(pot, 12)
        out[near] = s_ser.deriv_eval(x[near] - x0, 1).real
    return out


@dataclass(frozen=True)
class WkbNorms:
    norm: float
    selfpair: complex
    norm_prediction: float
    selfpair_prediction: complex

    @property
    def ratio(self) -> complex:
        """norm^2 / selfpair; tends to e^{i alpha/4}/sqrt(cos(alpha/2))."""
        return self.norm ** 2 / self.selfpair


def wkb_norms(pot, alpha: float, h: float, J: int = 1, n_grid: int = 4001) -> WkbNorms:
    """L^2 norm and bilinear self-pairing of psi_1^wkb by grid quadrature."""
    alpha = check_alpha(alpha)
    x0 = _well_data(pot)
    a = float(getattr(pot, "a"))
    c = math.cos(alpha / 2)
    L = 14.0 * math.sqrt(h / (a * c))
    ext = getattr(pot, "extent", abs(x0))
    lo, hi = max(x0 - L, -3 * ext), min(x0 + L, 3 * ext)
    grid = np.linspace(lo, hi, n_grid)
    prof = _Profile(pot, alpha, 1, J)
    ev = prof.evaluate(grid)
    psi = np.exp(-prof.e * ev["Phi0"] / h) * np.tensordot(h ** np.arange(J), ev["A"], axes=1)
    w = np.full(n_grid, grid[1] - grid[0])
    w[0] *= 0.5
    w[-1] *= 0.5
    norm = float(np.sqrt(np.sum(w * np.abs(psi) ** 2)))
    selfpair = complex(np.sum(w * psi * psi))
    norm_pred = h ** 0.25 * (math.pi / (c * a)) ** 0.25
    sp_pred = h ** 0.5 * np.exp(-0.25j * alpha) * math.sqrt(math.pi / a)
    return WkbNorms(norm=norm, selfpair=selfpair, norm_prediction=norm_pred,
                    selfpair_prediction=complex(sp_pred))
