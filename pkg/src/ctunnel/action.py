"""Agmon-type actions: S, S(alpha), truncated actions and the weight Phi_eps."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation, NumericDomainError
from .quadrature import gk15

__all__ = ["ComplexAction", "AgmonWeight", "agmon_action", "complex_action",
           "truncated_actions", "agmon_weight", "agmon_weight_profile", "plateau",
           "check_alpha", "cumulative_action"]

ACTION_RTOL = 1e-10


def check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not -math.pi < alpha < math.pi:
        raise ContractViolation(f"alpha must lie in (-pi, pi), got {alpha}")
    return alpha


def _breakpoints(V):
    pts = []
    for attr in ("x_left", "x_right"):
        if hasattr(V, attr):
            pts.append(getattr(V, attr))
    if hasattr(V, "well"):
        pts.append(V.well)
    if hasattr(V, "bump_center"):
        pts += [V.bump_center - V.eta, V.bump_center + V.eta]
    return pts


def _sqrt_integrand(V):
    def f(x):
        v = np.asarray(V(x), dtype=float)
        vmax = max(1.0, float(np.max(np.abs(v))))
        if np.min(v) < -1e-13 * vmax:
            raise NumericDomainError(f"V < 0 on the integration range (min {np.min(v):.3e})")
        return np.sqrt(np.maximum(v, 0.0))
    return f


def agmon_action(V, a: float, b: float, rtol: float = ACTION_RTOL, breakpoints=()) -> float:
    """Integral of sqrt(V) over [a, b] by adaptive Gauss-Kronrod quadrature.

    Well positions (and seal edges, for sealed potentials) are used as panel
    boundaries so the kink of sqrt(V) at a minimum sits on a panel edge.
    """
    if b < a:
        raise ContractViolation(f"agmon_action needs a <= b, got [{a}, {b}]")
    if a == b:
        return 0.0
    pts = list(breakpoints) + _breakpoints(V)
    val, _ = gk15(_sqrt_integrand(V), a, b, rtol=rtol, atol=0.0, breakpoints=pts)
    return float(val)


def complex_action(spec, alpha: float) -> complex:
    """S(alpha) = e^{i alpha/2} * integral of sqrt(V) between the wells."""
    alpha = check_alpha(alpha)
    S = agmon_action(spec, spec.x_left, spec.x_right)
    return complex(np.exp(0.5j * alpha) * S)


def plateau(x, A: float):
    """Smooth cutoff: 1 on [-A, A], 0 outside [-2A, 2A], C-infinity in between."""
    s = (np.abs(np.asarray(x, dtype=float)) - A) / A
    s = np.clip(s, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        f1 = np.where(s < 1, np.exp(-1.0 / np.where(s < 1, 1.0 - s, 1.0)), 0.0)
        f0 = np.where(s > 0, np.exp(-1.0 / np.where(s > 0, s, 1.0)), 0.0)
    return f1 / (f0 + f1)


class _CutoffPotential:
    """V_{l,A} = V_l * plateau(., A); only values are needed."""

    def __init__(self, sealed, A):
        self.sealed, self.A = sealed, A
        self.well = sealed.well
        self.bump_center, self.eta = sealed.bump_center, sealed.eta

    def __call__(self, x):
        return self.sealed(x) * plateau(x, self.A)


@dataclass(frozen=True)
class ComplexAction:
    S: float
    S_alpha: complex
    S_eta: float
    S_minus_gamma: float
    S_plus_gamma: float
    alpha: float
    eta: float
    gamma: float


def truncated_actions(sealed, alpha: float, gamma: float, A_cut=None) -> ComplexAction:
    """S, S(alpha), S_eta and S_+-(gamma) for a right-sealed potential."""
    alpha = check_alpha(alpha)
    if gamma < 0:
        raise ContractViolation("gamma must be nonnegative")
    spec = sealed.base
    if not sealed.eta < spec.x_right - spec.x_left:
        raise ContractViolation("eta must be smaller than x_r - x_l")
    A = 2.0 * spec.x_right if A_cut is None else float(A_cut)
    c = math.cos(alpha / 2)
    S = agmon_action(spec, spec.x_left, spec.x_right)
    S_eta = c * agmon_action(spec, spec.x_left, spec.x_right - sealed.eta)
    VA = _CutoffPotential(sealed, A)
    xl = sealed.well
    pts = [-2 * A, -A, A, 2 * A]
    S_minus = c * agmon_action(VA, xl - gamma, xl, breakpoints=pts)
    S_plus = c * agmon_action(VA, xl, xl + gamma, breakpoints=pts)
    return ComplexAction(S=S, S_alpha=complex(np.exp(0.5j * alpha) * S), S_eta=S_eta,
                         S_minus_gamma=S_minus, S_plus_gamma=S_plus, alpha=alpha,
                         eta=sealed.eta, gamma=float(gamma))


def cumulative_action(V, x0: float, xs, breakpoints=(), rtol: float = ACTION_RTOL):
    """|integral_{x0}^{x} sqrt(V)| for every x in ``xs`` (any order).

    Points are swept outward from ``x0`` on each side so each stretch of the
    integral is computed once.
    """
    xs = np.asarray(xs, dtype=float)
    flat = xs.ravel()
    out = np.zeros_like(flat)
    for side in (1.0, -1.0):
        idx = np.nonzero(side * (flat - x0) > 0)[0]
        if idx.size == 0:
            continue
        order = idx[np.argsort(side * (flat[idx] - x0))]
        prev, acc = x0, 0.0
        for i in order:
            x = flat[i]
            if x != prev:
                lo, hi = (prev, x) if side > 0 else (x, prev)
                acc += agmon_action(V, lo, hi, rtol=rtol, breakpoints=breakpoints)
                prev = x
            out[i] = acc
    return out.reshape(xs.shape)


@dataclass(frozen=True)
class AgmonWeight:
    """Samples of Phi_eps on a grid."""

    epsilon: float
    A_cut: float
    alpha: float
    grid: np.ndarray
    values: np.ndarray

    def __call__(self, x):
        return np.interp(x, self.grid, self.values)

    @classmethod
    def zero(cls, grid) -> "AgmonWeight":
        grid = np.asarray(grid, dtype=float)
        return cls(epsilon=0.0, A_cut=np.inf, alpha=0.0, grid=grid, values=np.zeros_like(grid))


def _check_weight_args(sealed, epsilon, A_cut):
    if not 0 < epsilon < 1:
        raise ContractViolation(f"epsilon must lie in (0, 1), got {epsilon}")
    A = 2.0 * sealed.x_right if A_cut is None else float(A_cut)
    if A < sealed.x_right:
        raise ContractViolation("A_cut must satisfy [x_l, x_r] within [-A_cut, A_cut]")
    return A


def agmon_weight(sealed, alpha: float, epsilon: float, A_cut=None, x=0.0):
    """Phi_eps(x) = sqrt(1-eps) cos(alpha/2) |integral_{x_l}^x sqrt(V_{l,A})|."""
    alpha = check_alpha(alpha)
    A = _check_weight_args(sealed, epsilon, A_cut)
    VA = _CutoffPotential(sealed, A)
    val = cumulative_action(VA, sealed.well, np.atleast_1d(x), breakpoints=[-2 * A, -A, A, 2 * A])
    val = math.sqrt(1 - epsilon) * math.cos(alpha / 2) * val
    return float(val[0]) if np.ndim(x) == 0 else val.reshape(np.shape(x))


def agmon_weight_profile(sealed, alpha: float, epsilon: float, grid, A_cut=None) -> AgmonWeight:
    A = _check_weight_args(sealed, epsilon, A_cut)
    grid = np.asarray(grid, dtype=float)
    vals = agmon_weight(sealed, alpha, epsilon, A, grid)
    return AgmonWeight(epsilon=float(epsilon), A_cut=A, alpha=float(alpha), grid=grid, values=vals)
