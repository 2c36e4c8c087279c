"""Discretization of -h^2 d^2/dx^2 + e^{i alpha} V on [-X, X] and spectral tools.

Two schemes are available:

``fd4``
    Fourth-order central differences on a uniform interior grid with
    Dirichlet ends.  The two rows next to each end use an odd reflection for
    the ghost value, which only touches the diagonal, so the matrix stays
    complex symmetric (``A == A.T``).  This is the default.

``chebyshev``
    Chebyshev collocation (squared differentiation matrix restricted to the
    interior nodes).  Spectrally accurate, not symmetric; used as a
    cross-check.

Eigenvalues come from a dense QR-type solve.  For ``fd4`` the eigenvectors of
the retained eigenvalues are then obtained by banded inverse iteration, which
is cheaper than a dense eigenvector solve and resolves the exponentially
small tails far better than the backward-stable dense vectors do.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
import scipy.linalg as sla

from .errors import (ClusterAnomalyWarning, ConfigurationError, ContourPlacementError,
                     ContractViolation, LocalizationWarning, NearSpectrumError,
                     NumericFailure)

__all__ = ["DiscreteOperator", "SpectrumResult", "RieszProjector", "ConvergenceReport",
           "assemble", "low_lying_spectrum", "riesz_projector", "resolvent_norm",
           "localization_check", "cluster_eigenvalues", "convergence_check",
           "refine_eigenpair", "potential_tag", "cheb"]

EPS = np.finfo(float).eps
DEFAULT_N = 1200


def potential_tag(potential) -> str:
    tag = getattr(potential, "tag", None)
    if tag is not None:
        return tag
    if hasattr(potential, "x_left") and hasattr(potential, "vpp"):
        return "double"
    return "custom"


def cheb(N: int):
    """Chebyshev points x_j = cos(pi j/N) and the differentiation matrix."""
    if N == 0:
        return np.zeros((1, 1)), np.ones(1)
    x = np.cos(np.pi * np.arange(N + 1) / N)
    c = np.ones(N + 1)
    c[0] = c[-1] = 2.0
    c *= (-1.0) ** np.arange(N + 1)
    dX = x[:, None] - x[None, :]
    D = np.outer(c, 1.0 / c) / (dX + np.eye(N + 1))
    D -= np.diag(D.sum(axis=1))
    return D, x


def _clenshaw_curtis_weights(N: int):
    """Clenshaw-Curtis weights on the N+1 Chebyshev points of [-1, 1]."""
    theta = np.pi * np.arange(N + 1) / N
    w = np.zeros(N + 1)
    v = np.ones(N - 1)
    ii = np.arange(1, N)
    if N % 2 == 0:
        w[0] = w[N] = 1.0 / (N ** 2 - 1)
        for k in range(1, N // 2):
            v -= 2 * np.cos(2 * k * theta[ii]) / (4 * k * k - 1)
        v -= np.cos(N * theta[ii]) / (N ** 2 - 1)
    else:
        w[0] = w[N] = 1.0 / N ** 2
        for k in range(1, (N - 1) // 2 + 1):
            v -= 2 * np.cos(2 * k * theta[ii]) / (4 * k * k - 1)
    w[ii] = 2 * v / N
    return w


@dataclass(frozen=True, eq=False)
class DiscreteOperator:
    alpha: float
    h: float
    X: float
    n_points: int
    scheme: str
    grid: np.ndarray
    matrix: np.ndarray
    potential_tag: str
    weights: np.ndarray
    potential: object = field(repr=False, default=None)
    banded: Optional[np.ndarray] = field(repr=False, default=None)

    @property
    def dx(self) -> float:
        return float(self.grid[1] - self.grid[0])

    @property
    def norm(self) -> float:
        """1-norm of the matrix (cheap and adequate for backward-error scales)."""
        if self.matrix is None:
            return float(np.max(np.sum(np.abs(self.banded), axis=0)))
        return float(np.max(np.sum(np.abs(self.matrix), axis=0)))

    def matvec(self, v):
        """A @ v, using the band storage when no dense matrix was built."""
        if self.matrix is not None:
            return self.matrix @ v
        ab = self.banded
        out = ab[2] * v
        out[:-1] += ab[1, 1:] * v[1:]
        out[:-2] += ab[0, 2:] * v[2:]
        out[1:] += ab[3, :-1] * v[:-1]
        out[2:] += ab[4, :-2] * v[:-2]
        return out

    def inner(self, u, v):
        """Hermitian L^2 pairing  sum w u conj(v)."""
        return np.sum(self.weights * u * np.conj(v))

    def bilinear(self, u, v):
        """Bilinear pairing  sum w u v  (no conjugation)."""
        return np.sum(self.weights * u * v)

    def l2norm(self, u) -> float:
        return float(np.sqrt(np.sum(self.weights * np.abs(u) ** 2)))


def assemble(potential, alpha: float, h: float, X: Optional[float] = None,
             n_points: int = DEFAULT_N, scheme: str = "fd4", tag: Optional[str] = None,
             dense: bool = True) -> DiscreteOperator:
    """Matrix of -h^2 d^2/dx^2 + e^{i alpha} V with Dirichlet conditions at +-X.

    With ``dense=False`` (fd4 only) just the band storage is kept, which is
    enough for shifted solves and inverse iteration on very fine grids.
    """
    if not h > 0:
        raise ContractViolation("h must be positive")
    if n_points < 200:
        raise ConfigurationError("n_points must be at least 200")
    extent = getattr(potential, "extent", None)
    if X is None:
        X = 3.0 * extent if extent else 4.0
    X = float(X)
    if extent is not None and not X > extent + 1.0:
        raise ConfigurationError(f"domain half-width X={X} must exceed x_r + 1 = {extent + 1.0}")
    phase = np.exp(1j * alpha)
    if scheme == "fd4":
        n = int(n_points)
        dx = 2.0 * X / (n + 1)
        grid = -X + dx * np.arange(1, n + 1)
        # -h^2 f'' ~ k (f_{i-2} - 16 f_{i-1} + 30 f_i - 16 f_{i+1} + f_{i+2})
        k = h * h / (12.0 * dx * dx)
        kin = np.full(n, 30.0 * k)
        kin[0] = kin[-1] = 29.0 * k  # odd ghost value f_{-1} = -f_1
        off1 = np.full(n - 1, -16.0 * k)
        off2 = np.full(n - 2, k)
        V = np.asarray(potential(grid), dtype=float)
        diag = kin + phase * V
        A = None
        if dense:
            A = np.diag(diag.astype(complex)) + np.diag(off1, 1) + np.diag(off1, -1) \
                + np.diag(off2, 2) + np.diag(off2, -2)
        ab = np.zeros((5, n), dtype=complex)
        ab[0, 2:] = off2
        ab[1, 1:] = off1
        ab[2, :] = diag
        ab[3, :-1] = off1
        ab[4, :-2] = off2
        weights = np.full(n, dx)
    elif scheme == "chebyshev":
        N = int(n_points) + 1
        D, xc = cheb(N)
        D2 = (D @ D)[1:N, 1:N] / X ** 2
        grid = (X * xc[1:N])[::-1]
        D2 = D2[::-1, ::-1]
        V = np.asarray(potential(grid), dtype=float)
        A = (-h * h) * D2 + np.diag(phase * V)
        A = A.astype(complex)
        ab = None
        weights = (X * _clenshaw_curtis_weights(N)[1:N])[::-1]
    else:
        raise ConfigurationError(f"unknown scheme {scheme!r}")
    return DiscreteOperator(alpha=float(alpha), h=float(h), X=X, n_points=len(grid),
                            scheme=scheme, grid=grid, matrix=A,
                            potential_tag=tag or potential_tag(potential), weights=weights,
                            potential=potential, banded=ab)


# ---------------------------------------------------------------------------
# eigenpairs
# ---------------------------------------------------------------------------

def _shifted_band(op: DiscreteOperator, sigma):
    ab = op.banded.copy()
    ab[2] -= sigma
    return ab


def _solve_shifted(op, sigma, rhs):
    if op.banded is not None:
        ab = _shifted_band(op, sigma)
        try:
            return sla.solve_banded((2, 2), ab, rhs, check_finite=False)
        except sla.LinAlgError:
            ab[2] -= 1e-14 * max(abs(sigma), 1.0)
            return sla.solve_banded((2, 2), ab, rhs, check_finite=False)
    M = op.matrix - sigma * np.eye(op.n_points)
    return sla.solve(M, rhs, check_finite=False)


def _start_vector(n):
    # deterministic, generic start: a smooth bump plus a ramp
    t = np.linspace(-1.0, 1.0, n)
    return (1.0 + 0.3 * t + 0.1j * t * t).astype(complex)


def refine_eigenpair(op: DiscreteOperator, sigma: complex, iterations: int = 3,
                     start=None, update_shift: bool = False):
    """Inverse iteration with shift ``sigma``; returns (mu, psi).

    ``mu`` is the bilinear Rayleigh quotient psi^T A psi / psi^T psi, which is
    the natural stationary quotient for complex-symmetric matrices.
    """
    v = _start_vector(op.n_points) if start is None else np.asarray(start, dtype=complex)
    shift = complex(sigma)
    mu = shift
    for _ in range(iterations):
        v = _solve_shifted(op, shift, v)
        v /= np.linalg.norm(v)
        Av = op.matvec(v)
        denom = np.dot(v, v)
        mu = np.dot(v, Av) / denom if abs(denom) > 1e-8 else np.vdot(v, Av)
        if update_shift:
            shift = mu
    return complex(mu), v


def _normalize(op, v):
    v = v / op.l2norm(v)
    k = int(np.argmax(np.abs(v)))
    return v * (abs(v[k]) / v[k])


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    R: float
    h: float
    alpha: float
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residuals: np.ndarray
    clusters: list
    grid: np.ndarray
    weights: np.ndarray
    potential_tag: str
    backward_error: float
    condition: np.ndarray

    def l2norm(self, u) -> float:
        return float(np.sqrt(np.sum(self.weights * np.abs(u) ** 2)))


def low_lying_spectrum(op: DiscreteOperator, R: float = 7.0, residual_tol: Optional[float] = None,
                       a: Optional[float] = None) -> SpectrumResult:
    """Eigenvalues of ``op`` in the disk D(0, R h) with eigenvectors and residuals."""
    a = a if a is not None else getattr(op.potential, "a", None)
    if a is not None and R < 3 * a:
        raise ContractViolation(f"R must be at least 3a = {3 * a}")
    if op.matrix is None:
        raise ContractViolation("dense eigensolve needs an operator assembled with dense=True")
    try:
        if op.banded is not None:
            vals = sla.eigvals(op.matrix, overwrite_a=False, check_finite=False)
            vecs = None
        else:
            vals, vecs = sla.eig(op.matrix, check_finite=False)
    except (sla.LinAlgError, ValueError) as exc:
        raise NumericFailure(f"dense eigensolver failed: {exc}") from exc
    if not np.all(np.isfinite(vals)):
        raise NumericFailure("dense eigensolver returned non-finite eigenvalues")
    keep = np.nonzero(np.abs(vals) < R * op.h)[0]
    order = sorted(keep, key=lambda i: (abs(vals[i]), np.angle(vals[i])))
    mus = vals[order]
    norm = op.norm
    tol = 1e-8 * norm if residual_tol is None else residual_tol
    vectors, residuals, cond = [], [], []
    for idx, mu in zip(order, mus):
        if vecs is None:
            # extra sweeps push start-vector leftovers in the far tails below
            # the exponentially small true values (matters for weighted norms)
            _, v = refine_eigenpair(op, mu, iterations=8)
        else:
            v = vecs[:, idx]
        v = _normalize(op, v)
        r = op.l2norm(op.matrix @ v - mu * v)
        if not r <= tol:
            raise NumericFailure(f"eigenpair residual {r:.3e} exceeds tolerance {tol:.3e} at mu={mu}")
        vectors.append(v)
        residuals.append(r)
        cond.append(np.sum(np.abs(v) ** 2) / abs(np.dot(v, v)))
    V = np.array(vectors).T if vectors else np.zeros((op.n_points, 0), dtype=complex)
    res = SpectrumResult(R=float(R), h=op.h, alpha=op.alpha, eigenvalues=np.asarray(mus),
                         eigenvectors=V, residuals=np.asarray(residuals), clusters=[],
                         grid=op.grid, weights=op.weights, potential_tag=op.potential_tag,
                         backward_error=EPS * norm, condition=np.asarray(cond))
    if a is not None and len(mus):
        res = replace(res, clusters=cluster_eigenvalues(res, op.h, a))
    return res


def cluster_eigenvalues(result: SpectrumResult, h: float, a: float, factor: float = 0.3):
    """Single-linkage clustering with threshold ``factor * a * h``.

    Eigenvalues are visited in the stored (modulus) order; an eigenvalue joins
    the first cluster containing a member within the threshold.  Clusters of
    three or more eigenvalues trigger a :class:`ClusterAnomalyWarning`.
    """
    mus = np.asarray(result.eigenvalues)
    thr = factor * a * h
    clusters = []
    for i, mu in enumerate(mus):
        for cl in clusters:
            if np.min(np.abs(mus[cl] - mu)) < thr:
                cl.append(i)
                break
        else:
            clusters.append([i])
    big = [cl for cl in clusters if len(cl) >= 3]
    if big:
        warnings.warn(f"cluster(s) of size >= 3 found: {big}; grid may be under-resolved",
                      ClusterAnomalyWarning, stacklevel=2)
    return clusters


# ---------------------------------------------------------------------------
# Riesz projectors and resolvents
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RieszProjector:
    center: complex
    radius: float
    n_contour: int
    matrix: np.ndarray
    singular_values: np.ndarray
    numeric_rank: int
    idempotency_defect: float


def riesz_projector(op: DiscreteOperator, center: complex, radius: float, n_contour: int = 32,
                    eigenvalues=None, rank_tol: float = 1e-6) -> RieszProjector:
    """Contour-integral projector (1/2 pi i) \\oint (z - A)^{-1} dz on a circle.

    The trapezoid rule with ``n_contour`` equispaced nodes is used.  The
    numeric rank counts singular values above ``rank_tol * max(sigma_1, 1)``
    (a projector onto a nontrivial subspace has sigma_1 >= 1, so an empty
    contour correctly reports rank 0).
    """
    if not radius > 0 or n_contour < 4:
        raise ContractViolation("radius must be positive and n_contour >= 4")
    if eigenvalues is None:
        eigenvalues = sla.eigvals(op.matrix, check_finite=False)
    dist = np.abs(np.abs(np.asarray(eigenvalues) - center) - radius)
    if dist.size and np.min(dist) < 0.1 * radius:
        raise ContourPlacementError(
            f"eigenvalue within {np.min(dist):.3e} of the contour (limit {0.1 * radius:.3e})")
    n = op.n_points
    eye = np.eye(n, dtype=complex)
    P = np.zeros((n, n), dtype=complex)
    for k in range(n_contour):
        w = radius * np.exp(2j * np.pi * k / n_contour)
        z = center + w
        # (z - A)^{-1} = -(A - z)^{-1}
        P -= (w / n_contour) * _solve_shifted(op, z, eye)
    sv = sla.svdvals(P, check_finite=False)
    rank = int(np.sum(sv > rank_tol * max(sv[0], 1.0)))
    defect = float(np.linalg.norm(P @ P - P))
    return RieszProjector(center=complex(center), radius=float(radius), n_contour=int(n_contour),
                          matrix=P, singular_values=sv, numeric_rank=rank,
                          idempotency_defect=defect)


def resolvent_norm(op: DiscreteOperator, z: complex) -> float:
    """||(A - z)^{-1}||_2 = 1 / sigma_min(A - z)."""
    M = op.matrix - z * np.eye(op.n_points)
    s = sla.svdvals(M, check_finite=False)
    smin = s[-1]
    if smin <= op.n_points * EPS * s[0]:
        raise NearSpectrumError(f"z={z} is numerically an eigenvalue (sigma_min={smin:.3e})")
    return float(1.0 / smin)


# ---------------------------------------------------------------------------
# diagnostics
# ---------------------------------------------------------------------------

def localization_check(result: SpectrumResult, weight, h: float, index: int = 0,
                       flag_threshold: float = 1e6) -> float:
    """max_x |psi(x)| e^{Phi(x)/h} / ||psi|| for eigenvector ``index``.

    Computed in log space; values above ``flag_threshold`` raise a
    :class:`LocalizationWarning` (the eigenvector does not live in the well
    the weight is centred on).
    """
    psi = result.eigenvectors[:, index]
    if len(weight.grid) == len(result.grid) and np.allclose(weight.grid, result.grid):
        phi = np.asarray(weight.values)
    else:
        phi = weight(result.grid)
    with np.errstate(divide="ignore"):
        logs = np.log(np.abs(psi)) + phi / h
    m = float(np.max(logs)) - math.log(result.l2norm(psi))
    value = math.exp(m) if m < 709.0 else math.inf
    if value > flag_threshold:
        warnings.warn(f"localization ratio {value:.3e} exceeds {flag_threshold:.1e}",
                      LocalizationWarning, stacklevel=2)
    return value


@dataclass(frozen=True)
class ConvergenceReport:
    ladder: tuple
    values: tuple
    diffs: tuple
    ratios: tuple
    error_estimate: float
    converged: bool


def convergence_check(potential, alpha: float, h: float, ladder, scheme: str = "fd4",
                      dense_limit: int = 1600, floor: float = 1e-12) -> ConvergenceReport:
    """Follow the smallest-modulus eigenvalue along a refinement ladder of (X, n) rungs."""
    ladder = [tuple(r) for r in ladder]
    if len(ladder) < 3:
        raise ContractViolation("the refinement ladder needs at least 3 rungs")
    values = []
    for X, n in ladder:
        op = assemble(potential, alpha, h, X, int(n), scheme,
                      dense=scheme != "fd4" or not values or int(n) <= dense_limit)
        if not values or op.banded is None or op.n_points <= dense_limit:
            vals = sla.eigvals(op.matrix, check_finite=False)
            target = 0.0 if not values else values[-1]
            mu = vals[np.argmin(np.abs(vals - target))]
            if op.banded is not None:
                mu, _ = refine_eigenpair(op, mu, iterations=3)
        else:
            # large fd4 rungs: inverse iteration seeded by the previous rung
            mu, _ = refine_eigenpair(op, values[-1], iterations=4)
        values.append(complex(mu))
    diffs = [abs(values[i + 1] - values[i]) for i in range(len(values) - 1)]
    ratios = [diffs[i] / diffs[i + 1] if diffs[i + 1] > 0 else math.inf
              for i in range(len(diffs) - 1)]
    scale = floor * max(abs(values[-1]), 1e-300)
    converged = diffs[-1] <= scale or all(diffs[i + 1] < diffs[i] for i in range(len(diffs) - 1))
    report = ConvergenceReport(ladder=tuple(ladder), values=tuple(values), diffs=tuple(diffs),
                               ratios=tuple(ratios), error_estimate=float(max(diffs[-1], scale)),
                               converged=converged)
    if not converged:
        raise NumericFailure(f"eigenvalue does not converge along the ladder: diffs={diffs}")
    return report
