"""Symmetric double-well potentials, their sealed one-well versions and
local quadratic models.

Every potential object in this module is callable on floats, numpy arrays and
:class:`~ctunnel.jets.Jet` objects.  That single convention is what the rest
of the package relies on: quadrature calls ``V(x)``, the WKB recursion asks
for a Taylor jet ``V.jet(x0, K)``, and the discretizer only needs values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import jets
from .errors import ConfigurationError, ContractViolation
from .expr import parse_expression
from .jets import Jet

__all__ = [
    "PotentialSpec", "SealedPotential", "QuadraticModel", "DiagnosticsReport",
    "quartic", "figure", "custom", "from_config", "eval_potential", "validate",
    "seal", "default_seal", "quadratic_model", "bump",
]


def _as_float_array(v, like):
    out = np.asarray(v, dtype=float)
    if out.shape != np.shape(like):
        out = np.broadcast_to(out, np.shape(like)).copy()
    return out


@dataclass(frozen=True)
class PotentialSpec:
    """An even double well ``V`` with nondegenerate minima at ``x_left < 0 < -x_left``.

    ``func`` must accept floats, arrays and jets.  ``closed_derivs`` (optional)
    maps ``(x, order)`` to hand-derived derivatives; when absent derivatives
    come from jets.
    """

    func: Callable
    x_left: float
    v0: float
    vpp: float
    v_inf: float
    kind: str
    name: str = ""
    expr: Optional[str] = None
    closed_derivs: Optional[Callable] = field(default=None, repr=False)
    x_far: float = 2.0

    @property
    def x_right(self) -> float:
        return -self.x_left

    @property
    def wells(self) -> tuple:
        return (self.x_left, self.x_right)

    @property
    def extent(self) -> float:
        """Largest |x| of a well; used to check truncation boxes."""
        return abs(self.x_left)

    @property
    def a(self) -> float:
        """Harmonic frequency sqrt(V''(x_l)/2)."""
        if self.vpp <= 0:
            raise ContractViolation("degenerate minimum: vpp must be positive")
        return math.sqrt(self.vpp / 2.0)

    def __call__(self, x):
        if isinstance(x, Jet):
            return self.func(x)
        return _as_float_array(self.func(np.asarray(x, dtype=float)), x) \
            if np.ndim(x) else float(self.func(float(x)))

    def jet(self, x0, order: int) -> Jet:
        """Taylor jet of V about ``x0`` (normalized coefficients)."""
        x0 = np.asarray(x0, dtype=float)
        out = self.func(Jet.variable(x0, order))
        if not isinstance(out, Jet):  # constant expression
            out = Jet.constant(np.broadcast_to(np.asarray(out, float), x0.shape), order)
        return out

    def derivative(self, x, order: int):
        if order not in (0, 1, 2, 3) and self.closed_derivs is not None:
            return self.jet(x, order).derivative(order)
        if order == 0:
            return self(x)
        if self.closed_derivs is not None:
            res = self.closed_derivs(np.asarray(x, dtype=float), order)
            return float(res) if np.ndim(x) == 0 else res
        res = self.jet(x, order).derivative(order)
        return float(res) if np.ndim(x) == 0 else res

    def evaluator(self, x):
        """Tuple (V, V', V'', V''') at ``x``."""
        return tuple(self.derivative(x, k) for k in range(4))


def eval_potential(spec, x, order: int):
    """Return V^{(order)}(x) for order in 0..3."""
    if order not in (0, 1, 2, 3):
        raise ContractViolation(f"unsupported derivative order {order} (expected 0..3)")
    return spec.derivative(x, order)


# ---------------------------------------------------------------------------
# builtins
# ---------------------------------------------------------------------------

def _quartic(x):
    return (1 - x * x) ** 2


def _quartic_derivs(x, order):
    if order == 1:
        return -4.0 * x * (1.0 - x * x)
    if order == 2:
        return -4.0 + 12.0 * x * x
    if order == 3:
        return 24.0 * x
    raise ContractViolation(order)


def _figure(x):
    return 4 * (1 - x * x) ** 2 / (2 + x ** 4)


def _figure_derivs(x, order):
    # V = 4 u w with u = (1 - x^2)^2, w = 1/D, D = 2 + x^4; Leibniz rule.
    u = [(1 - x * x) ** 2, -4 * x * (1 - x * x), -4 + 12 * x * x, 24 * x]
    D = 2 + x ** 4
    d1, d2, d3 = 4 * x ** 3, 12 * x * x, 24 * x
    w = [1 / D,
         -d1 / D ** 2,
         -d2 / D ** 2 + 2 * d1 ** 2 / D ** 3,
         -d3 / D ** 2 + 6 * d1 * d2 / D ** 3 - 6 * d1 ** 3 / D ** 4]
    return 4 * sum(math.comb(order, j) * u[j] * w[order - j] for j in range(order + 1))


def quartic() -> PotentialSpec:
    """V(x) = (1 - x^2)^2: wells at +-1, a = 2, S = 4/3."""
    return PotentialSpec(func=_quartic, x_left=-1.0, v0=1.0, vpp=8.0, v_inf=9.0,
                         kind="builtin-quartic", name="quartic",
                         closed_derivs=_quartic_derivs, x_far=2.0)


def figure() -> PotentialSpec:
    """V(x) = 4(1 - x^2)^2 / (2 + x^4): bounded double well with V(0) = 2."""
    return PotentialSpec(func=_figure, x_left=-1.0, v0=2.0, vpp=32.0 / 3.0, v_inf=2.0,
                         kind="builtin-figure", name="figure",
                         closed_derivs=_figure_derivs, x_far=2.0)


def custom(expr: str, x_well: float, vpp: Optional[float] = None,
           v_inf: Optional[float] = None, x_far: Optional[float] = None) -> PotentialSpec:
    """Potential from a closed-form expression in ``x``.

    ``x_well`` locates one minimum; the left one is taken at ``-|x_well|``.
    ``vpp`` and ``v_inf`` default to values computed from the expression
    (the former by automatic differentiation, the latter by sampling
    ``x_far <= |x| <= 10 x_far``).
    """
    f = parse_expression(expr)
    x_left = -abs(float(x_well))
    x_far = float(x_far) if x_far is not None else max(2.0 * abs(x_left), 1.0)
    base = PotentialSpec(func=f, x_left=x_left, v0=0.0, vpp=0.0, v_inf=0.0,
                         kind="custom", name="custom", expr=expr, x_far=x_far)
    v0 = float(base(0.0))
    if vpp is None:
        vpp = float(base.jet(x_left, 2).derivative(2))
    if v_inf is None:
        xs = np.linspace(x_far, 10.0 * x_far, 2001)
        v_inf = float(min(np.min(base(xs)), np.min(base(-xs))))
    return PotentialSpec(func=f, x_left=x_left, v0=v0, vpp=float(vpp), v_inf=v_inf,
                         kind="custom", name="custom", expr=expr, x_far=x_far)


def from_config(block: dict) -> PotentialSpec:
    """Build a spec from a ``[potential]`` configuration table."""
    kind = block.get("kind", "quartic")
    if kind == "quartic":
        return quartic()
    if kind == "figure":
        return figure()
    if kind == "custom":
        if "expr" not in block or "x_well" not in block:
            raise ConfigurationError("custom potentials need 'expr' and 'x_well'")
        return custom(block["expr"], block["x_well"], vpp=block.get("vpp"),
                      v_inf=block.get("v_inf"), x_far=block.get("x_far"))
    raise ConfigurationError(f"unknown potential kind {kind!r}")


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiagnosticsReport:
    evenness_defect: float
    positivity_defect: float
    well_value: float
    well_slope: float
    vpp_declared: float
    vpp_computed: float
    minima_distinct: bool
    nondegenerate: bool
    v_inf_estimate: float
    messages: tuple
    passed: bool

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        lines = [f"potential validation: {status}",
                 f"  evenness defect   {self.evenness_defect:.3e}",
                 f"  positivity defect {self.positivity_defect:.3e}",
                 f"  V(x_l), V'(x_l)   {self.well_value:.3e}, {self.well_slope:.3e}",
                 f"  V''(x_l)          declared {self.vpp_declared:.6g}, computed {self.vpp_computed:.6g}",
                 f"  v_inf estimate    {self.v_inf_estimate:.6g}"]
        lines += [f"  - {m}" for m in self.messages]
        return "\n".join(lines)


def validate(spec: PotentialSpec, grid, even_tol: float = 1e-12, well_tol: float = 1e-8,
             x_far: Optional[float] = None) -> DiagnosticsReport:
    """Check the double-well hypotheses on a sampled grid (report only, never raises)."""
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0 or np.any(np.diff(grid) < 0):
        raise ContractViolation("grid must be nonempty and sorted")
    msgs = []
    with np.errstate(all="ignore"):
        V = spec(grid)
        Vm = spec(-grid)
    scale = max(1.0, float(np.nanmax(np.abs(V))))
    even = float(np.nanmax(np.abs(V - Vm))) / scale
    if not even <= even_tol:
        msgs.append(f"potential is not even (defect {even:.2e})")

    xl = spec.x_left
    minima_distinct = xl < -1e-9
    if not minima_distinct:
        msgs.append("minima are not distinct (x_l must be < 0)")

    well_value = abs(float(spec.derivative(xl, 0)))
    well_slope = abs(float(spec.derivative(xl, 1)))
    vpp_comp = float(spec.derivative(xl, 2))
    if well_value > well_tol or well_slope > well_tol:
        msgs.append("x_l is not a zero of V and V'")
    nondeg = spec.vpp > well_tol and abs(spec.vpp - vpp_comp) <= well_tol * max(1.0, abs(vpp_comp))
    if not nondeg:
        msgs.append(f"degenerate or misdeclared minimum (vpp={spec.vpp}, V''(x_l)={vpp_comp})")

    away = (np.abs(grid - xl) > 1e-9) & (np.abs(grid + xl) > 1e-9)
    vmin = float(np.min(V[away])) if np.any(away) else np.inf
    positivity_defect = 0.0 if vmin > 0 else (-vmin if vmin < 0 else 1.0)
    if not vmin > 0:
        msgs.append(f"V is not positive away from the wells (min {vmin:.3e})")

    xf = spec.x_far if x_far is None else x_far
    far = np.abs(grid) >= xf
    v_inf_est = float(np.min(V[far])) if np.any(far) else float("nan")
    v_inf_ok = spec.v_inf > 0 and (not np.any(far) or v_inf_est >= spec.v_inf * (1 - 1e-12))
    if not v_inf_ok:
        msgs.append(f"V not bounded below by v_inf={spec.v_inf} for |x| >= {xf}")
    if not spec.v0 > 0:
        msgs.append("V(0) must be positive")

    passed = (even <= even_tol and minima_distinct and nondeg and vmin > 0 and v_inf_ok
              and well_value <= well_tol and well_slope <= well_tol and spec.v0 > 0)
    return DiagnosticsReport(even, positivity_defect, well_value, well_slope, spec.vpp,
                             vpp_comp, minima_distinct, nondeg, v_inf_est, tuple(msgs), passed)


# ---------------------------------------------------------------------------
# sealing
# ---------------------------------------------------------------------------

_BUMP_FLOOR = 1.0 / 700.0  # exp(-700) is below double precision relevance


def bump(t):
    """Standard bump exp(-1/(1 - t^2)) on |t| < 1, zero elsewhere (arrays or jets)."""
    if isinstance(t, Jet):
        inside = (1.0 - t.c[0] ** 2) > _BUMP_FLOOR
        tt = Jet(np.where(inside, t.c, 0.0))
        val = jets.exp(-1.0 / (1.0 - tt * tt))
        return Jet(val.c * inside)
    t = np.asarray(t, dtype=float)
    inside = (1.0 - t * t) > _BUMP_FLOOR
    ts = np.where(inside, t, 0.0)
    out = np.where(inside, np.exp(-1.0 / (1.0 - ts * ts)), 0.0)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class SealedPotential:
    """V + Sigma where Sigma is a bump closing one well.

    ``side`` names the well that is closed: ``"right"`` puts the bump at
    ``x_r`` and leaves the left-well operator, ``"left"`` is its mirror image.
    """

    base: PotentialSpec
    side: str
    eta: float
    bump_amplitude: float

    @property
    def bump_center(self) -> float:
        return self.base.x_right if self.side == "right" else self.base.x_left

    @property
    def well(self) -> float:
        """The minimum that stays open."""
        return self.base.x_left if self.side == "right" else self.base.x_right

    @property
    def tag(self) -> str:
        return f"{self.side}-sealed"

    @property
    def peak(self) -> float:
        """Sigma at the sealed well, bump_amplitude / e."""
        return self.bump_amplitude * math.exp(-1.0)

    @property
    def a(self) -> float:
        return self.base.a

    @property
    def extent(self) -> float:
        return self.base.extent

    @property
    def x_left(self) -> float:
        return self.base.x_left

    @property
    def x_right(self) -> float:
        return self.base.x_right

    def sigma(self, x):
        if isinstance(x, Jet):
            return bump((x - self.bump_center) / self.eta) * self.bump_amplitude
        return self.bump_amplitude * bump((np.asarray(x, dtype=float) - self.bump_center) / self.eta)

    def __call__(self, x):
        out = self.base(x) + self.sigma(x)
        return out if isinstance(out, Jet) or np.ndim(out) else float(out)

    def jet(self, x0, order: int) -> Jet:
        x = Jet.variable(np.asarray(x0, dtype=float), order)
        return self.base.jet(x0, order) + self.sigma(x)

    def derivative(self, x, order: int):
        if order == 0:
            return self(x)
        s = self.sigma(Jet.variable(np.asarray(x, dtype=float), order)).derivative(order)
        out = self.base.derivative(x, order) + s
        return float(out) if np.ndim(x) == 0 else out

    def reflected(self) -> "SealedPotential":
        return SealedPotential(self.base, "left" if self.side == "right" else "right",
                               self.eta, self.bump_amplitude)


def seal(spec: PotentialSpec, side: str = "right", eta: Optional[float] = None,
         amplitude: Optional[float] = None) -> SealedPotential:
    """Close one well with the bump ``amplitude * exp(-1/(1 - t^2))``, t = (x - x_w)/eta.

    Defaults: ``eta = (x_r - x_l)/8`` and ``amplitude = max(1, V(0))``.
    """
    if side not in ("left", "right"):
        raise ContractViolation(f"side must be 'left' or 'right', got {side!r}")
    eta = (spec.x_right - spec.x_left) / 8.0 if eta is None else float(eta)
    amplitude = max(1.0, spec.v0) if amplitude is None else float(amplitude)
    if not 0 < eta < spec.x_right:
        raise ContractViolation(f"eta must lie in (0, x_r) = (0, {spec.x_right}), got {eta}")
    if not amplitude > 0:
        raise ContractViolation("bump amplitude must be positive")
    return SealedPotential(spec, side, eta, amplitude)


def default_seal(spec: PotentialSpec, side: str = "right") -> SealedPotential:
    return seal(spec, side)


# ---------------------------------------------------------------------------
# quadratic model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadraticModel:
    """Harmonic approximation a^2 (x - center)^2 of a well."""

    center: float
    a: float

    @property
    def well(self) -> float:
        return self.center

    @property
    def extent(self) -> float:
        return abs(self.center)

    @property
    def tag(self) -> str:
        return "quadratic-model"

    def __call__(self, x):
        if isinstance(x, Jet):
            return (x - self.center) * (x - self.center) * self.a ** 2
        out = self.a ** 2 * (np.asarray(x, dtype=float) - self.center) ** 2
        return out if out.ndim else float(out)

    def jet(self, x0, order: int) -> Jet:
        return self(Jet.variable(np.asarray(x0, dtype=float), order))

    def derivative(self, x, order: int):
        x = np.asarray(x, dtype=float)
        if order == 0:
            return self(x)
        if order == 1:
            out = 2 * self.a ** 2 * (x - self.center)
        elif order == 2:
            out = np.full_like(x, 2 * self.a ** 2)
        else:
            out = np.zeros_like(x)
        return float(out) if out.ndim == 0 else out


def quadratic_model(spec) -> QuadraticModel:
    """Quadratic model of the left well: center x_l, a = sqrt(vpp/2)."""
    vpp = spec.vpp if isinstance(spec, PotentialSpec) else spec.base.vpp
    center = spec.x_left if isinstance(spec, PotentialSpec) else spec.well
    if not vpp > 0:
        raise ContractViolation("quadratic model needs vpp > 0")
    return QuadraticModel(center=center, a=math.sqrt(vpp / 2.0))
