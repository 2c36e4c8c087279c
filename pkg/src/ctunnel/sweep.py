"""Configuration-driven sweeps over (alpha, h) grids and their output files."""
from __future__ import annotations

import hashlib
import json
import logging
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from types import SimpleNamespace
from typing import Optional

import numpy as np
import scipy.linalg as sla

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - exercised on 3.10 only
    import tomli as tomllib

from .errors import ConfigurationError, ContractViolation, CtunnelError, NumericFailure
from .gap import GapReport, gap_report, rotation_analysis
from .potential import from_config, seal, validate
from .specsolve import assemble, cluster_eigenvalues, convergence_check, riesz_projector
from .wkb import wkb_eigenvalue, wkb_quasimode

log = logging.getLogger("ctunnel")

__all__ = ["RunConfig", "SweepResult", "PointResult", "load_config", "resolve_config_path",
           "run_sweep", "run_wkb", "emit_report", "validate_config", "GAP_HEADER"]

GAP_HEADER = ("alpha,h,re_mu1,im_mu1,re_mu2,im_mu2,re_gap_direct,im_gap_direct,"
              "re_gap_wronskian,im_gap_wronskian,abs_gap_pred,arg_gap_pred,ratio_direct,"
              "ratio_wronskian,arg_dev,flags")
SPECTRUM_HEADER = "alpha,h,index,re_mu,im_mu,cluster"
WRONSKIAN_HEADER = ("alpha,h,re_psi0,im_psi0,re_dpsi0,im_dpsi0,re_selfpair,im_selfpair,"
                    "re_mu_sealed,im_mu_sealed")
WKB_HEADER = "alpha,h,n,J,re_mu_wkb,im_mu_wkb,weighted_residual"

_TOP_KEYS = {"name", "alphas", "h_grid", "potential", "solver", "wkb", "outputs"}
_SOLVER_DEFAULTS = {"X": None, "n_points": 800, "scheme": "fd4", "R": 7.0, "n_contour": 32,
                    "direct": True, "agreement_tol": 0.1, "projector_check": False}
_WKB_DEFAULTS = {"n_max": 1, "J": 2, "dump": False}
_OUTPUT_DEFAULTS = {"directory": None, "plot_formats": ["svg"]}
TOOL_VERSION = "0.1.0"  # kept in step with ctunnel.__version__


def fmt(x: float) -> str:
    """17 significant digits, scientific notation."""
    return f"{float(x):.16e}"


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RunConfig:
    name: str
    potential: dict
    alphas: tuple
    h_grid: tuple
    solver: dict
    wkb: dict
    outputs: dict
    digest: str = ""

    def as_dict(self) -> dict:
        return {"name": self.name, "potential": dict(self.potential), "alphas": list(self.alphas),
                "h_grid": list(self.h_grid), "solver": dict(self.solver), "wkb": dict(self.wkb),
                "outputs": dict(self.outputs)}


def resolve_config_path(path) -> Path:
    """Return ``path`` if it exists, else a bundled config of that name."""
    p = Path(path)
    if p.exists():
        return p
    name = p.name if p.suffix == ".toml" else p.name + ".toml"
    bundled = resources.files("ctunnel") / "configs" / name
    if bundled.is_file():
        return Path(str(bundled))
    raise ConfigurationError(f"config file {path!s} not found")


def _merge(block, defaults, what):
    block = dict(block or {})
    unknown = set(block) - set(defaults)
    if unknown:
        raise ConfigurationError(f"unknown keys in [{what}]: {sorted(unknown)}")
    return {**defaults, **block}


def parse_config(data: dict, name: str = "run", digest: str = "") -> RunConfig:
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise ConfigurationError(f"unknown top-level keys: {sorted(unknown)}")
    alphas = data.get("alphas")
    hs = data.get("h_grid")
    if not isinstance(alphas, list) or not alphas:
        raise ConfigurationError("alphas must be a nonempty list")
    if not isinstance(hs, list) or not hs:
        raise ConfigurationError("h_grid must be a nonempty list")
    try:
        alphas = tuple(float(a) for a in alphas)
        hs = tuple(float(h) for h in hs)
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"alphas and h_grid must be numbers: {exc}") from exc
    if not all(-math.pi < a < math.pi for a in alphas):
        raise ConfigurationError("all alphas must lie in (-pi, pi)")
    if not all(h > 0 for h in hs):
        raise ConfigurationError("h_grid must be positive")
    if any(h2 >= h1 for h1, h2 in zip(hs, hs[1:])):
        raise ConfigurationError("h_grid must be sorted strictly descending")
    solver = _merge(data.get("solver"), _SOLVER_DEFAULTS, "solver")
    if solver["scheme"] not in ("fd4", "chebyshev"):
        raise ConfigurationError(f"unknown scheme {solver['scheme']!r}")
    if int(solver["n_points"]) < 200:
        raise ConfigurationError("solver.n_points must be >= 200")
    wkbb = _merge(data.get("wkb"), _WKB_DEFAULTS, "wkb")
    if int(wkbb["n_max"]) < 1 or int(wkbb["J"]) < 1:
        raise ConfigurationError("wkb.n_max and wkb.J must be >= 1")
    outputs = _merge(data.get("outputs"), _OUTPUT_DEFAULTS, "outputs")
    pot = dict(data.get("potential") or {"kind": "quartic"})
    from_config(pot)  # raises ConfigurationError on bad descriptors
    return RunConfig(name=str(data.get("name", name)), potential=pot, alphas=alphas, h_grid=hs,
                     solver=solver, wkb=wkbb, outputs=outputs, digest=digest)


def load_config(path) -> RunConfig:
    p = resolve_config_path(path)
    raw = p.read_bytes()
    try:
        data = tomllib.loads(raw.decode("utf-8"))
    except (tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
        raise ConfigurationError(f"cannot parse {p}: {exc}") from exc
    return parse_config(data, p.stem, hashlib.sha256(raw).hexdigest())


def _spec_and_seal(config: RunConfig):
    spec = from_config(config.potential)
    sealed = seal(spec, "right", config.potential.get("seal_eta"),
                  config.potential.get("seal_amplitude"))
    return spec, sealed


def validate_config(config: RunConfig):
    """Potential diagnostics on a sampling grid; returns the report."""
    spec, _ = _spec_and_seal(config)
    X = config.solver["X"] or 3.0 * spec.extent
    grid = np.linspace(-X, X, 4001)
    grid = np.union1d(grid, [spec.x_left, spec.x_right])
    return validate(spec, grid)


# ---------------------------------------------------------------------------
# per-point work
# ---------------------------------------------------------------------------

@dataclass
class PointResult:
    alpha: float
    h: float
    report: Optional[GapReport]
    spectrum: list
    clusters: list
    flags: tuple
    wkb_rows: list = field(default_factory=list)
    wkb_dumps: list = field(default_factory=list)


def _run_point(cfg: dict, alpha: float, h: float, dump_wkb: bool) -> PointResult:
    config = parse_config(cfg, cfg.get("name", "run"))
    spec, sealed = _spec_and_seal(config)
    s = config.solver
    flags = []
    spectrum, clusters, report = [], [], None
    try:
        op = assemble(spec, alpha, h, s["X"], int(s["n_points"]), s["scheme"])
        vals = sla.eigvals(op.matrix, check_finite=False)
        keep = [i for i in range(len(vals)) if abs(vals[i]) < s["R"] * h]
        keep.sort(key=lambda i: (abs(vals[i]), np.angle(vals[i])))
        spectrum = [complex(vals[i]) for i in keep]
        clusters = cluster_eigenvalues(SimpleNamespace(eigenvalues=np.array(spectrum)), h, spec.a)
        report = gap_report(spec, alpha, h, config.potential.get("seal_eta"),
                            config.potential.get("seal_amplitude"), s["X"], int(s["n_points"]),
                            s["scheme"], bool(s["direct"]), float(s["agreement_tol"]),
                            operator=op, eigenvalues=vals)
        flags.extend(report.flags)
    except (NumericFailure, ArithmeticError) as exc:
        flags.append(f"failed:{type(exc).__name__}")
        log.warning("point alpha=%g h=%g failed: %s", alpha, h, exc)
    rows, dumps = _wkb_point(config, sealed, alpha, h, dump_wkb)
    return PointResult(alpha=alpha, h=h, report=report, spectrum=spectrum, clusters=clusters,
                       flags=tuple(flags), wkb_rows=rows, wkb_dumps=dumps)


def _wkb_point(config: RunConfig, sealed, alpha, h, dump):
    J = int(config.wkb["J"])
    rows, dumps = [], []
    x0 = sealed.well
    K = (x0 - 0.8 * abs(x0), 0.5 * abs(x0))
    dx = min(h / 40.0, 2.5e-3)
    fine = np.arange(K[0] - 3 * dx, K[1] + 3 * dx, dx)
    for n in range(1, int(config.wkb["n_max"]) + 1):
        try:
            mus = wkb_eigenvalue(sealed, alpha, n, J)
            mu = sum(m * h ** (k + 1) for k, m in enumerate(mus))
            res = wkb_quasimode(sealed, alpha, h, n, J, grid=fine, K=K).weighted_residual
        except (NumericFailure, ArithmeticError, ContractViolation) as exc:
            log.warning("WKB n=%d alpha=%g h=%g failed: %s", n, alpha, h, exc)
            mu, res = complex(math.nan, math.nan), math.nan
        rows.append((alpha, h, n, J, complex(mu), res))
        if dump:
            X = config.solver["X"] or 3.0 * sealed.extent
            grid = np.linspace(-X, X, 2001)
            e = wkb_quasimode(sealed, alpha, h, n, J, grid=grid)
            dumps.append((n, grid, e.quasimode, e.phase))
    return rows, dumps


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

@dataclass
class SweepResult:
    config: RunConfig
    points: list
    provenance: dict

    @property
    def failed(self) -> bool:
        return any(any(f.startswith("failed") for f in p.flags) for p in self.points)


def _pre_checks(config: RunConfig, spec, alpha):
    s = config.solver
    h = config.h_grid[0]
    n = int(s["n_points"])
    info = {"alpha": alpha, "h": h}
    ladder = [(s["X"] or 3.0 * spec.extent, max(200, n // 2)), (s["X"] or 3.0 * spec.extent, n),
              (s["X"] or 3.0 * spec.extent, 2 * n)]
    rep = convergence_check(spec, alpha, h, ladder, s["scheme"], dense_limit=n)
    info["convergence"] = {"values": [[v.real, v.imag] for v in rep.values],
                           "diffs": list(rep.diffs), "error_estimate": rep.error_estimate}
    if s["projector_check"]:
        op = assemble(spec, alpha, h, s["X"], n, s["scheme"])
        P = riesz_projector(op, spec.a * h * np.exp(0.5j * alpha), 0.5 * spec.a * h,
                            int(s["n_contour"]))
        info["projector_rank"] = P.numeric_rank
        info["idempotency_defect"] = P.idempotency_defect
    return info


def run_sweep(config: RunConfig, jobs: int = 1, dump_wkb: bool = False) -> SweepResult:
    """Validation, convergence check per alpha, then the full (alpha, h) grid."""
    t0 = time.perf_counter()
    report = validate_config(config)
    if not report.passed:
        raise ConfigurationError("potential failed validation: " + "; ".join(report.messages))
    spec, _ = _spec_and_seal(config)
    dump = bool(dump_wkb or config.wkb["dump"])
    checks = [_pre_checks(config, spec, a) for a in config.alphas]
    tasks = [(a, h) for a in config.alphas for h in config.h_grid]
    cfg = config.as_dict()
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_run_point, cfg, a, h, dump) for a, h in tasks]
            points = [f.result() for f in futures]
    else:
        points = [_run_point(cfg, a, h, dump) for a, h in tasks]
    prov = {"config_name": config.name, "config_sha256": config.digest,
            "tool_version": TOOL_VERSION, "python": sys.version.split()[0],
            "numpy": np.__version__, "jobs": int(jobs), "checks": checks,
            "wall_time_s": time.perf_counter() - t0}
    return SweepResult(config=config, points=points, provenance=prov)


def run_wkb(config: RunConfig, dump_wkb: bool = False) -> SweepResult:
    """WKB-only pipeline: eigenvalue coefficients and residuals per (alpha, h, n)."""
    t0 = time.perf_counter()
    report = validate_config(config)
    if not report.passed:
        raise ConfigurationError("potential failed validation: " + "; ".join(report.messages))
    _, sealed = _spec_and_seal(config)
    dump = bool(dump_wkb or config.wkb["dump"])
    points = []
    for a in config.alphas:
        for h in config.h_grid:
            rows, dumps = _wkb_point(config, sealed, a, h, dump)
            points.append(PointResult(alpha=a, h=h, report=None, spectrum=[], clusters=[],
                                      flags=(), wkb_rows=rows, wkb_dumps=dumps))
    prov = {"config_name": config.name, "config_sha256": config.digest,
            "tool_version": TOOL_VERSION, "wall_time_s": time.perf_counter() - t0}
    return SweepResult(config=config, points=points, provenance=prov)


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def output_dir(config: RunConfig) -> Path:
    env = os.environ.get("CTUNNEL_OUT")
    if env:
        return Path(env)
    if config.outputs.get("directory"):
        return Path(config.outputs["directory"])
    return Path("ctunnel_out") / config.name


def _gap_row(p: PointResult) -> str:
    nan = math.nan
    r = p.report
    if r is None:
        vals = [p.alpha, p.h] + [nan] * 13
    else:
        pred = r.gap_asymptotic
        vals = [r.alpha, r.h, r.mu1.real, r.mu1.imag, r.mu2.real, r.mu2.imag,
                r.gap_direct.real, r.gap_direct.imag, r.gap_wronskian.real, r.gap_wronskian.imag,
                abs(pred), float(np.angle(pred)), r.ratio_direct, r.ratio_wronskian, r.arg_dev]
    return ",".join(fmt(v) for v in vals) + "," + ";".join(p.flags)


def _write(path: Path, header: str, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(row + "\n")


def emit_report(result: SweepResult, outdir: Path, verbose: bool = False,
                plot_formats=None) -> list:
    """Write CSV tables, plots and provenance; returns the written paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    pts = result.points
    if any(p.report is not None or p.flags for p in pts):
        path = outdir / "gap.csv"
        _write(path, GAP_HEADER, (_gap_row(p) for p in pts))
        written.append(path)
        srows = []
        for p in pts:
            cl_of = {i: k for k, cl in enumerate(p.clusters) for i in cl}
            for i, mu in enumerate(p.spectrum):
                srows.append(",".join([fmt(p.alpha), fmt(p.h), str(i), fmt(mu.real),
                                       fmt(mu.imag), str(cl_of.get(i, -1))]))
        path = outdir / "spectrum.csv"
        _write(path, SPECTRUM_HEADER, srows)
        written.append(path)
        if verbose:
            wrows = []
            for p in pts:
                d = p.report.wronskian_data if p.report is not None else None
                if d is None:
                    continue
                wrows.append(",".join(fmt(v) for v in (p.alpha, p.h, d.psi0.real, d.psi0.imag,
                                                       d.dpsi0.real, d.dpsi0.imag, d.selfpair.real,
                                                       d.selfpair.imag, d.mu.real, d.mu.imag)))
            path = outdir / "wronskian.csv"
            _write(path, WRONSKIAN_HEADER, wrows)
            written.append(path)
    wrows = [",".join([fmt(a), fmt(h), str(n), str(J), fmt(mu.real), fmt(mu.imag), fmt(res)])
             for p in pts for (a, h, n, J, mu, res) in p.wkb_rows]
    if wrows:
        path = outdir / "wkb.csv"
        _write(path, WKB_HEADER, wrows)
        written.append(path)
    for ia, a in enumerate(result.config.alphas):
        for ih, h in enumerate(result.config.h_grid):
            p = next(q for q in pts if q.alpha == a and q.h == h)
            for n, grid, psi, phi in p.wkb_dumps:
                path = outdir / f"wkb_a{ia}_h{ih}_n{n}.csv"
                _write(path, "x,re_psi,im_psi,re_phi,im_phi",
                       (",".join(fmt(v) for v in (x, q.real, q.imag, f.real, f.imag))
                        for x, q, f in zip(grid, psi, phi)))
                written.append(path)
    formats = plot_formats if plot_formats is not None else result.config.outputs["plot_formats"]
    if formats and any(p.report is not None for p in pts):
        from .plots import plot_sweep
        written += plot_sweep(result, outdir, formats)
    path = outdir / "provenance.json"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(result.provenance, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")
    written.append(path)
    return written


def rotation_summary(result: SweepResult) -> dict:
    """|c1| per alpha where the grid allows a rotation fit."""
    out = {}
    for a in result.config.alphas:
        reps = [p.report for p in result.points if p.alpha == a and p.report is not None
                and np.isfinite(p.report.gap_wronskian)]
        if len(reps) >= 5:
            try:
                out[a] = rotation_analysis(reps).c1
            except CtunnelError as exc:
                log.warning("rotation fit at alpha=%g skipped: %s", a, exc)
    return out
