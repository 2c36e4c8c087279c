"""Vector plots for a sweep (conveniences; the CSV tables are the record)."""
from __future__ import annotations

from pathlib import Path

import numpy as np

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .errors import CtunnelError  # noqa: E402
from .gap import rotation_analysis  # noqa: E402
from .potential import from_config  # noqa: E402

# C in the localization disks D(nu_n(ah), C h^{3/2}) drawn on the eigenvalue cloud
DISK_C = 1.0


def _save(fig, outdir: Path, stem: str, formats) -> list:
    paths = []
    with matplotlib.rc_context({"svg.hashsalt": "ctunnel"}):
        for fmt in formats:
            path = outdir / f"{stem}.{fmt}"
            meta = {"Date": None} if fmt in ("svg", "pdf") else None
            fig.savefig(path, format=fmt, metadata=meta)
            paths.append(path)
    plt.close(fig)
    return paths


def plot_sweep(result, outdir, formats) -> list:
    outdir = Path(outdir)
    written = []
    pts = [p for p in result.points if p.report is not None]
    alphas = result.config.alphas

    fig, ax = plt.subplots(figsize=(6, 4))
    for a in alphas:
        reps = [p.report for p in pts if p.alpha == a]
        inv_h = np.array([1 / r.h for r in reps])
        gw = np.array([abs(r.gap_wronskian) for r in reps])
        gd = np.array([abs(r.gap_direct) for r in reps])
        gp = np.array([abs(r.gap_asymptotic) for r in reps])
        ax.semilogy(inv_h, gw, "o-", label=f"Wronskian, alpha={a:.3g}")
        ok = np.array(["under_resolved" not in r.flags for r in reps]) & np.isfinite(gd)
        if ok.any():
            ax.semilogy(inv_h[ok], gd[ok], "x", label=f"direct, alpha={a:.3g}")
        ax.semilogy(inv_h, gp, "--", color="gray")
    ax.set_xlabel("1/h")
    ax.set_ylabel("|mu_2 - mu_1|")
    ax.legend(fontsize=7)
    written += _save(fig, outdir, "gap_vs_inv_h", formats)

    fig, ax = plt.subplots(figsize=(6, 4))
    drew = False
    for a in alphas:
        reps = [p.report for p in pts if p.alpha == a and np.isfinite(p.report.gap_wronskian)]
        if len(reps) < 5:
            continue
        try:
            fit = rotation_analysis(reps)
        except CtunnelError:
            continue
        ax.plot(fit.inv_h, fit.unwrapped, "o", label=f"alpha={a:.3g}")
        ax.plot(fit.inv_h, fit.c0 + fit.c1 * fit.inv_h, "-", label=f"slope {fit.c1:.4f}")
        drew = True
    ax.set_xlabel("1/h")
    ax.set_ylabel("unwrapped arg(gap)")
    if drew:
        ax.legend(fontsize=7)
    written += _save(fig, outdir, "arg_vs_inv_h", formats)

    fig, ax = plt.subplots(figsize=(5, 5))
    for p in result.points:
        if not p.spectrum:
            continue
        mus = np.array(p.spectrum)
        ax.plot(mus.real, mus.imag, ".", ms=4)
    a = from_config(result.config.potential).a
    t = np.linspace(0, 2 * np.pi, 100)
    for p in result.points:
        for n in range(1, 4):
            nu = (2 * n - 1) * a * p.h * np.exp(0.5j * p.alpha)
            r = DISK_C * p.h ** 1.5
            ax.plot(nu.real + r * np.cos(t), nu.imag + r * np.sin(t), "-", lw=0.5, color="gray")
    ax.set_xlabel("Re mu")
    ax.set_ylabel("Im mu")
    ax.set_aspect("equal", adjustable="datalim")
    written += _save(fig, outdir, "eigenvalue_cloud", formats)
    return written
