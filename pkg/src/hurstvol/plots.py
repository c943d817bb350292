"""Static SVG renderings of trajectories, scatter fits and synthetic demos.

All figures are written straight to files with the Agg backend; nothing is
shown interactively.  SVG ids and metadata are pinned so repeated runs with
identical inputs produce identical numeric payloads.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from hurstvol.estimate import HurstTrajectory, acf
from hurstvol.fairvol import FitResult, model_curve, prediction_bounds

matplotlib.rcParams["svg.hashsalt"] = "hurstvol"

_SAVE_KW = {"format": "svg", "metadata": {"Date": None}}


def plot_hurst_trajectory(traj: HurstTrajectory, ci: tuple[float, float], path) -> None:
    """Exponent trajectory with the martingale confidence band around 1/2."""
    fig, ax = plt.subplots(figsize=(9, 3.2))
    ok = traj.valid()
    ax.axhspan(ci[0], ci[1], color="red", alpha=0.15, lw=0)
    ax.axhline(0.5, color="red", lw=0.8)
    ax.plot(traj.t[ok], traj.h_hat[ok], lw=0.5, color="black")
    ax.set_xlabel("t")
    ax.set_ylabel("pointwise H")
    ax.set_title(f"rolling exponent (window {traj.config.delta})")
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def plot_scatter_fit(fit: FitResult, path, level: float = 0.99,
                     max_points: int = 4000) -> None:
    """Volatility vs exponent scatter, fitted curve, prediction bounds, residuals.

    Very large samples are thinned to ``max_points`` markers to keep the SVG
    small; the curve and bounds always use the full fit.
    """
    step = max(1, len(fit.h) // max_points)
    hs, ss, rs = fit.h[::step], fit.sigma[::step], fit.residuals[::step]
    fig, (ax, axr) = plt.subplots(
        2, 1, figsize=(7, 6.5), sharex=True, height_ratios=[2.2, 1]
    )
    grid = np.linspace(fit.h.min(), fit.h.max(), 200)
    lo, hi = prediction_bounds(fit, grid, level=level)
    ax.plot(hs, ss, ".", ms=2, color="black", alpha=0.4)
    ax.plot(grid, model_curve(grid, fit.a, fit.b, fit.n_series), color="red", lw=1.2)
    ax.plot(grid, lo, ":", color="red", lw=0.9)
    ax.plot(grid, hi, ":", color="red", lw=0.9)
    ax.set_ylabel("realized volatility")
    ax.set_title(f"sigma-H fit: a={fit.a:.3e}, b={fit.b:.4f}, R2={fit.r_squared:.4f}")
    axr.plot(hs, rs, ".", ms=2, color="black", alpha=0.4)
    axr.axhline(0.0, color="red", lw=0.8)
    axr.set_xlabel("pointwise H")
    axr.set_ylabel("residual")
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def plot_series_pair(a: np.ndarray, b: np.ndarray, labels: tuple[str, str], path) -> None:
    """Two stacked return panels on a common scale (matched-volatility demo)."""
    fig, axes = plt.subplots(2, 1, figsize=(9, 4.6), sharex=True, sharey=True)
    for ax, y, lab in zip(axes, (a, b), labels):
        ax.plot(y, lw=0.4, color="black")
        ax.set_ylabel(lab)
    axes[1].set_xlabel("t")
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def plot_step_memory_demo(hpath: np.ndarray, series: np.ndarray, path,
                          max_lag: int = 40) -> None:
    """Step exponent path, trajectory, and increment ACF panels (halves + full)."""
    inc = np.diff(series)
    half = len(inc) // 2
    fig = plt.figure(figsize=(9, 7))
    gs = fig.add_gridspec(3, 3)
    ax_h = fig.add_subplot(gs[0, :])
    ax_h.plot(hpath, color="black")
    ax_h.axhline(0.5, color="red", lw=0.8, ls="--")
    ax_h.set_ylabel("H(t)")
    ax_x = fig.add_subplot(gs[1, :])
    ax_x.plot(series, lw=0.5, color="black")
    ax_x.set_ylabel("path")
    panels = [
        ("first half", inc[:half]),
        ("second half", inc[half:]),
        ("full", inc),
    ]
    for i, (lab, seg) in enumerate(panels):
        ax = fig.add_subplot(gs[2, i])
        rho = acf(seg, max_lag)
        ax.bar(np.arange(len(rho)), rho, width=0.8, color="black")
        ax.axhline(0.0, color="red", lw=0.6)
        ax.set_ylim(-0.4, 1.05)
        ax.set_title(f"increment ACF, {lab}", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
