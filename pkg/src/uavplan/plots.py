"""Optional figure rendering for heatmaps, feasible regions and plans.

All figures are written straight to files with the non-interactive Agg
backend; nothing here affects the numerical outputs.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .heatmap import HeatmapResult
from .regions import CommRegion
from .scenario import ScenarioConfig


def _finite_or_nan(a: np.ndarray) -> np.ndarray:
    return np.where(np.isfinite(a), a, np.nan)


def plot_heatmap(result: HeatmapResult, path) -> None:
    """2x2 panel: horizontal/vertical variance for ground and airborne modes."""
    fig, axes = plt.subplots(2, 2, figsize=(10, 8), constrained_layout=True)
    panels = [("ground", "horiz"), ("uav", "horiz"),
              ("ground", "vert"), ("uav", "vert")]
    for ax, (mode, comp) in zip(axes.ravel(), panels):
        data = result.horiz[mode] if comp == "horiz" else result.vert[mode]
        im = ax.pcolormesh(result.xs, result.ys, _finite_or_nan(data).T,
                           shading="nearest", cmap="viridis")
        ax.set_title(f"{comp} variance, {mode} fourth anchor")
        ax.set_xlabel("x (m)")
        ax.set_ylabel("y (m)")
        ax.set_aspect("equal")
        fig.colorbar(im, ax=ax, label="variance (m$^2$)")
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_regions(cfg: ScenarioConfig, regions, path, plan=None) -> None:
    """Feasible disks and ellipses over the deployment area.

    ``plan`` positions, when given, are overlaid as crosses.
    """
    fig, ax = plt.subplots(figsize=(8, 8), constrained_layout=True)
    for region in regions:
        if isinstance(region, CommRegion):
            t = np.linspace(0.0, 2.0 * np.pi, 128)
            ax.plot(region.center[0] + region.radius * np.cos(t),
                    region.center[1] + region.radius * np.sin(t),
                    color="tab:blue", lw=1.0)
        else:
            b = region.ellipse.boundary_points(128)
            ax.plot(b[:, 0], b[:, 1], color="tab:red", lw=1.0)
    ax.scatter([b.x for b in cfg.bs], [b.y for b in cfg.bs],
               marker="^", color="black", label="BS", zorder=5)
    ax.scatter([u.position.x for u in cfg.ues],
               [u.position.y for u in cfg.ues],
               marker="o", s=12, color="tab:green", label="UE", zorder=5)
    if plan is not None and plan.positions:
        ax.scatter([p.x for p in plan.positions],
                   [p.y for p in plan.positions],
                   marker="x", s=60, color="tab:purple", label="UAV", zorder=6)
    ax.set_xlim(cfg.area.x_min, cfg.area.x_max)
    ax.set_ylim(cfg.area.y_min, cfg.area.y_max)
    ax.set_aspect("equal")
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    ax.legend(loc="upper right")
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_bench(result, path) -> None:
    """Mean UAV count vs number of users, one line per solver."""
    means = result.mean_counts()
    solvers = sorted({s for _, s in means})
    fig, ax = plt.subplots(figsize=(7, 5), constrained_layout=True)
    for solver in solvers:
        ks = sorted(k for k, s in means if s == solver)
        ax.plot(ks, [means[(k, solver)] for k in ks], marker="o", label=solver)
    ax.set_xlabel("number of users K")
    ax.set_ylabel("mean UAV count")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.savefig(path, dpi=150)
    plt.close(fig)
