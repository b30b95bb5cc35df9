"""Anchor-placement variance sweeps: per-target CRLB with an optimized
fourth anchor, either ground-level or airborne.

The sweep discretizes the area into boxes, and for each box target
exhaustively minimizes the total estimation variance over a candidate grid
of fourth-anchor positions.  The inner loop is fully vectorized over
candidates (batched 3x3 inversions), which keeps a 60x60 sweep under the
minute mark single-process.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channel import SPEED_OF_LIGHT
from .geometry import Point3
from .localization import LocalizationSetting
from .scenario import ScenarioConfig, UE_HEIGHT_RANGE

GROUND_ANCHOR_ALTITUDE = 30.0
UAV_ANCHOR_ALTITUDE = 200.0
MODES = ("ground", "uav")


def _mixture_gain_factor(theta_deg: np.ndarray, env) -> np.ndarray:
    p = 1.0 / (1.0 + env.e1 * np.exp(-env.e2 * (theta_deg - env.e1)))
    return p + (1.0 - p) * env.kappa


def _sigma_sq_ground(d: np.ndarray, setting: LocalizationSetting) -> np.ndarray:
    env, b = setting.env, setting.bs_budget
    snr = env.f_inv / (env.gamma0 * d ** env.beta) * b.tx_power / (
        b.bandwidth * env.n0)
    return setting.noise.psi / snr + setting.noise.sigma_nlos_sq


def _sigma_sq_air(d: np.ndarray, theta_deg: np.ndarray,
                  setting: LocalizationSetting) -> np.ndarray:
    env, b = setting.env, setting.uav_budget
    gain = _mixture_gain_factor(theta_deg, env) / (env.gamma0 * d ** env.alpha)
    snr = gain * b.tx_power / (b.bandwidth * env.n0)
    return setting.noise.psi / snr


def crlb_batch(target: Point3, bs: Sequence[Point3], anchors_xy: np.ndarray,
               anchor_alt: float, mode: str,
               setting: LocalizationSetting) -> tuple[np.ndarray, np.ndarray]:
    """(horiz_var, vert_var) arrays over a batch of fourth-anchor positions.

    ``anchors_xy`` has shape (M, 2); singular geometries yield inf entries.
    """
    m = target.as_array()
    q_bs = []
    s_bs = []
    for b in bs:
        v = b.as_array() - m
        d = np.linalg.norm(v)
        q_bs.append(v / d)
        s_bs.append(float(_sigma_sq_ground(np.array(d), setting)))
    q1, q2, q3 = q_bs
    s1, s2, s3 = s_bs

    M = len(anchors_xy)
    va = np.column_stack([anchors_xy[:, 0] - m[0], anchors_xy[:, 1] - m[1],
                          np.full(M, anchor_alt - m[2])])
    da = np.linalg.norm(va, axis=1)
    ok = da > 0.0
    da_safe = np.where(ok, da, 1.0)
    qa = va / da_safe[:, None]
    if mode == "ground":
        s4 = _sigma_sq_ground(da_safe, setting)
    elif mode == "uav":
        theta = np.degrees(np.arcsin(
            np.clip(np.abs(va[:, 2]) / da_safe, 0.0, 1.0)))
        s4 = _sigma_sq_air(da_safe, theta, setting)
    else:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")

    H = np.empty((M, 3, 3))
    H[:, 0, :] = q2 - q1
    H[:, 1, :] = q3 - q1
    H[:, 2, :] = qa - q1

    c2 = SPEED_OF_LIGHT ** 2
    R = np.empty((M, 3, 3))
    R[:, :, :] = c2 * s1
    R[:, 0, 0] = c2 * (s1 + s2)
    R[:, 1, 1] = c2 * (s1 + s3)
    R[:, 2, 2] = c2 * (s1 + s4)

    horiz = np.full(M, np.inf)
    vert = np.full(M, np.inf)
    det_H = np.linalg.det(H)
    good = ok & (np.abs(det_H) > 1e-12)
    if good.any():
        Hg, Rg = H[good], R[good]
        F = np.einsum("mji,mjk,mkl->mil", Hg, np.linalg.inv(Rg), Hg)
        C = np.linalg.inv(F)
        horiz[good] = C[:, 0, 0] + C[:, 1, 1]
        vert[good] = C[:, 2, 2]
    return horiz, vert


def candidate_grid(area, spacing: float = 20.0) -> np.ndarray:
    xs = np.arange(area.x_min, area.x_max + 0.5 * spacing, spacing)
    ys = np.arange(area.y_min, area.y_max + 0.5 * spacing, spacing)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    return np.column_stack([gx.ravel(), gy.ravel()])


def optimize_fourth_anchor(target: Point3, bs: Sequence[Point3],
                           candidates: np.ndarray, mode: str,
                           setting: LocalizationSetting,
                           anchor_alt: float | None = None,
                           ) -> tuple[Point3 | None, float, float]:
    """Exhaustively minimize the total variance over candidate positions.

    Returns (best position, horiz_var, vert_var) at the argmin of the total;
    (None, inf, inf) when every candidate geometry is singular.
    """
    if len(candidates) == 0:
        raise ValueError("empty candidate set")
    if anchor_alt is None:
        anchor_alt = (GROUND_ANCHOR_ALTITUDE if mode == "ground"
                      else UAV_ANCHOR_ALTITUDE)
    horiz, vert = crlb_batch(target, bs, candidates, anchor_alt, mode, setting)
    total = horiz + vert
    i = int(np.argmin(total))
    if not np.isfinite(total[i]):
        return None, math.inf, math.inf
    best = Point3(float(candidates[i, 0]), float(candidates[i, 1]), anchor_alt)
    return best, float(horiz[i]), float(vert[i])


@dataclass
class HeatmapResult:
    """Optimized-variance maps over the target boxes, one layer per mode."""

    xs: np.ndarray            # box-center x coordinates
    ys: np.ndarray            # box-center y coordinates
    horiz: dict               # mode -> (len(xs), len(ys)) array
    vert: dict                # mode -> same shape

    def ranges(self, mode: str) -> tuple[float, float, float, float]:
        """(horiz_min, horiz_max, vert_min, vert_max), ignoring singular."""
        h = self.horiz[mode][np.isfinite(self.horiz[mode])]
        v = self.vert[mode][np.isfinite(self.vert[mode])]
        return float(h.min()), float(h.max()), float(v.min()), float(v.max())

    def mean_reduction(self) -> tuple[float, float]:
        """Mean fractional (horiz, vert) variance reduction of uav vs ground."""
        hg, hu = self.horiz["ground"], self.horiz["uav"]
        vg, vu = self.vert["ground"], self.vert["uav"]
        ok = np.isfinite(hg) & np.isfinite(hu) & np.isfinite(vg) & np.isfinite(vu)
        return (float(np.mean(1.0 - hu[ok] / hg[ok])),
                float(np.mean(1.0 - vu[ok] / vg[ok])))


def run_heatmap(cfg: ScenarioConfig, box_width: float = 10.0,
                candidate_spacing: float = 20.0,
                modes: Sequence[str] = MODES,
                target_height_range=UE_HEIGHT_RANGE) -> HeatmapResult:
    """Sweep box centers of the area, optimizing the fourth anchor per box.

    Target heights are drawn uniformly from ``target_height_range`` with the
    scenario seed, one draw per box.
    """
    area = cfg.area
    xs = np.arange(area.x_min + 0.5 * box_width, area.x_max, box_width)
    ys = np.arange(area.y_min + 0.5 * box_width, area.y_max, box_width)
    cands = candidate_grid(area, candidate_spacing)
    rng = np.random.default_rng(cfg.seed)
    heights = rng.uniform(*target_height_range, size=(len(xs), len(ys)))
    setting = cfg.setting
    horiz = {m: np.empty((len(xs), len(ys))) for m in modes}
    vert = {m: np.empty((len(xs), len(ys))) for m in modes}
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            target = Point3(float(x), float(y), float(heights[i, j]))
            for mode in modes:
                _, h, v = optimize_fourth_anchor(target, cfg.bs, cands, mode,
                                                 setting)
                horiz[mode][i, j] = h
                vert[mode][i, j] = v
    return HeatmapResult(xs, ys, horiz, vert)


def write_heatmap_csv(result: HeatmapResult, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "y", "mode", "horiz_var", "vert_var"])
        for mode in sorted(result.horiz):
            for i, x in enumerate(result.xs):
                for j, y in enumerate(result.ys):
                    w.writerow([f"{x:.3f}", f"{y:.3f}", mode,
                                f"{result.horiz[mode][i, j]:.10g}",
                                f"{result.vert[mode][i, j]:.10g}"])


def nlos_reduction(cfg: ScenarioConfig, sigma_nlos_sq: float,
                   n_targets: int = 10, n_seeds: int = 10,
                   candidate_spacing: float = 20.0) -> tuple[float, float]:
    """Mean (horiz, vert) variance reduction of the airborne fourth anchor.

    Averaged over random targets and seeds at the given ground NLoS excess
    variance.
    """
    from dataclasses import replace
    cfg = replace(cfg, sigma_nlos_sq=sigma_nlos_sq)
    setting = cfg.setting
    cands = candidate_grid(cfg.area, candidate_spacing)
    h_red, v_red = [], []
    for s in range(n_seeds):
        rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, s]))
        for _ in range(n_targets):
            target = Point3(float(rng.uniform(cfg.area.x_min, cfg.area.x_max)),
                            float(rng.uniform(cfg.area.y_min, cfg.area.y_max)),
                            float(rng.uniform(*UE_HEIGHT_RANGE)))
            _, hg, vg = optimize_fourth_anchor(target, cfg.bs, cands, "ground",
                                               setting)
            _, hu, vu = optimize_fourth_anchor(target, cfg.bs, cands, "uav",
                                               setting)
            if all(map(math.isfinite, (hg, vg, hu, vu))):
                h_red.append(1.0 - hu / hg)
                v_red.append(1.0 - vu / vg)
    return float(np.mean(h_red)), float(np.mean(v_red))
