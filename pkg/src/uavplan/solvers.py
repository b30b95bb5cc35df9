"""Region construction, grid incidence and minimum hitting set solvers.

The deployment pipeline is: build per-UE regions, discretize the area into
candidate points, compute point-region incidence, then pick a minimum (or
near-minimum) set of points hitting every region.  Incidence membership is
held as per-point bitmasks over region indices, which keeps the greedy and
branch-and-bound inner loops cheap.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (CommInfeasibleError, GridTooCoarseError,
                     InvalidThresholdError, ScenarioInfeasibleError)
from .geometry import Point3
from .localization import opt_d, opt_d1
from .channel import g2a_rate, g2g_rate
from .regions import (CommRegion, LocalizationRegion, bs_covers,
                      choose_epsilon, comm_region_uav, feasibility_range,
                      localization_region)
from .scenario import ScenarioConfig


# --- region set ------------------------------------------------------------

@dataclass(frozen=True)
class RegionSet:
    """All regions a UAV placement must hit, plus BS-served bookkeeping."""

    regions: tuple          # CommRegion | LocalizationRegion, hit targets
    served_by_bs: frozenset  # UE indices whose rate demand a BS already meets
    epsilons: tuple          # resolved epsilon per UE index


def resolve_epsilon(cfg: ScenarioConfig, ue_index: int) -> float:
    """Absolute accuracy threshold for one UE, validating feasibility."""
    spec = cfg.ues[ue_index]
    setting = cfg.setting
    if spec.epsilon_fraction is not None:
        return choose_epsilon(spec.position, cfg.bs, setting,
                              spec.epsilon_fraction)
    eps = spec.epsilon
    from .regions import alpha_coefficients
    a = alpha_coefficients(spec.position, cfg.bs, setting)
    case = 1 if a.c2 >= 0.0 else 2
    eps_max = feasibility_range(spec.position, cfg.bs, setting, case)
    if not 0.0 < eps <= eps_max:
        raise InvalidThresholdError(
            f"UE {ue_index}: epsilon {eps} outside (0, {eps_max:.4g}]")
    return eps


def build_region_set(cfg: ScenarioConfig) -> RegionSet:
    """Construct localization ellipses and residual communication disks.

    UEs whose rate demand a BS already meets contribute no disk.  Any
    infeasible UE aborts with a ScenarioInfeasibleError carrying one
    diagnostic per failing UE.
    """
    regions = []
    served = set()
    epsilons = []
    diagnostics = []
    for k, spec in enumerate(cfg.ues):
        try:
            eps = resolve_epsilon(cfg, k)
            epsilons.append(eps)
            regions.append(localization_region(
                spec.position, cfg.bs, cfg.setting, eps, cfg.h_f, ue_index=k))
            if any(bs_covers(spec.position, b, spec.rate_threshold,
                             cfg.ue_budget, cfg.env) for b in cfg.bs):
                served.add(k)
            else:
                regions.append(comm_region_uav(
                    spec.position, spec.rate_threshold, cfg.ue_budget,
                    cfg.env, cfg.h_f, ue_index=k))
        except (InvalidThresholdError, CommInfeasibleError) as exc:
            epsilons.append(math.nan)
            diagnostics.append(f"UE {k}: {exc}")
    if diagnostics:
        raise ScenarioInfeasibleError(diagnostics)
    return RegionSet(tuple(regions), frozenset(served), tuple(epsilons))


# --- candidate grid and incidence -----------------------------------------

@dataclass(frozen=True)
class CandidateGrid:
    """Regular grid of candidate hovering points at the flight altitude."""

    spacing: float
    altitude: float
    xs: np.ndarray
    ys: np.ndarray

    @property
    def points_xy(self) -> np.ndarray:
        gx, gy = np.meshgrid(self.xs, self.ys, indexing="ij")
        return np.column_stack([gx.ravel(), gy.ravel()])

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.xs), len(self.ys)


def make_grid(cfg: ScenarioConfig) -> CandidateGrid:
    area, s = cfg.area, cfg.grid_spacing
    xs = np.arange(area.x_min, area.x_max + 0.5 * s, s)
    ys = np.arange(area.y_min, area.y_max + 0.5 * s, s)
    return CandidateGrid(s, cfg.h_f, xs, ys)


@dataclass
class RegionIncidence:
    """Bipartite membership between candidate points and regions.

    ``masks[i]`` is a bitmask over region indices containing point i; only
    points with nonzero depth are kept.
    """

    points_xy: np.ndarray            # (L, 2), zero-depth points pruned
    masks: list[int]
    n_regions: int
    regions: tuple
    altitude: float

    @property
    def full_mask(self) -> int:
        return (1 << self.n_regions) - 1

    def depths(self, remaining: int | None = None) -> np.ndarray:
        rem = self.full_mask if remaining is None else remaining
        return np.array([bin(m & rem).count("1") for m in self.masks])

    def point(self, i: int) -> Point3:
        return Point3(float(self.points_xy[i, 0]), float(self.points_xy[i, 1]),
                      self.altitude)


def build_incidence(grid: CandidateGrid, region_set: RegionSet,
                    keep_all_points: bool = False) -> RegionIncidence:
    """Membership structure between grid points and regions.

    Zero-depth points are pruned unless ``keep_all_points`` (the spiral
    heuristic needs the full traversal order).  A region containing no grid
    point raises GridTooCoarseError.
    """
    pts = grid.points_xy
    regions = region_set.regions
    masks = np.zeros(len(pts), dtype=object)
    for j, region in enumerate(regions):
        inside = region.contains_xy(pts[:, 0], pts[:, 1])
        if not inside.any():
            kind = "disk" if isinstance(region, CommRegion) else "ellipse"
            raise GridTooCoarseError(
                f"{kind} region of UE {region.ue_index} contains no grid "
                f"point at spacing {grid.spacing}")
        masks[inside] |= 1 << j
    keep = np.ones(len(pts), bool) if keep_all_points else masks != 0
    return RegionIncidence(points_xy=pts[keep],
                           masks=[int(m) for m in masks[keep]],
                           n_regions=len(regions), regions=regions,
                           altitude=grid.altitude)


# --- plans -----------------------------------------------------------------

@dataclass
class DeploymentPlan:
    positions: list[Point3]
    solver: str
    seed: int = 0
    runtime_s: float = 0.0
    optimal: bool | None = None
    per_ue: list[dict] = field(default_factory=list)
    valid: bool | None = None

    @property
    def count(self) -> int:
        return len(self.positions)

    def to_dict(self, include_runtime: bool = False) -> dict:
        # runtimes are excluded by default so identical seeds yield
        # byte-identical plan files
        d = {
            "schema_version": 1,
            "solver": self.solver,
            "seed": self.seed,
            "uav_count": self.count,
            "optimal": self.optimal,
            "valid": self.valid,
            "positions": [[p.x, p.y, p.h] for p in self.positions],
            "per_ue": self.per_ue,
        }
        if include_runtime:
            d["runtime_s"] = round(self.runtime_s, 6)
        return d

    def to_json(self, include_runtime: bool = False) -> str:
        return json.dumps(self.to_dict(include_runtime), sort_keys=True,
                          indent=2)


def _plan_from_indices(inc: RegionIncidence, chosen: Sequence[int], solver: str,
                       seed: int = 0, runtime: float = 0.0,
                       optimal: bool | None = None) -> DeploymentPlan:
    return DeploymentPlan(positions=[inc.point(i) for i in sorted(chosen)],
                          solver=solver, seed=seed, runtime_s=runtime,
                          optimal=optimal)


def _assert_hits_all(inc: RegionIncidence, chosen: Sequence[int],
                     remaining: int | None = None) -> None:
    rem = inc.full_mask if remaining is None else remaining
    hit = 0
    for i in chosen:
        hit |= inc.masks[i]
    if hit & rem != rem:
        raise AssertionError("plan does not hit every region")


# --- depth-first greedy ----------------------------------------------------

def _df_indices(masks: list[int], remaining: int,
                rng: np.random.Generator | None = None) -> list[int]:
    chosen = []
    while remaining:
        best_depth = 0
        ties = []
        for i, m in enumerate(masks):
            d = bin(m & remaining).count("1")
            if d > best_depth:
                best_depth, ties = d, [i]
            elif d == best_depth and d > 0:
                ties.append(i)
        if best_depth == 0:
            raise GridTooCoarseError("uncoverable region left in incidence")
        pick = ties[0] if rng is None else ties[int(rng.integers(len(ties)))]
        chosen.append(pick)
        remaining &= ~masks[pick]
    return chosen


def solve_df(inc: RegionIncidence, restarts: int = 1,
             seed: int = 0) -> DeploymentPlan:
    """Depth-first greedy: repeatedly take a max-depth point.

    The first pass breaks ties deterministically by lowest point index;
    additional restarts randomize tie-breaking and the smallest plan wins.
    """
    t0 = time.perf_counter()
    best = _df_indices(inc.masks, inc.full_mask)
    rng = np.random.default_rng(seed)
    for _ in range(max(0, restarts - 1)):
        cand = _df_indices(inc.masks, inc.full_mask, rng)
        if len(cand) < len(best):
            best = cand
    _assert_hits_all(inc, best)
    return _plan_from_indices(inc, best, "df", seed=seed,
                              runtime=time.perf_counter() - t0)


# --- exact branch and bound ------------------------------------------------

def _reduce_points(masks: list[int], remaining: int) -> list[int]:
    """Indices of non-dominated points w.r.t. the remaining regions."""
    eff = [(m & remaining, i) for i, m in enumerate(masks) if m & remaining]
    eff.sort(key=lambda t: (-bin(t[0]).count("1"), t[1]))
    kept: list[tuple[int, int]] = []
    for m, i in eff:
        if any(m | km == km for km, _ in kept):
            continue  # subset of an already-kept mask
        kept.append((m, i))
    return [i for _, i in kept]


def _disjoint_lower_bound(masks: list[int], remaining: int,
                          region_points: dict[int, int]) -> int:
    """Count of pairwise point-disjoint uncovered regions (a valid LB)."""
    lb = 0
    used = 0
    rem = remaining
    while rem:
        j = (rem & -rem).bit_length() - 1
        rem &= rem - 1
        pts = region_points[j]
        if pts & used == 0:
            lb += 1
            used |= pts
    return lb


def solve_exact(inc: RegionIncidence, time_budget: float = 60.0,
                seed: int = 0) -> DeploymentPlan:
    """Branch-and-bound minimum hitting set.

    Deterministic given the point ordering.  When the time budget runs out
    the best incumbent is returned with ``optimal`` False.
    """
    t0 = time.perf_counter()
    masks = inc.masks
    full = inc.full_mask
    # point bitmask per region, for the lower bound and branching
    region_points = {j: 0 for j in range(inc.n_regions)}
    for i, m in enumerate(masks):
        mm = m
        while mm:
            j = (mm & -mm).bit_length() - 1
            mm &= mm - 1
            region_points[j] |= 1 << i
    incumbent = _df_indices(masks, full)
    timed_out = False

    def branch(remaining: int, chosen: list[int], candidates: list[int]):
        nonlocal incumbent, timed_out
        if not remaining:
            if len(chosen) < len(incumbent):
                incumbent = list(chosen)
            return
        if timed_out or time.perf_counter() - t0 > time_budget:
            timed_out = True
            return
        lb = _disjoint_lower_bound(masks, remaining, region_points)
        if len(chosen) + lb >= len(incumbent):
            return
        # branch on the uncovered region with the fewest live candidates
        best_j, best_opts = -1, None
        rem = remaining
        while rem:
            j = (rem & -rem).bit_length() - 1
            rem &= rem - 1
            opts = [i for i in candidates if masks[i] >> j & 1]
            if best_opts is None or len(opts) < len(best_opts):
                best_j, best_opts = j, opts
                if len(opts) <= 1:
                    break
        if not best_opts:
            return  # region uncoverable on this path
        # try deepest candidates first
        best_opts.sort(key=lambda i: (-bin(masks[i] & remaining).count("1"), i))
        for i in best_opts:
            nrem = remaining & ~masks[i]
            chosen.append(i)
            branch(nrem, chosen, _reduce_points_cached(nrem, candidates))
            chosen.pop()

    reduce_cache: dict[int, list[int]] = {}

    def _reduce_points_cached(remaining: int, candidates: list[int]) -> list[int]:
        got = reduce_cache.get(remaining)
        if got is None:
            got = _reduce_points(masks, remaining)
            reduce_cache[remaining] = got
        return got

    branch(full, [], _reduce_points(masks, full))
    _assert_hits_all(inc, incumbent)
    return _plan_from_indices(inc, incumbent, "exact", seed=seed,
                              runtime=time.perf_counter() - t0,
                              optimal=not timed_out)


# --- baselines -------------------------------------------------------------

def solve_comm_first(inc: RegionIncidence, restarts: int = 1,
                     seed: int = 0) -> DeploymentPlan:
    """Cover communication disks first, then the remaining ellipses."""
    t0 = time.perf_counter()
    comm_mask = sum(1 << j for j, r in enumerate(inc.regions)
                    if isinstance(r, CommRegion))
    loc_mask = inc.full_mask & ~comm_mask
    rng = np.random.default_rng(seed)
    best = None
    for attempt in range(max(1, restarts)):
        trng = None if attempt == 0 else rng
        chosen = _df_indices(inc.masks, comm_mask, trng) if comm_mask else []
        hit = 0
        for i in chosen:
            hit |= inc.masks[i]
        rest = loc_mask & ~hit
        if rest:
            chosen += _df_indices(inc.masks, rest, trng)
        if best is None or len(chosen) < len(best):
            best = chosen
    _assert_hits_all(inc, best)
    return _plan_from_indices(inc, best, "comm_first", seed=seed,
                              runtime=time.perf_counter() - t0)


def _spiral_order(nx: int, ny: int):
    """Indices of an inward clockwise spiral over an nx-by-ny lattice."""
    top, bottom, left, right = 0, ny - 1, 0, nx - 1
    while left <= right and top <= bottom:
        for i in range(left, right + 1):
            yield i, top
        for j in range(top + 1, bottom + 1):
            yield right, j
        if top < bottom:
            for i in range(right - 1, left - 1, -1):
                yield i, bottom
        if left < right:
            for j in range(bottom - 1, top, -1):
                yield left, j
        top += 1
        bottom -= 1
        left += 1
        right -= 1


def solve_spiral(inc: RegionIncidence, grid: CandidateGrid,
                 seed: int = 0) -> DeploymentPlan:
    """Traverse the grid along an inward spiral, placing at any covering point."""
    t0 = time.perf_counter()
    nx, ny = grid.shape
    index_of = { (round(float(x), 6), round(float(y), 6)): i
                 for i, (x, y) in enumerate(inc.points_xy) }
    remaining = inc.full_mask
    chosen = []
    for ix, iy in _spiral_order(nx, ny):
        if not remaining:
            break
        key = (round(float(grid.xs[ix]), 6), round(float(grid.ys[iy]), 6))
        i = index_of.get(key)
        if i is None:
            continue
        if inc.masks[i] & remaining:
            chosen.append(i)
            remaining &= ~inc.masks[i]
    if remaining:
        raise GridTooCoarseError("spiral traversal left regions unhit")
    _assert_hits_all(inc, chosen)
    return _plan_from_indices(inc, chosen, "spiral", seed=seed,
                              runtime=time.perf_counter() - t0)


def _region_x_extent(region) -> tuple[float, float]:
    if isinstance(region, CommRegion):
        return region.center[0] - region.radius, region.center[0] + region.radius
    e = region.ellipse
    half = math.hypot(e.semi_major * math.cos(e.rotation),
                      e.semi_minor * math.sin(e.rotation))
    return e.center[0] - half, e.center[0] + half


def solve_strip(inc: RegionIncidence, area, strip_width: float | None = None,
                seed: int = 0) -> DeploymentPlan:
    """Vertical-strip decomposition: greedy cover strip by strip.

    Regions are assigned to the strip containing their leftmost extent;
    default strip width is the largest region diameter.
    """
    t0 = time.perf_counter()
    extents = [_region_x_extent(r) for r in inc.regions]
    if strip_width is None:
        strip_width = max(hi - lo for lo, hi in extents)
    chosen = []
    remaining = inc.full_mask
    x = min(lo for lo, _ in extents)
    x_end = max(lo for lo, _ in extents)
    while x <= x_end + 1e-9 and remaining:
        strip_mask = sum(1 << j for j, (lo, _) in enumerate(extents)
                         if x <= lo < x + strip_width)
        todo = strip_mask & remaining
        if todo:
            picks = _df_indices(inc.masks, todo)
            for i in picks:
                chosen.append(i)
                remaining &= ~inc.masks[i]
        x += strip_width
    if remaining:  # numerically stranded leftmost extents
        chosen += _df_indices(inc.masks, remaining)
    _assert_hits_all(inc, chosen)
    return _plan_from_indices(inc, chosen, "strip", seed=seed,
                              runtime=time.perf_counter() - t0)


SOLVERS = ("exact", "df", "comm_first", "spiral", "strip")


def run_solver(name: str, inc: RegionIncidence, grid: CandidateGrid,
               cfg: ScenarioConfig, restarts: int = 1, seed: int = 0,
               time_budget: float = 60.0) -> DeploymentPlan:
    if name == "exact":
        return solve_exact(inc, time_budget=time_budget, seed=seed)
    if name == "df":
        return solve_df(inc, restarts=restarts, seed=seed)
    if name == "comm_first":
        return solve_comm_first(inc, restarts=restarts, seed=seed)
    if name == "spiral":
        return solve_spiral(inc, grid, seed=seed)
    if name == "strip":
        return solve_strip(inc, cfg.area, seed=seed)
    raise ValueError(f"unknown solver {name!r}; choose from {SOLVERS}")


# --- verification ----------------------------------------------------------

def verify_plan(plan: DeploymentPlan, cfg: ScenarioConfig,
                region_set: RegionSet | None = None) -> DeploymentPlan:
    """Check the plan against the exact metric and rate formulas.

    Fills ``plan.per_ue`` and ``plan.valid`` in place and returns the plan.
    Verification never raises on an unsatisfied requirement.
    """
    if region_set is None:
        region_set = build_region_set(cfg)
    setting = cfg.setting
    reports = []
    all_ok = True
    for k, spec in enumerate(cfg.ues):
        eps = region_set.epsilons[k]
        best_opt_d = 0.0
        best_opt_d1 = 0.0
        for p in plan.positions:
            best_opt_d = max(best_opt_d, opt_d(spec.position, cfg.bs, p, setting))
            best_opt_d1 = max(best_opt_d1,
                              opt_d1(spec.position, cfg.bs, p, setting))
        best_rate, server = 0.0, None
        for u, p in enumerate(plan.positions):
            r = g2a_rate(p, spec.position, cfg.ue_budget, cfg.env)
            if r > best_rate:
                best_rate, server = r, f"uav{u}"
        for n, b in enumerate(cfg.bs):
            r = g2g_rate(b, spec.position, cfg.ue_budget, cfg.env)
            if r > best_rate:
                best_rate, server = r, f"bs{n}"
        loc_ok = best_opt_d >= eps
        rate_ok = best_rate >= spec.rate_threshold
        all_ok &= loc_ok and rate_ok
        reports.append({
            "ue_index": k,
            "epsilon": eps,
            "achieved_opt_d": best_opt_d,
            "achieved_opt_d1": best_opt_d1,
            "localization_ok": bool(loc_ok),
            "rate_threshold": spec.rate_threshold,
            "achieved_rate": best_rate,
            "rate_ok": bool(rate_ok),
            "serving_node": server,
        })
    plan.per_ue = reports
    plan.valid = bool(all_ok)
    return plan
