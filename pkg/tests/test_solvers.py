"""Hitting-set solvers, incidence construction and plan verification."""

import itertools
import json

import numpy as np
import pytest

from uavplan.errors import GridTooCoarseError, ScenarioInfeasibleError
from uavplan.geometry import Point3
from uavplan.regions import CommRegion
from uavplan.scenario import (DEFAULT_AREA, AreaBounds, UserSpec,
                              deployment_preset, random_users)
from uavplan.solvers import (DeploymentPlan, RegionIncidence, _df_indices,
                             build_incidence, build_region_set, make_grid,
                             run_solver, solve_comm_first, solve_df,
                             solve_exact, solve_spiral, solve_strip,
                             verify_plan)


def incidence_from_masks(masks, n_regions, regions=None):
    """Synthetic incidence: point i sits at x=i on a line."""
    pts = np.column_stack([np.arange(len(masks), dtype=float),
                           np.zeros(len(masks))])
    return RegionIncidence(points_xy=pts, masks=list(masks),
                           n_regions=n_regions,
                           regions=regions or (None,) * n_regions,
                           altitude=100.0)


# Worked two-user example: regions C1, E1, C2, E2 (bits 0..3) and six
# candidate points with memberships
#   g1 {C1,E1}  g2 {C1}  g3 {E1,C2}  g4 {C2,E2}  g5 {E2}  g6 {C2}
WORKED_MASKS = [0b0011, 0b0001, 0b0110, 0b1100, 0b1000, 0b0100]


class TestWorkedExample:
    def test_depths(self):
        inc = incidence_from_masks(WORKED_MASKS, 4)
        assert list(inc.depths()) == [2, 1, 2, 2, 1, 1]

    def test_greedy_lowest_index_needs_two(self):
        inc = incidence_from_masks(WORKED_MASKS, 4)
        plan = solve_df(inc)
        assert plan.count == 2
        assert [p.x for p in plan.positions] == [0.0, 3.0]  # g1 and g4

    def test_adversarial_first_pick_needs_three(self):
        # forcing the max-depth tie toward g3 strands C1 and E2 separately
        inc = incidence_from_masks(WORKED_MASKS, 4)
        remaining = inc.full_mask & ~WORKED_MASKS[2]
        rest = _df_indices(inc.masks, remaining)
        assert 1 + len(rest) == 3

    def test_exact_needs_two(self):
        inc = incidence_from_masks(WORKED_MASKS, 4)
        plan = solve_exact(inc)
        assert plan.count == 2
        assert plan.optimal
        assert [p.x for p in plan.positions] == [0.0, 3.0]


class TestExactSolver:
    def test_disjoint_regions_need_two(self):
        inc = incidence_from_masks([0b01, 0b10], 2)
        assert solve_exact(inc).count == 2

    def test_common_point_needs_one(self):
        inc = incidence_from_masks([0b01, 0b11, 0b10], 2)
        assert solve_exact(inc).count == 1

    def test_matches_power_set_enumeration(self, rng):
        for _ in range(100):
            n_regions = int(rng.integers(2, 9))
            n_points = int(rng.integers(3, 12))
            masks = []
            for _ in range(n_points):
                m = int(rng.integers(1, 1 << n_regions))
                masks.append(m)
            full = (1 << n_regions) - 1
            covered = 0
            for m in masks:
                covered |= m
            if covered != full:
                continue
            best = None
            for r in range(1, n_points + 1):
                for combo in itertools.combinations(range(n_points), r):
                    hit = 0
                    for i in combo:
                        hit |= masks[i]
                    if hit == full:
                        best = r
                        break
                if best is not None:
                    break
            inc = incidence_from_masks(masks, n_regions)
            assert solve_exact(inc).count == best

    def test_never_worse_than_greedy(self, rng):
        for _ in range(50):
            masks = [int(rng.integers(1, 1 << 10)) for _ in range(30)]
            covered = 0
            for m in masks:
                covered |= m
            inc = incidence_from_masks(masks, 10)
            if covered != inc.full_mask:
                continue
            assert solve_exact(inc).count <= solve_df(inc).count


class TestHeuristics:
    def test_df_restarts_never_hurt(self, rng):
        for _ in range(20):
            masks = [int(rng.integers(1, 1 << 8)) for _ in range(20)]
            covered = 0
            for m in masks:
                covered |= m
            inc = incidence_from_masks(masks, 8)
            if covered != inc.full_mask:
                continue
            single = solve_df(inc, restarts=1).count
            multi = solve_df(inc, restarts=10, seed=0).count
            assert multi <= single

    def test_comm_first_stages(self):
        comm = CommRegion(0, (0.0, 0.0), 1.0, 100.0)
        # point 0 hits only the disk, point 1 only the ellipse stand-in
        inc = incidence_from_masks([0b01, 0b10], 2, regions=(comm, object()))
        plan = solve_comm_first(inc)
        assert plan.count == 2
        assert plan.solver == "comm_first"

    def test_spiral_covers_all(self, default_cfg):
        region_set = build_region_set(default_cfg)
        grid = make_grid(default_cfg)
        inc = build_incidence(grid, region_set, keep_all_points=True)
        plan = solve_spiral(inc, grid)
        hit = 0
        for p in plan.positions:
            i = int(np.argmin(np.linalg.norm(
                inc.points_xy - [p.x, p.y], axis=1)))
            hit |= inc.masks[i]
        assert hit == inc.full_mask

    def test_strip_single_region_single_uav(self, default_cfg):
        region_set = build_region_set(default_cfg)
        grid = make_grid(default_cfg)
        inc = build_incidence(grid, region_set)
        plan = solve_strip(inc, default_cfg.area)
        assert plan.count >= 1
        # one user: both its regions overlap, so a single point suffices
        assert plan.count == solve_exact(inc).count


class TestIncidence:
    def test_zero_depth_points_pruned(self, default_cfg):
        region_set = build_region_set(default_cfg)
        grid = make_grid(default_cfg)
        pruned = build_incidence(grid, region_set)
        kept = build_incidence(grid, region_set, keep_all_points=True)
        assert len(pruned.points_xy) < len(kept.points_xy)
        assert all(m != 0 for m in pruned.masks)

    def test_region_without_grid_point_rejected(self, default_cfg):
        from dataclasses import replace
        cfg = replace(default_cfg, grid_spacing=10.0)
        region_set = build_region_set(cfg)
        coarse = replace(cfg, grid_spacing=5000.0)
        with pytest.raises(GridTooCoarseError):
            build_incidence(make_grid(coarse), region_set)

    def test_disk_membership_matches_geometry(self, default_cfg):
        region_set = build_region_set(default_cfg)
        grid = make_grid(default_cfg)
        inc = build_incidence(grid, region_set, keep_all_points=True)
        disk_bits = [j for j, r in enumerate(region_set.regions)
                     if isinstance(r, CommRegion)]
        assert disk_bits
        j = disk_bits[0]
        disk = region_set.regions[j]
        for i, (x, y) in enumerate(inc.points_xy[::97]):
            inside = bool(disk.contains_xy(x, y))
            assert inside == bool(inc.masks[::97][i] >> j & 1)


class TestBuildRegionSet:
    def test_two_regions_per_unserved_user(self, default_cfg):
        region_set = build_region_set(default_cfg)
        assert len(region_set.regions) == 2
        assert not region_set.served_by_bs

    def test_bs_served_user_contributes_only_ellipse(self):
        cfg = deployment_preset(
            [UserSpec(Point3(105.0, 105.0, 10.0), 1e5, epsilon_fraction=0.5)])
        region_set = build_region_set(cfg)
        assert region_set.served_by_bs == {0}
        assert len(region_set.regions) == 1

    def test_infeasible_rate_collects_diagnostics(self):
        cfg = deployment_preset(
            [UserSpec(Point3(300, 300, 10), 1e8, epsilon_fraction=0.5),
             UserSpec(Point3(200, 200, 10), 9e7, epsilon_fraction=0.5)])
        with pytest.raises(ScenarioInfeasibleError) as err:
            build_region_set(cfg)
        assert len(err.value.diagnostics) == 2

    def test_absolute_epsilon_validated(self):
        cfg = deployment_preset(
            [UserSpec(Point3(300, 300, 10), 2.8e6, epsilon=1e3)])
        with pytest.raises(ScenarioInfeasibleError):
            build_region_set(cfg)


class TestVerifyPlan:
    def test_empty_plan_invalid_for_real_requirements(self, default_cfg):
        plan = DeploymentPlan(positions=[], solver="manual")
        verify_plan(plan, default_cfg)
        assert plan.valid is False
        assert plan.per_ue[0]["localization_ok"] is False

    def test_solver_plan_verifies(self, default_cfg):
        region_set = build_region_set(default_cfg)
        grid = make_grid(default_cfg)
        inc = build_incidence(grid, region_set)
        plan = solve_df(inc)
        verify_plan(plan, default_cfg, region_set)
        assert plan.valid is True
        rep = plan.per_ue[0]
        assert rep["achieved_opt_d"] >= rep["epsilon"]
        assert rep["achieved_rate"] >= rep["rate_threshold"]

    def test_plan_json_schema(self, default_cfg):
        region_set = build_region_set(default_cfg)
        inc = build_incidence(make_grid(default_cfg), region_set)
        plan = verify_plan(solve_df(inc), default_cfg, region_set)
        data = json.loads(plan.to_json())
        assert data["schema_version"] == 1
        assert data["uav_count"] == len(data["positions"])
        assert "runtime_s" not in data
        assert json.loads(plan.to_json(include_runtime=True))["runtime_s"] >= 0


class TestRunSolver:
    def test_unknown_name_rejected(self, default_cfg):
        region_set = build_region_set(default_cfg)
        grid = make_grid(default_cfg)
        inc = build_incidence(grid, region_set)
        with pytest.raises(ValueError):
            run_solver("simplex", inc, grid, default_cfg)

    def test_all_solvers_produce_hitting_sets(self, rng):
        cfg = deployment_preset(random_users(rng, 6, DEFAULT_AREA), seed=2)
        region_set = build_region_set(cfg)
        grid = make_grid(cfg)
        inc = build_incidence(grid, region_set, keep_all_points=True)
        for name in ("exact", "df", "comm_first", "spiral", "strip"):
            plan = run_solver(name, inc, grid, cfg)
            assert plan.count >= 1
            assert verify_plan(plan, cfg, region_set).valid
