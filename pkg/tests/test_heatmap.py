"""Anchor-placement variance sweeps."""

import csv
import math

import numpy as np
import pytest

from uavplan.channel import SPEED_OF_LIGHT
from uavplan.geometry import Point3
from uavplan.heatmap import (HeatmapResult, candidate_grid, crlb_batch,
                             nlos_reduction, optimize_fourth_anchor,
                             run_heatmap, write_heatmap_csv)
from uavplan.localization import (crlb, fim, jacobian_H, sigma_sq_vector,
                                  tdoa_covariance, toa_variance_g2g)
from uavplan.scenario import motivating_preset

CFG = motivating_preset()
SETTING = CFG.setting


class TestCrlbBatch:
    def test_matches_scalar_chain_uav_mode(self, rng):
        target = Point3(310.0, 140.0, 12.0)
        anchors = rng.uniform(0, 600, size=(20, 2))
        horiz, vert = crlb_batch(target, CFG.bs, anchors, 200.0, "uav",
                                 SETTING)
        for i in range(len(anchors)):
            uav = Point3(float(anchors[i, 0]), float(anchors[i, 1]), 200.0)
            s = sigma_sq_vector(target, CFG.bs, uav, SETTING)
            R = SPEED_OF_LIGHT ** 2 * tdoa_covariance(s)
            res = crlb(fim(jacobian_H(target, CFG.bs, uav), R))
            assert horiz[i] == pytest.approx(res.horiz_var, rel=1e-9)
            assert vert[i] == pytest.approx(res.vert_var, rel=1e-9)

    def test_matches_scalar_chain_ground_mode(self, rng):
        target = Point3(310.0, 140.0, 12.0)
        anchors = rng.uniform(0, 600, size=(10, 2))
        horiz, vert = crlb_batch(target, CFG.bs, anchors, 30.0, "ground",
                                 SETTING)
        for i in range(len(anchors)):
            g = Point3(float(anchors[i, 0]), float(anchors[i, 1]), 30.0)
            s = [toa_variance_g2g(b, target, SETTING.bs_budget, SETTING.env,
                                  SETTING.noise) for b in CFG.bs]
            s.append(toa_variance_g2g(g, target, SETTING.bs_budget,
                                      SETTING.env, SETTING.noise))
            R = SPEED_OF_LIGHT ** 2 * tdoa_covariance(s)
            res = crlb(fim(jacobian_H(target, CFG.bs, g), R))
            assert horiz[i] == pytest.approx(res.horiz_var, rel=1e-9)
            assert vert[i] == pytest.approx(res.vert_var, rel=1e-9)

    def test_singular_geometry_flagged_inf(self):
        # fourth anchor at the target's horizontal position and same plane
        bs = (Point3(0, 0, 30), Point3(500, 0, 30), Point3(250, 433, 30))
        target = Point3(250.0, 150.0, 30.0)
        horiz, _ = crlb_batch(target, bs, np.array([[250.0, 150.0]]), 30.0,
                              "ground", SETTING)
        assert math.isinf(horiz[0])

    def test_unknown_mode_rejected(self):
        with pytest.raises(ValueError):
            crlb_batch(Point3(1, 2, 3), CFG.bs, np.zeros((1, 2)), 30.0,
                       "hover", SETTING)


class TestOptimizeFourthAnchor:
    def test_empty_candidates_rejected(self):
        with pytest.raises(ValueError):
            optimize_fourth_anchor(Point3(0, 0, 10), CFG.bs,
                                   np.zeros((0, 2)), "uav", SETTING)

    def test_best_is_argmin_of_total(self):
        target = Point3(200.0, 250.0, 15.0)
        cands = candidate_grid(CFG.area, 100.0)
        best, h, v = optimize_fourth_anchor(target, CFG.bs, cands, "uav",
                                            SETTING)
        horiz, vert = crlb_batch(target, CFG.bs, cands, 200.0, "uav", SETTING)
        i = int(np.argmin(horiz + vert))
        assert (best.x, best.y) == tuple(cands[i])
        assert h + v == pytest.approx(float(horiz[i] + vert[i]))


class TestRunHeatmap:
    def test_shapes_and_csv(self, tmp_path):
        res = run_heatmap(CFG, box_width=150.0, candidate_spacing=150.0)
        assert res.horiz["uav"].shape == (4, 4)
        path = tmp_path / "hm.csv"
        write_heatmap_csv(res, path)
        with open(path) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["x", "y", "mode", "horiz_var", "vert_var"]
        assert len(rows) - 1 == 4 * 4 * 2  # boxes x modes

    def test_deterministic_given_seed(self):
        a = run_heatmap(CFG, box_width=200.0, candidate_spacing=200.0)
        b = run_heatmap(CFG, box_width=200.0, candidate_spacing=200.0)
        assert np.array_equal(a.horiz["uav"], b.horiz["uav"])

    def test_ranges_ignore_singular(self):
        res = HeatmapResult(np.array([0.0]), np.array([0.0]),
                            {"uav": np.array([[2.0]])},
                            {"uav": np.array([[3.0]])})
        assert res.ranges("uav") == (2.0, 2.0, 3.0, 3.0)


class TestNlosReduction:
    def test_vertical_reduction_positive(self):
        h_red, v_red = nlos_reduction(CFG, 1e-15, n_targets=3, n_seeds=2,
                                      candidate_spacing=100.0)
        assert v_red > 0.0
        assert -2.0 < h_red < 1.0
