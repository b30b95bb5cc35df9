"""Shared fixtures and random-geometry helpers for the test suite."""

import numpy as np
import pytest

from uavplan.geometry import Point3
from uavplan.scenario import (DEFAULT_AREA, UserSpec, deployment_preset,
                              motivating_preset)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def default_cfg():
    """Standard-triangle scenario with one centered user."""
    return deployment_preset(
        [UserSpec(Point3(300.0, 300.0, 10.0), 2.8e6, epsilon_fraction=0.5)])


@pytest.fixture
def edge_cfg():
    """Edge-triangle scenario used by the variance-sweep reproductions."""
    return motivating_preset()


def random_point(rng, lo=0.0, hi=600.0, h_lo=10.0, h_hi=20.0) -> Point3:
    return Point3(float(rng.uniform(lo, hi)), float(rng.uniform(lo, hi)),
                  float(rng.uniform(h_lo, h_hi)))


def random_uav(rng, h=100.0) -> Point3:
    return Point3(float(rng.uniform(0.0, 600.0)),
                  float(rng.uniform(0.0, 600.0)), h)


def random_anchor_set(rng):
    """Three well-separated ground anchors at 30 m."""
    while True:
        pts = [Point3(float(rng.uniform(0, 600)), float(rng.uniform(0, 600)),
                      30.0) for _ in range(3)]
        d = [pts[i].distance_to(pts[j]) for i in range(3) for j in range(i)]
        if min(d) > 100.0:
            return tuple(pts)


AREA = DEFAULT_AREA
