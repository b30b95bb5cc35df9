"""Geometric primitives: unit vectors, elevation angles and conics."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uavplan.errors import DegenerateGeometryError, InvalidConicError
from uavplan.geometry import (Conic2D, EllipseParams, Point3, conic_to_ellipse,
                              elevation_angle_deg, is_ellipse, unit_vector)

coord = st.floats(-1e4, 1e4, allow_nan=False)


class TestUnitVector:
    def test_axis_aligned(self):
        q = unit_vector(Point3(0, 0, 0), Point3(1, 0, 0))
        assert (q.q1, q.q2, q.q3) == (1.0, 0.0, 0.0)

    def test_diagonal(self):
        q = unit_vector(Point3(0, 0, 0), Point3(1, 1, 0))
        assert q.q1 == pytest.approx(math.sqrt(2) / 2)
        assert q.q2 == pytest.approx(math.sqrt(2) / 2)
        assert q.q3 == 0.0

    def test_oblique(self):
        q = unit_vector(Point3(100, 50, 10), Point3(100, 100, 30))
        assert np.allclose(q.as_array(), [0.0, 0.9285, 0.3714], atol=1e-4)
        assert np.linalg.norm(q.as_array()) == pytest.approx(1.0, abs=1e-12)

    def test_coincident_points_rejected(self):
        with pytest.raises(DegenerateGeometryError):
            unit_vector(Point3(1, 2, 3), Point3(1, 2, 3))

    @given(coord, coord, coord, coord, coord, coord)
    @settings(max_examples=200)
    def test_norm_and_antisymmetry(self, x1, y1, h1, x2, y2, h2):
        p, q = Point3(x1, y1, h1), Point3(x2, y2, h2)
        if p.distance_to(q) < 1e-6:
            return
        u = unit_vector(p, q).as_array()
        v = unit_vector(q, p).as_array()
        assert abs(np.linalg.norm(u) - 1.0) < 1e-12
        assert np.allclose(u, -v, atol=1e-12)


class TestElevationAngle:
    def test_directly_overhead(self):
        assert elevation_angle_deg(Point3(5, 5, 0), Point3(5, 5, 50)) == 90.0

    def test_same_altitude(self):
        assert elevation_angle_deg(Point3(0, 0, 10), Point3(100, 0, 10)) == 0.0

    def test_isoceles(self):
        angle = elevation_angle_deg(Point3(0, 0, 0), Point3(100, 0, 100))
        assert angle == pytest.approx(45.0)

    def test_coincident_rejected(self):
        with pytest.raises(DegenerateGeometryError):
            elevation_angle_deg(Point3(0, 0, 0), Point3(0, 0, 0))


class TestIsEllipse:
    def test_unit_circle(self):
        assert is_ellipse(Conic2D(1, 0, 1, 0, 0, -1))

    def test_hyperbola(self):
        assert not is_ellipse(Conic2D(0, 1, 0, 0, 0, -1))

    def test_parabola(self):
        assert not is_ellipse(Conic2D(1, 0, 0, 0, -1, 0))

    def test_all_quadratic_zero_rejected(self):
        with pytest.raises(InvalidConicError):
            Conic2D(0, 0, 0, 1, 1, -1)


class TestConicToEllipse:
    def test_unit_circle(self):
        e = conic_to_ellipse(Conic2D(1, 0, 1, 0, 0, -1))
        assert e.center == pytest.approx((0.0, 0.0))
        assert e.semi_major == pytest.approx(1.0)
        assert e.semi_minor == pytest.approx(1.0)

    def test_axis_aligned(self):
        e = conic_to_ellipse(Conic2D(0.25, 0, 1, 0, 0, -1))
        assert e.semi_major == pytest.approx(2.0)
        assert e.semi_minor == pytest.approx(1.0)
        assert e.rotation == pytest.approx(0.0)

    def test_non_ellipse_rejected(self):
        with pytest.raises(InvalidConicError):
            conic_to_ellipse(Conic2D(1, 0, -1, 0, 0, -1))

    def test_degenerate_minor_axis_rejected(self):
        e = EllipseParams((0, 0), 0.0, 1.0, 1.0)
        c = e.to_conic()
        # squeeze the conic into a degenerate band
        with pytest.raises(InvalidConicError):
            conic_to_ellipse(Conic2D(c.A, c.B, 1e25, c.D, c.E, c.F))

    @given(st.floats(-500, 500), st.floats(-500, 500),
           st.floats(0, math.pi), st.floats(1.0, 100), st.floats(1.01, 10))
    @settings(max_examples=300)
    def test_round_trip(self, cx, cy, rot, minor, factor):
        # semi-minor >= 1 m keeps the general-conic representation itself
        # accurate; thinner far-off-center ellipses lose digits in A..F
        major = minor * factor
        src = EllipseParams((cx, cy), rot, major, minor)
        out = conic_to_ellipse(src.to_conic())
        assert out.center[0] == pytest.approx(cx, rel=1e-9, abs=1e-7)
        assert out.center[1] == pytest.approx(cy, rel=1e-9, abs=1e-7)
        assert out.semi_major == pytest.approx(major, rel=1e-9)
        assert out.semi_minor == pytest.approx(minor, rel=1e-9)
        diff = (out.rotation - rot) % math.pi
        assert min(diff, math.pi - diff) < 1e-6

    @given(st.floats(-500, 500), st.floats(-500, 500),
           st.floats(0, math.pi), st.floats(0.5, 300), st.floats(0.1, 0.99))
    @settings(max_examples=200)
    def test_boundary_satisfies_conic(self, cx, cy, rot, major, ratio):
        conic = EllipseParams((cx, cy), rot, major, major * ratio).to_conic()
        e = conic_to_ellipse(conic)
        pts = e.boundary_points(32)
        res = conic.evaluate(pts[:, 0], pts[:, 1])
        scale = max(abs(v) for v in
                    (conic.A, conic.B, conic.C, conic.D, conic.E, conic.F))
        assert np.max(np.abs(res)) < 1e-6 * scale * max(
            1.0, major ** 2 + cx * cx + cy * cy)


class TestEllipseParams:
    def test_contains_center_and_excludes_far(self):
        e = EllipseParams((10, -5), 0.3, 4.0, 2.0)
        assert bool(e.contains(10, -5))
        assert not bool(e.contains(100, 100))

    def test_invalid_axes_rejected(self):
        with pytest.raises(InvalidConicError):
            EllipseParams((0, 0), 0.0, 1.0, 2.0)
