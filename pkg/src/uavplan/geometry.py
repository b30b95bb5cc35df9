"""Geometric primitives: points, unit vectors, elevation angles and conics.

All lengths are in meters, angles in radians unless a function name says
degrees.  These helpers are pure functions on small value types and are used
by the feasible-region machinery and the localization metrics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGeometryError, InvalidConicError

_UNIT_NORM_TOL = 1e-12
_MIN_SEMI_AXIS = 1e-9


@dataclass(frozen=True)
class Point3:
    """A 3D position (x, y, altitude h) in meters."""

    x: float
    y: float
    h: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x, self.y, self.h)):
            raise DegenerateGeometryError(f"non-finite coordinates: {self}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.h], dtype=float)

    @staticmethod
    def from_array(a) -> "Point3":
        return Point3(float(a[0]), float(a[1]), float(a[2]))

    def distance_to(self, other: "Point3") -> float:
        return math.dist((self.x, self.y, self.h), (other.x, other.y, other.h))


@dataclass(frozen=True)
class UnitVector3:
    """Direction cosines of a unit vector."""

    q1: float
    q2: float
    q3: float

    def __post_init__(self):
        n = self.q1**2 + self.q2**2 + self.q3**2
        if abs(n - 1.0) > 1e-9:
            raise DegenerateGeometryError(f"not a unit vector: norm^2={n}")

    def as_array(self) -> np.ndarray:
        return np.array([self.q1, self.q2, self.q3], dtype=float)


@dataclass(frozen=True)
class Conic2D:
    """Coefficients of A x^2 + B xy + C y^2 + D x + E y + F = 0."""

    A: float
    B: float
    C: float
    D: float
    E: float
    F: float

    def __post_init__(self):
        if self.A == 0.0 and self.B == 0.0 and self.C == 0.0:
            raise InvalidConicError("all quadratic coefficients are zero")

    def evaluate(self, x, y):
        return (self.A * x * x + self.B * x * y + self.C * y * y
                + self.D * x + self.E * y + self.F)


@dataclass(frozen=True)
class EllipseParams:
    """Center, rotation and semi-axes of an ellipse."""

    center: tuple[float, float]
    rotation: float
    semi_major: float
    semi_minor: float

    def __post_init__(self):
        if not (self.semi_major >= self.semi_minor > 0.0):
            raise InvalidConicError(
                f"bad axes: major={self.semi_major} minor={self.semi_minor}")

    def boundary_points(self, n: int = 64) -> np.ndarray:
        """Sample n points on the boundary, shape (n, 2)."""
        t = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
        ct, st = np.cos(self.rotation), np.sin(self.rotation)
        ex = self.semi_major * np.cos(t)
        ey = self.semi_minor * np.sin(t)
        return np.column_stack([
            self.center[0] + ct * ex - st * ey,
            self.center[1] + st * ex + ct * ey,
        ])

    def contains(self, x, y) -> np.ndarray:
        """Vectorized interior test (boundary counts as inside)."""
        dx = np.asarray(x, dtype=float) - self.center[0]
        dy = np.asarray(y, dtype=float) - self.center[1]
        ct, st = math.cos(self.rotation), math.sin(self.rotation)
        u = ct * dx + st * dy
        v = -st * dx + ct * dy
        return (u / self.semi_major) ** 2 + (v / self.semi_minor) ** 2 <= 1.0

    def to_conic(self) -> Conic2D:
        """Synthesize the general-form conic of this ellipse."""
        ct, st = math.cos(self.rotation), math.sin(self.rotation)
        ia, ib = 1.0 / self.semi_major**2, 1.0 / self.semi_minor**2
        A = ct * ct * ia + st * st * ib
        C = st * st * ia + ct * ct * ib
        B = 2.0 * ct * st * (ia - ib)
        cx, cy = self.center
        D = -2.0 * A * cx - B * cy
        E = -2.0 * C * cy - B * cx
        F = A * cx * cx + B * cx * cy + C * cy * cy - 1.0
        return Conic2D(A, B, C, D, E, F)


def unit_vector(start: Point3, end: Point3) -> UnitVector3:
    """Unit direction from ``start`` to ``end``.

    The localization chain always calls this as (target, anchor), i.e. the
    vector points from the target location toward the anchor.
    """
    d = end.as_array() - start.as_array()
    n = float(np.linalg.norm(d))
    if n == 0.0:
        raise DegenerateGeometryError(f"coincident points: {start}")
    d /= n
    return UnitVector3(float(d[0]), float(d[1]), float(d[2]))


def elevation_angle_deg(ue: Point3, uav: Point3) -> float:
    """Elevation angle in degrees seen from ``ue`` toward ``uav``, in [0, 90]."""
    d = ue.distance_to(uav)
    if d == 0.0:
        raise DegenerateGeometryError(f"coincident points: {ue}")
    s = min(1.0, abs(uav.h - ue.h) / d)
    return math.degrees(math.asin(s))


def is_ellipse(c: Conic2D) -> bool:
    """True iff the conic discriminant B^2 - 4AC is negative."""
    return c.B * c.B - 4.0 * c.A * c.C < 0.0


def conic_to_ellipse(c: Conic2D) -> EllipseParams:
    """Recover center, rotation and semi-axes from general conic form.

    Raises InvalidConicError unless the conic is a real, non-degenerate
    ellipse (semi-minor axis above 1e-9 m).
    """
    # extended precision: the translation to the center cancels badly when
    # the center is far from the origin relative to the axes
    # normalize so the quadratic part is positive definite; otherwise the
    # eigenvalue ordering below would pair the rotation with the wrong axis
    sign = 1.0 if c.A + c.C >= 0.0 else -1.0
    A, B, C, D, E, F = (np.longdouble(sign * v)
                        for v in (c.A, c.B, c.C, c.D, c.E, c.F))
    disc = B * B - 4.0 * A * C
    if disc >= 0.0:
        raise InvalidConicError(f"discriminant {float(disc)} >= 0, not an ellipse")
    cx = (2.0 * C * D - B * E) / disc
    cy = (2.0 * A * E - B * D) / disc
    root = np.sqrt((A - C) ** 2 + B * B)
    if c.B == 0.0:
        rotation = 0.0 if A <= C else math.pi / 2.0
    else:
        rotation = math.atan(float((C - A - root) / B))
    # value of the conic at the center; normalizes the centered quadratic form
    f_c = A * cx * cx + B * cx * cy + C * cy * cy + D * cx + E * cy + F
    lam_big = 0.5 * (A + C + root)           # larger eigenvalue magnitude
    lam_small = (-disc / 4.0) / lam_big      # via the eigenvalue product
    axes = []
    for lam in (lam_big, lam_small):
        rad = -f_c / lam
        if rad <= 0.0:
            raise InvalidConicError("imaginary or degenerate ellipse")
        axes.append(float(np.sqrt(rad)))
    semi_major, semi_minor = max(axes), min(axes)
    if semi_minor < _MIN_SEMI_AXIS:
        raise InvalidConicError(f"degenerate ellipse: minor axis {semi_minor}")
    return EllipseParams((float(cx), float(cy)), rotation % math.pi,
                         semi_major, semi_minor)
