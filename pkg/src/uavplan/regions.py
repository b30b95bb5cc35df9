"""Closed-form feasible UAV hovering regions per user.

For each user the localization requirement projects, at a fixed flight
altitude, to an ellipse, and the (conservatively restricted) rate
requirement to a disk.  Membership authority for the localization region is
always the direct inequality det(H)^2 / D1 >= epsilon; the analytic ellipse
serves plotting, bounding boxes and cross-validation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channel import (LinkBudget, RadioEnvironment, mean_excess_los_gain)
from .errors import (CommInfeasibleError, DegenerateGeometryError,
                     InvalidThresholdError)
from .geometry import Conic2D, EllipseParams, Point3, conic_to_ellipse, unit_vector
from .localization import LocalizationSetting, d_factors

_REL_NUDGE = 1e-9


@dataclass(frozen=True)
class AlphaCoefficients:
    """Cross-product coefficients of the determinant expansion.

    alpha = (q2 - q1) x (q3 - q1); c1 = |alpha|, c2 = alpha . q1,
    c3 = |(alpha_1, alpha_2)|.  d1 is the ground-anchor determinant factor
    when the coefficients were built with channel context.
    """

    alpha1: float
    alpha2: float
    alpha3: float
    c1: float
    c2: float
    c3: float
    q1: tuple[float, float, float]
    d1: float | None = None

    @property
    def alpha(self) -> np.ndarray:
        return np.array([self.alpha1, self.alpha2, self.alpha3])


def alpha_coefficients(ue: Point3, bs: Sequence[Point3],
                       setting: LocalizationSetting | None = None,
                       ) -> AlphaCoefficients:
    """Determinant-expansion coefficients for a UE and three ground anchors.

    With ``setting`` given, the D1 noise factor is attached as well.
    """
    if len(bs) != 3:
        raise DegenerateGeometryError(f"need exactly 3 base stations, got {len(bs)}")
    q1, q2, q3 = (unit_vector(ue, b).as_array() for b in bs)
    alpha = np.cross(q2 - q1, q3 - q1)
    c1 = float(np.linalg.norm(alpha))
    c2 = float(alpha @ q1)
    c3 = float(math.hypot(alpha[0], alpha[1]))
    d1 = d_factors(ue, bs, setting)[0] if setting is not None else None
    return AlphaCoefficients(float(alpha[0]), float(alpha[1]), float(alpha[2]),
                             c1, c2, c3, tuple(q1), d1)


def det_H_via_alphas(ue: Point3, bs: Sequence[Point3], uav: Point3) -> float:
    """det(H) expressed through the alpha coefficients: alpha . (q_u - q_1)."""
    a = alpha_coefficients(ue, bs)
    qu = unit_vector(ue, uav).as_array()
    return float(a.alpha @ (qu - np.array(a.q1)))


def feasibility_range(ue: Point3, bs: Sequence[Point3],
                      setting: LocalizationSetting, case: int) -> float:
    """Largest epsilon admitting any UAV direction for the given sign case.

    case 1 covers det(H) >= 0 and yields (c1 - c2)^2 / D1; case 2 covers
    det(H) < 0 and yields (c1 + c2)^2 / D1.
    """
    a = alpha_coefficients(ue, bs, setting)
    if case == 1:
        return (a.c1 - a.c2) ** 2 / a.d1
    if case == 2:
        return (a.c1 + a.c2) ** 2 / a.d1
    raise ValueError(f"case must be 1 or 2, got {case}")


def _epsilon_interval(a: AlphaCoefficients) -> tuple[float, float]:
    """Admissible interval for sqrt(D1 * eps) yielding exactly one ellipse.

    The upper bound is additionally clamped by the sphere-plane feasibility
    of the matching sign case.
    """
    lo = abs(a.c3 - abs(a.c2))
    # the sphere-plane limit of the matching sign case is c1 - |c2| for both
    hi = min(a.c3 + abs(a.c2), a.c1 - abs(a.c2))
    if hi <= lo:
        raise InvalidThresholdError(
            f"empty threshold interval: lo={lo} hi={hi}")
    nudge = _REL_NUDGE * (hi - lo)
    return lo + nudge, hi - nudge


def choose_epsilon(ue: Point3, bs: Sequence[Point3],
                   setting: LocalizationSetting, fraction: float = 0.5) -> float:
    """Pick epsilon inside the single-ellipse interval.

    ``fraction`` interpolates between the interval endpoints (nudged
    strictly inward).
    """
    if not 0.0 <= fraction <= 1.0:
        raise InvalidThresholdError(f"fraction must be in [0,1]: {fraction}")
    a = alpha_coefficients(ue, bs, setting)
    lo, hi = _epsilon_interval(a)
    s = lo + fraction * (hi - lo)
    return s * s / a.d1


@dataclass(frozen=True)
class LocalizationRegion:
    """Per-UE feasible UAV set at fixed altitude for the accuracy requirement."""

    ue_index: int
    ue: Point3
    case_tag: int            # 1 if c2 >= 0 (det(H) >= 0 branch), else 2
    tilde_eps: float
    altitude: float          # h_f
    h_r: float               # h_f - UE altitude
    ellipse: EllipseParams
    conic: Conic2D
    alphas: AlphaCoefficients
    epsilon: float

    def contains_xy(self, x, y) -> np.ndarray:
        """Direct membership test det(H)^2 / D1 >= epsilon at altitude h_f.

        Vectorized over grid coordinates.
        """
        dx = np.asarray(x, dtype=float) - self.ue.x
        dy = np.asarray(y, dtype=float) - self.ue.y
        dh = self.altitude - self.ue.h
        norm = np.sqrt(dx * dx + dy * dy + dh * dh)
        a = self.alphas
        det = (a.alpha1 * dx + a.alpha2 * dy + a.alpha3 * dh) / norm - a.c2
        return det * det >= a.d1 * self.epsilon


def localization_region(ue: Point3, bs: Sequence[Point3],
                        setting: LocalizationSetting, epsilon: float,
                        h_f: float, ue_index: int = 0) -> LocalizationRegion:
    """Fixed-altitude ellipse satisfying the accuracy requirement.

    ``epsilon`` must lie within the feasible range of the case selected by
    the sign of c2, and must produce a real ellipse.
    """
    a = alpha_coefficients(ue, bs, setting)
    if epsilon <= 0.0:
        raise InvalidThresholdError(f"epsilon must be positive: {epsilon}")
    case = 1 if a.c2 >= 0.0 else 2
    s = math.sqrt(a.d1 * epsilon)
    limit = a.c1 - a.c2 if case == 1 else a.c1 + a.c2
    if s > limit:
        raise InvalidThresholdError(
            f"epsilon {epsilon} beyond feasible maximum {limit**2 / a.d1}")
    tilde = s + a.c2 if case == 1 else a.c2 - s
    if abs(tilde) <= a.c3:
        raise InvalidThresholdError(
            f"epsilon {epsilon} yields a non-elliptic region (|~eps| <= c3)")
    h_r = h_f - ue.h
    if h_r <= 0.0:
        raise InvalidThresholdError(f"flight altitude {h_f} below UE at {ue.h}")
    t2 = tilde * tilde
    A = a.alpha1 ** 2 / t2 - 1.0
    B = 2.0 * a.alpha1 * a.alpha2 / t2
    C = a.alpha2 ** 2 / t2 - 1.0
    D = 2.0 * a.alpha1 * a.alpha3 * h_r / t2
    E = 2.0 * a.alpha2 * a.alpha3 * h_r / t2
    F = (a.alpha3 ** 2 / t2 - 1.0) * h_r ** 2
    # shift the centered conic to absolute coordinates
    x0, y0 = ue.x, ue.y
    D_abs = D - 2.0 * A * x0 - B * y0
    E_abs = E - 2.0 * C * y0 - B * x0
    F_abs = (A * x0 * x0 + B * x0 * y0 + C * y0 * y0 - D * x0 - E * y0 + F)
    conic = Conic2D(A, B, C, D_abs, E_abs, F_abs)
    ellipse = conic_to_ellipse(conic)
    return LocalizationRegion(ue_index, ue, case, tilde, h_f, h_r, ellipse,
                              conic, a, epsilon)


def in_localization_region(region: LocalizationRegion, p: Point3) -> bool:
    """Direct membership of a UAV position in the accuracy region."""
    return bool(region.contains_xy(p.x, p.y))


@dataclass(frozen=True)
class CommRegion:
    """Horizontal disk of UAV positions meeting a UE's rate requirement."""

    ue_index: int
    center: tuple[float, float]
    radius: float
    altitude: float

    def contains_xy(self, x, y) -> np.ndarray:
        dx = np.asarray(x, dtype=float) - self.center[0]
        dy = np.asarray(y, dtype=float) - self.center[1]
        return dx * dx + dy * dy <= self.radius ** 2


def _rate_gap_factor(r_th: float, budget: LinkBudget,
                     env: RadioEnvironment) -> float:
    """W N0 gamma0 (2^(R/W) - 1) shared by the coverage radii."""
    try:
        gap = 2.0 ** (r_th / budget.bandwidth) - 1.0
    except OverflowError:
        return math.inf
    return budget.bandwidth * env.n0 * env.gamma0 * gap


def hat_theta(ue: Point3, r_th: float, budget: LinkBudget,
              env: RadioEnvironment, h_f: float) -> float:
    """Conservative elevation angle (degrees) underestimating the LoS mix.

    Raises CommInfeasibleError when even a UAV directly overhead cannot
    reach the rate threshold.
    """
    arg = abs(h_f - ue.h) * (_rate_gap_factor(r_th, budget, env)
                             / budget.tx_power) ** (1.0 / env.alpha)
    if arg > 1.0:
        raise CommInfeasibleError(
            f"rate {r_th:.3g} b/s unreachable at altitude {h_f} for UE {ue}")
    return math.degrees(math.asin(arg))


def comm_region_uav(ue: Point3, r_th: float, budget: LinkBudget,
                    env: RadioEnvironment, h_f: float,
                    ue_index: int = 0) -> CommRegion:
    """Disk of UAV positions whose restricted rate meets the threshold."""
    theta = hat_theta(ue, r_th, budget, env, h_f)
    d_max = (budget.tx_power * mean_excess_los_gain(theta, env)
             / _rate_gap_factor(r_th, budget, env)) ** (1.0 / env.alpha)
    dh = abs(h_f - ue.h)
    if d_max < dh:
        raise CommInfeasibleError(
            f"restricted range {d_max:.1f} m below altitude gap {dh:.1f} m "
            f"for UE {ue}")
    return CommRegion(ue_index, (ue.x, ue.y),
                      math.sqrt(d_max * d_max - dh * dh), h_f)


def bs_covers(ue: Point3, bs: Point3, r_th: float, budget: LinkBudget,
              env: RadioEnvironment) -> bool:
    """True when the ground link alone satisfies the rate requirement."""
    reach = (env.f_inv * budget.tx_power
             / _rate_gap_factor(r_th, budget, env)) ** (1.0 / env.beta)
    return ue.distance_to(bs) <= reach
