"""ToA/TDoA measurement statistics, Fisher information and design metrics.

The chain follows the OTDoA setup with three fixed ground base stations and
one UAV anchor; BS 1 is the TDoA reference node.  Variances are kept in s^2
until the covariance is scaled by c^2 into m^2 for the Fisher information.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .channel import SPEED_OF_LIGHT, LinkBudget, RadioEnvironment, g2a_gain, g2g_gain
from .errors import ConfigError, DegenerateGeometryError, DomainError
from .geometry import Point3, unit_vector

_SINGULAR_RCOND = 1e-14


@dataclass(frozen=True)
class NprsConfig:
    """Positioning reference signal layout controlling the ToA variance scale.

    ``subcarriers_per_symbol`` maps a symbol index to (subcarrier index,
    power weight) pairs.  The default layout uses 4 symbols per subframe
    with 12 unit-weight subcarriers at indices +-1..6.
    """

    ts: float = 1.0 / 1.5e4
    n_sub: int = 160
    subcarriers_per_symbol: dict = field(default_factory=lambda: {
        s: [(i, 1.0) for i in range(-6, 7) if i != 0] for s in range(4)
    })

    def __post_init__(self):
        if self.ts <= 0.0 or self.n_sub < 1:
            raise ConfigError(f"bad NPRS timing: ts={self.ts} n_sub={self.n_sub}")


def nprs_psi(cfg: NprsConfig) -> float:
    """ToA variance scale psi = Ts^2 / (N_sub * 8 pi^2 * sum p_i^2 i^2)."""
    weight = sum(p * p * i * i
                 for subs in cfg.subcarriers_per_symbol.values()
                 for i, p in subs)
    if weight <= 0.0:
        raise ConfigError("NPRS subcarrier weights sum to zero")
    return cfg.ts ** 2 / (cfg.n_sub * 8.0 * math.pi ** 2 * weight)


@dataclass(frozen=True)
class ToaNoiseModel:
    """psi scale (s^2 per unit inverse SNR) and ground NLoS excess variance."""

    psi: float
    sigma_nlos_sq: float = 0.0

    def __post_init__(self):
        if self.psi <= 0.0 or self.sigma_nlos_sq < 0.0:
            raise ConfigError(f"bad noise model: {self}")


@dataclass(frozen=True)
class LocalizationSetting:
    """Everything needed to evaluate localization statistics for one UE."""

    env: RadioEnvironment
    uav_budget: LinkBudget   # UAV reference-signal power / bandwidth
    bs_budget: LinkBudget    # BS reference-signal power / bandwidth
    noise: ToaNoiseModel


def snr_g2a(uav: Point3, ue: Point3, budget: LinkBudget,
            env: RadioEnvironment) -> float:
    return g2a_gain(uav, ue, env) * budget.tx_power / (budget.bandwidth * env.n0)


def snr_g2g(bs: Point3, ue: Point3, budget: LinkBudget,
            env: RadioEnvironment) -> float:
    return g2g_gain(bs, ue, env) * budget.tx_power / (budget.bandwidth * env.n0)


def toa_variance_g2a(uav: Point3, ue: Point3, budget: LinkBudget,
                     env: RadioEnvironment, noise: ToaNoiseModel) -> float:
    """ToA variance (s^2) of the UAV anchor link."""
    return noise.psi / snr_g2a(uav, ue, budget, env)


def toa_variance_g2g(bs: Point3, ue: Point3, budget: LinkBudget,
                     env: RadioEnvironment, noise: ToaNoiseModel) -> float:
    """ToA variance (s^2) of a ground anchor link, including NLoS excess."""
    return noise.psi / snr_g2g(bs, ue, budget, env) + noise.sigma_nlos_sq


def tdoa_covariance(sigma_sq: Sequence[float]) -> np.ndarray:
    """TDoA covariance (s^2) from per-anchor ToA variances.

    ``sigma_sq`` is (sigma_1^2, sigma_2^2, sigma_3^2, sigma_u^2) with anchor
    1 the reference node.
    """
    s1, s2, s3, su = (float(v) for v in sigma_sq)
    if min(s1, s2, s3, su) <= 0.0:
        raise DomainError(f"nonpositive ToA variance: {sigma_sq}")
    return np.array([
        [s1 + s2, s1, s1],
        [s1, s1 + s3, s1],
        [s1, s1, s1 + su],
    ])


def sigma_sq_vector(ue: Point3, bs: Sequence[Point3], uav: Point3,
                    setting: LocalizationSetting) -> np.ndarray:
    """Per-anchor ToA variances (BS1, BS2, BS3, UAV) in s^2."""
    s = [toa_variance_g2g(b, ue, setting.bs_budget, setting.env, setting.noise)
         for b in bs]
    s.append(toa_variance_g2a(uav, ue, setting.uav_budget, setting.env,
                              setting.noise))
    return np.array(s)


def jacobian_H(ue: Point3, bs: Sequence[Point3], uav: Point3) -> np.ndarray:
    """Jacobian of the range-difference equations w.r.t. the UE position.

    Rows are q_2 - q_1, q_3 - q_1, q_u - q_1 where q is the unit vector
    from the UE toward the anchor.
    """
    if len(bs) != 3:
        raise DegenerateGeometryError(f"need exactly 3 base stations, got {len(bs)}")
    q = [unit_vector(ue, a).as_array() for a in (*bs, uav)]
    return np.array([q[1] - q[0], q[2] - q[0], q[3] - q[0]])


def fim(H: np.ndarray, R_m2: np.ndarray) -> np.ndarray:
    """Fisher information H^T R^-1 H with R in m^2."""
    if np.linalg.cond(R_m2) > 1.0 / _SINGULAR_RCOND:
        raise DomainError("singular TDoA covariance")
    return H.T @ np.linalg.solve(R_m2, H)


class CrlbResult(NamedTuple):
    horiz_var: float
    vert_var: float
    total: float
    singular: bool


def crlb(F: np.ndarray) -> CrlbResult:
    """Horizontal, vertical and total estimation variance bounds (m^2).

    A singular information matrix (e.g. coplanar anchors) is reported as an
    infeasible-geometry result with infinite variances, not an exception.
    """
    det = np.linalg.det(F)
    if not np.isfinite(det) or abs(det) < _SINGULAR_RCOND * max(
            1.0, float(np.abs(F).max()) ** 3):
        return CrlbResult(math.inf, math.inf, math.inf, True)
    C = np.linalg.inv(F)
    horiz = float(C[0, 0] + C[1, 1])
    vert = float(C[2, 2])
    return CrlbResult(horiz, vert, horiz + vert, False)


def det_R_closed_form(sigma_sq: Sequence[float]) -> tuple[float, float, float]:
    """Closed-form determinant of the m^2 covariance: (det, D1, D2).

    det = D1 + D2 * sigma_u^2 with D1 = c^6 s1 s2 s3 and
    D2 = c^6 (s1 s3 + s1 s2 + s2 s3).
    """
    s1, s2, s3, su = (float(v) for v in sigma_sq)
    if min(s1, s2, s3, su) <= 0.0:
        raise DomainError(f"nonpositive ToA variance: {sigma_sq}")
    c6 = SPEED_OF_LIGHT ** 6
    d1 = c6 * s1 * s2 * s3
    d2 = c6 * (s1 * s3 + s1 * s2 + s2 * s3)
    return d1 + d2 * su, d1, d2


def d_factors(ue: Point3, bs: Sequence[Point3],
              setting: LocalizationSetting) -> tuple[float, float]:
    """(D1, D2) determinant factors from the three ground-anchor links."""
    s = [toa_variance_g2g(b, ue, setting.bs_budget, setting.env, setting.noise)
         for b in bs]
    c6 = SPEED_OF_LIGHT ** 6
    d1 = c6 * s[0] * s[1] * s[2]
    d2 = c6 * (s[0] * s[2] + s[0] * s[1] + s[1] * s[2])
    return d1, d2


def opt_d(ue: Point3, bs: Sequence[Point3], uav: Point3,
          setting: LocalizationSetting) -> float:
    """Design metric det(H)^2 / det(R): larger is better localization."""
    H = jacobian_H(ue, bs, uav)
    det_r, _, _ = det_R_closed_form(sigma_sq_vector(ue, bs, uav, setting))
    return float(np.linalg.det(H)) ** 2 / det_r


def opt_d1(ue: Point3, bs: Sequence[Point3], uav: Point3,
           setting: LocalizationSetting) -> float:
    """UAV-noise-free approximation det(H)^2 / D1."""
    H = jacobian_H(ue, bs, uav)
    d1, _ = d_factors(ue, bs, setting)
    return float(np.linalg.det(H)) ** 2 / d1


def opt_d2(ue: Point3, bs: Sequence[Point3], uav: Point3,
           setting: LocalizationSetting) -> float:
    """Complementary approximation det(H)^2 / (D2 * sigma_u^2)."""
    H = jacobian_H(ue, bs, uav)
    _, d2 = d_factors(ue, bs, setting)
    su = toa_variance_g2a(uav, ue, setting.uav_budget, setting.env,
                          setting.noise)
    return float(np.linalg.det(H)) ** 2 / (d2 * su)


def lemma1_holds(ue: Point3, bs: Sequence[Point3], uav: Point3,
                 setting: LocalizationSetting, margin: float = 1.0) -> bool:
    """Convergence condition for opt_d1 approximating opt_d.

    True iff SNR_u / SNR_n >= margin * (3 - sigma_NLoS^2 * SNR_u / psi)
    for every ground anchor n.
    """
    snr_u = snr_g2a(uav, ue, setting.uav_budget, setting.env)
    rhs_term = setting.noise.sigma_nlos_sq * snr_u / setting.noise.psi
    for b in bs:
        snr_n = snr_g2g(b, ue, setting.bs_budget, setting.env)
        if snr_u / snr_n < margin * (3.0 - rhs_term):
            return False
    return True
