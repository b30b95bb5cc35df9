"""Air-to-ground probabilistic-LoS and ground-to-ground fading channels.

All powers are in watts, bandwidths in Hz and gains linear; decibels appear
only at I/O boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DegenerateGeometryError, DomainError
from .geometry import Point3, elevation_angle_deg

SPEED_OF_LIGHT = 299792458.0  # m/s


def rayleigh_power_quantile(outage_eps: float) -> float:
    """Quantile of the unit-mean exponential power of Rayleigh fading.

    Returns -ln(1 - eps); the outage-rate SNR scale factor of the
    ground-to-ground link.
    """
    if not 0.0 < outage_eps < 1.0:
        raise DomainError(f"outage probability must be in (0,1): {outage_eps}")
    return -math.log1p(-outage_eps)


@dataclass(frozen=True)
class RadioEnvironment:
    """Environment and radio parameters shared by every link.

    e1/e2 parameterize the sigmoid LoS probability, kappa the NLoS power
    attenuation, alpha/beta the air and ground path-loss exponents.  f_inv
    is the fading power quantile used for outage-rate calculations; by
    default it follows the exponential power model at ``outage_eps``.
    """

    e1: float = 15.0
    e2: float = 0.5
    kappa: float = 0.2
    alpha: float = 2.0
    beta: float = 2.2
    fc: float = 2.1e9
    n0: float = 1e-3 * 10 ** (-174.0 / 10.0)  # -174 dBm/Hz in W/Hz
    outage_eps: float = 0.1
    f_inv: float = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.f_inv is None:
            object.__setattr__(self, "f_inv",
                               rayleigh_power_quantile(self.outage_eps))
        if not 0.0 < self.kappa <= 1.0:
            raise DomainError(f"kappa must be in (0,1]: {self.kappa}")
        if self.alpha < 2.0:
            raise DomainError(f"alpha must be >= 2: {self.alpha}")
        if self.f_inv <= 0.0:
            raise DomainError(f"f_inv must be positive: {self.f_inv}")

    @property
    def gamma0(self) -> float:
        """Free-space path loss at 1 m, linear."""
        return (4.0 * math.pi * self.fc / SPEED_OF_LIGHT) ** 2


@dataclass(frozen=True)
class LinkBudget:
    """Transmit power (W) and bandwidth (Hz) of one link role."""

    tx_power: float
    bandwidth: float

    def __post_init__(self):
        if self.tx_power <= 0.0 or self.bandwidth <= 0.0:
            raise DomainError(f"power and bandwidth must be positive: {self}")


def los_probability(theta_deg: float, env: RadioEnvironment) -> float:
    """Sigmoid LoS probability at elevation angle theta (degrees)."""
    if not 0.0 <= theta_deg <= 90.0:
        raise DomainError(f"elevation angle out of [0,90]: {theta_deg}")
    return 1.0 / (1.0 + env.e1 * math.exp(-env.e2 * (theta_deg - env.e1)))


def mean_excess_los_gain(theta_deg: float, env: RadioEnvironment) -> float:
    """LoS/NLoS mixture factor P + (1-P)*kappa at the given elevation."""
    p = los_probability(theta_deg, env)
    return p + (1.0 - p) * env.kappa


def g2a_gain(uav: Point3, ue: Point3, env: RadioEnvironment) -> float:
    """Expected linear power gain of the ground-to-air link."""
    d = uav.distance_to(ue)
    if d == 0.0:
        raise DegenerateGeometryError("UAV coincides with UE")
    theta = elevation_angle_deg(ue, uav)
    return mean_excess_los_gain(theta, env) / (env.gamma0 * d ** env.alpha)


def g2a_rate(uav: Point3, ue: Point3, budget: LinkBudget,
             env: RadioEnvironment) -> float:
    """Achievable rate (bits/s) between the UE and a UAV."""
    g = g2a_gain(uav, ue, env)
    snr = budget.tx_power * g / (budget.bandwidth * env.n0)
    return budget.bandwidth * math.log2(1.0 + snr)


def g2g_gain(bs: Point3, ue: Point3, env: RadioEnvironment) -> float:
    """Outage-quantile linear power gain of the ground-to-ground link."""
    d = bs.distance_to(ue)
    if d == 0.0:
        raise DegenerateGeometryError("BS coincides with UE")
    return env.f_inv / (env.gamma0 * d ** env.beta)


def g2g_rate(bs: Point3, ue: Point3, budget: LinkBudget,
             env: RadioEnvironment) -> float:
    """Outage-rate (bits/s) of the Rayleigh-fading ground link."""
    g = g2g_gain(bs, ue, env)
    snr = budget.tx_power * g / (budget.bandwidth * env.n0)
    return budget.bandwidth * math.log2(1.0 + snr)
