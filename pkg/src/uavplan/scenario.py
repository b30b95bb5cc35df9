"""Scenario configuration: parsing, validation, presets and random campaigns.

Configs are YAML trees that round-trip exactly; plans and campaign results
are emitted as JSON/CSV elsewhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
import yaml

from .channel import LinkBudget, RadioEnvironment
from .errors import ConfigError
from .geometry import Point3
from .localization import (LocalizationSetting, NprsConfig, ToaNoiseModel,
                           nprs_psi)

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class AreaBounds:
    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self):
        if self.x_max <= self.x_min or self.y_max <= self.y_min:
            raise ConfigError(f"empty area: {self}")

    def contains(self, x, y):
        return ((self.x_min <= x) & (x <= self.x_max)
                & (self.y_min <= y) & (y <= self.y_max))


@dataclass(frozen=True)
class UserSpec:
    """One ground user: position, rate threshold and accuracy threshold.

    Exactly one of ``epsilon`` (absolute) or ``epsilon_fraction`` (position
    within the admissible single-ellipse interval) must be given.
    """

    position: Point3
    rate_threshold: float
    epsilon: float | None = None
    epsilon_fraction: float | None = None

    def __post_init__(self):
        if (self.epsilon is None) == (self.epsilon_fraction is None):
            raise ConfigError(
                "exactly one of epsilon / epsilon_fraction must be set")
        if self.rate_threshold <= 0.0:
            raise ConfigError(f"rate threshold must be positive: {self}")


@dataclass(frozen=True)
class ScenarioConfig:
    area: AreaBounds
    bs: tuple[Point3, Point3, Point3]
    ues: tuple[UserSpec, ...]
    env: RadioEnvironment
    ue_budget: LinkBudget     # user uplink transmissions
    uav_budget: LinkBudget    # UAV reference signals
    bs_budget: LinkBudget     # BS reference signals
    nprs: NprsConfig
    sigma_nlos_sq: float
    h_f: float = 100.0
    grid_spacing: float = 10.0
    seed: int = 0

    def __post_init__(self):
        if len(self.bs) != 3:
            raise ConfigError(f"exactly 3 base stations required, got {len(self.bs)}")
        if not self.ues:
            raise ConfigError("at least one UE required")
        if self.grid_spacing <= 0.0 or self.h_f <= 0.0:
            raise ConfigError("grid spacing and altitude must be positive")

    @property
    def noise(self) -> ToaNoiseModel:
        return ToaNoiseModel(psi=nprs_psi(self.nprs),
                             sigma_nlos_sq=self.sigma_nlos_sq)

    @property
    def setting(self) -> LocalizationSetting:
        return LocalizationSetting(env=self.env, uav_budget=self.uav_budget,
                                   bs_budget=self.bs_budget, noise=self.noise)

    def with_ues(self, ues: Sequence[UserSpec]) -> "ScenarioConfig":
        return replace(self, ues=tuple(ues))


# --- serialization ---------------------------------------------------------

def _point_to_list(p: Point3) -> list[float]:
    return [p.x, p.y, p.h]


def scenario_to_dict(cfg: ScenarioConfig) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "area": {"x_min": cfg.area.x_min, "x_max": cfg.area.x_max,
                 "y_min": cfg.area.y_min, "y_max": cfg.area.y_max},
        "bs": [_point_to_list(b) for b in cfg.bs],
        "ues": [
            {"position": _point_to_list(u.position),
             "rate_threshold": u.rate_threshold,
             **({"epsilon": u.epsilon} if u.epsilon is not None
                else {"epsilon_fraction": u.epsilon_fraction})}
            for u in cfg.ues
        ],
        "env": {"e1": cfg.env.e1, "e2": cfg.env.e2, "kappa": cfg.env.kappa,
                "alpha": cfg.env.alpha, "beta": cfg.env.beta, "fc": cfg.env.fc,
                "n0": cfg.env.n0, "outage_eps": cfg.env.outage_eps,
                "f_inv": cfg.env.f_inv},
        "budgets": {
            "ue": {"tx_power": cfg.ue_budget.tx_power,
                   "bandwidth": cfg.ue_budget.bandwidth},
            "uav": {"tx_power": cfg.uav_budget.tx_power,
                    "bandwidth": cfg.uav_budget.bandwidth},
            "bs": {"tx_power": cfg.bs_budget.tx_power,
                   "bandwidth": cfg.bs_budget.bandwidth},
        },
        "nprs": {"ts": cfg.nprs.ts, "n_sub": cfg.nprs.n_sub,
                 "subcarriers_per_symbol": {
                     str(s): [[i, p] for i, p in subs]
                     for s, subs in cfg.nprs.subcarriers_per_symbol.items()}},
        "sigma_nlos_sq": cfg.sigma_nlos_sq,
        "h_f": cfg.h_f,
        "grid_spacing": cfg.grid_spacing,
        "seed": cfg.seed,
    }


def scenario_from_dict(d: dict) -> ScenarioConfig:
    try:
        area = AreaBounds(**d["area"])
        bs = tuple(Point3(*map(float, b)) for b in d["bs"])
        ues = tuple(
            UserSpec(position=Point3(*map(float, u["position"])),
                     rate_threshold=float(u["rate_threshold"]),
                     epsilon=u.get("epsilon"),
                     epsilon_fraction=u.get("epsilon_fraction"))
            for u in d["ues"])
        env = RadioEnvironment(**d["env"])
        budgets = d["budgets"]
        nprs_d = d.get("nprs", {})
        nprs = NprsConfig(
            ts=float(nprs_d.get("ts", NprsConfig.ts)),
            n_sub=int(nprs_d.get("n_sub", NprsConfig.n_sub)),
            **({"subcarriers_per_symbol": {
                int(s): [(int(i), float(p)) for i, p in subs]
                for s, subs in nprs_d["subcarriers_per_symbol"].items()}}
               if "subcarriers_per_symbol" in nprs_d else {}))
        return ScenarioConfig(
            area=area, bs=bs, ues=ues, env=env,
            ue_budget=LinkBudget(**budgets["ue"]),
            uav_budget=LinkBudget(**budgets["uav"]),
            bs_budget=LinkBudget(**budgets["bs"]),
            nprs=nprs,
            sigma_nlos_sq=float(d["sigma_nlos_sq"]),
            h_f=float(d.get("h_f", 100.0)),
            grid_spacing=float(d.get("grid_spacing", 10.0)),
            seed=int(d.get("seed", 0)))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad scenario config: {exc}") from exc


def load_scenario(path) -> ScenarioConfig:
    with open(path) as fh:
        data = yaml.safe_load(fh)
    if not isinstance(data, dict):
        raise ConfigError(f"scenario file {path} is not a mapping")
    return scenario_from_dict(data)


def save_scenario(cfg: ScenarioConfig, path) -> None:
    with open(path, "w") as fh:
        yaml.safe_dump(scenario_to_dict(cfg), fh, sort_keys=True)


# --- presets ---------------------------------------------------------------

BS_DEPLOYMENT = (Point3(100, 100, 30), Point3(250, 433, 30), Point3(500, 250, 30))
BS_MOTIVATING = (Point3(0, 0, 30), Point3(500, 0, 30), Point3(250, 433, 30))

DEFAULT_AREA = AreaBounds(0.0, 600.0, 0.0, 600.0)
NPRS_BANDWIDTH = 180e3

# Feasible uplink rate window at h_f = 100 m under the default radio
# parameters; thresholds above ~3.2 Mb/s cannot be met by any hovering
# position at that altitude.
BENCH_RATE_RANGE = (2.5e6, 3.1e6)
UE_HEIGHT_RANGE = (10.0, 20.0)


def _base_config(bs, ues, seed=0, **overrides) -> ScenarioConfig:
    kwargs = dict(
        area=DEFAULT_AREA,
        bs=bs,
        ues=tuple(ues),
        env=RadioEnvironment(),
        ue_budget=LinkBudget(tx_power=0.01, bandwidth=NPRS_BANDWIDTH),
        uav_budget=LinkBudget(tx_power=1.0, bandwidth=NPRS_BANDWIDTH),
        bs_budget=LinkBudget(tx_power=1.0, bandwidth=NPRS_BANDWIDTH),
        nprs=NprsConfig(),
        sigma_nlos_sq=4e-17,
        h_f=100.0,
        grid_spacing=10.0,
        seed=seed,
    )
    kwargs.update(overrides)
    return ScenarioConfig(**kwargs)


def deployment_preset(ues: Sequence[UserSpec], seed: int = 0,
                      **overrides) -> ScenarioConfig:
    """Default deployment scenario with the standard BS triangle."""
    return _base_config(BS_DEPLOYMENT, ues, seed=seed, **overrides)


def motivating_preset(ues: Sequence[UserSpec] | None = None, seed: int = 0,
                      **overrides) -> ScenarioConfig:
    """Heatmap-experiment layout with BSs at the area edge."""
    if ues is None:
        ues = [UserSpec(position=Point3(300, 300, 10), rate_threshold=2.5e6,
                        epsilon_fraction=0.5)]
    return _base_config(BS_MOTIVATING, ues, seed=seed, **overrides)


def random_users(rng: np.random.Generator, k: int, area: AreaBounds,
                 rate_range=BENCH_RATE_RANGE,
                 height_range=UE_HEIGHT_RANGE) -> list[UserSpec]:
    """Draw k users with uniform positions, heights and thresholds."""
    users = []
    for _ in range(k):
        users.append(UserSpec(
            position=Point3(float(rng.uniform(area.x_min, area.x_max)),
                            float(rng.uniform(area.y_min, area.y_max)),
                            float(rng.uniform(*height_range))),
            rate_threshold=float(rng.uniform(*rate_range)),
            epsilon_fraction=float(rng.uniform(0.0, 1.0))))
    return users
