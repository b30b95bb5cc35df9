"""Scenario configuration: validation, serialization and presets."""

import numpy as np
import pytest

from uavplan.errors import ConfigError
from uavplan.geometry import Point3
from uavplan.scenario import (DEFAULT_AREA, AreaBounds, UserSpec,
                              deployment_preset, load_scenario,
                              motivating_preset, random_users, save_scenario,
                              scenario_from_dict, scenario_to_dict)


class TestValidation:
    def test_empty_area_rejected(self):
        with pytest.raises(ConfigError):
            AreaBounds(0, 0, 0, 600)

    def test_user_needs_exactly_one_threshold_form(self):
        with pytest.raises(ConfigError):
            UserSpec(Point3(0, 0, 10), 1e6)
        with pytest.raises(ConfigError):
            UserSpec(Point3(0, 0, 10), 1e6, epsilon=1e-3,
                     epsilon_fraction=0.5)

    def test_nonpositive_rate_rejected(self):
        with pytest.raises(ConfigError):
            UserSpec(Point3(0, 0, 10), 0.0, epsilon_fraction=0.5)

    def test_three_base_stations_required(self):
        cfg = motivating_preset()
        with pytest.raises(ConfigError):
            type(cfg)(**{**cfg.__dict__, "bs": cfg.bs[:2]})

    def test_at_least_one_user_required(self):
        cfg = motivating_preset()
        with pytest.raises(ConfigError):
            cfg.with_ues(())


class TestRoundTrip:
    def test_dict_round_trip_identity(self):
        cfg = deployment_preset(
            [UserSpec(Point3(10, 20, 12), 2.7e6, epsilon=1e-4),
             UserSpec(Point3(400, 100, 15), 3.0e6, epsilon_fraction=0.25)],
            seed=42)
        again = scenario_from_dict(scenario_to_dict(cfg))
        assert again == cfg

    def test_yaml_file_round_trip(self, tmp_path):
        cfg = motivating_preset(seed=7)
        path = tmp_path / "scenario.yaml"
        save_scenario(cfg, path)
        assert load_scenario(path) == cfg

    def test_missing_key_raises_config_error(self):
        d = scenario_to_dict(motivating_preset())
        del d["bs"]
        with pytest.raises(ConfigError):
            scenario_from_dict(d)

    def test_non_mapping_file_rejected(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("- 1\n- 2\n")
        with pytest.raises(ConfigError):
            load_scenario(path)


class TestRandomUsers:
    def test_deterministic_per_seed(self):
        a = random_users(np.random.default_rng(3), 5, DEFAULT_AREA)
        b = random_users(np.random.default_rng(3), 5, DEFAULT_AREA)
        assert a == b

    def test_within_bounds(self):
        users = random_users(np.random.default_rng(0), 50, DEFAULT_AREA)
        for u in users:
            assert DEFAULT_AREA.contains(u.position.x, u.position.y)
            assert 10.0 <= u.position.h <= 20.0
            assert 0.0 <= u.epsilon_fraction <= 1.0
