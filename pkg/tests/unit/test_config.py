"""
Unit tests for scenario loading, validation and bundled profiles.
"""
import json
import logging

import pytest
import yaml

from utils.config_manager import (
    DEFAULT_SEED,
    find_scenario,
    load_scenario,
    parse_scenario,
    save_scenario,
    scenario_to_dict,
)
from utils.config_profiles import BUNDLED_SCENARIOS, PUBLISHED_RESULTS, ConfigProfiles
from utils.error_handling import ConfigError
from utils.validation import (
    require_choice,
    require_gain,
    require_int,
    require_mapping,
    require_number,
    require_vector,
    validate_scenario_path,
)


def _key_of(data):
    with pytest.raises(ConfigError) as excinfo:
        parse_scenario(data)
    return excinfo.value.key


class TestValidation:
    """Test cases for value checks."""

    @pytest.mark.unit
    def test_require_number_bounds(self):
        assert require_number(3, "x", minimum=0.0) == 3.0
        with pytest.raises(ConfigError, match="x: must be > 0"):
            require_number(0.0, "x", minimum=0.0, exclusive_minimum=True)
        with pytest.raises(ConfigError):
            require_number(360.0, "x", maximum=360.0, exclusive_maximum=True)
        with pytest.raises(ConfigError):
            require_number(float("nan"), "x")

    @pytest.mark.unit
    @pytest.mark.parametrize("value", [True, "3", None, [1]])
    def test_require_number_rejects_non_numbers(self, value):
        with pytest.raises(ConfigError):
            require_number(value, "x")

    @pytest.mark.unit
    def test_require_int(self):
        assert require_int(3, "n", minimum=1) == 3
        with pytest.raises(ConfigError):
            require_int(2.5, "n")
        with pytest.raises(ConfigError):
            require_int(False, "n")
        with pytest.raises(ConfigError):
            require_int(0, "n", minimum=1)

    @pytest.mark.unit
    def test_require_vector(self):
        assert require_vector([1, 2, 3], "v") == (1.0, 2.0, 3.0)
        with pytest.raises(ConfigError, match="expected 3 components"):
            require_vector([1, 2], "v")
        with pytest.raises(ConfigError) as excinfo:
            require_vector([1, "a", 3], "v")
        assert excinfo.value.key == "v[1]"
        with pytest.raises(ConfigError):
            require_vector("abc", "v")

    @pytest.mark.unit
    def test_require_gain(self):
        assert require_gain(1.5, "kp") == 1.5
        assert require_gain([1, 2, 3], "kp") == (1.0, 2.0, 3.0)
        with pytest.raises(ConfigError) as excinfo:
            require_gain([1, -2, 3], "kp")
        assert excinfo.value.key == "kp[1]"

    @pytest.mark.unit
    def test_require_choice_and_mapping(self):
        assert require_choice(2, "sides", (1, 2)) == 2
        with pytest.raises(ConfigError):
            require_choice(3, "sides", (1, 2))
        with pytest.raises(ConfigError):
            require_mapping([1, 2], "planner")

    @pytest.mark.unit
    def test_validate_scenario_path(self, temp_dir):
        with pytest.raises(FileNotFoundError):
            validate_scenario_path(temp_dir / "missing.yaml")
        with pytest.raises(IsADirectoryError):
            validate_scenario_path(temp_dir)


class TestParseScenario:
    """Test cases for building scenarios from parsed data."""

    @pytest.mark.unit
    def test_minimal_scenario_gets_defaults(self, minimal_scenario_data):
        scenario = parse_scenario(minimal_scenario_data)
        assert len(scenario.turbines) == 1
        assert scenario.uav_count == 1
        assert scenario.seed == DEFAULT_SEED
        assert scenario.label == "scenario"
        assert scenario.planner.standoff == 10.0
        assert scenario.planner.pass_spacing == 5.0
        assert scenario.planner.sides == 2
        assert scenario.planner.cruise_speed == 4.0
        assert (scenario.gains.kp, scenario.gains.ki, scenario.gains.kd) == (1.2, 0.2, 0.4)
        assert scenario.dt == 0.05
        assert scenario.integral_limit == 50.0
        assert scenario.wind.mean == (0.0, 0.0, 0.0)
        assert scenario.wind.seed == DEFAULT_SEED
        assert scenario.camera.fov == 60.0
        assert scenario.sensor.resolution == 512
        assert scenario.turbines[0].hub_position.z == 80.0

    @pytest.mark.unit
    def test_full_sections(self, turbine_entry):
        scenario = parse_scenario(
            {
                "label": "custom",
                "terrain": "hills",
                "uav_count": 2,
                "seed": 9,
                "turbines": [turbine_entry(0, 0, nacelle_yaw=45.0, blade_count=2)],
                "planner": {"standoff": 12, "sides": 1, "approach_azimuth": 90},
                "control": {"kp": [1.0, 1.0, 2.0], "dt": 0.1},
                "wind": {"mean": [1, 2, 0], "gust_amplitude": 0.5},
                "camera": {"fov": 70, "max_range": 30},
                "sensor": {"resolution": 256},
            }
        )
        assert scenario.label == "custom" and scenario.terrain == "hills"
        assert scenario.turbines[0].nacelle_yaw == 45.0
        assert scenario.turbines[0].blade_count == 2
        assert scenario.planner.standoff == 12.0
        assert scenario.planner.approach_azimuth == 90.0
        assert scenario.gains.kp == (1.0, 1.0, 2.0)
        assert scenario.dt == 0.1
        assert scenario.wind.mean == (1.0, 2.0, 0.0)
        assert scenario.wind.seed == 9
        assert scenario.camera.max_range == 30.0
        assert scenario.sensor.resolution == 256

    @pytest.mark.unit
    @pytest.mark.parametrize(
        "overrides,key",
        [
            ({"uav_count": 0}, "uav_count"),
            ({"uav_count": True}, "uav_count"),
            ({"seed": -1}, "seed"),
            ({"label": 5}, "label"),
            ({"planner": {"sides": 3}}, "planner.sides"),
            ({"planner": {"standoff": 0}}, "planner.standoff"),
            ({"planner": []}, "planner"),
            ({"control": {"dt": 0.75}}, "control.dt"),
            ({"control": {"ki": -0.1}}, "control.ki"),
            ({"wind": {"mean": [1, 2]}}, "wind.mean"),
            ({"wind": {"gust_amplitude": -1}}, "wind.gust_amplitude"),
            ({"camera": {"min_range": 30}}, "camera.min_range"),
            ({"camera": {"max_incidence": 120}}, "camera.max_incidence"),
            ({"sensor": {"resolution": 32}}, "sensor.resolution"),
        ],
    )
    def test_invalid_values_name_their_key(self, minimal_scenario_data, overrides, key):
        minimal_scenario_data.update(overrides)
        assert _key_of(minimal_scenario_data) == key

    @pytest.mark.unit
    @pytest.mark.parametrize(
        "turbine,key",
        [
            ({"blade_length": -5}, "turbines[0].blade_length"),
            ({"tower_height": 0}, "turbines[0].tower_height"),
            ({"blade_count": 0}, "turbines[0].blade_count"),
            ({"blade_count": 300}, "turbines[0].blade_count"),
            ({"nacelle_yaw": 360}, "turbines[0].nacelle_yaw"),
            ({"base": [0, 0]}, "turbines[0].base"),
            ({"blade_pitch_truth": [10, 20]}, "turbines[0].blade_pitch_truth"),
        ],
    )
    def test_invalid_turbine_fields(self, turbine_entry, turbine, key):
        assert _key_of({"turbines": [turbine_entry(**turbine)]}) == key

    @pytest.mark.unit
    def test_turbines_required(self):
        assert _key_of({"uav_count": 1}) == "turbines"
        assert _key_of({"turbines": []}) == "turbines"
        assert _key_of(["not", "a", "mapping"]) == "scenario"

    @pytest.mark.unit
    def test_unknown_keys_are_logged(self, minimal_scenario_data, caplog):
        minimal_scenario_data["weather"] = "sunny"
        minimal_scenario_data["planner"] = {"altitude": 50}
        with caplog.at_level(logging.WARNING):
            parse_scenario(minimal_scenario_data)
        assert "weather" in caplog.text
        assert "planner.altitude" in caplog.text

    @pytest.mark.unit
    def test_with_seed_reseeds_wind(self, minimal_scenario_data):
        scenario = parse_scenario(minimal_scenario_data).with_seed(7)
        assert scenario.seed == 7
        assert scenario.wind.seed == 7


class TestScenarioFiles:
    """Test cases for reading and writing scenario files."""

    @pytest.mark.unit
    def test_load_yaml_uses_file_stem_as_label(self, temp_dir, minimal_scenario_data):
        path = temp_dir / "ridge.yaml"
        path.write_text(yaml.safe_dump(minimal_scenario_data), encoding="utf-8")
        assert load_scenario(path).label == "ridge"

    @pytest.mark.unit
    def test_load_json(self, temp_dir, calm_three_turbines):
        path = temp_dir / "calm.json"
        path.write_text(json.dumps(calm_three_turbines), encoding="utf-8")
        scenario = load_scenario(path)
        assert scenario.label == "calm_three"
        assert scenario.uav_count == 3

    @pytest.mark.unit
    def test_parse_error(self, temp_dir):
        path = temp_dir / "broken.yaml"
        path.write_text("turbines: [\n", encoding="utf-8")
        with pytest.raises(ConfigError) as excinfo:
            load_scenario(path)
        assert excinfo.value.key == "broken.yaml"

    @pytest.mark.unit
    def test_missing_file(self, temp_dir):
        with pytest.raises(FileNotFoundError):
            load_scenario(temp_dir / "nope.yaml")

    @pytest.mark.unit
    @pytest.mark.parametrize("suffix", [".yaml", ".json"])
    def test_saved_scenario_loads_back(self, temp_dir, calm_three_turbines, suffix):
        original = parse_scenario(calm_three_turbines)
        path = save_scenario(original, temp_dir / f"saved{suffix}")
        loaded = load_scenario(path)
        assert loaded.turbines == original.turbines
        assert loaded.planner == original.planner
        assert loaded.gains == original.gains
        assert loaded.wind == original.wind
        assert scenario_to_dict(loaded) == scenario_to_dict(original)

    @pytest.mark.unit
    def test_find_scenario(self, temp_dir):
        (temp_dir / "site.yml").write_text("turbines: []\n", encoding="utf-8")
        assert find_scenario("site", temp_dir) == temp_dir / "site.yml"
        assert find_scenario("other", temp_dir) is None


class TestProfiles:
    """Test cases for bundled scenarios and published results."""

    @pytest.mark.unit
    @pytest.mark.parametrize("name", list(BUNDLED_SCENARIOS))
    def test_bundled_scenarios_are_valid(self, name):
        scenario = ConfigProfiles.create_profile(name)
        assert scenario.label == name
        assert set(PUBLISHED_RESULTS[name]) == {"manual", "automated"}

    @pytest.mark.unit
    def test_weak_wind_scenario(self):
        scenario = ConfigProfiles.create_profile("three_turbines_weak_wind")
        assert len(scenario.turbines) == 3
        assert scenario.uav_count == 3
        assert scenario.wind.mean_speed <= 5.0

    @pytest.mark.unit
    def test_unknown_profile(self):
        with pytest.raises(ValueError):
            ConfigProfiles.create_profile("nowhere")
        assert ConfigProfiles.published_results("nowhere") is None

    @pytest.mark.unit
    def test_save_profile(self, temp_dir):
        path = temp_dir / "five.yaml"
        assert ConfigProfiles.save_profile_as_scenario("five_turbines_calm", path)
        assert len(load_scenario(path).turbines) == 5
        assert not ConfigProfiles.save_profile_as_scenario("nowhere", temp_dir / "x.yaml")

    @pytest.mark.unit
    def test_list_profiles(self, capsys):
        ConfigProfiles.list_profiles()
        output = capsys.readouterr().out
        for name in BUNDLED_SCENARIOS:
            assert name in output
        assert set(ConfigProfiles.get_available_profiles()) == set(ConfigProfiles.profile_names())
