"""
Integration tests for the command-line entry point.
"""
import pytest
import yaml

from main import create_argument_parser, main, resolve_scenario
from utils.config_profiles import BUNDLED_SCENARIOS
from utils.error_handling import EXIT_CONFIG_ERROR, EXIT_OK, EXIT_PIPELINE_ERROR


@pytest.fixture
def scenario_file(temp_dir, minimal_scenario_data):
    path = temp_dir / "single.yaml"
    path.write_text(yaml.safe_dump(minimal_scenario_data), encoding="utf-8")
    return path


class TestArgumentParser:
    """Test cases for argument parsing."""

    @pytest.mark.unit
    def test_run_defaults(self):
        args = create_argument_parser().parse_args(["run", "--scenario", "a.yaml", "--out", "res"])
        assert args.command == "run"
        assert args.format == "csv"
        assert args.seed is None
        assert not args.save_frames

    @pytest.mark.unit
    def test_sweep_defaults(self):
        args = create_argument_parser().parse_args(["sweep-angle"])
        assert (args.steps, args.resolution, args.out) == (180, 512, None)

    @pytest.mark.unit
    def test_unknown_format_rejected(self):
        with pytest.raises(SystemExit):
            create_argument_parser().parse_args(["run", "--scenario", "a", "--out", "b", "--format", "xml"])

    @pytest.mark.unit
    def test_resolve_bundled_name(self, temp_dir, monkeypatch):
        monkeypatch.chdir(temp_dir)
        scenario = resolve_scenario("one_turbine_strong_wind")
        assert scenario.label == "one_turbine_strong_wind"
        assert len(scenario.turbines) == 1


class TestRunCommand:
    """Test cases for `run`."""

    @pytest.mark.integration
    def test_run_writes_results(self, scenario_file, temp_dir):
        out = temp_dir / "results"
        code = main(["run", "--scenario", str(scenario_file), "--out", str(out), "--seed", "3"])
        assert code == EXIT_OK
        for name in ("mission.csv", "flight_uav0.csv", "metrics.csv", "orientations.csv", "report.txt"):
            assert (out / name).exists()
        metrics = (out / "metrics.csv").read_text(encoding="utf-8").splitlines()
        assert metrics[0] == "total_time,total_length,blade_coverage,mean_deviation,uav_count,operator_count"
        assert metrics[1].endswith(",1,0")

    @pytest.mark.integration
    def test_invalid_scenario(self, temp_dir, minimal_scenario_data, caplog):
        minimal_scenario_data["uav_count"] = 0
        path = temp_dir / "bad.yaml"
        path.write_text(yaml.safe_dump(minimal_scenario_data), encoding="utf-8")
        assert main(["run", "--scenario", str(path), "--out", str(temp_dir / "out")]) == EXIT_CONFIG_ERROR
        assert "uav_count" in caplog.text
        assert not (temp_dir / "out").exists()

    @pytest.mark.integration
    def test_missing_scenario(self, temp_dir):
        code = main(["run", "--scenario", str(temp_dir / "absent.yaml"), "--out", str(temp_dir / "out")])
        assert code == EXIT_CONFIG_ERROR

    @pytest.mark.integration
    def test_pipeline_failure(self, temp_dir, minimal_scenario_data):
        minimal_scenario_data["sensor"] = {"area_threshold_fraction": 1.0}
        path = temp_dir / "tiny.yaml"
        path.write_text(yaml.safe_dump(minimal_scenario_data), encoding="utf-8")
        assert main(["run", "--scenario", str(path), "--out", str(temp_dir / "out")]) == EXIT_PIPELINE_ERROR

    @pytest.mark.integration
    def test_no_command(self):
        assert main(["-v"]) == EXIT_CONFIG_ERROR


class TestScenarioOptions:
    """Test cases for bundled scenario options."""

    @pytest.mark.integration
    def test_list_scenarios(self, capsys):
        assert main(["--list-scenarios"]) == EXIT_OK
        output = capsys.readouterr().out
        assert all(name in output for name in BUNDLED_SCENARIOS)

    @pytest.mark.integration
    def test_save_scenario(self, temp_dir, monkeypatch):
        monkeypatch.chdir(temp_dir)
        assert main(["--save-scenario", "five_turbines_calm"]) == EXIT_OK
        data = yaml.safe_load((temp_dir / "five_turbines_calm.yaml").read_text(encoding="utf-8"))
        assert len(data["turbines"]) == 5


class TestCompareCommand:
    """Test cases for `compare`."""

    @pytest.mark.integration
    def test_compare_with_published(self, scenario_file, temp_dir):
        out = temp_dir / "run"
        assert main(["run", "--scenario", str(scenario_file), "--out", str(out)]) == EXIT_OK
        table = temp_dir / "comparison.csv"
        code = main(
            ["compare", str(out / "metrics.csv"), "--published", "three_turbines_weak_wind", "--out", str(table)]
        )
        assert code == EXIT_OK
        lines = table.read_text(encoding="utf-8").splitlines()
        assert len(lines) == 4
        assert lines[1].startswith("three_turbines_weak_wind:manual,")
        assert lines[3].startswith("run,")

    @pytest.mark.integration
    def test_compare_missing_file(self, temp_dir):
        code = main(["compare", str(temp_dir / "a.csv"), str(temp_dir / "b.csv")])
        assert code == EXIT_CONFIG_ERROR


class TestSweepCommand:
    """Test cases for `sweep-angle`."""

    @pytest.mark.integration
    def test_sweep_writes_table(self, temp_dir):
        assert main(["sweep-angle", "--steps", "4", "--out", str(temp_dir)]) == EXIT_OK
        lines = (temp_dir / "sweep.csv").read_text(encoding="utf-8").splitlines()
        assert lines[0] == "truth_deg,estimate_deg,error_deg,truth_class,estimated_class"
        assert len(lines) == 5
