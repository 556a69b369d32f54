"""
Integration tests for the end-to-end inspection pipeline.
"""
import filecmp

import numpy as np
import pytest

from core.pipeline import perceive_turbine, run_inspection_session, run_pipeline
from core.trajectory import PlannerParams, SegmentKind
from core.vision import angular_error
from utils.config_manager import SensorSection, parse_scenario
from utils.config_profiles import ConfigProfiles
from utils.error_handling import PipelineError


@pytest.fixture
def calm_scenario(calm_three_turbines):
    return parse_scenario(calm_three_turbines)


class TestPerception:
    """Test cases for the per-turbine perception chain."""

    @pytest.mark.integration
    def test_estimates_match_rotor_geometry(self, small_turbine):
        perception = perceive_turbine(small_turbine, 0, PlannerParams(), SensorSection())
        assert len(perception.orientations) == 3
        for orientation, truth in zip(perception.orientations, small_turbine.blade_pitch_truth):
            assert angular_error(orientation.theta, truth) <= 2.0
        assert sorted(perception.blade_masks) == [0, 1, 2]
        assert perception.zone.radius == pytest.approx(40.0)
        assert perception.viewpoint.x == pytest.approx(40.0)

    @pytest.mark.integration
    def test_background_removed(self, small_turbine):
        perception = perceive_turbine(small_turbine, 0, PlannerParams(), SensorSection(resolution=256))
        assert np.array_equal(perception.foreground.data != 0, perception.image.data != 0)


class TestRunPipeline:
    """Test cases for whole scenario runs."""

    @pytest.mark.integration
    @pytest.mark.async_test
    async def test_calm_three_turbines(self, calm_scenario):
        result = await run_pipeline(calm_scenario)
        report = result.report
        assert report.blade_coverage >= 95.0
        assert report.uav_count == 3
        assert report.operator_count == 0
        assert len(result.logs) == 3
        assert result.plan.assignments == ((0,), (1,), (2,))
        assert report.total_time * 60.0 == pytest.approx(max(float(log.times[-1]) for log in result.logs))
        assert report.mean_deviation < 1e-6

    @pytest.mark.integration
    @pytest.mark.async_test
    async def test_every_route_inspects_its_blades(self, calm_scenario):
        result = await run_pipeline(calm_scenario)
        for route in result.plan.routes:
            kinds = [segment.kind for segment in route]
            assert kinds.count(SegmentKind.BLADE_SWEEP) == 3
            assert route[-1].end == route[0].start

    @pytest.mark.integration
    @pytest.mark.async_test
    async def test_fleet_is_faster_than_single_uav(self, calm_three_turbines):
        fleet = await run_pipeline(parse_scenario(calm_three_turbines))
        single = await run_pipeline(parse_scenario(dict(calm_three_turbines, uav_count=1)))
        assert fleet.report.total_time < 0.4 * single.report.total_time

    @pytest.mark.integration
    @pytest.mark.async_test
    async def test_stage_attributed_failure(self, calm_three_turbines):
        data = dict(calm_three_turbines, sensor={"area_threshold_fraction": 1.0})
        with pytest.raises(PipelineError) as excinfo:
            await run_pipeline(parse_scenario(data))
        assert excinfo.value.stage == "filter_by_area"
        assert excinfo.value.turbine_id == 0

    @pytest.mark.integration
    @pytest.mark.async_test
    async def test_weak_wind_scenario_runs(self):
        result = await run_pipeline(ConfigProfiles.create_profile("three_turbines_weak_wind"))
        assert result.report.uav_count == 3
        assert 0.0 < result.report.mean_deviation < 5.0
        assert result.report.blade_coverage >= 95.0


class TestSessionOutputs:
    """Test cases for files written by a run."""

    @pytest.mark.integration
    @pytest.mark.async_test
    async def test_output_files(self, calm_scenario, temp_dir):
        await run_inspection_session(calm_scenario, temp_dir, "csv", save_frames=True)
        names = {path.name for path in temp_dir.iterdir()}
        assert {
            "mission.csv",
            "metrics.csv",
            "orientations.csv",
            "flight_uav0.csv",
            "flight_uav1.csv",
            "flight_uav2.csv",
            "report.txt",
            "frames",
        } <= names
        assert (temp_dir / "frames" / "turbine0_image.pgm").read_bytes().startswith(b"P5")
        assert (temp_dir / "frames" / "turbine2_blade1.pbm").read_bytes().startswith(b"P4")
        orientations = (temp_dir / "orientations.csv").read_text(encoding="utf-8").splitlines()
        assert orientations[0] == "turbine_id,blade_index,theta_deg,tilt_class"
        assert len(orientations) == 1 + 9
        report = (temp_dir / "report.txt").read_text(encoding="utf-8")
        assert "final states:" in report
        for uav_id in range(3):
            assert f"  uav {uav_id}: final (" in report

    @pytest.mark.integration
    @pytest.mark.async_test
    async def test_json_lines_suffix(self, calm_scenario, temp_dir):
        await run_inspection_session(calm_scenario, temp_dir, "json-lines")
        assert (temp_dir / "metrics.jsonl").exists()
        assert not (temp_dir / "metrics.csv").exists()

    @pytest.mark.integration
    @pytest.mark.async_test
    async def test_runs_are_byte_identical(self, temp_dir):
        scenario = ConfigProfiles.create_profile("three_turbines_weak_wind")
        first, second = temp_dir / "first", temp_dir / "second"
        await run_inspection_session(scenario, first)
        await run_inspection_session(scenario, second)
        names = sorted(path.name for path in first.iterdir())
        assert names == sorted(path.name for path in second.iterdir())
        match, mismatch, errors = filecmp.cmpfiles(first, second, names, shallow=False)
        assert mismatch == [] and errors == []

    @pytest.mark.integration
    @pytest.mark.async_test
    async def test_seed_changes_gusts(self, temp_dir):
        scenario = ConfigProfiles.create_profile("three_turbines_weak_wind")
        await run_inspection_session(scenario, temp_dir / "a")
        await run_inspection_session(scenario.with_seed(7), temp_dir / "b")
        first = (temp_dir / "a" / "flight_uav0.csv").read_bytes()
        second = (temp_dir / "b" / "flight_uav0.csv").read_bytes()
        assert first != second
