"""
Unit tests for the PID tracker, the gust model and the flight simulator.
"""
import numpy as np
import pytest

from core.control import (
    FlightLog,
    PIDGains,
    PIDState,
    WindModel,
    WindStream,
    pid_step,
    simulate_fleet,
    simulate_flight,
    simulate_route,
    wind_sample,
)
from core.geometry import Point3
from core.metrics import mean_deviation
from core.trajectory import MissionPlan, SegmentKind, TrajectorySegment, plan_return
from utils.error_handling import ControlError

ORIGIN = Point3(0.0, 0.0, 50.0)
FAR_END = Point3(200.0, 0.0, 50.0)


@pytest.fixture
def crosswind_leg():
    """A 200 m straight leg flown at 4 m/s (50 s)."""
    return [plan_return(ORIGIN, FAR_END, 50.0)]


def _deviation(log: FlightLog) -> float:
    return float(np.linalg.norm(log.positions[-1] - log.references[-1]))


def _out_and_back(start: Point3, end: Point3, leg_time: float):
    out = plan_return(start, end, leg_time)
    transit = TrajectorySegment(SegmentKind.TRANSIT, out.waypoints, out.duration)
    return (transit, plan_return(end, start, leg_time))


def _pid_outputs(gains: PIDGains, errors, dt: float = 0.1):
    state = PIDState()
    outputs = []
    for error in errors:
        control, state = pid_step(gains, state, error, dt)
        outputs.append(control)
    return outputs


class TestPID:
    """Test cases for a single controller step."""

    @pytest.mark.unit
    def test_proportional(self):
        control, state = pid_step(PIDGains(2.0, 0.0, 0.0), PIDState(), [1.5, 0.0, -1.0], 0.1)
        assert control == pytest.approx([3.0, 0.0, -2.0])
        assert state.started

    @pytest.mark.unit
    def test_integral_accumulates(self):
        gains = PIDGains(0.0, 1.0, 0.0)
        state = PIDState()
        for _ in range(10):
            control, state = pid_step(gains, state, [1.0, 1.0, 1.0], 0.1)
        assert control == pytest.approx([1.0, 1.0, 1.0])

    @pytest.mark.unit
    def test_integral_is_clamped(self):
        gains = PIDGains(0.0, 1.0, 0.0)
        control, state = pid_step(gains, PIDState(), [100.0, -100.0, 0.0], 1.0)
        assert control == pytest.approx([50.0, -50.0, 0.0])
        control, _ = pid_step(gains, state, [100.0, -100.0, 0.0], 1.0, integral_limit=10.0)
        assert control == pytest.approx([10.0, -10.0, 0.0])

    @pytest.mark.unit
    def test_derivative_is_zero_on_first_step(self):
        gains = PIDGains(0.0, 0.0, 1.0)
        control, state = pid_step(gains, PIDState(), [4.0, 0.0, 0.0], 0.5)
        assert control == pytest.approx([0.0, 0.0, 0.0])
        control, _ = pid_step(gains, state, [5.0, 0.0, 0.0], 0.5)
        assert control == pytest.approx([2.0, 0.0, 0.0])

    @pytest.mark.unit
    def test_per_axis_gains(self):
        control, _ = pid_step(PIDGains((1.0, 2.0, 3.0), 0.0, 0.0), PIDState(), [1.0, 1.0, 1.0], 0.1)
        assert control == pytest.approx([1.0, 2.0, 3.0])

    @pytest.mark.unit
    def test_invalid_inputs(self):
        with pytest.raises(ControlError):
            pid_step(PIDGains(), PIDState(), [0.0, 0.0, 0.0], 0.0)
        with pytest.raises(ControlError):
            PIDGains(kp=-1.0)
        with pytest.raises(ControlError):
            PIDGains(ki=(1.0, float("nan"), 1.0))

    @pytest.mark.unit
    def test_zero_gains(self):
        control, _ = pid_step(PIDGains.zero(), PIDState(), [3.0, 2.0, 1.0], 0.1)
        assert not control.any()

    @pytest.mark.unit
    def test_output_scales_with_error(self):
        gains = PIDGains((1.0, 2.0, 0.5), (0.3, 0.1, 0.2), (0.4, 0.0, 1.0))
        errors = [[0.5, -1.0, 2.0], [1.0, 0.25, -0.5], [-0.2, 0.3, 0.1]]
        base = _pid_outputs(gains, errors)
        scaled = _pid_outputs(gains, [[3.0 * e for e in error] for error in errors])
        for a, b in zip(base, scaled):
            assert b == pytest.approx(3.0 * a)

    @pytest.mark.unit
    def test_axes_are_independent(self):
        gains = PIDGains((1.0, 2.0, 0.5), (0.3, 0.1, 0.2), (0.4, 0.3, 1.0))
        errors = [[0.5, -1.0, 2.0], [1.0, 0.25, -0.5], [-0.2, 0.3, 0.1]]
        disturbed = [[9.0 * (k + 1), y, z] for k, (_, y, z) in enumerate(errors)]
        for a, b in zip(_pid_outputs(gains, errors), _pid_outputs(gains, disturbed)):
            assert b[1:] == pytest.approx(a[1:])
            assert b[0] != pytest.approx(a[0])


class TestWind:
    """Test cases for the gust process."""

    @pytest.mark.unit
    def test_calm_gusts_return_mean(self):
        model = WindModel(mean=(1.0, -2.0, 0.5))
        stream = WindStream(model)
        for t in (0.0, 0.5, 1.0, 10.0):
            assert wind_sample(model, t, stream) == pytest.approx([1.0, -2.0, 0.5])
        assert model.mean_speed == pytest.approx(np.sqrt(5.25))

    @pytest.mark.unit
    @pytest.mark.slow
    def test_gust_standard_deviation(self):
        model = WindModel(gust_amplitude=2.0, gust_correlation_time=5.0, seed=3)
        stream = WindStream(model)
        samples = np.array([stream.advance(k * 0.05) for k in range(100_000)])
        std = samples.std(axis=0)
        assert np.all(np.abs(std - 2.0) <= 0.15 * 2.0)

    @pytest.mark.unit
    def test_streams_are_reproducible_per_uav(self):
        model = WindModel(gust_amplitude=1.0, seed=11)
        first = [WindStream(model, 0).advance(t) for t in (0.0,)]
        again = [WindStream(model, 0).advance(t) for t in (0.0,)]
        other = [WindStream(model, 1).advance(t) for t in (0.0,)]
        assert np.array_equal(first[0], again[0])
        assert not np.array_equal(first[0], other[0])

    @pytest.mark.unit
    def test_time_must_not_decrease(self):
        model = WindModel(gust_amplitude=1.0)
        stream = WindStream(model)
        stream.advance(1.0)
        with pytest.raises(ControlError):
            stream.advance(0.5)
        with pytest.raises(ControlError):
            WindStream(model).advance(-1.0)

    @pytest.mark.unit
    def test_stream_bound_to_model(self):
        stream = WindStream(WindModel())
        with pytest.raises(ControlError):
            wind_sample(WindModel(), 0.0, stream)

    @pytest.mark.unit
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"mean": (float("inf"), 0.0, 0.0)},
            {"gust_amplitude": -0.1},
            {"gust_correlation_time": 0.0},
        ],
    )
    def test_invalid_model(self, kwargs):
        with pytest.raises(ControlError):
            WindModel(**kwargs)


class TestSimulateRoute:
    """Test cases for closed-loop flight along a route."""

    @pytest.mark.unit
    def test_calm_flight_tracks_reference(self, crosswind_leg):
        log = simulate_route(crosswind_leg, ORIGIN, 0, PIDGains(), WindModel(), dt=0.05)
        assert len(log) == 1001
        assert log.times[-1] == pytest.approx(50.0)
        assert np.allclose(log.positions, log.references, atol=1e-9)
        assert log.positions[-1] == pytest.approx(FAR_END.as_array())

    @pytest.mark.unit
    def test_crosswind_is_rejected_with_integral_action(self, crosswind_leg):
        wind = WindModel(mean=(0.0, 5.0, 0.0))
        log = simulate_route(crosswind_leg, ORIGIN, 0, PIDGains(), wind, dt=0.05)
        assert _deviation(log) <= 0.1

    @pytest.mark.unit
    def test_crosswind_offset_without_integral(self, crosswind_leg):
        wind = WindModel(mean=(0.0, 5.0, 0.0))
        log = simulate_route(crosswind_leg, ORIGIN, 0, PIDGains(1.2, 0.0, 0.4), wind, dt=0.05)
        assert _deviation(log) == pytest.approx(5.0 / 1.2, abs=0.05)

    @pytest.mark.unit
    def test_integral_limit_caps_wind_rejection(self, crosswind_leg):
        # integral authority ki * limit = 2 m/s of the 5 m/s crosswind
        wind = WindModel(mean=(0.0, 5.0, 0.0))
        log = simulate_route(crosswind_leg, ORIGIN, 0, PIDGains(), wind, dt=0.05, integral_limit=10.0)
        assert _deviation(log) == pytest.approx((5.0 - 0.2 * 10.0) / 1.2, abs=0.05)

    @pytest.mark.unit
    def test_zero_gains_drift_with_the_wind(self, crosswind_leg):
        wind = WindModel(mean=(0.0, 3.0, 4.0))
        log = simulate_route(crosswind_leg, ORIGIN, 0, PIDGains.zero(), wind, dt=0.5)
        drift = np.linalg.norm(log.positions - log.references, axis=1)
        assert drift == pytest.approx(5.0 * log.times)

    @pytest.mark.unit
    def test_pid_halves_gusty_deviation(self, crosswind_leg):
        wind = WindModel(mean=(2.0, 2.0, 0.0), gust_amplitude=1.5, gust_correlation_time=3.0, seed=42)
        tracked = simulate_route(crosswind_leg, ORIGIN, 0, PIDGains(), wind, dt=0.05)
        drifting = simulate_route(crosswind_leg, ORIGIN, 0, PIDGains.zero(), wind, dt=0.05)
        assert mean_deviation(tracked) <= 0.5 * mean_deviation(drifting)

    @pytest.mark.unit
    def test_log_columns(self, crosswind_leg):
        log = simulate_route(crosswind_leg, ORIGIN, 4, PIDGains(), WindModel(), dt=0.5)
        assert log.uav_id == 4
        assert log.dt == 0.5
        assert log.gazes[0] == pytest.approx([1.0, 0.0, 0.0])
        assert log.final_state().position.x == pytest.approx(200.0)

    @pytest.mark.unit
    def test_empty_route_hovers_at_origin(self):
        log = simulate_route([], ORIGIN, 0, PIDGains(), WindModel())
        assert len(log) == 1
        assert log.positions[0] == pytest.approx(ORIGIN.as_array())

    @pytest.mark.unit
    @pytest.mark.parametrize("dt", [0.0, -0.1, 0.6])
    def test_dt_range(self, crosswind_leg, dt):
        with pytest.raises(ControlError):
            simulate_route(crosswind_leg, ORIGIN, 0, PIDGains(), WindModel(), dt=dt)

    @pytest.mark.unit
    def test_log_is_read_only(self, crosswind_leg):
        log = simulate_route(crosswind_leg, ORIGIN, 0, PIDGains(), WindModel(), dt=0.5)
        with pytest.raises(ValueError):
            log.positions[0, 0] = 1.0


class TestFlightLog:
    """Test cases for flight log validation."""

    @pytest.mark.unit
    def test_shape_mismatch(self):
        with pytest.raises(ControlError):
            FlightLog(0, 1.0, np.arange(2.0), np.zeros((2, 3)), np.zeros((3, 3)), np.zeros((2, 3)), np.zeros((2, 3)), np.zeros((2, 3)))

    @pytest.mark.unit
    def test_times_must_increase(self, make_log):
        with pytest.raises(ControlError):
            FlightLog(0, 1.0, np.array([0.0, 0.0]), *(np.zeros((2, 3)) for _ in range(5)))
        assert len(make_log([[0, 0, 0], [1, 0, 0]])) == 2

    @pytest.mark.unit
    def test_empty_log(self):
        with pytest.raises(ControlError):
            FlightLog(0, 1.0, np.zeros(0), *(np.zeros((0, 3)) for _ in range(5)))


class TestFleet:
    """Test cases for simulating several UAVs."""

    @pytest.fixture
    def two_uav_plan(self):
        first = _out_and_back(ORIGIN, FAR_END, 50.0)
        second = _out_and_back(FAR_END, ORIGIN, 25.0)
        return MissionPlan(routes=(first, second), origins=(ORIGIN, FAR_END))

    @pytest.mark.unit
    @pytest.mark.async_test
    async def test_fleet_matches_sequential_flight(self, two_uav_plan):
        wind = WindModel(mean=(0.0, 2.0, 0.0), gust_amplitude=1.0, seed=5)
        fleet = await simulate_fleet(two_uav_plan, PIDGains(), wind, 0.1)
        sequential = simulate_flight(two_uav_plan, PIDGains(), wind, 0.1)
        assert [log.uav_id for log in fleet] == [0, 1]
        for a, b in zip(fleet, sequential):
            assert np.array_equal(a.positions, b.positions)
            assert np.array_equal(a.winds, b.winds)
        assert len(fleet[1]) == 501

    @pytest.mark.unit
    @pytest.mark.async_test
    async def test_fleet_rejects_bad_dt(self, two_uav_plan):
        with pytest.raises(ControlError):
            await simulate_fleet(two_uav_plan, PIDGains(), WindModel(), 1.0)
        with pytest.raises(ControlError):
            simulate_flight(two_uav_plan, PIDGains(), WindModel(), 1.0)
