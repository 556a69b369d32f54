"""
Pytest configuration and shared fixtures for turbine-inspect tests.
"""
import os
import tempfile
from pathlib import Path
from typing import Any, Callable, Dict, Generator, Optional, Sequence

import numpy as np
import pytest

from core.control import FlightLog
from core.geometry import Point3, TurbineModel
from core.trajectory import PlannerParams

# Test configuration
pytest_plugins = ["pytest_asyncio"]


@pytest.fixture
def temp_dir() -> Generator[Path, None, None]:
    """Create a temporary directory for tests."""
    with tempfile.TemporaryDirectory() as temp_dir:
        yield Path(temp_dir)


@pytest.fixture
def rotor_turbine() -> TurbineModel:
    """Three-blade turbine with hub at (0, 0, 100), 50 m blades, facing +x."""
    return TurbineModel.create(Point3(0.0, 0.0, 0.0), tower_height=100.0, blade_length=50.0)


@pytest.fixture
def small_turbine() -> TurbineModel:
    """Three-blade turbine with hub at (0, 0, 80), 40 m blades."""
    return TurbineModel.create(Point3(0.0, 0.0, 0.0), tower_height=80.0, blade_length=40.0)


@pytest.fixture
def planner() -> PlannerParams:
    """Default planner parameters."""
    return PlannerParams()


@pytest.fixture
def make_log() -> Callable[..., FlightLog]:
    """Factory for flight logs built from explicit positions."""

    def _make(
        positions: Sequence[Sequence[float]],
        references: Optional[Sequence[Sequence[float]]] = None,
        gazes: Optional[Sequence[Sequence[float]]] = None,
        dt: float = 1.0,
        uav_id: int = 0,
    ) -> FlightLog:
        pos = np.asarray(positions, dtype=float).reshape(-1, 3)
        n = len(pos)
        ref = pos.copy() if references is None else np.asarray(references, dtype=float).reshape(-1, 3)
        gaze = (
            np.tile([1.0, 0.0, 0.0], (n, 1))
            if gazes is None
            else np.asarray(gazes, dtype=float).reshape(-1, 3)
        )
        return FlightLog(
            uav_id=uav_id,
            dt=dt,
            times=np.arange(n) * dt,
            positions=pos,
            references=ref,
            controls=np.zeros((n, 3)),
            winds=np.zeros((n, 3)),
            gazes=gaze,
        )

    return _make


def _turbine_entry(x: float = 0.0, y: float = 0.0, **overrides: Any) -> Dict[str, Any]:
    entry: Dict[str, Any] = {"base": [x, y, 0.0], "tower_height": 80.0, "blade_length": 40.0}
    entry.update(overrides)
    return entry


@pytest.fixture
def turbine_entry() -> Callable[..., Dict[str, Any]]:
    """Factory for turbine entries in scenario-file form."""
    return _turbine_entry


@pytest.fixture
def minimal_scenario_data() -> Dict[str, Any]:
    """Smallest valid scenario: one turbine, everything else defaulted."""
    return {"turbines": [_turbine_entry()]}


@pytest.fixture
def calm_three_turbines() -> Dict[str, Any]:
    """Three turbines, three UAVs, no wind."""
    return {
        "label": "calm_three",
        "uav_count": 3,
        "seed": 7,
        "turbines": [_turbine_entry(0.0, 0.0), _turbine_entry(0.0, 300.0), _turbine_entry(0.0, 600.0)],
    }


def pytest_configure(config: Any) -> None:
    """Silence progress bars in test output."""
    os.environ.setdefault("TQDM_DISABLE", "1")
