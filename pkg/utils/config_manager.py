"""
Система управления конфигурацией сценариев инспекции (YAML и JSON).

Модуль хранит значения по умолчанию для всех подсистем и загружает файлы
сценариев: секции сливаются со значениями по умолчанию, неизвестные ключи
выводятся в лог как предупреждения, нарушения типов и диапазонов приводят
к ConfigError с именем ключа.
"""

import json
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import TYPE_CHECKING, Any, Dict, List, Optional, Tuple, Type, TypeVar, Union

import yaml

from utils.error_handling import ConfigError
from utils.logger import BASE_DIR, logger
from utils.validation import (
    require_choice,
    require_gain,
    require_int,
    require_mapping,
    require_number,
    require_text,
    require_vector,
    validate_scenario_path,
)

if TYPE_CHECKING:
    from core.control import PIDGains, WindModel
    from core.geometry import TurbineModel
    from core.metrics import CameraModel
    from core.trajectory import PlannerParams

# Базовые директории
SCENARIO_DIR = BASE_DIR / "scenarios"
SCENARIO_SUFFIXES = (".yaml", ".yml", ".json")

# Планировщик траекторий
DEFAULT_STANDOFF = 10.0  # m
PASS_SPACING = 5.0  # m
SIDES = 2
CRUISE_SPEED = 4.0  # m/s

# ПИД-регулятор и симуляция
KP = 1.2
KI = 0.2
KD = 0.4
DT = 0.05  # s
MAX_DT = 0.5  # s
INTEGRAL_LIMIT = 50.0  # m*s, ограничение интеграла по каждой оси
GUST_CORRELATION_TIME = 5.0  # s

# Камера инспекции (метрика покрытия)
FOV = 60.0  # deg
MIN_RANGE = 2.0  # m
MAX_RANGE = 25.0  # m
MAX_INCIDENCE = 60.0  # deg
SAMPLE_DENSITY = 2.0  # points/m

# Сенсор кадра сегментации
SENSOR_FOV = 110.0  # deg
SENSOR_RESOLUTION = 512  # px
MIN_RESOLUTION = 64  # px
AREA_THRESHOLD_FRACTION = 0.001

# Коды меток растра
LABEL_BACKGROUND = 0
LABEL_TOWER = 1
LABEL_NACELLE = 2
LABEL_BLADE_BASE = 10
MAX_BLADES = 255 - LABEL_BLADE_BASE

# Габариты конструкций
CHORD_RATIO = 0.08
TOWER_DIAMETER = 4.0  # m
NACELLE_LENGTH = 10.0  # m
NACELLE_HEIGHT = 4.0  # m

DEFAULT_SEED = 42
OUTPUT_FORMATS = ("csv", "json-lines")

S = TypeVar("S")


@dataclass
class TurbineSection:
    """Описание одной ветроустановки в файле сценария."""

    base: List[float] = field(default_factory=lambda: [0.0, 0.0, 0.0])
    tower_height: float = 80.0
    blade_length: float = 40.0
    blade_count: int = 3
    nacelle_yaw: float = 0.0
    rotor_phase: float = 90.0
    blade_pitch_truth: Optional[List[float]] = None
    blade_aero_pitch: Optional[List[float]] = None
    tower_diameter: float = TOWER_DIAMETER
    nacelle_length: float = NACELLE_LENGTH
    nacelle_height: float = NACELLE_HEIGHT


@dataclass
class PlannerSection:
    """Параметры планировщика траекторий."""

    standoff: float = DEFAULT_STANDOFF
    pass_spacing: float = PASS_SPACING
    sides: int = SIDES
    cruise_speed: float = CRUISE_SPEED
    approach_azimuth: Optional[float] = None


@dataclass
class ControlSection:
    """Коэффициенты ПИД и шаг симуляции."""

    kp: Union[float, List[float]] = KP
    ki: Union[float, List[float]] = KI
    kd: Union[float, List[float]] = KD
    dt: float = DT
    integral_limit: float = INTEGRAL_LIMIT


@dataclass
class WindSection:
    """Средний ветер и порывы."""

    mean: List[float] = field(default_factory=lambda: [0.0, 0.0, 0.0])
    gust_amplitude: float = 0.0
    gust_correlation_time: float = GUST_CORRELATION_TIME


@dataclass
class CameraSection:
    """Камера инспекции для метрики покрытия."""

    fov: float = FOV
    min_range: float = MIN_RANGE
    max_range: float = MAX_RANGE
    max_incidence: float = MAX_INCIDENCE
    sample_density: float = SAMPLE_DENSITY


@dataclass
class SensorSection:
    """Сенсор, снимающий кадр сегментации из точки съемки."""

    fov: float = SENSOR_FOV
    resolution: int = SENSOR_RESOLUTION
    area_threshold_fraction: float = AREA_THRESHOLD_FRACTION


SECTIONS: Dict[str, type] = {
    "planner": PlannerSection,
    "control": ControlSection,
    "wind": WindSection,
    "camera": CameraSection,
    "sensor": SensorSection,
}
TOP_LEVEL_KEYS = ("label", "terrain", "uav_count", "seed", "turbines") + tuple(SECTIONS)


@dataclass(frozen=True)
class Scenario:
    """Полностью проверенный сценарий инспекции."""

    turbines: Tuple["TurbineModel", ...]
    uav_count: int
    wind: "WindModel"
    planner: "PlannerParams"
    gains: "PIDGains"
    camera: "CameraModel"
    dt: float
    seed: int
    label: str
    terrain: str = ""
    integral_limit: float = INTEGRAL_LIMIT
    sample_density: float = SAMPLE_DENSITY
    sensor: SensorSection = field(default_factory=SensorSection)

    def with_seed(self, seed: int) -> "Scenario":
        """Копия сценария с другим зерном (зерно ветра меняется вместе с ним)."""
        return replace(self, seed=seed, wind=replace(self.wind, seed=seed))


def _merge_section(section_cls: Type[S], raw: Any, prefix: str) -> S:
    """
    Объединяет секцию файла со значениями по умолчанию.

    Обновляются только известные ключи, остальные попадают в лог.
    """
    data = require_mapping(raw, prefix) if raw is not None else {}
    current = asdict(section_cls())  # type: ignore[call-overload]
    for key, value in data.items():
        if key in current:
            current[key] = value
        else:
            logger.warning(f"Неизвестный параметр сценария: {prefix}.{key}")
    return section_cls(**current)


def _build_turbine(raw: Any, key: str) -> "TurbineModel":
    from core.geometry import Point3, TurbineModel

    section = _merge_section(TurbineSection, raw, key)
    base = require_vector(section.base, f"{key}.base")
    height = require_number(section.tower_height, f"{key}.tower_height", minimum=0.0, exclusive_minimum=True)
    length = require_number(section.blade_length, f"{key}.blade_length", minimum=0.0, exclusive_minimum=True)
    count = require_int(section.blade_count, f"{key}.blade_count", minimum=1)
    if count > MAX_BLADES:
        raise ConfigError(f"{key}.blade_count", f"must be <= {MAX_BLADES}")
    yaw = require_number(section.nacelle_yaw, f"{key}.nacelle_yaw", minimum=0.0, maximum=360.0, exclusive_maximum=True)
    phase = require_number(section.rotor_phase, f"{key}.rotor_phase", minimum=0.0, maximum=360.0, exclusive_maximum=True)

    pitch_truth = None
    if section.blade_pitch_truth is not None:
        pitch_truth = require_vector(section.blade_pitch_truth, f"{key}.blade_pitch_truth", length=count)
    extra: Dict[str, Any] = {
        "tower_diameter": require_number(section.tower_diameter, f"{key}.tower_diameter", minimum=0.0, exclusive_minimum=True),
        "nacelle_length": require_number(section.nacelle_length, f"{key}.nacelle_length", minimum=0.0, exclusive_minimum=True),
        "nacelle_height": require_number(section.nacelle_height, f"{key}.nacelle_height", minimum=0.0, exclusive_minimum=True),
    }
    if section.blade_aero_pitch is not None:
        extra["blade_aero_pitch"] = require_vector(section.blade_aero_pitch, f"{key}.blade_aero_pitch", length=count)

    return TurbineModel.create(
        Point3(*base),
        tower_height=height,
        blade_length=length,
        blade_count=count,
        nacelle_yaw=yaw,
        rotor_phase=phase,
        blade_pitch_truth=pitch_truth,
        **extra,
    )


def parse_scenario(data: Any, default_label: str = "scenario") -> Scenario:
    """
    Строит Scenario из разобранного YAML/JSON словаря.

    Args:
        data: Содержимое файла сценария
        default_label: Метка сценария, если ключ label не указан

    Returns:
        Scenario: Проверенный сценарий со значениями по умолчанию

    Raises:
        ConfigError: При ошибке типа, диапазона или отсутствии обязательного ключа
    """
    from core.control import PIDGains, WindModel
    from core.metrics import CameraModel
    from core.trajectory import PlannerParams

    data = require_mapping(data, "scenario")
    for key in data:
        if key not in TOP_LEVEL_KEYS:
            logger.warning(f"Неизвестный параметр сценария: {key}")

    if "turbines" not in data:
        raise ConfigError("turbines", "required key is missing")
    raw_turbines = data["turbines"]
    if not isinstance(raw_turbines, list) or not raw_turbines:
        raise ConfigError("turbines", "expected a non-empty list")
    turbines = tuple(_build_turbine(raw, f"turbines[{i}]") for i, raw in enumerate(raw_turbines))

    uav_count = require_int(data.get("uav_count", 1), "uav_count", minimum=1)
    seed = require_int(data.get("seed", DEFAULT_SEED), "seed", minimum=0)
    label = require_text(data.get("label", default_label), "label")
    terrain = require_text(data.get("terrain", ""), "terrain")

    planner = _merge_section(PlannerSection, data.get("planner"), "planner")
    planner_params = PlannerParams(
        standoff=require_number(planner.standoff, "planner.standoff", minimum=0.0, exclusive_minimum=True),
        pass_spacing=require_number(planner.pass_spacing, "planner.pass_spacing", minimum=0.0, exclusive_minimum=True),
        sides=require_choice(planner.sides, "planner.sides", (1, 2)),
        cruise_speed=require_number(planner.cruise_speed, "planner.cruise_speed", minimum=0.0, exclusive_minimum=True),
        approach_azimuth=(
            None
            if planner.approach_azimuth is None
            else require_number(planner.approach_azimuth, "planner.approach_azimuth", minimum=0.0, maximum=360.0, exclusive_maximum=True)
        ),
    )

    control = _merge_section(ControlSection, data.get("control"), "control")
    gains = PIDGains(
        kp=require_gain(control.kp, "control.kp"),
        ki=require_gain(control.ki, "control.ki"),
        kd=require_gain(control.kd, "control.kd"),
    )
    dt = require_number(control.dt, "control.dt", minimum=0.0, maximum=MAX_DT, exclusive_minimum=True)
    integral_limit = require_number(control.integral_limit, "control.integral_limit", minimum=0.0, exclusive_minimum=True)

    wind_section = _merge_section(WindSection, data.get("wind"), "wind")
    wind = WindModel(
        mean=require_vector(wind_section.mean, "wind.mean"),  # type: ignore[arg-type]
        gust_amplitude=require_number(wind_section.gust_amplitude, "wind.gust_amplitude", minimum=0.0),
        gust_correlation_time=require_number(
            wind_section.gust_correlation_time, "wind.gust_correlation_time", minimum=0.0, exclusive_minimum=True
        ),
        seed=seed,
    )

    camera_section = _merge_section(CameraSection, data.get("camera"), "camera")
    fov = require_number(camera_section.fov, "camera.fov", minimum=0.0, maximum=180.0, exclusive_minimum=True, exclusive_maximum=True)
    min_range = require_number(camera_section.min_range, "camera.min_range", minimum=0.0)
    max_range = require_number(camera_section.max_range, "camera.max_range", minimum=0.0, exclusive_minimum=True)
    if not min_range < max_range:
        raise ConfigError("camera.min_range", "must be < camera.max_range")
    camera = CameraModel(
        fov=fov,
        max_range=max_range,
        min_range=min_range,
        max_incidence=require_number(
            camera_section.max_incidence, "camera.max_incidence", minimum=0.0, maximum=90.0, exclusive_minimum=True
        ),
    )
    sample_density = require_number(camera_section.sample_density, "camera.sample_density", minimum=0.0, exclusive_minimum=True)

    sensor = _merge_section(SensorSection, data.get("sensor"), "sensor")
    require_number(sensor.fov, "sensor.fov", minimum=0.0, maximum=180.0, exclusive_minimum=True, exclusive_maximum=True)
    require_int(sensor.resolution, "sensor.resolution", minimum=MIN_RESOLUTION)
    require_number(sensor.area_threshold_fraction, "sensor.area_threshold_fraction", minimum=0.0, maximum=1.0)

    return Scenario(
        turbines=turbines,
        uav_count=uav_count,
        wind=wind,
        planner=planner_params,
        gains=gains,
        camera=camera,
        dt=dt,
        seed=seed,
        label=label,
        terrain=terrain,
        integral_limit=integral_limit,
        sample_density=sample_density,
        sensor=sensor,
    )


def read_scenario_data(path: Path) -> Any:
    """Читает файл сценария: YAML для .yaml/.yml, JSON для .json."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            if path.suffix.lower() == ".json":
                return json.load(f)
            return yaml.safe_load(f)
    except (yaml.YAMLError, json.JSONDecodeError) as e:
        raise ConfigError(path.name, f"parse error: {e}") from e


def load_scenario(path: Union[str, Path]) -> Scenario:
    """
    Загружает и проверяет файл сценария.

    Args:
        path: Путь к файлу YAML или JSON

    Returns:
        Scenario: Проверенный сценарий

    Raises:
        FileNotFoundError: Если файл не найден
        ConfigError: При ошибке разбора или проверки (с именем ключа)
    """
    path = validate_scenario_path(path)
    data = read_scenario_data(path)
    scenario = parse_scenario(data, default_label=path.stem)
    logger.info(
        f"Сценарий '{scenario.label}' загружен из {path}: "
        f"турбин {len(scenario.turbines)}, БПЛА {scenario.uav_count}"
    )
    return scenario


def scenario_to_dict(scenario: Scenario) -> Dict[str, Any]:
    """Сериализует сценарий в словарь в формате файла сценария."""
    turbines = []
    for turbine in scenario.turbines:
        entry: Dict[str, Any] = {
            "base": [turbine.tower_base.x, turbine.tower_base.y, turbine.tower_base.z],
            "tower_height": turbine.tower_height,
            "blade_length": turbine.blade_length,
            "blade_count": turbine.blade_count,
            "nacelle_yaw": turbine.nacelle_yaw,
            "rotor_phase": turbine.rotor_phase,
            "blade_pitch_truth": list(turbine.blade_pitch_truth),
            "tower_diameter": turbine.tower_diameter,
            "nacelle_length": turbine.nacelle_length,
            "nacelle_height": turbine.nacelle_height,
        }
        if turbine.blade_aero_pitch:
            entry["blade_aero_pitch"] = list(turbine.blade_aero_pitch)
        turbines.append(entry)

    planner = {
        "standoff": scenario.planner.standoff,
        "pass_spacing": scenario.planner.pass_spacing,
        "sides": scenario.planner.sides,
        "cruise_speed": scenario.planner.cruise_speed,
    }
    if scenario.planner.approach_azimuth is not None:
        planner["approach_azimuth"] = scenario.planner.approach_azimuth

    def _gain(value: Any) -> Any:
        return list(value) if isinstance(value, tuple) else value

    return {
        "label": scenario.label,
        "terrain": scenario.terrain,
        "uav_count": scenario.uav_count,
        "seed": scenario.seed,
        "turbines": turbines,
        "planner": planner,
        "control": {
            "kp": _gain(scenario.gains.kp),
            "ki": _gain(scenario.gains.ki),
            "kd": _gain(scenario.gains.kd),
            "dt": scenario.dt,
            "integral_limit": scenario.integral_limit,
        },
        "wind": {
            "mean": list(scenario.wind.mean),
            "gust_amplitude": scenario.wind.gust_amplitude,
            "gust_correlation_time": scenario.wind.gust_correlation_time,
        },
        "camera": {
            "fov": scenario.camera.fov,
            "min_range": scenario.camera.min_range,
            "max_range": scenario.camera.max_range,
            "max_incidence": scenario.camera.max_incidence,
            "sample_density": scenario.sample_density,
        },
        "sensor": asdict(scenario.sensor),
    }


def save_scenario(scenario: Scenario, path: Path) -> Path:
    """Сохраняет сценарий в YAML или JSON (по расширению файла)."""
    data = scenario_to_dict(scenario)
    with open(path, "w", encoding="utf-8") as f:
        if path.suffix.lower() == ".json":
            json.dump(data, f, ensure_ascii=False, indent=2)
        else:
            yaml.safe_dump(data, f, default_flow_style=False, allow_unicode=True, sort_keys=False, indent=2)
    logger.info(f"Сценарий '{scenario.label}' сохранен в {path}")
    return path


def find_scenario(name: str, directory: Optional[Path] = None) -> Optional[Path]:
    """Ищет файл сценария по имени в директории сценариев."""
    directory = directory or SCENARIO_DIR
    for suffix in SCENARIO_SUFFIXES:
        candidate = directory / f"{name}{suffix}"
        if candidate.exists():
            return candidate
    return None
