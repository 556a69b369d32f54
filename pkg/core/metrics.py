"""
Метрики инспекции: время, длина траектории, покрытие поверхности лопастей,
среднее отклонение от плановой траектории и сравнительные отчеты.
"""

import math
from dataclasses import astuple, dataclass, fields
from typing import List, Optional, Sequence, Tuple

import numpy as np

from core.control import FlightLog
from core.geometry import TurbineModel, blade_tips
from utils.config_manager import FOV, MAX_INCIDENCE, MAX_RANGE, MIN_RANGE, SAMPLE_DENSITY
from utils.error_handling import MetricsError

# Число пар (отсчет, точка) в одном векторизованном блоке проверки видимости
_COVERAGE_CHUNK = 1_000_000


@dataclass(frozen=True)
class CameraModel:
    """Камера инспекции: угол обзора, рабочий диапазон дальностей, допустимый угол падения."""

    fov: float = FOV
    max_range: float = MAX_RANGE
    min_range: float = MIN_RANGE
    max_incidence: float = MAX_INCIDENCE

    def __post_init__(self) -> None:
        if not 0.0 < self.fov < 180.0:
            raise MetricsError("camera fov must be in (0, 180)")
        if not self.max_range > 0:
            raise MetricsError("camera max_range must be > 0")
        if not self.min_range >= 0:
            raise MetricsError("camera min_range must be >= 0")
        if not self.min_range < self.max_range:
            raise MetricsError("camera min_range must be < max_range")
        if not 0.0 < self.max_incidence <= 90.0:
            raise MetricsError("camera max_incidence must be in (0, 90]")

    def footprint(self, distance: float) -> float:
        """Ширина полосы обзора на заданной дистанции."""
        return 2.0 * distance * math.tan(math.radians(self.fov) / 2.0)


@dataclass(frozen=True)
class MetricsReport:
    """Четверка метрик инспекции и численность флота/операторов."""

    total_time: float
    total_length: float
    blade_coverage: float
    mean_deviation: float
    uav_count: int
    operator_count: int = 0

    def __post_init__(self) -> None:
        for item in fields(self):
            if getattr(self, item.name) < 0:
                raise MetricsError(f"{item.name} must be >= 0")
        if self.blade_coverage > 100.0:
            raise MetricsError("blade_coverage must be <= 100")

    @classmethod
    def columns(cls) -> List[str]:
        return [item.name for item in fields(cls)]

    def values(self) -> Tuple[float, ...]:
        return astuple(self)


def path_length(log: FlightLog) -> float:
    """Сумма расстояний между последовательными фактическими позициями."""
    if len(log) < 2:
        return 0.0
    return float(np.linalg.norm(np.diff(log.positions, axis=0), axis=1).sum())


def inspection_time(logs: Sequence[FlightLog]) -> float:
    """Время инспекции флота в минутах: максимум по БПЛА, они летают параллельно."""
    if not logs:
        raise MetricsError("no flight logs")
    return max(float(log.times[-1] - log.times[0]) for log in logs) / 60.0


def mean_deviation(log: FlightLog) -> float:
    """Среднее по отсчетам расстояние между фактической и опорной позицией."""
    return float(np.linalg.norm(log.positions - log.references, axis=1).mean())


def pooled_mean_deviation(logs: Sequence[FlightLog]) -> float:
    """Среднее отклонение по всем отсчетам всех БПЛА."""
    if not logs:
        raise MetricsError("no flight logs")
    total = sum(float(np.linalg.norm(log.positions - log.references, axis=1).sum()) for log in logs)
    return total / sum(len(log) for log in logs)


def blade_surface_points(
    turbine: TurbineModel, blade_index: int, sample_density: float
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Точки поверхности лопасти: ceil(L·density) точек вдоль оси на каждой из двух
    сторон, нормали сторон ±d (нормаль плоскости ротора).
    """
    if not sample_density > 0:
        raise MetricsError("sample_density must be > 0")
    hub = turbine.hub_position.as_array()
    tip = blade_tips(turbine)[blade_index].as_array()
    count = math.ceil(turbine.blade_length * sample_density)
    fractions = (np.arange(count) + 0.5) / count
    along = hub + fractions[:, None] * (tip - hub)
    normal = turbine.rotor_normal
    points = np.concatenate([along, along])
    normals = np.concatenate([np.tile(normal, (count, 1)), np.tile(-normal, (count, 1))])
    return points, normals


def visible_points(
    points: np.ndarray,
    normals: np.ndarray,
    cameras: np.ndarray,
    gazes: np.ndarray,
    camera: CameraModel,
) -> np.ndarray:
    """
    Маска точек, видимых хотя бы из одной позы: дальность в [min_range, max_range],
    точка внутри конуса обзора и угол падения не больше max_incidence.
    """
    covered = np.zeros(len(points), dtype=bool)
    if len(cameras) == 0 or len(points) == 0:
        return covered
    cos_half_fov = math.cos(math.radians(camera.fov) / 2.0)
    cos_incidence = math.cos(math.radians(camera.max_incidence))
    chunk = max(1, _COVERAGE_CHUNK // len(points))
    for start in range(0, len(cameras), chunk):
        rays = points[None, :, :] - cameras[start : start + chunk, None, :]
        distance = np.linalg.norm(rays, axis=2)
        in_range = (distance >= camera.min_range) & (distance <= camera.max_range)
        in_cone = np.einsum("kmj,kj->km", rays, gazes[start : start + chunk]) >= distance * cos_half_fov
        facing = -np.einsum("kmj,mj->km", rays, normals) >= distance * cos_incidence
        covered |= np.any(in_range & in_cone & facing, axis=0)
        if covered.all():
            break
    return covered


def blade_coverage(
    logs: Sequence[FlightLog],
    turbine: TurbineModel,
    blade_index: int,
    camera: CameraModel,
    sample_density: float = SAMPLE_DENSITY,
) -> float:
    """Доля (в процентах) покрытых точек одной лопасти."""
    points, normals = blade_surface_points(turbine, blade_index, sample_density)
    if not logs:
        return 0.0
    cameras = np.concatenate([log.positions for log in logs])
    gazes = np.concatenate([log.gazes for log in logs])
    covered = visible_points(points, normals, cameras, gazes, camera)
    return 100.0 * float(np.count_nonzero(covered)) / len(points)


def surface_coverage(
    logs: Sequence[FlightLog],
    turbines: Sequence[TurbineModel],
    camera: CameraModel,
    sample_density: float = SAMPLE_DENSITY,
) -> float:
    """Покрытие поверхности лопастей в процентах, усредненное по всем лопастям."""
    if not sample_density > 0:
        raise MetricsError("sample_density must be > 0")
    percentages = [
        blade_coverage(logs, turbine, index, camera, sample_density)
        for turbine in turbines
        for index in range(turbine.blade_count)
    ]
    if not percentages:
        return 0.0
    return float(np.mean(percentages))


def build_report(
    logs: Sequence[FlightLog],
    coverage: float,
    uav_count: int,
    operator_count: int = 0,
) -> MetricsReport:
    """Собирает отчет по журналам полета и уже вычисленному покрытию."""
    return MetricsReport(
        total_time=inspection_time(logs),
        total_length=sum(path_length(log) for log in logs),
        blade_coverage=min(coverage, 100.0),
        mean_deviation=pooled_mean_deviation(logs),
        uav_count=uav_count,
        operator_count=operator_count,
    )


def percent_change(baseline: float, value: float) -> Optional[float]:
    """Изменение относительно базового значения, %; None при нулевой базе и ненулевом значении."""
    if baseline == 0:
        return 0.0 if value == 0 else None
    return (value - baseline) / baseline * 100.0


@dataclass(frozen=True)
class ComparisonRow:
    label: str
    report: MetricsReport
    changes: Tuple[Optional[float], ...]


@dataclass(frozen=True)
class ComparisonTable:
    """Сравнение отчетов относительно первого (базового)."""

    rows: Tuple[ComparisonRow, ...]

    @staticmethod
    def header() -> List[str]:
        header = ["label"]
        for column in MetricsReport.columns():
            header += [column, f"{column}_change_pct"]
        return header

    def records(self) -> List[List[object]]:
        records: List[List[object]] = []
        for row in self.rows:
            record: List[object] = [row.label]
            for value, change in zip(row.report.values(), row.changes):
                record += [value, change]
            records.append(record)
        return records


def compare_report(reports: Sequence[MetricsReport], labels: Sequence[str]) -> ComparisonTable:
    """Значения метрик и их изменение в процентах относительно первого отчета."""
    if len(reports) != len(labels):
        raise MetricsError("reports and labels must have equal length")
    if len(reports) < 2:
        raise MetricsError("comparison needs at least two reports")
    baseline = reports[0].values()
    rows = tuple(
        ComparisonRow(
            label=label,
            report=report,
            changes=tuple(percent_change(b, v) for b, v in zip(baseline, report.values())),
        )
        for report, label in zip(reports, labels)
    )
    return ComparisonTable(rows)
