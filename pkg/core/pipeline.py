"""
Сквозной конвейер инспекции: зона и точка съемки, кадр сенсора, сегментация,
контуры, углы лопастей, сборка миссии, симуляция полета и метрики.
"""

import asyncio
import time
from contextlib import contextmanager
from dataclasses import dataclass
from functools import partial
from pathlib import Path
from typing import Any, Awaitable, Dict, Iterator, List, Optional, Sequence, Tuple, TypeVar

import aiofiles.os
import numpy as np

from core.control import FlightLog, simulate_fleet
from core.exporters import (
    FORMAT_SUFFIXES,
    comparison_text,
    read_metrics_file,
    render_table,
    write_run_outputs,
    write_text,
)
from core.geometry import InspectionZone, Point3, TurbineModel, blade_tips, compute_zone, initial_point
from core.metrics import MetricsReport, blade_coverage, build_report, compare_report
from core.rendering import PinholeCamera, render_silhouette
from core.trajectory import MissionPlan, PlannerParams, approach_azimuth_for, assemble_mission
from core.vision import (
    BinaryMask,
    BladeOrientation,
    Raster,
    TiltClass,
    angular_error,
    binarize,
    classify_tilt,
    contour_area,
    filter_by_area,
    find_contours,
    min_area_rect,
    pitch_angle,
    remove_background,
    segment_components,
)
from utils.config_manager import SENSOR_RESOLUTION, Scenario, SensorSection
from utils.config_profiles import ConfigProfiles
from utils.error_handling import (
    ConfigError,
    InspectionError,
    PipelineError,
    ProgressErrorHandler,
    VisionError,
)
from utils.logger import logger
from utils.progress import get_progress_tracker, show_operation_summary, show_run_summary

T = TypeVar("T")

# Границы классов наклона, вблизи которых класс не сравнивается в развертке
TILT_BOUNDARIES = (30.0, 60.0, 120.0, 150.0)
SWEEP_TOLERANCE = 2.0  # deg


@contextmanager
def _stage(name: str, turbine_id: Optional[int] = None) -> Iterator[None]:
    """Привязывает ошибку этапа к его имени (и турбине)."""
    try:
        yield
    except PipelineError:
        raise
    except (InspectionError, ValueError, ArithmeticError) as e:
        raise PipelineError(name, e, turbine_id) from e


@dataclass(frozen=True)
class TurbinePerception:
    """Результаты восприятия одной турбины: кадры, маски лопастей и их ориентации."""

    turbine_id: int
    zone: InspectionZone
    viewpoint: Point3
    image: Raster
    foreground: Raster
    blade_masks: Dict[int, BinaryMask]
    orientations: Tuple[BladeOrientation, ...]


@dataclass(frozen=True)
class PipelineResult:
    """Миссия, журналы полета и отчет по метрикам одного прогона."""

    scenario: Scenario
    plan: MissionPlan
    logs: Tuple[FlightLog, ...]
    report: MetricsReport
    perceptions: Tuple[TurbinePerception, ...]


def perceive_turbine(
    turbine: TurbineModel,
    turbine_id: int,
    params: PlannerParams,
    sensor: SensorSection,
) -> TurbinePerception:
    """
    Шаги восприятия одной турбины в фиксированном порядке: compute_zone,
    initial_point, render_silhouette, segment_components, remove_background,
    затем для каждой лопасти binarize, find_contours, filter_by_area,
    min_area_rect, pitch_angle и classify_tilt.
    """
    with _stage("compute_zone", turbine_id):
        zone = compute_zone(blade_tips(turbine))
    with _stage("initial_point", turbine_id):
        viewpoint = initial_point(zone, approach_azimuth_for(turbine, params))
    with _stage("render_silhouette", turbine_id):
        camera = PinholeCamera(position=viewpoint, target=zone.center, fov=sensor.fov)
        image = render_silhouette(turbine, camera, sensor.resolution)
    with _stage("segment_components", turbine_id):
        segments = segment_components(image)
    with _stage("remove_background", turbine_id):
        foreground = remove_background(image, segments)

    threshold = sensor.area_threshold_fraction * image.width * image.height
    masks: Dict[int, BinaryMask] = {}
    orientations: List[BladeOrientation] = []
    for blade_index in range(turbine.blade_count):
        with _stage("binarize", turbine_id):
            candidates = [s for s in segments if s.blade_index == blade_index]
            if not candidates:
                raise VisionError(f"blade {blade_index} not found in frame")
            segment = max(candidates, key=lambda s: s.mask.count)
            mask = binarize(segment)
        with _stage("find_contours", turbine_id):
            contours = find_contours(mask)
        with _stage("filter_by_area", turbine_id):
            kept = filter_by_area(contours, threshold)
            if not kept:
                raise VisionError(f"blade {blade_index} is smaller than the area threshold")
            contour = max(kept, key=contour_area)
        with _stage("min_area_rect", turbine_id):
            rect = min_area_rect(contour)
        with _stage("pitch_angle", turbine_id):
            theta = pitch_angle(rect)
        with _stage("classify_tilt", turbine_id):
            orientation = BladeOrientation(theta=theta, tilt_class=classify_tilt(theta))

        masks[blade_index] = mask
        orientations.append(orientation)
        logger.debug(
            "Турбина %d, лопасть %d: θ=%.2f° (%s), эталон %.2f°, ошибка %.2f°",
            turbine_id,
            blade_index,
            theta,
            orientation.tilt_class.value,
            turbine.blade_pitch_truth[blade_index],
            angular_error(theta, turbine.blade_pitch_truth[blade_index]),
        )

    return TurbinePerception(
        turbine_id=turbine_id,
        zone=zone,
        viewpoint=viewpoint,
        image=image,
        foreground=foreground,
        blade_masks=masks,
        orientations=tuple(orientations),
    )


async def _tracked(job: Awaitable[T], progress_bar: Any) -> T:
    result = await job
    progress_bar.update(1)
    return result


async def run_pipeline(scenario: Scenario) -> PipelineResult:
    """
    Выполняет полный конвейер сценария.

    Восприятие турбин, полет БПЛА и покрытие лопастей считаются в пуле
    потоков; порядок результатов совпадает с порядком входных данных,
    поэтому результат детерминирован при фиксированном зерне.

    Raises:
        PipelineError: Ошибка любого этапа с именем этапа
    """
    loop = asyncio.get_running_loop()
    tracker = get_progress_tracker()
    logger.info(
        f"🚀 Сценарий '{scenario.label}': турбин {len(scenario.turbines)}, БПЛА {scenario.uav_count}"
    )

    async with tracker.track_perception(len(scenario.turbines)) as bar:
        jobs = [
            loop.run_in_executor(
                None, partial(perceive_turbine, turbine, turbine_id, scenario.planner, scenario.sensor)
            )
            for turbine_id, turbine in enumerate(scenario.turbines)
        ]
        perceptions: List[TurbinePerception] = list(
            await asyncio.gather(*(_tracked(job, bar) for job in jobs))
        )

    with _stage("assemble_mission"):
        plan = assemble_mission(
            scenario.turbines,
            [perception.orientations for perception in perceptions],
            scenario.uav_count,
            scenario.planner,
        )

    async with tracker.track_fleet(plan.uav_count) as bar:
        with _stage("simulate_flight"):
            logs = await simulate_fleet(
                plan, scenario.gains, scenario.wind, scenario.dt, scenario.integral_limit
            )
            bar.update(plan.uav_count)

    with _stage("metrics"):
        coverage_jobs = [
            loop.run_in_executor(
                None,
                partial(blade_coverage, logs, turbine, blade_index, scenario.camera, scenario.sample_density),
            )
            for turbine in scenario.turbines
            for blade_index in range(turbine.blade_count)
        ]
        percentages = await asyncio.gather(*coverage_jobs)
        coverage = float(np.mean(percentages)) if percentages else 0.0
        report = build_report(logs, coverage, plan.uav_count)

    logger.info(
        f"✅ Время {report.total_time:.2f} мин, длина {report.total_length:.1f} м, "
        f"покрытие {report.blade_coverage:.1f}%, отклонение {report.mean_deviation:.3f} м"
    )
    return PipelineResult(
        scenario=scenario,
        plan=plan,
        logs=tuple(logs),
        report=report,
        perceptions=tuple(perceptions),
    )


def sweep_turbine(theta: float) -> TurbineModel:
    """Турбина для развертки: первая лопасть видна анфас под наклоном theta."""
    return TurbineModel.create(
        Point3(0.0, 0.0, 0.0),
        tower_height=100.0,
        blade_length=50.0,
        blade_count=3,
        rotor_phase=(180.0 - theta) % 360.0,
    )


@dataclass(frozen=True)
class SweepStep:
    truth: float
    estimate: float
    error: float
    truth_class: TiltClass
    estimated_class: TiltClass

    @property
    def near_boundary(self) -> bool:
        return any(abs(self.truth - b) <= SWEEP_TOLERANCE for b in TILT_BOUNDARIES)


@dataclass(frozen=True)
class SweepReport:
    """Итоги развертки углов: точность оценки и совпадение классов."""

    steps: Tuple[SweepStep, ...]
    failed: int = 0
    tolerance: float = SWEEP_TOLERANCE

    @property
    def total(self) -> int:
        return len(self.steps) + self.failed

    @property
    def max_error(self) -> float:
        return max((step.error for step in self.steps), default=0.0)

    @property
    def pass_rate(self) -> float:
        """Доля шагов с ошибкой не больше допуска; неудачные шаги не проходят."""
        if not self.total:
            return 0.0
        return sum(step.error <= self.tolerance for step in self.steps) / self.total

    @property
    def class_agreement(self) -> float:
        """Доля совпадений класса среди шагов вдали от границ классов."""
        checked = [step for step in self.steps if not step.near_boundary]
        if not checked:
            return 1.0
        return sum(step.truth_class is step.estimated_class for step in checked) / len(checked)

    def passed(self, required_rate: float = 0.99) -> bool:
        return self.pass_rate >= required_rate and self.class_agreement == 1.0


def estimate_sweep_step(theta: float, resolution: int = SENSOR_RESOLUTION) -> SweepStep:
    """Рендерит турбину с эталонным наклоном theta и оценивает его конвейером."""
    turbine = sweep_turbine(theta)
    truth = turbine.blade_pitch_truth[0]
    perception = perceive_turbine(turbine, 0, PlannerParams(), SensorSection(resolution=resolution))
    estimate = perception.orientations[0]
    return SweepStep(
        truth=truth,
        estimate=estimate.theta,
        error=angular_error(estimate.theta, truth),
        truth_class=classify_tilt(truth),
        estimated_class=estimate.tilt_class,
    )


def sweep_angles(steps: int) -> List[float]:
    if steps < 1:
        raise VisionError("sweep needs at least one step")
    return [i * 180.0 / steps for i in range(steps)]


async def run_angle_sweep(steps: int = 180, resolution: int = SENSOR_RESOLUTION) -> SweepReport:
    """
    Развертка эталонных углов 0..180° с шагом 180/steps.

    Ошибка отдельного шага не прерывает развертку: шаг считается неудачным
    и учитывается в доле прошедших.
    """
    loop = asyncio.get_running_loop()
    angles = sweep_angles(steps)
    errors = ProgressErrorHandler(len(angles), "angle sweep")

    async def _step(theta: float, progress_bar: Any) -> Optional[SweepStep]:
        try:
            result = await loop.run_in_executor(None, partial(estimate_sweep_step, theta, resolution))
        except InspectionError as e:
            errors.report_error(e, f"θ={theta:.2f}°")
            return None
        finally:
            progress_bar.update(1)
        errors.report_success()
        return result

    async with get_progress_tracker().track_sweep(len(angles)) as bar:
        results = await asyncio.gather(*(_step(theta, bar) for theta in angles))

    report = SweepReport(
        steps=tuple(step for step in results if step is not None),
        failed=errors.failed_items,
    )
    if errors.failed_items:
        logger.warning(errors.get_final_report())
    logger.info(
        f"📐 Развертка {steps} шагов: макс. ошибка {report.max_error:.2f}°, "
        f"в пределах {SWEEP_TOLERANCE}° {report.pass_rate * 100:.1f}%, "
        f"совпадение классов {report.class_agreement * 100:.1f}%"
    )
    return report


SWEEP_COLUMNS = ["truth_deg", "estimate_deg", "error_deg", "truth_class", "estimated_class"]


def sweep_rows(report: SweepReport) -> List[List[Any]]:
    return [
        [s.truth, s.estimate, s.error, s.truth_class.value, s.estimated_class.value]
        for s in report.steps
    ]


def published_report(values: Dict[str, float]) -> MetricsReport:
    """Опубликованная строка таблицы как отчет для сравнения."""
    return MetricsReport(
        total_time=float(values["total_time"]),
        total_length=float(values["total_length"]),
        blade_coverage=float(values["blade_coverage"]),
        mean_deviation=float(values["mean_deviation"]),
        uav_count=int(values["uav_count"]),
        operator_count=int(values["operator_count"]),
    )


async def run_inspection_session(
    scenario: Scenario, out_dir: Path, fmt: str = "csv", save_frames: bool = False
) -> PipelineResult:
    """Прогон сценария с записью результатов и итоговой сводкой."""
    start_time = time.monotonic()
    result = await run_pipeline(scenario)
    await write_run_outputs(out_dir, result, fmt, save_frames)
    show_run_summary(scenario.label, result.report, time.monotonic() - start_time)
    return result


async def run_sweep_session(
    steps: int,
    resolution: int = SENSOR_RESOLUTION,
    out_dir: Optional[Path] = None,
    fmt: str = "csv",
) -> SweepReport:
    """Развертка углов; таблица шагов пишется в out_dir/sweep.<csv|jsonl>, если задано."""
    start_time = time.monotonic()
    report = await run_angle_sweep(steps, resolution)
    if out_dir is not None:
        await aiofiles.os.makedirs(out_dir, exist_ok=True)
        path = out_dir / f"sweep{FORMAT_SUFFIXES[fmt]}"
        await write_text(path, render_table(SWEEP_COLUMNS, sweep_rows(report), fmt))
        logger.info(f"💾 Таблица развертки записана в {path}")
    passed = sum(step.error <= report.tolerance for step in report.steps)
    show_operation_summary(
        "Развертка углов", report.total, passed, report.total - passed, time.monotonic() - start_time
    )
    return report


def report_label(path: Path) -> str:
    """Метка отчета: имя директории прогона для metrics.*, иначе имя файла."""
    if path.stem == "metrics" and path.parent.name:
        return path.parent.name
    return path.stem


async def run_compare_session(
    paths: Sequence[Path],
    published: Optional[str] = None,
    fmt: str = "csv",
    out_path: Optional[Path] = None,
) -> str:
    """
    Сравнивает файлы метрик; первая строка служит базой.

    С published перед файлами ставятся опубликованные ручная (база)
    и автоматизированная строки встроенного сценария.
    """
    reports: List[MetricsReport] = []
    labels: List[str] = []
    if published is not None:
        rows = ConfigProfiles.published_results(published)
        if rows is None:
            raise ConfigError("published", f"no published results for {published!r}")
        for kind in ("manual", "automated"):
            reports.append(published_report(rows[kind]))
            labels.append(f"{published}:{kind}")
    for path in paths:
        reports.append(await read_metrics_file(path))
        labels.append(report_label(path))

    table = compare_report(reports, labels)
    text = comparison_text(table, fmt)
    if out_path is not None:
        await write_text(out_path, text)
        logger.info(f"💾 Сравнение записано в {out_path}")
    return text
