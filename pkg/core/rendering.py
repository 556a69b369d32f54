"""
Синтетический оптический сенсор: проекция модели ветроустановки
пинхол-камерой в растр меток (башня, гондола, лопасти).
"""

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from core.geometry import UP, Point3, TurbineModel, blade_tips
from core.vision import Raster
from utils.config_manager import (
    LABEL_BLADE_BASE,
    LABEL_NACELLE,
    LABEL_TOWER,
    MIN_RESOLUTION,
    SENSOR_FOV,
)
from utils.error_handling import SubjectNotInViewError, VisionError
from utils.logger import logger

# Ближняя плоскость отсечения, метры
NEAR_PLANE = 0.1
# Доля хорды, видимая при повороте лопасти ребром к камере
EDGE_ON_WIDTH_RATIO = 0.25


@dataclass(frozen=True)
class PinholeCamera:
    """Пинхол-камера, установленная в точке position и направленная на target."""

    position: Point3
    target: Point3
    fov: float = SENSOR_FOV

    def __post_init__(self) -> None:
        if not 0.0 < self.fov < 180.0:
            raise VisionError("sensor fov must be in (0, 180)")
        forward = self.target.as_array() - self.position.as_array()
        norm = float(np.linalg.norm(forward))
        if norm == 0.0:
            raise VisionError("camera position coincides with its target")
        if float(np.linalg.norm(np.cross(forward / norm, UP))) < 1e-9:
            raise VisionError("camera looks straight up or down")

    def basis(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Базис камеры: вперед, вправо по кадру, вниз по кадру."""
        forward = self.target.as_array() - self.position.as_array()
        forward /= np.linalg.norm(forward)
        right = np.cross(forward, UP)
        right /= np.linalg.norm(right)
        down = np.cross(forward, right)
        return forward, right, down

    def focal_length(self, resolution: int) -> float:
        return (resolution / 2.0) / math.tan(math.radians(self.fov) / 2.0)


class _Projector:
    """Проекция мировых точек в пиксели для одного кадра."""

    def __init__(self, camera: PinholeCamera, resolution: int):
        self.origin = camera.position.as_array()
        self.forward, self.right, self.down = camera.basis()
        self.focal = camera.focal_length(resolution)
        self.center = resolution / 2.0

    def depth(self, point: np.ndarray) -> float:
        return float((point - self.origin) @ self.forward)

    def project(self, point: np.ndarray) -> np.ndarray:
        rel = point - self.origin
        depth = float(rel @ self.forward)
        return np.array(
            [
                self.center + self.focal * float(rel @ self.right) / depth,
                self.center + self.focal * float(rel @ self.down) / depth,
            ]
        )

    def clip(self, start: np.ndarray, end: np.ndarray) -> Optional[Tuple[np.ndarray, np.ndarray]]:
        """Отсекает отрезок ближней плоскостью; None, если он целиком позади камеры."""
        d0, d1 = self.depth(start), self.depth(end)
        if d0 < NEAR_PLANE and d1 < NEAR_PLANE:
            return None
        if d0 < NEAR_PLANE:
            start = start + (end - start) * (NEAR_PLANE - d0) / (d1 - d0)
        elif d1 < NEAR_PLANE:
            end = start + (end - start) * (NEAR_PLANE - d0) / (d1 - d0)
        return start, end


def _draw_capsule(
    labels: np.ndarray, p0: np.ndarray, p1: np.ndarray, radius: float, value: int
) -> int:
    """Закрашивает пиксели, центры которых ближе radius к отрезку [p0, p1]."""
    height, width = labels.shape
    lo = np.floor(np.minimum(p0, p1) - radius).astype(int)
    hi = np.ceil(np.maximum(p0, p1) + radius).astype(int)
    x0, y0 = max(lo[0], 0), max(lo[1], 0)
    x1, y1 = min(hi[0], width - 1), min(hi[1], height - 1)
    if x0 > x1 or y0 > y1:
        return 0

    xs, ys = np.meshgrid(np.arange(x0, x1 + 1) + 0.5, np.arange(y0, y1 + 1) + 0.5)
    axis = p1 - p0
    length_sq = float(axis @ axis)
    if length_sq > 0.0:
        t = np.clip(((xs - p0[0]) * axis[0] + (ys - p0[1]) * axis[1]) / length_sq, 0.0, 1.0)
    else:
        t = np.zeros_like(xs)
    dist_sq = (xs - p0[0] - t * axis[0]) ** 2 + (ys - p0[1] - t * axis[1]) ** 2
    inside = dist_sq <= radius * radius
    labels[y0 : y1 + 1, x0 : x1 + 1][inside] = value
    return int(np.count_nonzero(inside))


def _thick_segment(
    labels: np.ndarray,
    projector: _Projector,
    start: np.ndarray,
    end: np.ndarray,
    width_m: float,
    value: int,
) -> int:
    clipped = projector.clip(start, end)
    if clipped is None:
        return 0
    a, b = clipped
    depth = (projector.depth(a) + projector.depth(b)) / 2.0
    radius = max(0.5 * projector.focal * width_m / depth, 0.5)
    return _draw_capsule(labels, projector.project(a), projector.project(b), radius, value)


def blade_apparent_width(chord: float, aero_pitch_deg: float) -> float:
    """Видимая ширина лопасти с учетом ее аэродинамического угла установки."""
    p = math.radians(aero_pitch_deg)
    return chord * abs(math.cos(p)) + EDGE_ON_WIDTH_RATIO * chord * abs(math.sin(p))


def render_silhouette(turbine: TurbineModel, camera: PinholeCamera, resolution: int) -> Raster:
    """
    Рендерит кадр меток: башня (1), гондола (2), лопасти (10 + индекс).

    Порядок отрисовки: башня, гондола, лопасти; более поздние пиксели
    перекрывают ранние. Лопасть рисуется от корня (смещение на одну хорду
    от ступицы) до конца, чтобы соседние лопасти не сливались у ступицы.
    """
    if resolution < MIN_RESOLUTION:
        raise VisionError(f"resolution must be >= {MIN_RESOLUTION}")

    projector = _Projector(camera, resolution)
    hub = turbine.hub_position.as_array()
    if projector.depth(hub) < NEAR_PLANE:
        raise SubjectNotInViewError()
    hub_px = projector.project(hub)
    if not (0.0 <= hub_px[0] < resolution and 0.0 <= hub_px[1] < resolution):
        raise SubjectNotInViewError()

    labels = np.zeros((resolution, resolution), dtype=np.uint8)
    _thick_segment(
        labels,
        projector,
        turbine.tower_base.as_array(),
        turbine.tower_top.as_array(),
        turbine.tower_diameter,
        LABEL_TOWER,
    )
    _thick_segment(
        labels,
        projector,
        hub,
        hub - turbine.rotor_normal * turbine.nacelle_length,
        turbine.nacelle_height,
        LABEL_NACELLE,
    )

    chord = turbine.blade_chord
    blade_pixels: List[int] = []
    for index, tip in enumerate(blade_tips(turbine)):
        tip_arr = tip.as_array()
        direction = (tip_arr - hub) / turbine.blade_length
        root = hub + direction * chord
        width = blade_apparent_width(chord, turbine.aero_pitch(index))
        blade_pixels.append(
            _thick_segment(labels, projector, root, tip_arr, width, LABEL_BLADE_BASE + index)
        )

    if not any(blade_pixels):
        raise SubjectNotInViewError()
    logger.debug("Кадр %dx%d: пиксели лопастей %s", resolution, resolution, blade_pixels)
    return Raster(labels)
