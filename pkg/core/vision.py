"""
Конвейер обработки кадра: сегментация компонентов, удаление фона,
бинаризация масок, трассировка контуров, фильтр по площади,
минимальный описанный прямоугольник и классификация наклона лопастей.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Protocol, Sequence, Tuple

import numpy as np
from scipy import ndimage
from scipy.spatial import ConvexHull

from utils.config_manager import (
    LABEL_BACKGROUND,
    LABEL_BLADE_BASE,
    LABEL_NACELLE,
    LABEL_TOWER,
)
from utils.error_handling import VisionError
from utils.logger import logger

PixelPoint = Tuple[int, int]

# 8-связность для меток компонент
_EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)


class ComponentKind(Enum):
    """Тип компонента ветроустановки на кадре."""

    BLADE = "Blade"
    TOWER = "Tower"
    NACELLE = "Nacelle"


def kind_for_label(label: int) -> Optional[ComponentKind]:
    """Сопоставляет код метки растра типу компонента (None для фона)."""
    if label == LABEL_BACKGROUND:
        return None
    if label == LABEL_TOWER:
        return ComponentKind.TOWER
    if label == LABEL_NACELLE:
        return ComponentKind.NACELLE
    if label >= LABEL_BLADE_BASE:
        return ComponentKind.BLADE
    raise VisionError(f"unknown raster label {label}")


@dataclass(frozen=True)
class Raster:
    """Кадр из 8-битных меток: x вправо, y вниз, 0 — фон."""

    data: np.ndarray

    def __post_init__(self) -> None:
        data = np.ascontiguousarray(self.data, dtype=np.uint8)
        if data.ndim != 2:
            raise VisionError("raster must be 2-dimensional")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def width(self) -> int:
        return int(self.data.shape[1])

    @property
    def height(self) -> int:
        return int(self.data.shape[0])

    @property
    def shape(self) -> Tuple[int, int]:
        return self.data.shape  # type: ignore[return-value]


@dataclass(frozen=True)
class BinaryMask:
    """Бинарная маска: один бит на пиксель."""

    bits: np.ndarray

    def __post_init__(self) -> None:
        bits = np.ascontiguousarray(self.bits, dtype=bool)
        if bits.ndim != 2:
            raise VisionError("mask must be 2-dimensional")
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @property
    def width(self) -> int:
        return int(self.bits.shape[1])

    @property
    def height(self) -> int:
        return int(self.bits.shape[0])

    @property
    def count(self) -> int:
        return int(np.count_nonzero(self.bits))


@dataclass(frozen=True)
class BoundingBox:
    """Осевой прямоугольник в пикселях, границы включительно."""

    x_min: int
    y_min: int
    x_max: int
    y_max: int

    @classmethod
    def of_mask(cls, bits: np.ndarray) -> "BoundingBox":
        ys, xs = np.nonzero(bits)
        if xs.size == 0:
            raise VisionError("empty mask has no bounding box")
        return cls(int(xs.min()), int(ys.min()), int(xs.max()), int(ys.max()))


@dataclass(frozen=True)
class Segment:
    """Сегмент s_i: тип компонента, маска M_i и рамка B_i."""

    label: ComponentKind
    mask: BinaryMask
    bbox: BoundingBox
    source_label: int

    def __post_init__(self) -> None:
        if self.mask.count == 0:
            raise VisionError("segment mask must be nonempty")
        if BoundingBox.of_mask(self.mask.bits) != self.bbox:
            raise VisionError("segment bbox is not tight around its mask")

    @property
    def blade_index(self) -> Optional[int]:
        if self.label is not ComponentKind.BLADE:
            return None
        return self.source_label - LABEL_BLADE_BASE


@dataclass(frozen=True)
class Contour:
    """Замкнутая внешняя граница: упорядоченные 8-связные пиксели (x, y)."""

    points: Tuple[PixelPoint, ...]

    def __post_init__(self) -> None:
        if not self.points:
            raise VisionError("contour needs at least one point")

    def as_array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=float).reshape(-1, 2)


@dataclass(frozen=True)
class RotatedRect:
    """
    Повернутый прямоугольник в канонической форме: width >= height,
    angle — направление длинной стороны в [0, 180).
    """

    center: Tuple[float, float]
    width: float
    height: float
    angle: float

    @property
    def area(self) -> float:
        return self.width * self.height

    def long_axis_endpoints(self) -> Tuple[Tuple[float, float], Tuple[float, float]]:
        """Концы длинной оси: (верхний, нижний) по оси y кадра."""
        a = math.radians(self.angle)
        hx, hy = 0.5 * self.width * math.cos(a), 0.5 * self.width * math.sin(a)
        cx, cy = self.center
        # sin(angle) >= 0, поэтому конец с "+" ниже либо правее при angle = 0
        return (cx - hx, cy - hy), (cx + hx, cy + hy)

    def corners(self) -> np.ndarray:
        a = math.radians(self.angle)
        along = np.array([math.cos(a), math.sin(a)]) * self.width / 2.0
        across = np.array([-math.sin(a), math.cos(a)]) * self.height / 2.0
        c = np.asarray(self.center, dtype=float)
        return np.array([c - along - across, c + along - across, c + along + across, c - along + across])


class TiltClass(Enum):
    """Класс наклона лопасти."""

    ACUTE = "Acute"
    HORIZONTAL = "Horizontal"
    VERTICAL = "Vertical"


@dataclass(frozen=True)
class BladeOrientation:
    """Наклон лопасти θ (градусы, [0, 180]) и его класс."""

    theta: float
    tilt_class: TiltClass

    def __post_init__(self) -> None:
        if classify_tilt(self.theta) is not self.tilt_class:
            raise VisionError(f"tilt class {self.tilt_class.value} does not match theta {self.theta}")

    @classmethod
    def from_theta(cls, theta: float) -> "BladeOrientation":
        return cls(theta=theta, tilt_class=classify_tilt(theta))


class Segmenter(Protocol):
    """Интерфейс сегментатора: растр на входе, сегменты на выходе."""

    def segment(self, image: Raster) -> List[Segment]:
        ...


class GeometricSegmenter:
    """
    Детерминированный сегментатор по меткам синтетического кадра.

    Каждая связная (8-связность) область каждой ненулевой метки становится
    отдельным сегментом. Не хранит состояния и безопасен для параллельных вызовов.
    """

    def segment(self, image: Raster) -> List[Segment]:
        segments: List[Segment] = []
        for value in np.unique(image.data):
            kind = kind_for_label(int(value))
            if kind is None:
                continue
            labels, count = ndimage.label(image.data == value, structure=_EIGHT_CONNECTED)
            for index, window in enumerate(ndimage.find_objects(labels), start=1):
                bits = labels == index
                y0, x0 = window[0].start, window[1].start
                y1, x1 = window[0].stop - 1, window[1].stop - 1
                segments.append(
                    Segment(
                        label=kind,
                        mask=BinaryMask(bits),
                        bbox=BoundingBox(x0, y0, x1, y1),
                        source_label=int(value),
                    )
                )
            logger.debug("Метка %d (%s): %d сегментов", int(value), kind.value, count)
        return segments


DEFAULT_SEGMENTER = GeometricSegmenter()


def segment_components(image: Raster, segmenter: Optional[Segmenter] = None) -> List[Segment]:
    """Разбивает кадр на сегменты компонентов (пустой список для чистого фона)."""
    return (segmenter or DEFAULT_SEGMENTER).segment(image)


def remove_background(image: Raster, segments: Sequence[Segment]) -> Raster:
    """Обнуляет пиксели, не покрытые ни одной маской сегмента (кадр без фона)."""
    keep = np.zeros(image.shape, dtype=bool)
    for segment in segments:
        if segment.mask.bits.shape != image.shape:
            raise VisionError(
                f"mask {segment.mask.bits.shape} does not match image {image.shape}"
            )
        keep |= segment.mask.bits
    return Raster(np.where(keep, image.data, 0))


def binarize(mask_source: Segment) -> BinaryMask:
    """Бинаризованная маска: 1 там, где маска сегмента равна 1."""
    return BinaryMask(mask_source.mask.bits == 1)


# Направления по часовой стрелке при оси y вниз: E, SE, S, SW, W, NW, N, NE
_DIRECTIONS: Tuple[PixelPoint, ...] = (
    (1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1),
)
_DIRECTION_INDEX: Dict[PixelPoint, int] = {d: i for i, d in enumerate(_DIRECTIONS)}
_WEST = 4


def _trace_outer_border(cells: List[int], stride: int, start: int) -> List[int]:
    """
    Обход внешней границы одной компоненты (следование по границе Suzuki–Abe).

    cells — плоский список 0/1 с рамкой из нулей шириной 1 пиксель,
    stride — ширина строки. Возвращает плоские индексы граничных пикселей.
    """
    offsets = [dy * stride + dx for dx, dy in _DIRECTIONS]

    first = None
    for step in range(8):
        k = (_WEST + step) % 8
        if cells[start + offsets[k]]:
            first = start + offsets[k]
            break
    if first is None:
        return [start]

    previous, current = first, start
    border = []
    while True:
        border.append(current)
        delta = previous - current
        k_prev = offsets.index(delta)
        following = previous
        for step in range(1, 9):
            k = (k_prev - step) % 8
            if cells[current + offsets[k]]:
                following = current + offsets[k]
                break
        if following == start and current == first:
            return border
        previous, current = current, following


def find_contours(mask: BinaryMask) -> List[Contour]:
    """
    Внешние контуры всех 8-связных компонент маски.

    Отверстия не трассируются; порядок контуров — порядок первых пикселей
    компонент при построчном обходе.
    """
    labels, _ = ndimage.label(mask.bits, structure=_EIGHT_CONNECTED)
    contours: List[Contour] = []
    for index, window in enumerate(ndimage.find_objects(labels), start=1):
        if window is None:
            continue
        crop = labels[window] == index
        padded = np.pad(crop, 1)
        stride = padded.shape[1]
        cells = padded.ravel().astype(np.uint8).tolist()
        start = cells.index(1)
        flat = _trace_outer_border(cells, stride, start)
        y0, x0 = window[0].start - 1, window[1].start - 1
        points = tuple((x0 + i % stride, y0 + i // stride) for i in flat)
        contours.append(Contour(points))
    return contours


def contour_area(contour: Contour) -> float:
    """Площадь замкнутого контура по формуле шнурования."""
    pts = contour.as_array()
    if len(pts) < 3:
        return 0.0
    x, y = pts[:, 0], pts[:, 1]
    return float(abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))) / 2.0)


def filter_by_area(contours: Sequence[Contour], threshold: float) -> List[Contour]:
    """Оставляет контуры с площадью строго больше порога, сохраняя порядок."""
    if threshold < 0:
        raise VisionError("area threshold must be >= 0")
    return [c for c in contours if contour_area(c) > threshold]


def _canonical_rect(center: np.ndarray, width: float, height: float, angle: float) -> RotatedRect:
    if height > width:
        width, height = height, width
        angle += 90.0
    period = 90.0 if math.isclose(width, height, rel_tol=1e-12, abs_tol=1e-12) else 180.0
    angle %= period
    if period - angle < 1e-9:
        angle = 0.0
    return RotatedRect(center=(float(center[0]), float(center[1])), width=width, height=height, angle=angle)


def min_area_rect(contour: Contour) -> RotatedRect:
    """
    Минимальный по площади описанный прямоугольник (выпуклая оболочка +
    вращающиеся калиперы: одна сторона оптимума лежит на ребре оболочки).
    """
    points = np.unique(contour.as_array(), axis=0)
    if len(points) == 1:
        return RotatedRect(center=(float(points[0, 0]), float(points[0, 1])), width=0.0, height=0.0, angle=0.0)

    centered = points - points.mean(axis=0)
    _, singular, vt = np.linalg.svd(centered, full_matrices=False)
    if singular[1] <= 1e-9 * max(singular[0], 1.0):
        # вырожденный случай: все точки на одной прямой
        direction = vt[0]
        proj = centered @ direction
        center = points.mean(axis=0) + direction * (proj.max() + proj.min()) / 2.0
        angle = math.degrees(math.atan2(direction[1], direction[0]))
        return _canonical_rect(center, float(proj.max() - proj.min()), 0.0, angle)

    hull = points[ConvexHull(points).vertices]
    edges = np.roll(hull, -1, axis=0) - hull
    angles = np.arctan2(edges[:, 1], edges[:, 0])
    along = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    across = np.stack([-np.sin(angles), np.cos(angles)], axis=1)
    proj_u = hull @ along.T
    proj_v = hull @ across.T
    widths = proj_u.max(axis=0) - proj_u.min(axis=0)
    heights = proj_v.max(axis=0) - proj_v.min(axis=0)
    best = int(np.argmin(widths * heights))

    mid_u = (proj_u[:, best].max() + proj_u[:, best].min()) / 2.0
    mid_v = (proj_v[:, best].max() + proj_v[:, best].min()) / 2.0
    center = mid_u * along[best] + mid_v * across[best]
    return _canonical_rect(center, float(widths[best]), float(heights[best]), math.degrees(angles[best]))


def line_angle(top: Sequence[float], bottom: Sequence[float]) -> float:
    """Наклон прямой через верхнюю и нижнюю точки: atan2 по всем квадрантам, в [0, 180)."""
    theta = math.degrees(math.atan2(bottom[1] - top[1], bottom[0] - top[0]))
    return theta % 180.0


def pitch_angle(rect: RotatedRect) -> float:
    """Угол наклона лопасти θ по концам длинной оси прямоугольника."""
    if not rect.width > 0:
        raise VisionError("degenerate rectangle")
    top, bottom = rect.long_axis_endpoints()
    return line_angle(top, bottom)


def classify_tilt(theta: float) -> TiltClass:
    """
    Класс наклона: Horizontal — [0, 30) ∪ [150, 180], Acute — [30, 60) ∪ [120, 150),
    Vertical — [60, 120).
    """
    if not 0.0 <= theta <= 180.0:
        raise VisionError(f"theta {theta} outside [0, 180]")
    if theta < 30.0 or theta >= 150.0:
        return TiltClass.HORIZONTAL
    if theta < 60.0 or theta >= 120.0:
        return TiltClass.ACUTE
    return TiltClass.VERTICAL


def angular_error(estimate: float, truth: float) -> float:
    """Разность углов прямых по модулю 180 градусов."""
    diff = abs(estimate - truth) % 180.0
    return min(diff, 180.0 - diff)
