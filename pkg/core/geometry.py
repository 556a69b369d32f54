"""
Геометрическая модель ветроустановки: кинематика концов лопастей,
сферическая зона инспекции и точка съемки.
"""

import math
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from utils.config_manager import (
    CHORD_RATIO,
    MAX_BLADES,
    NACELLE_HEIGHT,
    NACELLE_LENGTH,
    TOWER_DIAMETER,
)
from utils.error_handling import GeometryError

UP = np.array([0.0, 0.0, 1.0])
_DEGENERATE = 1e-12


@dataclass(frozen=True)
class Point3:
    """Точка в мировой системе координат (метры, ось z вверх)."""

    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        if not all(math.isfinite(v) for v in (self.x, self.y, self.z)):
            raise GeometryError(f"non-finite point ({self.x}, {self.y}, {self.z})")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    @classmethod
    def from_array(cls, values: Iterable[float]) -> "Point3":
        x, y, z = (float(v) for v in values)
        return cls(x, y, z)

    def distance_to(self, other: "Point3") -> float:
        return float(np.linalg.norm(self.as_array() - other.as_array()))

    def translated(self, offset: Sequence[float]) -> "Point3":
        return Point3.from_array(self.as_array() + np.asarray(offset, dtype=float))


def face_on_inclination(azimuth_deg: float) -> float:
    """
    Наклон лопасти в плоскости изображения при съемке ротора анфас.

    Камера на оси ротора смотрит против направления гондолы: горизонтальная
    ось ротора u уходит вправо по кадру, z вверх (ось y кадра вниз).
    Лопасть с азимутом φ дает наклон (180 - φ) mod 180.
    """
    return (180.0 - azimuth_deg) % 180.0


@dataclass(frozen=True)
class TurbineModel:
    """
    Параметрическая модель ветроустановки (башня, гондола, лопасти).

    nacelle_yaw задает направление, в которое смотрит ротор; корпус гондолы
    уходит от ступицы в противоположную сторону. rotor_phase — азимут первой
    лопасти в плоскости ротора (0° — горизонтально по оси u, 90° — вверх).
    blade_pitch_truth — эталонный наклон каждой лопасти в кадре при съемке
    ротора анфас; используется синтетическим рендерером и разверткой углов.
    """

    hub_position: Point3
    tower_base: Point3
    tower_height: float
    nacelle_yaw: float
    blade_length: float
    blade_count: int
    rotor_phase: float
    blade_pitch_truth: Tuple[float, ...]
    blade_aero_pitch: Tuple[float, ...] = field(default=())
    tower_diameter: float = TOWER_DIAMETER
    nacelle_length: float = NACELLE_LENGTH
    nacelle_height: float = NACELLE_HEIGHT
    chord_ratio: float = CHORD_RATIO

    def __post_init__(self) -> None:
        if not self.tower_height > 0:
            raise GeometryError("tower_height must be > 0")
        if not self.blade_length > 0:
            raise GeometryError("blade_length must be > 0")
        if not 1 <= self.blade_count <= MAX_BLADES:
            raise GeometryError(f"blade_count must be in [1, {MAX_BLADES}]")
        if not 0.0 <= self.nacelle_yaw < 360.0:
            raise GeometryError("nacelle_yaw must be in [0, 360)")
        if not 0.0 <= self.rotor_phase < 360.0:
            raise GeometryError("rotor_phase must be in [0, 360)")
        if abs(self.hub_position.z - (self.tower_base.z + self.tower_height)) > 1e-9:
            raise GeometryError("hub_position.z must equal tower_base.z + tower_height")
        if len(self.blade_pitch_truth) != self.blade_count:
            raise GeometryError("blade_pitch_truth length must equal blade_count")
        if self.blade_aero_pitch and len(self.blade_aero_pitch) != self.blade_count:
            raise GeometryError("blade_aero_pitch length must equal blade_count")

    @classmethod
    def create(
        cls,
        base: Point3,
        tower_height: float,
        blade_length: float,
        blade_count: int = 3,
        nacelle_yaw: float = 0.0,
        rotor_phase: float = 90.0,
        blade_pitch_truth: Optional[Sequence[float]] = None,
        **extra: float,
    ) -> "TurbineModel":
        """
        Строит турбину со ступицей точно над основанием башни.

        Если blade_pitch_truth не задан, он вычисляется из азимутов лопастей.
        """
        hub = Point3(base.x, base.y, base.z + tower_height)
        if blade_pitch_truth is None:
            step = 360.0 / blade_count
            blade_pitch_truth = [
                face_on_inclination(rotor_phase + k * step) for k in range(blade_count)
            ]
        return cls(
            hub_position=hub,
            tower_base=base,
            tower_height=tower_height,
            nacelle_yaw=nacelle_yaw % 360.0,
            blade_length=blade_length,
            blade_count=blade_count,
            rotor_phase=rotor_phase % 360.0,
            blade_pitch_truth=tuple(float(v) for v in blade_pitch_truth),
            **extra,
        )

    @property
    def rotor_normal(self) -> np.ndarray:
        """Единичный вектор d, куда смотрит ротор (нормаль плоскости ротора)."""
        yaw = math.radians(self.nacelle_yaw)
        return np.array([math.cos(yaw), math.sin(yaw), 0.0])

    @property
    def rotor_lateral(self) -> np.ndarray:
        """Горизонтальная ось u плоскости ротора: u = z × d."""
        return np.cross(UP, self.rotor_normal)

    @property
    def blade_chord(self) -> float:
        return self.blade_length * self.chord_ratio

    @property
    def nacelle_center(self) -> Point3:
        return Point3.from_array(
            self.hub_position.as_array() - self.rotor_normal * (self.nacelle_length / 2.0)
        )

    @property
    def tower_top(self) -> Point3:
        return Point3(self.tower_base.x, self.tower_base.y, self.hub_position.z)

    def blade_azimuths(self) -> List[float]:
        step = 360.0 / self.blade_count
        return [(self.rotor_phase + k * step) % 360.0 for k in range(self.blade_count)]

    def aero_pitch(self, blade_index: int) -> float:
        if not self.blade_aero_pitch:
            return 0.0
        return self.blade_aero_pitch[blade_index]


def blade_tips(turbine: TurbineModel) -> List[Point3]:
    """
    Прямая кинематика концов лопастей.

    Конец k-й лопасти лежит в плоскости ротора на расстоянии blade_length
    от ступицы, под азимутом rotor_phase + k·360/n.
    """
    hub = turbine.hub_position.as_array()
    u = turbine.rotor_lateral
    tips = []
    for azimuth in turbine.blade_azimuths():
        phi = math.radians(azimuth)
        direction = math.cos(phi) * u + math.sin(phi) * UP
        tips.append(Point3.from_array(hub + turbine.blade_length * direction))
    return tips


@dataclass(frozen=True)
class InspectionZone:
    """Сферическая зона инспекции: центр C_i и радиус R_i."""

    center: Point3
    radius: float

    def __post_init__(self) -> None:
        if not self.radius >= 0:
            raise GeometryError("zone radius must be >= 0")

    def contains(self, point: Point3, tolerance: float = 1e-9) -> bool:
        offset = point.as_array() - self.center.as_array()
        return float(offset @ offset) <= self.radius**2 + tolerance


def compute_zone(tips: Sequence[Point3]) -> InspectionZone:
    """
    Строит зону инспекции по концам лопастей.

    Центр — покомпонентное среднее концов, радиус — максимальное расстояние
    от центра до конца лопасти.
    """
    if not tips:
        raise GeometryError("no blade tips")
    coords = np.array([tip.as_array() for tip in tips])
    center = coords.mean(axis=0)
    radius = float(np.max(np.linalg.norm(coords - center, axis=1)))
    return InspectionZone(center=Point3.from_array(center), radius=radius)


def initial_point(zone: InspectionZone, approach_azimuth: float = 0.0) -> Point3:
    """
    Точка съемки на сфере зоны.

    При approach_azimuth = 0 получается (x_i + R_i, y_i, z_i); другой азимут
    поворачивает точку подхода вокруг вертикали через центр.
    """
    theta = math.radians(approach_azimuth)
    offset = zone.radius * np.array([math.cos(theta), math.sin(theta), 0.0])
    return Point3.from_array(zone.center.as_array() + offset)


def point_segment_distance(point: np.ndarray, start: np.ndarray, end: np.ndarray) -> float:
    """Расстояние от точки до отрезка [start, end]."""
    return float(point_segment_distances(np.asarray(point)[None, :], start, end)[0])


def point_segment_distances(points: np.ndarray, start: np.ndarray, end: np.ndarray) -> np.ndarray:
    """Расстояния от точек (N, 3) до отрезка [start, end]."""
    points = np.asarray(points, dtype=float)
    axis = end - start
    length_sq = float(axis @ axis)
    if length_sq == 0.0:
        return np.linalg.norm(points - start, axis=1)
    t = np.clip((points - start) @ axis / length_sq, 0.0, 1.0)
    return np.linalg.norm(points - (start + t[:, None] * axis), axis=1)


def segment_distance(p0: np.ndarray, p1: np.ndarray, q0: np.ndarray, q1: np.ndarray) -> float:
    """
    Наименьшее расстояние между отрезками [p0, p1] и [q0, q1].

    Ближайшие точки ищутся в параметрах отрезков с отсечением по [0, 1];
    вырожденные отрезки сводятся к расстоянию от точки до отрезка.
    """
    d1 = p1 - p0
    d2 = q1 - q0
    r = p0 - q0
    a = float(d1 @ d1)
    e = float(d2 @ d2)
    f = float(d2 @ r)
    if a <= _DEGENERATE and e <= _DEGENERATE:
        return float(np.linalg.norm(r))
    if a <= _DEGENERATE:
        s, t = 0.0, float(np.clip(f / e, 0.0, 1.0))
    else:
        c = float(d1 @ r)
        if e <= _DEGENERATE:
            s, t = float(np.clip(-c / a, 0.0, 1.0)), 0.0
        else:
            b = float(d1 @ d2)
            denom = a * e - b * b
            # параллельные отрезки: любая s, берем начало
            s = float(np.clip((b * f - c * e) / denom, 0.0, 1.0)) if denom > _DEGENERATE * a * e else 0.0
            t = (b * s + f) / e
            if t < 0.0:
                s, t = float(np.clip(-c / a, 0.0, 1.0)), 0.0
            elif t > 1.0:
                s, t = float(np.clip((b - c) / a, 0.0, 1.0)), 1.0
    return float(np.linalg.norm((p0 + s * d1) - (q0 + t * d2)))


def path_clearance(points: np.ndarray, segments: Iterable[Tuple[np.ndarray, np.ndarray]]) -> float:
    """
    Наименьшее расстояние от ломаной до набора отрезков.

    Проверяются все звенья ломаной целиком, а не только ее вершины.
    Одна точка дает расстояние от точки; пустой набор отрезков дает inf.
    """
    points = np.asarray(points, dtype=float).reshape(-1, 3)
    clearance = math.inf
    for start, end in segments:
        if len(points) == 1:
            clearance = min(clearance, float(point_segment_distances(points, start, end)[0]))
            continue
        for p0, p1 in zip(points[:-1], points[1:]):
            clearance = min(clearance, segment_distance(p0, p1, start, end))
    return clearance


def structure_segments(turbine: TurbineModel) -> List[Tuple[str, np.ndarray, np.ndarray]]:
    """Оси конструкций турбины: лопасти (ступица→конец) и башня."""
    hub = turbine.hub_position.as_array()
    segments = [
        (f"blade{k}", hub, tip.as_array()) for k, tip in enumerate(blade_tips(turbine))
    ]
    segments.append(("tower", turbine.tower_base.as_array(), turbine.tower_top.as_array()))
    return segments
