"""
Синтез кусочных траекторий инспекции: лестничный облет лопастей с учетом
класса наклона, возвраты с обходом ротора, спиральный облет башни и петля
вокруг гондолы, сборка миссии по нескольким БПЛА.

Все оси конструкций турбины (лопасти и башня) лежат в плоскости ротора:
точка, удаленная от нее не меньше чем на standoff, безопасна, а плоскость
пересекается только по перпендикуляру через свободную от конструкций точку.
Безопасная дистанция проверяется по звеньям ломаной, а не по ее вершинам.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from core.geometry import (
    UP,
    Point3,
    TurbineModel,
    blade_tips,
    compute_zone,
    initial_point,
    path_clearance,
    point_segment_distance,
    point_segment_distances,
    structure_segments,
)
from core.vision import BladeOrientation, TiltClass
from utils.config_manager import CRUISE_SPEED, DEFAULT_STANDOFF, PASS_SPACING, SIDES
from utils.error_handling import PlanningError
from utils.logger import logger

Vector3 = Tuple[float, float, float]
Obstacle = Tuple[np.ndarray, np.ndarray]

# Допуск безопасной дистанции
SAFETY_TOLERANCE = 1e-6
# Минимум вершин на виток орбиты
ORBIT_MIN_POINTS = 8
# Звенья огибания конца лопасти при смене стороны
CAP_SECTIONS = 4
# Шаг сетки поиска точки пересечения плоскости ротора, градусы
CROSSING_ANGLE_STEP = 2.0


def unit_vector(values: Sequence[float]) -> Vector3:
    """Нормирует вектор; нулевой вектор — ошибка."""
    arr = np.asarray(values, dtype=float)
    norm = float(np.linalg.norm(arr))
    if norm == 0.0 or not math.isfinite(norm):
        raise PlanningError("gaze direction must be a nonzero finite vector")
    x, y, z = (float(v) for v in arr / norm)
    return (x, y, z)


class SegmentKind(Enum):
    """Тип сегмента траектории."""

    BLADE_SWEEP = "BladeSweep"
    RETURN = "Return"
    TOWER_ORBIT = "TowerOrbit"
    NACELLE_ORBIT = "NacelleOrbit"
    TRANSIT = "Transit"


@dataclass(frozen=True)
class Waypoint:
    """Точка траектории: позиция, направление взгляда камеры, скорость, зависание."""

    position: Point3
    gaze: Vector3
    speed: float
    hold: float = 0.0

    def __post_init__(self) -> None:
        if abs(math.sqrt(sum(g * g for g in self.gaze)) - 1.0) > 1e-9:
            raise PlanningError("waypoint gaze must have unit norm")
        if not self.speed > 0:
            raise PlanningError("waypoint speed must be > 0")
        if not self.hold >= 0:
            raise PlanningError("waypoint hold must be >= 0")

    def gaze_array(self) -> np.ndarray:
        return np.asarray(self.gaze, dtype=float)


@dataclass(frozen=True)
class TrajectorySegment:
    """Сегмент траектории: полилиния путевых точек и длительность прохождения."""

    kind: SegmentKind
    waypoints: Tuple[Waypoint, ...]
    duration: float
    turbine_id: Optional[int] = None
    blade_index: Optional[int] = None

    def __post_init__(self) -> None:
        if not self.waypoints:
            raise PlanningError("segment needs at least one waypoint")
        if len(self.waypoints) > 1 and not self.duration > 0:
            raise PlanningError("segment duration must be > 0")
        if not self.duration >= 0:
            raise PlanningError("segment duration must be >= 0")

    @property
    def start(self) -> Point3:
        return self.waypoints[0].position

    @property
    def end(self) -> Point3:
        return self.waypoints[-1].position

    def positions(self) -> np.ndarray:
        return np.array([w.position.as_array() for w in self.waypoints])

    def length(self) -> float:
        return polyline_length(self.positions())


@dataclass(frozen=True)
class PlannerParams:
    """Параметры планировщика: безопасная дистанция, шаг лестницы, число сторон, скорость."""

    standoff: float = DEFAULT_STANDOFF
    pass_spacing: float = PASS_SPACING
    sides: int = SIDES
    cruise_speed: float = CRUISE_SPEED
    approach_azimuth: Optional[float] = None

    def __post_init__(self) -> None:
        if not self.standoff > 0:
            raise PlanningError("standoff must be > 0")
        if not self.pass_spacing > 0:
            raise PlanningError("pass_spacing must be > 0")
        if self.sides not in (1, 2):
            raise PlanningError("sides must be 1 or 2")
        if not self.cruise_speed > 0:
            raise PlanningError("cruise_speed must be > 0")


@dataclass(frozen=True)
class MissionPlan:
    """
    Множество траекторий миссии: упорядоченный маршрут сегментов для каждого
    БПЛА, его исходная точка и назначенные ему турбины.

    Непустой маршрут начинается и заканчивается в исходной точке, каждый
    сегмент начинается там, где закончился предыдущий, последний сегмент —
    Return. Точка привязки маршрута — исходная точка, после каждого Transit —
    его конечная точка; Transit начинается в текущей точке привязки, а Return
    заканчивается в ней (последний Return — в исходной точке).
    """

    routes: Tuple[Tuple[TrajectorySegment, ...], ...]
    origins: Tuple[Point3, ...]
    assignments: Tuple[Tuple[int, ...], ...] = field(default=())

    def __post_init__(self) -> None:
        if not self.routes:
            raise PlanningError("mission needs at least one UAV")
        if len(self.routes) != len(self.origins):
            raise PlanningError("each UAV needs exactly one origin")
        for uav_id, (route, origin) in enumerate(zip(self.routes, self.origins)):
            if route:
                _check_route(uav_id, route, origin)

    @property
    def uav_count(self) -> int:
        return len(self.routes)

    def route_duration(self, uav_id: int) -> float:
        return sum(segment.duration for segment in self.routes[uav_id])


def _check_route(uav_id: int, route: Sequence[TrajectorySegment], origin: Point3) -> None:
    if route[0].start != origin:
        raise PlanningError(f"route of UAV {uav_id} does not start at its origin")
    if route[-1].kind is not SegmentKind.RETURN or route[-1].end != origin:
        raise PlanningError(f"route of UAV {uav_id} must end with a Return to its origin")
    anchor = origin
    last = len(route) - 1
    for index, segment in enumerate(route):
        if index and segment.start != route[index - 1].end:
            raise PlanningError(f"route of UAV {uav_id}: segment {index} does not start where segment {index - 1} ends")
        if segment.kind is SegmentKind.TRANSIT:
            if segment.start != anchor:
                raise PlanningError(f"route of UAV {uav_id}: Transit {index} does not leave from its anchor")
            anchor = segment.end
        elif segment.kind is SegmentKind.RETURN:
            if segment.end != anchor and not (index == last and segment.end == origin):
                raise PlanningError(f"route of UAV {uav_id}: Return {index} does not end at its anchor")


def polyline_length(points: np.ndarray) -> float:
    if len(points) < 2:
        return 0.0
    return float(np.linalg.norm(np.diff(points, axis=0), axis=1).sum())


def _timed_segment(
    kind: SegmentKind,
    waypoints: Sequence[Waypoint],
    speed: float,
    turbine_id: Optional[int] = None,
    blade_index: Optional[int] = None,
) -> TrajectorySegment:
    """Сегмент с длительностью длина/скорость; вырожденная длина превращается в зависание."""
    length = polyline_length(np.array([w.position.as_array() for w in waypoints]))
    duration = length / speed
    if len(waypoints) > 1 and duration == 0.0:
        waypoints = waypoints[:1]
    return TrajectorySegment(kind, tuple(waypoints), duration, turbine_id, blade_index)


def _is_safe(position: np.ndarray, obstacles: Sequence[Obstacle], standoff: float) -> bool:
    return all(
        point_segment_distance(position, start, end) >= standoff - SAFETY_TOLERANCE
        for start, end in obstacles
    )


def _dedupe(points: Sequence[np.ndarray]) -> List[np.ndarray]:
    kept = [points[0]]
    for point in points[1:]:
        if float(np.linalg.norm(point - kept[-1])) > 1e-9:
            kept.append(point)
    return kept


def _facing(position: np.ndarray, start: np.ndarray, end: np.ndarray) -> Vector3:
    """Взгляд из position на ближайшую точку оси [start, end]."""
    axis = end - start
    length_sq = float(axis @ axis)
    t = 0.0 if length_sq == 0.0 else float(np.clip((position - start) @ axis / length_sq, 0.0, 1.0))
    return unit_vector(start + t * axis - position)


@dataclass(frozen=True)
class ClearanceFrame:
    """
    Плоскость ротора и оси конструкций, от которых держится дистанция.

    lateral и up — ортонормированный базис плоскости, normal — ее нормаль.
    """

    origin: np.ndarray
    normal: np.ndarray
    lateral: np.ndarray
    up: np.ndarray
    segments: Tuple[Obstacle, ...]

    @classmethod
    def through(cls, origin: np.ndarray, normal: Sequence[float], segments: Sequence[Obstacle]) -> "ClearanceFrame":
        n = np.asarray(normal, dtype=float)
        n = n / np.linalg.norm(n)
        lateral = np.cross(UP, n)
        norm = float(np.linalg.norm(lateral))
        lateral = np.array([0.0, 1.0, 0.0]) if norm < 1e-9 else lateral / norm
        return cls(np.asarray(origin, dtype=float), n, lateral, np.cross(n, lateral), tuple(segments))

    @classmethod
    def of_turbine(cls, turbine: TurbineModel) -> "ClearanceFrame":
        return cls.through(
            turbine.hub_position.as_array(),
            turbine.rotor_normal,
            [(start, end) for _, start, end in structure_segments(turbine)],
        )

    def offset(self, point: np.ndarray) -> float:
        """Расстояние со знаком от плоскости (+ перед ротором)."""
        return float((point - self.origin) @ self.normal)

    def project(self, point: np.ndarray) -> np.ndarray:
        return point - self.offset(point) * self.normal

    def clearance(self, points: np.ndarray) -> float:
        return path_clearance(points, self.segments)

    def is_clear(self, points: Sequence[np.ndarray], standoff: float) -> bool:
        return self.clearance(np.asarray(points, dtype=float)) >= standoff - SAFETY_TOLERANCE

    def crossing_point(
        self, a: np.ndarray, b: np.ndarray, standoff: float, lateral_sign: float = 0.0
    ) -> np.ndarray:
        """
        Точка плоскости не ближе standoff к конструкциям с наименьшим
        |P - a| + |P - b|; lateral_sign ограничивает поиск половиной плоскости.

        Поиск идет по полярной сетке вокруг origin с шагом standoff / 4 по
        радиусу и CROSSING_ANGLE_STEP по углу.

        Raises:
            PlanningError: Свободной точки в пределах сетки нет
        """
        reach = max(
            (float(np.linalg.norm(p - self.origin)) for segment in self.segments for p in segment),
            default=0.0,
        ) + 2.0 * standoff
        step = standoff / 4.0
        radii, angles = np.meshgrid(
            np.arange(step, reach + step, step),
            np.radians(np.arange(0.0, 360.0, CROSSING_ANGLE_STEP)),
            indexing="ij",
        )
        along = (radii * np.cos(angles)).ravel()
        across = (radii * np.sin(angles)).ravel()
        candidates = self.origin + along[:, None] * self.lateral + across[:, None] * self.up

        clear = np.full(len(candidates), np.inf)
        for start, end in self.segments:
            clear = np.minimum(clear, point_segment_distances(candidates, start, end))
        allowed = clear >= standoff
        if lateral_sign:
            allowed &= along * lateral_sign > 0
        if not allowed.any():
            raise PlanningError(f"no point {standoff} m clear of the structures to cross the rotor plane")
        cost = np.linalg.norm(candidates - a, axis=1) + np.linalg.norm(candidates - b, axis=1)
        cost[~allowed] = np.inf
        return candidates[int(np.argmin(cost))]

    def bridge(
        self, start: np.ndarray, end: np.ndarray, standoff: float, lateral_sign: float = 0.0
    ) -> List[np.ndarray]:
        """
        Ломаная start → end в обход конструкций.

        Прямая возвращается как есть, если она безопасна. Иначе точка,
        лежащая ближе standoff к плоскости, сначала уводится от нее по
        нормали; переход на другую сторону идет по нормали через
        crossing_point.
        """
        if self.is_clear([start, end], standoff):
            return [start, end]
        off_start, off_end = self.offset(start), self.offset(end)
        side_start = math.copysign(1.0, off_start if abs(off_start) > SAFETY_TOLERANCE else off_end)
        side_end = math.copysign(1.0, off_end) if abs(off_end) > SAFETY_TOLERANCE else side_start

        path = [start]
        if abs(off_start) < standoff - SAFETY_TOLERANCE:
            path.append(self.project(start) + side_start * standoff * self.normal)
        if side_start != side_end:
            crossing = self.crossing_point(self.project(start), self.project(end), standoff, lateral_sign)
            path.append(crossing + side_start * standoff * self.normal)
            path.append(crossing + side_end * standoff * self.normal)
        if abs(off_end) < standoff - SAFETY_TOLERANCE:
            path.append(self.project(end) + side_end * standoff * self.normal)
        path.append(end)
        return _dedupe(path)


def _bridged(points: Sequence[np.ndarray], frames: Sequence[ClearanceFrame], standoff: float) -> List[np.ndarray]:
    """Прокладывает ломаную через каждую из плоскостей frames и проверяет ее."""
    path = list(points)
    for frame in frames:
        expanded = [path[0]]
        for a, b in zip(path[:-1], path[1:]):
            expanded.extend(frame.bridge(a, b, standoff)[1:])
        path = expanded
    for frame in frames:
        clearance = frame.clearance(np.array(path))
        if clearance < standoff - SAFETY_TOLERANCE:
            raise PlanningError(f"leg passes {clearance:.3f} m from a structure (standoff {standoff} m)")
    return path


def _default_rotor_normal(axis: np.ndarray) -> np.ndarray:
    normal = np.cross(axis, UP)
    norm = float(np.linalg.norm(normal))
    if norm < 1e-9:
        return np.array([1.0, 0.0, 0.0])
    return normal / norm


def _end_cap(center: np.ndarray, side: np.ndarray, outward: np.ndarray, radius: float) -> List[np.ndarray]:
    """
    Вершины ломаной, огибающей конец лопасти center с направления side на -side.

    Ломаная описана вокруг полуокружности радиуса radius: каждое звено
    касается ее, поэтому до center ни одно звено не ближе radius.
    """
    sector = math.pi / CAP_SECTIONS
    reach = radius / math.cos(sector / 2.0)
    return [
        center + reach * (math.cos(beta) * side + math.sin(beta) * outward)
        for beta in (np.arange(CAP_SECTIONS) + 0.5) * sector
    ]


def _face_switch(
    frame: ClearanceFrame,
    last: np.ndarray,
    first: np.ndarray,
    end: np.ndarray,
    outward: np.ndarray,
    standoff: float,
) -> List[np.ndarray]:
    """Промежуточные точки перехода на другую сторону лопасти у ее конца end."""
    side = last - end
    if np.allclose(first - end, -side) and abs(float(np.linalg.norm(side)) - standoff) < SAFETY_TOLERANCE:
        cap = _end_cap(end, side / standoff, outward, standoff)
        if frame.is_clear([last, *cap, first], standoff):
            return cap
    return frame.bridge(last, first, standoff)[1:-1]


def plan_blade_path(
    hub: Point3,
    tip: Point3,
    orientation: BladeOrientation,
    params: PlannerParams,
    *,
    rotor_normal: Optional[Sequence[float]] = None,
    viewpoint: Optional[Point3] = None,
    obstacles: Sequence[Obstacle] = (),
    turbine_id: Optional[int] = None,
    blade_index: Optional[int] = None,
) -> TrajectorySegment:
    """
    Лестничный облет лопасти на дистанции standoff от ее оси.

    Ступени лежат на прямых, параллельных оси лопасти и смещенных на
    ±standoff по нормали к плоскости ротора; число ступеней на проход
    ceil(L / pass_spacing) + 1 (не меньше двух). Класс наклона задает
    направление прохода и порядок сторон:

    - Vertical: спуск от верхнего конца лопасти, сначала ближняя сторона;
    - Horizontal: боковой проход слева направо по оси u, сначала дальняя сторона;
    - Acute: диагональный проход от конца лопасти к ступице, сначала ближняя сторона.

    Второй проход (sides = 2) идет в обратном направлении по противоположной
    стороне. Смена стороны огибает конец прохода по ломаной, описанной вокруг
    полуокружности радиуса standoff, а если она задевает obstacles —
    пересекает плоскость ротора в свободной точке. Точки лестницы, оказавшиеся
    ближе standoff к obstacles, отбрасываются.

    Raises:
        PlanningError: Безопасных точек нет либо звено пути ближе standoff к конструкции
    """
    hub_arr, tip_arr = hub.as_array(), tip.as_array()
    axis = tip_arr - hub_arr
    length = float(np.linalg.norm(axis))
    if length < 1e-9:
        raise PlanningError("degenerate blade: hub and tip coincide")

    normal = (
        _default_rotor_normal(axis / length)
        if rotor_normal is None
        else np.asarray(rotor_normal, dtype=float) / np.linalg.norm(rotor_normal)
    )
    lateral = np.cross(UP, normal)
    frame = ClearanceFrame.through(hub_arr, normal, [(hub_arr, tip_arr), *obstacles])

    tilt = orientation.tilt_class
    if tilt is TiltClass.VERTICAL:
        start_at_tip = tip_arr[2] >= hub_arr[2]
    elif tilt is TiltClass.HORIZONTAL:
        start_at_tip = float(tip_arr @ lateral) < float(hub_arr @ lateral)
    else:
        start_at_tip = True
    start, end = (tip_arr, hub_arr) if start_at_tip else (hub_arr, tip_arr)

    near_side = 1.0
    if viewpoint is not None and float((viewpoint.as_array() - hub_arr) @ normal) < 0:
        near_side = -1.0
    first_side = -near_side if tilt is TiltClass.HORIZONTAL else near_side

    rungs = max(math.ceil(length / params.pass_spacing) + 1, 2)
    fractions = np.linspace(0.0, 1.0, rungs)
    speed = params.cruise_speed

    passes: List[List[Waypoint]] = []
    dropped = 0
    for pass_index in range(params.sides):
        side = first_side if pass_index == 0 else -first_side
        order = fractions if pass_index == 0 else fractions[::-1]
        gaze = unit_vector(-side * normal)
        rung_points: List[Waypoint] = []
        for fraction in order:
            on_axis = start + fraction * (end - start)
            position = on_axis + side * params.standoff * normal
            if not _is_safe(position, obstacles, params.standoff):
                dropped += 1
                continue
            rung_points.append(Waypoint(Point3.from_array(position), gaze, speed))
        passes.append(rung_points)

    if dropped:
        logger.debug("Лопасть %s: отброшено %d небезопасных точек", blade_index, dropped)
    waypoints = list(passes[0])
    if len(passes) == 2 and passes[0] and passes[1]:
        switch = _face_switch(
            frame,
            passes[0][-1].position.as_array(),
            passes[1][0].position.as_array(),
            end,
            (end - start) / length,
            params.standoff,
        )
        waypoints += [Waypoint(Point3.from_array(p), _facing(p, hub_arr, tip_arr), speed) for p in switch]
    if len(passes) == 2:
        waypoints += passes[1]
    if not waypoints:
        raise PlanningError("no safe waypoints left for blade sweep")

    clearance = frame.clearance(np.array([w.position.as_array() for w in waypoints]))
    if clearance < params.standoff - SAFETY_TOLERANCE:
        raise PlanningError(f"blade sweep passes {clearance:.3f} m from a structure (standoff {params.standoff} m)")
    return _timed_segment(SegmentKind.BLADE_SWEEP, waypoints, speed, turbine_id, blade_index)


def plan_return(
    from_point: Point3,
    origin: Point3,
    return_time: float,
    gaze: Optional[Sequence[float]] = None,
    via: Sequence[Point3] = (),
) -> TrajectorySegment:
    """
    Возврат: в момент 0 — from_point, в момент return_time — origin.

    Без via путь прямолинейный, иначе это ломаная через точки via с
    равномерной скоростью по ней. По умолчанию камера смотрит по направлению
    движения на каждом звене.
    """
    if not return_time > 0:
        raise PlanningError("return_time must be > 0")
    points = [from_point, *via, origin]
    arrays = np.array([p.as_array() for p in points])
    distance = polyline_length(arrays)
    if distance == 0.0:
        raise PlanningError("return leg has zero length")
    steps = np.diff(arrays, axis=0)
    if gaze is not None:
        gazes = [unit_vector(gaze)] * len(points)
    else:
        headings = [unit_vector(step) for step in steps]
        gazes = headings + headings[-1:]
    speed = distance / return_time
    return TrajectorySegment(
        SegmentKind.RETURN,
        tuple(Waypoint(point, direction, speed) for point, direction in zip(points, gazes)),
        return_time,
    )


def _ring_count(height: float, spacing: float) -> int:
    return max(math.ceil(height / spacing) + 1, 2)


def _orbit_points(radius: float, spacing: float) -> int:
    return max(math.ceil(2.0 * math.pi * radius / spacing), ORBIT_MIN_POINTS)


def _tower_helix(
    turbine: TurbineModel, params: PlannerParams, frame: ClearanceFrame, start_azimuth: float
) -> List[Waypoint]:
    """
    Спираль вокруг башни от основания к гондоле, виток на pass_spacing высоты.

    Витки — многоугольники, описанные вокруг окружности радиуса standoff.
    Спираль обрывается перед первым звеном, подходящим к лопастям ближе standoff.
    """
    standoff = params.standoff
    per_turn = _orbit_points(standoff, params.pass_spacing)
    turns = _ring_count(turbine.tower_height, params.pass_spacing) - 1
    radius = standoff / math.cos(math.pi / per_turn)

    steps = np.arange(turns * per_turn + 1)
    angles = math.radians(start_azimuth) + 2.0 * math.pi * steps / per_turn
    heights = turbine.tower_height * steps / steps[-1]
    outward = np.stack([np.cos(angles), np.sin(angles), np.zeros(len(steps))], axis=1)
    positions = turbine.tower_base.as_array() + heights[:, None] * UP + radius * outward

    if not frame.is_clear(positions[:1], standoff):
        return []
    kept = 1
    while kept < len(positions) and frame.is_clear(positions[kept - 1 : kept + 1], standoff):
        kept += 1
    if kept < len(positions):
        logger.debug(f"Облет башни обрезан на высоте {heights[kept - 1]:.1f} м из {turbine.tower_height:.1f} м")
    return [
        Waypoint(Point3.from_array(position), unit_vector(-direction), params.cruise_speed)
        for position, direction in zip(positions[:kept], outward[:kept])
    ]


def _nacelle_loop(turbine: TurbineModel, params: PlannerParams, frame: ClearanceFrame) -> List[Waypoint]:
    """
    Замкнутая петля вокруг гондолы на высоте ступицы.

    Петля начинается и заканчивается перед ступицей на расстоянии standoff,
    заходит за плоскость ротора с одной стороны и возвращается с другой;
    за плоскостью идет по многоугольнику, описанному вокруг окружности
    радиуса nacelle_length / 2 + standoff с центром в центре гондолы.
    """
    standoff = params.standoff
    hub = turbine.hub_position.as_array()
    rear = hub - turbine.nacelle_length * turbine.rotor_normal
    inner = turbine.nacelle_length / 2.0 + standoff
    per_turn = _orbit_points(inner, params.pass_spacing)
    radius = inner / math.cos(math.pi / per_turn)

    betas = 2.0 * math.pi * (np.arange(per_turn) + 0.5) / per_turn
    ring = (
        turbine.nacelle_center.as_array()
        + radius * np.cos(betas)[:, None] * turbine.rotor_normal
        + radius * np.sin(betas)[:, None] * turbine.rotor_lateral
    )
    behind = [point for point in ring if frame.offset(point) <= -standoff + SAFETY_TOLERANCE]
    front = hub + standoff * turbine.rotor_normal

    path = [front]
    path += frame.bridge(front, behind[0], standoff, lateral_sign=1.0)[1:]
    path += behind[1:]
    path += frame.bridge(behind[-1], front, standoff, lateral_sign=-1.0)[1:]
    path = _dedupe(path)

    clearance = frame.clearance(np.array(path))
    if clearance < standoff - SAFETY_TOLERANCE:
        raise PlanningError(f"nacelle loop passes {clearance:.3f} m from a structure")
    return [
        Waypoint(Point3.from_array(point), _facing(point, hub, rear), params.cruise_speed)
        for point in path
    ]


def plan_static_structures(
    turbine: TurbineModel,
    params: PlannerParams,
    *,
    start_azimuth: float = 0.0,
    turbine_id: Optional[int] = None,
) -> List[TrajectorySegment]:
    """
    Фиксированные облеты статичных элементов: спираль вокруг башни
    (TowerOrbit) и замкнутая петля вокруг гондолы (NacelleOrbit).

    Облет, который нельзя пройти на дистанции standoff, пропускается с
    предупреждением.
    """
    frame = ClearanceFrame.of_turbine(turbine)
    speed = params.cruise_speed
    segments: List[TrajectorySegment] = []

    helix = _tower_helix(turbine, params, frame, start_azimuth)
    if len(helix) > 1:
        segments.append(_timed_segment(SegmentKind.TOWER_ORBIT, helix, speed, turbine_id))
    else:
        logger.warning(f"Турбина {turbine_id}: облет башни невозможен на дистанции {params.standoff} м")

    try:
        loop = _nacelle_loop(turbine, params, frame)
    except PlanningError as e:
        logger.warning(f"Турбина {turbine_id}: облет гондолы невозможен на дистанции {params.standoff} м: {e}")
    else:
        segments.append(_timed_segment(SegmentKind.NACELLE_ORBIT, loop, speed, turbine_id))
    return segments


class _SegmentTable:
    """Накопленные длины дуг сегмента для быстрой интерполяции."""

    def __init__(self, segment: TrajectorySegment):
        self.segment = segment
        self.positions = segment.positions()
        self.gazes = np.array([w.gaze_array() for w in segment.waypoints])
        steps = np.linalg.norm(np.diff(self.positions, axis=0), axis=1) if len(self.positions) > 1 else np.zeros(0)
        self.cumulative = np.concatenate([[0.0], np.cumsum(steps)])
        self.total = float(self.cumulative[-1])

    def evaluate(self, t: float) -> Tuple[np.ndarray, np.ndarray, float]:
        segment = self.segment
        if len(self.positions) == 1 or self.total == 0.0 or segment.duration == 0.0:
            first = segment.waypoints[0]
            return self.positions[0], self.gazes[0], first.speed
        s = min(max(t / segment.duration, 0.0), 1.0) * self.total
        index = int(np.searchsorted(self.cumulative, s, side="right")) - 1
        index = min(max(index, 0), len(self.positions) - 2)
        span = self.cumulative[index + 1] - self.cumulative[index]
        fraction = 0.0 if span == 0.0 else (s - self.cumulative[index]) / span
        position = self.positions[index] + fraction * (self.positions[index + 1] - self.positions[index])
        gaze = slerp(self.gazes[index], self.gazes[index + 1], fraction)
        return position, gaze, segment.waypoints[index].speed


def slerp(g0: np.ndarray, g1: np.ndarray, fraction: float) -> np.ndarray:
    """Сферическая интерполяция единичных векторов."""
    if fraction <= 0.0:
        return g0
    if fraction >= 1.0:
        return g1
    cos_omega = float(np.clip(g0 @ g1, -1.0, 1.0))
    omega = math.acos(cos_omega)
    if omega < 1e-9:
        return g0
    if math.pi - omega < 1e-6:
        # противоположные векторы: поворот через ортогональное направление
        helper = UP if abs(float(g0 @ UP)) < 0.9 else np.array([1.0, 0.0, 0.0])
        ortho = helper - (helper @ g0) * g0
        ortho /= np.linalg.norm(ortho)
        angle = fraction * math.pi
        return math.cos(angle) * g0 + math.sin(angle) * ortho
    s = math.sin(omega)
    result = (math.sin((1.0 - fraction) * omega) * g0 + math.sin(fraction * omega) * g1) / s
    return result / np.linalg.norm(result)


def sample_trajectory(segment: TrajectorySegment, t: float) -> Waypoint:
    """
    Точка S_i(t) сегмента: линейная интерполяция по длине дуги пропорционально
    t / duration, направление взгляда — сферическая интерполяция.
    """
    if not -1e-9 <= t <= segment.duration + 1e-9:
        raise PlanningError(f"t={t} outside [0, {segment.duration}]")
    position, gaze, speed = _SegmentTable(segment).evaluate(t)
    return Waypoint(Point3.from_array(position), unit_vector(gaze), speed)


class RouteSampler:
    """Оценка опорной траектории всего маршрута БПЛА по времени от старта."""

    def __init__(self, route: Sequence[TrajectorySegment], origin: Point3):
        self.origin = origin.as_array()
        self.tables = [_SegmentTable(segment) for segment in route]
        durations = [segment.duration for segment in route]
        self.starts = np.concatenate([[0.0], np.cumsum(durations)])
        self.duration = float(self.starts[-1])

    def reference(self, t: float) -> Tuple[np.ndarray, np.ndarray]:
        """Позиция и направление взгляда в момент t (за пределами маршрута — крайние точки)."""
        if not self.tables:
            return self.origin.copy(), np.array([1.0, 0.0, 0.0])
        t = min(max(t, 0.0), self.duration)
        index = int(np.searchsorted(self.starts, t, side="right")) - 1
        index = min(max(index, 0), len(self.tables) - 1)
        position, gaze, _ = self.tables[index].evaluate(t - self.starts[index])
        return position, gaze


def _prefixed(
    segment: TrajectorySegment,
    previous: Point3,
    speed: float,
    frames: Sequence[ClearanceFrame] = (),
    standoff: float = 0.0,
) -> TrajectorySegment:
    """Начинает сегмент с конечной точки предыдущего, сохраняя непрерывность маршрута."""
    if segment.start == previous:
        return segment
    path = _bridged([previous.as_array(), segment.start.as_array()], frames, standoff)
    head = segment.waypoints[0]
    lead = (Waypoint(previous, head.gaze, head.speed),) + tuple(
        Waypoint(Point3.from_array(point), head.gaze, head.speed) for point in path[1:-1]
    )
    return _timed_segment(
        segment.kind, lead + segment.waypoints, speed, segment.turbine_id, segment.blade_index
    )


def _leg(
    kind: SegmentKind,
    start: Point3,
    end: Point3,
    speed: float,
    turbine_id: Optional[int],
    frames: Sequence[ClearanceFrame] = (),
    standoff: float = 0.0,
) -> TrajectorySegment:
    path = _bridged([start.as_array(), end.as_array()], frames, standoff)
    via = [Point3.from_array(point) for point in path[1:-1]]
    segment = plan_return(start, end, polyline_length(np.array(path)) / speed, via=via)
    return TrajectorySegment(kind, segment.waypoints, segment.duration, turbine_id)


def approach_azimuth_for(turbine: TurbineModel, params: PlannerParams) -> float:
    """Азимут подхода: явный из параметров либо направление, в которое смотрит ротор."""
    return turbine.nacelle_yaw if params.approach_azimuth is None else params.approach_azimuth


def viewpoint_for(turbine: TurbineModel, params: PlannerParams) -> Point3:
    """Точка съемки турбины."""
    zone = compute_zone(blade_tips(turbine))
    return initial_point(zone, approach_azimuth_for(turbine, params))


def parking_point(turbine: TurbineModel, viewpoint: Point3, rank: int, params: PlannerParams) -> Point3:
    """
    Стоянка БПЛА без назначенных турбин: rank шагов по standoff от точки
    съемки по горизонтали в сторону от ступицы.
    """
    away = viewpoint.as_array() - turbine.hub_position.as_array()
    away[2] = 0.0
    norm = float(np.linalg.norm(away))
    direction = turbine.rotor_normal if norm < 1e-9 else away / norm
    return viewpoint.translated(rank * params.standoff * direction)


def plan_turbine(
    turbine: TurbineModel,
    orientations: Sequence[BladeOrientation],
    params: PlannerParams,
    anchor: Point3,
    turbine_id: Optional[int] = None,
) -> List[TrajectorySegment]:
    """
    Сегменты одной турбины без префиксов: лопасти по возрастанию индекса,
    каждая с возвратом к anchor, затем башня, гондола и финальный возврат.
    """
    if len(orientations) != turbine.blade_count:
        raise PlanningError(
            f"turbine {turbine_id}: {len(orientations)} orientations for {turbine.blade_count} blades"
        )
    structures = structure_segments(turbine)
    frames = (ClearanceFrame.of_turbine(turbine),)
    speed, standoff = params.cruise_speed, params.standoff
    segments: List[TrajectorySegment] = []
    for index, (tip, orientation) in enumerate(zip(blade_tips(turbine), orientations)):
        own = f"blade{index}"
        obstacles = [(start, end) for name, start, end in structures if name != own]
        sweep = plan_blade_path(
            turbine.hub_position,
            tip,
            orientation,
            params,
            rotor_normal=turbine.rotor_normal,
            viewpoint=anchor,
            obstacles=obstacles,
            turbine_id=turbine_id,
            blade_index=index,
        )
        segments.append(sweep)
        segments.append(_leg(SegmentKind.RETURN, sweep.end, anchor, speed, turbine_id, frames, standoff))

    static = plan_static_structures(
        turbine, params, start_azimuth=approach_azimuth_for(turbine, params), turbine_id=turbine_id
    )
    segments.extend(static)
    if static:
        segments.append(_leg(SegmentKind.RETURN, static[-1].end, anchor, speed, turbine_id, frames, standoff))
    return segments


def assemble_mission(
    turbines: Sequence[TurbineModel],
    orientations: Sequence[Sequence[BladeOrientation]],
    uav_count: int,
    params: PlannerParams,
) -> MissionPlan:
    """
    Собирает множество траекторий миссии.

    Турбины распределяются по БПЛА по кругу. Исходная точка БПЛА — точка съемки
    первой назначенной ему турбины; БПЛА без турбин стоят в отдельных точках
    рядом с точками съемки. Переход к следующей турбине добавляет сегмент
    Transit, а маршрут, закончившийся не в исходной точке, завершается
    возвратом в нее. Каждый сегмент начинается в конечной точке предыдущего;
    переходы огибают роторы турбин, между которыми идут.
    """
    if uav_count < 1:
        raise PlanningError("uav_count must be >= 1")
    if not turbines:
        raise PlanningError("no turbines to inspect")
    if len(orientations) != len(turbines):
        raise PlanningError("orientations must align with turbines")

    viewpoints = [viewpoint_for(turbine, params) for turbine in turbines]
    frames = [ClearanceFrame.of_turbine(turbine) for turbine in turbines]
    assignments: Dict[int, List[int]] = {uav: [] for uav in range(uav_count)}
    for turbine_id in range(len(turbines)):
        assignments[turbine_id % uav_count].append(turbine_id)

    def crossing(first: int, second: int) -> Tuple[ClearanceFrame, ...]:
        return (frames[first],) if first == second else (frames[first], frames[second])

    speed, standoff = params.cruise_speed, params.standoff
    routes: List[Tuple[TrajectorySegment, ...]] = []
    origins: List[Point3] = []
    idle = 0
    for uav_id in range(uav_count):
        assigned = assignments[uav_id]
        if assigned:
            origin = viewpoints[assigned[0]]
        else:
            idle += 1
            parked = uav_id % len(turbines)
            origin = parking_point(turbines[parked], viewpoints[parked], idle, params)
        route: List[TrajectorySegment] = []
        current = origin
        previous_id = assigned[0] if assigned else None
        for turbine_id in assigned:
            if viewpoints[turbine_id] != current:
                route.append(
                    _leg(
                        SegmentKind.TRANSIT, current, viewpoints[turbine_id], speed, turbine_id,
                        crossing(previous_id, turbine_id), standoff,
                    )
                )
                current = viewpoints[turbine_id]
            anchor = viewpoints[turbine_id]
            for segment in plan_turbine(
                turbines[turbine_id], orientations[turbine_id], params, anchor, turbine_id
            ):
                segment = _prefixed(segment, current, speed, (frames[turbine_id],), standoff)
                route.append(segment)
                current = segment.end
            previous_id = turbine_id
        if current != origin:
            route.append(
                _leg(SegmentKind.RETURN, current, origin, speed, None, crossing(previous_id, assigned[0]), standoff)
            )
        routes.append(tuple(route))
        origins.append(origin)
        logger.debug(
            "БПЛА %d: турбины %s, сегментов %d", uav_id, assigned, len(route)
        )

    return MissionPlan(
        routes=tuple(routes),
        origins=tuple(origins),
        assignments=tuple(tuple(assignments[uav]) for uav in range(uav_count)),
    )
