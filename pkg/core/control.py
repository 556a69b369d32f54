"""
Покоординатный ПИД-регулятор слежения за траекторией, модель ветра
с порывами и кинематический симулятор полета БПЛА.
"""

import asyncio
import math
from dataclasses import dataclass
from functools import partial
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from core.geometry import Point3
from core.trajectory import MissionPlan, RouteSampler, TrajectorySegment
from utils.config_manager import (
    DT,
    GUST_CORRELATION_TIME,
    INTEGRAL_LIMIT,
    KD,
    KI,
    KP,
    MAX_DT,
)
from utils.error_handling import ControlError
from utils.logger import logger

Gain = Union[float, Tuple[float, float, float]]


def _axis_vector(value: Gain, name: str) -> np.ndarray:
    arr = np.broadcast_to(np.asarray(value, dtype=float), (3,)).copy()
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise ControlError(f"{name} must be finite and >= 0")
    return arr


@dataclass(frozen=True)
class PIDGains:
    """
    Коэффициенты K_P, K_I, K_D. Скаляр применяется ко всем осям,
    тройка (kx, ky, kz) задает коэффициенты по осям.
    """

    kp: Gain = KP
    ki: Gain = KI
    kd: Gain = KD

    def __post_init__(self) -> None:
        for name in ("kp", "ki", "kd"):
            _axis_vector(getattr(self, name), name)

    def vectors(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (
            _axis_vector(self.kp, "kp"),
            _axis_vector(self.ki, "ki"),
            _axis_vector(self.kd, "kd"),
        )

    @classmethod
    def zero(cls) -> "PIDGains":
        return cls(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class PIDState:
    """Накопленный интеграл ошибки и предыдущая ошибка по осям."""

    integral: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    prev_error: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    started: bool = False


def pid_step(
    gains: PIDGains,
    state: PIDState,
    error: Sequence[float],
    dt: float,
    integral_limit: float = INTEGRAL_LIMIT,
) -> Tuple[np.ndarray, PIDState]:
    """
    Один шаг регулятора: u = kp·e + ki·I + kd·(e - e_prev)/dt по каждой оси.

    Интеграл накапливается прямоугольниками и ограничивается ±integral_limit.
    На первом шаге предыдущая ошибка равна текущей, производная нулевая.
    """
    if not dt > 0:
        raise ControlError("dt must be > 0")
    kp, ki, kd = gains.vectors()
    e = np.asarray(error, dtype=float)
    previous = np.asarray(state.prev_error, dtype=float) if state.started else e
    integral = np.clip(np.asarray(state.integral, dtype=float) + e * dt, -integral_limit, integral_limit)
    control = kp * e + ki * integral + kd * (e - previous) / dt
    next_state = PIDState(
        integral=tuple(float(v) for v in integral),  # type: ignore[arg-type]
        prev_error=tuple(float(v) for v in e),  # type: ignore[arg-type]
        started=True,
    )
    return control, next_state


@dataclass(frozen=True)
class WindModel:
    """Ветер: средняя скорость плюс порывы с заданной амплитудой и временем корреляции."""

    mean: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    gust_amplitude: float = 0.0
    gust_correlation_time: float = GUST_CORRELATION_TIME
    seed: int = 0

    def __post_init__(self) -> None:
        if not all(math.isfinite(v) for v in self.mean):
            raise ControlError("wind mean must be finite")
        if not self.gust_amplitude >= 0:
            raise ControlError("gust_amplitude must be >= 0")
        if not self.gust_correlation_time > 0:
            raise ControlError("gust_correlation_time must be > 0")

    @property
    def mean_speed(self) -> float:
        return float(np.linalg.norm(self.mean))


class WindStream:
    """
    Поток порывов одного БПЛА: дискретный процесс Орнштейна–Уленбека
    со стационарным СКО gust_amplitude. Генератор зависит от (seed, uav_id).
    """

    def __init__(self, model: WindModel, uav_id: int = 0):
        self.model = model
        self.rng = np.random.default_rng([model.seed & 0xFFFFFFFFFFFFFFFF, uav_id])
        self.mean = np.asarray(model.mean, dtype=float)
        self.gust = model.gust_amplitude * self.rng.standard_normal(3)
        self.time: Optional[float] = None

    def advance(self, t: float) -> np.ndarray:
        if t < 0:
            raise ControlError("wind time must be >= 0")
        if self.time is not None:
            step = t - self.time
            if step < 0:
                raise ControlError("wind samples must be requested in time order")
            if step > 0:
                decay = math.exp(-step / self.model.gust_correlation_time)
                scale = self.model.gust_amplitude * math.sqrt(1.0 - decay * decay)
                self.gust = decay * self.gust + scale * self.rng.standard_normal(3)
        self.time = t
        return self.mean + self.gust


def wind_sample(model: WindModel, t: float, stream: WindStream) -> np.ndarray:
    """Скорость ветра в момент t для потока stream (моменты не убывают)."""
    if stream.model is not model:
        raise ControlError("wind stream belongs to another model")
    return stream.advance(t)


@dataclass(frozen=True)
class UAVState:
    """Состояние кинематической модели БПЛА."""

    position: Point3
    velocity: Tuple[float, float, float]
    time: float


@dataclass(frozen=True)
class FlightLog:
    """
    Равномерные по времени отсчеты полета одного БПЛА: фактическая и опорная
    позиции, управление, ветер и плановое направление взгляда камеры.
    """

    uav_id: int
    dt: float
    times: np.ndarray
    positions: np.ndarray
    references: np.ndarray
    controls: np.ndarray
    winds: np.ndarray
    gazes: np.ndarray

    def __post_init__(self) -> None:
        n = len(self.times)
        if n == 0:
            raise ControlError("flight log needs at least one sample")
        for name in ("positions", "references", "controls", "winds", "gazes"):
            if getattr(self, name).shape != (n, 3):
                raise ControlError(f"{name} must have shape ({n}, 3)")
        if n > 1 and np.any(np.diff(self.times) <= 0):
            raise ControlError("flight log times must be strictly increasing")
        for name in ("times", "positions", "references", "controls", "winds", "gazes"):
            getattr(self, name).setflags(write=False)

    def __len__(self) -> int:
        return len(self.times)

    def final_state(self) -> UAVState:
        velocity = self.controls[-1] + self.winds[-1]
        return UAVState(
            position=Point3.from_array(self.positions[-1]),
            velocity=tuple(float(v) for v in velocity),  # type: ignore[arg-type]
            time=float(self.times[-1]),
        )


def simulate_route(
    route: Sequence[TrajectorySegment],
    origin: Point3,
    uav_id: int,
    gains: PIDGains,
    wind: WindModel,
    dt: float = DT,
    integral_limit: float = INTEGRAL_LIMIT,
) -> FlightLog:
    """
    Полет одного БПЛА по маршруту.

    Скорость = упреждение по опорной траектории (S(t + dt) - S(t)) / dt
    + коррекция ПИД + ветер; позиция интегрируется явным методом Эйлера.
    Полет начинается на опорной траектории и заканчивается, когда истекает
    длительность маршрута.
    """
    if not 0.0 < dt <= MAX_DT:
        raise ControlError(f"dt must be in (0, {MAX_DT}]")
    sampler = RouteSampler(route, origin)
    steps = int(math.floor(sampler.duration / dt + 1e-9))
    stream = WindStream(wind, uav_id)

    n = steps + 1
    times = np.arange(n) * dt
    positions = np.empty((n, 3))
    references = np.empty((n, 3))
    controls = np.empty((n, 3))
    winds = np.empty((n, 3))
    gazes = np.empty((n, 3))

    state = PIDState()
    reference, gaze = sampler.reference(0.0)
    position = reference.copy()
    for k in range(n):
        t = float(times[k])
        following, next_gaze = sampler.reference(t + dt)
        control, state = pid_step(gains, state, reference - position, dt, integral_limit)
        gust = wind_sample(wind, t, stream)

        positions[k] = position
        references[k] = reference
        controls[k] = control
        winds[k] = gust
        gazes[k] = gaze

        feedforward = (following - reference) / dt
        position = position + dt * (feedforward + control + gust)
        reference, gaze = following, next_gaze

    return FlightLog(uav_id, dt, times, positions, references, controls, winds, gazes)


def simulate_flight(
    plan: MissionPlan,
    gains: PIDGains,
    wind: WindModel,
    dt: float = DT,
    integral_limit: float = INTEGRAL_LIMIT,
) -> List[FlightLog]:
    """Полет всех БПЛА миссии последовательно; по одному журналу на БПЛА."""
    if not 0.0 < dt <= MAX_DT:
        raise ControlError(f"dt must be in (0, {MAX_DT}]")
    return [
        simulate_route(route, origin, uav_id, gains, wind, dt, integral_limit)
        for uav_id, (route, origin) in enumerate(zip(plan.routes, plan.origins))
    ]


async def simulate_fleet(
    plan: MissionPlan,
    gains: PIDGains,
    wind: WindModel,
    dt: float = DT,
    integral_limit: float = INTEGRAL_LIMIT,
) -> List[FlightLog]:
    """
    Асинхронный вариант simulate_flight: каждый БПЛА моделируется отдельной
    задачей в пуле потоков, порядок журналов совпадает с порядком БПЛА.
    """
    if not 0.0 < dt <= MAX_DT:
        raise ControlError(f"dt must be in (0, {MAX_DT}]")
    loop = asyncio.get_running_loop()
    tasks = [
        loop.run_in_executor(
            None,
            partial(simulate_route, route, origin, uav_id, gains, wind, dt, integral_limit),
        )
        for uav_id, (route, origin) in enumerate(zip(plan.routes, plan.origins))
    ]
    logs = await asyncio.gather(*tasks)
    logger.debug("Смоделирован полет %d БПЛА", len(logs))
    return list(logs)
