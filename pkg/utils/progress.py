"""
Прогресс-бары этапов конвейера и итоговые сводки прогона.
"""

from contextlib import asynccontextmanager
from dataclasses import dataclass
from typing import TYPE_CHECKING, AsyncIterator, List, Tuple

from tqdm.asyncio import tqdm

from utils.logger import logger

if TYPE_CHECKING:
    from core.metrics import MetricsReport

_BAR_FORMAT = "{l_bar}{bar}| {n_fmt}/{total_fmt} [{elapsed}<{remaining}, {rate_fmt}]"
_RULE = "=" * 60


@dataclass(frozen=True)
class BarStyle:
    """Оформление прогресс-бара одного этапа."""

    description: str
    unit: str
    colour: str


PERCEPTION = BarStyle("Сегментация турбин", "турб", "green")
SWEEP = BarStyle("Развертка углов", "шаг", "blue")
FLEET = BarStyle("Симуляция полета", "БПЛА", "yellow")


class ProgressTracker:
    """Открывает прогресс-бары этапов; вывод отключается без TTY или при TQDM_DISABLE."""

    @asynccontextmanager
    async def track(self, style: BarStyle, total: int, description: str = "") -> AsyncIterator[tqdm]:
        bar = tqdm(
            total=total,
            desc=description or style.description,
            unit=style.unit,
            colour=style.colour,
            bar_format=_BAR_FORMAT,
            disable=None,
        )
        try:
            yield bar
        finally:
            bar.close()

    def track_perception(self, total_turbines: int, description: str = ""):
        """Бар этапа восприятия: рендер кадра, контуры и углы лопастей по каждой турбине."""
        return self.track(PERCEPTION, total_turbines, description)

    def track_sweep(self, total_steps: int, description: str = ""):
        return self.track(SWEEP, total_steps, description)

    def track_fleet(self, total_uavs: int, description: str = ""):
        return self.track(FLEET, total_uavs, description)


progress_tracker = ProgressTracker()


def get_progress_tracker() -> ProgressTracker:
    return progress_tracker


def _print_block(title: str, rows: List[Tuple[str, str]]) -> None:
    body = "\n".join(f"{label} {value}" for label, value in rows)
    print(f"\n{_RULE}\n{title}\n{_RULE}\n{body}\n{_RULE}\n")


def show_operation_summary(
    operation_name: str, total_processed: int, successful: int, failed: int, elapsed_time: float
) -> None:
    """
    Печатает сводку по завершенной серии шагов и дублирует ее в лог.

    Args:
        operation_name: Название операции
        total_processed: Сколько шагов выполнено
        successful: Сколько из них успешно
        failed: Сколько завершились ошибкой
        elapsed_time: Время в секундах
    """
    share = successful / total_processed * 100 if total_processed else 0.0
    _print_block(
        f"📊 СВОДКА: {operation_name}",
        [
            ("🎯 Шагов:", str(total_processed)),
            ("✅ Успешно:", f"{successful} ({share:.1f}%)"),
            ("❌ С ошибкой:", str(failed)),
            ("⏱️  Время:", f"{elapsed_time:.2f} сек"),
        ],
    )
    logger.info(f"{operation_name}: {successful}/{total_processed} успешно за {elapsed_time:.2f} сек")


def show_run_summary(label: str, report: "MetricsReport", elapsed_time: float) -> None:
    """Печатает метрики инспекции по сценарию."""
    _print_block(
        f"🛩️  ИТОГИ ИНСПЕКЦИИ: {label}",
        [
            ("⏱️  Время инспекции:", f"{report.total_time:.2f} мин"),
            ("📏 Длина траекторий:", f"{report.total_length:.1f} м"),
            ("🎯 Покрытие лопастей:", f"{report.blade_coverage:.1f}%"),
            ("📐 Среднее отклонение:", f"{report.mean_deviation:.3f} м"),
            ("🚁 БПЛА:", f"{report.uav_count}, операторов: {report.operator_count}"),
        ],
    )
    logger.info(f"Конвейер '{label}' завершен за {elapsed_time:.2f} сек")
