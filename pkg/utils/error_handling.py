"""
Иерархия исключений и обработка ошибок с понятными пользователю сообщениями.
"""

import logging
from collections import Counter, deque
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import Deque, Dict, List, Optional, Type, TypeVar

from utils.logger import logger

T = TypeVar("T")


class InspectionError(Exception):
    """Базовое исключение всех операций планирования инспекции."""


class ConfigError(InspectionError):
    """Ошибка сценария или конфигурации; всегда указывает проблемный ключ."""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")


class GeometryError(InspectionError):
    """Ошибка геометрической модели турбины."""


class VisionError(InspectionError):
    """Ошибка конвейера обработки изображения."""


class SubjectNotInViewError(VisionError):
    """Турбина не попадает в поле зрения сенсора."""

    def __init__(self, message: str = "subject not in view"):
        super().__init__(message)


class PlanningError(InspectionError):
    """Ошибка синтеза траектории."""


class ControlError(InspectionError):
    """Ошибка регулятора или симулятора полета."""


class MetricsError(InspectionError):
    """Ошибка вычисления метрик."""


class PipelineError(InspectionError):
    """Ошибка этапа конвейера с указанием имени этапа."""

    def __init__(self, stage: str, cause: Exception, turbine_id: Optional[int] = None):
        self.stage = stage
        self.cause = cause
        self.turbine_id = turbine_id
        where = f" (turbine {turbine_id})" if turbine_id is not None else ""
        super().__init__(f"{stage}{where}: {cause}")

class ErrorSeverity(Enum):
    """Критичность ошибки и соответствующий уровень лога."""

    LOW = logging.INFO
    MEDIUM = logging.WARNING
    HIGH = logging.ERROR
    CRITICAL = logging.CRITICAL


_SEVERITY_PREFIX = {
    ErrorSeverity.LOW: "ℹ️ ИНФОРМАЦИЯ",
    ErrorSeverity.MEDIUM: "⚠️ ПРЕДУПРЕЖДЕНИЕ",
    ErrorSeverity.HIGH: "❌ ОШИБКА",
    ErrorSeverity.CRITICAL: "🔥 КРИТИЧЕСКАЯ ОШИБКА",
}

# Коды завершения процесса
EXIT_OK = 0
EXIT_CONFIG_ERROR = 1
EXIT_PIPELINE_ERROR = 2


@dataclass(frozen=True)
class ErrorContext:
    """Где произошла ошибка: операция, файл сценария, этап и турбина."""

    operation: str
    file_path: Optional[Path] = None
    stage: Optional[str] = None
    turbine_id: Optional[int] = None

    @classmethod
    def of_pipeline(cls, error: BaseException) -> "ErrorContext":
        return cls(
            operation="run_pipeline",
            stage=getattr(error, "stage", None),
            turbine_id=getattr(error, "turbine_id", None),
        )


def _lookup(table: Dict[Type[BaseException], T], error: BaseException) -> Optional[T]:
    """Ищет запись для класса ошибки или ближайшего из его базовых классов."""
    for klass in type(error).__mro__:
        if klass in table:
            return table[klass]
    return None


class UserFriendlyError:
    """Понятные пользователю сообщения и советы для ошибок конвейера и сценария."""

    ERROR_TRANSLATIONS: Dict[Type[BaseException], str] = {
        ConfigError: "Ошибка в файле сценария",
        PipelineError: "Ошибка на этапе конвейера",
        SubjectNotInViewError: "Турбина вне поля зрения сенсора",
        VisionError: "Ошибка обработки кадра",
        GeometryError: "Некорректная геометрия турбины",
        PlanningError: "Не удалось построить траекторию",
        ControlError: "Ошибка симуляции полета",
        MetricsError: "Ошибка вычисления метрик",
        FileNotFoundError: "Файл или директория не найдены",
        IsADirectoryError: "Указан путь к директории, а не к файлу",
        PermissionError: "Недостаточно прав для записи результатов",
    }

    ERROR_SUGGESTIONS: Dict[Type[BaseException], List[str]] = {
        ConfigError: [
            "📝 Проверьте ключ, указанный в сообщении",
            "📋 Схема сценария описана в docs/scenario_schema.md",
            "💡 Образец: inspect --save-scenario three_turbines_weak_wind",
        ],
        SubjectNotInViewError: [
            "📐 Проверьте nacelle_yaw и planner.approach_azimuth",
            "🔭 Увеличьте sensor.fov",
        ],
        PipelineError: [
            "🔍 Запустите с --verbose, чтобы увидеть ход этапов",
            "📋 Имя этапа указано в начале сообщения",
        ],
        FileNotFoundError: [
            "📁 Проверьте путь к файлу сценария или метрик",
            "💡 Встроенные сценарии: inspect --list-scenarios",
        ],
    }

    DEFAULT_SUGGESTIONS = [
        "🔄 Запустите еще раз с флагом --verbose",
        "📋 Проверьте параметры сценария",
    ]

    @classmethod
    def describe(cls, error: BaseException) -> str:
        """Короткое название вида ошибки."""
        return _lookup(cls.ERROR_TRANSLATIONS, error) or "Произошла ошибка"

    @classmethod
    def get_user_friendly_message(
        cls, error: BaseException, context: Optional[ErrorContext] = None
    ) -> str:
        """
        Сообщение вида «<вид ошибки>: <текст> (файл: ...) [турбина N]».

        Args:
            error: Исключение
            context: Контекст ошибки

        Returns:
            str: Понятное пользователю сообщение
        """
        parts = [f"{cls.describe(error)}: {error}"]
        if context is not None and context.file_path is not None:
            parts.append(f"(файл: {context.file_path.name})")
        if context is not None and context.turbine_id is not None:
            parts.append(f"[турбина {context.turbine_id}]")
        return " ".join(parts)

    @classmethod
    def get_suggestions(cls, error: BaseException) -> List[str]:
        """Советы для ошибки; у PipelineError учитывается и исходная причина."""
        cause = getattr(error, "cause", None)
        if cause is not None:
            specific = _lookup(cls.ERROR_SUGGESTIONS, cause)
            if specific is not None:
                return specific
        return _lookup(cls.ERROR_SUGGESTIONS, error) or cls.DEFAULT_SUGGESTIONS


def exit_code_for(error: BaseException) -> int:
    """Код завершения: 1 для ошибок сценария и отсутствующих файлов, 2 для остальных."""
    if isinstance(error, (ConfigError, FileNotFoundError, IsADirectoryError)):
        return EXIT_CONFIG_ERROR
    return EXIT_PIPELINE_ERROR


def _format_counts(counts: Counter) -> str:
    return "".join(
        f"   {name}: {count} раз(а)\n" for name, count in counts.most_common()
    )


@dataclass(frozen=True)
class RecordedError:
    type_name: str
    message: str
    context: Optional[ErrorContext]
    severity: ErrorSeverity
    timestamp: datetime


class EnhancedErrorHandler:
    """Обработчик ошибок с советами пользователю, статистикой и историей."""

    def __init__(self, max_recent_errors: int = 50) -> None:
        self.error_stats: Counter = Counter()
        self.recent_errors: Deque[RecordedError] = deque(maxlen=max_recent_errors)

    def handle_error(
        self,
        error: BaseException,
        context: Optional[ErrorContext] = None,
        severity: ErrorSeverity = ErrorSeverity.MEDIUM,
        show_suggestions: bool = True,
    ) -> int:
        """
        Логирует ошибку, печатает советы и запоминает ее в истории.

        Returns:
            int: Код завершения процесса для этой ошибки
        """
        type_name = type(error).__name__
        self.error_stats[type_name] += 1
        message = UserFriendlyError.get_user_friendly_message(error, context)
        logger.log(severity.value, f"{_SEVERITY_PREFIX[severity]}: {message}")

        if show_suggestions and severity is not ErrorSeverity.LOW:
            print("\n💡 Возможные решения:")
            for suggestion in UserFriendlyError.get_suggestions(error):
                print(f"   {suggestion}")
            print()

        self.recent_errors.append(
            RecordedError(type_name, message, context, severity, datetime.now())
        )
        return exit_code_for(error)

    def handle_config_error(self, error: BaseException, file_path: Optional[Path]) -> int:
        """Ошибка загрузки или проверки сценария."""
        context = ErrorContext(operation="load_scenario", file_path=file_path)
        return self.handle_error(error, context, ErrorSeverity.HIGH)

    def handle_pipeline_error(self, error: BaseException) -> int:
        return self.handle_error(error, ErrorContext.of_pipeline(error), ErrorSeverity.HIGH)

    def get_error_summary(self) -> str:
        if not self.error_stats:
            return "✅ Ошибок не обнаружено"
        return "📊 Сводка по ошибкам:\n" + _format_counts(self.error_stats)


_error_handler = EnhancedErrorHandler()


def get_error_handler() -> EnhancedErrorHandler:
    """Общий обработчик ошибок процесса."""
    return _error_handler


@dataclass
class ProgressErrorHandler:
    """Учет неудачных шагов длинной серии (например, развертки углов)."""

    total_items: int
    operation_name: str
    successful_items: int = 0
    failures: Counter = field(default_factory=Counter)

    @property
    def failed_items(self) -> int:
        return sum(self.failures.values())

    def report_success(self) -> None:
        self.successful_items += 1

    def report_error(self, error: BaseException, context: Optional[str] = None) -> None:
        """Учитывает неудачный шаг; в лог попадают первые 5 ошибок и каждая 10-я."""
        self.failures[type(error).__name__] += 1
        completed = self.successful_items + self.failed_items
        if self.failed_items <= 5 or completed % 10 == 0:
            where = f" ({context})" if context else ""
            logger.warning(
                f"❌ [{completed}/{self.total_items}]{where} "
                f"{UserFriendlyError.get_user_friendly_message(error)}"
            )

    def get_final_report(self) -> str:
        share = self.successful_items / self.total_items * 100 if self.total_items else 0.0
        lines = [
            "",
            f"📊 ИТОГИ: {self.operation_name.upper()}",
            "=" * 50,
            f"✅ Успешно: {self.successful_items} ({share:.1f}%)",
            f"❌ Неудачных шагов: {self.failed_items} из {self.total_items}",
        ]
        report = "\n".join(lines) + "\n"
        if self.failures:
            report += "\n🔍 Типы ошибок:\n" + _format_counts(self.failures)
        return report
