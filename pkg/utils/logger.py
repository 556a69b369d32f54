"""
Логирование turbine-inspect: консоль и файл inspect.log в каталоге приложения.
"""

import logging
import os
import sys
from pathlib import Path
from typing import Iterator

LOG_LEVEL_ENV = "INSPECT_LOG_LEVEL"
LOG_FILE_NAME = "inspect.log"

_FORMATTER = logging.Formatter(
    "%(asctime)s - %(levelname)s - %(message)s",
    datefmt="%Y-%m-%d %H:%M:%S",
)


def get_base_dir() -> Path:
    """Каталог приложения; для собранного PyInstaller бинарника это каталог исполняемого файла."""
    if getattr(sys, "frozen", False) and hasattr(sys, "_MEIPASS"):
        return Path(sys.executable).parent
    return Path(__file__).parent.parent


BASE_DIR = get_base_dir()


def resolve_log_level(default: int = logging.INFO) -> int:
    """
    Уровень из INSPECT_LOG_LEVEL (DEBUG, INFO, WARNING, ...).

    Пустое или неизвестное значение дает ``default``.
    """
    name = os.environ.get(LOG_LEVEL_ENV, "").strip().upper()
    level = logging.getLevelName(name) if name else default
    return level if isinstance(level, int) else default


def _handlers() -> Iterator[logging.Handler]:
    yield logging.StreamHandler(sys.stdout)
    try:
        yield logging.FileHandler(BASE_DIR / LOG_FILE_NAME, encoding="utf-8")
    except OSError:
        # каталог только для чтения: пишем лишь в консоль
        pass


def setup_logger(name: str = __name__) -> logging.Logger:
    """
    Возвращает логгер ``name``; обработчики добавляются только при первом вызове.

    Args:
        name: Имя логгера

    Returns:
        logging.Logger: Логгер с выводом в stdout и в inspect.log
    """
    configured = logging.getLogger(name)
    if configured.handlers:
        return configured

    configured.setLevel(resolve_log_level())
    for handler in _handlers():
        handler.setFormatter(_FORMATTER)
        configured.addHandler(handler)
    return configured


def set_verbosity(verbose: bool) -> None:
    """Флаг --verbose: DEBUG, иначе уровень из окружения."""
    logger.setLevel(logging.DEBUG if verbose else resolve_log_level())


logger = setup_logger("turbine_inspect")
