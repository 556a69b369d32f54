"""
Проверка значений сценария: типы, конечность и диапазоны.

Каждая функция возвращает нормализованное значение либо выбрасывает
ConfigError с полным именем ключа (например, turbines[1].blade_length).
"""

import math
from pathlib import Path
from typing import Any, Iterable, Mapping, Optional, Tuple, Union

from utils.error_handling import ConfigError


def require_mapping(value: Any, key: str) -> Mapping[str, Any]:
    """Проверяет, что значение является словарем (секцией сценария)."""
    if not isinstance(value, Mapping):
        raise ConfigError(key, f"expected a mapping, got {type(value).__name__}")
    return value


def require_number(
    value: Any,
    key: str,
    *,
    minimum: Optional[float] = None,
    maximum: Optional[float] = None,
    exclusive_minimum: bool = False,
    exclusive_maximum: bool = False,
) -> float:
    """
    Проверяет конечное число в заданных границах.

    Args:
        value: Проверяемое значение
        key: Полное имя ключа для сообщения об ошибке
        minimum: Нижняя граница (опционально)
        maximum: Верхняя граница (опционально)
        exclusive_minimum: Строгая нижняя граница
        exclusive_maximum: Строгая верхняя граница

    Returns:
        float: Значение, приведенное к float
    """
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(key, f"expected a number, got {value!r}")
    number = float(value)
    if not math.isfinite(number):
        raise ConfigError(key, "must be finite")
    if minimum is not None:
        if exclusive_minimum and not number > minimum:
            raise ConfigError(key, f"must be > {minimum}")
        if not exclusive_minimum and not number >= minimum:
            raise ConfigError(key, f"must be >= {minimum}")
    if maximum is not None:
        if exclusive_maximum and not number < maximum:
            raise ConfigError(key, f"must be < {maximum}")
        if not exclusive_maximum and not number <= maximum:
            raise ConfigError(key, f"must be <= {maximum}")
    return number


def require_int(value: Any, key: str, *, minimum: Optional[int] = None) -> int:
    """Проверяет целое число (bool не принимается)."""
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(key, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(key, f"must be >= {minimum}")
    return value


def require_vector(value: Any, key: str, length: int = 3) -> Tuple[float, ...]:
    """Проверяет список конечных чисел заданной длины."""
    if isinstance(value, (str, bytes)) or not isinstance(value, Iterable):
        raise ConfigError(key, f"expected a list of {length} numbers")
    items = list(value)
    if len(items) != length:
        raise ConfigError(key, f"expected {length} components, got {len(items)}")
    return tuple(require_number(item, f"{key}[{i}]") for i, item in enumerate(items))


def require_gain(value: Any, key: str) -> Union[float, Tuple[float, ...]]:
    """Коэффициент регулятора: неотрицательный скаляр или тройка по осям."""
    if isinstance(value, (list, tuple)):
        vector = require_vector(value, key)
        for i, component in enumerate(vector):
            require_number(component, f"{key}[{i}]", minimum=0.0)
        return vector
    return require_number(value, key, minimum=0.0)


def require_choice(value: Any, key: str, choices: Iterable[Any]) -> Any:
    """Проверяет, что значение входит в допустимый набор."""
    allowed = list(choices)
    if value not in allowed:
        raise ConfigError(key, f"must be one of {allowed}, got {value!r}")
    return value


def require_text(value: Any, key: str) -> str:
    if not isinstance(value, str):
        raise ConfigError(key, f"expected text, got {value!r}")
    return value


def validate_scenario_path(path: Union[str, Path]) -> Path:
    """
    Проверяет путь к файлу сценария.

    Raises:
        FileNotFoundError: Если файл не существует
        IsADirectoryError: Если путь указывает на директорию
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"scenario file not found: {path}")
    if path.is_dir():
        raise IsADirectoryError(f"scenario path is a directory: {path}")
    return path
