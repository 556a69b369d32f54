"""
Встроенные сценарии инспекции и опубликованные эталонные результаты.

Четыре сценария повторяют строки сравнительной таблицы ручной и
автоматизированной инспекции: три турбины при слабом ветре, одна турбина
при сильном ветре, две турбины разной высоты и пять турбин в штиль.
"""

from pathlib import Path
from typing import Any, Dict, List, Optional

from utils.config_manager import Scenario, parse_scenario, save_scenario
from utils.logger import logger


def _turbine(x: float, y: float, height: float, blade: float, yaw: float, phase: float) -> Dict[str, Any]:
    return {
        "base": [x, y, 0.0],
        "tower_height": height,
        "blade_length": blade,
        "blade_count": 3,
        "nacelle_yaw": yaw,
        "rotor_phase": phase,
    }


# Данные сценариев в формате файла сценария
BUNDLED_SCENARIOS: Dict[str, Dict[str, Any]] = {
    "three_turbines_weak_wind": {
        "label": "three_turbines_weak_wind",
        "terrain": "open terrain",
        "uav_count": 3,
        "seed": 42,
        "turbines": [
            _turbine(0.0, 0.0, 80.0, 40.0, 0.0, 90.0),
            _turbine(0.0, 300.0, 80.0, 40.0, 0.0, 60.0),
            _turbine(0.0, 600.0, 80.0, 40.0, 0.0, 0.0),
        ],
        "wind": {"mean": [3.0, 2.0, 0.0], "gust_amplitude": 1.0, "gust_correlation_time": 5.0},
    },
    "one_turbine_strong_wind": {
        "label": "one_turbine_strong_wind",
        "terrain": "complex terrain",
        "uav_count": 1,
        "seed": 42,
        "turbines": [_turbine(0.0, 0.0, 90.0, 45.0, 30.0, 45.0)],
        "wind": {"mean": [8.0, 6.0, 0.0], "gust_amplitude": 2.0, "gust_correlation_time": 3.0},
    },
    "two_turbines_mixed_heights": {
        "label": "two_turbines_mixed_heights",
        "terrain": "open terrain",
        "uav_count": 2,
        "seed": 42,
        "turbines": [
            _turbine(0.0, 0.0, 80.0, 40.0, 0.0, 90.0),
            _turbine(250.0, 150.0, 110.0, 55.0, 20.0, 10.0),
        ],
        "wind": {"mean": [5.0, 3.0, 0.0], "gust_amplitude": 1.5, "gust_correlation_time": 4.0},
    },
    "five_turbines_calm": {
        "label": "five_turbines_calm",
        "terrain": "open terrain",
        "uav_count": 5,
        "seed": 42,
        "turbines": [
            _turbine(0.0, 300.0 * i, 80.0, 40.0, 0.0, phase)
            for i, phase in enumerate((90.0, 60.0, 0.0, 30.0, 75.0))
        ],
        "wind": {"mean": [0.0, 0.0, 0.0], "gust_amplitude": 0.0},
    },
}

SCENARIO_DESCRIPTIONS: Dict[str, str] = {
    "three_turbines_weak_wind": "Три турбины, открытая местность, слабый ветер (до 5 м/с), 3 БПЛА",
    "one_turbine_strong_wind": "Одна турбина, сложный рельеф, сильный ветер (8-12 м/с)",
    "two_turbines_mixed_heights": "Две турбины разной высоты, умеренный ветер (5-8 м/с)",
    "five_turbines_calm": "Пять турбин, без ветра",
}

# Опубликованные результаты: время (мин), длина (м), покрытие (%), отклонение (м),
# число БПЛА, число операторов
PUBLISHED_RESULTS: Dict[str, Dict[str, Dict[str, float]]] = {
    "three_turbines_weak_wind": {
        "manual": {"total_time": 90, "total_length": 1400, "blade_coverage": 88, "mean_deviation": 3.0, "uav_count": 3, "operator_count": 3},
        "automated": {"total_time": 8, "total_length": 1100, "blade_coverage": 95, "mean_deviation": 1.0, "uav_count": 3, "operator_count": 0},
    },
    "one_turbine_strong_wind": {
        "manual": {"total_time": 35, "total_length": 600, "blade_coverage": 82, "mean_deviation": 5.0, "uav_count": 1, "operator_count": 1},
        "automated": {"total_time": 7, "total_length": 480, "blade_coverage": 92, "mean_deviation": 1.5, "uav_count": 1, "operator_count": 0},
    },
    "two_turbines_mixed_heights": {
        "manual": {"total_time": 50, "total_length": 1000, "blade_coverage": 86, "mean_deviation": 3.5, "uav_count": 2, "operator_count": 2},
        "automated": {"total_time": 9, "total_length": 800, "blade_coverage": 94, "mean_deviation": 1.2, "uav_count": 2, "operator_count": 0},
    },
    "five_turbines_calm": {
        "manual": {"total_time": 150, "total_length": 2300, "blade_coverage": 89, "mean_deviation": 2.5, "uav_count": 5, "operator_count": 5},
        "automated": {"total_time": 12, "total_length": 1900, "blade_coverage": 96, "mean_deviation": 0.6, "uav_count": 5, "operator_count": 0},
    },
}


class ConfigProfiles:
    """Управление встроенными сценариями."""

    @staticmethod
    def get_available_profiles() -> Dict[str, str]:
        """
        Возвращает словарь встроенных сценариев с их описаниями.

        Returns:
            Dict[str, str]: Словарь {название: описание}
        """
        return dict(SCENARIO_DESCRIPTIONS)

    @staticmethod
    def profile_names() -> List[str]:
        return list(BUNDLED_SCENARIOS)

    @staticmethod
    def create_profile(profile_name: str) -> Scenario:
        """
        Создает сценарий по имени встроенного профиля.

        Args:
            profile_name: Название сценария

        Returns:
            Scenario: Проверенный сценарий

        Raises:
            ValueError: Если сценарий не найден
        """
        if profile_name not in BUNDLED_SCENARIOS:
            available = ", ".join(BUNDLED_SCENARIOS)
            raise ValueError(f"Неизвестный сценарий '{profile_name}'. Доступны: {available}")
        return parse_scenario(BUNDLED_SCENARIOS[profile_name], default_label=profile_name)

    @staticmethod
    def published_results(profile_name: str) -> Optional[Dict[str, Dict[str, float]]]:
        """Опубликованные ручная и автоматизированная строки для сценария (если есть)."""
        return PUBLISHED_RESULTS.get(profile_name)

    @staticmethod
    def save_profile_as_scenario(profile_name: str, output_path: Path) -> bool:
        """
        Сохраняет встроенный сценарий в файл.

        Args:
            profile_name: Название сценария
            output_path: Путь для сохранения (.yaml или .json)

        Returns:
            bool: True если успешно сохранен
        """
        try:
            scenario = ConfigProfiles.create_profile(profile_name)
            save_scenario(scenario, output_path)
            logger.info(f"Сценарий '{profile_name}' сохранен как {output_path}")
            return True
        except (ValueError, OSError) as e:
            logger.error(f"Ошибка при сохранении сценария '{profile_name}': {e}")
            return False

    @staticmethod
    def list_profiles() -> None:
        """Выводит список встроенных сценариев с описаниями."""
        profiles = ConfigProfiles.get_available_profiles()

        print("\n📋 ВСТРОЕННЫЕ СЦЕНАРИИ:")
        print("=" * 60)

        for name, description in profiles.items():
            print(f"🔹 {name:28} - {description}")

        print("\n💡 Использование:")
        print("   inspect run --scenario <название или файл> --out <директория>")
        print("   Или сохраните файл сценария: --save-scenario <название>")
        print()
