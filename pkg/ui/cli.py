"""
Интерактивный CLI интерфейс для turbine-inspect.
"""

from pathlib import Path
from typing import List, Optional

import questionary

from core.pipeline import run_compare_session, run_inspection_session, run_sweep_session
from utils.config_manager import OUTPUT_FORMATS, load_scenario
from utils.config_profiles import PUBLISHED_RESULTS, ConfigProfiles
from utils.error_handling import InspectionError, get_error_handler
from utils.logger import logger

_BACK = "Назад"


def _clean_path_string(path_str: str) -> str:
    """
    Очищает строку пути от лишних символов и кавычек.

    Удаляет пробелы, кавычки и служебные символы, которые могут появляться
    при копировании путей из проводника или терминала.

    Args:
        path_str: Необработанная строка пути

    Returns:
        str: Очищенная строка пути
    """
    cleaned_path = path_str.strip()
    if cleaned_path.startswith("& '") and cleaned_path.endswith("'"):
        cleaned_path = cleaned_path[3:-1]
    return cleaned_path.strip().strip("\"'")


def _validate_positive_int(text: str, max_val: int) -> bool:
    """Проверяет, что введенное значение - целое число от 1 до max_val."""
    return text.isdigit() and 1 <= int(text) <= max_val


async def _ask_output_dir(default: str) -> Optional[Path]:
    answer = await questionary.path(
        "Директория для результатов:", default=default, only_directories=True
    ).ask_async()
    if not answer:
        return None
    return Path(_clean_path_string(answer))


async def _handle_run_session(from_file: bool) -> None:
    """
    Прогон встроенного сценария или сценария из файла.

    Запрашивает сценарий, директорию результатов и формат таблиц,
    затем запускает конвейер.
    """
    if from_file:
        path_str = await questionary.path("Укажите файл сценария (.yaml/.json):").ask_async()
        if not path_str:
            logger.warning("Операция отменена.")
            return
        scenario_path: Optional[Path] = Path(_clean_path_string(path_str))
        scenario_name = scenario_path.stem
    else:
        profiles = ConfigProfiles.get_available_profiles()
        choice = await questionary.select(
            "Выберите сценарий:",
            choices=[questionary.Choice(f"{name} - {text}", value=name) for name, text in profiles.items()]
            + [questionary.Choice(_BACK, value=None)],
        ).ask_async()
        if choice is None:
            return
        scenario_path = None
        scenario_name = choice

    out_dir = await _ask_output_dir(f"results/{scenario_name}")
    if out_dir is None:
        logger.warning("Операция отменена.")
        return
    fmt = await questionary.select("Формат таблиц:", choices=list(OUTPUT_FORMATS)).ask_async()
    save_frames = await questionary.confirm(
        "Сохранить кадры сенсора и маски лопастей?", default=False
    ).ask_async()
    if fmt is None or save_frames is None:
        logger.warning("Операция отменена.")
        return

    error_handler = get_error_handler()
    try:
        if scenario_path is not None:
            scenario = load_scenario(scenario_path)
        else:
            scenario = ConfigProfiles.create_profile(scenario_name)
    except (InspectionError, OSError) as e:
        error_handler.handle_config_error(e, scenario_path)
        return

    logger.info("\nСводка параметров прогона:")
    logger.info(f"* Сценарий: {scenario.label}")
    logger.info(f"* Турбин: {len(scenario.turbines)}, БПЛА: {scenario.uav_count}")
    logger.info(f"* Зерно: {scenario.seed}")
    logger.info(f"* Результаты: {out_dir} ({fmt})")

    try:
        await run_inspection_session(scenario, out_dir, fmt, save_frames)
    except (InspectionError, OSError) as e:
        error_handler.handle_pipeline_error(e)


async def _handle_sweep_session() -> None:
    """Развертка углов наклона лопасти с выбранным числом шагов."""
    steps_str = await questionary.text(
        "Количество шагов развертки (1-3600):",
        default="180",
        validate=lambda text: _validate_positive_int(text, 3600),
    ).ask_async()
    if steps_str is None:
        logger.warning("Операция отменена.")
        return

    try:
        report = await run_sweep_session(int(steps_str))
    except InspectionError as e:
        get_error_handler().handle_pipeline_error(e)
        return
    status = "✅ пройдена" if report.passed() else "❌ не пройдена"
    print(f"Развертка {status}: макс. ошибка {report.max_error:.2f}°")


async def _handle_compare_session() -> None:
    """Сравнение файлов метрик, опционально с опубликованными результатами."""
    files: List[Path] = []
    while True:
        path_str = await questionary.path(
            "Файл метрик (пустой ввод - закончить):", default=""
        ).ask_async()
        if path_str is None:
            logger.warning("Операция отменена.")
            return
        if not path_str.strip():
            break
        files.append(Path(_clean_path_string(path_str)))

    published = await questionary.select(
        "Добавить опубликованные результаты?",
        choices=[questionary.Choice("Нет", value="")]
        + [questionary.Choice(name, value=name) for name in PUBLISHED_RESULTS],
    ).ask_async()
    if published is None:
        logger.warning("Операция отменена.")
        return

    try:
        text = await run_compare_session(files, published or None)
    except (InspectionError, OSError) as e:
        get_error_handler().handle_pipeline_error(e)
        return
    print()
    print(text)


async def run_interactive_mode() -> None:
    """
    Запускает интерактивный режим работы с меню выбора действий.

    Циклически отображает меню до выбора пользователем опции «Выход».
    """
    print("\n🛩️  turbine-inspect: автоматизированная инспекция ветроустановок")
    while True:
        command = await questionary.select(
            "Что вы хотите сделать?",
            choices=[
                "Запустить встроенный сценарий",
                "Запустить сценарий из файла",
                "Развертка углов лопасти",
                "Сравнить файлы метрик",
                "Выход",
            ],
        ).ask_async()

        if command == "Запустить встроенный сценарий":
            await _handle_run_session(from_file=False)
        elif command == "Запустить сценарий из файла":
            await _handle_run_session(from_file=True)
        elif command == "Развертка углов лопасти":
            await _handle_sweep_session()
        elif command == "Сравнить файлы метрик":
            await _handle_compare_session()
        elif command == "Выход" or command is None:
            logger.info(get_error_handler().get_error_summary())
            logger.info("Завершение работы.")
            break
