"""
turbine-inspect - автоматизированная инспекция ветроустановок группой БПЛА.

Поддерживает:
- Прогон сценария: восприятие турбин, траектории, симуляция полета, метрики
- Развертку углов наклона лопасти для проверки точности оценки
- Сравнение отчетов с метриками (в том числе с опубликованными строками)
"""

import argparse
import asyncio
import sys
from datetime import datetime
from pathlib import Path
from typing import Any, Coroutine, List, Optional

from core.pipeline import run_compare_session, run_inspection_session, run_sweep_session
from ui.cli import run_interactive_mode
from utils.config_manager import OUTPUT_FORMATS, SENSOR_RESOLUTION, Scenario, find_scenario, load_scenario
from utils.config_profiles import BUNDLED_SCENARIOS, PUBLISHED_RESULTS, ConfigProfiles
from utils.error_handling import (
    EXIT_CONFIG_ERROR,
    EXIT_OK,
    EXIT_PIPELINE_ERROR,
    ConfigError,
    InspectionError,
    get_error_handler,
)
from utils.logger import logger, set_verbosity


def resolve_scenario(value: str) -> Scenario:
    """
    Загружает сценарий по пути к файлу или по имени встроенного сценария.

    Файл в текущей директории имеет приоритет над встроенным именем.
    """
    path = Path(value)
    if path.exists() or value not in BUNDLED_SCENARIOS:
        return load_scenario(path)
    bundled_file = find_scenario(value)
    if bundled_file is not None:
        return load_scenario(bundled_file)
    return ConfigProfiles.create_profile(value)


async def _run_command(args: argparse.Namespace) -> int:
    scenario = resolve_scenario(args.scenario)
    if args.seed is not None:
        scenario = scenario.with_seed(args.seed)
    await run_inspection_session(scenario, args.out, args.format, args.save_frames)
    return EXIT_OK


async def _sweep_command(args: argparse.Namespace) -> int:
    report = await run_sweep_session(args.steps, args.resolution, args.out, args.format)
    if report.passed():
        print(f"✅ Развертка пройдена: {report.pass_rate * 100:.1f}% шагов в пределах {report.tolerance}°")
        return EXIT_OK
    print(f"❌ Развертка не пройдена: {report.pass_rate * 100:.1f}% шагов в пределах {report.tolerance}°")
    return EXIT_PIPELINE_ERROR


async def _compare_command(args: argparse.Namespace) -> int:
    text = await run_compare_session(args.files, args.published, args.format, args.out)
    if args.out is None:
        print(text, end="")
    return EXIT_OK


def create_argument_parser() -> argparse.ArgumentParser:
    """
    Создает и настраивает парсер аргументов командной строки.

    Определяет команды run, sweep-angle и compare, а также глобальные
    опции работы со встроенными сценариями.

    Returns:
        argparse.ArgumentParser: Настроенный парсер аргументов
    """
    parser = argparse.ArgumentParser(
        prog="inspect",
        description="Автоматизированная инспекция ветроустановок группой БПЛА.",
    )

    # Глобальные аргументы
    parser.add_argument(
        "--list-scenarios", action="store_true", help="Показать список встроенных сценариев"
    )
    parser.add_argument(
        "--save-scenario",
        metavar="SCENARIO",
        choices=list(BUNDLED_SCENARIOS),
        help="Сохранить встроенный сценарий как <название>.yaml и выйти",
    )
    parser.add_argument(
        "-v", "--verbose", action="store_true", help="Подробный вывод (уровень DEBUG)"
    )

    subparsers = parser.add_subparsers(dest="command", required=False)

    # --- Команда run ---
    p_run = subparsers.add_parser("run", help="Прогнать сценарий инспекции.")
    p_run.add_argument(
        "--scenario",
        required=True,
        help="Файл сценария (.yaml/.json) или имя встроенного сценария.",
    )
    p_run.add_argument("--out", type=Path, required=True, help="Директория для результатов.")
    p_run.add_argument("--seed", type=int, help="Переопределить зерно сценария.")
    p_run.add_argument(
        "--format", choices=OUTPUT_FORMATS, default="csv", help="Формат таблиц (по умолчанию: csv)."
    )
    p_run.add_argument(
        "--save-frames",
        action="store_true",
        help="Сохранить кадры сенсора (P5) и маски лопастей (P4).",
    )

    # --- Команда sweep-angle ---
    p_sweep = subparsers.add_parser(
        "sweep-angle", help="Развертка эталонных углов лопасти 0-180° и проверка оценки."
    )
    p_sweep.add_argument("--steps", type=int, default=180, help="Количество шагов (по умолчанию: 180).")
    p_sweep.add_argument(
        "--resolution",
        type=int,
        default=SENSOR_RESOLUTION,
        help=f"Разрешение кадра в пикселях (по умолчанию: {SENSOR_RESOLUTION}).",
    )
    p_sweep.add_argument("--out", type=Path, help="Директория для таблицы шагов.")
    p_sweep.add_argument("--format", choices=OUTPUT_FORMATS, default="csv")

    # --- Команда compare ---
    p_compare = subparsers.add_parser("compare", help="Сравнить файлы метрик (первый - база).")
    p_compare.add_argument("files", nargs="*", type=Path, help="Файлы metrics.csv или metrics.jsonl.")
    p_compare.add_argument(
        "--published",
        choices=list(PUBLISHED_RESULTS),
        help="Добавить опубликованные ручную (база) и автоматизированную строки сценария.",
    )
    p_compare.add_argument("--format", choices=OUTPUT_FORMATS, default="csv")
    p_compare.add_argument("--out", type=Path, help="Файл для таблицы сравнения.")

    return parser


def handle_cli_command(args: argparse.Namespace) -> Optional[Coroutine[Any, Any, int]]:
    """
    Возвращает корутину выбранной команды или None для неизвестной команды.

    Args:
        args: Объект с параметрами командной строки от argparse
    """
    if args.command == "run":
        return _run_command(args)
    elif args.command == "sweep-angle":
        return _sweep_command(args)
    elif args.command == "compare":
        return _compare_command(args)
    return None


def execute(coro: Coroutine[Any, Any, int], source: Optional[Path] = None) -> int:
    """Выполняет корутину команды и переводит исключения в код завершения."""
    error_handler = get_error_handler()
    start_time = datetime.now()
    try:
        code = asyncio.run(coro)
    except (ConfigError, FileNotFoundError, IsADirectoryError) as e:
        return error_handler.handle_config_error(e, source)
    except InspectionError as e:
        return error_handler.handle_pipeline_error(e)
    except OSError as e:
        return error_handler.handle_pipeline_error(e)
    logger.info(f"Время выполнения программы: {datetime.now() - start_time}.")
    return code


def main(argv: Optional[List[str]] = None) -> int:
    """
    Главная функция приложения, определяющая режим работы.

    Без аргументов запускается интерактивный режим, иначе выполняется
    команда командной строки.

    Returns:
        int: 0 - успех, 1 - ошибка сценария, 2 - ошибка конвейера
    """
    argv = sys.argv[1:] if argv is None else argv
    parser = create_argument_parser()

    if not argv:
        logger.info("Запуск в интерактивном режиме...")
        start_time = datetime.now()
        asyncio.run(run_interactive_mode())
        logger.info(f"Время выполнения программы: {datetime.now() - start_time}.")
        return EXIT_OK

    args = parser.parse_args(argv)
    set_verbosity(args.verbose)

    if args.list_scenarios:
        ConfigProfiles.list_profiles()
        return EXIT_OK

    if args.save_scenario:
        output_file = Path(f"{args.save_scenario}.yaml")
        if ConfigProfiles.save_profile_as_scenario(args.save_scenario, output_file):
            print(f"✅ Сценарий '{args.save_scenario}' сохранен в {output_file}")
            print(f"💡 Запуск: inspect run --scenario {output_file} --out results")
            return EXIT_OK
        print(f"❌ Ошибка при сохранении сценария '{args.save_scenario}'")
        return EXIT_CONFIG_ERROR

    command = handle_cli_command(args)
    if command is None:
        logger.error("Не указана команда. Используйте --help для справки.")
        return EXIT_CONFIG_ERROR

    source = Path(args.scenario) if args.command == "run" else None
    return execute(command, source)


if __name__ == "__main__":
    sys.exit(main())
