"""
Экспорт результатов: таблицы миссии, журналов полета, метрик и ориентаций
(CSV или JSON lines), текстовый отчет и кадры в форматах P5/P4.
"""

import csv
import io
import json
from pathlib import Path
from typing import TYPE_CHECKING, Any, Dict, Iterable, List, Sequence

import aiofiles
import aiofiles.os
import numpy as np
from PIL import Image

from core.control import FlightLog
from core.metrics import ComparisonTable, MetricsReport
from core.trajectory import MissionPlan
from core.vision import BinaryMask, Raster
from utils.error_handling import ConfigError
from utils.logger import logger

if TYPE_CHECKING:
    from core.pipeline import PipelineResult, TurbinePerception

MISSION_COLUMNS = [
    "uav_id", "segment_index", "kind", "waypoint_index",
    "x", "y", "z", "gaze_x", "gaze_y", "gaze_z", "speed",
]
FLIGHT_COLUMNS = [
    "t", "x", "y", "z", "ref_x", "ref_y", "ref_z",
    "ux", "uy", "uz", "wx", "wy", "wz",
]
ORIENTATION_COLUMNS = ["turbine_id", "blade_index", "theta_deg", "tilt_class"]

FORMAT_SUFFIXES = {"csv": ".csv", "json-lines": ".jsonl"}
FLOAT_DIGITS = 6


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        text = f"{float(value):.{FLOAT_DIGITS}f}"
        return "0.000000" if text == "-0.000000" else text
    return str(value)


def _json_value(value: Any) -> Any:
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        rounded = round(float(value), FLOAT_DIGITS)
        return 0.0 if rounded == 0 else rounded
    return value


def render_table(columns: Sequence[str], rows: Iterable[Sequence[Any]], fmt: str = "csv") -> str:
    """
    Форматирует таблицу: CSV с заголовком либо JSON lines с теми же ключами
    в том же порядке. Числа с плавающей точкой — 6 знаков после запятой.
    """
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
        return buffer.getvalue()
    if fmt == "json-lines":
        lines = [
            json.dumps({c: _json_value(v) for c, v in zip(columns, row)}, ensure_ascii=False)
            for row in rows
        ]
        return "".join(line + "\n" for line in lines)
    raise ConfigError("format", f"unsupported output format {fmt!r}")


def mission_rows(plan: MissionPlan) -> List[List[Any]]:
    rows: List[List[Any]] = []
    for uav_id, route in enumerate(plan.routes):
        for segment_index, segment in enumerate(route):
            for waypoint_index, waypoint in enumerate(segment.waypoints):
                p = waypoint.position
                rows.append(
                    [uav_id, segment_index, segment.kind.value, waypoint_index,
                     p.x, p.y, p.z, *waypoint.gaze, waypoint.speed]
                )
    return rows


def flight_rows(log: FlightLog) -> List[List[Any]]:
    table = np.column_stack([log.times, log.positions, log.references, log.controls, log.winds])
    return table.tolist()


def orientation_rows(perceptions: Sequence["TurbinePerception"]) -> List[List[Any]]:
    return [
        [perception.turbine_id, blade_index, orientation.theta, orientation.tilt_class.value]
        for perception in perceptions
        for blade_index, orientation in enumerate(perception.orientations)
    ]


def metrics_rows(report: MetricsReport) -> List[List[Any]]:
    return [list(report.values())]


def comparison_text(table: ComparisonTable, fmt: str = "csv") -> str:
    return render_table(ComparisonTable.header(), table.records(), fmt)


def report_text(result: "PipelineResult") -> str:
    """Текстовый отчет о прогоне (без отметок времени, для побайтового сравнения)."""
    scenario = result.scenario
    report = result.report
    lines = [
        f"scenario: {scenario.label}",
        f"terrain: {scenario.terrain or '-'}",
        f"seed: {scenario.seed}",
        f"turbines: {len(scenario.turbines)}",
        f"uav_count: {report.uav_count}",
        f"operator_count: {report.operator_count}",
        "",
        f"total_time_min: {_cell(report.total_time)}",
        f"total_length_m: {_cell(report.total_length)}",
        f"blade_coverage_pct: {_cell(report.blade_coverage)}",
        f"mean_deviation_m: {_cell(report.mean_deviation)}",
        "",
        "blade orientations:",
    ]
    for perception in result.perceptions:
        for blade_index, orientation in enumerate(perception.orientations):
            lines.append(
                f"  turbine {perception.turbine_id} blade {blade_index}: "
                f"theta {_cell(orientation.theta)} deg, {orientation.tilt_class.value}"
            )
    lines += ["", "routes:"]
    for uav_id, route in enumerate(result.plan.routes):
        turbines = ", ".join(str(t) for t in result.plan.assignments[uav_id]) or "idle"
        lines.append(
            f"  uav {uav_id}: turbines [{turbines}], segments {len(route)}, "
            f"duration_s {_cell(result.plan.route_duration(uav_id))}"
        )
    if result.logs:
        lines += ["", "final states:"]
        for log in result.logs:
            state = log.final_state()
            position = ", ".join(_cell(v) for v in state.position.as_array())
            lines.append(f"  uav {log.uav_id}: final ({position}) at t {_cell(state.time)} s")
    return "\n".join(lines) + "\n"


def encode_pgm(raster: Raster) -> bytes:
    """Кадр меток в бинарном формате P5."""
    buffer = io.BytesIO()
    Image.fromarray(np.asarray(raster.data, dtype=np.uint8)).save(buffer, format="PPM")
    return buffer.getvalue()


def encode_pbm(mask: BinaryMask) -> bytes:
    """Бинарная маска в формате P4: бит 1 (черный) — пиксель лопасти."""
    # белый пиксель режима "1" пишется битом 0
    buffer = io.BytesIO()
    Image.fromarray(~np.asarray(mask.bits, dtype=bool)).save(buffer, format="PPM")
    return buffer.getvalue()


def decode_pgm(payload: bytes) -> Raster:
    with Image.open(io.BytesIO(payload)) as image:
        return Raster(np.asarray(image.convert("L"), dtype=np.uint8))


def decode_pbm(payload: bytes) -> BinaryMask:
    with Image.open(io.BytesIO(payload)) as image:
        return BinaryMask(~np.asarray(image.convert("1"), dtype=bool))


async def write_bytes(path: Path, payload: bytes) -> Path:
    async with aiofiles.open(path, "wb") as f:
        await f.write(payload)
    return path


async def write_text(path: Path, text: str) -> Path:
    async with aiofiles.open(path, "w", encoding="utf-8", newline="") as f:
        await f.write(text)
    return path


async def load_raster(path: Path) -> Raster:
    """Читает кадр P5 с диска."""
    async with aiofiles.open(path, "rb") as f:
        return decode_pgm(await f.read())


async def write_frames(out_dir: Path, perceptions: Sequence["TurbinePerception"]) -> List[Path]:
    """Сохраняет кадр меток и кадр без фона каждой турбины (P5) и маски лопастей (P4)."""
    frames_dir = out_dir / "frames"
    await aiofiles.os.makedirs(frames_dir, exist_ok=True)
    written: List[Path] = []
    for perception in perceptions:
        prefix = f"turbine{perception.turbine_id}"
        written.append(await write_bytes(frames_dir / f"{prefix}_image.pgm", encode_pgm(perception.image)))
        written.append(
            await write_bytes(frames_dir / f"{prefix}_foreground.pgm", encode_pgm(perception.foreground))
        )
        for blade_index, mask in sorted(perception.blade_masks.items()):
            written.append(
                await write_bytes(frames_dir / f"{prefix}_blade{blade_index}.pbm", encode_pbm(mask))
            )
    return written


async def write_run_outputs(
    out_dir: Path, result: "PipelineResult", fmt: str = "csv", save_frames: bool = False
) -> List[Path]:
    """
    Записывает результаты прогона в out_dir: mission, flight_uav<k>, metrics,
    orientations и report.txt.
    """
    if fmt not in FORMAT_SUFFIXES:
        raise ConfigError("format", f"unsupported output format {fmt!r}")
    suffix = FORMAT_SUFFIXES[fmt]
    await aiofiles.os.makedirs(out_dir, exist_ok=True)

    outputs: Dict[str, str] = {
        f"mission{suffix}": render_table(MISSION_COLUMNS, mission_rows(result.plan), fmt),
        f"metrics{suffix}": render_table(MetricsReport.columns(), metrics_rows(result.report), fmt),
        f"orientations{suffix}": render_table(ORIENTATION_COLUMNS, orientation_rows(result.perceptions), fmt),
    }
    for log in result.logs:
        outputs[f"flight_uav{log.uav_id}{suffix}"] = render_table(FLIGHT_COLUMNS, flight_rows(log), fmt)
    outputs["report.txt"] = report_text(result)

    written = [await write_text(out_dir / name, text) for name, text in outputs.items()]
    if save_frames:
        written += await write_frames(out_dir, result.perceptions)
    logger.info(f"💾 Результаты записаны в {out_dir} ({len(written)} файлов)")
    return written


def _parse_metrics_record(record: Dict[str, Any], source: str) -> MetricsReport:
    values: Dict[str, Any] = {}
    for column in MetricsReport.columns():
        if column not in record or record[column] in ("", None):
            raise ConfigError(column, f"missing in {source}")
        try:
            number = float(record[column])
        except (TypeError, ValueError) as e:
            raise ConfigError(column, f"not a number in {source}") from e
        values[column] = int(number) if column in ("uav_count", "operator_count") else number
    return MetricsReport(**values)


async def read_metrics_file(path: Path) -> MetricsReport:
    """Читает первую строку файла метрик (CSV или JSON lines)."""
    if not path.exists():
        raise FileNotFoundError(f"metrics file not found: {path}")
    async with aiofiles.open(path, "r", encoding="utf-8") as f:
        text = await f.read()
    if path.suffix.lower() == ".jsonl":
        first = next((line for line in text.splitlines() if line.strip()), None)
        if first is None:
            raise ConfigError(path.name, "empty metrics file")
        try:
            record = json.loads(first)
        except json.JSONDecodeError as e:
            raise ConfigError(path.name, f"parse error: {e}") from e
    else:
        records = list(csv.DictReader(io.StringIO(text)))
        if not records:
            raise ConfigError(path.name, "empty metrics file")
        record = records[0]
    return _parse_metrics_record(record, path.name)
