import hashlib
import json
import logging
import os
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import pandas as pd

from src.checks import Check, CheckContext, CheckOutcome, select_checks
from src.coefficients import CoefficientEngine
from src.config import RunConfig, thread_cap
from src.exceptions import ConfigError

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"
REPORT_COLUMNS = ("checkId", "paperAnchor", "status", "wallTimeMs")
ROW_COLUMNS = ("model", "p", "observable", "quantity", "value")


@dataclass
class VerificationRecord:
    """
    Запись манифеста об одной проверке
    Атрибуты:
        check_id(str): Имя проверки;
        anchor(str): Проверяемое тождество;
        status(str): pass, fail или skipped;
        residue(str): Остаток или текст исключения;
        wall_time_ms(float): Время выполнения.
    """

    check_id: str
    anchor: str
    status: str
    residue: str
    wall_time_ms: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "checkId": self.check_id,
            "paperAnchor": self.anchor,
            "status": self.status,
            "residue": self.residue,
            "wallTimeMs": self.wall_time_ms,
        }


def run_check(check: Check, context: CheckContext) -> Tuple[VerificationRecord, CheckOutcome]:
    """
    Выполнение одной проверки, исключение превращается в запись fail
    :return: Запись манифеста и результат проверки
    """
    logger.info("Проверка %s: старт", check.name)
    start = time.perf_counter()
    try:
        outcome = check.run(context)
    except Exception as exc_info:
        logger.warning("Проверка %s: %s", check.name, exc_info)
        outcome = CheckOutcome(False, f"{type(exc_info).__name__}: {exc_info}")
    wall_time = round((time.perf_counter() - start) * 1000, 3)
    if outcome.skipped:
        status = "skipped"
    else:
        status = "pass" if outcome.passed else "fail"
    logger.info("Проверка %s: %s за %.0f мс", check.name, status, wall_time)
    for name, record in outcome.fits.items():
        logger.info("Подгонка %s/%s: %s", check.name, name, record["coefficients"])
    return VerificationRecord(check.name, check.anchor, status, outcome.residue, wall_time), outcome


def write_atomic(path: Path, text: str) -> None:
    """Запись через временный файл в том же каталоге и переименование"""
    handle, temp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(handle, "w", encoding="utf-8") as file:
            file.write(text)
        os.replace(temp, path)
    except BaseException:
        if os.path.exists(temp):
            os.remove(temp)
        raise


def determinism_hash(manifest: Dict[str, Any]) -> str:
    """SHA-256 манифеста без полей wallTimeMs"""
    stable = dict(manifest)
    stable.pop("determinismHash", None)
    stable["records"] = [
        {key: value for key, value in record.items() if key != "wallTimeMs"} for record in manifest["records"]
    ]
    return hashlib.sha256(json.dumps(stable, sort_keys=True, ensure_ascii=False).encode("utf-8")).hexdigest()


def run(config: RunConfig, engine: Optional[CoefficientEngine] = None) -> Dict[str, Any]:
    """
    Выполнение выбранных проверок и запись manifest.json и CSV экспериментов в config.output_dir
    :param config: Конфигурация запуска
    :param engine: Конвейер коэффициентов, по умолчанию новый
    :return: Манифест
    :raise ConfigError: Неизвестное имя проверки
    """
    try:
        checks = select_checks(config)
    except KeyError as exc_info:
        raise ConfigError(exc_info.args[0])
    context = CheckContext(config, engine)
    workers = max(1, min(thread_cap(), len(checks)))
    logger.info("Запуск %d проверок в %d потоках", len(checks), workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results: List[Tuple[VerificationRecord, CheckOutcome]] = list(
            pool.map(lambda check: run_check(check, context), checks)
        )

    output = Path(config.output_dir)
    output.mkdir(parents=True, exist_ok=True)
    fits: Dict[str, Dict[str, Any]] = {}
    for record, outcome in results:
        if outcome.fits:
            fits[record.check_id] = outcome.fits
        if outcome.rows:
            frame = pd.DataFrame(outcome.rows, columns=list(ROW_COLUMNS))
            write_atomic(output / f"{record.check_id}.csv", frame.to_csv(index=False))
    manifest: Dict[str, Any] = {
        "records": [record.to_dict() for record, _ in results],
        "fits": fits,
        "config": config.echo(),
    }
    manifest["determinismHash"] = determinism_hash(manifest)
    write_atomic(output / MANIFEST_NAME, json.dumps(manifest, ensure_ascii=False, indent=2, sort_keys=True))
    logger.info("Манифест записан в %s", output / MANIFEST_NAME)
    return manifest


def exit_code(manifest: Dict[str, Any]) -> int:
    """0 если нет проверок со статусом fail, иначе 1"""
    return 1 if any(record["status"] == "fail" for record in manifest["records"]) else 0


def load_manifest(path: str) -> Dict[str, Any]:
    """
    Чтение манифеста
    :raise ConfigError: Файла нет или это не манифест
    """
    file = Path(path)
    if not file.exists():
        raise ConfigError(f"Манифест {path} не найден")
    try:
        with open(file, encoding="utf-8") as handle:
            manifest = json.load(handle)
    except json.JSONDecodeError as exc_info:
        raise ConfigError(f"Некорректный JSON в {path}: {exc_info}")
    if not isinstance(manifest, dict) or "records" not in manifest:
        raise ConfigError(f"{path} не является манифестом: нет поля records")
    return manifest


def report(manifest_path: str, format: str = "csv") -> str:
    """
    Таблица записей манифеста, упорядоченная по checkId
    :param manifest_path: Путь к manifest.json или к JSON отчёту
    :param format: csv или json
    :return: Текст отчёта
    :raise ConfigError: Файла нет или формат неизвестен
    """
    if format not in ("csv", "json"):
        raise ConfigError("format: допустимые значения csv, json")
    manifest = load_manifest(manifest_path)
    records = sorted(manifest["records"], key=lambda record: record["checkId"])
    if format == "json":
        content = {key: value for key, value in manifest.items() if key != "records"}
        content["records"] = records
        return json.dumps(content, ensure_ascii=False, indent=2, sort_keys=True)
    frame = pd.DataFrame(records, columns=list(REPORT_COLUMNS))
    return frame.to_csv(index=False)
