import json
import logging
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from src.exceptions import ConfigError
from src.settings import DEFAULT_SEED, OUTPUT_DIR, P_MAX, THREADS_ENV, TOLERANCES

logger = logging.getLogger(__name__)

SUITES = ("symbolic", "numeric", "all")
MODELS = ("cp1", "torus")
FORMATS = ("csv", "json")

# ключи файла конфигурации и соответствующие поля RunConfig
KEYS = {
    "suite": "suite",
    "checks": "checks",
    "model": "model",
    "pRange": "p_range",
    "quadratureOrder": "quadrature_order",
    "outputDir": "output_dir",
    "seed": "seed",
    "tolerances": "tolerances",
    "format": "format",
}


@dataclass
class RunConfig:
    """
    Параметры запуска
    Атрибуты:
        suite(str): symbolic, numeric или all;
        checks(list): Фильтр имён проверок, пустой - все;
        model(str): cp1, torus или None - обе модели;
        p_range(tuple): Диапазон уровней (pmin, pmax) или None - диапазоны проверок по умолчанию;
        quadrature_order(int): Порядок квадратуры или None;
        output_dir(str): Каталог отчётов;
        seed(int): Зерно случайных проверок;
        tolerances(dict): Допуски;
        format(str): csv или json.
    """

    suite: str = "all"
    checks: List[str] = field(default_factory=list)
    model: Optional[str] = None
    p_range: Optional[Tuple[int, int]] = None
    quadrature_order: Optional[int] = None
    output_dir: str = str(OUTPUT_DIR)
    seed: int = DEFAULT_SEED
    tolerances: Dict[str, float] = field(default_factory=lambda: dict(TOLERANCES))
    format: str = "csv"

    def echo(self) -> Dict[str, Any]:
        """Запись конфигурации в ключах файла"""
        values = asdict(self)
        result = {key: values[name] for key, name in KEYS.items()}
        result["pRange"] = list(self.p_range) if self.p_range else None
        return result

    def models(self) -> List[str]:
        return [self.model] if self.model else list(MODELS)


def parse_p_range(text: str) -> Tuple[int, int]:
    """
    Разбор записи MIN:MAX или одного числа
    :raise ConfigError: Некорректная запись
    """
    parts = text.split(":")
    try:
        values = [int(part) for part in parts]
    except ValueError:
        raise ConfigError(f"pRange: ожидается MIN:MAX, получено {text}")
    if len(values) == 1:
        return values[0], values[0]
    if len(values) != 2:
        raise ConfigError(f"pRange: ожидается MIN:MAX, получено {text}")
    return values[0], values[1]


def load_config(path: Optional[str]) -> Dict[str, Any]:
    """
    Чтение плоского JSON файла конфигурации
    :param path: Путь к файлу или None
    :return: Словарь значений в ключах файла
    :raise ConfigError: Файла нет, JSON некорректен или встретился неизвестный ключ
    """
    if path is None:
        return {}
    file = Path(path)
    if not file.exists():
        raise ConfigError(f"Файл конфигурации {path} не найден")
    try:
        with open(file, encoding="utf-8") as handle:
            values = json.load(handle)
    except json.JSONDecodeError as exc_info:
        raise ConfigError(f"Некорректный JSON в {path}: {exc_info}")
    if not isinstance(values, dict):
        raise ConfigError(f"Конфигурация {path} должна быть объектом JSON")
    unknown = sorted(set(values) - set(KEYS))
    if unknown:
        raise ConfigError(f"Неизвестный ключ {unknown[0]}")
    return values


def build_config(file_values: Dict[str, Any], overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """
    Сборка RunConfig: значения флагов перекрывают значения файла
    :param file_values: Значения из файла в ключах файла
    :param overrides: Значения флагов в ключах файла, None пропускаются
    :return: Проверенная конфигурация
    :raise ConfigError: Некорректное значение с указанием ключа
    """
    values = dict(file_values)
    values.update({key: value for key, value in (overrides or {}).items() if value is not None})
    config = RunConfig()
    if "suite" in values:
        config.suite = str(values["suite"])
    if "checks" in values:
        checks = values["checks"]
        if isinstance(checks, str):
            checks = [name.strip() for name in checks.split(",") if name.strip()]
        if not isinstance(checks, list):
            raise ConfigError("checks: ожидается список имён")
        config.checks = [str(name) for name in checks]
    if "model" in values:
        config.model = str(values["model"])
    if "pRange" in values:
        p_range = values["pRange"]
        if isinstance(p_range, str):
            p_range = parse_p_range(p_range)
        if not isinstance(p_range, (list, tuple)) or len(p_range) != 2:
            raise ConfigError("pRange: ожидается пара [pmin, pmax]")
        config.p_range = (_integer("pRange", p_range[0]), _integer("pRange", p_range[1]))
    if "quadratureOrder" in values:
        config.quadrature_order = _integer("quadratureOrder", values["quadratureOrder"])
    if "outputDir" in values:
        config.output_dir = str(values["outputDir"])
    if "seed" in values:
        config.seed = _integer("seed", values["seed"])
    if "tolerances" in values:
        tolerances = values["tolerances"]
        if not isinstance(tolerances, dict) or set(tolerances) - set(TOLERANCES):
            raise ConfigError(f"tolerances: допустимые ключи {', '.join(TOLERANCES)}")
        config.tolerances.update({key: float(value) for key, value in tolerances.items()})
    if "format" in values:
        config.format = str(values["format"])
    validate(config)
    return config


def _integer(key: str, value: Any) -> int:
    if isinstance(value, bool):
        raise ConfigError(f"{key}: ожидается целое число, получено {value}")
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: ожидается целое число, получено {value}")


def validate(config: RunConfig) -> None:
    """
    Проверка значений конфигурации
    :raise ConfigError: Ключ с некорректным значением
    """
    if config.suite not in SUITES:
        raise ConfigError(f"suite: допустимые значения {', '.join(SUITES)}")
    if config.model is not None and config.model not in MODELS:
        raise ConfigError(f"model: допустимые значения {', '.join(MODELS)}")
    if config.format not in FORMATS:
        raise ConfigError(f"format: допустимые значения {', '.join(FORMATS)}")
    if config.p_range is not None:
        pmin, pmax = config.p_range
        if pmin < 1:
            raise ConfigError(f"pRange: pmin = {pmin} меньше 1")
        if pmax > P_MAX:
            raise ConfigError(f"pRange: pmax = {pmax} больше {P_MAX}")
        if pmin > pmax:
            raise ConfigError(f"pRange: pmin = {pmin} больше pmax = {pmax}")
    if config.quadrature_order is not None and config.quadrature_order < 1:
        raise ConfigError(f"quadratureOrder: {config.quadrature_order} меньше 1")


def thread_cap() -> int:
    """Ограничение числа потоков из SEMICLASS_THREADS, по умолчанию число ядер"""
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return os.cpu_count() or 1
    try:
        value = int(raw)
    except ValueError:
        logger.warning("%s = %s не число, используется 1 поток", THREADS_ENV, raw)
        return 1
    if value < 1:
        logger.warning("%s = %s меньше 1, используется 1 поток", THREADS_ENV, raw)
        return 1
    return value
