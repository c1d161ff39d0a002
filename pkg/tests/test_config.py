import json
import os
from pathlib import Path
from unittest.mock import MagicMock, patch

import pytest

from src.config import RunConfig, build_config, load_config, parse_p_range, thread_cap
from src.exceptions import ConfigError
from src.settings import TOLERANCES


@pytest.mark.parametrize("text, expected", [("3:7", (3, 7)), ("5", (5, 5))])
def test_parse_p_range(text: str, expected: tuple) -> None:
    """Тестирование разбора диапазона уровней"""
    assert parse_p_range(text) == expected


def test_parse_p_range_invalid() -> None:
    """Тестирование ошибки: некорректная запись диапазона"""
    with pytest.raises(ConfigError) as exc_info:
        parse_p_range("a:b")
    assert str(exc_info.value) == "pRange: ожидается MIN:MAX, получено a:b"


def test_load_config_none() -> None:
    """Тестирование: без файла конфигурации значения пусты"""
    assert load_config(None) == {}


def test_load_config(tmp_path: Path) -> None:
    """Тестирование чтения файла конфигурации"""
    path = tmp_path / "lab.json"
    path.write_text(json.dumps({"suite": "numeric", "pRange": [2, 9]}), encoding="utf-8")
    assert load_config(str(path)) == {"suite": "numeric", "pRange": [2, 9]}


def test_load_config_missing(tmp_path: Path) -> None:
    """Тестирование ошибки: файл конфигурации не найден"""
    path = str(tmp_path / "missing.json")
    with pytest.raises(ConfigError) as exc_info:
        load_config(path)
    assert str(exc_info.value) == f"Файл конфигурации {path} не найден"


def test_load_config_unknown_key(tmp_path: Path) -> None:
    """Тестирование ошибки: неизвестный ключ"""
    path = tmp_path / "lab.json"
    path.write_text(json.dumps({"suite": "all", "foo": 1}), encoding="utf-8")
    with pytest.raises(ConfigError) as exc_info:
        load_config(str(path))
    assert str(exc_info.value) == "Неизвестный ключ foo"


def test_build_config_defaults() -> None:
    """Тестирование конфигурации по умолчанию"""
    config = build_config({})
    assert config == RunConfig()
    assert config.tolerances == TOLERANCES
    assert config.models() == ["cp1", "torus"]


def test_build_config_overrides() -> None:
    """Тестирование: флаги перекрывают файл, None пропускается"""
    config = build_config(
        {"suite": "symbolic", "pRange": [2, 9], "model": "torus"},
        {"suite": "numeric", "pRange": "3:5", "model": None, "checks": "gram, density"},
    )
    assert config.suite == "numeric"
    assert config.p_range == (3, 5)
    assert config.model == "torus"
    assert config.checks == ["gram", "density"]
    assert config.models() == ["torus"]


def test_echo() -> None:
    """Тестирование записи конфигурации в ключах файла"""
    echo = build_config({"pRange": [1, 4], "tolerances": {"fit": 0.5}}).echo()
    assert echo["pRange"] == [1, 4]
    assert echo["tolerances"]["fit"] == 0.5
    assert set(echo) == {
        "suite",
        "checks",
        "model",
        "pRange",
        "quadratureOrder",
        "outputDir",
        "seed",
        "tolerances",
        "format",
    }


@pytest.mark.parametrize(
    "values, message",
    [
        ({"pRange": [0, 5]}, "pRange: pmin = 0 меньше 1"),
        ({"pRange": [1, 61]}, "pRange: pmax = 61 больше 60"),
        ({"suite": "fast"}, "suite: допустимые значения symbolic, numeric, all"),
        ({"tolerances": {"abs": 1}}, "tolerances: допустимые ключи symbolic, density, fit, relative, slope"),
        ({"model": "sphere"}, "model: допустимые значения cp1, torus"),
        ({"format": "xml"}, "format: допустимые значения csv, json"),
    ],
)
def test_build_config_invalid(values: dict, message: str) -> None:
    """Тестирование ошибок проверки значений конфигурации"""
    with pytest.raises(ConfigError) as exc_info:
        build_config(values)
    assert str(exc_info.value) == message


@patch.dict(os.environ, {}, clear=True)
@patch("src.config.os.cpu_count", return_value=3)
def test_thread_cap_default(mock_cpu_count: MagicMock) -> None:
    """Тестирование ограничения потоков по умолчанию"""
    assert thread_cap() == 3
    mock_cpu_count.assert_called_once()


@pytest.mark.parametrize("raw, expected", [("4", 4), ("0", 1), ("many", 1)])
def test_thread_cap_env(raw: str, expected: int) -> None:
    """Тестирование ограничения потоков из переменной окружения"""
    with patch.dict(os.environ, {"SEMICLASS_THREADS": raw}, clear=True):
        assert thread_cap() == expected
