import json
from dataclasses import replace
from pathlib import Path
from unittest.mock import MagicMock, patch

import pandas as pd
import pytest

from src.checks import Check, CheckContext, CheckOutcome
from src.config import RunConfig
from src.exceptions import ConfigError
from src.harness import determinism_hash, exit_code, load_manifest, report, run, run_check, write_atomic


def fake_check(name: str, outcome: CheckOutcome) -> Check:
    return Check(name, f"тождество {name}", "symbolic", MagicMock(return_value=outcome))


@pytest.fixture
def checks() -> list:
    rows = [
        {"model": "cp1", "p": p, "observable": "one", "quantity": "density", "value": p + 1.0} for p in (1, 2)
    ]
    return [
        fake_check("alpha", CheckOutcome(True, "0", rows, {"cp1.density": {"coefficients": [1.0]}})),
        fake_check("beta", CheckOutcome(False, "1 sc")),
        fake_check("gamma", CheckOutcome(True, "модель cp1 не выбрана", skipped=True)),
    ]


def test_run_check_statuses(context: CheckContext, checks: list) -> None:
    """Тестирование статусов pass, fail и skipped"""
    statuses = [run_check(check, context)[0].status for check in checks]
    assert statuses == ["pass", "fail", "skipped"]
    checks[0].run.assert_called_once_with(context)


def test_run_check_exception(context: CheckContext) -> None:
    """Тестирование: исключение проверки превращается в запись fail"""
    check = Check("broken", "тождество", "numeric", MagicMock(side_effect=ValueError("boom")))
    record, outcome = run_check(check, context)
    assert record.status == "fail"
    assert record.residue == "ValueError: boom"
    assert not outcome.passed


def test_write_atomic(tmp_path: Path) -> None:
    """Тестирование атомарной записи без временных файлов"""
    path = tmp_path / "manifest.json"
    write_atomic(path, "первый")
    write_atomic(path, "второй")
    assert path.read_text(encoding="utf-8") == "второй"
    assert [item.name for item in tmp_path.iterdir()] == ["manifest.json"]


def test_determinism_hash_ignores_time() -> None:
    """Тестирование: хеш манифеста не зависит от времени выполнения"""
    record = {"checkId": "a", "paperAnchor": "x", "status": "pass", "residue": "0", "wallTimeMs": 1.0}
    first = {"records": [record], "fits": {}, "config": {}}
    second = {"records": [dict(record, wallTimeMs=250.0)], "fits": {}, "config": {}}
    assert determinism_hash(first) == determinism_hash(second)
    third = {"records": [dict(record, status="fail")], "fits": {}, "config": {}}
    assert determinism_hash(first) != determinism_hash(third)


@patch("src.harness.thread_cap", return_value=2)
@patch("src.harness.select_checks")
def test_run(mock_select: MagicMock, mock_threads: MagicMock, run_config: RunConfig, checks: list) -> None:
    """Тестирование запуска: манифест, CSV эксперимента и код возврата"""
    mock_select.return_value = checks
    manifest = run(run_config, engine=MagicMock())
    output = Path(run_config.output_dir)

    assert [record["checkId"] for record in manifest["records"]] == ["alpha", "beta", "gamma"]
    assert manifest["fits"] == {"alpha": {"cp1.density": {"coefficients": [1.0]}}}
    assert manifest["config"] == run_config.echo()
    assert manifest["determinismHash"] == determinism_hash(manifest)
    assert json.loads((output / "manifest.json").read_text(encoding="utf-8")) == manifest

    frame = pd.read_csv(output / "alpha.csv")
    assert list(frame.columns) == ["model", "p", "observable", "quantity", "value"]
    assert frame["value"].tolist() == [2.0, 3.0]
    assert not (output / "beta.csv").exists()
    assert exit_code(manifest) == 1
    mock_threads.assert_called_once()


@patch("src.harness.select_checks", side_effect=KeyError("Неизвестные проверки: nope; доступны: gram"))
def test_run_unknown_check(mock_select: MagicMock, run_config: RunConfig) -> None:
    """Тестирование ошибки: неизвестное имя проверки"""
    with pytest.raises(ConfigError) as exc_info:
        run(replace(run_config, checks=["nope"]), engine=MagicMock())
    assert str(exc_info.value) == "Неизвестные проверки: nope; доступны: gram"


def test_exit_code() -> None:
    """Тестирование кода возврата: skipped не считается ошибкой"""
    assert exit_code({"records": [{"status": "pass"}, {"status": "skipped"}]}) == 0
    assert exit_code({"records": [{"status": "pass"}, {"status": "fail"}]}) == 1


@pytest.fixture
def manifest_path(tmp_path: Path) -> Path:
    manifest = {
        "records": [
            {"checkId": "gram", "paperAnchor": "Грам", "status": "pass", "residue": "0", "wallTimeMs": 3.0},
            {"checkId": "F2", "paperAnchor": "b₁", "status": "fail", "residue": "1 sc", "wallTimeMs": 9.0},
        ],
        "fits": {},
        "config": {"suite": "all"},
    }
    path = tmp_path / "manifest.json"
    path.write_text(json.dumps(manifest, ensure_ascii=False), encoding="utf-8")
    return path


def test_report_csv(manifest_path: Path) -> None:
    """Тестирование CSV отчёта, упорядоченного по checkId"""
    lines = report(str(manifest_path), "csv").splitlines()
    assert lines[0] == "checkId,paperAnchor,status,wallTimeMs"
    assert lines[1].startswith("F2,b₁,fail")
    assert lines[2].startswith("gram,Грам,pass")


def test_report_json(manifest_path: Path) -> None:
    """Тестирование JSON отчёта"""
    content = json.loads(report(str(manifest_path), "json"))
    assert [record["checkId"] for record in content["records"]] == ["F2", "gram"]
    assert content["config"] == {"suite": "all"}


def test_report_unknown_format(manifest_path: Path) -> None:
    """Тестирование ошибки: неизвестный формат отчёта"""
    with pytest.raises(ConfigError) as exc_info:
        report(str(manifest_path), "xml")
    assert str(exc_info.value) == "format: допустимые значения csv, json"


def test_load_manifest_missing(tmp_path: Path) -> None:
    """Тестирование ошибки: манифест не найден"""
    path = str(tmp_path / "manifest.json")
    with pytest.raises(ConfigError) as exc_info:
        load_manifest(path)
    assert str(exc_info.value) == f"Манифест {path} не найден"


def test_load_manifest_without_records(tmp_path: Path) -> None:
    """Тестирование ошибки: файл не является манифестом"""
    path = tmp_path / "other.json"
    path.write_text(json.dumps({"fits": {}}), encoding="utf-8")
    with pytest.raises(ConfigError) as exc_info:
        load_manifest(str(path))
    assert str(exc_info.value) == f"{path} не является манифестом: нет поля records"
