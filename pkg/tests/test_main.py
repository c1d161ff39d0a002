import json
from pathlib import Path
from unittest.mock import MagicMock, patch

import pytest

from main import main


def test_no_command() -> None:
    """Тестирование: без подкоманды код возврата 2"""
    assert main([]) == 2


def test_unknown_suite() -> None:
    """Тестирование: недопустимое значение флага"""
    assert main(["verify", "--suite", "fast"]) == 2


def test_report_missing_manifest(tmp_path: Path) -> None:
    """Тестирование: отчёт по отсутствующему манифесту"""
    assert main(["report", str(tmp_path / "missing.json")]) == 2


def test_verify_unknown_check(tmp_path: Path) -> None:
    """Тестирование: неизвестное имя проверки"""
    assert main(["verify", "--checks", "nope", "--out", str(tmp_path)]) == 2


def test_verify_bad_range(tmp_path: Path) -> None:
    """Тестирование: pmin меньше 1"""
    assert main(["verify", "--p", "0:5", "--out", str(tmp_path)]) == 2


def test_verify_and_report(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    """Тестирование запуска проверки и чтения отчёта"""
    code = main(["verify", "--suite", "numeric", "--checks", "riemann_roch", "--p", "1:5", "--out", str(tmp_path)])
    assert code == 0
    manifest = json.loads((tmp_path / "manifest.json").read_text(encoding="utf-8"))
    assert [record["status"] for record in manifest["records"]] == ["pass"]
    assert (tmp_path / "riemann_roch.csv").exists()

    capsys.readouterr()
    assert main(["report", str(tmp_path / "manifest.json")]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "checkId,paperAnchor,status,wallTimeMs"


@patch("main.run")
def test_verify_failed_check(mock_run: MagicMock, tmp_path: Path) -> None:
    """Тестирование: код возврата 1 при проваленной проверке"""
    mock_run.return_value = {
        "records": [{"checkId": "F2", "paperAnchor": "b₁", "status": "fail", "residue": "1 sc", "wallTimeMs": 1.0}]
    }
    assert main(["verify", "--checks", "F2", "--out", str(tmp_path)]) == 1
    assert mock_run.call_args.args[0].checks == ["F2"]
