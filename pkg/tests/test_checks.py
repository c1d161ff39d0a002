from dataclasses import replace
from unittest.mock import MagicMock, patch

import pytest

from src.calculus import KernelPolynomial
from src.checks import DENSITY_RANGE, REGISTRY, CheckContext, CheckOutcome, compared, exact, select_checks
from src.coefficients import CoefficientEngine
from src.config import RunConfig
from src.tensors import TensorPolynomial, tp

SYMBOLIC = sorted(name for name, check in REGISTRY.items() if check.suite == "symbolic")
NUMERIC = sorted(name for name, check in REGISTRY.items() if check.suite == "numeric")
CHEAP_SYMBOLIC = ["b1_invariant", "compose_routes", "normal_order_fock"]


def test_registry_suites() -> None:
    """Тестирование: каждая проверка принадлежит одному набору и имеет формулу"""
    assert set(SYMBOLIC) | set(NUMERIC) == set(REGISTRY)
    assert all(check.anchor for check in REGISTRY.values())
    assert {"density", "riemann_roch", "donaldson_q", "commutator"} <= set(NUMERIC)
    assert {"F2", "F4", "C1", "associativity"} <= set(SYMBOLIC)


def test_select_by_suite() -> None:
    """Тестирование выбора проверок по набору"""
    assert [check.name for check in select_checks(RunConfig(suite="numeric"))] == NUMERIC
    assert [check.name for check in select_checks(RunConfig(suite="all"))] == sorted(REGISTRY)


def test_select_by_name() -> None:
    """Тестирование фильтра по именам проверок"""
    checks = select_checks(RunConfig(suite="all", checks=["gram", "C1"]))
    assert [check.name for check in checks] == ["C1", "gram"]
    assert select_checks(RunConfig(suite="symbolic", checks=["gram"])) == []


def test_select_unknown() -> None:
    """Тестирование ошибки: неизвестное имя проверки"""
    with pytest.raises(KeyError) as exc_info:
        select_checks(RunConfig(checks=["nope"]))
    assert exc_info.value.args[0] == f"Неизвестные проверки: nope; доступны: {', '.join(sorted(REGISTRY))}"


def test_compared_and_exact() -> None:
    """Тестирование построения результатов сравнения"""
    assert compared(tp("sc"), tp("R[a a b b]", 8)) == CheckOutcome(True, "0")
    outcome = exact(tp("sc"))
    assert not outcome.passed
    assert outcome.residue != "0"


def test_context_caches_models(context: CheckContext) -> None:
    """Тестирование: модель строится один раз за запуск"""
    assert context.model("cp1") is context.model("cp1")
    assert context.p_values({"cp1": (2, 4)}, "cp1") == [2, 3, 4]
    context.config.p_range = (5, 6)
    assert context.p_values({"cp1": (2, 4)}, "cp1") == [5, 6]


def test_p_values_floor(context: CheckContext) -> None:
    """Тестирование: асимптотика тора проверяется только с p ≥ 20"""
    context.config.p_range = (1, 22)
    assert context.p_values(DENSITY_RANGE, "torus", floor=True) == [20, 21, 22]
    assert context.p_values(DENSITY_RANGE, "cp1", floor=True) == list(range(1, 23))
    assert context.p_values(DENSITY_RANGE, "torus") == list(range(1, 23))
    context.config.p_range = None
    assert context.p_values(DENSITY_RANGE, "torus", floor=True) == list(range(20, 41))


@pytest.mark.parametrize("name", CHEAP_SYMBOLIC)
def test_cheap_symbolic_checks(context: CheckContext, name: str) -> None:
    """Тестирование быстрых символьных проверок"""
    outcome = REGISTRY[name].run(context)
    assert outcome.passed, outcome.residue


@pytest.mark.parametrize("name", ["riemann_roch", "gram", "frame_invariance"])
def test_cheap_numeric_checks(run_config: RunConfig, engine: CoefficientEngine, name: str) -> None:
    """Тестирование точных численных проверок на малых p"""
    context = CheckContext(replace(run_config, p_range=(1, 8)), engine)
    outcome = REGISTRY[name].run(context)
    assert outcome.passed, outcome.residue
    assert outcome.rows
    assert {row["model"] for row in outcome.rows} == {"cp1", "torus"}


def test_density_below_floor(run_config: RunConfig, engine: CoefficientEngine) -> None:
    """Тестирование плотности на малых p: CP¹ проверяется, тор пропускается"""
    outcome = REGISTRY["density"].run(CheckContext(replace(run_config, p_range=(1, 8)), engine))
    assert outcome.passed, outcome.residue
    assert outcome.residue == "torus: нет уровней p ≥ 20, асимптотика не проверялась"
    assert set(outcome.fits) == {"cp1.density"}
    assert {row["model"] for row in outcome.rows} == {"cp1"}


def test_density_fit(run_config: RunConfig, engine: CoefficientEngine) -> None:
    """Тестирование подгонки плотности тора при p ≥ 20: a₀ = 1, a₁ = sc/8π = 0"""
    config = replace(run_config, model="torus", p_range=(20, 24))
    outcome = REGISTRY["density"].run(CheckContext(config, engine))
    assert outcome.passed, outcome.residue
    assert set(outcome.fits) == {"torus.density"}


def test_toeplitz_height_skipped(run_config: RunConfig, engine: CoefficientEngine) -> None:
    """Тестирование: проверка высоты на CP¹ пропускается без модели cp1"""
    outcome = REGISTRY["toeplitz_height"].run(CheckContext(replace(run_config, model="torus"), engine))
    assert outcome.skipped
    assert outcome.residue == "модель cp1 не выбрана"


@pytest.mark.slow
@pytest.mark.parametrize("name", sorted(set(SYMBOLIC) - set(CHEAP_SYMBOLIC)))
def test_symbolic_checks(context: CheckContext, name: str) -> None:
    """Тестирование символьных проверок коэффициентов"""
    outcome = REGISTRY[name].run(context)
    assert outcome.passed, outcome.residue


@pytest.mark.slow
@pytest.mark.parametrize("name", NUMERIC)
def test_numeric_checks(context: CheckContext, name: str) -> None:
    """Тестирование численных проверок на диапазонах по умолчанию"""
    outcome = REGISTRY[name].run(context)
    assert outcome.passed, outcome.residue


def test_po2p_modulo_relations(run_config: RunConfig) -> None:
    """Тестирование: 𝒫𝒪₂𝒫 сравнивается с нулём по модулю тождеств, а не буквально"""
    engine = MagicMock(spec=CoefficientEngine)
    engine.projected_O2.return_value = tp("ric[k k] z[a]", cls=KernelPolynomial) - tp(
        "R[k k q q] z[a]", 2, cls=KernelPolynomial
    )
    assert REGISTRY["PO2P"].run(CheckContext(run_config, engine)) == CheckOutcome(True, "0")


@patch("src.checks.associativity_defect")
def test_associativity_both_sources(mock_defect: MagicMock, run_config: RunConfig) -> None:
    """Тестирование: ассоциативность проверяется на замкнутых формах и на выведенных C_k"""
    mock_defect.return_value = TensorPolynomial.zero()
    engine = MagicMock(spec=CoefficientEngine)
    outcome = REGISTRY["associativity"].run(CheckContext(run_config, engine))
    assert outcome == CheckOutcome(True, "0")
    assert mock_defect.call_count == 6
    derived = [call for call in mock_defect.call_args_list if call.kwargs.get("coefficients") is not None]
    assert [call.args[0] for call in derived] == [0, 1, 2]
    assert all(call.kwargs["coefficients"] == engine.extract_C for call in derived)


@patch("src.checks.associativity_defect")
def test_associativity_reports_source(mock_defect: MagicMock, run_config: RunConfig) -> None:
    """Тестирование остатка: расхождение выведенных C_k помечается отдельно"""
    engine = MagicMock(spec=CoefficientEngine)
    mock_defect.side_effect = lambda k, coefficients=None: (
        tp("f g h", 1, pi=-1) if coefficients is not None and k == 1 else TensorPolynomial.zero()
    )
    outcome = REGISTRY["associativity"].run(CheckContext(run_config, engine))
    assert not outcome.passed
    assert outcome.residue == "derived k=1: 1 pi^-1 f g h"


@patch("src.checks.level_data")
@patch("src.checks.commutator_defect")
def test_commutator_tail_range(
    mock_defect: MagicMock, mock_level: MagicMock, run_config: RunConfig, engine: CoefficientEngine
) -> None:
    """Тестирование: точный дефект CP¹ 4p/(p+2)² даёт наклон −1 только на хвосте p = 24..60"""
    mock_defect.side_effect = lambda model, p, f, g, data: 4 * p / (p + 2) ** 2
    outcome = REGISTRY["commutator"].run(CheckContext(replace(run_config, model="cp1"), engine))
    assert outcome.passed, outcome.residue
    assert sorted({row["p"] for row in outcome.rows if row["quantity"] == "commutator_defect"}) == list(
        range(24, 61, 6)
    )

    outcome = REGISTRY["commutator"].run(CheckContext(replace(run_config, model="cp1", p_range=(4, 20)), engine))
    assert not outcome.passed
    assert outcome.residue.startswith("cp1/")
