from pathlib import Path

import numpy as np
import pytest

from src.calculus import OperatorExpression
from src.checks import CheckContext
from src.coefficients import CoefficientEngine
from src.config import RunConfig
from src.geometry import CP1, Torus
from src.operators import ModelOperatorSet, o2_normal_reference


@pytest.fixture(scope="session")
def engine() -> CoefficientEngine:
    """Общий конвейер коэффициентов: стадии кэшируются на всю сессию"""
    return CoefficientEngine()


@pytest.fixture(scope="session")
def second_order_engine() -> CoefficientEngine:
    """Конвейер только с 𝒪₂ в индексной нормальной форме: достаточно для порядка ħ"""
    zero = OperatorExpression.zero()
    return CoefficientEngine(ModelOperatorSet(o2_normal_reference(), zero, zero))


@pytest.fixture
def cp1() -> CP1:
    return CP1()


@pytest.fixture
def torus() -> Torus:
    return Torus()


@pytest.fixture
def point_cp1() -> np.ndarray:
    return np.array([[1.1, 0.7]])


@pytest.fixture
def point_torus() -> np.ndarray:
    return np.array([[0.1, 0.2]])


@pytest.fixture
def run_config(tmp_path: Path) -> RunConfig:
    return RunConfig(output_dir=str(tmp_path / "out"))


@pytest.fixture
def context(run_config: RunConfig, engine: CoefficientEngine) -> CheckContext:
    return CheckContext(run_config, engine)
