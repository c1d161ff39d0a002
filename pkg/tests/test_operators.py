import pytest

from src.calculus import KernelPolynomial, OperatorExpression, apply_to_P, normal_order, operator_adjoint, project
from src.coefficients import equal, o2_routes
from src.frames import convert_frame
from src.operators import build_operators, o2_normal_reference, o2_raw_reference, o2_real
from src.relations import expand_ric
from src.tensors import TensorPolynomial


@pytest.fixture(scope="module")
def o2() -> OperatorExpression:
    return normal_order(convert_frame(o2_real()))


def test_o2_frame_matches_normal_form(o2: OperatorExpression) -> None:
    """Тестирование: 𝒪₂ из вещественного репера совпадает с индексной нормальной формой"""
    assert expand_ric(o2) == expand_ric(o2_normal_reference())


def test_o2_index_form_ordering() -> None:
    """Тестирование: упорядочение индексной записи 𝒪₂ даёт нормальную форму"""
    assert normal_order(o2_raw_reference()) == o2_normal_reference()


def test_o2_is_formally_selfadjoint() -> None:
    """Тестирование 𝒪₂* = 𝒪₂"""
    reference = o2_normal_reference()
    assert operator_adjoint(reference) == reference


def test_projected_o2_vanishes() -> None:
    """Тестирование 𝒫𝒪₂𝒫 = 0 по модулю тождеств"""
    projected = project(apply_to_P(o2_normal_reference(), KernelPolynomial.one()))
    ok, witness = equal(projected, TensorPolynomial.zero())
    assert ok
    assert witness.render() == "0"


@pytest.mark.slow
def test_build_operators() -> None:
    """Тестирование сборки 𝒪₂, 𝒪₃, 𝒪₄ и согласия трёх записей 𝒪₂"""
    operators = build_operators()
    assert sorted(operators.pieces) == ["O41", "O42", "O43", "O44", "O45", "O46"]
    assert operators.O2.is_normal()
    assert operators.O4.is_normal()
    assert all(difference.is_zero() for difference in o2_routes(operators))
