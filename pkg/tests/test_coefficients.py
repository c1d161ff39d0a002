from fractions import Fraction
from unittest.mock import MagicMock, patch

import pytest

from src import closed_forms
from src.calculus import KernelPolynomial, OperatorExpression
from src.coefficients import CoefficientEngine, associativity_defect, equal, star_C, taylor_term
from src.dictionary import dictionary_lookup
from src.exceptions import PreconditionError, StructuralError
from src.operators import ModelOperatorSet
from src.tensors import TensorPolynomial, tp


def kernel(text: str, coef: Fraction = Fraction(1)) -> KernelPolynomial:
    return tp(text, coef, cls=KernelPolynomial)


def test_taylor_term() -> None:
    """Тестирование однородных частей ряда Тейлора"""
    assert taylor_term("f", 0) == kernel("f")
    assert taylor_term("f", 1) == kernel("f[a] z[a]") + kernel("f[c~] zb[c]")
    expected = kernel("f[a b] z[a] z[b]", Fraction(1, 2)) + kernel("f[a c~] z[a] zb[c]")
    assert taylor_term("f", 2) == expected + kernel("f[c~ d~] zb[c] zb[d]", Fraction(1, 2))


def test_low_orders(engine: CoefficientEngine) -> None:
    """Тестирование J₀ = 1, J₁ = 0, Q₀(f) = f, Q₁(f)(0,0) = 0"""
    assert engine.J(0) == KernelPolynomial.one()
    assert engine.J(1).is_zero()
    assert engine.compute_Qf("f", 0) == tp("f")
    assert engine.compute_Qf("f", 3).is_zero()
    assert engine.compute_Qfg("f", "g", 0) == tp("f g")
    assert engine.extract_C(0) == tp("f g")


def test_first_order_kernel(engine: CoefficientEngine) -> None:
    """Тестирование Q₁(f) = (f_a z_a + f_c̄ z̄′_c)𝒫"""
    assert engine.q_kernel("f", 1) == kernel("f[a] z[a]") + kernel("f[c~] zbp[c]")


def test_order_out_of_range(engine: CoefficientEngine) -> None:
    """Тестирование ошибки: порядок вне диапазона"""
    with pytest.raises(PreconditionError) as exc_info:
        engine.J(5)
    assert str(exc_info.value) == "Порядок 5 вне диапазона 0..4"

    with pytest.raises(PreconditionError) as exc_info:
        engine.compute_Qf("f", 5)
    assert str(exc_info.value) == "Порядок 5 вне диапазона 0..4"


def test_full_kernel_order_four(engine: CoefficientEngine) -> None:
    """Тестирование ошибки: полное ядро Q₄ не строится"""
    with pytest.raises(PreconditionError) as exc_info:
        engine.q_kernel("f", 4)
    assert str(exc_info.value) == "Полное ядро Q_4 не строится, порядок больше 3"


@pytest.mark.parametrize("tag", ["R", "zb", "f1"])
def test_invalid_observable_name(engine: CoefficientEngine, tag: str) -> None:
    """Тестирование ошибки: имя наблюдаемой совпадает с видом тензора"""
    with pytest.raises(StructuralError) as exc_info:
        engine.compute_Qf(tag, 2)
    assert str(exc_info.value) == f"Недопустимое имя наблюдаемой {tag}"


def test_star_C() -> None:
    """Тестирование коэффициентов звёздочного произведения"""
    assert star_C(0, "f", "g") == tp("f g")
    assert star_C(1, "f", "g") == closed_forms.C1("f", "g")


@pytest.mark.parametrize("k", [0, 1])
def test_associativity_low_orders(k: int) -> None:
    """Тестирование ассоциативности до порядка ħ"""
    assert associativity_defect(k).is_zero()


def test_associativity_order_limit() -> None:
    """Тестирование ошибки: ассоциативность выше порядка 2"""
    with pytest.raises(PreconditionError) as exc_info:
        associativity_defect(3)
    assert str(exc_info.value) == "Ассоциативность проверяется до порядка 2, запрошен 3"


def test_first_coefficient(second_order_engine: CoefficientEngine) -> None:
    """Тестирование 𝓕₂(0,0) = b₁ и b_{1,f}"""
    _, value = second_order_engine.compute_F2()
    assert equal(value, closed_forms.b1())[0]
    assert equal(second_order_engine.compute_Qf("f", 2), closed_forms.b1_f())[0]


def test_projected_J2(second_order_engine: CoefficientEngine) -> None:
    """Тестирование (𝒫J₂𝒫)(0,0) = 𝒦[1, J₂](0,0) = sc/16π"""
    ok, witness = equal(second_order_engine.projected_J2(), closed_forms.projected_J2())
    assert ok
    assert witness.render() == "0"


@pytest.mark.parametrize("left", [True, False])
def test_projected_Qf(second_order_engine: CoefficientEngine, left: bool) -> None:
    """Тестирование 𝒦[1, Q₂(f)](0,0) = 𝒦[Q₂(f), 1](0,0) = b₁f/2 − Δf/4π"""
    half_b1 = (closed_forms.b1_invariant() * tp("f")).scale(Fraction(1, 2))
    expected = half_b1 + dictionary_lookup("laplacian", "f").scale(Fraction(-1, 4), pi=-1)
    assert equal(second_order_engine.projected_Qf("f", 2, left), expected)[0]
    assert second_order_engine.projected_Qf("f", 0, left) == tp("f")
    assert second_order_engine.projected_Qf("f", 3, left).is_zero()


def test_b1_fg(second_order_engine: CoefficientEngine) -> None:
    """Тестирование b_{1,f,g} = Q₂(f, g)(0,0): крайние слагаемые 𝒦[f, Q₂(g)] и 𝒦[Q₂(f), g]"""
    ok, witness = equal(second_order_engine.compute_Qfg("f", "g", 2), closed_forms.b1_fg("f", "g"))
    assert ok
    assert witness.render() == "0"


def test_C1_extraction(second_order_engine: CoefficientEngine) -> None:
    """Тестирование C₁(f, g) = −(1/2π)⟨∂f, ∂̄g⟩"""
    ok, witness = equal(second_order_engine.extract_C(1), closed_forms.C1())
    assert ok
    assert witness.render() == "0"


@pytest.mark.parametrize("k", [0, 1])
def test_derived_associativity(second_order_engine: CoefficientEngine, k: int) -> None:
    """Тестирование ассоциативности на выведенных коэффициентах C_k"""
    defect = associativity_defect(k, coefficients=second_order_engine.extract_C)
    assert equal(defect, TensorPolynomial.zero())[0]


def test_F4_guard_modulo_relations() -> None:
    """Тестирование: 𝒫𝒪₂𝒫, равный нулю по следу ric = 2R, не останавливает 𝓕₄"""
    trace = tp("ric[k k] z[a]", cls=KernelPolynomial) - tp("R[k k q q] z[a]", 2, cls=KernelPolynomial)
    pieces = {name: TensorPolynomial.zero() for name in ("iterated", "fourth", "sandwich", "square")}
    zero = OperatorExpression.zero()
    engine = CoefficientEngine(ModelOperatorSet(zero, zero, zero))
    with patch.object(CoefficientEngine, "projected_O2", return_value=trace), patch.object(
        CoefficientEngine, "f4_pieces", return_value=pieces
    ):
        assert engine.compute_F4().is_zero()


@patch("src.coefficients.equal")
def test_F4_guard_error(mock_equal: MagicMock) -> None:
    """Тестирование ошибки: 𝒫𝒪₂𝒫 не равен нулю по модулю тождеств"""
    mock_equal.return_value = (False, tp("sc"))
    zero = OperatorExpression.zero()
    engine = CoefficientEngine(ModelOperatorSet(zero, zero, zero))
    with pytest.raises(PreconditionError) as exc_info:
        engine.compute_F4()
    assert str(exc_info.value) == "𝒫𝒪₂𝒫 ≠ 0: 1 sc"


@pytest.mark.slow
def test_second_order_associativity() -> None:
    """Тестирование ассоциативности на порядке ħ²"""
    assert equal(associativity_defect(2), TensorPolynomial.zero())[0]


@pytest.mark.slow
def test_derived_second_order_associativity(engine: CoefficientEngine) -> None:
    """Тестирование ассоциативности на порядке ħ² для C₂, выведенного конвейером"""
    assert equal(associativity_defect(2, coefficients=engine.extract_C), TensorPolynomial.zero())[0]
