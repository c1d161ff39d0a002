from fractions import Fraction

import pytest

from src.calculus import (
    KernelPolynomial,
    adjoint,
    apply_to_P,
    compose,
    compose_fock,
    eval_origin,
    inv_L_perp,
    model_L,
    normal_order,
    op,
    operator_adjoint,
    project,
    project_perp,
)
from src.exceptions import PreconditionError, StructuralError
from src.tensors import TensorPolynomial, tp


def kernel(text: str, coef: Fraction = Fraction(1), pi: int = 0) -> KernelPolynomial:
    return tp(text, coef, pi=pi, cls=KernelPolynomial)


def test_commutator_bp_zb() -> None:
    """Тестирование [b⁺_j, z̄_k] = 2δ_jk"""
    assert normal_order(op("bp[j] zb[k]")) == normal_order(op("zb[k] bp[j]")) + tp("delta[j k]", 2)


def test_commutator_bp_b() -> None:
    """Тестирование [b⁺_j, b_k] = 4πδ_jk"""
    assert normal_order(op("bp[j] b[k]")) == normal_order(op("b[k] bp[j]")) + tp("delta[j k]", 4, pi=1)


def test_commutator_z_b() -> None:
    """Тестирование [z_j, b_k] = 2δ_jk"""
    assert normal_order(op("z[j] b[k]")) == normal_order(op("b[k] z[j]")) + tp("delta[j k]", 2)


def test_commuting_letters() -> None:
    """Тестирование: b и z̄ коммутируют"""
    assert normal_order(op("zb[j] b[k]")) == normal_order(op("b[k] zb[j]"))


def test_normal_form_flag() -> None:
    """Тестирование признака нормальной формы"""
    word = op("bp[j] b[j]")
    assert not word.is_normal()
    ordered = normal_order(word)
    assert ordered.is_normal()
    assert ordered == normal_order(model_L()) + TensorPolynomial.scalar(4, pi=1, n=1)


def test_matmul_concatenates_words() -> None:
    """Тестирование композиции слов"""
    assert op("bp[j]") @ op("zb[k]") == op("bp[j] zb[k]")


def test_operator_adjoint() -> None:
    """Тестирование формально сопряжённого оператора"""
    assert operator_adjoint(op("z[k]")) == normal_order(op("zb[k]"))
    assert operator_adjoint(op("b[k] z[m]", 1, i=1)) == normal_order(op("zb[m] bp[k]", -1, i=1))


def test_invalid_letter() -> None:
    """Тестирование ошибки: переменная второго слота не буква оператора"""
    with pytest.raises(StructuralError) as exc_info:
        normal_order(op("zp[k]"))
    assert str(exc_info.value) == "Недопустимая буква zp[k]@w0000 в слове оператора"


def test_apply_requires_normal_form() -> None:
    """Тестирование ошибки: оператор не приведён к нормальному порядку"""
    with pytest.raises(PreconditionError) as exc_info:
        apply_to_P(op("b[i]"), KernelPolynomial.one())
    assert str(exc_info.value) == "Оператор не приведён к нормальному порядку"


def test_apply_b_to_projector() -> None:
    """Тестирование b_i𝒫 = 2π(z̄_i − z̄′_i)𝒫"""
    result = apply_to_P(normal_order(op("b[i]")), KernelPolynomial.one())
    assert result == kernel("zb[i]", 2, pi=1) - kernel("zbp[i]", 2, pi=1)


def test_apply_bp() -> None:
    """Тестирование b⁺_i(z̄_j𝒫) = 2δ_ij𝒫"""
    assert apply_to_P(normal_order(op("bp[i]")), kernel("zb[j]")) == tp("delta[i j]", 2)


def test_model_operator_kills_image() -> None:
    """Тестирование 𝓛𝒫 = 0 на ядрах без z̄"""
    assert apply_to_P(normal_order(model_L()), kernel("z[i] zbp[j]")).is_zero()


def test_projection() -> None:
    """Тестирование левой проекции z̄_i𝒫"""
    assert project(kernel("zb[i]")) == kernel("zbp[i]")
    assert project_perp(kernel("zb[i]")) == kernel("zb[i]") - kernel("zbp[i]")


def test_inverse_model_operator() -> None:
    """Тестирование 𝓛⁻¹𝒫^⊥ и 𝓛𝓛⁻¹𝒫^⊥ = 𝒫^⊥"""
    source = kernel("zb[i]")
    inverse = inv_L_perp(source)
    assert inverse == kernel("zb[i]", Fraction(1, 4), pi=-1) - kernel("zbp[i]", Fraction(1, 4), pi=-1)
    assert apply_to_P(normal_order(model_L()), inverse) == project_perp(source)


def test_inverse_vanishes_on_image() -> None:
    """Тестирование 𝓛⁻¹𝒫^⊥ = 0 на образе проектора"""
    assert inv_L_perp(kernel("z[i] zbp[j]")).is_zero()


def test_compose_wick_pairing() -> None:
    """Тестирование композиции (z̄′_i𝒫)∘(z_j𝒫) = (z_j z̄′_i + δ_ji/π)𝒫"""
    expected = kernel("z[j] zbp[i]") + kernel("delta[j i]", pi=-1)
    assert compose(kernel("zbp[i]"), kernel("z[j]")) == expected


def test_compose_routes_agree() -> None:
    """Тестирование совпадения композиции по правилу Вика и через форму Фока"""
    left = kernel("zbp[i]")
    right = kernel("z[j]")
    assert compose_fock(left, right) == compose(left, right)


def test_compose_zero_flags() -> None:
    """Тестирование отбрасывания членов с переменными внешних слотов"""
    left = kernel("z[i]") + KernelPolynomial.one()
    assert compose(left, KernelPolynomial.one(), zero_left=True) == KernelPolynomial.one()


def test_compose_rejects_letters() -> None:
    """Тестирование ошибки: буква оператора в ядре"""
    with pytest.raises(StructuralError) as exc_info:
        compose(kernel("b[i]"), KernelPolynomial.one())
    assert str(exc_info.value) == "Недопустимая переменная ядра b[i]"


def test_adjoint_kernel() -> None:
    """Тестирование сопряжённого ядра"""
    assert adjoint(kernel("z[i]")) == kernel("zbp[i]")
    assert adjoint(adjoint(kernel("z[i] zb[j]", 1, pi=1))) == kernel("z[i] zb[j]", 1, pi=1)


def test_eval_origin() -> None:
    """Тестирование значения ядра в нуле"""
    assert eval_origin(tp("sc") + tp("z[i] zbp[i]")) == tp("sc")
