from fractions import Fraction

import pytest

from src.calculus import normal_order, op
from src.exceptions import StructuralError
from src.frames import Nabla, T, convert_frame, frame_sum, word
from src.tensors import TensorPolynomial


def test_holomorphic_derivative() -> None:
    """Тестирование ∇_{0,∂_k} = −b_k/2"""
    assert convert_frame(word(Nabla("d:k"))) == op("b[k]", Fraction(-1, 2))


def test_antiholomorphic_derivative() -> None:
    """Тестирование ∇_{0,∂̄_k} = b⁺_k/2"""
    assert convert_frame(word(Nabla("db:k"))) == op("bp[k]", Fraction(1, 2))


def test_frame_laplacian() -> None:
    """Тестирование Σ∇_{e_k}∇_{e_k} = −𝓛 − 2πn после нормального упорядочения"""
    result = normal_order(convert_frame(word(Nabla("e:k"), Nabla("e:k"))))
    expected = normal_order(op("b[k] bp[k]", -1)) + TensorPolynomial.scalar(-2, pi=1, n=1)
    assert result == expected


def test_ricci_on_mixed_vectors() -> None:
    """Тестирование компонент ric и R^E на векторах разного типа"""
    assert convert_frame(word(T("ric", ("d:a", "db:b")))) == op("ric[a b]")
    assert convert_frame(word(T("ric", ("db:b", "d:a")))) == op("ric[a b]")
    assert convert_frame(word(T("RE", ("db:b", "d:a")))) == op("RE[a b]", -1)


def test_vanishing_component() -> None:
    """Тестирование: ric на двух голоморфных векторах равен нулю"""
    assert convert_frame(word(T("ric", ("d:a", "d:b")))).is_zero()


def test_frame_sum() -> None:
    """Тестирование суммы выражений"""
    total = frame_sum(word(Nabla("d:k")), word(Nabla("d:k")))
    assert len(total) == 2
    assert convert_frame(total) == op("b[k]", -1)


def test_unknown_vector() -> None:
    """Тестирование ошибки: неизвестный векторный аргумент"""
    with pytest.raises(StructuralError) as exc_info:
        convert_frame(word(Nabla("q")))
    assert str(exc_info.value) == "Неизвестный векторный аргумент q"


def test_unpaired_frame_index() -> None:
    """Тестирование ошибки: индекс репера встречается один раз"""
    with pytest.raises(StructuralError) as exc_info:
        convert_frame(word(Nabla("e:k")))
    assert str(exc_info.value) == "Индекс репера k встречается 1 раз вместо двух"


def test_unknown_tensor() -> None:
    """Тестирование ошибки: неизвестный вид тензора"""
    with pytest.raises(StructuralError) as exc_info:
        convert_frame(word(T("W")))
    assert str(exc_info.value) == "Неизвестный вид тензора W"


def test_wrong_arity() -> None:
    """Тестирование ошибки: неверное число аргументов"""
    with pytest.raises(StructuralError) as exc_info:
        convert_frame(word(T("ric", ("d:a",))))
    assert str(exc_info.value) == "Тензор ric ожидает 2 аргументов, получено 1"


def test_nabla_along_radial_field() -> None:
    """Тестирование ошибки: производная по радиальному полю"""
    with pytest.raises(StructuralError) as exc_info:
        convert_frame(word(Nabla("X")))
    assert str(exc_info.value) == "Производная ∇ по полю x0 не поддерживается"
