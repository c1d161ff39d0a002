from fractions import Fraction

import numpy as np
import pytest

from src.exceptions import PreconditionError
from src.geometry import (
    CP1,
    Torus,
    bergman_density,
    fourier_mode,
    gram,
    level_data,
    make_model,
    operator_norm,
    q_apply,
    riemann_roch_check,
    toeplitz,
)


def test_make_model() -> None:
    """Тестирование выбора модели по имени"""
    assert isinstance(make_model("cp1"), CP1)
    assert isinstance(make_model("torus"), Torus)


def test_make_model_unknown() -> None:
    """Тестирование ошибки: неизвестная модель"""
    with pytest.raises(PreconditionError) as exc_info:
        make_model("klein")
    assert str(exc_info.value) == "Неизвестная модель klein, доступны: cp1, torus"


def test_dimensions(cp1: CP1, torus: Torus) -> None:
    """Тестирование размерностей пространств сечений"""
    assert cp1.dimension(4) == 5
    assert torus.dimension(4) == 4


def test_empty_level(torus: Torus) -> None:
    """Тестирование ошибки: пустое пространство сечений"""
    with pytest.raises(PreconditionError) as exc_info:
        level_data(torus, 0)
    assert str(exc_info.value) == "Пространство сечений torus при p = 0 пусто"


def test_quadrature_weights(cp1: CP1, torus: Torus) -> None:
    """Тестирование: сумма весов квадратуры равна объёму"""
    for model in (cp1, torus):
        _, weights = model.quadrature(3)
        assert weights.sum() == pytest.approx(1.0)


@pytest.mark.parametrize("p", [1, 2, 5])
def test_gram_cp1(cp1: CP1, p: int) -> None:
    """Тестирование матрицы Грама на CP¹ против замкнутой формы"""
    np.testing.assert_allclose(gram(cp1, p), cp1.exact_gram(p), atol=1e-12)


def test_exact_gram_values(cp1: CP1, torus: Torus) -> None:
    """Тестирование замкнутых форм матрицы Грама"""
    np.testing.assert_allclose(cp1.exact_gram(2), np.diag([1 / 3, 1 / 6, 1 / 3]))
    np.testing.assert_allclose(torus.exact_gram(2), np.eye(2) / 2)


@pytest.mark.parametrize("p", [1, 3, 6])
def test_density_cp1(cp1: CP1, point_cp1: np.ndarray, p: int) -> None:
    """Тестирование постоянства плотности Бергмана на CP¹ при всех p"""
    assert bergman_density(cp1, p, point_cp1)[0] == pytest.approx(p + 1, abs=1e-9)


@pytest.mark.parametrize("p", [20, 24])
def test_density_torus(torus: Torus, point_torus: np.ndarray, p: int) -> None:
    """Тестирование плотности Бергмана тора: p с точностью до e^{−cp}"""
    assert bergman_density(torus, p, point_torus)[0] == pytest.approx(p, abs=1e-9)


def test_density_torus_small_level(torus: Torus) -> None:
    """Тестирование: при p = 1 плотность тора обращается в нуль в нуле тета-функции"""
    nodes, weights = torus.quadrature(1)
    density = bergman_density(torus, 1, nodes)
    assert weights @ density == pytest.approx(1.0)
    assert density.min() < 0.5


def test_height_spectrum(cp1: CP1) -> None:
    """Тестирование спектра T_height на CP¹: (p − 2j)/(p + 2)"""
    p = 4
    operator = toeplitz(cp1, p, cp1.observable("height").value)
    eigenvalues = np.sort(np.linalg.eigvalsh(operator.matrix))
    expected = np.sort([(p - 2 * j) / (p + 2) for j in range(p + 1)])
    np.testing.assert_allclose(eigenvalues, expected, atol=1e-10)
    assert operator_norm(operator) == pytest.approx(p / (p + 2))


def test_q_on_fourier_mode(torus: Torus, point_torus: np.ndarray) -> None:
    """Тестирование собственных значений Q-оператора тора на гармониках: e^{−π(m² + n²)/p}"""
    p = 20
    mode = fourier_mode(1, 1)
    value = q_apply(torus, p, mode, point_torus)[0]
    expected = np.exp(-2 * np.pi / p) * mode(point_torus)[0]
    assert abs(value - expected) < 1e-9


def test_riemann_roch(cp1: CP1, torus: Torus) -> None:
    """Тестирование формулы Римана–Роха"""
    assert riemann_roch_check(cp1, 5) == (6, Fraction(6))
    assert riemann_roch_check(torus, 5) == (5, Fraction(5))


def test_riemann_roch_level(cp1: CP1) -> None:
    """Тестирование ошибки: p < 1"""
    with pytest.raises(PreconditionError) as exc_info:
        riemann_roch_check(cp1, 0)
    assert str(exc_info.value) == "Проверка Римана–Роха требует p ≥ 1, получено 0"


def test_observable_unknown(cp1: CP1) -> None:
    """Тестирование ошибки: наблюдаемой нет в каталоге"""
    with pytest.raises(KeyError) as exc_info:
        cp1.observable("nope")
    assert exc_info.value.args[0] == "Наблюдаемая nope отсутствует в каталоге модели cp1"


def test_bracket(cp1: CP1, point_cp1: np.ndarray) -> None:
    """Тестирование скобки Пуассона каталога"""
    assert cp1.bracket("x1", "x1")(point_cp1)[0] == 0
    forward = cp1.bracket("x1", "x2")(point_cp1)
    backward = cp1.bracket("x2", "x1")(point_cp1)
    np.testing.assert_allclose(forward, -backward)
    np.testing.assert_allclose(forward, -2 * np.cos(point_cp1[:, 0]))
    assert ("x1", "x2") in cp1.pairs()


def test_gradient_dot(torus: Torus, point_torus: np.ndarray) -> None:
    """Тестирование ∇f·∇g для пар каталога тора"""
    assert torus.gradient_dot("cos_y", "cos_x")(point_torus)[0] == 0
    with pytest.raises(KeyError):
        torus.gradient_dot("cos_x", "sin_x")
