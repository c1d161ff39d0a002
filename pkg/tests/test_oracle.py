import numpy as np
import pytest

from src.calculus import normal_order, op
from src.exceptions import PreconditionError
from src.oracle import CoreSampler, FockSpace, fock_oracle, relative_error
from src.tensors import Factor


def test_fock_states() -> None:
    """Тестирование нумерации состояний усечённого пространства"""
    space = FockSpace(2)
    assert space.states == [(0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0)]
    assert space.index[(1, 1)] == 4


def test_fock_norms() -> None:
    """Тестирование квадратов норм базисных векторов"""
    norms = FockSpace(1).norms()
    assert np.allclose(norms, [1.0, 1 / np.pi, 4 * np.pi])


def test_letter_b_shifts_alpha() -> None:
    """Тестирование матрицы буквы b"""
    space = FockSpace(1)
    matrix = space.letter("b")
    assert matrix[space.index[(1, 0)], space.index[(0, 0)]] == 1.0
    assert matrix[:, space.index[(1, 0)]].sum() == 0.0


@pytest.mark.parametrize(
    "word",
    ["bp[j] zb[k]", "bp[j] b[k]", "z[j] b[k]", "bp[i] z[j] zb[k] b[l]"],
)
def test_normal_order_matches_oracle(word: str) -> None:
    """Тестирование: нормальное упорядочение не меняет матрицу в пространстве Фока"""
    expression = op(word)
    assert relative_error(fock_oracle(expression, 6), fock_oracle(normal_order(expression), 6)) < 1e-10


def test_oracle_truncation_too_small() -> None:
    """Тестирование ошибки: усечение меньше степени выражения"""
    with pytest.raises(PreconditionError) as exc_info:
        fock_oracle(op("b[i] b[j] b[k]"), 2)
    assert str(exc_info.value) == "Усечение 2 меньше степени выражения 3"


def test_sampler_is_deterministic() -> None:
    """Тестирование значений основных множителей"""
    first = CoreSampler(7)
    second = CoreSampler(7)
    assert first.value(Factor("sc")) == second.value(Factor("sc"))
    assert first.value(Factor("delta", ("a", "b"))) == 1.0


def test_relative_error() -> None:
    """Тестирование относительного расхождения"""
    left = np.eye(2)
    assert relative_error(left, left) == 0.0
    assert relative_error(left, 2 * left) == pytest.approx(np.sqrt(2) / np.sqrt(8))
