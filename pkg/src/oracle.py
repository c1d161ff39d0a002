import logging
import random
from fractions import Fraction
from math import factorial
from typing import Dict, List, Optional, Tuple

import numpy as np

from src.calculus import OperatorExpression, word_of
from src.exceptions import PreconditionError
from src.settings import DEFAULT_SEED
from src.tensors import Factor, Term

logger = logging.getLogger(__name__)

CoreKey = Tuple[str, str, int, int]


class CoreSampler:
    """
    Численные значения основных множителей при n = 1: все индексы равны, поэтому значение
    зависит только от вида, метки и числа производных
    Атрибуты:
        seed(int): Случайное зерно;
        values(dict): Уже выбранные значения (protected).
    Методы:
        value(self, factor) -> complex:
            Значение множителя
    """

    def __init__(self, seed: int = DEFAULT_SEED) -> None:
        self.seed = seed
        self._rng = random.Random(seed)
        self._values: Dict[CoreKey, complex] = {}

    def value(self, factor: Factor) -> complex:
        if factor.kind == "delta":
            return 1.0
        key = (factor.kind, factor.tag, len(factor.derivs), len(factor.bderivs))
        if key not in self._values:
            self._values[key] = float(Fraction(self._rng.randint(-9, 9), self._rng.randint(1, 5)))
        return self._values[key]


class FockSpace:
    """
    Усечённое пространство Фока при n = 1: векторы b^α(z^β e^{−π|z|²/2}), α + β ≤ size
    Атрибуты:
        size(int): Наибольшая суммарная степень;
        states(list): Пары (α, β);
        index(dict): Номер состояния по паре (α, β).
    Методы:
        letter(self, kind) -> np.ndarray:
            Матрица буквы в ненормированном базисе
        norms(self) -> np.ndarray:
            Квадраты норм базисных векторов
    """

    def __init__(self, size: int) -> None:
        self.size = size
        self.states = [(alpha, total - alpha) for total in range(size + 1) for alpha in range(total + 1)]
        self.index = {state: pos for pos, state in enumerate(self.states)}

    def _put(self, matrix: np.ndarray, target: Tuple[int, int], source: int, value: float) -> None:
        pos = self.index.get(target)
        if pos is not None and value:
            matrix[pos, source] += value

    def letter(self, kind: str) -> np.ndarray:
        """
        Действие буквы: b сдвигает α, z = z-сдвиг + 2α b^{α−1}, b⁺ = 4πα b^{α−1},
        z̄ = b/2π + (β/π) z^{β−1}
        """
        dim = len(self.states)
        matrix = np.zeros((dim, dim))
        for source, (alpha, beta) in enumerate(self.states):
            if kind == "b":
                self._put(matrix, (alpha + 1, beta), source, 1.0)
            elif kind == "z":
                self._put(matrix, (alpha, beta + 1), source, 1.0)
                self._put(matrix, (alpha - 1, beta), source, 2.0 * alpha)
            elif kind == "bp":
                self._put(matrix, (alpha - 1, beta), source, 4 * np.pi * alpha)
            elif kind == "zb":
                self._put(matrix, (alpha + 1, beta), source, 1 / (2 * np.pi))
                self._put(matrix, (alpha, beta - 1), source, beta / np.pi)
        return matrix

    def norms(self) -> np.ndarray:
        """‖b^α z^β ψ‖² = (4π)^α α! β!/π^β"""
        return np.array([(4 * np.pi) ** a * factorial(a) * factorial(b) / np.pi**b for a, b in self.states])


def _scalar(term: Term, sampler: CoreSampler, cores: Tuple[Factor, ...]) -> complex:
    value = complex(float(term.coef)) * np.pi**term.pi * (1j**term.i)
    for factor in cores:
        value *= sampler.value(factor)
    return value


def fock_oracle(expression: OperatorExpression, truncation: int, sampler: Optional[CoreSampler] = None) -> np.ndarray:
    """
    Матрица выражения в ортонормированном базисе усечённого пространства Фока при n = 1
    :param expression: Сумма слов (помеченных или нормально упорядоченных)
    :param truncation: Наибольшая суммарная степень α + β
    :param sampler: Значения основных множителей (по умолчанию с зерном DEFAULT_SEED)
    :return: Комплексная матрица
    :raise PreconditionError: Усечение меньше степени выражения
    """
    degree = expression.degree()
    if truncation < degree:
        raise PreconditionError(f"Усечение {truncation} меньше степени выражения {degree}")
    sampler = sampler or CoreSampler()
    space = FockSpace(truncation + degree)
    letters = {kind: space.letter(kind) for kind in ("b", "z", "zb", "bp")}
    dim = len(space.states)
    total = np.zeros((dim, dim), dtype=complex)
    for term in expression.raw_terms():
        cores, word = word_of(term)
        matrix = np.eye(dim, dtype=complex)
        for letter in word:
            matrix = matrix @ letters[letter.kind]
        total += _scalar(term, sampler, cores) * matrix
    keep: List[int] = [pos for pos, (a, b) in enumerate(space.states) if a + b <= truncation]
    block = total[np.ix_(keep, keep)]
    root = np.sqrt(space.norms()[keep])
    logger.debug("Оракул Фока: %d состояний, %d слов", len(keep), len(expression))
    return root[:, None] * block / root[None, :]


def relative_error(left: np.ndarray, right: np.ndarray) -> float:
    """Относительное расхождение матриц по норме Фробениуса"""
    scale = max(float(np.linalg.norm(left)), float(np.linalg.norm(right)), 1.0)
    return float(np.linalg.norm(left - right)) / scale
