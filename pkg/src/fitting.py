import logging
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple, Union

import numpy as np

from src.exceptions import FitError

logger = logging.getLogger(__name__)

Sample = Tuple[int, Union[float, complex]]


@dataclass
class AsymptoticFit:
    """
    Результат подгонки p^{−n}·value ≈ Σ_{r ≤ max_order} a_r p^{−r}
    Атрибуты:
        samples(list): Пары (p, значение);
        coefficients(np.ndarray): a₀, ..., a_{max_order};
        residual(float): Норма невязки;
        condition(float): Число обусловленности матрицы плана.
    """

    samples: List[Sample]
    coefficients: np.ndarray = field(repr=False)
    residual: float
    condition: float

    def coefficient(self, r: int) -> Union[float, complex]:
        """a_r; за пределами подгонки 0"""
        if r >= len(self.coefficients):
            return 0.0
        value = self.coefficients[r]
        return complex(value) if np.iscomplexobj(self.coefficients) else float(value)


def fit(samples: Sequence[Sample], n: int = 1, max_order: int = 2) -> AsymptoticFit:
    """
    Подгонка асимптотического разложения методом наименьших квадратов
    :param samples: Пары (p, значение)
    :param n: Комплексная размерность
    :param max_order: Наибольшая степень p^{−r}
    :return: AsymptoticFit
    :raise FitError: Мало точек, повторяющиеся p или вырожденная матрица плана
    """
    ps = np.array([p for p, _ in samples], dtype=float)
    span = f"p ∈ [{int(ps.min()) if len(ps) else 0}, {int(ps.max()) if len(ps) else 0}]"
    if len(samples) < max_order + 2:
        raise FitError(f"Для порядка {max_order} нужно не меньше {max_order + 2} точек, {span}")
    if len(set(ps)) != len(ps):
        raise FitError(f"Повторяющиеся значения p, {span}")
    values = np.array([value for _, value in samples]) / ps**n
    design = ps[:, None] ** -np.arange(max_order + 1)[None, :]
    coefficients, _, rank, singular = np.linalg.lstsq(design, values, rcond=None)
    if rank < max_order + 1:
        raise FitError(f"Вырожденная матрица плана, {span}")
    residual = float(np.linalg.norm(design @ coefficients - values))
    condition = float(singular[0] / singular[-1])
    logger.debug("Подгонка %s: %s, невязка %.2e", span, coefficients, residual)
    return AsymptoticFit(list(samples), coefficients, residual, condition)


def loglog_slope(ps: Sequence[int], values: Sequence[float]) -> float:
    """
    Наклон прямой log value ~ log p
    :raise FitError: Меньше двух точек или неположительные значения
    """
    data = np.asarray(values, dtype=float)
    if len(ps) < 2 or np.any(data <= 0):
        raise FitError(f"Наклон в логарифмическом масштабе не определён для {len(ps)} точек")
    slope, _ = np.polyfit(np.log(np.asarray(ps, dtype=float)), np.log(data), 1)
    return float(slope)
