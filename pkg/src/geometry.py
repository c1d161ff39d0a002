"""
Численные ядра Бергмана, матрицы Тёплица и Q-оператор на CP¹ (Фубини–Штуди) и плоском квадратном торе.

Обе модели нормированы на объём 1. Норма ‖·‖ операторов - спектральная норма конечной матрицы Тёплица,
она совпадает с операторной нормой на образе P_p.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Callable, Optional, Tuple

import numpy as np
from scipy import linalg
from scipy.special import roots_legendre

from src.exceptions import PreconditionError, QuadratureError
from src.interfaces import ManifoldModel, Observable, RealField

logger = logging.getLogger(__name__)

# допуски самоконтроля квадратуры
GRAM_TOLERANCE = 1e-10
HERMITIAN_TOLERANCE = 1e-10

# число слагаемых тета-ряда по каждую сторону от нуля
THETA_TERMS = 6


class CP1(ManifoldModel):
    """
    Риманова сфера с метрикой Фубини–Штуди площади 1, L = 𝒪(1)
    Точки задаются парами (θ, φ), карта z = tg(θ/2)e^{iφ}, базис сечений z^j, j = 0..p.
    Атрибуты:
        name(str): "cp1";
        observables(dict): height = cos θ, x1 = sin θ cos φ, x2 = sin θ sin φ, one.
    Методы:
        section_eval(self, p, points, chart) -> np.ndarray:
            Значения z^j в северной карте или w^{p−j}, w = 1/z, в южной
    """

    name = "cp1"
    n = 1
    volume = 1.0
    chern_degree = 2
    scalar_curvature = 8 * np.pi

    def __init__(self) -> None:
        """Инициализация класса CP1"""
        super().__init__()
        eigen = 8 * np.pi
        self.observables = {
            "height": Observable("height", _height, lambda x: eigen * _height(x)),
            "x1": Observable("x1", _x1, lambda x: eigen * _x1(x)),
            "x2": Observable("x2", _x2, lambda x: eigen * _x2(x)),
            "one": Observable("one", lambda x: np.ones(len(x)), lambda x: np.zeros(len(x))),
        }
        # {ξ_a, ξ_b} = −2 ε_{abc} ξ_c
        self._brackets = {
            ("x1", "x2"): lambda x: -2 * _height(x),
            ("x2", "height"): lambda x: -2 * _x1(x),
            ("height", "x1"): lambda x: -2 * _x2(x),
        }
        # ∇ξ_a·∇ξ_b = 4π(δ_{ab} − ξ_a ξ_b)
        self._dots = {
            ("x1", "x2"): lambda x: -4 * np.pi * _x1(x) * _x2(x),
            ("x2", "height"): lambda x: -4 * np.pi * _x2(x) * _height(x),
            ("height", "x1"): lambda x: -4 * np.pi * _height(x) * _x1(x),
        }

    def dimension(self, p: int) -> int:
        return p + 1

    @staticmethod
    def chart(points: np.ndarray) -> np.ndarray:
        """Координата z = tg(θ/2)e^{iφ}"""
        return np.tan(points[:, 0] / 2) * np.exp(1j * points[:, 1])

    def section_eval(self, p: int, points: np.ndarray, chart: str = "north") -> np.ndarray:
        powers = np.arange(p + 1)
        z = self.chart(points)
        if chart == "south":
            return (1 / z)[:, None] ** (p - powers)[None, :]
        return z[:, None] ** powers[None, :]

    def weight(self, points: np.ndarray, p: int, chart: str = "north") -> np.ndarray:
        z = self.chart(points)
        if chart == "south":
            z = 1 / z
        return (1 + np.abs(z) ** 2) ** (-p)

    def unitary_values(self, p: int, points: np.ndarray, chart: str = "north") -> np.ndarray:
        return self.section_eval(p, points, chart) * np.sqrt(self.weight(points, p, chart))[:, None]

    def quadrature(self, p: int, order: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
        """
        Гаусс–Лежандр по cos θ и равномерная сетка по φ
        :param p: Уровень
        :param order: Порядок, не меньше 2p + 16
        :return: Узлы (θ, φ) и веса с суммой 1
        """
        order = max(order or 0, 2 * p + 16)
        t, wt = roots_legendre(order)
        phi = 2 * np.pi * np.arange(order) / order
        theta = np.arccos(t)
        grid_t, grid_phi = np.meshgrid(theta, phi, indexing="ij")
        weights = np.outer(wt / 2, np.full(order, 1 / order))
        return np.column_stack([grid_t.ravel(), grid_phi.ravel()]), weights.ravel()

    def exact_gram(self, p: int) -> Optional[np.ndarray]:
        """⟨z^j, z^j⟩ = j!(p−j)!/(p+1)!"""
        return np.diag([factorial(j) * factorial(p - j) / factorial(p + 1) for j in range(p + 1)])

    def sc(self, points: np.ndarray) -> np.ndarray:
        return np.full(len(points), self.scalar_curvature)


def _height(points: np.ndarray) -> np.ndarray:
    return np.cos(points[:, 0])


def _x1(points: np.ndarray) -> np.ndarray:
    return np.sin(points[:, 0]) * np.cos(points[:, 1])


def _x2(points: np.ndarray) -> np.ndarray:
    return np.sin(points[:, 0]) * np.sin(points[:, 1])


class Torus(ManifoldModel):
    """
    Плоский тор ℂ/(ℤ + √−1ℤ), ω = dx∧dy, вес репера e^{−2πp y²}
    Базис: θ_j(z) = Σ_n exp(−πp m² + 2π√−1 p m z), m = n + j/p, j = 0..p−1.
    Атрибуты:
        name(str): "torus";
        observables(dict): cos_x, cos_y, sin_x, sin_y, one.
    """

    name = "torus"
    n = 1
    volume = 1.0
    chern_degree = 0

    def __init__(self) -> None:
        """Инициализация класса Torus"""
        super().__init__()
        two_pi = 2 * np.pi
        self.observables = {
            "cos_x": _wave("cos_x", np.cos, 0),
            "cos_y": _wave("cos_y", np.cos, 1),
            "sin_x": _wave("sin_x", np.sin, 0),
            "sin_y": _wave("sin_y", np.sin, 1),
            "one": Observable("one", lambda x: np.ones(len(x)), lambda x: np.zeros(len(x))),
        }
        # {f, g} = −(1/2π)(f_x g_y − f_y g_x)
        self._brackets = {
            ("cos_x", "cos_y"): lambda x: -two_pi * np.sin(two_pi * x[:, 0]) * np.sin(two_pi * x[:, 1]),
            ("cos_x", "sin_y"): lambda x: two_pi * np.sin(two_pi * x[:, 0]) * np.cos(two_pi * x[:, 1]),
            ("sin_x", "cos_y"): lambda x: two_pi * np.cos(two_pi * x[:, 0]) * np.sin(two_pi * x[:, 1]),
        }
        # у пар со скобкой градиенты ортогональны
        self._dots = {pair: (lambda x: np.zeros(len(x))) for pair in self._brackets}

    def dimension(self, p: int) -> int:
        return p

    def _theta_sum(self, p: int, points: np.ndarray, shift: float) -> np.ndarray:
        """Σ_n exp(−πp(m + y)² + 2π√−1 p m x + shift·πp y²), m = n + j/p"""
        x = points[:, 0][:, None, None]
        y = points[:, 1][:, None, None]
        m = (np.arange(-THETA_TERMS, THETA_TERMS + 1)[None, None, :] + np.arange(p)[None, :, None] / p)
        terms = np.exp(-np.pi * p * (m + y) ** 2 + shift * np.pi * p * y**2 + 2j * np.pi * p * m * x)
        return terms.sum(axis=2)

    def section_eval(self, p: int, points: np.ndarray) -> np.ndarray:
        return self._theta_sum(p, points, 1.0)

    def weight(self, points: np.ndarray, p: int) -> np.ndarray:
        return np.exp(-2 * np.pi * p * points[:, 1] ** 2)

    def unitary_values(self, p: int, points: np.ndarray) -> np.ndarray:
        return self._theta_sum(p, points, 0.0)

    def quadrature(self, p: int, order: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
        """
        Равномерная сетка N×N на [0, 1)²
        :param p: Уровень
        :param order: N, не меньше 4p + 16
        :return: Узлы (x, y) и веса 1/N²
        """
        order = max(order or 0, 4 * p + 16)
        grid = np.arange(order) / order
        gx, gy = np.meshgrid(grid, grid, indexing="ij")
        return np.column_stack([gx.ravel(), gy.ravel()]), np.full(order * order, 1 / order**2)

    def exact_gram(self, p: int) -> Optional[np.ndarray]:
        """‖θ_j‖² = 1/√(2p), базис ортогонален"""
        return np.eye(p) / np.sqrt(2 * p)

    def sc(self, points: np.ndarray) -> np.ndarray:
        return np.zeros(len(points))


def _wave(name: str, func: Callable[[np.ndarray], np.ndarray], axis: int) -> Observable:
    """func(2πx) или func(2πy), Δ = 4π²"""

    def value(points: np.ndarray) -> np.ndarray:
        return func(2 * np.pi * points[:, axis])

    return Observable(name, value, lambda points: 4 * np.pi**2 * value(points))


def fourier_mode(m: int, n: int) -> RealField:
    """Функция e^{2π√−1(mx + ny)} на торе"""
    return lambda x: np.exp(2j * np.pi * (m * x[:, 0] + n * x[:, 1]))


MODELS = {"cp1": CP1, "torus": Torus}


def make_model(name: str) -> ManifoldModel:
    """
    Модель по имени
    :raise PreconditionError: Неизвестная модель
    """
    if name not in MODELS:
        raise PreconditionError(f"Неизвестная модель {name}, доступны: {', '.join(sorted(MODELS))}")
    return MODELS[name]()


@dataclass
class LevelData:
    """
    Данные уровня p: узлы квадратуры, веса и ортонормированный базис в узлах
    Атрибуты:
        p(int): Уровень;
        nodes(np.ndarray): Узлы;
        weights(np.ndarray): Веса;
        coefficients(np.ndarray): Переход к ортонормированному базису;
        values(np.ndarray): Значения ортонормированного базиса в узлах.
    """

    p: int
    nodes: np.ndarray
    weights: np.ndarray
    coefficients: np.ndarray
    values: np.ndarray


@dataclass
class ToeplitzData:
    """
    Матрица оператора Тёплица в ортонормированном базисе
    Атрибуты:
        p(int): Уровень;
        matrix(np.ndarray): Матрица ⟨s_i, f s_j⟩.
    """

    p: int
    matrix: np.ndarray


def gram(model: ManifoldModel, p: int, order: Optional[int] = None) -> np.ndarray:
    """
    Матрица Грама базиса сечений по квадратуре
    :param model: Модель
    :param p: Уровень
    :param order: Порядок квадратуры
    :return: Эрмитова матрица
    :raise QuadratureError: Расхождение с замкнутой формой
    """
    nodes, weights = model.quadrature(p, order)
    values = model.unitary_values(p, nodes)
    matrix = values.conj().T @ (weights[:, None] * values)
    exact = model.exact_gram(p)
    if exact is not None:
        gap = float(np.max(np.abs(matrix - exact)))
        if gap > GRAM_TOLERANCE:
            raise QuadratureError(
                f"Грам {model.name} при p = {p} расходится с замкнутой формой на {gap:.2e}, "
                f"увеличьте порядок квадратуры до {2 * len(weights) ** 0.5:.0f}"
            )
    return matrix


def orthonormal_basis(model: ManifoldModel, p: int, order: Optional[int] = None) -> np.ndarray:
    """
    Коэффициенты C ортонормированного базиса: CᴴGC = I, C = L⁻ᴴ при G = LLᴴ
    :raise QuadratureError: Грам не положительно определён
    """
    matrix = gram(model, p, order)
    try:
        lower = linalg.cholesky(matrix, lower=True)
    except linalg.LinAlgError:
        suggested = 2 * (order or 2 * p + 16)
        raise QuadratureError(f"Грам {model.name} при p = {p} не положительно определён, порядок {suggested}")
    return linalg.solve_triangular(lower, np.eye(len(matrix)), lower=True).conj().T


def level_data(model: ManifoldModel, p: int, order: Optional[int] = None) -> LevelData:
    """Квадратура и ортонормированный базис уровня p"""
    if p < 0 or model.dimension(p) == 0:
        raise PreconditionError(f"Пространство сечений {model.name} при p = {p} пусто")
    nodes, weights = model.quadrature(p, order)
    coefficients = orthonormal_basis(model, p, order)
    values = model.unitary_values(p, nodes) @ coefficients
    logger.debug("%s, p = %d: %d узлов", model.name, p, len(weights))
    return LevelData(p, nodes, weights, coefficients, values)


def bergman_density(model: ManifoldModel, p: int, x: np.ndarray, data: Optional[LevelData] = None) -> np.ndarray:
    """
    Плотность Бергмана P_p(x, x) = Σ_i |s_i(x)|² в точках x
    :return: Вещественный массив
    """
    data = data or level_data(model, p)
    values = model.unitary_values(p, x) @ data.coefficients
    return np.sum(np.abs(values) ** 2, axis=1)


def bergman_kernel(
    model: ManifoldModel, p: int, x: np.ndarray, y: np.ndarray, data: Optional[LevelData] = None
) -> np.ndarray:
    """
    Ядро Бергмана P_p(x, y) в унитарном репере; от выбора репера зависит только фаза
    :return: Комплексная матрица (len(x), len(y))
    """
    data = data or level_data(model, p)
    left = model.unitary_values(p, x) @ data.coefficients
    right = model.unitary_values(p, y) @ data.coefficients
    return left @ right.conj().T


def toeplitz(model: ManifoldModel, p: int, f: RealField, data: Optional[LevelData] = None) -> ToeplitzData:
    """
    Матрица T_{f,p} = P_p f P_p
    :param f: Функция в точках
    :raise QuadratureError: Матрица вещественной наблюдаемой не эрмитова
    """
    data = data or level_data(model, p)
    values = f(data.nodes)
    matrix = data.values.conj().T @ ((data.weights * values)[:, None] * data.values)
    if np.isrealobj(values):
        gap = float(np.max(np.abs(matrix - matrix.conj().T), initial=0.0))
        if gap > HERMITIAN_TOLERANCE:
            raise QuadratureError(f"T_f при p = {p} не эрмитова: {gap:.2e}")
    return ToeplitzData(p, matrix)


def toeplitz_diag(
    model: ManifoldModel, p: int, f: RealField, x: np.ndarray, data: Optional[LevelData] = None
) -> np.ndarray:
    """Ядро T_{f,p} на диагонали"""
    data = data or level_data(model, p)
    operator = toeplitz(model, p, f, data)
    values = model.unitary_values(p, x) @ data.coefficients
    return np.einsum("ki,ij,kj->k", values, operator.matrix, values.conj())


def product_diag(
    model: ManifoldModel, p: int, f: RealField, g: RealField, x: np.ndarray, data: Optional[LevelData] = None
) -> np.ndarray:
    """Ядро T_{f,p}∘T_{g,p} на диагонали: Σ_{ij}(T_f T_g)_{ij} s_i(x) s̄_j(x)"""
    data = data or level_data(model, p)
    product = toeplitz(model, p, f, data).matrix @ toeplitz(model, p, g, data).matrix
    values = model.unitary_values(p, x) @ data.coefficients
    return np.einsum("ki,ij,kj->k", values, product, values.conj())


def operator_norm(operator: ToeplitzData) -> float:
    """Наибольшее по модулю собственное значение эрмитовой матрицы"""
    if operator.matrix.size == 0:
        return 0.0
    return float(np.max(np.abs(linalg.eigvalsh(operator.matrix))))


def commutator_defect(model: ManifoldModel, p: int, f: str, g: str, data: Optional[LevelData] = None) -> float:
    """
    ‖(p/√−1)[T_f, T_g] − T_{{f,g}}‖ в спектральной норме
    :param f: Имя наблюдаемой каталога
    :param g: Имя наблюдаемой каталога
    """
    data = data or level_data(model, p)
    tf = toeplitz(model, p, model.observable(f).value, data).matrix
    tg = toeplitz(model, p, model.observable(g).value, data).matrix
    tb = toeplitz(model, p, model.bracket(f, g), data).matrix
    defect = (p / 1j) * (tf @ tg - tg @ tf) - tb
    return float(np.linalg.norm(defect, 2))


def q_apply(model: ManifoldModel, p: int, f: RealField, x: np.ndarray, data: Optional[LevelData] = None) -> np.ndarray:
    """
    (1/p^n)∫|P_p(x, y)|² f(y) dv_X(y)
    :return: Значения в точках x
    """
    data = data or level_data(model, p)
    kernel = np.abs(bergman_kernel(model, p, x, data.nodes, data)) ** 2
    return (kernel @ (data.weights * f(data.nodes))) / p**model.n


def q_expected(model: ManifoldModel, p: int, observable: Observable, x: np.ndarray) -> np.ndarray:
    """f − (1/8πp)(−sc·f + 2Δf)"""
    value = observable.value(x)
    return value - (-model.sc(x) * value + 2 * observable.laplacian(x)) / (8 * np.pi * p)


def riemann_roch_check(model: ManifoldModel, p: int) -> Tuple[int, Fraction]:
    """
    dim H⁰(X, L^p) и p∫ω + (1/2)∫c₁(X) для кривой
    :raise PreconditionError: p < 1
    """
    if p < 1:
        raise PreconditionError(f"Проверка Римана–Роха требует p ≥ 1, получено {p}")
    predicted = p * Fraction(model.volume).limit_denominator() + Fraction(model.chern_degree, 2)
    return model.dimension(p), predicted
