from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

RealField = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Observable:
    """
    Наблюдаемая из каталога модели
    Атрибуты:
        name(str): Имя;
        value(Callable): Значения в точках массива (k, 2);
        laplacian(Callable): Значения Δf, Δ = −Σ∇²_{e_i}.
    """

    name: str
    value: RealField
    laplacian: RealField


class ManifoldModel(ABC):
    """
    Абстрактный класс компактного кэлерова многообразия с предквантовым расслоением, E тривиально
    Атрибуты:
        name(str): Имя модели;
        n(int): Комплексная размерность;
        volume(float): Объём ∫ω^n/n!;
        chern_degree(int): ∫c₁(TX).
    Методы:
        dimension(self, p) -> int:
            Размерность H⁰(X, L^p)
        section_eval(self, p, points) -> np.ndarray:
            Значения базисных сечений в фиксированной локальной тривиализации
        weight(self, points, p) -> np.ndarray:
            Квадрат нормы h^{L^p} репера
        unitary_values(self, p, points) -> np.ndarray:
            Значения сечений в унитарном репере
        quadrature(self, p, order) -> Tuple[np.ndarray, np.ndarray]:
            Узлы и веса для ∫ · dv_X
        exact_gram(self, p) -> Optional[np.ndarray]:
            Замкнутая форма матрицы Грама, если известна
        sc(self, points) -> np.ndarray:
            Скалярная кривизна
        bracket(self, f, g) -> RealField:
            Скобка Пуассона {f, g} для 2πω
        pairs(self) -> List[Tuple[str, str]]:
            Пары наблюдаемых с известной скобкой
        gradient_dot(self, f, g) -> RealField:
            ∇f·∇g для пары каталога
    """

    name: str = ""
    n: int = 1
    volume: float = 1.0
    chern_degree: int = 0

    def __init__(self) -> None:
        self.observables: Dict[str, Observable] = {}
        self._brackets: Dict[Tuple[str, str], RealField] = {}
        self._dots: Dict[Tuple[str, str], RealField] = {}

    @abstractmethod
    def dimension(self, p: int) -> int:
        """Размерность пространства голоморфных сечений L^p"""
        pass

    @abstractmethod
    def section_eval(self, p: int, points: np.ndarray) -> np.ndarray:
        """Массив (k, dimension) значений базисных сечений"""
        pass

    @abstractmethod
    def weight(self, points: np.ndarray, p: int) -> np.ndarray:
        """Квадрат нормы репера L^p"""
        pass

    @abstractmethod
    def quadrature(self, p: int, order: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
        """Узлы (k, 2) и веса (k,), сумма весов равна объёму"""
        pass

    @abstractmethod
    def sc(self, points: np.ndarray) -> np.ndarray:
        """Скалярная кривизна в точках"""
        pass

    def exact_gram(self, p: int) -> Optional[np.ndarray]:
        return None

    def unitary_values(self, p: int, points: np.ndarray) -> np.ndarray:
        return self.section_eval(p, points) * np.sqrt(self.weight(points, p))[:, None]

    def observable(self, name: str) -> Observable:
        """
        Наблюдаемая из каталога
        :raise KeyError: Имени нет в каталоге
        """
        if name not in self.observables:
            raise KeyError(f"Наблюдаемая {name} отсутствует в каталоге модели {self.name}")
        return self.observables[name]

    def bracket(self, f: str, g: str) -> RealField:
        """
        Скобка Пуассона пары наблюдаемых каталога
        :raise KeyError: Скобка пары не задана
        """
        if f == g:
            return lambda points: np.zeros(len(points))
        if (f, g) in self._brackets:
            return self._brackets[(f, g)]
        if (g, f) in self._brackets:
            reverse = self._brackets[(g, f)]
            return lambda points: -reverse(points)
        raise KeyError(f"Скобка {{{f}, {g}}} не задана для модели {self.name}")

    def pairs(self) -> List[Tuple[str, str]]:
        """Пары наблюдаемых с известной скобкой"""
        return list(self._brackets)

    def gradient_dot(self, f: str, g: str) -> RealField:
        """
        Скалярное произведение градиентов ∇f·∇g пары каталога
        :raise KeyError: Значение для пары не задано
        """
        if (f, g) in self._dots:
            return self._dots[(f, g)]
        if (g, f) in self._dots:
            return self._dots[(g, f)]
        raise KeyError(f"∇{f}·∇{g} не задано для модели {self.name}")
