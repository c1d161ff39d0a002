"""
Вычисление коэффициентов разложения: ядра J_r, значения Q_r(f)(0,0), Q_r(f,g)(0,0) и C_r(f,g).
"""

import logging
from fractions import Fraction
from math import factorial
from threading import RLock
from typing import Callable, Dict, List, Optional, Tuple

from src.calculus import (
    KernelPolynomial,
    adjoint,
    apply_to_P,
    compose,
    eval_origin,
    inv_L_perp,
    normal_order,
    operator_adjoint,
    project,
    summed,
)
from src.closed_forms import C1 as closed_C1
from src.closed_forms import C2 as closed_C2
from src.closed_forms import laplacian_of_pairing
from src.dictionary import leibniz, substitute
from src.exceptions import PreconditionError, StructuralError
from src.operators import ModelOperatorSet, build_operators, o2_normal_reference, o2_raw_reference
from src.relations import RelationSet, equal_mod_relations, expand_ric
from src.tensors import CORE_SLOTS, SAT_TYPES, Term, TensorPolynomial, max_int_label, shift_labels, tp

logger = logging.getLogger(__name__)

MAX_ORDER = 4
PRODUCT_TAG = "fg"
COMPOUND_TAG = "F"
# служебное имя C₁(f, g) при вычислении b_{1,C₁}
FIRST_COEFFICIENT_TAG = "Cfirst"

CoefficientFn = Callable[[int, str, str], TensorPolynomial]


def taylor_term(tag: str, order: int) -> KernelPolynomial:
    """
    Однородная часть ряда Тейлора Σ_{|α|=order} ∂^αf(0) Z^α/α! в переменных первого слота
    :param tag: Имя наблюдаемой
    :param order: Степень
    :return: Ядро P_order(f)·𝒫
    """
    parts = []
    for holo in range(order + 1):
        anti = order - holo
        hl = [f"a{k}" for k in range(holo)]
        al = [f"c{k}" for k in range(anti)]
        derivs = " ".join(hl + [x + "~" for x in al])
        sats = " ".join([f"z[{x}]" for x in hl] + [f"zb[{x}]" for x in al])
        text = f"{tag}[{derivs}] {sats}" if derivs else tag
        parts.append(tp(text, Fraction(1, factorial(holo) * factorial(anti)), cls=KernelPolynomial))
    return summed(parts)


def _check_tag(tag: str) -> None:
    if tag != "f" and (tag in SAT_TYPES or tag in CORE_SLOTS) or not tag.isalpha():
        raise StructuralError(f"Недопустимое имя наблюдаемой {tag}")


class CoefficientEngine:
    """
    Конвейер резольвенты модельного оператора и коэффициенты разложения
    Атрибуты:
        operators(ModelOperatorSet): Операторы 𝒪₂, 𝒪₃, 𝒪₄;
        P(KernelPolynomial): Ядро 𝒫.
    Методы:
        compute_F2(self) -> Tuple[KernelPolynomial, TensorPolynomial]:
            Ядро J₂ и его значение в начале координат
        f4_pieces(self) -> Dict[str, TensorPolynomial]:
            Слагаемые 𝓕₄(0,0) по отдельности
        compute_F4(self) -> TensorPolynomial:
            Значение 𝓕₄(0,0)
        J(self, r) -> KernelPolynomial:
            Ядро J_r
        q_kernel(self, tag, r) -> KernelPolynomial:
            Ядро Q_r(f)
        compute_Qf(self, tag, r) -> TensorPolynomial:
            Значение Q_r(f)(0,0)
        compute_Qfg(self, f, g, r) -> TensorPolynomial:
            Значение Q_r(f, g)(0,0)
        extract_C(self, r, f, g) -> TensorPolynomial:
            Коэффициент C_r(f, g)
    """

    def __init__(self, operators: Optional[ModelOperatorSet] = None) -> None:
        """
        Инициализация класса CoefficientEngine
        :param operators: Готовые операторы (по умолчанию build_operators())
        """
        self._operators = operators
        self.P = KernelPolynomial.one()
        self._stages: Dict[str, KernelPolynomial] = {}
        self._q_kernels: Dict[Tuple[str, int], KernelPolynomial] = {}
        self._q_values: Dict[Tuple[str, int], TensorPolynomial] = {}
        self._lock = RLock()

    @property
    def operators(self) -> ModelOperatorSet:
        with self._lock:
            if self._operators is None:
                self._operators = build_operators()
            return self._operators

    def _stage(self, name: str, build: Callable[[], KernelPolynomial]) -> KernelPolynomial:
        """Ядро этапа конвейера, вычисляемое один раз"""
        with self._lock:
            if name not in self._stages:
                self._stages[name] = build()
                logger.info("%s: %d мономов", name, len(self._stages[name]))
            return self._stages[name]

    @property
    def o2_kernel(self) -> KernelPolynomial:
        """𝒪₂𝒫"""
        return self._stage("O2P", lambda: apply_to_P(self.operators.O2, self.P))

    @property
    def K(self) -> KernelPolynomial:
        """𝓛⁻¹𝒫^⊥𝒪₂𝒫"""
        return self._stage("K", lambda: inv_L_perp(self.o2_kernel))

    @property
    def J2(self) -> KernelPolynomial:
        return self._stage("J2", lambda: -(self.K + adjoint(self.K)))

    @property
    def K3(self) -> KernelPolynomial:
        """𝓛⁻¹𝒫^⊥𝒪₃𝒫"""
        return self._stage("K3", lambda: inv_L_perp(apply_to_P(self.operators.O3, self.P)))

    @property
    def J3(self) -> KernelPolynomial:
        return self._stage("J3", lambda: -(self.K3 + adjoint(self.K3)))

    @property
    def T1(self) -> KernelPolynomial:
        """𝓛⁻¹𝒫^⊥𝒪₂𝓛⁻¹𝒫^⊥𝒪₂𝒫"""
        return self._stage("T1", lambda: inv_L_perp(apply_to_P(self.operators.O2, self.K)))

    @property
    def T2(self) -> KernelPolynomial:
        """−𝓛⁻¹𝒫^⊥𝒪₄𝒫"""
        return self._stage("T2", lambda: -inv_L_perp(apply_to_P(self.operators.O4, self.P)))

    def _assemble_J4(self) -> KernelPolynomial:
        sandwich = compose(self.K, adjoint(self.K))
        square = compose(adjoint(self.K), self.K)
        return self.T1 + adjoint(self.T1) + self.T2 + adjoint(self.T2) + sandwich - square

    @property
    def J4(self) -> KernelPolynomial:
        return self._stage("J4", self._assemble_J4)

    def projected_O2(self) -> KernelPolynomial:
        """𝒫𝒪₂𝒫"""
        return project(self.o2_kernel)

    def projected_J2(self) -> TensorPolynomial:
        """
        (𝒫J₂𝒫)(0,0) = ∫𝒫(0, Z′)J₂(Z′, 0)𝒫(Z′, 0)dZ′ = 𝒦[1, J₂](0,0) = −(𝒫𝒪₂𝓛⁻¹𝒫^⊥)(0,0)
        :return: Многочлен в индексной записи
        """
        return self._origin(self.P, self.J2)

    def compute_F2(self) -> Tuple[KernelPolynomial, TensorPolynomial]:
        """
        𝓕₂ = −𝓛⁻¹𝒫^⊥𝒪₂𝒫 − 𝒫𝒪₂𝓛⁻¹𝒫^⊥
        :return: Ядро J₂ и значение J₂(0,0)
        """
        return self.J2, eval_origin(self.J2)

    def f4_pieces(self) -> Dict[str, TensorPolynomial]:
        """
        Слагаемые 𝓕₄(0,0): итерированная резольвента, резольвента 𝒪₄, два произведения
        односторонних ядер и вклады 𝒪₄₁, ..., 𝒪₄₆ по отдельности
        """
        pieces = {
            "iterated": eval_origin(self.T1),
            "fourth": eval_origin(self.T2),
            "sandwich": eval_origin(compose(self.K, adjoint(self.K), zero_left=True, zero_right=True)),
            "square": eval_origin(compose(adjoint(self.K), self.K, zero_left=True, zero_right=True)),
        }
        for name, piece in self.operators.pieces.items():
            pieces[name] = eval_origin(-inv_L_perp(apply_to_P(piece, self.P)))
        return pieces

    def compute_F4(self) -> TensorPolynomial:
        """
        𝓕₄(0,0) по восьми слагаемым; два последних равны нулю, так как 𝒫𝒪₂𝒫 = 0
        :return: Значение 𝓕₄(0,0)
        :raise PreconditionError: 𝒫𝒪₂𝒫 ≠ 0 по модулю тождеств
        """
        vanishes, residue = equal(self.projected_O2(), TensorPolynomial.zero())
        if not vanishes:
            raise PreconditionError(f"𝒫𝒪₂𝒫 ≠ 0: {residue.render()}")
        pieces = self.f4_pieces()
        first = pieces["iterated"] + pieces["fourth"]
        value = first + first.conjugate() + pieces["sandwich"] - pieces["square"]
        logger.info("𝓕₄(0,0): %d мономов", len(value))
        return value

    def J4_consistency(self) -> Tuple[TensorPolynomial, TensorPolynomial]:
        """
        J₄(0,0) и 𝒦[1, J₄](0,0) + 𝒦[J₂, J₂](0,0) + 𝒦[J₄, 1](0,0)
        :return: Обе части тождества
        """
        lhs = eval_origin(self.J4)
        rhs = (
            eval_origin(compose(self.P, self.J4, zero_right=True))
            + eval_origin(compose(self.J2, self.J2, zero_left=True, zero_right=True))
            + eval_origin(compose(self.J4, self.P, zero_left=True))
        )
        return lhs, rhs

    def J(self, r: int) -> KernelPolynomial:
        """
        Ядро J_r: J₀ = 1, J₁ = 0
        :raise PreconditionError: r вне диапазона 0..4
        """
        if r == 0:
            return self.P
        if r == 1:
            return KernelPolynomial.zero()
        if r == 2:
            return self.J2
        if r == 3:
            return self.J3
        if r == 4:
            return self.J4
        raise PreconditionError(f"Порядок {r} вне диапазона 0..{MAX_ORDER}")

    def _splits(self, r: int) -> List[Tuple[int, int, int]]:
        return [(r1, r2, r - r1 - r2) for r1 in range(r + 1) for r2 in range(r + 1 - r1) if r1 != 1 and r2 != 1]

    def q_kernel(self, tag: str, r: int) -> KernelPolynomial:
        """
        Q_r(f) = Σ_{r₁+r₂+|α|=r} 𝒦[J_{r₁}, ∂^αf(0) Z^α/α! J_{r₂}]
        :param tag: Имя наблюдаемой
        :param r: Порядок, не больше 3 (для r = 4 используется compute_Qf)
        :return: Ядро Q_r(f)
        """
        _check_tag(tag)
        if r >= MAX_ORDER:
            raise PreconditionError(f"Полное ядро Q_{r} не строится, порядок больше {MAX_ORDER - 1}")
        key = (tag, r)
        with self._lock:
            if key not in self._q_kernels:
                parts = [compose(self.J(r1), taylor_term(tag, k) * self.J(r2)) for r1, r2, k in self._splits(r)]
                self._q_kernels[key] = summed(parts)
                logger.debug("Q_%d(%s): %d мономов", r, tag, len(self._q_kernels[key]))
            return self._q_kernels[key]

    def compute_Qf(self, tag: str, r: int) -> TensorPolynomial:
        """
        Значение Q_r(f)(0,0); b_{r/2,f} = Q_r(f)(0,0)
        :param tag: Имя наблюдаемой
        :param r: Порядок 0..4
        :return: Многочлен в индексной записи
        """
        _check_tag(tag)
        if r < 0 or r > MAX_ORDER:
            raise PreconditionError(f"Порядок {r} вне диапазона 0..{MAX_ORDER}")
        if r % 2:
            logger.info("Q_%d(%s)(0,0) = 0 по чётности", r, tag)
            return TensorPolynomial.zero()
        key = (tag, r)
        with self._lock:
            if key not in self._q_values:
                value = TensorPolynomial.zero()
                for r1, r2, k in self._splits(r):
                    kernel = compose(self.J(r1), taylor_term(tag, k) * self.J(r2), zero_left=True, zero_right=True)
                    value = value + eval_origin(kernel)
                self._q_values[key] = value
                logger.info("Q_%d(%s)(0,0): %d мономов", r, tag, len(value))
            return self._q_values[key]

    def _closed_J(self, r: int, left: bool) -> KernelPolynomial:
        """𝒦[1, J_r] (left) или 𝒦[J_r, 1]"""
        if r == 0:
            return self.P
        if left:
            return self._stage(f"PJ{r}", lambda: compose(self.P, self.J(r)))
        return self._stage(f"J{r}P", lambda: compose(self.J(r), self.P))

    def projected_Qf(self, tag: str, r: int, left: bool = True) -> TensorPolynomial:
        """
        𝒦[1, Q_r(f)](0,0) (left) или 𝒦[Q_r(f), 1](0,0). Для r = 4 ядро Q_r не строится:
        𝒦[1, 𝒦[J_{r₁}, P_k(f)J_{r₂}]] = 𝒦[𝒦[1, J_{r₁}], P_k(f)J_{r₂}] и симметрично справа
        :param tag: Имя наблюдаемой
        :param r: Порядок 0..4
        :param left: Единица слева
        :return: Многочлен в индексной записи
        """
        _check_tag(tag)
        if r < 0 or r > MAX_ORDER:
            raise PreconditionError(f"Порядок {r} вне диапазона 0..{MAX_ORDER}")
        if r % 2:
            return TensorPolynomial.zero()
        value = TensorPolynomial.zero()
        for r1, r2, k in self._splits(r):
            if left:
                value = value + self._origin(self._closed_J(r1, True), taylor_term(tag, k) * self.J(r2))
            else:
                value = value + self._origin(self.J(r1), compose(taylor_term(tag, k) * self.J(r2), self.P))
        logger.debug("𝒦[Q_%d(%s)] с единицей (%s): %d мономов", r, tag, "слева" if left else "справа", len(value))
        return value

    def compute_Qfg(self, f: str, g: str, r: int) -> TensorPolynomial:
        """
        Значение Q_r(f, g)(0,0) = Σ_{r₁+r₂=r} 𝒦[Q_{r₁}(f), Q_{r₂}(g)](0,0), Q₀(f) = f(x₀);
        крайние слагаемые f·𝒦[1, Q_r(g)](0,0) и 𝒦[Q_r(f), 1](0,0)·g
        :param f: Имя первой наблюдаемой
        :param g: Имя второй наблюдаемой
        :param r: Порядок 0..4
        :return: Многочлен в индексной записи
        """
        if r < 0 or r > MAX_ORDER:
            raise PreconditionError(f"Порядок {r} вне диапазона 0..{MAX_ORDER}")
        value = TensorPolynomial.zero()
        for r1 in range(r + 1):
            r2 = r - r1
            if r1 == 0:
                value = value + tp(f) * self.projected_Qf(g, r2, left=True)
            elif r2 == 0:
                value = value + self.projected_Qf(f, r1, left=False) * tp(g)
            else:
                kernel = compose(self.q_kernel(f, r1), self.q_kernel(g, r2), zero_left=True, zero_right=True)
                value = value + eval_origin(kernel)
        logger.info("Q_%d(%s, %s)(0,0): %d мономов", r, f, g, len(value))
        return value

    def _origin(self, first: KernelPolynomial, second: KernelPolynomial) -> TensorPolynomial:
        return eval_origin(compose(first, second, zero_left=True, zero_right=True))

    def second_order_kernel(self, tag: str) -> TensorPolynomial:
        """Σ_{|α|=2} 𝒦[1, ∂^αf Z^α/α! J₂](0,0)"""
        return self._origin(self.P, taylor_term(tag, 2) * self.J2)

    def fourth_order_taylor(self, tag: str) -> TensorPolynomial:
        """Σ_{|α|=4} 𝒦[1, ∂^αf Z^α/α!](0,0)"""
        return self._origin(self.P, taylor_term(tag, 4))

    def third_order_kernel(self, tag: str) -> TensorPolynomial:
        """Σ_{|α|=1} (𝒦[J₃, ∂^αf Z^α] + 𝒦[1, ∂^αf Z^α J₃])(0,0)"""
        first = taylor_term(tag, 1)
        return self._origin(self.J3, first) + self._origin(self.P, first * self.J3)

    def reduced_q2(self, tag: str) -> KernelPolynomial:
        """Q̃₂(f) = 𝒦[1, P₂(f)]"""
        return compose(self.P, taylor_term(tag, 2))

    def reduced_q3(self, tag: str) -> KernelPolynomial:
        """Q̃₃(g) = Q₃(g) − g J₃"""
        return self.q_kernel(tag, 3) - tp(tag, cls=KernelPolynomial) * self.J3

    def quartic_cross(self, f: str, g: str) -> TensorPolynomial:
        """𝒦[Q̃₂(f), Q̃₂(g)](0,0)"""
        return self._origin(self.reduced_q2(f), self.reduced_q2(g))

    def gradient_J2_cross(self, f: str, g: str) -> TensorPolynomial:
        """𝒦[Q₁(f), 𝒦[1, ∂g Z J₂]](0,0)"""
        inner = compose(self.P, taylor_term(g, 1) * self.J2)
        return self._origin(self.q_kernel(f, 1), inner)

    def gradient_third_cross(self, f: str, g: str) -> TensorPolynomial:
        """𝒦[Q₁(f), Q̃₃(g)](0,0)"""
        return self._origin(self.q_kernel(f, 1), self.reduced_q3(g))

    def b1_of(self, tag: str, value: TensorPolynomial, laplacian: TensorPolynomial) -> TensorPolynomial:
        """
        b_{1,F} для функции F с известными значением и лапласианом в x₀
        :param tag: Служебное имя F
        :param value: Значение F(x₀)
        :param laplacian: Значение ΔF(x₀)
        :return: Многочлен в индексной записи
        :raise StructuralError: В b_{1,F} встретилась производная F, отличная от следа гессиана
        """
        generic = self.compute_Qf(tag, 2)

        def replace(term: Term) -> List[Term]:
            pos = next((k for k, f in enumerate(term.factors) if f.kind == "f" and f.tag == tag), None)
            if pos is None:
                return [term]
            factor = term.factors[pos]
            if not factor.derivs and not factor.bderivs:
                return [term]
            if factor.derivs != factor.bderivs or len(factor.derivs) != 1:
                raise StructuralError(f"Неожиданная производная {tag} в b_1")
            rest = term.factors[:pos] + term.factors[pos + 1 :]
            offset = max_int_label(rest) + 1
            # F_{qq̄} = −ΔF/4
            return [
                Term(
                    term.coef * inner.coef / -4,
                    term.pi + inner.pi,
                    term.n + inner.n,
                    term.i + inner.i,
                    rest + shift_labels(inner.factors, offset),
                )
                for inner in laplacian.raw_terms()
            ]

        return substitute(generic.map_terms(replace), tag, value)

    def extract_C(self, r: int, f: str = "f", g: str = "g") -> TensorPolynomial:
        """
        C₀ = fg, C₁ = b_{1,f,g} − b_{1,fg}, C₂ = b_{2,f,g} − b_{2,fg} − b_{1,C₁}
        :param r: Порядок 0..2
        :param f: Имя первой наблюдаемой
        :param g: Имя второй наблюдаемой
        :return: C_r(f, g) в индексной записи
        """
        if r == 0:
            return tp(f"{f} {g}")
        c1 = self.compute_Qfg(f, g, 2) - leibniz(self.compute_Qf(PRODUCT_TAG, 2), PRODUCT_TAG, f, g)
        if r == 1:
            return c1
        if r != 2:
            raise PreconditionError(f"Порядок {r} вне диапазона 0..2")
        lap_c1 = laplacian_of_pairing(f, g).scale(Fraction(-1, 2), pi=-1)
        b1_c1 = self.b1_of(FIRST_COEFFICIENT_TAG, c1, lap_c1)
        return self.compute_Qfg(f, g, 4) - leibniz(self.compute_Qf(PRODUCT_TAG, 4), PRODUCT_TAG, f, g) - b1_c1


def star_C(k: int, first: str, second: str) -> TensorPolynomial:
    """C_k(f, g) в замкнутой форме, k = 0, 1, 2"""
    if k == 0:
        return tp(f"{first} {second}")
    if k == 1:
        return closed_C1(first, second)
    return closed_C2(first, second)


def associativity_defect(
    k: int, f: str = "f", g: str = "g", h: str = "h", coefficients: CoefficientFn = star_C
) -> TensorPolynomial:
    """
    Σ_{i+j=k} C_i(C_j(f,g), h) − Σ_{i+j=k} C_i(f, C_j(g,h)) для k ≤ 2
    :param coefficients: Источник C_k(a, b): замкнутые формы или CoefficientEngine.extract_C
    :return: Разность, нулевая для ассоциативного звёздочного произведения
    """
    if k > 2:
        raise PreconditionError(f"Ассоциативность проверяется до порядка 2, запрошен {k}")
    left = TensorPolynomial.zero()
    right = TensorPolynomial.zero()
    for i in range(k + 1):
        j = k - i
        left = left + substitute(coefficients(i, COMPOUND_TAG, h), COMPOUND_TAG, coefficients(j, f, g))
        right = right + substitute(coefficients(i, f, COMPOUND_TAG), COMPOUND_TAG, coefficients(j, g, h))
    return left - right


def antisymmetry_defect(
    first: TensorPolynomial, swapped: TensorPolynomial, bracket: TensorPolynomial
) -> TensorPolynomial:
    """C₁(f,g) − C₁(g,f) − √−1{f,g}"""
    return first - swapped - bracket.scale(1, i=1)


def equal(
    left: TensorPolynomial, right: TensorPolynomial, relations: Optional[RelationSet] = None
) -> Tuple[bool, TensorPolynomial]:
    """
    Сравнение по модулю тождеств после подстановки ric = 2R, sc = 8R
    :return: Признак равенства и остаток
    """
    return equal_mod_relations(expand_ric(left), expand_ric(right), relations)


def o2_routes(operators: Optional[ModelOperatorSet] = None) -> List[TensorPolynomial]:
    """
    Расхождения трёх записей 𝒪₂: вещественный репер против нормальной формы,
    упорядочение индексной записи против нормальной формы, 𝒪₂* против 𝒪₂
    :return: Список разностей, нулевых при согласии
    """
    operators = operators or build_operators()
    normal = o2_normal_reference()
    return [
        (expand_ric(operators.O2) - expand_ric(normal)).cast(TensorPolynomial),
        (normal_order(o2_raw_reference()) - normal).cast(TensorPolynomial),
        (operator_adjoint(operators.O2) - operators.O2).cast(TensorPolynomial),
    ]
