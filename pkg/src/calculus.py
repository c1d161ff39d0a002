"""
Исчисление модельного оператора на ℂⁿ.

Операторы - слова в буквах b, b⁺, z, z̄ (сателлиты b, bp, z, zb), ядра - многочлены
F(z, z̄, z′, z̄′)·𝒫 (сателлиты z, zb, zp, zbp). Буквы слова, записанного в произвольном
порядке, помечены позицией "w0000", "w0001", ...; слово без пометок считается
нормально упорядоченным: b слева, затем z и z̄, затем b⁺.
"""

import logging
from fractions import Fraction
from typing import Callable, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

from src.exceptions import PreconditionError, StructuralError
from src.tensors import (
    KERNEL_ADJOINT_SATS,
    OPERATOR_ADJOINT_SATS,
    Factor,
    Term,
    TensorPolynomial,
    contract,
    max_int_label,
    parse_factors,
    render_factor,
    shift_labels,
    tp,
)

logger = logging.getLogger(__name__)

LETTERS = ("b", "z", "zb", "bp")
KERNEL_VARIABLES = ("z", "zb", "zp", "zbp")
FIRST_SLOT = ("z", "zb")
SECOND_SLOT = ("zp", "zbp")

# порядок групп в нормальной форме
_GROUP = {"b": 0, "z": 1, "zb": 1, "bp": 2}
_WORD_TAG = "w{:04d}"
_OP_TAG = "op"
_HOLD_TAG = "hold"

StepFn = Callable[[Term, int], List[Term]]


class OperatorExpression(TensorPolynomial):
    """
    Сумма слов в буквах b_i, b⁺_i, z_i, z̄_i с тензорными коэффициентами
    Методы:
        is_normal(self) -> bool:
            Все слова записаны без пометок позиций (нормальная форма)
        degree(self) -> int:
            Наибольшая длина слова
        __matmul__(self, other) -> OperatorExpression:
            Композиция операторов (self применяется после other)
    """

    def is_normal(self) -> bool:
        return not any(f.is_sat and f.tag for term in self.raw_terms() for f in term.factors)

    def degree(self) -> int:
        return max((sum(1 for f in term.factors if f.is_sat) for term in self.raw_terms()), default=0)

    def __matmul__(self, other: "OperatorExpression") -> "OperatorExpression":
        raw = []
        for left in self.raw_terms():
            lcores, lletters = word_of(left)
            offset = max_int_label(left.factors) + 1
            for right in other.raw_terms():
                shifted = right._replace(factors=shift_labels(right.factors, offset))
                rcores, rletters = word_of(shifted)
                letters = tuple(f.with_tag(_WORD_TAG.format(k)) for k, f in enumerate(lletters + rletters))
                raw.append(
                    Term(
                        left.coef * right.coef,
                        left.pi + right.pi,
                        left.n + right.n,
                        left.i + right.i,
                        lcores + rcores + letters,
                    )
                )
        return OperatorExpression.from_raw(raw)


class KernelPolynomial(TensorPolynomial):
    """Ядро F(Z, Z′)·𝒫(Z, Z′): переменные z, z̄ (первый слот) и z′, z̄′ (второй слот)"""


class FockForm(TensorPolynomial):
    """Разложение Σ b^α z^β g(z′, z̄′)·𝒫 по собственному базису 𝓛; переменных z̄ нет"""


def op(text: str, coef: Union[int, Fraction, str] = 1, pi: int = 0, i: int = 0, n: int = 0) -> OperatorExpression:
    """
    Слово из текстовой записи, буквы нумеруются в порядке записи
    :param text: Запись вида "R[k m l q] bp[m] z[k] b[q] z[l]"
    :return: Выражение с помеченными позициями букв
    """
    letters = []
    cores = []
    for factor in parse_factors(text):
        if factor.is_sat:
            letters.append(factor.with_tag(_WORD_TAG.format(len(letters))))
        else:
            cores.append(factor)
    return OperatorExpression.from_raw([Term(Fraction(coef), pi, n, i, tuple(cores) + tuple(letters))])


def model_L() -> OperatorExpression:
    """𝓛 = Σ_j b_j b⁺_j"""
    return tp("b[j] bp[j]", cls=OperatorExpression)


def word_of(term: Term) -> Tuple[Tuple[Factor, ...], Tuple[Factor, ...]]:
    """
    Основные множители и буквы слова в порядке слова
    :raise StructuralError: Недопустимая буква или смешанная запись
    """
    cores = tuple(f for f in term.factors if not f.is_sat)
    letters = [f for f in term.factors if f.is_sat]
    for letter in letters:
        if letter.kind not in LETTERS:
            raise StructuralError(f"Недопустимая буква {render_factor(letter)} в слове оператора")
    tagged = [bool(f.tag) for f in letters]
    if any(tagged) and not all(tagged):
        raise StructuralError("Смешанная запись слова: часть букв без позиции")
    if any(tagged):
        letters.sort(key=lambda f: f.tag)
    else:
        letters.sort(key=lambda f: _GROUP[f.kind])
    return cores, tuple(letters)


def _push_letter(state: Term, letter: Factor) -> List[Term]:
    """Приписывает букву справа к нормально упорядоченному мешку букв"""
    factors = state.factors + (letter,)
    last = len(factors) - 1
    result = [state._replace(factors=factors)]
    if letter.kind == "zb":
        # [b⁺_j, z̄_i] = 2δ_ij
        for pos, factor in enumerate(state.factors):
            if factor.kind == "bp":
                n_add, rest = contract(factors, pos, last)
                result.append(Term(2 * state.coef, state.pi, state.n + n_add, state.i, rest))
    elif letter.kind == "b":
        # [z_j, b_i] = 2δ_ij, [b⁺_j, b_i] = 4πδ_ij
        for pos, factor in enumerate(state.factors):
            if factor.kind == "z":
                n_add, rest = contract(factors, pos, last)
                result.append(Term(2 * state.coef, state.pi, state.n + n_add, state.i, rest))
            elif factor.kind == "bp":
                n_add, rest = contract(factors, pos, last)
                result.append(Term(4 * state.coef, state.pi + 1, state.n + n_add, state.i, rest))
    return result


def normal_order(expression: OperatorExpression) -> OperatorExpression:
    """
    Нормальное упорядочение: b влево, b⁺ вправо, z и z̄ между ними
    :param expression: Сумма слов
    :return: Равное ему выражение в нормальной форме (буквы без пометок)
    """
    raw: List[Term] = []
    for term in expression.raw_terms():
        cores, letters = word_of(term)
        states = [Term(term.coef, term.pi, term.n, term.i, cores)]
        for letter in letters:
            states = [new for state in states for new in _push_letter(state, letter.with_tag(""))]
        raw.extend(states)
    result = OperatorExpression.from_raw(raw)
    logger.debug("Нормальное упорядочение: %d слов -> %d", len(expression), len(result))
    return result


def operator_adjoint(expression: OperatorExpression) -> OperatorExpression:
    """
    Формально сопряжённый оператор: слово читается справа налево, z ↔ z̄, b ↔ b⁺,
    коэффициенты сопрягаются
    :return: Сопряжённое выражение в нормальной форме
    """
    raw = []
    for term in expression.raw_terms():
        cores, letters = word_of(term)
        word = tuple(
            f.conjugate(OPERATOR_ADJOINT_SATS).with_tag(_WORD_TAG.format(k)) for k, f in enumerate(reversed(letters))
        )
        raw.append(
            Term(
                -term.coef if term.i % 2 else term.coef,
                term.pi,
                term.n,
                term.i,
                tuple(f.conjugate({}) for f in cores) + word,
            )
        )
    return normal_order(OperatorExpression.from_raw(raw))


def _check_kernel(kernel: TensorPolynomial) -> None:
    for term in kernel.raw_terms():
        for factor in term.factors:
            if factor.is_sat and factor.kind not in KERNEL_VARIABLES:
                raise StructuralError(f"Недопустимая переменная ядра {render_factor(factor)}")


def _replace(factors: Tuple[Factor, ...], pos: int, factor: Factor) -> Tuple[Factor, ...]:
    return factors[:pos] + (factor,) + factors[pos + 1 :]


def _apply_bp(term: Term, pos: int) -> List[Term]:
    """b⁺_x(G𝒫) = 2(∂G/∂z̄_x)𝒫"""
    result = []
    for k, factor in enumerate(term.factors):
        if factor.kind == "zb" and not factor.tag:
            n_add, rest = contract(term.factors, pos, k)
            result.append(Term(2 * term.coef, term.pi, term.n + n_add, term.i, rest))
    return result


def _apply_b(term: Term, pos: int) -> List[Term]:
    """b_x(G𝒫) = (−2∂G/∂z_x + 2π z̄_x G − 2π z̄′_x G)𝒫"""
    letter = term.factors[pos]
    result = []
    for k, factor in enumerate(term.factors):
        if factor.kind == "z" and not factor.tag:
            n_add, rest = contract(term.factors, k, pos)
            result.append(Term(-2 * term.coef, term.pi, term.n + n_add, term.i, rest))
    for kind, sign in (("zb", 2), ("zbp", -2)):
        factors = _replace(term.factors, pos, Factor(kind, letter.slots))
        result.append(Term(sign * term.coef, term.pi + 1, term.n, term.i, factors))
    return result


def _retag(term: Term, kinds: Sequence[str], old: str, new: str) -> Term:
    factors = tuple(f.with_tag(new) if f.kind in kinds and f.tag == old else f for f in term.factors)
    return term._replace(factors=factors)


def _first(term: Term, kind: str, tag: str) -> Optional[int]:
    return next((k for k, f in enumerate(term.factors) if f.kind == kind and f.tag == tag), None)


def _exhaust(poly: TensorPolynomial, kind: str, tag: str, step: StepFn) -> TensorPolynomial:
    """Применяет step к первому сателлиту вида kind с пометкой tag, пока такие остаются"""

    def apply(term: Term) -> List[Term]:
        pos = _first(term, kind, tag)
        return [term] if pos is None else step(term, pos)

    while any(_first(term, kind, tag) is not None for term in poly.raw_terms()):
        poly = poly.map_terms(apply)
    return poly


def apply_to_P(operator: OperatorExpression, kernel: KernelPolynomial) -> KernelPolynomial:
    """
    Действие нормально упорядоченного оператора на ядро F·𝒫 по первому слоту
    :param operator: Выражение в нормальной форме
    :param kernel: Ядро
    :return: Ядро operator(F·𝒫)
    :raise PreconditionError: Выражение не приведено к нормальной форме
    """
    if not operator.is_normal():
        raise PreconditionError("Оператор не приведён к нормальному порядку")
    _check_kernel(kernel)
    raw = []
    for oterm in operator.raw_terms():
        offset = max_int_label(oterm.factors) + 1
        factors = tuple(f.with_tag(_OP_TAG) if f.is_sat else f for f in oterm.factors)
        for kterm in kernel.raw_terms():
            raw.append(
                Term(
                    oterm.coef * kterm.coef,
                    oterm.pi + kterm.pi,
                    oterm.n + kterm.n,
                    oterm.i + kterm.i,
                    factors + shift_labels(kterm.factors, offset),
                )
            )
    poly = TensorPolynomial.from_raw(raw)
    poly = _exhaust(poly, "bp", _OP_TAG, _apply_bp)
    poly = poly.map_terms(lambda t: [_retag(t, FIRST_SLOT, _OP_TAG, "")])
    poly = _exhaust(poly, "b", _OP_TAG, _apply_b)
    return poly.cast(KernelPolynomial)


def _lower_zb(term: Term, pos: int) -> List[Term]:
    """z̄_x G𝒫 = (1/2π) b_x(G𝒫) + (1/π)(∂G/∂z_x)𝒫 + z̄′_x G𝒫"""
    letter = term.factors[pos]
    result = [
        Term(term.coef / 2, term.pi - 1, term.n, term.i, _replace(term.factors, pos, Factor("b", letter.slots))),
        Term(term.coef, term.pi, term.n, term.i, _replace(term.factors, pos, Factor("zbp", letter.slots))),
    ]
    with_dz = _replace(term.factors, pos, Factor("dz", letter.slots))
    for k, factor in enumerate(with_dz):
        if factor.kind == "z" and not factor.tag:
            n_add, rest = contract(with_dz, k, pos)
            result.append(Term(term.coef, term.pi - 1, term.n + n_add, term.i, rest))
    return result


def fock_form(kernel: KernelPolynomial) -> FockForm:
    """
    Разложение ядра по базису b^α(z^β g(z′, z̄′)𝒫)
    :param kernel: Ядро
    :return: Форма Фока без переменных z̄ первого слота
    """
    _check_kernel(kernel)
    poly = _exhaust(kernel.cast(TensorPolynomial), "zb", "", _lower_zb)
    return poly.cast(FockForm)


def expand_fock(form: FockForm) -> KernelPolynomial:
    """Обратный переход: буквы b применяются к z^β g 𝒫"""
    poly = form.map_terms(lambda t: [_retag(t, ("b",), "", _OP_TAG)])
    return _exhaust(poly.cast(TensorPolynomial), "b", _OP_TAG, _apply_b).cast(KernelPolynomial)


def _b_count(term: Term) -> int:
    return sum(1 for f in term.factors if f.kind == "b")


def project(kernel: KernelPolynomial) -> KernelPolynomial:
    """Левая проекция 𝒫·K: часть формы Фока с |α| = 0"""
    return fock_form(kernel).filter(lambda t: _b_count(t) == 0).cast(KernelPolynomial)


def project_perp(kernel: KernelPolynomial) -> KernelPolynomial:
    return kernel - project(kernel)


def inv_L_perp(kernel: KernelPolynomial) -> KernelPolynomial:
    """
    𝓛⁻¹𝒫^⊥: члены формы Фока с |α| > 0 делятся на 4π|α|, члены с |α| = 0 отбрасываются
    :param kernel: Ядро
    :return: Ядро 𝓛⁻¹𝒫^⊥K
    """

    def scale(term: Term) -> List[Term]:
        order = _b_count(term)
        if order == 0:
            return []
        return [term._replace(coef=term.coef / (4 * order), pi=term.pi - 1)]

    return expand_fock(fock_form(kernel).map_terms(scale))


def _matchings(left: int, right: int) -> Iterator[Tuple[Tuple[int, int], ...]]:
    """Все частичные паросочетания между left и right элементами"""

    def walk(k: int, used: frozenset, acc: Tuple[Tuple[int, int], ...]) -> Iterator[Tuple[Tuple[int, int], ...]]:
        if k == left:
            yield acc
            return
        yield from walk(k + 1, used, acc)
        for j in range(right):
            if j not in used:
                yield from walk(k + 1, used | {j}, acc + ((k, j),))

    return walk(0, frozenset(), ())


def _has_any(term: Term, kinds: Sequence[str]) -> bool:
    return any(f.kind in kinds for f in term.factors)


def compose(
    first: KernelPolynomial, second: KernelPolynomial, zero_left: bool = False, zero_right: bool = False
) -> KernelPolynomial:
    """
    Композиция (F𝒫)∘(G𝒫) = 𝒦[F,G]𝒫 по правилу Вика: u = a + z, ū = c + z̄′,
    ∫ a^μ c^ν e^{−πa·c} = δ_{μν} μ! π^{−|μ|}
    :param first: Левое ядро F𝒫
    :param second: Правое ядро G𝒫
    :param zero_left: Отбросить члены с переменными первого слота левого ядра
    :param zero_right: Отбросить члены с переменными второго слота правого ядра
    :return: Ядро композиции
    """
    _check_kernel(first)
    _check_kernel(second)
    lefts = [t for t in first.raw_terms() if not (zero_left and _has_any(t, FIRST_SLOT))]
    rights = [t for t in second.raw_terms() if not (zero_right and _has_any(t, SECOND_SLOT))]
    raw = []
    for left in lefts:
        offset = max_int_label(left.factors) + 1
        for right in rights:
            shifted = shift_labels(right.factors, offset)
            keep = tuple(f for f in left.factors if f.kind not in SECOND_SLOT) + tuple(
                f for f in shifted if f.kind not in FIRST_SLOT
            )
            holo = [f for f in left.factors if f.kind == "zp"] + [f for f in shifted if f.kind == "z"]
            anti = [f for f in left.factors if f.kind == "zbp"] + [f for f in shifted if f.kind == "zb"]
            for pairs in _matchings(len(holo), len(anti)):
                paired_h = {k for k, _ in pairs}
                paired_a = {j for _, j in pairs}
                factors = keep
                factors += tuple(Factor("z", f.slots) for k, f in enumerate(holo) if k not in paired_h)
                factors += tuple(Factor("zbp", f.slots) for j, f in enumerate(anti) if j not in paired_a)
                factors += tuple(Factor("delta", (holo[k].slots[0], anti[j].slots[0])) for k, j in pairs)
                raw.append(
                    Term(
                        left.coef * right.coef,
                        left.pi + right.pi - len(pairs),
                        left.n + right.n,
                        left.i + right.i,
                        factors,
                    )
                )
    return KernelPolynomial.from_raw(raw)


def _hold(factor: Factor) -> Factor:
    if factor.kind in FIRST_SLOT:
        return factor.with_tag(_HOLD_TAG)
    if factor.kind == "zp":
        return factor.with_kind("z")
    if factor.kind == "zbp":
        return factor.with_kind("zb")
    return factor


def compose_fock(first: KernelPolynomial, second: KernelPolynomial) -> KernelPolynomial:
    """
    Композиция через форму Фока: переменные второго слота левого ядра становятся
    переменными первого слота правого, затем берётся левая проекция
    :param first: Левое ядро
    :param second: Правое ядро
    :return: Ядро композиции
    """
    _check_kernel(first)
    _check_kernel(second)
    held = first.map_terms(lambda t: [t._replace(factors=tuple(_hold(f) for f in t.factors))])
    product = held.cast(TensorPolynomial) * second.cast(TensorPolynomial)
    projected = _exhaust(product, "zb", "", _lower_zb).filter(lambda t: _b_count(t) == 0)
    return projected.untag().cast(KernelPolynomial)


def adjoint(kernel: KernelPolynomial) -> KernelPolynomial:
    """K*(Z, Z′) = conj K(Z′, Z): z ↔ z̄′, z̄ ↔ z′, коэффициенты сопрягаются"""
    return kernel.conjugate(KERNEL_ADJOINT_SATS)


def eval_origin(kernel: TensorPolynomial) -> TensorPolynomial:
    """Значение ядра при Z = Z′ = 0 (𝒫(0, 0) = 1)"""
    return kernel.filter(lambda t: not any(f.is_sat for f in t.factors)).cast(TensorPolynomial)


def at_second_origin(kernel: KernelPolynomial) -> KernelPolynomial:
    """Ограничение ядра на Z′ = 0"""
    return kernel.filter(lambda t: not _has_any(t, SECOND_SLOT))


def at_first_origin(kernel: KernelPolynomial) -> KernelPolynomial:
    """Ограничение ядра на Z = 0"""
    return kernel.filter(lambda t: not _has_any(t, FIRST_SLOT))


def kernel_degree(kernel: TensorPolynomial) -> int:
    return max((sum(1 for f in t.factors if f.is_sat) for t in kernel.raw_terms()), default=0)


def summed(items: Iterable[KernelPolynomial]) -> KernelPolynomial:
    result = KernelPolynomial.zero()
    for item in items:
        result = result + item
    return result
