"""
Выражения в вещественном репере e_i и их перевод в буквы b, b⁺, z, z̄.

Векторные аргументы:
    "X" - радиальное поле 𝓡 = Σ z_k ∂/∂z_k + z̄_k ∂/∂z̄_k;
    "z", "zb" - его голоморфная и антиголоморфная части;
    "e:k", "Je:k" - вектор репера e_k и J e_k (каждая метка встречается ровно дважды);
    "d:l", "db:l" - ∂/∂z_l и ∂/∂z̄_l с явной меткой.
"""

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

from src.calculus import OperatorExpression
from src.exceptions import StructuralError
from src.tensors import A, H, Factor, Term, parse_factors

logger = logging.getLogger(__name__)

_fresh = itertools.count()


def fresh_label(prefix: str = "k") -> str:
    """Новая глобально уникальная метка"""
    return f"{prefix}{next(_fresh)}"


@dataclass(frozen=True)
class T:
    """
    Тензор, вычисленный на векторах: ⟨R(u,v)w,x⟩, ric(u,v), R^E(u,v), sc, Δsc
    Атрибуты:
        kind(str): Вид тензора;
        args(tuple): Векторные аргументы;
        derivs(tuple): Направления ковариантных производных.
    """

    kind: str
    args: Tuple[str, ...] = ()
    derivs: Tuple[str, ...] = ()


@dataclass(frozen=True)
class Nabla:
    """Производная ∇_{0,vec}"""

    vec: str


@dataclass(frozen=True)
class Lap:
    """Модельный оператор 𝓛 = Σ b_j b⁺_j"""


@dataclass(frozen=True)
class Complex:
    """Множитель, записанный сразу в комплексных индексах (запись tp())"""

    text: str


@dataclass(frozen=True)
class DZ:
    """Производная ∂/∂Z по направлению vec от произведения items"""

    vec: str
    items: Tuple[Union[T, Complex], ...]


Item = Union[T, Nabla, Lap, Complex, DZ]

# число слотов тензоров, вычисляемых на векторах
_ARITY = {"R": 4, "ric": 2, "RE": 2, "sc": 0, "lapsc": 0}


class FrameTerm(NamedTuple):
    coef: Fraction
    pi: int
    i: int
    items: Tuple[Item, ...]


class RealFrameExpression:
    """
    Сумма произведений (слов) элементов вещественного репера
    Атрибуты:
        terms(tuple): Слагаемые FrameTerm.
    Методы:
        __add__, __sub__, __mul__:
            Сумма, разность и произведение (композиция слов)
        scale(self, coef, pi, i) -> RealFrameExpression:
            Умножение на скаляр
    """

    def __init__(self, terms: Iterable[FrameTerm] = ()) -> None:
        self.terms = tuple(terms)

    @classmethod
    def word(cls, *items: Item, coef: Union[int, str, Fraction] = 1, pi: int = 0, i: int = 0) -> "RealFrameExpression":
        return cls([FrameTerm(Fraction(coef), pi, i, tuple(items))])

    def __add__(self, other: "RealFrameExpression") -> "RealFrameExpression":
        return RealFrameExpression(self.terms + other.terms)

    def __neg__(self) -> "RealFrameExpression":
        return self.scale(-1)

    def __sub__(self, other: "RealFrameExpression") -> "RealFrameExpression":
        return self + (-other)

    def scale(self, coef: Union[int, str, Fraction] = 1, pi: int = 0, i: int = 0) -> "RealFrameExpression":
        return RealFrameExpression(
            FrameTerm(t.coef * Fraction(coef), t.pi + pi, t.i + i, t.items) for t in self.terms
        )

    def __mul__(self, other: "RealFrameExpression") -> "RealFrameExpression":
        return RealFrameExpression(
            FrameTerm(a.coef * b.coef, a.pi + b.pi, a.i + b.i, a.items + b.items)
            for a in self.terms
            for b in other.terms
        )

    def __len__(self) -> int:
        return len(self.terms)


def word(*items: Item, coef: Union[int, str, Fraction] = 1, pi: int = 0, i: int = 0) -> RealFrameExpression:
    return RealFrameExpression.word(*items, coef=coef, pi=pi, i=i)


def frame_sum(*parts: RealFrameExpression) -> RealFrameExpression:
    result = RealFrameExpression()
    for part in parts:
        result = result + part
    return result


class _Slot(NamedTuple):
    """Вхождение вектора после выбора типа: метка, тип, сателлит, множитель и степень √−1"""

    label: str
    typ: str
    sat: Optional[Factor]
    coef: int
    i: int


class _State(NamedTuple):
    coef: Fraction
    i: int
    cores: Tuple[Factor, ...]
    letters: Tuple[Factor, ...]


def _vectors(items: Sequence[Item]) -> List[str]:
    """Все векторные аргументы слова в порядке обхода"""
    result: List[str] = []
    for item in items:
        if isinstance(item, T):
            result.extend(item.args + item.derivs)
        elif isinstance(item, Nabla):
            result.append(item.vec)
        elif isinstance(item, DZ):
            result.append(item.vec)
            result.extend(_vectors(item.items))
    return result


def _frame_name(vec: str) -> Optional[str]:
    if vec.startswith("e:") or vec.startswith("Je:"):
        return vec.split(":", 1)[1]
    return None


def _choices(vectors: List[str]) -> Iterable[List[_Slot]]:
    """
    Все способы разложить вхождения по типам: 𝓡 независимо в каждом вхождении,
    пара e_k - как (∂_k, ∂̄_k) или (∂̄_k, ∂_k) с множителем 2
    :raise StructuralError: Метка репера встречается не дважды
    """
    pairs: Dict[str, List[int]] = {}
    free: List[int] = []
    for pos, vec in enumerate(vectors):
        name = _frame_name(vec)
        if name is not None:
            pairs.setdefault(name, []).append(pos)
        elif vec == "X":
            free.append(pos)
        elif vec not in ("z", "zb") and not vec.startswith("d:") and not vec.startswith("db:"):
            raise StructuralError(f"Неизвестный векторный аргумент {vec}")
    for name, positions in pairs.items():
        if len(positions) != 2:
            raise StructuralError(f"Индекс репера {name} встречается {len(positions)} раз вместо двух")
    pair_list = list(pairs.items())
    for xs in itertools.product((H, A), repeat=len(free)):
        for flips in itertools.product((False, True), repeat=len(pair_list)):
            types: Dict[int, str] = dict(zip(free, xs))
            for (name, (first, second)), flip in zip(pair_list, flips):
                types[first], types[second] = (A, H) if flip else (H, A)
            slots = []
            seen_pairs = set()
            for pos, vec in enumerate(vectors):
                name = _frame_name(vec)
                if vec == "X":
                    label = f"x{pos}"
                    typ = types[pos]
                    sat = Factor("z" if typ == H else "zb", (label,))
                    slots.append(_Slot(label, typ, sat, 1, 0))
                elif vec == "z":
                    label = f"x{pos}"
                    slots.append(_Slot(label, H, Factor("z", (label,)), 1, 0))
                elif vec == "zb":
                    label = f"x{pos}"
                    slots.append(_Slot(label, A, Factor("zb", (label,)), 1, 0))
                elif vec.startswith("d:"):
                    slots.append(_Slot(vec[2:], H, None, 1, 0))
                elif vec.startswith("db:"):
                    slots.append(_Slot(vec[3:], A, None, 1, 0))
                else:
                    typ = types[pos]
                    coef = 1 if name in seen_pairs else 2
                    seen_pairs.add(name)  # type: ignore[arg-type]
                    i_exp = 0
                    if vec.startswith("Je:"):
                        # J∂ = √−1 ∂, J∂̄ = −√−1 ∂̄
                        i_exp = 1 if typ == H else 3
                    slots.append(_Slot(f"e{name}", typ, None, coef, i_exp))
            yield slots


def _tensor(kind: str, slots: Sequence[_Slot], derivs: Sequence[_Slot]) -> Optional[Tuple[int, Factor]]:
    """
    Значение тензора на векторах заданных типов
    :return: Знак и множитель или None, если компонента равна нулю
    :raise StructuralError: Неизвестный вид или неверное число аргументов
    """
    if kind not in _ARITY:
        raise StructuralError(f"Неизвестный вид тензора {kind}")
    if len(slots) != _ARITY[kind]:
        raise StructuralError(f"Тензор {kind} ожидает {_ARITY[kind]} аргументов, получено {len(slots)}")
    hol = tuple(s.label for s in derivs if s.typ == H)
    antihol = tuple(s.label for s in derivs if s.typ == A)
    types = "".join(s.typ for s in slots)
    labels = [s.label for s in slots]
    if kind in ("sc", "lapsc"):
        return 1, Factor(kind, (), hol, antihol)
    if kind == "R":
        a, b, c, d = labels
        # ⟨R(u,v)w,x⟩ - (1,1)-форма по (u,v), типы (w,x) противоположны
        table = {
            "HAHA": (1, (a, b, c, d)),
            "AHHA": (-1, (b, a, c, d)),
            "HAAH": (-1, (a, b, d, c)),
            "AHAH": (1, (b, a, d, c)),
        }
        if types not in table:
            return None
        sign, order = table[types]
        return sign, Factor("R", order, hol, antihol)
    a, b = labels
    if types == "HA":
        return 1, Factor(kind, (a, b), hol, antihol)
    if types == "AH":
        return (1 if kind == "ric" else -1), Factor(kind, (b, a), hol, antihol)
    return None


def _take(slots: List[_Slot], count: int) -> Tuple[List[_Slot], List[_Slot]]:
    return slots[:count], slots[count:]


def _eval_items(items: Sequence[Item], slots: List[_Slot], states: List[_State]) -> Tuple[List[_State], List[_Slot]]:
    """Последовательная подстановка элементов слова; сателлиты и буквы копятся в порядке слова"""
    for item in items:
        if isinstance(item, T):
            args, slots = _take(slots, len(item.args))
            derivs, slots = _take(slots, len(item.derivs))
            value = _tensor(item.kind, args, derivs)
            if value is None:
                return [], slots
            sign, factor = value
            sats = tuple(s.sat for s in args + derivs if s.sat is not None)
            coef = sign
            i_exp = 0
            for s in args + derivs:
                coef *= s.coef
                i_exp += s.i
            states = [
                _State(st.coef * coef, st.i + i_exp, st.cores + (factor,), st.letters + sats) for st in states
            ]
        elif isinstance(item, Nabla):
            (slot,), slots = _take(slots, 1)
            if slot.sat is not None:
                raise StructuralError(f"Производная ∇ по полю {slot.label} не поддерживается")
            # ∇_{0,∂_k} = −b_k/2, ∇_{0,∂̄_k} = b⁺_k/2
            if slot.typ == H:
                letter, coef = Factor("b", (slot.label,)), Fraction(-1, 2)
            else:
                letter, coef = Factor("bp", (slot.label,)), Fraction(1, 2)
            states = [
                _State(st.coef * coef * slot.coef, st.i + slot.i, st.cores, st.letters + (letter,)) for st in states
            ]
        elif isinstance(item, Lap):
            label = fresh_label("j")
            letters = (Factor("b", (label,)), Factor("bp", (label,)))
            states = [st._replace(letters=st.letters + letters) for st in states]
        elif isinstance(item, Complex):
            factors = parse_factors(item.text)
            cores = tuple(f for f in factors if not f.is_sat)
            sats = tuple(f for f in factors if f.is_sat)
            states = [st._replace(cores=st.cores + cores, letters=st.letters + sats) for st in states]
        elif isinstance(item, DZ):
            (slot,), slots = _take(slots, 1)
            inner, slots = _eval_items(item.items, slots, [_State(Fraction(1), 0, (), ())])
            states = [
                _State(st.coef * d.coef * slot.coef, st.i + d.i + slot.i, st.cores + d.cores, st.letters + d.letters)
                for st in states
                for d in _differentiate(inner, slot)
            ]
        if not states:
            return [], slots
    return states, slots


def _differentiate(states: List[_State], slot: _Slot) -> List[_State]:
    """∂/∂z_j снимает z_x с δ(x, j), ∂/∂z̄_j снимает z̄_x с δ(j, x)"""
    target = "z" if slot.typ == H else "zb"
    result = []
    for st in states:
        for pos, sat in enumerate(st.letters):
            if sat.kind != target:
                continue
            x = sat.slots[0]
            delta = Factor("delta", (x, slot.label) if slot.typ == H else (slot.label, x))
            letters = st.letters[:pos] + st.letters[pos + 1 :]
            result.append(st._replace(cores=st.cores + (delta,), letters=letters))
    return result


def convert_frame(expression: RealFrameExpression) -> OperatorExpression:
    """
    Перевод выражения из вещественного репера в слова в буквах b, b⁺, z, z̄
    :param expression: Сумма слов в вещественном репере
    :return: Выражение с помеченными позициями букв (до нормального упорядочения)
    :raise StructuralError: Неизвестный тензор, неверное число аргументов или непарный индекс репера
    """
    raw: List[Term] = []
    for term in expression.terms:
        vectors = _vectors(term.items)
        for slots in _choices(vectors):
            states, rest = _eval_items(term.items, list(slots), [_State(term.coef, term.i, (), ())])
            for st in states:
                letters = tuple(f.with_tag(f"w{k:04d}") for k, f in enumerate(st.letters))
                raw.append(Term(st.coef, term.pi, 0, st.i, st.cores + letters))
    result = OperatorExpression.from_raw(raw)
    logger.debug("Перевод из вещественного репера: %d слов -> %d мономов", len(expression), len(result))
    return result
