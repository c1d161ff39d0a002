"""
Точное кольцо коэффициентов: индексные символы кривизны и производных наблюдаемых,
канонизация немых индексов и многочлены с рациональными коэффициентами.

Метки индексов: int - немой (свёрнутый) индекс после канонизации, str - свободный.
В термах, собранных вручную, метка, встречающаяся дважды, считается свёрнутой.
"""

import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from typing import Callable, Dict, Iterable, Iterator, List, Mapping, NamedTuple, Optional, Tuple, Type, TypeVar, Union

from src.exceptions import StructuralError

logger = logging.getLogger(__name__)

Label = Union[int, str]
LabelKey = Tuple[int, Union[int, str]]

H = "H"
A = "A"

# типы слотов основных множителей
CORE_SLOTS: Dict[str, Tuple[str, ...]] = {
    "R": (H, A, H, A),
    "ric": (H, A),
    "RE": (H, A),
    "sc": (),
    "lapsc": (),
    "f": (),
    "delta": (A, H),
}

# тип единственного слота у переменных ядра и букв операторов
SAT_TYPES: Dict[str, str] = {
    "z": A,
    "zb": H,
    "zp": A,
    "zbp": H,
    "b": H,
    "bp": A,
    "a": A,
    "c": H,
    "dz": H,
    "dzb": A,
}

CURVATURE_KINDS = ("R", "ric", "RE")
MAX_CURVATURE_DERIVS = 2
MAX_OBSERVABLE_DERIVS = 4

# сопряжение переменных при взятии сопряжённого ядра и сопряжённого оператора
KERNEL_ADJOINT_SATS = {"z": "zbp", "zbp": "z", "zb": "zp", "zp": "zb", "b": "bp", "bp": "b"}
OPERATOR_ADJOINT_SATS = {"z": "zb", "zb": "z", "b": "bp", "bp": "b"}


@dataclass(frozen=True)
class Factor:
    """
    Множитель монома: тензор кривизны, производная наблюдаемой, дельта-символ
    или переменная (сателлит) с одним индексом.
    Атрибуты:
        kind(str): Вид множителя (R, ric, RE, sc, lapsc, f, delta или вид сателлита);
        slots(tuple): Индексы слотов;
        derivs(tuple): Голоморфные индексы ковариантных производных;
        bderivs(tuple): Антиголоморфные индексы ковариантных производных;
        tag(str): Имя наблюдаемой для f, служебная метка для сателлитов.
    """

    kind: str
    slots: Tuple[Label, ...] = ()
    derivs: Tuple[Label, ...] = ()
    bderivs: Tuple[Label, ...] = ()
    tag: str = ""

    @property
    def is_sat(self) -> bool:
        return self.kind in SAT_TYPES

    def occurrences(self) -> List[Tuple[Label, str]]:
        """Все вхождения индексов с их типом"""
        if self.kind in SAT_TYPES:
            return [(self.slots[0], SAT_TYPES[self.kind])]
        result = list(zip(self.slots, CORE_SLOTS.get(self.kind, ())))
        result.extend((label, H) for label in self.derivs)
        result.extend((label, A) for label in self.bderivs)
        return result

    def labels(self) -> Tuple[Label, ...]:
        return self.slots + self.derivs + self.bderivs

    def rename(self, mapping: Mapping[Label, Label]) -> "Factor":
        if not mapping:
            return self
        return Factor(
            self.kind,
            tuple(mapping.get(label, label) for label in self.slots),
            tuple(mapping.get(label, label) for label in self.derivs),
            tuple(mapping.get(label, label) for label in self.bderivs),
            self.tag,
        )

    def with_tag(self, tag: str) -> "Factor":
        return Factor(self.kind, self.slots, self.derivs, self.bderivs, tag)

    def with_kind(self, kind: str) -> "Factor":
        return Factor(kind, self.slots, self.derivs, self.bderivs, self.tag)

    def conjugate(self, sat_map: Mapping[str, str]) -> "Factor":
        """Комплексное сопряжение множителя; сателлиты переименовываются по sat_map"""
        if self.kind in SAT_TYPES:
            return Factor(sat_map.get(self.kind, self.kind), self.slots, (), (), self.tag)
        if self.kind == "R":
            a, b, c, d = self.slots
            slots: Tuple[Label, ...] = (b, a, d, c)
        elif self.kind in ("ric", "RE", "delta"):
            slots = (self.slots[1], self.slots[0])
        else:
            slots = self.slots
        return Factor(self.kind, slots, self.bderivs, self.derivs, self.tag)


class Term(NamedTuple):
    """Сырой моном: коэффициент, степени π, n и √−1, множители"""

    coef: Fraction
    pi: int
    n: int
    i: int
    factors: Tuple[Factor, ...]


MonomialKey = Tuple[int, int, int, Tuple[Factor, ...]]
TermMap = Callable[[Term], Iterable[Term]]
TermPredicate = Callable[[Term], bool]


def label_key(label: Label) -> LabelKey:
    return (0, label) if isinstance(label, int) else (1, label)


def factor_key(factor: Factor) -> Tuple:
    return (
        factor.kind,
        factor.tag,
        tuple(label_key(x) for x in factor.slots),
        tuple(label_key(x) for x in factor.derivs),
        tuple(label_key(x) for x in factor.bderivs),
    )


def monomial_sort_key(key: MonomialKey) -> Tuple:
    return (len(key[3]), tuple(factor_key(f) for f in key[3]), key[0], key[1], key[2])


def render_label(label: Label) -> str:
    return f"_{label}" if isinstance(label, int) else str(label)


def render_factor(factor: Factor) -> str:
    """Текстовая запись множителя в нотации tp()"""
    name = factor.tag if factor.kind == "f" else factor.kind
    inner = " ".join(render_label(x) for x in factor.slots)
    derivs = [render_label(x) for x in factor.derivs] + [render_label(x) + "~" for x in factor.bderivs]
    if derivs:
        inner = f"{inner} ; {' '.join(derivs)}" if inner else " ".join(derivs)
    text = f"{name}[{inner}]" if inner else name
    if factor.kind in SAT_TYPES and factor.tag:
        text += f"@{factor.tag}"
    return text


def max_int_label(factors: Iterable[Factor]) -> int:
    result = -1
    for factor in factors:
        for label in factor.labels():
            if isinstance(label, int) and label > result:
                result = label
    return result


def shift_labels(factors: Iterable[Factor], offset: int) -> Tuple[Factor, ...]:
    """Сдвиг немых индексов на offset"""
    result = []
    for factor in factors:
        mapping = {label: label + offset for label in factor.labels() if isinstance(label, int)}
        result.append(factor.rename(mapping))
    return tuple(result)


def rename_all(factors: Iterable[Factor], mapping: Mapping[Label, Label]) -> Tuple[Factor, ...]:
    return tuple(factor.rename(mapping) for factor in factors)


def count_label(factors: Iterable[Factor], label: Label) -> int:
    return sum(factor.labels().count(label) for factor in factors)


def contract(factors: Tuple[Factor, ...], ia: int, ih: int) -> Tuple[int, Tuple[Factor, ...]]:
    """
    Свёртка пары сателлитов: удаляет их и склеивает индексы (δ-символ)
    :param factors: Множители монома
    :param ia: Позиция сателлита с индексом типа A
    :param ih: Позиция сателлита с индексом типа H
    :return: Прирост степени n и новые множители
    """
    x = factors[ia].slots[0]
    y = factors[ih].slots[0]
    rest = tuple(f for k, f in enumerate(factors) if k != ia and k != ih)
    if x == y:
        return 1, rest
    has_x = count_label(rest, x) > 0
    has_y = count_label(rest, y) > 0
    if has_x and has_y:
        if isinstance(y, str) and isinstance(x, int):
            return 0, rename_all(rest, {x: y})
        return 0, rename_all(rest, {y: x})
    if has_x:
        return 0, rename_all(rest, {x: y})
    if has_y:
        return 0, rename_all(rest, {y: x})
    return 0, rest + (Factor("delta", (x, y)),)


def _simplify_deltas(factors: Tuple[Factor, ...]) -> Tuple[int, Tuple[Factor, ...]]:
    """Снимает δ-символы, хотя бы один индекс которых свёрнут с другим множителем"""
    n_add = 0
    changed = True
    while changed:
        changed = False
        for pos, factor in enumerate(factors):
            if factor.kind != "delta":
                continue
            x, y = factor.slots
            rest = factors[:pos] + factors[pos + 1 :]
            if x == y:
                n_add += 1
                factors = rest
                changed = True
                break
            has_x = count_label(rest, x) > 0
            has_y = count_label(rest, y) > 0
            if not has_x and not has_y:
                continue
            if has_x and has_y:
                mapping: Dict[Label, Label] = {x: y} if isinstance(y, str) and isinstance(x, int) else {y: x}
            elif has_x:
                mapping = {x: y}
            else:
                mapping = {y: x}
            factors = rename_all(rest, mapping)
            changed = True
            break
    return n_add, factors


def validate(factors: Tuple[Factor, ...]) -> Dict[Label, List[Tuple[str, int]]]:
    """
    Проверка структуры монома
    :return: Словарь вхождений индексов
    :raise StructuralError: Неизвестный вид, неверные слоты или неверная свёртка
    """
    seen: Dict[Label, List[Tuple[str, int]]] = {}
    for pos, factor in enumerate(factors):
        if factor.kind in SAT_TYPES:
            if len(factor.slots) != 1 or factor.derivs or factor.bderivs:
                raise StructuralError(f"Некорректный сателлит {render_factor(factor)}")
        elif factor.kind in CORE_SLOTS:
            if len(factor.slots) != len(CORE_SLOTS[factor.kind]):
                raise StructuralError(f"Неверное число слотов в множителе {render_factor(factor)}")
            order = len(factor.derivs) + len(factor.bderivs)
            if factor.kind in CURVATURE_KINDS and order > MAX_CURVATURE_DERIVS:
                raise StructuralError(f"Слишком много производных в множителе {render_factor(factor)}")
            if factor.kind == "f" and order > MAX_OBSERVABLE_DERIVS:
                raise StructuralError(f"Слишком много производных в множителе {render_factor(factor)}")
            if factor.kind in ("sc", "lapsc", "delta") and order:
                raise StructuralError(f"Производные не допускаются в множителе {render_factor(factor)}")
        else:
            raise StructuralError(f"Неизвестный вид тензора в множителе {render_factor(factor)}")
        for label, typ in factor.occurrences():
            seen.setdefault(label, []).append((typ, pos))
    for label, occ in seen.items():
        if len(occ) > 2:
            raise StructuralError(
                f"Индекс {render_label(label)} встречается более двух раз, "
                f"множитель {render_factor(factors[occ[2][1]])}"
            )
        if len(occ) == 2 and occ[0][0] == occ[1][0]:
            raise StructuralError(
                f"Свёртка индекса {render_label(label)} одного типа в множителе {render_factor(factors[occ[1][1]])}"
            )
        if len(occ) == 1 and isinstance(label, int):
            raise StructuralError(
                f"Непарный немой индекс {render_label(label)} в множителе {render_factor(factors[occ[0][1]])}"
            )
    return seen


def _slot_images(factor: Factor) -> List[Tuple[Label, ...]]:
    """Симметрии слотов кэлеровой кривизны: перестановки голоморфных и антиголоморфных слотов"""
    if factor.kind != "R":
        return [factor.slots]
    k, m, l, q = factor.slots
    images = [(k, m, l, q), (l, m, k, q), (k, q, l, m), (l, q, k, m)]
    unique: List[Tuple[Label, ...]] = []
    for image in images:
        if image not in unique:
            unique.append(image)
    return unique


def _number_list(
    labels: Tuple[Label, ...], mapping: Dict[Label, int], nxt: int, dummies: frozenset
) -> Iterator[Tuple[Tuple[LabelKey, ...], Dict[Label, int], int]]:
    """Нумерация мультимножества индексов производных: перебор порядков новых немых индексов"""
    fresh = [x for x in dict.fromkeys(labels) if x in dummies and x not in mapping]
    for order in permutations(fresh) if fresh else [()]:
        local = dict(mapping)
        k = nxt
        for label in order:
            local[label] = k
            k += 1
        keys = sorted((0, local[x]) if x in dummies else (1, x) for x in labels)
        yield tuple(keys), local, k  # type: ignore[misc]


def _render_options(
    factor: Factor, mapping: Dict[Label, int], nxt: int, dummies: frozenset
) -> Iterator[Tuple[Tuple, Dict[Label, int], int]]:
    for slots in _slot_images(factor):
        local = dict(mapping)
        k = nxt
        slot_keys: List[LabelKey] = []
        for label in slots:
            if label in dummies:
                if label not in local:
                    local[label] = k
                    k += 1
                slot_keys.append((0, local[label]))
            else:
                slot_keys.append((1, label))
        for dkeys, local2, k2 in _number_list(factor.derivs, local, k, dummies):
            for bkeys, local3, k3 in _number_list(factor.bderivs, local2, k2, dummies):
                yield (factor.kind, factor.tag, tuple(slot_keys), dkeys, bkeys), local3, k3


def _sat_part(sats: List[Factor], mapping: Dict[Label, int], nxt: int, dummies: frozenset) -> Tuple:
    local = dict(mapping)
    pairs: Dict[Label, List[Factor]] = {}
    for sat in sats:
        label = sat.slots[0]
        if label in dummies and label not in local:
            pairs.setdefault(label, []).append(sat)
    described = []
    for label, members in pairs.items():
        members.sort(key=lambda f: SAT_TYPES[f.kind])
        described.append(((members[0].kind, members[0].tag, members[1].kind, members[1].tag), label))
    described.sort(key=lambda item: item[0])
    k = nxt
    for _, label in described:
        local[label] = k
        k += 1
    keys = []
    for sat in sats:
        label = sat.slots[0]
        keys.append((sat.kind, sat.tag, (0, local[label]) if label in dummies else (1, label)))
    return tuple(sorted(keys))


def _key_to_label(key: LabelKey) -> Label:
    return key[1]


@lru_cache(maxsize=200000)
def canonical_factors(factors: Tuple[Factor, ...]) -> Tuple[int, Tuple[Factor, ...]]:
    """
    Каноническая форма набора множителей: симметрии слотов, порядок множителей,
    минимальная перенумерация немых индексов
    :param factors: Множители монома
    :return: Прирост степени n (от δ_ii) и канонические множители
    :raise StructuralError: Некорректная структура монома
    """
    validate(factors)
    n_add, factors = _simplify_deltas(factors)
    seen = validate(factors)
    dummies = frozenset(label for label, occ in seen.items() if len(occ) == 2)
    cores = [f for f in factors if not f.is_sat]
    sats = [f for f in factors if f.is_sat]

    def shape(f: Factor) -> Tuple:
        return (f.kind, f.tag, len(f.slots), len(f.derivs), len(f.bderivs))

    cores.sort(key=shape)
    shapes = [shape(f) for f in cores]
    best: List[Optional[Tuple]] = [None]

    def dfs(pos: int, used: Tuple[bool, ...], mapping: Dict[Label, int], nxt: int, partial: Tuple) -> None:
        if pos == len(cores):
            key = (partial, _sat_part(sats, mapping, nxt, dummies))
            if best[0] is None or key < best[0]:
                best[0] = key
            return
        tried = set()
        for idx, factor in enumerate(cores):
            if used[idx] or shapes[idx] != shapes[pos] or factor in tried:
                continue
            tried.add(factor)
            for rendered, local, k in _render_options(factor, mapping, nxt, dummies):
                candidate = partial + (rendered,)
                if best[0] is not None and candidate > best[0][0][: pos + 1]:
                    continue
                dfs(pos + 1, used[:idx] + (True,) + used[idx + 1 :], local, k, candidate)

    dfs(0, tuple(False for _ in cores), {}, 0, ())
    core_keys, sat_keys = best[0]  # type: ignore[misc]
    result = [
        Factor(
            kind,
            tuple(_key_to_label(x) for x in slots),
            tuple(_key_to_label(x) for x in dkeys),
            tuple(_key_to_label(x) for x in bkeys),
            tag,
        )
        for kind, tag, slots, dkeys, bkeys in core_keys
    ]
    result.extend(Factor(kind, (_key_to_label(key),), (), (), tag) for kind, tag, key in sat_keys)
    return n_add, tuple(result)


def _normalize_i(coef: Fraction, i_exp: int) -> Tuple[Fraction, int]:
    i_exp %= 4
    if i_exp >= 2:
        coef = -coef
        i_exp -= 2
    return coef, i_exp


P = TypeVar("P", bound="TensorPolynomial")


class TensorPolynomial:
    """
    Точная линейная комбинация канонических мономов с коэффициентами вида rational·π^a·n^b·(√−1)^c
    Атрибуты:
        _terms(dict): Словарь {(π, n, i, множители): коэффициент} (protected).
    Методы:
        from_raw(cls, raw) -> TensorPolynomial:
            Сборка многочлена из сырых мономов с канонизацией и приведением подобных
        raw_terms(self) -> Iterator[Term]:
            Перебор мономов
        scale(self, coef, pi, n, i) -> TensorPolynomial:
            Умножение на скаляр
        conjugate(self, sat_map) -> TensorPolynomial:
            Комплексное сопряжение
        render(self) -> str:
            Детерминированная текстовая запись
    """

    def __init__(self, terms: Optional[Dict[MonomialKey, Fraction]] = None) -> None:
        self._terms: Dict[MonomialKey, Fraction] = {k: v for k, v in (terms or {}).items() if v != 0}

    @classmethod
    def from_raw(cls: Type[P], raw: Iterable[Term]) -> P:
        """
        Сборка многочлена из сырых мономов
        :param raw: Мономы с произвольными метками
        :return: Многочлен с приведёнными подобными
        :raise StructuralError: Некорректный моном
        """
        acc: Dict[MonomialKey, Fraction] = {}
        for term in raw:
            if term.coef == 0:
                continue
            coef, i_exp = _normalize_i(Fraction(term.coef), term.i)
            n_add, factors = canonical_factors(tuple(term.factors))
            key = (term.pi, term.n + n_add, i_exp, factors)
            acc[key] = acc.get(key, Fraction(0)) + coef
        return cls(acc)

    @classmethod
    def one(cls: Type[P]) -> P:
        return cls({(0, 0, 0, ()): Fraction(1)})

    @classmethod
    def zero(cls: Type[P]) -> P:
        return cls({})

    @classmethod
    def scalar(cls: Type[P], coef: Union[int, Fraction, str], pi: int = 0, n: int = 0, i: int = 0) -> P:
        return cls.from_raw([Term(Fraction(coef), pi, n, i, ())])

    def cast(self, cls: Type[P]) -> P:
        return cls(dict(self._terms))

    def raw_terms(self) -> Iterator[Term]:
        for (pi, n, i, factors), coef in self._terms.items():
            yield Term(coef, pi, n, i, factors)

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TensorPolynomial):
            return NotImplemented
        return self._terms == other._terms

    __hash__ = None  # type: ignore[assignment]

    def __add__(self: P, other: "TensorPolynomial") -> P:
        acc = dict(self._terms)
        for key, coef in other._terms.items():
            acc[key] = acc.get(key, Fraction(0)) + coef
        return self.__class__(acc)

    def __neg__(self: P) -> P:
        return self.__class__({k: -v for k, v in self._terms.items()})

    def __sub__(self: P, other: "TensorPolynomial") -> P:
        return self + (-other)

    def scale(self: P, coef: Union[int, Fraction, str] = 1, pi: int = 0, n: int = 0, i: int = 0) -> P:
        """Умножение на скаляр coef·π^pi·n^n·(√−1)^i"""
        coef = Fraction(coef)
        acc: Dict[MonomialKey, Fraction] = {}
        for (p0, n0, i0, factors), value in self._terms.items():
            c, i_exp = _normalize_i(value * coef, i0 + i)
            key = (p0 + pi, n0 + n, i_exp, factors)
            acc[key] = acc.get(key, Fraction(0)) + c
        return self.__class__(acc)

    def __mul__(self: P, other: Union["TensorPolynomial", int, Fraction]) -> P:
        if not isinstance(other, TensorPolynomial):
            return self.scale(other)
        raw = []
        for left in self.raw_terms():
            offset = max_int_label(left.factors) + 1
            for right in other.raw_terms():
                raw.append(
                    Term(
                        left.coef * right.coef,
                        left.pi + right.pi,
                        left.n + right.n,
                        left.i + right.i,
                        left.factors + shift_labels(right.factors, offset),
                    )
                )
        return self.__class__.from_raw(raw)

    __rmul__ = __mul__

    def map_terms(self: P, fn: TermMap) -> P:
        """Применяет к каждому моному функцию, возвращающую список сырых мономов"""
        raw: List[Term] = []
        for term in self.raw_terms():
            raw.extend(fn(term))
        return self.__class__.from_raw(raw)

    def filter(self: P, predicate: TermPredicate) -> P:
        return self.__class__({k: v for k, v in self._terms.items() if predicate(Term(v, k[0], k[1], k[2], k[3]))})

    def conjugate(self: P, sat_map: Mapping[str, str] = KERNEL_ADJOINT_SATS) -> P:
        """
        Комплексное сопряжение: чёрточки слотов меняются местами, √−1 → −√−1
        :param sat_map: Переименование видов сателлитов
        """
        raw = [
            Term(
                -term.coef if term.i % 2 else term.coef,
                term.pi,
                term.n,
                term.i,
                tuple(f.conjugate(sat_map) for f in term.factors),
            )
            for term in self.raw_terms()
        ]
        return self.__class__.from_raw(raw)

    def untag(self: P) -> P:
        def strip(term: Term) -> List[Term]:
            return [term._replace(factors=tuple(f.with_tag("") if f.is_sat else f for f in term.factors))]

        return self.map_terms(strip)

    def has_sats(self) -> bool:
        return any(f.is_sat for key in self._terms for f in key[3])

    def symbol_degree(self) -> int:
        """Наибольшее число основных множителей в мономе"""
        return max(
            (sum(1 for f in key[3] if not f.is_sat and f.kind != "delta") for key in self._terms),
            default=0,
        )

    def sorted_keys(self) -> List[MonomialKey]:
        return sorted(self._terms, key=monomial_sort_key)

    def coefficient(self, key: MonomialKey) -> Fraction:
        return self._terms.get(key, Fraction(0))

    def render(self) -> str:
        """Детерминированная текстовая запись"""
        if not self._terms:
            return "0"
        parts = []
        for key in self.sorted_keys():
            pi, n, i, factors = key
            coef = self._terms[key]
            sign = "-" if coef < 0 else "+"
            chunks = [str(abs(coef))]
            if pi:
                chunks.append(f"pi^{pi}")
            if n:
                chunks.append(f"n^{n}")
            if i:
                chunks.append("i")
            chunks.extend(render_factor(f) for f in factors)
            parts.append(f"{sign} {' '.join(chunks)}")
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else text

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}({self.render()})"


_TOKEN = re.compile(r"([A-Za-z]+)(?:\[([^\]]*)\])?(?:@(\w+))?")
_KNOWN = set(CORE_SLOTS) | set(SAT_TYPES)


def _parse_factor(name: str, inner: Optional[str], tag: Optional[str]) -> Factor:
    inner = inner or ""
    if ";" in inner:
        slot_part, deriv_part = inner.split(";", 1)
    elif name in ("R", "ric", "RE", "delta") or name in SAT_TYPES:
        slot_part, deriv_part = inner, ""
    else:
        slot_part, deriv_part = "", inner
    slots = tuple(x.rstrip("~") for x in slot_part.split())
    derivs = tuple(x for x in deriv_part.split() if not x.endswith("~"))
    bderivs = tuple(x.rstrip("~") for x in deriv_part.split() if x.endswith("~"))
    if name in _KNOWN and name != "f":
        return Factor(name, slots, derivs, bderivs, tag or "")
    if slots:
        raise StructuralError(f"Наблюдаемая {name} не имеет слотов")
    return Factor("f", (), derivs, bderivs, name)


def parse_factors(text: str) -> Tuple[Factor, ...]:
    """
    Разбор записи вида "R[k m l q ; s t~] z[k] f[u v~]"
    :param text: Запись монома
    :return: Множители
    :raise StructuralError: Нераспознанный фрагмент
    """
    factors = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        match = _TOKEN.match(text, pos)
        if match is None or match.end() == pos:
            raise StructuralError(f"Не удалось разобрать запись: {text[pos:]}")
        factors.append(_parse_factor(match.group(1), match.group(2), match.group(3)))
        pos = match.end()
    return tuple(factors)


def tp(
    text: str,
    coef: Union[int, Fraction, str] = 1,
    pi: int = 0,
    i: int = 0,
    n: int = 0,
    cls: Type[P] = TensorPolynomial,  # type: ignore[assignment]
) -> P:
    """
    Моном из текстовой записи
    :param text: Запись множителей, пустая строка - скаляр
    :param coef: Рациональный коэффициент
    :param pi: Степень π
    :param i: Степень √−1
    :param n: Степень n
    :param cls: Класс результата
    :return: Многочлен из одного монома
    """
    return cls.from_raw([Term(Fraction(coef), pi, n, i, parse_factors(text))])


def tsum(*polys: P) -> P:
    """Сумма многочленов"""
    result = polys[0]
    for poly in polys[1:]:
        result = result + poly
    return result
