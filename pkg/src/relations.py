import logging
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from typing import Dict, Iterator, List, Optional, Sequence, Set, Tuple

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from src.exceptions import ResourceError
from src.settings import DEGREE_BUDGET, DUMMY_BUDGET, MONOMIAL_BUDGET
from src.tensors import (
    Factor,
    Label,
    MonomialKey,
    Term,
    TensorPolynomial,
    _slot_images,
    max_int_label,
    monomial_sort_key,
    tp,
)

logger = logging.getLogger(__name__)

# наборы индексов производных в тождестве ric = 2R
_DERIV_PATTERNS = ("", "s", "s~", "s t", "s t~", "s~ t~")


class RelationSet:
    """
    Набор тождеств вида generator = 0, используемых только при сравнении многочленов
    Атрибуты:
        generators(tuple): Образующие, каждый терм содержит ровно один основной множитель.
    Методы:
        instances(self, key) -> Iterator[TensorPolynomial]:
            Все реализации образующих, содержащие данный моном
    """

    def __init__(self, generators: Sequence[TensorPolynomial]) -> None:
        """
        Инициализация класса RelationSet
        :param generators: Образующие
        """
        self.generators = tuple(generators)

    def __len__(self) -> int:
        return len(self.generators)

    def with_generator(self, generator: TensorPolynomial) -> "RelationSet":
        return RelationSet(self.generators + (generator,))

    def instances(self, key: MonomialKey) -> Iterator[TensorPolynomial]:
        """
        Реализации образующих, в которых один из термов совпадает с множителем монома key,
        умноженные на остальные множители монома
        :param key: Канонический моном
        :return: Итератор многочленов, равных нулю по модулю тождеств
        """
        pi, n, i, factors = key
        offset = max_int_label(factors) + 1
        for pos, factor in enumerate(factors):
            if factor.is_sat or factor.kind == "delta":
                continue
            rest = factors[:pos] + factors[pos + 1 :]
            for generator in self.generators:
                gterms = list(generator.raw_terms())
                for gpos, gterm in enumerate(gterms):
                    cores = [f for f in gterm.factors if not f.is_sat]
                    if len(cores) != 1 or cores[0].kind != factor.kind or cores[0].tag != factor.tag:
                        continue
                    for image in _factor_images(factor):
                        mapping = _match(cores[0], image)
                        if mapping is None:
                            continue
                        instance = _instantiate(gterms, gpos, mapping, rest, offset, (pi, n, i))
                        if instance is not None and not instance.is_zero():
                            yield instance


@lru_cache(maxsize=4096)
def _factor_images(factor: Factor) -> Tuple[Factor, ...]:
    """Все симметричные записи множителя: симметрии слотов и перестановки производных"""
    images = []
    for slots in _slot_images(factor):
        for derivs in set(permutations(factor.derivs)):
            for bderivs in set(permutations(factor.bderivs)):
                image = Factor(factor.kind, slots, derivs, bderivs, factor.tag)
                if image not in images:
                    images.append(image)
    return tuple(images)


def _match(pattern: Factor, image: Factor) -> Optional[Dict[Label, Label]]:
    """
    Согласованное сопоставление индексов образующей индексам множителя. Немые индексы образующей
    переходят в попарно различные индексы, не занятые свободными; свободные индексы могут
    совпасть (ric_{ab} = 2R_{abqq̄} при a = b даёт след ric_{kk̄} = 2R_{kk̄qq̄})
    """
    left = pattern.slots + (None,) + pattern.derivs + (None,) + pattern.bderivs
    right = image.slots + (None,) + image.derivs + (None,) + image.bderivs
    if len(left) != len(right) or len(pattern.derivs) != len(image.derivs):
        return None
    mapping: Dict[Label, Label] = {}
    for src, dst in zip(left, right):
        if src is None or dst is None:
            if src is not dst:
                return None
            continue
        if src in mapping:
            if mapping[src] != dst:
                return None
        else:
            mapping[src] = dst
    dummy_images = [dst for src, dst in mapping.items() if isinstance(src, int)]
    free_images = {dst for src, dst in mapping.items() if isinstance(src, str)}
    if len(set(dummy_images)) != len(dummy_images) or free_images & set(dummy_images):
        return None
    return mapping


def _instantiate(
    gterms: List[Term],
    gpos: int,
    mapping: Dict[Label, Label],
    rest: Tuple[Factor, ...],
    offset: int,
    scalars: Tuple[int, int, int],
) -> Optional[TensorPolynomial]:
    fresh = offset
    raw = []
    for pos, term in enumerate(gterms):
        local: Dict[Label, Label] = {}
        for factor in term.factors:
            for label in factor.labels():
                if label in local:
                    continue
                if isinstance(label, str) or pos == gpos:
                    if label not in mapping:
                        return None
                    local[label] = mapping[label]
                else:
                    local[label] = fresh
                    fresh += 1
        renamed = tuple(f.rename(local) for f in term.factors)
        raw.append(Term(term.coef, term.pi + scalars[0], term.n + scalars[1], term.i + scalars[2], rest + renamed))
    return TensorPolynomial.from_raw(raw)


def _with_extra_derivative(generator: TensorPolynomial, label: str, barred: bool) -> TensorPolynomial:
    """Производная тождества: ко всем основным множителям добавляется индекс label"""

    def extend(term: Term) -> List[Term]:
        factors = tuple(
            (
                Factor(f.kind, f.slots, f.derivs, f.bderivs + (label,), f.tag)
                if barred
                else Factor(f.kind, f.slots, f.derivs + (label,), f.bderivs, f.tag)
            )
            if not f.is_sat
            else f
            for f in term.factors
        )
        return [term._replace(factors=factors)]

    raw: List[Term] = []
    for term in generator.raw_terms():
        raw.extend(extend(term))
    return TensorPolynomial.from_raw(raw)


def _max_order(generator: TensorPolynomial) -> int:
    return max(
        (len(f.derivs) + len(f.bderivs) for term in generator.raw_terms() for f in term.factors if not f.is_sat),
        default=0,
    )


def default_relations() -> RelationSet:
    """
    Тождества Бьянки и следствия свёрток тензора кривизны в нормальных координатах
    :return: Набор тождеств
    """
    generators: List[TensorPolynomial] = []
    for pattern in _DERIV_PATTERNS:
        suffix = f" ; {pattern}" if pattern else ""
        generators.append(tp(f"ric[a b{suffix}]") - tp(f"R[a b q q{suffix}]", 2))
    generators.append(tp("sc") - tp("R[l l q q]", 8))
    generators.append(tp("lapsc") + tp("R[m m q q ; k k~]", 32))
    generators.append(tp("R[k m q q ; m k~]") - tp("R[m m q q ; k k~]"))
    generators.append(tp("RE[m k ; k m~]") - tp("RE[k k ; m m~]"))
    bianchi = [
        tp("R[k m l q ; s]") - tp("R[s m l q ; k]"),
        tp("R[k m l q ; s~]") - tp("R[k s l q ; m~]"),
        tp("RE[k q ; s]") - tp("RE[s q ; k]"),
        tp("RE[k q ; s~]") - tp("RE[k s ; q~]"),
    ]
    generators.extend(bianchi)
    for generator in bianchi:
        if _max_order(generator) <= 1:
            generators.append(_with_extra_derivative(generator, "t", False))
            generators.append(_with_extra_derivative(generator, "t", True))
    logger.debug("Набор тождеств: %d образующих", len(generators))
    return RelationSet(generators)


def _to_qq(value: Fraction) -> object:
    return QQ(value.numerator, value.denominator)


def _from_qq(value: object) -> Fraction:
    return Fraction(int(value.numerator), int(value.denominator))  # type: ignore[attr-defined]


def _dummy_pairs(key: MonomialKey) -> int:
    labels = [label for f in key[3] for label in f.labels() if isinstance(label, int)]
    return len(set(labels))


def equal_mod_relations(
    p: TensorPolynomial, q: TensorPolynomial, relations: Optional[RelationSet] = None
) -> Tuple[bool, TensorPolynomial]:
    """
    Проверка p = q по модулю линейной оболочки реализаций тождеств
    :param p: Левая часть
    :param q: Правая часть
    :param relations: Набор тождеств (по умолчанию default_relations())
    :return: Признак равенства и остаток (приведённая разность)
    :raise ResourceError: Степень или число немых индексов превышают бюджет перебора
    """
    difference = (p - q).cast(TensorPolynomial)
    if difference.is_zero():
        return True, difference
    degree = difference.symbol_degree()
    if degree > DEGREE_BUDGET:
        raise ResourceError(f"Степень {degree} превышает бюджет перебора {DEGREE_BUDGET}")
    dummies = max(_dummy_pairs(key) for key in difference.sorted_keys())
    if dummies > DUMMY_BUDGET:
        raise ResourceError(f"Число немых индексов {dummies} превышает бюджет перебора {DUMMY_BUDGET}")
    if relations is None:
        relations = default_relations()

    monomials: Set[MonomialKey] = set(difference.sorted_keys())
    frontier = list(difference.sorted_keys())
    vectors: List[TensorPolynomial] = []
    rendered: Set[str] = set()
    while frontier:
        key = frontier.pop()
        for vector in relations.instances(key):
            text = vector.render()
            if text in rendered:
                continue
            rendered.add(text)
            vectors.append(vector)
            for new_key in vector.sorted_keys():
                if new_key not in monomials:
                    monomials.add(new_key)
                    frontier.append(new_key)
                    if len(monomials) > MONOMIAL_BUDGET:
                        raise ResourceError(
                            f"Число мономов превышает бюджет перебора {MONOMIAL_BUDGET} при степени {degree}"
                        )
    logger.debug("Тождества: %d мономов, %d реализаций", len(monomials), len(vectors))

    columns = sorted(monomials, key=monomial_sort_key)
    index = {key: pos for pos, key in enumerate(columns)}
    residue = [_to_qq(difference.coefficient(key)) for key in columns]
    if vectors:
        rows = []
        for vector in vectors:
            row = [QQ(0)] * len(columns)
            for key in vector.sorted_keys():
                row[index[key]] = _to_qq(vector.coefficient(key))
            rows.append(row)
        matrix = DomainMatrix(rows, (len(rows), len(columns)), QQ)
        reduced, pivots = matrix.rref()
        reduced_rows = reduced.to_list()
        for row_pos, column in enumerate(pivots):
            factor = residue[column]
            if factor:
                residue = [value - factor * pivot_value for value, pivot_value in zip(residue, reduced_rows[row_pos])]
    witness = TensorPolynomial(
        {key: _from_qq(value) for key, value in zip(columns, residue) if value}  # type: ignore[misc]
    )
    return witness.is_zero(), witness


def expand_ric(poly: TensorPolynomial) -> TensorPolynomial:
    """
    Подстановка ric_{ab} = 2R_{ab q q̄}, sc = 8R_{ll̄qq̄}, Δsc = −32R_{mm̄qq̄;kk̄}
    :param poly: Многочлен с множителями ric, sc, lapsc
    :return: Многочлен, записанный через R
    """

    def expand(term: Term) -> List[Term]:
        coef = term.coef
        fresh = max_int_label(term.factors) + 1
        factors: List[Factor] = []
        for factor in term.factors:
            if factor.kind == "ric":
                a, b = factor.slots
                factors.append(Factor("R", (a, b, fresh, fresh), factor.derivs, factor.bderivs))
                coef *= 2
                fresh += 1
            elif factor.kind == "sc":
                factors.append(Factor("R", (fresh, fresh, fresh + 1, fresh + 1)))
                coef *= 8
                fresh += 2
            elif factor.kind == "lapsc":
                factors.append(Factor("R", (fresh, fresh, fresh + 1, fresh + 1), (fresh + 2,), (fresh + 2,)))
                coef *= -32
                fresh += 3
            else:
                factors.append(factor)
        return [term._replace(coef=coef, factors=tuple(factors))]

    return poly.map_terms(expand)
