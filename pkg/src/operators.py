import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Tuple

from src.calculus import OperatorExpression, normal_order, op
from src.frames import (
    DZ,
    Complex,
    Lap,
    Nabla,
    RealFrameExpression,
    T,
    convert_frame,
    frame_sum,
    fresh_label,
    word,
)
from src.tensors import tp, tsum

logger = logging.getLogger(__name__)

X = "X"


def a1_item(u: str, v: str) -> T:
    """A₁(u, v) = ⟨R_{;(𝓡,𝓡)}(𝓡, u)𝓡, v⟩"""
    return T("R", (X, u, X, v), (X, X))


def a2_items(u: str, v: str) -> Tuple[T, T]:
    """Сомножители A₂(u, v) = Σ_k ⟨R(𝓡, u)𝓡, e_k⟩⟨R(𝓡, v)𝓡, e_k⟩ с новой меткой k"""
    k = fresh_label("a")
    return T("R", (X, u, X, f"e:{k}")), T("R", (X, v, X, f"e:{k}"))


def ric_xx() -> RealFrameExpression:
    return word(T("ric", (X, X)))


def o2_real() -> RealFrameExpression:
    """𝒪₂ = 𝒪₂′ − (1/3) ric(𝓡, e_j)∇_{0,e_j} − sc/6"""
    prime = frame_sum(
        word(T("R", (X, "e:i", X, "e:j")), Nabla("e:i"), Nabla("e:j"), coef=Fraction(1, 3)),
        word(Complex("RE[k k]"), coef=-2),
        word(T("R", ("z", "zb", X, "e:j")), Nabla("e:j"), coef=Fraction(1, 3), pi=1),
        word(T("ric", (X, "e:j")), Nabla("e:j"), coef=Fraction(2, 3)),
        word(T("RE", (X, "e:j")), Nabla("e:j"), coef=-1),
    )
    result = prime + word(T("ric", (X, "e:j")), Nabla("e:j"), coef=Fraction(-1, 3))
    return result + word(T("sc"), coef=Fraction(-1, 6))


def o3_real() -> RealFrameExpression:
    first = frame_sum(
        word(T("R", ("z", "zb", X, "e:i"), (X,)), coef=Fraction(2, 15), pi=1),
        word(T("ric", (X, "e:i"), (X,)), coef=Fraction(1, 6)),
        word(T("R", (X, "e:j", X, "e:i"), ("e:j",)), coef=Fraction(1, 6)),
        word(T("RE", (X, "e:i"), (X,)), coef=Fraction(-2, 3)),
    )
    return frame_sum(
        word(T("R", (X, "e:i", X, "e:j"), (X,)), Nabla("e:i"), Nabla("e:j"), coef=Fraction(1, 6)),
        first * word(Nabla("e:i")),
        word(T("R", ("z", "zb", X, "e:j"), ("e:j",)), coef=Fraction(1, 15), pi=1),
        word(T("ric", (X, "e:i"), ("e:i",)), coef=Fraction(-1, 6)),
        word(T("ric", ("e:i", "e:i"), (X,)), coef=Fraction(-1, 12)),
        word(T("RE", (X, "e:i"), ("e:i",)), coef=Fraction(-1, 3)),
        word(T("RE", ("e:i", "Je:i"), (X,)), coef=Fraction(-1, 2), i=1),
    )


def _mix(u: str, v: str, c1: Fraction, c2: Fraction) -> RealFrameExpression:
    """c₁A₁(u, v) + c₂A₂(u, v)"""
    return word(a1_item(u, v), coef=c1) + word(*a2_items(u, v), coef=c2)


def _dz(vec: str, u: str, v: str, c1: Fraction, c2: Fraction) -> RealFrameExpression:
    """∂_{Z} по направлению vec от c₁A₁(u, v) + c₂A₂(u, v)"""
    return word(DZ(vec, (a1_item(u, v),)), coef=c1) + word(DZ(vec, a2_items(u, v)), coef=c2)


def o4_real() -> Dict[str, RealFrameExpression]:
    """Слагаемые 𝒪₄₁, ..., 𝒪₄₆"""
    lap = word(Lap())
    ric2 = ric_xx() * ric_xx()
    inner = _mix("e:j", "e:j", Fraction(-1, 80), Fraction(1, 360)) + ric2.scale(Fraction(-1, 288))
    pieces = {
        "O41": _mix("e:i", "e:j", Fraction(1, 20), Fraction(-1, 15)) * word(Nabla("e:i"), Nabla("e:j")),
        "O42": lap * inner - inner * lap + (lap * ric2).scale(Fraction(1, 144)),
        "O43": (ric_xx() * lap * ric_xx()).scale(Fraction(-1, 144)),
        "O44": frame_sum(
            word(a1_item("zb", "e:i"), coef=Fraction(1, 30), pi=1),
            word(*a2_items("zb", "e:i"), coef=Fraction(-1, 10), pi=1),
            _dz("e:j", "e:i", "e:j", Fraction(1, 20), Fraction(2, 45)),
            _dz("e:i", "e:j", "e:j", Fraction(-1, 40), Fraction(-1, 45)),
        )
        * word(Nabla("e:i")),
        "O45": frame_sum(
            word(T("R", (X, "e:k", X, "e:m")), T("R", (X, "e:k", "e:l", "e:m")), coef=Fraction(2, 9)),
            word(T("R", (X, "e:l", X, "e:k")), T("ric", (X, "e:k")), coef=Fraction(-1, 9)),
            word(T("R", (X, "e:l", X, "e:m")), T("RE", (X, "e:m")), coef=Fraction(1, 4)),
            word(T("RE", (X, "e:l"), (X, X)), coef=Fraction(-1, 4)),
        )
        * word(Nabla("e:l")),
        "O46": frame_sum(
            word(*a2_items("zb", "zb"), coef=Fraction(-1, 36), pi=2),
            word(T("R", ("z", "zb", X, "e:l"), (X, "e:l")), coef=Fraction(1, 30), pi=1),
            word(T("R", ("z", "zb", X, "e:m")), T("ric", (X, "e:m")), coef=Fraction(-1, 20), pi=1),
            word(Complex("ric[k m] ric[m l] z[k] zb[l]"), coef=Fraction(4, 9)),
            word(Complex("R[k l m q] ric[l m] z[k] zb[q]"), coef=Fraction(-4, 9)),
            word(T("R", ("z", "zb", X, "e:m")), T("RE", (X, "e:m")), coef=Fraction(1, 6), pi=1),
            word(T("ric", (X, "e:m")), T("RE", (X, "e:m")), coef=Fraction(1, 8)),
            word(Complex("RE[k m] RE[m l] z[k] zb[l]")),
            word(T("RE", (X, "e:l"), (X, "e:l")), coef=Fraction(-1, 4)),
            word(T("RE", ("d:l", "db:l"), (X, X)), coef=-1),
        ),
    }
    return pieces


@dataclass(frozen=True)
class ModelOperatorSet:
    """
    Нормально упорядоченные операторы 𝒪₂, 𝒪₃, 𝒪₄
    Атрибуты:
        O2(OperatorExpression): Оператор второго порядка;
        O3(OperatorExpression): Оператор третьего порядка;
        O4(OperatorExpression): Оператор четвёртого порядка;
        pieces(dict): Слагаемые 𝒪₄₁, ..., 𝒪₄₆ по отдельности.
    """

    O2: OperatorExpression
    O3: OperatorExpression
    O4: OperatorExpression
    pieces: Dict[str, OperatorExpression] = field(default_factory=dict)


@lru_cache(maxsize=1)
def build_operators() -> ModelOperatorSet:
    """
    Сборка 𝒪₂, 𝒪₃, 𝒪₄ из выражений в вещественном репере
    :return: Нормально упорядоченные операторы
    """
    o2 = normal_order(convert_frame(o2_real()))
    logger.info("𝒪₂: %d мономов", len(o2))
    o3 = normal_order(convert_frame(o3_real()))
    logger.info("𝒪₃: %d мономов", len(o3))
    pieces = {name: normal_order(convert_frame(expr)) for name, expr in o4_real().items()}
    o4 = tsum(*pieces.values())
    logger.info("𝒪₄: %d мономов", len(o4))
    return ModelOperatorSet(o2, o3, o4, pieces)


def o2_raw_reference() -> OperatorExpression:
    """𝒪₂ в комплексных индексах до упорядочения"""
    third = Fraction(1, 3)
    return tsum(
        op("R[k m l q] z[k] z[l] b[m] b[q]", third),
        op("R[k q l m] z[k] zb[m] b[q] bp[l]", third),
        op("R[k q l m] z[k] zb[m] bp[l] b[q]", third),
        op("R[k m l q] zb[m] zb[q] bp[k] bp[l]", third),
        op("R[m m q q]", Fraction(-4, 3)),
        op("R[k m l k] zb[m] bp[l]", Fraction(2, 3)),
        op("R[k m l q] z[k] zb[m] zb[q] bp[l]", -third, pi=1),
        op("R[l k k q] z[l] b[q]", Fraction(-2, 3)),
        op("R[k m l q] z[k] zb[m] z[l] b[q]", -third, pi=1),
        op("RE[q q]", -2),
        op("RE[l m] zb[m] bp[l]"),
        op("RE[k q] z[k] b[q]"),
    )


def o2_normal_reference() -> OperatorExpression:
    """𝒪₂ в нормальной форме"""
    third = Fraction(1, 3)
    return tsum(
        tp("b[m] b[q] R[k m l q] z[k] z[l]", third, cls=OperatorExpression),
        tp("b[q] R[k m l q] z[k] z[l] zb[m]", -third, pi=1, cls=OperatorExpression),
        tp("b[q] R[l k k q] z[l]", 2, cls=OperatorExpression),
        tp("b[q] RE[l q] z[l]", cls=OperatorExpression),
        tp("b[q] R[k m l q] z[k] zb[m] bp[l]", Fraction(2, 3), cls=OperatorExpression),
        tp("R[k m l q] z[k] zb[m] zb[q] bp[l]", -third, pi=1, cls=OperatorExpression),
        tp("R[k k l m] zb[m] bp[l]", 2, cls=OperatorExpression),
        tp("RE[l m] zb[m] bp[l]", cls=OperatorExpression),
        tp("R[k m l q] zb[m] zb[q] bp[k] bp[l]", third, cls=OperatorExpression),
    )
