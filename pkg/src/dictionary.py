"""
Словарь индексных форм инвариантов в точке x₀ (нормальные координаты, символы Кристоффеля равны нулю).

Соглашения: |dz_q|² = 2, ⟨dz̄_i, dz_j⟩ = 2δ_ij,
⟨α_{ℓm̄} dz_ℓ∧dz̄_m, β_{kq̄} dz_k∧dz̄_q⟩ = −4 α_{ℓm̄} β_{mℓ̄},
⟨α_{m̄q̄} dz̄_m⊗dz̄_q, β_{kℓ} dz_k⊗dz_ℓ⟩ = 4 α_{m̄q̄} β_{mq}.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Callable, Dict, List, Tuple

from src.exceptions import UnsupportedInvariantError
from src.tensors import Factor, Label, Term, TensorPolynomial, max_int_label, shift_labels, tp, tsum

logger = logging.getLogger(__name__)

Builder = Callable[[str, str], TensorPolynomial]


@dataclass(frozen=True)
class DictionaryEntry:
    """
    Запись словаря
    Атрибуты:
        convention(str): Определяющее соглашение;
        build(Callable): Построение индексной формы по именам наблюдаемых f, g.
    """

    convention: str
    build: Builder


def _lap(f: str) -> TensorPolynomial:
    return tp(f"{f}[q q~]", -4)


def _lap_gradient(f: str, barred: bool) -> Tuple[str, str]:
    """Слагаемые (Δf)_u или (Δf)_ū со свободным индексом u"""
    if barred:
        return f"{f}[u~ i i~]", f"ric[l u] {f}[l~]"
    return f"{f}[u i i~]", f"ric[u l] {f}[l]"


def _pair_dbar_d_lap(f: str, g: str) -> TensorPolynomial:
    """⟨∂̄f, ∂Δg⟩ = 2 f_ū (Δg)_u, (Δg)_u = −4 g_{u i ī} + (4/3) ric_{u ℓ̄} g_ℓ"""
    third, ricci = _lap_gradient(g, barred=False)
    return tp(f"{f}[u~] {third}", -8) + tp(f"{f}[u~] {ricci}", Fraction(8, 3))


def _pair_dbar_lap_d(f: str, g: str) -> TensorPolynomial:
    """⟨∂̄Δf, ∂g⟩ = 2 (Δf)_ū g_u"""
    third, ricci = _lap_gradient(f, barred=True)
    return tp(f"{third} {g}[u]", -8) + tp(f"{ricci} {g}[u]", Fraction(8, 3))


def _pair_d_lap_dbar(f: str, g: str) -> TensorPolynomial:
    """⟨∂Δf, ∂̄g⟩ = 2 (Δf)_u g_ū"""
    third, ricci = _lap_gradient(f, barred=False)
    return tp(f"{third} {g}[u~]", -8) + tp(f"{ricci} {g}[u~]", Fraction(8, 3))


def _pair_d_dbar_lap(f: str, g: str) -> TensorPolynomial:
    """⟨∂f, ∂̄Δg⟩ = 2 f_u (Δg)_ū"""
    third, ricci = _lap_gradient(g, barred=True)
    return tp(f"{f}[u] {third}", -8) + tp(f"{f}[u] {ricci}", Fraction(8, 3))


def _lap_squared(f: str, _: str) -> TensorPolynomial:
    return tsum(
        tp(f"{f}[i q i~ q~]", 16),
        tp(f"ric[m l] {f}[l m~]", Fraction(-16, 3)),
        tp(f"ric[m l ; m~] {f}[l]", Fraction(-4, 3)),
        tp(f"ric[m m ; l~] {f}[l]", Fraction(-4, 3)),
        tp(f"ric[l m ; m] {f}[l~]", Fraction(-4, 3)),
        tp(f"ric[m m ; l] {f}[l~]", Fraction(-4, 3)),
    )


ENTRIES: Dict[str, DictionaryEntry] = {
    "laplacian": DictionaryEntry("Δf = −4 ∂²f/∂z_q∂z̄_q", lambda f, g: _lap(f)),
    "laplacian_squared": DictionaryEntry(
        "Δ²f = 16 f_{iqīq̄} − (16/3) ric_{mℓ̄} f_{ℓm̄} − (4/3)((ric_{mℓ̄;m̄} + ric_{mm̄;ℓ̄}) f_ℓ + c.c.)", _lap_squared
    ),
    "scalar_curvature": DictionaryEntry("sc = 8 R_{ℓℓ̄qq̄}", lambda f, g: tp("R[l l q q]", 8)),
    "ricci": DictionaryEntry("ric_{ℓk̄} = 2 R_{ℓk̄qq̄}", lambda f, g: tp("R[l k q q]", 2)),
    "i_RE_lambda": DictionaryEntry("√−1 R^E_Λ = 2 R^E_{kk̄}", lambda f, g: tp("RE[k k]", 2)),
    "pair_dbar_f_d_g": DictionaryEntry("⟨∂̄f, ∂g⟩ = 2 f_ū g_u", lambda f, g: tp(f"{f}[u~] {g}[u]", 2)),
    "pair_d_f_dbar_g": DictionaryEntry("⟨∂f, ∂̄g⟩ = 2 f_u g_ū", lambda f, g: tp(f"{f}[u] {g}[u~]", 2)),
    "pair_dbar_f_d_lap_g": DictionaryEntry("⟨∂̄f, ∂Δg⟩ = 2 f_ū (Δg)_u", _pair_dbar_d_lap),
    "pair_dbar_lap_f_d_g": DictionaryEntry("⟨∂̄Δf, ∂g⟩ = 2 (Δf)_ū g_u", _pair_dbar_lap_d),
    "pair_d_lap_f_dbar_g": DictionaryEntry("⟨∂Δf, ∂̄g⟩ = 2 (Δf)_u g_ū", _pair_d_lap_dbar),
    "pair_d_f_dbar_lap_g": DictionaryEntry("⟨∂f, ∂̄Δg⟩ = 2 f_u (Δg)_ū", _pair_d_dbar_lap),
    "pair_dbar_f_wedge_d_g_RE": DictionaryEntry(
        "⟨∂̄f∧∂g, R^E⟩ = 4 f_ū g_v R^E_{uv̄}", lambda f, g: tp(f"{f}[u~] {g}[v] RE[u v]", 4)
    ),
    "pair_d_f_wedge_dbar_g_RE": DictionaryEntry(
        "⟨∂f∧∂̄g, R^E⟩ = −4 f_ℓ g_m̄ R^E_{mℓ̄}", lambda f, g: tp(f"{f}[l] {g}[m~] RE[m l]", -4)
    ),
    "i_pair_ric_d_f_wedge_dbar_g": DictionaryEntry(
        "√−1⟨ric_ω, ∂f∧∂̄g⟩ = 4 ric_{ℓm̄} f_m g_ℓ̄", lambda f, g: tp(f"ric[l m] {f}[m] {g}[l~]", 4)
    ),
    "lap_f_lap_g": DictionaryEntry("ΔfΔg = 16 f_{qq̄} g_{uū}", lambda f, g: tp(f"{f}[q q~] {g}[u u~]", 16)),
    "pair_D01_dbar_f_D10_d_g": DictionaryEntry(
        "⟨D^{0,1}∂̄f, D^{1,0}∂g⟩ = 4 f_{ūv̄} g_{uv}", lambda f, g: tp(f"{f}[u~ v~] {g}[u v]", 4)
    ),
    "pair_D10_d_f_D01_dbar_g": DictionaryEntry(
        "⟨D^{1,0}∂f, D^{0,1}∂̄g⟩ = 4 f_{uv} g_{ūv̄}", lambda f, g: tp(f"{f}[u v] {g}[u~ v~]", 4)
    ),
    "pair_nabla_d_f_nabla_dbar_g": DictionaryEntry(
        "⟨∇∂f, ∇∂̄g⟩ = 4 f_{uv} g_{ūv̄} + 4 f_{uv̄} g_{ūv}",
        lambda f, g: tp(f"{f}[u v] {g}[u~ v~]", 4) + tp(f"{f}[u v~] {g}[v u~]", 4),
    ),
    "ric_frame_dbar_g_d_f": DictionaryEntry(
        "ric(w_m, w̄_q) w̄_m(g) w_q(f) = 4 ric_{mq̄} g_m̄ f_q", lambda f, g: tp(f"ric[m q] {g}[m~] {f}[q]", 4)
    ),
    "poisson": DictionaryEntry(
        "{f, g} = (√−1/π)(f_u g_ū − g_u f_ū) для 2πω",
        lambda f, g: tp(f"{f}[u] {g}[u~]", 1, pi=-1, i=1) - tp(f"{g}[u] {f}[u~]", 1, pi=-1, i=1),
    ),
}


def dictionary_lookup(name: str, f: str = "f", g: str = "g") -> TensorPolynomial:
    """
    Индексная форма инварианта в точке x₀
    :param name: Имя инварианта из ENTRIES
    :param f: Имя первой наблюдаемой
    :param g: Имя второй наблюдаемой
    :return: Многочлен в индексной записи
    :raise UnsupportedInvariantError: Инварианта нет в словаре
    """
    entry = ENTRIES.get(name)
    if entry is None:
        raise UnsupportedInvariantError(f"Инвариант {name} отсутствует в словаре")
    return entry.build(f, g)


def leibniz(poly: TensorPolynomial, tag: str, left: str, right: str) -> TensorPolynomial:
    """
    Раскрытие производных произведения наблюдаемых по правилу Лейбница
    :param poly: Многочлен с множителями наблюдаемой tag = left·right
    :param tag: Имя наблюдаемой-произведения
    :param left: Имя первого сомножителя
    :param right: Имя второго сомножителя
    :return: Многочлен без множителей tag
    """

    def expand(term: Term) -> List[Term]:
        pos = next((k for k, f in enumerate(term.factors) if f.kind == "f" and f.tag == tag), None)
        if pos is None:
            return [term]
        factor = term.factors[pos]
        rest = term.factors[:pos] + term.factors[pos + 1 :]
        result = []
        for hsplit in product((0, 1), repeat=len(factor.derivs)):
            for asplit in product((0, 1), repeat=len(factor.bderivs)):
                first = Factor(
                    "f",
                    (),
                    tuple(x for x, s in zip(factor.derivs, hsplit) if s == 0),
                    tuple(x for x, s in zip(factor.bderivs, asplit) if s == 0),
                    left,
                )
                second = Factor(
                    "f",
                    (),
                    tuple(x for x, s in zip(factor.derivs, hsplit) if s == 1),
                    tuple(x for x, s in zip(factor.bderivs, asplit) if s == 1),
                    right,
                )
                result.extend(expand(term._replace(factors=rest + (first, second))))
        return result

    return poly.map_terms(expand)


def _derive(term: Term, label: Label, barred: bool) -> List[Term]:
    """Производная монома по z_label (z̄_label): правило произведения по множителям наблюдаемых"""
    result = []
    for pos, factor in enumerate(term.factors):
        if factor.kind != "f":
            continue
        if barred:
            new = Factor("f", (), factor.derivs, factor.bderivs + (label,), factor.tag)
        else:
            new = Factor("f", (), factor.derivs + (label,), factor.bderivs, factor.tag)
        result.append(term._replace(factors=term.factors[:pos] + (new,) + term.factors[pos + 1 :]))
    return result


def substitute(poly: TensorPolynomial, tag: str, expression: TensorPolynomial) -> TensorPolynomial:
    """
    Подстановка функции expression вместо наблюдаемой tag: множитель tag с производными
    заменяется соответствующими производными expression. Дифференцируются только множители
    наблюдаемых, тензоры кривизны считаются постоянными, что точно для первых производных
    в нормальных координатах.
    :param poly: Многочлен с множителями наблюдаемой tag
    :param tag: Имя заменяемой наблюдаемой
    :param expression: Подставляемая функция в индексной записи
    :return: Многочлен после подстановки
    """

    def expand(term: Term) -> List[Term]:
        pos = next((k for k, f in enumerate(term.factors) if f.kind == "f" and f.tag == tag), None)
        if pos is None:
            return [term]
        factor = term.factors[pos]
        rest = term.factors[:pos] + term.factors[pos + 1 :]
        offset = max_int_label(term.factors) + 1
        result: List[Term] = []
        for inner in expression.raw_terms():
            states = [inner._replace(factors=shift_labels(inner.factors, offset))]
            for label in factor.derivs:
                states = [new for state in states for new in _derive(state, label, barred=False)]
            for label in factor.bderivs:
                states = [new for state in states for new in _derive(state, label, barred=True)]
            for state in states:
                combined = Term(
                    term.coef * state.coef,
                    term.pi + state.pi,
                    term.n + state.n,
                    term.i + state.i,
                    rest + state.factors,
                )
                result.extend(expand(combined))
        return result

    return poly.map_terms(expand)
