"""
Реестр проверок: символьные тождества разложения и численные эксперименты на моделях.
"""

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from threading import Lock
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from src import closed_forms
from src.calculus import KernelPolynomial, compose, compose_fock, normal_order, op
from src.coefficients import (
    CoefficientEngine,
    antisymmetry_defect,
    associativity_defect,
    equal,
    o2_routes,
)
from src.config import RunConfig
from src.fitting import AsymptoticFit, fit, loglog_slope
from src.geometry import (
    bergman_density,
    bergman_kernel,
    commutator_defect,
    fourier_mode,
    gram,
    level_data,
    make_model,
    operator_norm,
    product_diag,
    q_apply,
    q_expected,
    riemann_roch_check,
    toeplitz,
    toeplitz_diag,
)
from src.interfaces import ManifoldModel
from src.oracle import CoreSampler, fock_oracle, relative_error
from src.tensors import TensorPolynomial, tp

logger = logging.getLogger(__name__)

Row = Dict[str, Any]

# диапазоны p по умолчанию для численных проверок по моделям
ModelRanges = Dict[str, Tuple[int, int]]

EXACT_RANGE: ModelRanges = {"cp1": (1, 20), "torus": (1, 20)}
DENSITY_RANGE: ModelRanges = {"cp1": (1, 20), "torus": (20, 40)}
DIAG_RANGE: ModelRanges = {"cp1": (8, 40), "torus": (20, 60)}
Q_RANGE: ModelRanges = {"cp1": (10, 40), "torus": (20, 50)}
SLOPE_RANGE: ModelRanges = {"cp1": (24, 60), "torus": (24, 60)}
NORM_RANGE: ModelRanges = {"cp1": (20, 40), "torus": (20, 40)}

# плотность тора равна p лишь с точностью до e^{−cp}: ниже порога асимптотика не проверяется
ASYMPTOTIC_FLOOR = {"torus": 20}

# наибольшая степень p^{−r} в подгонке диагоналей
DIAG_ORDER = 6

# число случайных пар и выражений в проверках согласия
COMPOSE_PAIRS = 200
NORMAL_ORDER_WORDS = 100
FOCK_TRUNCATION = 12

SAMPLE_POINTS = {
    "cp1": np.array([[1.1, 0.7], [2.3, 4.1]]),
    "torus": np.array([[0.1, 0.2], [0.37, 0.61]]),
}


@dataclass
class CheckOutcome:
    """
    Результат проверки
    Атрибуты:
        passed(bool): Признак успеха;
        residue(str): Остаток: запись многочлена или сводка отклонений;
        rows(list): Строки таблицы эксперимента (model, p, observable, quantity, value);
        fits(dict): Подгонки асимптотик;
        skipped(bool): Проверка неприменима к выбранным моделям.
    """

    passed: bool
    residue: str = "0"
    rows: List[Row] = field(default_factory=list)
    fits: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    skipped: bool = False


class CheckContext:
    """
    Общие для проверок данные запуска
    Атрибуты:
        config(RunConfig): Конфигурация;
        engine(CoefficientEngine): Общий конвейер коэффициентов.
    Методы:
        model(self, name) -> ManifoldModel:
            Модель по имени
        p_values(self, default, model, floor) -> List[int]:
            Уровни p проверки
    """

    def __init__(self, config: RunConfig, engine: Optional[CoefficientEngine] = None) -> None:
        self.config = config
        self.engine = engine or CoefficientEngine()
        self._models: Dict[str, ManifoldModel] = {}
        self._lock = Lock()

    def model(self, name: str) -> ManifoldModel:
        with self._lock:
            if name not in self._models:
                self._models[name] = make_model(name)
            return self._models[name]

    def p_values(self, default: ModelRanges, model: str, floor: bool = False) -> List[int]:
        """
        Уровни p проверки для модели: диапазон конфигурации или диапазон модели по умолчанию
        :param default: Диапазоны по моделям
        :param model: Имя модели
        :param floor: Отбросить уровни ниже ASYMPTOTIC_FLOOR модели
        """
        pmin, pmax = self.config.p_range or default[model]
        if floor:
            pmin = max(pmin, ASYMPTOTIC_FLOOR.get(model, 1))
        return list(range(pmin, pmax + 1))

    def tolerance(self, name: str) -> float:
        return self.config.tolerances[name]


Runner = Callable[[CheckContext], CheckOutcome]


@dataclass(frozen=True)
class Check:
    """
    Запись реестра
    Атрибуты:
        name(str): Имя проверки;
        anchor(str): Проверяемое тождество или утверждение;
        suite(str): symbolic или numeric;
        run(Callable): Функция проверки.
    """

    name: str
    anchor: str
    suite: str
    run: Runner


REGISTRY: Dict[str, Check] = {}


def register(name: str, anchor: str, suite: str) -> Callable[[Runner], Runner]:
    """Декоратор регистрации проверки"""

    def decorator(run: Runner) -> Runner:
        REGISTRY[name] = Check(name, anchor, suite, run)
        return run

    return decorator


def select_checks(config: RunConfig) -> List[Check]:
    """
    Проверки набора config.suite, отфильтрованные по config.checks, в порядке имён
    :raise KeyError: Неизвестное имя проверки
    """
    unknown = sorted(set(config.checks) - set(REGISTRY))
    if unknown:
        raise KeyError(f"Неизвестные проверки: {', '.join(unknown)}; доступны: {', '.join(sorted(REGISTRY))}")
    selected = [
        check
        for check in REGISTRY.values()
        if config.suite in ("all", check.suite) and (not config.checks or check.name in config.checks)
    ]
    logger.debug("Выбрано проверок: %d из %d", len(selected), len(REGISTRY))
    return sorted(selected, key=lambda check: check.name)


def compared(left: TensorPolynomial, right: TensorPolynomial) -> CheckOutcome:
    """Сравнение по модулю тождеств, остаток - приведённая разность"""
    ok, witness = equal(left, right)
    return CheckOutcome(ok, witness.render())


def exact(difference: TensorPolynomial) -> CheckOutcome:
    return CheckOutcome(difference.is_zero(), difference.render())


def _merge(outcomes: Dict[str, CheckOutcome]) -> CheckOutcome:
    """Объединение нескольких сравнений в одну проверку"""
    failed = {name: outcome for name, outcome in outcomes.items() if not outcome.passed}
    if not failed:
        return CheckOutcome(True, "0")
    return CheckOutcome(False, "; ".join(f"{name}: {outcome.residue}" for name, outcome in failed.items()))


# символьные проверки


@register("O2_routes", "𝒪₂ из вещественного репера = индексная нормальная форма; 𝒪₂* = 𝒪₂", "symbolic")
def check_o2_routes(context: CheckContext) -> CheckOutcome:
    differences = o2_routes(context.engine.operators)
    names = ("frame", "normal_order", "adjoint")
    return _merge({name: exact(difference) for name, difference in zip(names, differences)})


@register("PO2P", "𝒫𝒪₂𝒫 = 0", "symbolic")
def check_po2p(context: CheckContext) -> CheckOutcome:
    return compared(context.engine.projected_O2().cast(TensorPolynomial), TensorPolynomial.zero())


@register("F2", "𝓕₂(0,0) = b₁ = (1/π)(R_{kk̄mm̄} + R^E_{mm̄})", "symbolic")
def check_f2(context: CheckContext) -> CheckOutcome:
    _, value = context.engine.compute_F2()
    return compared(value, closed_forms.b1())


@register("b1_invariant", "b₁ = sc/8π + (√−1/2π)R^E_Λ", "symbolic")
def check_b1_invariant(context: CheckContext) -> CheckOutcome:
    return compared(closed_forms.b1(), closed_forms.b1_invariant())


@register("PJ2P", "(𝒫J₂𝒫)(0,0) = sc/16π", "symbolic")
def check_pj2p(context: CheckContext) -> CheckOutcome:
    return compared(context.engine.projected_J2(), closed_forms.projected_J2())


@register("F4_sandwich", "(𝓛⁻¹𝒫^⊥𝒪₂𝒫𝒪₂𝓛⁻¹𝒫^⊥)(0,0) = (1/4π²)(R_{mm̄kk̄} + R^E_{kk̄})²", "symbolic")
def check_f4_sandwich(context: CheckContext) -> CheckOutcome:
    return compared(context.engine.f4_pieces()["sandwich"], closed_forms.resolvent_sandwich())


@register("F4_square", "(𝒫𝒪₂𝓛⁻²𝒫^⊥𝒪₂𝒫)(0,0)", "symbolic")
def check_f4_square(context: CheckContext) -> CheckOutcome:
    return compared(context.engine.f4_pieces()["square"], closed_forms.resolvent_square())


@register("F4_iterated", "π²(𝓛⁻¹𝒫^⊥𝒪₂𝓛⁻¹𝒫^⊥𝒪₂𝒫)(0,0)", "symbolic")
def check_f4_iterated(context: CheckContext) -> CheckOutcome:
    return compared(context.engine.f4_pieces()["iterated"].scale(1, pi=2), closed_forms.iterated_resolvent())


@register("F4_fourth", "−π²(𝓛⁻¹𝒫^⊥𝒪₄𝒫)(0,0)", "symbolic")
def check_f4_fourth(context: CheckContext) -> CheckOutcome:
    return compared(context.engine.f4_pieces()["fourth"].scale(1, pi=2), closed_forms.fourth_order_resolvent())


@register("F4", "𝓕₄(0,0) = b₂ = (1/π²)(b_{2ℂ} + b_{2E})", "symbolic")
def check_f4(context: CheckContext) -> CheckOutcome:
    pieces = context.engine.f4_pieces()
    value = context.engine.compute_F4()
    outcomes = {variant: compared(value, closed_forms.b2(variant)) for variant in closed_forms.B2E_VARIANTS}
    rows = [
        {"model": "", "p": "", "observable": "", "quantity": name, "value": piece.render()}
        for name, piece in sorted(pieces.items())
    ]
    passed = [variant for variant, outcome in outcomes.items() if outcome.passed]
    if passed:
        return CheckOutcome(True, "0", rows)
    return CheckOutcome(False, _merge(outcomes).residue, rows)


@register("J4_consistency", "J₄ = 𝒦[1, J₄] + 𝒦[J₂, J₂] + 𝒦[J₄, 1] в нуле", "symbolic")
def check_j4_consistency(context: CheckContext) -> CheckOutcome:
    lhs, rhs = context.engine.J4_consistency()
    return compared(lhs, rhs)


@register("b1_f", "b_{1,f} = sc f/8π + (√−1/2π)R^E_Λ f − Δf/4π", "symbolic")
def check_b1_f(context: CheckContext) -> CheckOutcome:
    return compared(context.engine.compute_Qf("f", 2), closed_forms.b1_f("f"))


@register("b2_f", "b_{2,f} = b₂f + Δ²f/32π² + b_{ℂf} + b_{Ef}", "symbolic")
def check_b2_f(context: CheckContext) -> CheckOutcome:
    value = context.engine.compute_Qf("f", 4)
    outcomes = {variant: compared(value, closed_forms.b2_f("f", variant)) for variant in closed_forms.B2E_VARIANTS}
    if any(outcome.passed for outcome in outcomes.values()):
        return CheckOutcome(True, "0")
    return _merge(outcomes)


@register("kernel_second_f", "Σ_{|α|=2} 𝒦[1, ∂^αf Z^α/α! J₂](0,0)", "symbolic")
def check_kernel_second_f(context: CheckContext) -> CheckOutcome:
    return compared(context.engine.second_order_kernel("f"), closed_forms.second_order_kernel_f("f"))


@register("taylor_fourth_f", "Σ_{|α|=4} 𝒦[1, ∂^αf Z^α/α!](0,0) = (1/2π²) f_{;iqīq̄}", "symbolic")
def check_taylor_fourth_f(context: CheckContext) -> CheckOutcome:
    return compared(context.engine.fourth_order_taylor("f"), closed_forms.fourth_order_taylor_f("f"))


@register("kernel_third_f", "вклад J₃ в b_{2,f}: 𝒦[J₃, ∂f Z] + 𝒦[1, ∂f Z J₃] в нуле", "symbolic")
def check_kernel_third_f(context: CheckContext) -> CheckOutcome:
    return compared(context.engine.third_order_kernel("f"), closed_forms.third_order_kernel_f("f"))


@register("b1_fg", "b_{1,f,g} = b₁fg − (fΔg + gΔf)/4π + (1/2π)⟨∂̄f, ∂g⟩", "symbolic")
def check_b1_fg(context: CheckContext) -> CheckOutcome:
    return compared(context.engine.compute_Qfg("f", "g", 2), closed_forms.b1_fg("f", "g"))


@register("b2_fg", "b_{2,f,g} для вещественных f, g", "symbolic")
def check_b2_fg(context: CheckContext) -> CheckOutcome:
    value = context.engine.compute_Qfg("f", "g", 4)
    outcomes = {
        variant: compared(value, closed_forms.b2_fg("f", "g", variant)) for variant in closed_forms.B2E_VARIANTS
    }
    if any(outcome.passed for outcome in outcomes.values()):
        return CheckOutcome(True, "0")
    return _merge(outcomes)


@register("C1", "C₁(f, g) = −(1/2π)⟨∂f, ∂̄g⟩", "symbolic")
def check_c1(context: CheckContext) -> CheckOutcome:
    return compared(context.engine.extract_C(1, "f", "g"), closed_forms.C1("f", "g"))


@register(
    "C2",
    "C₂(f, g) = (1/8π²)⟨D^{1,0}∂f, D^{0,1}∂̄g⟩ + (√−1/4π²)⟨ric_ω, ∂f∧∂̄g⟩ − (1/4π²)⟨∂f∧∂̄g, R^E⟩",
    "symbolic",
)
def check_c2(context: CheckContext) -> CheckOutcome:
    return compared(context.engine.extract_C(2, "f", "g"), closed_forms.C2("f", "g"))


@register("C1_antisymmetry", "C₁(f, g) − C₁(g, f) = √−1{f, g}", "symbolic")
def check_c1_antisymmetry(context: CheckContext) -> CheckOutcome:
    engine = context.engine
    defect = antisymmetry_defect(engine.extract_C(1, "f", "g"), engine.extract_C(1, "g", "f"), closed_forms.poisson())
    return exact(defect)


@register("associativity", "Σ C_k ħ^k ассоциативно до порядка ħ²: замкнутые формы и выведенные C_k", "symbolic")
def check_associativity(context: CheckContext) -> CheckOutcome:
    outcomes: Dict[str, CheckOutcome] = {}
    for k in range(3):
        outcomes[f"closed k={k}"] = compared(associativity_defect(k), TensorPolynomial.zero())
        derived = associativity_defect(k, coefficients=context.engine.extract_C)
        outcomes[f"derived k={k}"] = compared(derived, TensorPolynomial.zero())
    return _merge(outcomes)


@register("quartic_cross", "𝒦[Q̃₂f, Q̃₂g](0,0) = (1/π²)(½ f_{;īq̄} g_{;iq} + f_{;qq̄} g_{;iī})", "symbolic")
def check_quartic_cross(context: CheckContext) -> CheckOutcome:
    return compared(context.engine.quartic_cross("f", "g"), closed_forms.quartic_cross("f", "g"))


@register("gradient_J2_cross", "𝒦[Q₁f, 𝒦[1, ∂g Z J₂]](0,0)", "symbolic")
def check_gradient_j2_cross(context: CheckContext) -> CheckOutcome:
    return compared(context.engine.gradient_J2_cross("f", "g"), closed_forms.gradient_J2_cross("f", "g"))


@register("gradient_third_cross", "𝒦[Q₁f, Q̃₃g](0,0) и соглашение о спаривании ⟨∂̄f, ∂g⟩", "symbolic")
def check_gradient_third_cross(context: CheckContext) -> CheckOutcome:
    return compared(context.engine.gradient_third_cross("f", "g"), closed_forms.gradient_third_cross("f", "g"))


def random_kernel(rng: random.Random, prefix: str, max_degree: int = 4) -> KernelPolynomial:
    """Случайное ядро из 1-3 мономов со свободными индексами"""
    result = KernelPolynomial.zero()
    for term in range(rng.randint(1, 3)):
        degree = rng.randint(0, max_degree)
        kinds = [rng.choice(("z", "zb", "zp", "zbp")) for _ in range(degree)]
        text = " ".join(f"{kind}[{prefix}{term}x{pos}]" for pos, kind in enumerate(kinds))
        coef = Fraction(rng.choice((-3, -2, -1, 1, 2, 3)), rng.randint(1, 4))
        result = result + tp(text, coef, pi=rng.randint(-1, 1), cls=KernelPolynomial)
    return result


@register("compose_routes", "𝒦[F, G] по правилу Вика = 𝒦[F, G] через форму Фока", "symbolic")
def check_compose_routes(context: CheckContext) -> CheckOutcome:
    rng = random.Random(context.config.seed)
    mismatches = []
    for pair in range(COMPOSE_PAIRS):
        first = random_kernel(rng, "a")
        second = random_kernel(rng, "c")
        difference = compose(first, second) - compose_fock(first, second)
        if not difference.is_zero():
            mismatches.append(f"пара {pair}: {difference.render()}")
    return CheckOutcome(not mismatches, "; ".join(mismatches[:3]) or "0")


def random_word(rng: random.Random, number: int, max_length: int = 4) -> str:
    letters = [rng.choice(("b", "z", "zb", "bp")) for _ in range(rng.randint(1, max_length))]
    body = " ".join(f"{kind}[w{number}x{pos}]" for pos, kind in enumerate(letters))
    return f"sc {body}" if rng.random() < 0.5 else body


@register("normal_order_fock", "нормальное упорядочение сохраняет матрицу в усечённом пространстве Фока", "symbolic")
def check_normal_order_fock(context: CheckContext) -> CheckOutcome:
    rng = random.Random(context.config.seed)
    sampler = CoreSampler(context.config.seed)
    worst = 0.0
    for number in range(NORMAL_ORDER_WORDS):
        expression = op(random_word(rng, number), Fraction(rng.randint(1, 5), rng.randint(1, 3)))
        left = fock_oracle(expression, FOCK_TRUNCATION, sampler)
        right = fock_oracle(normal_order(expression), FOCK_TRUNCATION, sampler)
        error = relative_error(left, right)
        worst = max(worst, error)
    return CheckOutcome(worst <= 1e-10, f"наибольшее относительное расхождение {worst:.2e}")


# численные проверки


def _row(model: str, p: Any, observable: str, quantity: str, value: Any) -> List[Row]:
    if isinstance(value, complex) or np.iscomplexobj(value):
        value = complex(value)
        return [
            {"model": model, "p": p, "observable": observable, "quantity": f"{quantity}.re", "value": value.real},
            {"model": model, "p": p, "observable": observable, "quantity": f"{quantity}.im", "value": value.imag},
        ]
    return [{"model": model, "p": p, "observable": observable, "quantity": quantity, "value": float(value)}]


def _fit_record(result: AsymptoticFit) -> Dict[str, Any]:
    coefficients = [
        [float(np.real(value)), float(np.imag(value))] if np.iscomplexobj(result.coefficients) else float(value)
        for value in result.coefficients
    ]
    return {
        "pRange": [result.samples[0][0], result.samples[-1][0]],
        "coefficients": coefficients,
        "residual": result.residual,
        "condition": result.condition,
    }


def _b1_f(model: ManifoldModel, name: str, x: np.ndarray) -> np.ndarray:
    """sc f/8π − Δf/4π"""
    observable = model.observable(name)
    return model.sc(x) * observable.value(x) / (8 * np.pi) - observable.laplacian(x) / (4 * np.pi)


def _below_floor(name: str) -> str:
    return f"{name}: нет уровней p ≥ {ASYMPTOTIC_FLOOR[name]}, асимптотика не проверялась"


@register("density", "P_p(x, x) = p^n + b₁ p^{n−1} + ..., b₁ = sc/8π", "numeric")
def check_density(context: CheckContext) -> CheckOutcome:
    rows: List[Row] = []
    fits: Dict[str, Dict[str, Any]] = {}
    failures = []
    notes = []
    for name in context.config.models():
        model = context.model(name)
        x = SAMPLE_POINTS[name][:1]
        samples = []
        worst = 0.0
        ps = context.p_values(DENSITY_RANGE, name, floor=True)
        if not ps:
            notes.append(_below_floor(name))
            continue
        for p in ps:
            value = float(bergman_density(model, p, x, level_data(model, p, context.config.quadrature_order))[0])
            samples.append((p, value))
            # dim/объём: точно на CP¹, на торе с точностью до e^{−cp}
            exact_value = model.dimension(p) / model.volume
            worst = max(worst, abs(value - exact_value) / exact_value)
            rows += _row(name, p, "one", "density", value)
        result = fit(samples, model.n, max_order=2)
        fits[f"{name}.density"] = _fit_record(result)
        gaps = (abs(result.coefficient(0) - 1.0), abs(result.coefficient(1) - float(model.sc(x)[0]) / (8 * np.pi)))
        if worst > context.tolerance("density") or max(gaps) > context.tolerance("fit"):
            failures.append(f"{name}: плотность {worst:.2e}, a₀ {gaps[0]:.2e}, a₁ {gaps[1]:.2e}")
    return CheckOutcome(not failures, "; ".join(failures + notes) or "0", rows, fits)


@register("riemann_roch", "dim H⁰(X, L^p) = p∫ω + (1/2)∫c₁(X)", "numeric")
def check_riemann_roch(context: CheckContext) -> CheckOutcome:
    rows: List[Row] = []
    failures = []
    for name in context.config.models():
        model = context.model(name)
        for p in context.p_values(EXACT_RANGE, name):
            dimension, predicted = riemann_roch_check(model, p)
            rows += _row(name, p, "", "dimension", dimension)
            if predicted != dimension:
                failures.append(f"{name}, p = {p}: {dimension} ≠ {predicted}")
    return CheckOutcome(not failures, "; ".join(failures) or "0", rows)


@register("gram", "квадратура воспроизводит замкнутую матрицу Грама базиса сечений", "numeric")
def check_gram(context: CheckContext) -> CheckOutcome:
    rows: List[Row] = []
    worst = 0.0
    for name in context.config.models():
        model = context.model(name)
        for p in context.p_values(EXACT_RANGE, name):
            matrix = gram(model, p, context.config.quadrature_order)
            exact_matrix = model.exact_gram(p)
            gap = 0.0 if exact_matrix is None else float(np.max(np.abs(matrix - exact_matrix)))
            worst = max(worst, gap)
            rows += _row(name, p, "", "gram_gap", gap)
    # gram() бросает QuadratureError при расхождении с замкнутой формой
    return CheckOutcome(True, f"наибольшее расхождение {worst:.2e}", rows)


def _chart_partner(model: ManifoldModel, p: int, x: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """|P_p(x, y)|² и P_p(x, x) во второй тривиализации"""
    data = level_data(model, p)
    if model.name == "cp1":
        left = model.unitary_values(p, x, chart="south") @ data.coefficients  # type: ignore[call-arg]
        right = model.unitary_values(p, y, chart="south") @ data.coefficients  # type: ignore[call-arg]
    else:
        shift = np.array([0.0, 1.0])
        left = model.unitary_values(p, x + shift) @ data.coefficients
        right = model.unitary_values(p, y + shift) @ data.coefficients
    kernel = np.abs(left @ right.conj().T) ** 2
    return kernel, np.sum(np.abs(left) ** 2, axis=1)


@register("frame_invariance", "P_p(x, x) и |P_p(x, y)|² не зависят от тривиализации", "numeric")
def check_frame_invariance(context: CheckContext) -> CheckOutcome:
    rows: List[Row] = []
    worst = 0.0
    for name in context.config.models():
        model = context.model(name)
        x = SAMPLE_POINTS[name][:1]
        y = SAMPLE_POINTS[name][1:]
        for p in context.p_values(EXACT_RANGE, name)[:5]:
            data = level_data(model, p)
            kernel = np.abs(bergman_kernel(model, p, x, y, data)) ** 2
            density = bergman_density(model, p, x, data)
            other_kernel, other_density = _chart_partner(model, p, x, y)
            gap = max(float(np.max(np.abs(kernel - other_kernel))), float(np.max(np.abs(density - other_density))))
            worst = max(worst, gap)
            rows += _row(name, p, "one", "chart_gap", gap)
    return CheckOutcome(worst <= context.tolerance("density"), f"наибольшее расхождение {worst:.2e}", rows)


@register("toeplitz_height", "T_{f,p} высоты на CP¹: собственные значения (p−2j)/(p+2), ‖T_{f,p}‖ → ‖f‖_∞", "numeric")
def check_toeplitz_height(context: CheckContext) -> CheckOutcome:
    if "cp1" not in context.config.models():
        return CheckOutcome(True, "модель cp1 не выбрана", skipped=True)
    model = context.model("cp1")
    height = model.observable("height").value
    rows: List[Row] = []
    worst = 0.0
    gaps = []
    for p in context.p_values(NORM_RANGE, "cp1"):
        operator = toeplitz(model, p, height, level_data(model, p, context.config.quadrature_order))
        eigen = np.sort(np.linalg.eigvalsh(operator.matrix))
        expected = np.sort(np.array([(p - 2 * j) / (p + 2) for j in range(p + 1)]))
        worst = max(worst, float(np.max(np.abs(eigen - expected))))
        norm = operator_norm(operator)
        worst = max(worst, abs(norm - p / (p + 2)))
        gaps.append((p, 1 - norm))
        rows += _row("cp1", p, "height", "norm", norm)
    result = fit(gaps, n=-1, max_order=3)
    values = np.array([p * gap for p, gap in gaps])
    relative = result.residual / float(np.linalg.norm(values))
    fits = {"cp1.height.norm_gap": _fit_record(result)}
    passed = worst <= context.tolerance("density") and relative < 1e-3
    return CheckOutcome(passed, f"отклонение спектра {worst:.2e}, относительная невязка {relative:.2e}", rows, fits)


@register("operator_norm", "‖T_{f,p}‖ ≤ ‖f‖_∞", "numeric")
def check_operator_norm(context: CheckContext) -> CheckOutcome:
    rows: List[Row] = []
    excess = 0.0
    for name in context.config.models():
        model = context.model(name)
        for p in context.p_values(NORM_RANGE, name)[::10]:
            data = level_data(model, p, context.config.quadrature_order)
            for observable in sorted(model.observables):
                values = model.observables[observable].value
                norm = operator_norm(toeplitz(model, p, values, data))
                bound = float(np.max(np.abs(values(data.nodes))))
                excess = max(excess, norm - bound)
                rows += _row(name, p, observable, "norm", norm)
    return CheckOutcome(excess <= 1e-8, f"наибольшее превышение {excess:.2e}", rows)


@register("toeplitz_diag", "T_{f,p}(x, x) = f p^n + b_{1,f} p^{n−1} + ..., b_{1,f} = sc f/8π − Δf/4π", "numeric")
def check_toeplitz_diag(context: CheckContext) -> CheckOutcome:
    rows: List[Row] = []
    fits: Dict[str, Dict[str, Any]] = {}
    failures = []
    notes = []
    for name in context.config.models():
        model = context.model(name)
        x = SAMPLE_POINTS[name][:1]
        ps = context.p_values(DIAG_RANGE, name, floor=True)
        if not ps:
            notes.append(_below_floor(name))
            continue
        samples: Dict[str, List[Tuple[int, float]]] = {observable: [] for observable in sorted(model.observables)}
        for p in ps:
            data = level_data(model, p, context.config.quadrature_order)
            for observable, series in samples.items():
                value = float(np.real(toeplitz_diag(model, p, model.observables[observable].value, x, data)[0]))
                series.append((p, value))
                rows += _row(name, p, observable, "toeplitz_diag", value)
        for observable, series in samples.items():
            result = fit(series, model.n, max_order=DIAG_ORDER)
            fits[f"{name}.{observable}"] = _fit_record(result)
            a0_gap = abs(result.coefficient(0) - float(model.observables[observable].value(x)[0]))
            expected = float(_b1_f(model, observable, x)[0])
            a1_gap = abs(result.coefficient(1) - expected)
            if a0_gap > context.tolerance("fit") or a1_gap > context.tolerance("relative") * max(abs(expected), 1.0):
                failures.append(f"{name}/{observable}: a₀ {a0_gap:.2e}, a₁ {a1_gap:.2e}")
    return CheckOutcome(not failures, "; ".join(failures + notes) or "0", rows, fits)


def _b1_fg(model: ManifoldModel, f: str, g: str, x: np.ndarray) -> complex:
    """b₁fg − (fΔg + gΔf)/4π + ∇f·∇g/4π + (√−1/2){f, g}"""
    fo, go = model.observable(f), model.observable(g)
    fv, gv = fo.value(x)[0], go.value(x)[0]
    value = float(model.sc(x)[0]) * fv * gv / (8 * np.pi)
    value -= (fv * go.laplacian(x)[0] + gv * fo.laplacian(x)[0]) / (4 * np.pi)
    value += model.gradient_dot(f, g)(x)[0] / (4 * np.pi)
    return complex(value) + 0.5j * model.bracket(f, g)(x)[0]


@register("product_diag", "(T_f∘T_g)(x, x) = fg p^n + b_{1,f,g} p^{n−1} + ...", "numeric")
def check_product_diag(context: CheckContext) -> CheckOutcome:
    rows: List[Row] = []
    fits: Dict[str, Dict[str, Any]] = {}
    failures = []
    notes = []
    for name in context.config.models():
        model = context.model(name)
        x = SAMPLE_POINTS[name][:1]
        ps = context.p_values(DIAG_RANGE, name, floor=True)
        if not ps:
            notes.append(_below_floor(name))
            continue
        f, g = model.pairs()[0]
        fv = model.observable(f).value
        gv = model.observable(g).value
        samples = []
        for p in ps:
            data = level_data(model, p, context.config.quadrature_order)
            value = complex(product_diag(model, p, fv, gv, x, data)[0])
            samples.append((p, value))
            rows += _row(name, p, f"{f}*{g}", "product_diag", value)
        result = fit(samples, model.n, max_order=DIAG_ORDER)
        fits[f"{name}.{f}*{g}"] = _fit_record(result)
        a0_gap = abs(result.coefficient(0) - fv(x)[0] * gv(x)[0])
        expected = _b1_fg(model, f, g, x)
        a1_gap = abs(result.coefficient(1) - expected)
        if a0_gap > context.tolerance("fit") or a1_gap > context.tolerance("relative") * max(abs(expected), 1.0):
            failures.append(f"{name}/{f}*{g}: a₀ {a0_gap:.2e}, a₁ {a1_gap:.2e}")
    return CheckOutcome(not failures, "; ".join(failures + notes) or "0", rows, fits)


@register("commutator", "[T_{f,p}, T_{g,p}] = (√−1/p)T_{{f,g},p} + 𝒪(p⁻²)", "numeric")
def check_commutator(context: CheckContext) -> CheckOutcome:
    rows: List[Row] = []
    failures = []
    for name in context.config.models():
        model = context.model(name)
        for f, g in model.pairs()[:2]:
            ps = context.p_values(SLOPE_RANGE, name)[::6]
            defects = []
            for p in ps:
                defect = commutator_defect(model, p, f, g, level_data(model, p, context.config.quadrature_order))
                defects.append(defect)
                rows += _row(name, p, f"{f},{g}", "commutator_defect", defect)
            slope = loglog_slope(ps, defects)
            rows += _row(name, "", f"{f},{g}", "slope", slope)
            if abs(slope + 1) > context.tolerance("slope"):
                failures.append(f"{name}/{f},{g}: наклон {slope:.3f}")
    return CheckOutcome(not failures, "; ".join(failures) or "0", rows)


TORUS_MODES = ((1, 0), (1, 1))


def _torus_q_fits(context: CheckContext, ps: List[int], rows: List[Row]) -> Dict[Tuple[int, int], AsymptoticFit]:
    """Собственные значения (1/p)K_p на гармониках тора: 1 − π(m² + n²)/p + ..."""
    model = context.model("torus")
    x = SAMPLE_POINTS["torus"][:1]
    results = {}
    for m, n in TORUS_MODES:
        mode = fourier_mode(m, n)
        samples = []
        for p in ps:
            value = q_apply(model, p, mode, x, level_data(model, p, context.config.quadrature_order))[0]
            eigenvalue = float(np.real(value / mode(x)[0]))
            samples.append((p, eigenvalue))
            rows += _row("torus", p, f"mode({m},{n})", "q_eigenvalue", eigenvalue)
        results[(m, n)] = fit(samples, 0, max_order=4)
    return results


@register("donaldson_q", "(1/p^n)K_p f = f − (1/8πp)(−sc·f + 2Δf) + 𝒪(p^{−3/2})", "numeric")
def check_donaldson_q(context: CheckContext) -> CheckOutcome:
    rows: List[Row] = []
    fits: Dict[str, Dict[str, Any]] = {}
    failures = []
    notes = []
    models = context.config.models()
    if "torus" in models:
        ps = context.p_values(Q_RANGE, "torus", floor=True)
        if not ps:
            notes.append(_below_floor("torus"))
        else:
            for (m, n), result in _torus_q_fits(context, ps, rows).items():
                fits[f"torus.mode({m},{n})"] = _fit_record(result)
                expected = -np.pi * (m**2 + n**2)
                if abs(result.coefficient(1) - expected) > context.tolerance("relative") * abs(expected):
                    failures.append(f"torus/mode({m},{n}): a₁ = {result.coefficient(1):.4f}")
    if "cp1" in models:
        model = context.model("cp1")
        x = SAMPLE_POINTS["cp1"]
        observable = model.observable("height")
        ps = context.p_values(Q_RANGE, "cp1")[::5]
        residuals = []
        for p in ps:
            value = q_apply(model, p, observable.value, x, level_data(model, p, context.config.quadrature_order))
            residual = float(np.max(np.abs(value - q_expected(model, p, observable, x))))
            residuals.append(residual)
            rows += _row("cp1", p, "height", "q_residual", residual)
        slope = loglog_slope(ps, residuals)
        rows += _row("cp1", "", "height", "slope", slope)
        if slope > -1.4:
            failures.append(f"cp1/height: наклон {slope:.3f}")
    return CheckOutcome(not failures, "; ".join(failures + notes) or "0", rows, fits)
