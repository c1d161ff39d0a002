"""
Замкнутые формулы коэффициентов разложения в индексной записи в точке x₀.

Все формулы записаны для коммутирующих R^E (абелев случай) и вещественных наблюдаемых.
"""

import logging
from fractions import Fraction

from src.dictionary import dictionary_lookup
from src.tensors import TensorPolynomial, tp, tsum

logger = logging.getLogger(__name__)

B2E_VARIANTS = ("index", "footnote")


def b1() -> TensorPolynomial:
    """b₁ = (1/π)(R_{kk̄mm̄} + R^E_{mm̄})"""
    return tp("R[k k m m]", pi=-1) + tp("RE[m m]", pi=-1)


def b1_invariant() -> TensorPolynomial:
    """b₁ = sc/8π + (√−1/2π) R^E_Λ"""
    return tp("sc", Fraction(1, 8), pi=-1) + dictionary_lookup("i_RE_lambda").scale(Fraction(1, 2), pi=-1)


def b2_curvature() -> TensorPolynomial:
    return tsum(
        tp("lapsc", Fraction(-1, 48)),
        tp("R[k l m q] R[l k q m]", Fraction(1, 6)),
        tp("R[l l m q] R[k k q m]", Fraction(-2, 3)),
        tp("R[l l q q] R[k k m m]", Fraction(1, 2)),
    )


def b2_bundle(variant: str = "index") -> TensorPolynomial:
    """
    Вклад кривизны R^E в π²b₂
    :param variant: "index" - запись с (−R^E_{kk̄;mm̄} + 3R^E_{mk̄;km̄})/4,
        "footnote" - та же скобка, заменённая на R^E_{kk̄;mm̄}/2 по тождеству Бьянки
    """
    base = tsum(
        tp("RE[q q] R[k k m m]"),
        tp("RE[m q] R[k k q m]", -1),
        tp("RE[q q] RE[m m]", Fraction(1, 2)),
        tp("RE[m q] RE[q m]", Fraction(-1, 2)),
    )
    if variant == "footnote":
        return base + tp("RE[k k ; m m~]", Fraction(1, 2))
    return base + tp("RE[k k ; m m~]", Fraction(-1, 4)) + tp("RE[m k ; k m~]", Fraction(3, 4))


def b2(variant: str = "index") -> TensorPolynomial:
    """b₂ = (1/π²)(b_{2ℂ} + b_{2E})"""
    return (b2_curvature() + b2_bundle(variant)).scale(1, pi=-2)


def projected_J2() -> TensorPolynomial:
    """(𝒫J₂𝒫)(0,0) = sc/16π"""
    return tp("sc", Fraction(1, 16), pi=-1)


def resolvent_sandwich() -> TensorPolynomial:
    """(𝓛⁻¹𝒪₂𝒫𝒪₂𝓛⁻¹)(0,0) = (1/4π²)(R_{mm̄kk̄} + R^E_{kk̄})²"""
    return tsum(
        tp("R[m m k k] R[l l q q]"),
        tp("R[m m k k] RE[q q]", 2),
        tp("RE[k k] RE[q q]"),
    ).scale(Fraction(1, 4), pi=-2)


def _ricci_bracket_square() -> TensorPolynomial:
    """((4/3)R_{qm̄mℓ̄} + R^E_{qℓ̄})((4/3)R_{ℓk̄kq̄} + R^E_{ℓq̄})"""
    return tsum(
        tp("R[q m m l] R[l k k q]", Fraction(16, 9)),
        tp("R[q m m l] RE[l q]", Fraction(8, 3)),
        tp("RE[q l] RE[l q]"),
    )


def resolvent_square() -> TensorPolynomial:
    """(𝒫𝒪₂𝓛⁻²𝒪₂𝒫)(0,0)"""
    return tp("R[m k q l] R[k m l q]", Fraction(1, 36), pi=-2) + _ricci_bracket_square().scale(Fraction(1, 4), pi=-2)


def iterated_resolvent() -> TensorPolynomial:
    """π²(𝓛⁻¹𝒫^⊥𝒪₂𝓛⁻¹𝒪₂𝒫)(0,0)"""
    return tsum(
        tp("R[m k q l] R[k m l q]", Fraction(-25, 216)),
        tp("R[k k q l] R[m m l q]", Fraction(-47, 54)),
        tp("R[k k l l] R[m m q q]", Fraction(1, 8)),
        tp("RE[l l] R[m m q q]", Fraction(1, 4)),
        tp("RE[q l] R[m m l q]", Fraction(-7, 6)),
        tp("RE[l l] RE[q q]", Fraction(1, 8)),
        tp("RE[q l] RE[l q]", Fraction(-3, 8)),
    )


def fourth_order_resolvent() -> TensorPolynomial:
    """−π²(𝓛⁻¹𝒪₄𝒫)(0,0)"""
    return tsum(
        tp("lapsc", Fraction(-1, 96)),
        tp("R[m s q t] R[s m t q]", Fraction(23, 108)),
        tp("R[s s q t] R[m m t q]", Fraction(41, 54)),
        tp("R[m m q k] RE[k q]"),
        tp("RE[m m ; q q~]", Fraction(-1, 8)),
        tp("RE[q m ; m q~]", Fraction(3, 8)),
        tp("RE[k q] RE[q k]", Fraction(1, 4)),
    )


def b1_f(f: str = "f") -> TensorPolynomial:
    """b_{1,f} = sc f/8π + (√−1/2π) R^E_Λ f − Δf/4π"""
    return (b1_invariant() * tp(f)) + dictionary_lookup("laplacian", f).scale(Fraction(-1, 4), pi=-1)


def curvature_hessian_f(f: str = "f") -> TensorPolynomial:
    """b_{ℂf} = R_{mm̄qq̄} f_{kk̄} − R_{ℓk̄kq̄} f_{qℓ̄}"""
    return tp(f"R[m m q q] {f}[k k~]") - tp(f"R[l k k q] {f}[q l~]")


def bundle_gradient_f(f: str = "f") -> TensorPolynomial:
    """b_{Ef1}: первые производные f против производных R^E"""
    return tsum(
        tp(f"{f}[u] RE[k k ; u~]", Fraction(1, 6)),
        tp(f"{f}[u] RE[q u ; q~]", Fraction(-5, 12)),
        tp(f"{f}[u] RE[m u ; m~]", Fraction(1, 4)),
        tp(f"RE[k k ; u] {f}[u~]", Fraction(1, 6)),
        tp(f"RE[u q ; q] {f}[u~]", Fraction(-5, 12)),
        tp(f"RE[u m ; m] {f}[u~]", Fraction(1, 4)),
    )


def bundle_hessian_f(f: str = "f") -> TensorPolynomial:
    """b_{Ef2} = f_{kk̄} R^E_{qq̄} − f_{qℓ̄} R^E_{ℓq̄}"""
    return tp(f"{f}[k k~] RE[q q]") - tp(f"{f}[q l~] RE[l q]")


def b2_f(f: str = "f", variant: str = "index") -> TensorPolynomial:
    """π²b_{2,f} = π²b₂ f + Δ²f/32 + b_{ℂf} + b_{Ef1} + b_{Ef2}, результат без множителя π²"""
    body = tsum(
        (b2_curvature() + b2_bundle(variant)) * tp(f),
        dictionary_lookup("laplacian_squared", f).scale(Fraction(1, 32)),
        curvature_hessian_f(f),
        bundle_gradient_f(f),
        bundle_hessian_f(f),
    )
    return body.scale(1, pi=-2)


def second_order_kernel_f(f: str = "f") -> TensorPolynomial:
    """Σ_{|α|=2} 𝒦[1, ∂^αf Z^α/α! J₂](0,0)"""
    return tsum(
        tp(f"{f}[k k~] R[m m q q]", Fraction(1, 2), pi=-2),
        tp(f"{f}[k k~] RE[q q]", Fraction(1, 2), pi=-2),
        tp(f"{f}[q l~] R[l k k q]", Fraction(-2, 3), pi=-2),
        tp(f"{f}[q l~] RE[l q]", Fraction(-1, 2), pi=-2),
    )


def fourth_order_taylor_f(f: str = "f") -> TensorPolynomial:
    """Σ_{|α|=4} 𝒦[1, ∂^αf Z^α/α!](0,0) = (1/2π²) f_{iqīq̄}"""
    return tp(f"{f}[i q i~ q~]", Fraction(1, 2), pi=-2)


def third_order_kernel_f(f: str = "f") -> TensorPolynomial:
    """(1/π²) K_{3f}: вклад J₃ в b_{2,f}"""
    return tsum(
        tp(f"R[k k m m ; u~] {f}[u]", Fraction(1, 6)),
        tp(f"R[k k m u ; m~] {f}[u]", Fraction(-1, 3)),
        tp(f"R[k k m m ; u] {f}[u~]", Fraction(1, 6)),
        tp(f"R[k k u m ; m] {f}[u~]", Fraction(-1, 3)),
        tp(f"{f}[u] RE[k k ; u~]", Fraction(1, 6)),
        tp(f"{f}[u] RE[q u ; q~]", Fraction(-1, 2)),
        tp(f"{f}[u] RE[m u ; m~]", Fraction(1, 3)),
        tp(f"RE[k k ; u] {f}[u~]", Fraction(1, 6)),
        tp(f"RE[u q ; q] {f}[u~]", Fraction(-1, 2)),
        tp(f"RE[u m ; m] {f}[u~]", Fraction(1, 3)),
    ).scale(1, pi=-2)


def b1_fg(f: str = "f", g: str = "g") -> TensorPolynomial:
    """b_{1,f,g} = b₁fg − (fΔg + gΔf)/4π + (1/2π)⟨∂̄f, ∂g⟩"""
    return tsum(
        b1_invariant() * tp(f"{f} {g}"),
        (tp(f) * dictionary_lookup("laplacian", g)).scale(Fraction(-1, 4), pi=-1),
        (tp(g) * dictionary_lookup("laplacian", f)).scale(Fraction(-1, 4), pi=-1),
        dictionary_lookup("pair_dbar_f_d_g", f, g).scale(Fraction(1, 2), pi=-1),
    )


def b2_fg(f: str = "f", g: str = "g", variant: str = "index") -> TensorPolynomial:
    """b_{2,f,g} для вещественных f, g"""
    cross = tsum(
        dictionary_lookup("pair_dbar_f_d_lap_g", f, g).scale(Fraction(-1, 8)),
        dictionary_lookup("pair_dbar_lap_f_d_g", f, g).scale(Fraction(-1, 8)),
        dictionary_lookup("pair_dbar_f_d_g", f, g) * b1().scale(Fraction(1, 2), pi=1),
        dictionary_lookup("pair_dbar_f_wedge_d_g_RE", f, g).scale(Fraction(-1, 4)),
        dictionary_lookup("lap_f_lap_g", f, g).scale(Fraction(1, 16)),
        dictionary_lookup("pair_D01_dbar_f_D10_d_g", f, g).scale(Fraction(1, 8)),
    )
    return tsum(
        tp(f) * b2_f(g, variant),
        tp(g) * b2_f(f, variant),
        -(tp(f"{f} {g}") * b2(variant)),
        cross.scale(1, pi=-2),
    )


def C1(f: str = "f", g: str = "g") -> TensorPolynomial:
    """C₁(f, g) = −(1/2π)⟨∂f, ∂̄g⟩ = −(1/π) f_u g_ū"""
    return dictionary_lookup("pair_d_f_dbar_g", f, g).scale(Fraction(-1, 2), pi=-1)


def C2(f: str = "f", g: str = "g") -> TensorPolynomial:
    """C₂(f, g) = (1/8π²)⟨D^{1,0}∂f, D^{0,1}∂̄g⟩ + (√−1/4π²)⟨ric_ω, ∂f∧∂̄g⟩ − (1/4π²)⟨∂f∧∂̄g, R^E⟩"""
    return tsum(
        dictionary_lookup("pair_D10_d_f_D01_dbar_g", f, g).scale(Fraction(1, 8), pi=-2),
        dictionary_lookup("i_pair_ric_d_f_wedge_dbar_g", f, g).scale(Fraction(1, 4), pi=-2),
        dictionary_lookup("pair_d_f_wedge_dbar_g_RE", f, g).scale(Fraction(-1, 4), pi=-2),
    )


def laplacian_of_pairing(f: str = "f", g: str = "g") -> TensorPolynomial:
    """Δ⟨∂f, ∂̄g⟩ = ⟨∂Δf, ∂̄g⟩ + ⟨∂f, ∂̄Δg⟩ − 2⟨∇∂f, ∇∂̄g⟩ − 2 ric(w_m, w̄_q) w̄_m(g) w_q(f)"""
    return tsum(
        dictionary_lookup("pair_d_lap_f_dbar_g", f, g),
        dictionary_lookup("pair_d_f_dbar_lap_g", f, g),
        dictionary_lookup("pair_nabla_d_f_nabla_dbar_g", f, g).scale(-2),
        dictionary_lookup("ric_frame_dbar_g_d_f", f, g).scale(-2),
    )


def b1_of_C1(f: str = "f", g: str = "g") -> TensorPolynomial:
    """b_{1,C₁(f,g)} = b₁ C₁(f, g) − ΔC₁(f, g)/4π, ΔC₁ = −(1/2π)Δ⟨∂f, ∂̄g⟩"""
    lap = laplacian_of_pairing(f, g).scale(Fraction(-1, 2), pi=-1)
    return b1_invariant() * C1(f, g) + lap.scale(Fraction(-1, 4), pi=-1)


def poisson(f: str = "f", g: str = "g") -> TensorPolynomial:
    return dictionary_lookup("poisson", f, g)


def quartic_cross(f: str = "f", g: str = "g") -> TensorPolynomial:
    """𝒦[Q̃₂(f), Q̃₂(g)](0,0) = (1/π²)(½ f_{īq̄} g_{iq} + f_{qq̄} g_{iī})"""
    return tp(f"{f}[i~ q~] {g}[i q]", Fraction(1, 2), pi=-2) + tp(f"{f}[q q~] {g}[i i~]", 1, pi=-2)


def _gradient_bracket(f: str, g: str) -> TensorPolynomial:
    """f_ū g_v [δ_uv(R_{ss̄qq̄} + R^E_{qq̄}) − (4/3) R_{uk̄kv̄} − R^E_{uv̄}]"""
    return tsum(
        tp(f"{f}[u~] {g}[u] R[s s q q]"),
        tp(f"{f}[u~] {g}[u] RE[q q]"),
        tp(f"{f}[u~] {g}[v] R[u k k v]", Fraction(-4, 3)),
        tp(f"{f}[u~] {g}[v] RE[u v]", -1),
    )


def gradient_J2_cross(f: str = "f", g: str = "g") -> TensorPolynomial:
    """𝒦[Q₁(f), 𝒦[1, ∂g Z J₂]](0,0)"""
    return _gradient_bracket(f, g).scale(Fraction(1, 2), pi=-2)


def gradient_third_cross(f: str = "f", g: str = "g") -> TensorPolynomial:
    """𝒦[Q₁(f), Q̃₃(g)](0,0)"""
    return (tp(f"{f}[u~] {g}[u i i~]") + _gradient_bracket(f, g).scale(Fraction(1, 2))).scale(1, pi=-2)
