"""
Rates for supermartingales and almost-supermartingales

The learnable rate of the Robbins-Siegmund theorem is offered twice: as the
exact composite built step by step from the calculus (rs_learnable_pipeline),
and as the closed form c̄·(ρ(λ/8)(K+σ(λ/16))/(λε))² that dominates it.
"""
import logging

from django.conf import settings

from .bounds import (
    BoundednessModulus, DeterministicRate, LearnableRate,
    check_positive,
)
from .calculus import (
    PRODUCT, SUM,
    combine_boundedness, combine_learnable, learnable_from_boundedness,
)
from .exceptions import InvalidParameterError
from .provenance import Provenance, rule

logger = logging.getLogger(__name__)


def _check_K(K):
    K = check_positive(K, "K")
    if not K > 1.0:
        raise InvalidParameterError("K", K, "a real greater than 1")
    return K


def check_standing_assumptions(rho, sigma, grid=None):
    """ρ and σ must be nonincreasing with values ≥ 1 (checked on the grid)"""
    for name, modulus in (("rho", rho), ("sigma", sigma)):
        if not modulus.is_nonincreasing(grid):
            raise InvalidParameterError(name, modulus.provenance.rule, "a nonincreasing modulus")
        if not modulus.satisfies_floor(grid):
            raise InvalidParameterError(name, modulus.provenance.rule, "a modulus with values ≥ 1")


@rule("supermartingale_learnable", "learnable rate of uniform convergence")
def supermartingale_learnable(K, c=None):
    """(λ, ε) ↦ c·(K/(λε))² for a nonnegative supermartingale with E[U₀] < K"""
    K = _check_K(K)
    c = float(settings.QRS_UNIVERSAL_CONSTANT if c is None else c)
    return LearnableRate(
        fn=lambda lam, eps: c * (K / (lam * eps)) ** 2,
        provenance=Provenance("supermartingale_learnable", {"K": K, "c": c}),
    )


@rule("rs_u_learnable", "learnable rate of uniform convergence")
def rs_u_learnable(K, sigma, c=None):
    """φ₁(λ, ε) = 4c((K+σ(λ/2))/(λε))², the rate of the supermartingale U"""
    K = _check_K(K)
    c = float(settings.QRS_UNIVERSAL_CONSTANT if c is None else c)
    return LearnableRate(
        fn=lambda lam, eps: 4 * c * ((K + sigma(lam / 2)) / (lam * eps)) ** 2,
        provenance=Provenance("rs_u_learnable", {"K": K, "c": c}, children=(("sigma", sigma.provenance),)),
    ).labelled("φ₁")


@rule("rs_u_boundedness", "modulus of uniform boundedness")
def rs_u_boundedness(K, sigma):
    """χ₁(λ) = 2(K+σ(λ/2))/λ, a modulus for U"""
    K = _check_K(K)
    return BoundednessModulus(
        fn=lambda lam: 2 * (K + sigma(lam / 2)) / lam,
        provenance=Provenance("rs_u_boundedness", {"K": K}, children=(("sigma", sigma.provenance),)),
        floor=True,
    ).labelled("χ₁")


@rule("rs_v_boundedness", "modulus of uniform boundedness")
def rs_v_boundedness(K, sigma):
    """χ₃(λ) = 5(K+σ(λ/4))/λ, a modulus for the sum of the discounted B terms"""
    K = _check_K(K)
    return BoundednessModulus(
        fn=lambda lam: 5 * (K + sigma(lam / 4)) / lam,
        provenance=Provenance("rs_v_boundedness", {"K": K}, children=(("sigma", sigma.provenance),)),
        floor=True,
    ).labelled("χ₃")


def rs_chi2(K, sigma):
    """χ₂(λ) = χ₁(λ/2) + σ(λ/2), a modulus for the discounted process X̃"""
    return combine_boundedness(SUM, rs_u_boundedness(K, sigma), sigma).labelled("χ₂")


def rs_phi2(K, sigma, c=None):
    """φ₂(λ, ε), the rate of X̃ = U + partial sums of the discounted C terms"""
    return combine_learnable(
        SUM, rs_u_learnable(K, sigma, c), learnable_from_boundedness(sigma),
    ).labelled("φ₂")


def rs_learnable_pipeline(K, rho, sigma, c=None):
    """The composite learnable rate of X, exactly as the calculus builds it

    X = X̃·P where P is the product of the (1+A_i), so the product rule is
    applied with (φ₂, χ₂) for X̃ and (learnable_from_boundedness(ρ), ρ) for P.
    """
    _check_K(K)
    check_standing_assumptions(rho, sigma)
    return combine_learnable(
        PRODUCT,
        phi=rs_phi2(K, sigma, c),
        psi=learnable_from_boundedness(rho),
        rho=rs_chi2(K, sigma),
        sigma=rho,
    ).labelled("φ")


@rule("rs_learnable_closed", "learnable rate of uniform convergence")
def rs_learnable_closed(K, rho, sigma, c_bar=None):
    """φ(λ, ε) = c̄·(ρ(λ/8)(K+σ(λ/16))/(λε))²"""
    K = _check_K(K)
    check_standing_assumptions(rho, sigma)
    c_bar = float(settings.QRS_CLOSED_FORM_CONSTANT if c_bar is None else c_bar)
    return LearnableRate(
        fn=lambda lam, eps: c_bar * (rho(lam / 8) * (K + sigma(lam / 16)) / (lam * eps)) ** 2,
        provenance=Provenance(
            "rs_learnable_closed", {"K": K, "c_bar": c_bar},
            children=(("rho", rho.provenance), ("sigma", sigma.provenance)),
        ),
    )


def rs_bsum_boundedness(K, rho, sigma):
    """χ(λ) = ρ(λ/2)·χ₃(λ/2) = 10ρ(λ/2)(K+σ(λ/8))/λ, a modulus for Σ B_i"""
    _check_K(K)
    check_standing_assumptions(rho, sigma)
    return combine_boundedness(PRODUCT, rho, rs_v_boundedness(K, sigma)).labelled("χ")


@rule("rs_x_boundedness", "modulus of uniform boundedness")
def rs_x_boundedness(K, rho, sigma):
    """τ(λ) = 9(K+σ(λ/8))ρ(λ/2)/λ, a modulus for X itself"""
    K = _check_K(K)
    check_standing_assumptions(rho, sigma)
    return BoundednessModulus(
        fn=lambda lam: 9 * (K + sigma(lam / 8)) * rho(lam / 2) / lam,
        provenance=Provenance(
            "rs_x_boundedness", {"K": K},
            children=(("rho", rho.provenance), ("sigma", sigma.provenance)),
        ),
        floor=True,
    ).labelled("τ")


@rule("nonstochastic_rate", "learnable rate of convergence")
def nonstochastic_rate(K, L, M):
    """ε ↦ 8L(K+M)/ε"""
    K, L, M = check_positive(K, "K"), check_positive(L, "L"), check_positive(M, "M")
    return DeterministicRate(
        fn=lambda eps: 8 * L * (K + M) / eps,
        provenance=Provenance("nonstochastic_rate", {"K": K, "L": L, "M": M}),
    )


def nonstochastic_rs(K, L, M):
    """Rate and β-sum bound for x_{n+1} ≤ (1+α_n)x_n − β_n + γ_n

    Caller certifies x₀ < K, Π(1+α_i) < L and Σγ_i < M.
    Returns (ε ↦ 8L(K+M)/ε, L(K+M)).
    """
    rate = nonstochastic_rate(K, L, M)
    params = rate.provenance.params
    return rate, params["L"] * (params["K"] + params["M"])
