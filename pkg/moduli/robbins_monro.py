"""
Liminf-moduli and metastable bounds for Robbins-Monro type recurrences

    E[X_{n+1} | F_n] ≤ (1+A_n)X_n − u_n V_n + C_n

The chain is: a modulus χ for Σ B_i and a rate of divergence r give a
liminf-modulus for V; a drift modulus δ moves it to X; combined with a
learnable rate φ for X it yields the metastable bound Γ(λ, ε, g).
"""
from dataclasses import dataclass
import math
import logging

import numpy as np
from django.conf import settings

from .bounds import (
    DriftModulus, LiminfModulus, _Bound,
    check_accuracy, check_confidence, check_positive,
)
from .counterfunctions import Counterfunction, ExtendedIndex, iteration_count
from .exceptions import InvalidParameterError
from .leaves import constant_boundedness
from .provenance import Provenance, rule
from .robbins_siegmund import rs_x_boundedness

logger = logging.getLogger(__name__)

JUST_BELOW_ONE = float(np.nextafter(1.0, 0.0))


@rule("liminf_modulus", "liminf-modulus")
def liminf_modulus(chi, r):
    """Φ(λ, ε, n) = r(n, χ(λ)/ε), a liminf-modulus for V"""
    return LiminfModulus(
        fn=lambda lam, eps, n: r(n, chi(lam) / eps),
        provenance=Provenance("liminf_modulus", children=(("chi", chi.provenance), ("r", r.provenance))),
    )


def _clamped(value):
    if value >= 1.0:
        logger.warning(f"Drift modulus value {value} clamped to {JUST_BELOW_ONE}")
        return JUST_BELOW_ONE
    return value


@rule("liminf_transfer", "liminf-modulus")
def liminf_transfer(Phi, delta, tau):
    """Ψ(λ, ε, n) = Φ(λ/2, δ(ε, τ(λ/2)), n), a liminf-modulus for X

    Drift values ≥ 1 are clamped just below 1; a larger accuracy only
    weakens what is asked of Φ.
    """
    def fn(lam, eps, n):
        return Phi(lam / 2, _clamped(delta(eps, tau(lam / 2))), n)

    grid = settings.QRS_GRID
    clamped = [
        (lam, eps) for lam in grid for eps in grid if delta(eps, tau(lam / 2)) >= 1.0
    ]
    notes = ()
    if clamped:
        notes = (f"drift value clamped below 1 at {len(clamped)} grid points, first at λ={clamped[0][0]}, ε={clamped[0][1]}",)

    return LiminfModulus(
        fn=fn,
        provenance=Provenance(
            "liminf_transfer",
            children=(("Phi", Phi.provenance), ("delta", delta.provenance), ("tau", tau.provenance)),
            notes=notes,
        ),
    ).labelled("Ψ")


def rm_counterfunction(Psi, lam, eps, g):
    """f(j) = max(g(j), Ψ(λ/2, ε/2, j)), the counterfunction iterated for Γ"""
    lam = check_confidence(lam)
    eps = check_accuracy(eps)
    if g.kind in ("zero", "constant") and Psi.provenance.rule == "constant_liminf":
        # both parts are constant: the closed-form iterate applies
        return Counterfunction.constant(max(g.params["c"], Psi(lam / 2, eps / 2, 0)), cap=g.cap)
    return Counterfunction(
        fn=lambda j: max(g(j), Psi(lam / 2, eps / 2, j)),
        kind="rm",
        params={"g": g.describe()},
        cap=g.cap,
    )


@dataclass(frozen=True)
class MetastableBound(_Bound):
    """Γ(λ, ε, g) with the counterfunction and iteration count that produced it"""

    value: ExtendedIndex
    counterfunction: Counterfunction
    iterations: int
    provenance: Provenance

    @property
    def saturated(self):
        return self.value.saturated


@rule("rm_metastable", "metastable rate of uniform convergence")
def metastable_bound(lam, eps, g, phi, Psi, cap=None):
    """Γ(λ, ε, g): iterate f̃(j) = j + f(j) ⌈φ(λ/2, ε/2)⌉ times from 0"""
    if not isinstance(g, Counterfunction):
        g = Counterfunction.parse(g)
    if cap is not None:
        g = g.with_cap(cap)
    f = rm_counterfunction(Psi, lam, eps, g)
    iterations = iteration_count(phi(lam / 2, eps / 2))
    value = f.iterate(iterations)
    if value.saturated:
        logger.warning(f"Metastable bound saturated at {value.cap} after fewer than {iterations} iterations")

    return MetastableBound(
        value=value,
        counterfunction=f,
        iterations=iterations,
        provenance=Provenance(
            "rm_metastable",
            {"lam": lam, "eps": eps, "g": g.describe(), "cap": g.cap},
            children=(("phi", phi.provenance), ("Psi", Psi.provenance)),
        ),
    ).labelled("Γ")


def rm_metastable(phi, Psi, lam, eps, g):
    """Γ(λ, ε, g) as an ExtendedIndex"""
    return metastable_bound(lam, eps, g, phi, Psi).value


@rule("delta_from_mu", "drift modulus")
def delta_from_mu(mu, name="mu"):
    """δ(ε, K) = μ(√min{ε, 1/K})

    ``mu`` is a callable, or a number p standing for μ(t) = t^p.
    """
    if callable(mu):
        fn = mu
        provenance = Provenance("delta_from_mu", children=(("mu", Provenance("callable", {"name": name})),))
    else:
        power = check_positive(mu, "mu")
        fn = lambda t: t ** power  # noqa: E731
        provenance = Provenance("delta_from_mu", {"mu": power})

    return DriftModulus(
        fn=lambda eps, K: fn(math.sqrt(min(eps, 1.0 / K))),
        provenance=provenance,
    )


def solution_search_index(K, rho, sigma, u, delta, lam, eps):
    """⌈20ρ(λ/4)(K+σ(λ/16))/(u·λ·δ(ε, τ(λ/2)))⌉ for constant step sizes u"""
    lam = check_confidence(lam)
    eps = check_accuracy(eps)
    tau = rs_x_boundedness(K, rho, sigma)
    d = solution_search_constant(K, rho(lam / 4), sigma(lam / 16), u)
    return solution_search_bound(d, lam, delta(eps, tau(lam / 2)))


def constant_step_solution_bound(K, L, M, u, delta, lam, eps):
    """The search bound with ρ ≡ L and σ ≡ M: some k ≤ N has X_k < ε with probability > 1−λ"""
    return solution_search_index(
        K, constant_boundedness(L), constant_boundedness(M), u, delta, lam, eps,
    )


def solution_search_constant(K, L, M, u):
    """d = 20L(K+M)/u, for drift conditions of the form X ≥ ε ⇒ V ≥ δ(ε)"""
    K, L, M, u = (check_positive(v, name) for v, name in ((K, "K"), (L, "L"), (M, "M"), (u, "u")))
    return 20 * L * (K + M) / u


def solution_search_bound(d, lam, delta_eps):
    """⌈d/(λ·δ(ε))⌉"""
    d = check_positive(d, "d")
    lam = check_confidence(lam)
    if not delta_eps > 0:
        raise InvalidParameterError("delta", delta_eps, "a positive real")
    return math.ceil(d / (lam * delta_eps))
