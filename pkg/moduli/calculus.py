"""
Composition rules for learnable rates and moduli of uniform boundedness

These are the generic rules: monotone sequences and series, sums and
products of processes, Ville's inequality, and the translation of a
learnable rate into a metastable one by iterating a counterfunction.
"""
import math
import logging

from .bounds import (
    BoundednessModulus, DeterministicRate, LearnableRate,
    check_accuracy, check_confidence, check_positive,
)
from .counterfunctions import iteration_count
from .exceptions import InvalidParameterError
from .provenance import Provenance, rule

logger = logging.getLogger(__name__)

SUM = "sum"
PRODUCT = "product"


@rule("monotone_learnable", "learnable rate of convergence")
def monotone_learnable(K):
    """ε ↦ K/ε for a nondecreasing sequence of nonnegative reals bounded by K"""
    K = check_positive(K, "K")
    return DeterministicRate(
        fn=lambda eps: K / eps,
        provenance=Provenance("monotone_learnable", {"K": K}),
    )


@rule("learnable_from_boundedness", "learnable rate of uniform convergence")
def learnable_from_boundedness(rho):
    """(λ, ε) ↦ 2ρ(λ/2)/(λε) for a pointwise nondecreasing process bounded by ρ

    Also the rate of the partial sums of a nonnegative series whose sum has
    modulus ρ.
    """
    return LearnableRate(
        fn=lambda lam, eps: 2.0 * rho(lam / 2) / (lam * eps),
        provenance=Provenance("learnable_from_boundedness", children=(("rho", rho.provenance),)),
    )


@rule("boundedness_from_direct_rate", "modulus of uniform boundedness")
def boundedness_from_direct_rate(phi_direct, a, eps):
    """λ ↦ a·φ(λ, ε) + ε for a series with terms in [0, a] and direct rate φ"""
    a = check_positive(a, "a")
    eps = check_accuracy(eps)
    return BoundednessModulus(
        fn=lambda lam: a * phi_direct(lam, eps) + eps,
        provenance=Provenance(
            "boundedness_from_direct_rate", {"a": a, "eps": eps},
            children=(("phi_direct", phi_direct.provenance),),
        ),
    )


@rule("combine_learnable", "learnable rate of uniform convergence")
def combine_learnable(mode, phi, psi, rho=None, sigma=None):
    """Learnable rate of X+Y (mode 'sum') or XY (mode 'product')

    For products, rho and sigma are moduli of uniform boundedness of X and Y.
    """
    children = [("phi", phi.provenance), ("psi", psi.provenance)]
    if mode == SUM:
        fn = lambda lam, eps: phi(lam / 2, eps / 2) + psi(lam / 2, eps / 2)  # noqa: E731
    elif mode == PRODUCT:
        if rho is None or sigma is None:
            raise InvalidParameterError("mode", mode, "rho and sigma moduli for a product")
        children += [("rho", rho.provenance), ("sigma", sigma.provenance)]

        def fn(lam, eps):
            quarter = lam / 4
            return (phi(quarter, eps / (2 * sigma(quarter)))
                    + psi(quarter, eps / (2 * rho(quarter))))
    else:
        raise InvalidParameterError("mode", mode, "'sum' or 'product'")

    return LearnableRate(
        fn=fn,
        provenance=Provenance("combine_learnable", {"mode": mode}, children=tuple(children)),
    )


@rule("combine_boundedness", "modulus of uniform boundedness")
def combine_boundedness(mode, rho, sigma):
    """Modulus of X+Y (mode 'sum') or XY (mode 'product')"""
    if mode == SUM:
        fn = lambda lam: rho(lam / 2) + sigma(lam / 2)  # noqa: E731
        floor = rho.floor or sigma.floor
    elif mode == PRODUCT:
        fn = lambda lam: rho(lam / 2) * sigma(lam / 2)  # noqa: E731
        floor = rho.floor and sigma.floor
    else:
        raise InvalidParameterError("mode", mode, "'sum' or 'product'")

    return BoundednessModulus(
        fn=fn,
        provenance=Provenance(
            "combine_boundedness", {"mode": mode},
            children=(("rho", rho.provenance), ("sigma", sigma.provenance)),
        ),
        floor=floor,
    )


@rule("ville_boundedness", "modulus of uniform boundedness")
def ville_boundedness(K):
    """λ ↦ K/λ for a nonnegative supermartingale with E[U₀] < K"""
    K = check_positive(K, "K")
    return BoundednessModulus(
        fn=lambda lam: K / lam,
        provenance=Provenance("ville_boundedness", {"K": K}),
        floor=K >= 1.0,
    )


@rule("learnable_from_fluctuations", "learnable rate of uniform convergence")
def learnable_from_fluctuations(table):
    """(λ, ε) ↦ E[J_ε]/λ from tabulated expected fluctuation counts

    ``table`` is a list of [eps, mean] pairs. J_ε is nonincreasing in ε, so a
    query at ε uses the entry with the largest tabulated accuracy ≤ ε.
    """
    entries = sorted((float(e), float(m)) for e, m in table)
    if not entries:
        raise InvalidParameterError("table", table, "at least one [eps, mean] pair")
    if any(m < 0 for _, m in entries):
        raise InvalidParameterError("table", table, "nonnegative expected counts")

    def fn(lam, eps):
        usable = [m for e, m in entries if e <= eps]
        if not usable:
            raise InvalidParameterError("eps", eps, f"an accuracy ≥ {entries[0][0]}")
        return usable[-1] / lam

    return LearnableRate(
        fn=fn,
        provenance=Provenance(
            "learnable_from_fluctuations", {"table": [[e, m] for e, m in entries]},
        ),
    )


def metastable_from_learnable(p, g):
    """g̃^(⌈p⌉)(0), or Saturated(cap) once an iterate passes g's cap"""
    return g.iterate(iteration_count(p))


def metastable_rate(phi, g, eps, lam=None):
    """Φ(ε, g) for a DeterministicRate, Φ(λ, ε, g) for a LearnableRate"""
    if lam is None:
        return metastable_from_learnable(phi(eps), g)
    return metastable_from_learnable(phi(lam, eps), g)


def uniform_partition(M, p):
    """The partition of [0, M] into p closed intervals of equal width"""
    M = check_positive(M, "M")
    if isinstance(p, bool) or not isinstance(p, int) or p < 1:
        raise InvalidParameterError("p", p, "a positive integer")
    width = M / p
    return [(j * width, (j + 1) * width) for j in range(p)]


def crossing_bound(M, p, initial_mean):
    """2p·E[U₀]/M + 1, bounding the expected crossings of each partition interval"""
    M = check_positive(M, "M")
    if p < 1:
        raise InvalidParameterError("p", p, "a positive integer")
    if initial_mean < 0:
        raise InvalidParameterError("initial_mean", initial_mean, "a nonnegative real")
    return 2.0 * p * initial_mean / M + 1.0


def crossing_partition(K, lam, eps):
    """⌈8K/(λε)⌉ intervals covering [0, 2K/λ], plus one more of equal width on top"""
    K = check_positive(K, "K")
    lam = check_confidence(lam)
    eps = check_accuracy(eps)
    p = math.ceil(8 * K / (lam * eps))
    width = 2 * K / (lam * p)
    return [(j * width, (j + 1) * width) for j in range(p + 1)]


def crossing_partition_bound(K, lam, eps):
    """(p+1)(pλ+1) with p = ⌈8K/(λε)⌉; always below 100K²/(λε²)"""
    p = len(crossing_partition(K, lam, eps)) - 1
    return (p + 1) * (p * lam + 1)
