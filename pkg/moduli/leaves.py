"""
Leaf moduli: the hand-written inputs every construction starts from

Rebuildable leaves record their scalar parameters. A caller-supplied
function is accepted too, but its tree is marked with the non-rebuildable
'callable' rule.
"""
import math

from .bounds import (
    BoundednessModulus, DeterministicRate, DriftModulus, LearnableRate, LiminfModulus,
    RateOfDivergence,
    check_positive,
)
from .exceptions import InvalidParameterError
from .provenance import Provenance, rule


@rule("constant_boundedness", "modulus of uniform boundedness")
def constant_boundedness(value):
    """λ ↦ value (e.g. ρ ≡ L when Π(1+A_i) < L surely)"""
    if value < 0:
        raise InvalidParameterError("value", value, "a nonnegative real")
    value = float(value)
    return BoundednessModulus(
        fn=lambda lam: value,
        provenance=Provenance("constant_boundedness", {"value": value}),
        floor=value >= 1.0,
    )


@rule("power_boundedness", "modulus of uniform boundedness")
def power_boundedness(scale, power=1.0):
    """λ ↦ scale / λ^power"""
    scale = check_positive(scale, "scale")
    power = float(power)
    return BoundednessModulus(
        fn=lambda lam: scale / lam ** power,
        provenance=Provenance("power_boundedness", {"scale": scale, "power": power}),
        floor=scale >= 1.0 and power >= 0,
    )


@rule("constant_rate", "learnable rate of uniform convergence")
def constant_rate(value):
    if value < 0:
        raise InvalidParameterError("value", value, "a nonnegative real")
    value = float(value)
    return LearnableRate(
        fn=lambda lam, eps: value,
        provenance=Provenance("constant_rate", {"value": value}),
    )


@rule("power_rate", "learnable rate of uniform convergence")
def power_rate(scale, power=1.0):
    """(λ, ε) ↦ scale / (λε)^power"""
    scale = check_positive(scale, "scale")
    power = float(power)
    return LearnableRate(
        fn=lambda lam, eps: scale / (lam * eps) ** power,
        provenance=Provenance("power_rate", {"scale": scale, "power": power}),
    )


@rule("log2_inverse_rate", "direct rate of convergence")
def log2_inverse_rate():
    """(λ, ε) ↦ ⌈log₂(1/ε)⌉, the direct rate of a dyadic series"""
    return LearnableRate(
        fn=lambda lam, eps: float(math.ceil(math.log2(1.0 / eps))),
        provenance=Provenance("log2_inverse_rate"),
    )


@rule("identity_drift", "drift modulus")
def identity_drift():
    """δ(ε, K) = ε"""
    return DriftModulus(fn=lambda eps, K: eps, provenance=Provenance("identity_drift"))


@rule("ratio_drift", "drift modulus")
def ratio_drift():
    """δ(ε, K) = ε / K"""
    return DriftModulus(fn=lambda eps, K: eps / K, provenance=Provenance("ratio_drift"))


@rule("constant_liminf", "liminf-modulus")
def constant_liminf(value):
    """Φ(λ, ε, n) = value, a fixed search window"""
    value = int(value)
    if value < 0:
        raise InvalidParameterError("value", value, "a natural number")
    return LiminfModulus(
        fn=lambda lam, eps, n: value,
        provenance=Provenance("constant_liminf", {"value": value}),
    )


def _callable_tree(name):
    return Provenance("callable", {"name": name})


def boundedness_from_callable(fn, name="rho", floor=False):
    return BoundednessModulus(fn=fn, provenance=_callable_tree(name), floor=floor)


def rate_from_callable(fn, name="phi"):
    return LearnableRate(fn=fn, provenance=_callable_tree(name))


def deterministic_rate_from_callable(fn, name="phi"):
    return DeterministicRate(fn=fn, provenance=_callable_tree(name))


def drift_from_callable(fn, name="delta"):
    return DriftModulus(fn=fn, provenance=_callable_tree(name))


def liminf_from_callable(fn, name="Phi"):
    return LiminfModulus(fn=fn, provenance=_callable_tree(name))


@rule("constant_step_divergence", "rate of divergence")
def constant_step_divergence(u):
    """r(n, x) = ⌈x/u⌉ for constant step sizes u_n ≡ u"""
    u = check_positive(u, "u")
    return RateOfDivergence(
        fn=lambda n, x: math.ceil(x / u),
        provenance=Provenance("constant_step_divergence", {"u": u}),
    )
