"""
Evaluable bound objects

Each class wraps a pure function together with the Provenance tree that
built it. Arguments are validated on every call so that a composition can
never silently evaluate a modulus outside its domain.
"""
from dataclasses import dataclass, replace
from typing import Callable
import math

from django.conf import settings

from .exceptions import InvalidParameterError
from .provenance import Provenance


def check_confidence(lam, name="lambda"):
    """Confidence λ must lie in the open interval (0, 1)"""
    if not isinstance(lam, (int, float)) or not 0.0 < lam < 1.0:
        raise InvalidParameterError(name, lam, "a real in (0, 1)")
    return float(lam)


def check_accuracy(eps, name="eps"):
    """Accuracy ε must lie in the open interval (0, 1)"""
    if not isinstance(eps, (int, float)) or not 0.0 < eps < 1.0:
        raise InvalidParameterError(name, eps, "a real in (0, 1)")
    return float(eps)


def check_positive(value, name):
    if not isinstance(value, (int, float)) or not value > 0 or math.isinf(value):
        raise InvalidParameterError(name, value, "a finite positive real")
    return float(value)


def check_index(n, name="n"):
    if isinstance(n, bool) or not isinstance(n, int) or n < 0:
        raise InvalidParameterError(name, n, "a natural number")
    return n


def _grid(grid):
    return tuple(grid if grid is not None else settings.QRS_GRID)


class _Bound:
    """Shared behaviour: labelling and JSON export of the provenance tree"""

    def labelled(self, label):
        return replace(self, provenance=replace(self.provenance, label=label))

    def explain(self):
        return self.provenance.render()

    def to_dict(self):
        return self.provenance.to_dict()


@dataclass(frozen=True)
class BoundednessModulus(_Bound):
    """ρ(λ) with P(sup|X_n| ≥ ρ(λ)) < λ"""

    fn: Callable[[float], float]
    provenance: Provenance
    floor: bool = False

    def __call__(self, lam):
        value = float(self.fn(check_confidence(lam)))
        if value < 0 or math.isnan(value):
            raise InvalidParameterError("modulus value", value, "a nonnegative real")
        return value

    def is_nonincreasing(self, grid=None):
        points = sorted(_grid(grid))
        values = [self(lam) for lam in points]
        return all(a >= b for a, b in zip(values, values[1:]))

    def satisfies_floor(self, grid=None):
        return all(self(lam) >= 1.0 for lam in _grid(grid))


@dataclass(frozen=True)
class LearnableRate(_Bound):
    """φ(λ, ε) bounding the number of windows with oscillation probability ≥ λ"""

    fn: Callable[[float, float], float]
    provenance: Provenance

    def __call__(self, lam, eps):
        value = float(self.fn(check_confidence(lam), check_accuracy(eps)))
        if value < 0 or math.isnan(value):
            raise InvalidParameterError("rate value", value, "a nonnegative real")
        return value

    def is_nonincreasing(self, grid=None):
        points = sorted(_grid(grid))
        for lam in points:
            values = [self(lam, eps) for eps in points]
            if any(a < b for a, b in zip(values, values[1:])):
                return False
        for eps in points:
            values = [self(lam, eps) for lam in points]
            if any(a < b for a, b in zip(values, values[1:])):
                return False
        return True


@dataclass(frozen=True)
class DeterministicRate(_Bound):
    """φ(ε) for a sequence of reals"""

    fn: Callable[[float], float]
    provenance: Provenance

    def __call__(self, eps):
        return float(self.fn(check_accuracy(eps)))

    def is_nonincreasing(self, grid=None):
        points = sorted(_grid(grid))
        values = [self(eps) for eps in points]
        return all(a >= b for a, b in zip(values, values[1:]))


@dataclass(frozen=True)
class DriftModulus(_Bound):
    """δ(ε, K) with ε ≤ X_n ≤ K implying V_n ≥ δ(ε, K)"""

    fn: Callable[[float, float], float]
    provenance: Provenance

    def __call__(self, eps, K):
        value = float(self.fn(check_positive(eps, "eps"), check_positive(K, "K")))
        if not value > 0:
            raise InvalidParameterError("delta", value, "a positive real")
        return value


@dataclass(frozen=True)
class RateOfDivergence(_Bound):
    """r(n, x) with Σ_{i=n}^{n+r(n,x)} u_i ≥ x"""

    fn: Callable[[int, float], int]
    provenance: Provenance

    def __call__(self, n, x):
        return int(self.fn(check_index(n), check_positive(x, "x")))


@dataclass(frozen=True)
class LiminfModulus(_Bound):
    """Φ(λ, ε, n) with P(∀k ∈ [n; n+Φ](V_k ≥ ε)) < λ"""

    fn: Callable[[float, float, int], int]
    provenance: Provenance

    def __call__(self, lam, eps, n):
        return int(self.fn(check_confidence(lam), check_accuracy(eps), check_index(n)))
