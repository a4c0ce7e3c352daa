"""
Counterfunctions and saturating iteration

Metastable bounds iterate g̃(n) = n + g(n) a number of times that is itself
a learnable rate, and for the supermartingale rate that count is in the
millions. Iterates above the cap are reported as Saturated(cap) instead of
being computed.
"""
from dataclasses import dataclass, field
from typing import Callable
import math
import logging

from django.conf import settings

from .exceptions import InvalidParameterError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExtendedIndex:
    """A natural number, or the marker Saturated(cap)"""

    value: int
    saturated: bool = False

    @classmethod
    def saturated_at(cls, cap):
        return cls(value=int(cap), saturated=True)

    @property
    def cap(self):
        return self.value if self.saturated else None

    def __int__(self):
        return self.value

    def __str__(self):
        if self.saturated:
            return f"Saturated({self.value})"
        return str(self.value)

    def to_dict(self):
        from .serializers import ExtendedIndexSerializer
        return ExtendedIndexSerializer(self).data


@dataclass(frozen=True)
class Counterfunction:
    """A total map g on indices, with g̃(n) = n + g(n)"""

    fn: Callable[[int], int]
    kind: str = "callable"
    params: dict = field(default_factory=dict)
    cap: int = None

    def __post_init__(self):
        if self.cap is None:
            object.__setattr__(self, 'cap', int(settings.QRS_SATURATION_CAP))

    def __call__(self, n):
        value = self.fn(n)
        if value < 0:
            raise InvalidParameterError(f"g({n})", value, "a natural number")
        return int(value)

    def shifted(self, n):
        return n + self(n)

    def with_cap(self, cap):
        return Counterfunction(self.fn, self.kind, dict(self.params), int(cap))

    def iterate(self, times, start=0):
        """The times-fold iterate of g̃ at start, saturating above the cap"""
        times = int(times)
        if times < 0:
            raise InvalidParameterError("times", times, "a natural number")
        if start > self.cap:
            return ExtendedIndex.saturated_at(self.cap)

        if self.kind in ("zero", "constant"):
            value = start + times * self.params.get("c", 0)
            if value > self.cap:
                return ExtendedIndex.saturated_at(self.cap)
            return ExtendedIndex(value)

        current = start
        for _ in range(times):
            following = self.shifted(current)
            if following > self.cap:
                logger.debug(f"Iteration of {self.kind} counterfunction saturated at {self.cap}")
                return ExtendedIndex.saturated_at(self.cap)
            if following == current:
                # fixed point: every further iterate is the same
                break
            current = following
        return ExtendedIndex(current)

    def orbit(self, start=0, limit=None):
        """Yield start, g̃(start), g̃²(start), ... up to the cap (or limit terms)"""
        current = start
        produced = 0
        while current <= self.cap and (limit is None or produced < limit):
            yield current
            produced += 1
            following = self.shifted(current)
            if following == current:
                return
            current = following

    @classmethod
    def zero(cls, cap=None):
        return cls(lambda n: 0, "zero", {"c": 0}, cap)

    @classmethod
    def constant(cls, c, cap=None):
        if isinstance(c, bool) or not isinstance(c, int) or c < 0:
            raise InvalidParameterError("c", c, "a natural number")
        return cls(lambda n: c, "constant", {"c": c}, cap)

    @classmethod
    def identity(cls, cap=None):
        return cls(lambda n: n, "identity", {}, cap)

    @classmethod
    def affine(cls, a, b, cap=None):
        if a < 0 or b < 0:
            raise InvalidParameterError("affine", (a, b), "nonnegative integer coefficients")
        return cls(lambda n: a * n + b, "affine", {"a": a, "b": b}, cap)

    @classmethod
    def parse(cls, text, cap=None):
        """Read 'zero', 'identity', 'constant:3' or 'affine:1,1'"""
        kind, _, args = str(text).partition(":")
        try:
            if kind == "zero":
                return cls.zero(cap)
            if kind == "identity":
                return cls.identity(cap)
            if kind == "constant":
                return cls.constant(int(args), cap)
            if kind == "affine":
                a, b = (int(part) for part in args.split(","))
                return cls.affine(a, b, cap)
        except ValueError as exc:
            raise InvalidParameterError("counterfunction", text, "kind:args with integer args") from exc
        raise InvalidParameterError("counterfunction", text, "zero, identity, constant:c or affine:a,b")

    def describe(self):
        if self.kind == "callable":
            return "callable"
        if self.kind == "constant":
            return f"constant:{self.params['c']}"
        if self.kind == "affine":
            return f"affine:{self.params['a']},{self.params['b']}"
        return self.kind


def iteration_count(p):
    """⌈p⌉ for a finite nonnegative bound value"""
    if math.isnan(p) or math.isinf(p) or p < 0:
        raise InvalidParameterError("p", p, "a finite nonnegative real")
    return math.ceil(p)
