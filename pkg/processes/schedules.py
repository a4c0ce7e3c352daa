"""
Deterministic schedules: step sizes u_n, and the a_n, cbar_n, α_n, β_n, γ_n
sequences of the other families

A schedule knows its sum, its sum of squares and Π(1+u_n) in closed form
where one exists, and derives a rate of divergence r(n, x) when its partial
sums diverge.
"""
from dataclasses import dataclass, field
import math
import logging

import numpy as np
from django.conf import settings

from moduli.bounds import RateOfDivergence, check_positive
from moduli.exceptions import CertificateError, DivergenceHorizonError, InvalidParameterError
from moduli.leaves import constant_step_divergence
from moduli.provenance import Provenance, rule

logger = logging.getLogger(__name__)

CONSTANT = "constant"
HARMONIC = "harmonic"
GEOMETRIC = "geometric"
EXPLICIT = "explicit"
KINDS = (CONSTANT, HARMONIC, GEOMETRIC, EXPLICIT)

SCAN_CHUNK = 1 << 16


def strict_upper(value):
    """A float strictly above ``value`` that absorbs its rounding error"""
    return float(np.nextafter(value * (1 + 2 ** -48), np.inf))


@dataclass(frozen=True)
class StepSchedule:
    """One of: constant(u), harmonic(c) with u_n = c/(n+1), geometric(u, q)
    with u_n = u·qⁿ, or an explicit list (zero past its end)"""

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidParameterError("kind", self.kind, f"one of {', '.join(KINDS)}")
        if self.kind == EXPLICIT:
            values = [float(v) for v in self.params.get("values", [])]
            if any(v < 0 or math.isnan(v) or math.isinf(v) for v in values):
                raise InvalidParameterError("values", values, "finite nonnegative entries")
            object.__setattr__(self, "params", {"values": values})

    @classmethod
    def constant(cls, u):
        if u < 0:
            raise InvalidParameterError("u", u, "a nonnegative real")
        return cls(CONSTANT, {"u": float(u)})

    @classmethod
    def harmonic(cls, c=1.0):
        c = check_positive(c, "c")
        return cls(HARMONIC, {"c": c})

    @classmethod
    def geometric(cls, u, q):
        if u < 0:
            raise InvalidParameterError("u", u, "a nonnegative real")
        if not 0 <= q < 1:
            raise InvalidParameterError("q", q, "a ratio in [0, 1)")
        return cls(GEOMETRIC, {"u": float(u), "q": float(q)})

    @classmethod
    def explicit(cls, values):
        return cls(EXPLICIT, {"values": list(values)})

    @classmethod
    def zero(cls):
        return cls.constant(0.0)

    @classmethod
    def from_dict(cls, data):
        """Read {"kind": "harmonic", "c": 1} and friends, or a bare number for a constant"""
        if isinstance(data, StepSchedule):
            return data
        if isinstance(data, (int, float)) and not isinstance(data, bool):
            return cls.constant(data)
        if isinstance(data, (list, tuple)):
            return cls.explicit(data)
        if not isinstance(data, dict) or "kind" not in data:
            raise InvalidParameterError("schedule", data, "a number, a list or an object with a 'kind'")
        params = {k: v for k, v in data.items() if k != "kind"}
        builders = {
            CONSTANT: cls.constant, HARMONIC: cls.harmonic,
            GEOMETRIC: cls.geometric, EXPLICIT: cls.explicit,
        }
        if data["kind"] not in builders:
            raise InvalidParameterError("kind", data["kind"], f"one of {', '.join(KINDS)}")
        try:
            return builders[data["kind"]](**params)
        except TypeError as exc:
            raise InvalidParameterError("schedule", data, f"parameters of a {data['kind']} schedule") from exc

    def to_dict(self):
        return {"kind": self.kind, **self.params}

    def describe(self):
        if self.kind == EXPLICIT:
            return f"explicit[{len(self.params['values'])}]"
        args = ", ".join(f"{k}={v!r}" for k, v in self.params.items())
        return f"{self.kind}({args})"

    def values(self, count, start=0):
        """u_start, ..., u_{start+count-1} as a float array"""
        n = np.arange(start, start + count, dtype=np.float64)
        if self.kind == CONSTANT:
            return np.full(count, self.params["u"])
        if self.kind == HARMONIC:
            return self.params["c"] / (n + 1.0)
        if self.kind == GEOMETRIC:
            return self.params["u"] * np.power(self.params["q"], n)
        explicit = np.asarray(self.params["values"], dtype=np.float64)
        out = np.zeros(count)
        window = explicit[start:start + count]
        out[:len(window)] = window
        return out

    def __call__(self, n):
        return float(self.values(1, start=n)[0])

    def sup(self):
        """The largest step u_n over all n"""
        if self.kind == CONSTANT:
            return self.params["u"]
        if self.kind == HARMONIC:
            return self.params["c"]
        if self.kind == GEOMETRIC:
            return self.params["u"]
        return max(self.params["values"], default=0.0)

    def is_divergent(self):
        if self.kind == CONSTANT:
            return self.params["u"] > 0
        return self.kind == HARMONIC

    def total(self):
        """Σ u_n (inf for divergent schedules)"""
        if self.is_divergent():
            return math.inf
        if self.kind == CONSTANT:
            return 0.0
        if self.kind == GEOMETRIC:
            return self.params["u"] / (1 - self.params["q"])
        return math.fsum(self.params["values"])

    def square_total(self):
        """Σ u_n²"""
        if self.kind == CONSTANT:
            return math.inf if self.params["u"] > 0 else 0.0
        if self.kind == HARMONIC:
            return self.params["c"] ** 2 * math.pi ** 2 / 6
        if self.kind == GEOMETRIC:
            return self.params["u"] ** 2 / (1 - self.params["q"] ** 2)
        return math.fsum(v * v for v in self.params["values"])

    def product_one_plus(self):
        """Π (1 + u_n), finite exactly when Σ u_n is"""
        if self.is_divergent():
            return math.inf
        if self.kind == CONSTANT:
            return 1.0
        if self.kind == EXPLICIT:
            return math.exp(math.fsum(math.log1p(v) for v in self.params["values"]))
        u, q = self.params["u"], self.params["q"]
        if u == 0 or q == 0:
            return 1.0 + u
        # terms past this index are below 2^-60
        count = int(math.ceil((math.log(2.0 ** -60) - math.log(u)) / math.log(q))) + 1
        count = max(count, 1)
        logs = np.log1p(self.values(count))
        tail = u * q ** count / (1 - q)
        return math.exp(math.fsum(logs) + tail)

    def partial_sum(self, start, count):
        return math.fsum(self.values(count, start=start))

    def rate_of_divergence(self, cap=None):
        """r(n, x) with Σ_{i=n}^{n+r} u_i ≥ x"""
        if not self.is_divergent():
            raise CertificateError(f"steps {self.describe()} are summable and admit no rate of divergence")
        if self.kind == CONSTANT:
            return constant_step_divergence(self.params["u"])
        return scanned_divergence(self.to_dict(), cap=cap)


def scan_divergence(schedule, n, x, cap):
    """Least r with Σ_{i=n}^{n+r} u_i ≥ x, scanning partial sums in chunks"""
    reached = 0.0
    scanned = 0
    while scanned < cap:
        count = min(SCAN_CHUNK, cap - scanned)
        sums = reached + np.cumsum(schedule.values(count, start=n + scanned))
        hits = np.flatnonzero(sums >= x)
        if hits.size:
            return scanned + int(hits[0])
        reached = float(sums[-1])
        scanned += count
    raise DivergenceHorizonError(n, x, cap)


@rule("step_schedule_divergence", "rate of divergence")
def scanned_divergence(schedule, cap=None):
    """r(n, x) by partial-sum scan, failing past ``cap`` terms"""
    schedule = StepSchedule.from_dict(schedule)
    cap = int(settings.QRS_DIVERGENCE_SCAN_CAP if cap is None else cap)
    return RateOfDivergence(
        fn=lambda n, x: scan_divergence(schedule, n, x, cap),
        provenance=Provenance("step_schedule_divergence", {"schedule": schedule.to_dict(), "cap": cap}),
    )
