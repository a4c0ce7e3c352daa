"""
Point estimates with two-sided confidence intervals
"""
from dataclasses import dataclass
import math

import numpy as np
from django.conf import settings
from scipy.stats import norm

from moduli.exceptions import InvalidParameterError

WILSON = "wilson"
NORMAL = "normal"
HOEFFDING = "hoeffding"
EXACT = "exact"


@dataclass(frozen=True)
class Estimate:
    point: float
    ci_low: float
    ci_high: float
    n_samples: int
    method: str

    def __post_init__(self):
        if not self.ci_low <= self.point <= self.ci_high:
            raise InvalidParameterError("interval", (self.ci_low, self.point, self.ci_high), "ci_low ≤ point ≤ ci_high")

    @classmethod
    def exact(cls, value):
        """A zero-width estimate for quantities computed without sampling"""
        value = float(value)
        return cls(value, value, value, 1, EXACT)

    @property
    def halfwidth(self):
        return max(self.point - self.ci_low, self.ci_high - self.point)

    def to_dict(self):
        from .serializers import EstimateSerializer
        return EstimateSerializer(self).data


def z_score(confidence=None):
    confidence = settings.QRS_CONFIDENCE if confidence is None else confidence
    if not 0 < confidence < 1:
        raise InvalidParameterError("confidence", confidence, "a level in (0, 1)")
    return float(norm.ppf(0.5 + confidence / 2))


def _check_count(n):
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidParameterError("n", n, "a positive sample count")
    return int(n)


def wilson_interval(successes, n, confidence=None):
    """Wilson score interval for a binomial proportion"""
    n = _check_count(n)
    if not 0 <= successes <= n:
        raise InvalidParameterError("successes", successes, f"a count between 0 and {n}")
    z = z_score(confidence)
    p = successes / n
    denominator = 1 + z * z / n
    center = (p + z * z / (2 * n)) / denominator
    half = z / denominator * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n))

    # the sure and null events keep their exact endpoint
    low = 0.0 if successes == 0 else min(max(center - half, 0.0), p)
    high = 1.0 if successes == n else max(min(center + half, 1.0), p)
    return Estimate(p, low, high, n, WILSON)


def normal_interval(values, confidence=None):
    """Mean with a normal-approximation interval from the sample standard deviation"""
    values = np.asarray(values, dtype=np.float64)
    n = _check_count(values.size)
    mean = float(values.mean())
    spread = float(values.std(ddof=1)) if n > 1 else 0.0
    half = z_score(confidence) * spread / math.sqrt(n)
    return Estimate(mean, mean - half, mean + half, n, NORMAL)


def hoeffding_interval(values, lower, upper, confidence=None):
    """Mean of a statistic supported on [lower, upper], with Hoeffding's interval"""
    values = np.asarray(values, dtype=np.float64)
    n = _check_count(values.size)
    if not lower < upper:
        raise InvalidParameterError("support", (lower, upper), "lower < upper")
    if values.min() < lower or values.max() > upper:
        raise InvalidParameterError("values", (values.min(), values.max()), f"values within [{lower}, {upper}]")
    confidence = settings.QRS_CONFIDENCE if confidence is None else confidence
    z_score(confidence)
    mean = float(values.mean())
    half = (upper - lower) * math.sqrt(math.log(2 / (1 - confidence)) / (2 * n))
    return Estimate(mean, max(mean - half, lower), min(mean + half, upper), n, HOEFFDING)
