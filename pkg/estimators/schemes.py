"""
Interval schemes a₀<b₀ ≤ a₁<b₁ ≤ … for checking learnable rates

A learnable rate speaks about every such scheme; we test against three
families of them: dyadic windows, sliding windows of fixed width, and a
greedy scheme fitted to a pilot run so that each window is as short as it
can be while still oscillating with the target probability.
"""
from dataclasses import dataclass
import logging

import numpy as np

from moduli.bounds import check_index
from moduli.exceptions import InvalidParameterError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IntervalScheme:
    name: str
    windows: tuple
    fitted: int = None

    def __post_init__(self):
        windows = tuple((int(a), int(b)) for a, b in self.windows)
        for a, b in windows:
            if not 0 <= a < b:
                raise InvalidParameterError("window", (a, b), "indices 0 ≤ a < b")
        for (_, b), (a, _) in zip(windows, windows[1:]):
            if a < b:
                raise InvalidParameterError("windows", windows, "b_n ≤ a_{n+1} for consecutive windows")
        object.__setattr__(self, "windows", windows)

    def __len__(self):
        return len(self.windows)

    def __iter__(self):
        return iter(self.windows)

    def within(self, horizon):
        """The windows that end at or before ``horizon``"""
        windows = tuple(w for w in self.windows if w[1] <= horizon)
        fitted = None if self.fitted is None else min(self.fitted, len(windows))
        return IntervalScheme(self.name, windows, fitted)

    def to_dict(self):
        from .serializers import IntervalSchemeSerializer
        return IntervalSchemeSerializer(self).data

    @classmethod
    def dyadic(cls, horizon):
        """[2ᵏ; 2ᵏ⁺¹] for every k with 2ᵏ⁺¹ ≤ horizon"""
        horizon = check_index(horizon, "horizon")
        windows = []
        start = 1
        while 2 * start <= horizon:
            windows.append((start, 2 * start))
            start *= 2
        return cls("dyadic", tuple(windows))

    @classmethod
    def sliding(cls, width, horizon, start=0):
        """[s; s+w], [s+w; s+2w], … up to the horizon"""
        horizon = check_index(horizon, "horizon")
        if isinstance(width, bool) or not isinstance(width, int) or width < 1:
            raise InvalidParameterError("width", width, "a positive integer")
        starts = range(start, horizon - width + 1, width)
        return cls(f"sliding({width})", tuple((a, a + width) for a in starts))

    @classmethod
    def explicit(cls, windows):
        return cls("explicit", tuple(windows))

    @classmethod
    def greedy_pilot(cls, family, eps, target, n_paths, horizon, seed, track="x"):
        """Grow each window from its start until the pilot-run frequency of
        an ε-oscillation inside it reaches ``target``

        Once no window reaches the target the rest of the horizon is covered
        by doubling windows [s; 2s], [2s; 4s], …; ``fitted`` counts the
        windows grown from the pilot run.
        """
        if not eps > 0:
            raise InvalidParameterError("eps", eps, "a positive real")
        if not 0 < target <= 1:
            raise InvalidParameterError("target", target, "a probability in (0, 1]")
        horizon = check_index(horizon, "horizon")
        values = family.sample_batch(seed, horizon, range(n_paths))[track]

        windows = []
        start = 0
        while start < horizon:
            tail = values[:, start:]
            spread = np.maximum.accumulate(tail, axis=1) - np.minimum.accumulate(tail, axis=1)
            frequency = (spread >= eps).mean(axis=0)
            hits = np.flatnonzero(frequency[1:] >= target)
            if not hits.size:
                break
            stop = start + 1 + int(hits[0])
            windows.append((start, stop))
            start = stop

        fitted = len(windows)
        start = max(start, 1)
        while 2 * start <= horizon:
            windows.append((start, 2 * start))
            start *= 2

        logger.debug(f"Pilot run of {n_paths} paths fitted {fitted} windows up to {horizon}")
        return cls("greedy_pilot", tuple(windows), fitted)
