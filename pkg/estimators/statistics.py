"""
Statistics of sample paths

Each statistic works on a single PathTrace and, through ``on_batch``, on a
whole {track: (paths, horizon+1)} batch at once. Both forms run the same
per-row arithmetic, so a path gets the same value either way.
"""
from dataclasses import dataclass
from typing import Callable
import logging

import numpy as np

from moduli.exceptions import InvalidParameterError
from processes.diagnostics import stopping_time

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CrossingCount:
    """C: completed crossings in either direction, D: completed downcrossings"""

    crossings: int
    downcrossings: int

    @property
    def upcrossings(self):
        return self.crossings - self.downcrossings


@dataclass(frozen=True)
class PathFunction:
    """An event or statistic of a path, with an optional vectorised form"""

    fn: Callable
    batch_fn: Callable = None
    name: str = ""
    requires: tuple = ("x",)

    def __call__(self, trace):
        return self.fn(trace)

    @property
    def vectorised(self):
        return self.batch_fn is not None

    def on_batch(self, tracks):
        return self.batch_fn(tracks)


def _rows(values):
    rows = np.asarray(values, dtype=np.float64)
    return rows.reshape(1, -1) if rows.ndim == 1 else rows


def _check_eps(eps):
    if not eps > 0:
        raise InvalidParameterError("eps", eps, "a positive real")
    return float(eps)


def fluctuations(values, eps):
    """Greedy ε-fluctuation counts, one per row

    A pair completes at the first j whose distance to some x_i since the
    last completion reaches ε; the next pair may start at that j.
    """
    eps = _check_eps(eps)
    rows = _rows(values)
    counts = np.zeros(rows.shape[0], dtype=np.int64)
    if rows.shape[1] == 0:
        return counts
    low = rows[:, 0].copy()
    high = rows[:, 0].copy()
    for column in rows[:, 1:].T:
        low = np.minimum(low, column)
        high = np.maximum(high, column)
        done = (column - low >= eps) | (high - column >= eps)
        counts += done
        low = np.where(done, column, low)
        high = np.where(done, column, high)
    return counts


def crossings(values, a, b):
    """(C, D) arrays for the interval [a, b], one entry per row

    A row sits below after a value < a and above after a value > b;
    values inside [a, b] leave the state unchanged.
    """
    if not 0 <= a < b:
        raise InvalidParameterError("interval", (a, b), "0 ≤ a < b")
    rows = _rows(values)
    # 0 undetermined, -1 below, 1 above
    state = np.zeros(rows.shape[0], dtype=np.int8)
    total = np.zeros(rows.shape[0], dtype=np.int64)
    down = np.zeros(rows.shape[0], dtype=np.int64)
    for column in rows.T:
        below = column < a
        above = column > b
        total += (below & (state == 1)) | (above & (state == -1))
        down += below & (state == 1)
        state = np.where(below, -1, np.where(above, 1, state)).astype(np.int8)
    return total, down


def count_fluctuations(trace, eps):
    """Maximum number of disjoint ε-fluctuations i₁<j₁ ≤ i₂<j₂ ≤ … of x"""
    return int(fluctuations(trace.x, eps)[0])


def count_crossings(trace, a, b):
    total, down = crossings(trace.x, a, b)
    return CrossingCount(int(total[0]), int(down[0]))


def _window(length, window):
    start, stop = window
    if start > stop:
        return None
    if start < 0 or stop >= length:
        raise InvalidParameterError("window", window, f"indices within [0; {length - 1}]")
    return slice(start, stop + 1)


def oscillation_event(trace, window, eps):
    """True iff max − min of x over the inclusive window reaches ε"""
    eps = _check_eps(eps)
    indices = _window(len(trace.x), window)
    if indices is None:
        return False
    part = trace.x[indices]
    return bool(part.max() - part.min() >= eps)


def sup_over_horizon(trace):
    if len(trace.x) == 0:
        raise InvalidParameterError("trace", "empty", "a trace with at least one entry")
    return float(np.abs(trace.x).max())


def running_sums(values):
    """Σ_{i≤n} values_i along each row, summed left to right"""
    return np.cumsum(_rows(values), axis=1)


# Path functions for the Monte-Carlo estimators

def _windowed(batch, name, track):
    return PathFunction(
        fn=lambda trace: bool(batch({track: _rows(trace.track(track))})[0]),
        batch_fn=batch, name=name, requires=(track,),
    )


def sup_at_least(level, track="x"):
    """Event sup_{n ≤ N} |track_n| ≥ level"""
    return PathFunction(
        fn=lambda trace: bool(np.abs(trace.track(track)).max() >= level),
        batch_fn=lambda tracks: np.abs(tracks[track]).max(axis=1) >= level,
        name=f"sup {track} ≥ {level!r}",
        requires=(track,),
    )


def sum_at_least(level, track="b"):
    """Event Σ_{i<N} track_i ≥ level"""
    def total(values):
        rows = _rows(values)
        if rows.shape[1] < 2:
            return np.zeros(rows.shape[0])
        return running_sums(rows[:, :-1])[:, -1]

    return PathFunction(
        fn=lambda trace: bool(total(trace.track(track))[0] >= level),
        batch_fn=lambda tracks: total(tracks[track]) >= level,
        name=f"Σ {track} ≥ {level!r}",
        requires=(track,),
    )


def oscillates(window, eps, track="x"):
    """Event ∃ i, j in the window with |track_i − track_j| ≥ ε"""
    eps = _check_eps(eps)
    start, stop = window

    def batch(tracks):
        part = tracks[track][:, start:stop + 1]
        if part.shape[1] == 0:
            return np.zeros(part.shape[0], dtype=bool)
        return part.max(axis=1) - part.min(axis=1) >= eps

    return _windowed(batch, f"oscillation ≥ {eps!r} on [{start}; {stop}]", track)


def stays_at_least(window, eps, track="x"):
    """Event ∀k in the window (truncated at the horizon): track_k ≥ ε"""
    start, stop = window

    def batch(tracks):
        part = tracks[track][:, start:stop + 1]
        return np.all(part >= eps, axis=1)

    return _windowed(batch, f"{track} ≥ {eps!r} on [{start}; {stop}]", track)


def reaches(window, eps, track="x"):
    """Event ∃k in the window (truncated at the horizon): track_k ≥ ε"""
    start, stop = window

    def batch(tracks):
        part = tracks[track][:, start:stop + 1]
        return np.any(part >= eps, axis=1)

    return _windowed(batch, f"{track} reaches {eps!r} on [{start}; {stop}]", track)


def crossing_statistic(a, b, track="x"):
    """C_N[a, b] of a path"""
    return PathFunction(
        fn=lambda trace: float(crossings(trace.track(track), a, b)[0][0]),
        batch_fn=lambda tracks: crossings(tracks[track], a, b)[0].astype(np.float64),
        name=f"C[{a!r}, {b!r}]",
        requires=(track,),
    )


def fluctuation_statistic(eps, track="x"):
    """J_ε of a path"""
    return PathFunction(
        fn=lambda trace: float(fluctuations(trace.track(track), eps)[0]),
        batch_fn=lambda tracks: fluctuations(tracks[track], eps).astype(np.float64),
        name=f"J_{eps!r}",
        requires=(track,),
    )


def initial_value(track="x"):
    return PathFunction(
        fn=lambda trace: float(trace.track(track)[0]),
        batch_fn=lambda tracks: tracks[track][:, 0].copy(),
        name=f"{track}_0",
        requires=(track,),
    )


def bad_window_count(windows, eps, level, track="x"):
    """Number of windows where the path oscillates by ε after starting below ``level``"""
    eps = _check_eps(eps)
    windows = [tuple(window) for window in windows]

    def batch(tracks):
        values = tracks[track]
        count = np.zeros(values.shape[0])
        for start, stop in windows:
            part = values[:, start:stop + 1]
            if part.shape[1] == 0:
                continue
            count += (part.max(axis=1) - part.min(axis=1) >= eps) & (part[:, 0] < level)
        return count

    return PathFunction(
        fn=lambda trace: float(batch({track: _rows(trace.track(track))})[0]),
        batch_fn=batch,
        name=f"windows oscillating by {eps!r} from below {level!r}",
        requires=(track,),
    )


def compensator_exceeds(level):
    """Event T_level ≤ N: the discounted C-sum passes ``level`` within the horizon"""
    return PathFunction(
        fn=lambda trace: stopping_time(trace, level) is not None,
        name=f"T_{level!r} ≤ N",
        requires=("c",),
    )
