"""
Sample paths
"""
from dataclasses import dataclass
import csv
import logging
from pathlib import Path

import numpy as np

from moduli.exceptions import InvalidParameterError
from .diagnostics import transformed_processes

logger = logging.getLogger(__name__)

TRACKS = ("x", "a", "b", "c", "v")


def _frozen(values, name):
    array = np.array(values, dtype=np.float64)
    if array.ndim != 1:
        raise InvalidParameterError(name, array.shape, "a one-dimensional sequence")
    if not np.all(np.isfinite(array)) or np.any(array < 0):
        raise InvalidParameterError(name, "trace", "finite nonnegative entries")
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class PathTrace:
    """X_0..X_N of one path, with the optional A, B, C, V tracks"""

    x: np.ndarray
    seed: int = 0
    horizon: int = None
    path_index: int = 0
    a: np.ndarray = None
    b: np.ndarray = None
    c: np.ndarray = None
    v: np.ndarray = None

    def __post_init__(self):
        object.__setattr__(self, "x", _frozen(self.x, "x"))
        for name in TRACKS[1:]:
            values = getattr(self, name)
            if values is None:
                continue
            array = _frozen(values, name)
            if len(array) != len(self.x):
                raise InvalidParameterError(name, len(array), f"a track of length {len(self.x)}")
            object.__setattr__(self, name, array)
        if self.horizon is None:
            object.__setattr__(self, "horizon", max(len(self.x) - 1, 0))

    def __len__(self):
        return len(self.x)

    @property
    def tracks(self):
        """Names of the tracks this trace carries, x first"""
        return tuple(name for name in TRACKS if getattr(self, name) is not None)

    def track(self, name):
        values = getattr(self, name, None) if name in TRACKS else None
        if values is None:
            raise InvalidParameterError("track", name, f"one of {', '.join(self.tracks)}")
        return values

    def prefix(self, length):
        """The first ``length`` entries of every track"""
        return PathTrace(
            seed=self.seed, path_index=self.path_index, horizon=max(length - 1, 0),
            **{name: getattr(self, name)[:length] for name in self.tracks},
        )

    def equals(self, other):
        """Bit-identical comparison of every track"""
        if self.tracks != other.tracks:
            return False
        return all(np.array_equal(self.track(name), other.track(name)) for name in self.tracks)

    def rows(self):
        columns = [self.track(name) for name in self.tracks]
        for n in range(len(self.x)):
            yield [n] + [repr(float(column[n])) for column in columns]


def write_trace_csv(trace, path, diagnostics=False):
    """Write columns n, x, a, b, c, v (absent tracks omitted)

    With ``diagnostics`` the transformed processes P, X_tilde, U and V follow.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header, rows = ["n", *trace.tracks], list(trace.rows())
    if diagnostics:
        processes = transformed_processes(trace)
        header += list(processes)
        for n, row in enumerate(rows):
            row.extend(repr(float(values[n])) for values in processes.values())
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(rows)
    logger.debug(f"Wrote {len(trace)} rows of path {trace.path_index} to {path}")
    return path


def batch_traces(batch, tracks, seed, horizon, path_indices):
    """Split a {track: (paths, horizon+1)} batch into one PathTrace per path"""
    return [
        PathTrace(
            seed=seed, horizon=horizon, path_index=index,
            **{name: batch[name][row] for name in tracks},
        )
        for row, index in enumerate(path_indices)
    ]
