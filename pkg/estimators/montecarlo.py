"""
Monte-Carlo estimates over seeded families

Paths are simulated in chunks of ``QRS_CHUNK_SIZE`` and chunks may run on
``QRS_WORKERS`` threads. Path i always draws from the stream of (seed, i)
and chunk results are collected in path order before anything is summed,
so estimates do not depend on the number of workers.
"""
from concurrent.futures import ThreadPoolExecutor
import logging

import numpy as np
from django.conf import settings

from moduli.exceptions import InvalidParameterError
from processes.traces import batch_traces
from .intervals import hoeffding_interval, normal_interval, wilson_interval

logger = logging.getLogger(__name__)


def _check_paths(n_paths):
    if isinstance(n_paths, bool) or not isinstance(n_paths, (int, np.integer)) or n_paths < 1:
        raise InvalidParameterError("n_paths", n_paths, "a positive number of paths")
    return int(n_paths)


def chunks(n_paths, chunk_size=None):
    """Consecutive ranges of path indices covering 0..n_paths-1"""
    chunk_size = int(settings.QRS_CHUNK_SIZE if chunk_size is None else chunk_size)
    if chunk_size < 1:
        raise InvalidParameterError("chunk_size", chunk_size, "a positive integer")
    return [range(start, min(start + chunk_size, n_paths)) for start in range(0, n_paths, chunk_size)]


def _evaluate(family, functions, batch, seed, horizon, indices):
    """(len(indices), len(functions)) values of every function on every path"""
    columns = []
    traces = None
    for function in functions:
        if getattr(function, "vectorised", False):
            column = np.asarray(function.on_batch(batch), dtype=np.float64)
        else:
            if traces is None:
                traces = batch_traces(batch, family.tracks, seed, horizon, indices)
            column = np.array([float(function(trace)) for trace in traces])
        columns.append(column)
    return np.stack(columns, axis=1) if columns else np.empty((len(indices), 0))


def sample_values(family, functions, n_paths, horizon, seed, workers=None, chunk_size=None):
    """Evaluate path functions on n_paths seeded paths

    Returns an array of shape (n_paths, len(functions)), row i holding the
    values on path i.
    """
    n_paths = _check_paths(n_paths)
    functions = list(functions)
    for function in functions:
        missing = set(getattr(function, "requires", ())) - set(family.tracks)
        if missing:
            raise InvalidParameterError("track", ", ".join(sorted(missing)), f"one of the {family.kind} tracks")
    workers = int(settings.QRS_WORKERS if workers is None else workers)
    if workers < 1:
        raise InvalidParameterError("workers", workers, "a positive number of threads")

    def run_chunk(indices):
        batch = family.sample_batch(seed, horizon, indices)
        return _evaluate(family, functions, batch, seed, horizon, list(indices))

    parts = chunks(n_paths, chunk_size)
    if workers == 1:
        results = [run_chunk(part) for part in parts]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_chunk, parts))

    logger.debug(f"Sampled {n_paths} paths of {family.kind} to horizon {horizon} in {len(parts)} chunks")
    return np.concatenate(results, axis=0)


def mc_probabilities(family, events, n_paths, horizon, seed, workers=None, chunk_size=None, confidence=None):
    """Wilson-interval frequency of each event over the same n_paths paths"""
    values = sample_values(family, events, n_paths, horizon, seed, workers, chunk_size)
    counts = (values != 0).sum(axis=0)
    return [wilson_interval(int(count), values.shape[0], confidence) for count in counts]


def mc_probability(family, event, n_paths, horizon, seed, workers=None, chunk_size=None, confidence=None):
    return mc_probabilities(family, [event], n_paths, horizon, seed, workers, chunk_size, confidence)[0]


def mc_expectations(family, statistics, n_paths, horizon, seed, workers=None, chunk_size=None,
                    confidence=None, support=None):
    """Mean of each statistic, with a normal interval, or Hoeffding's when a
    (lower, upper) ``support`` is given"""
    values = sample_values(family, statistics, n_paths, horizon, seed, workers, chunk_size)
    if support is not None:
        return [hoeffding_interval(column, *support, confidence=confidence) for column in values.T]
    return [normal_interval(column, confidence) for column in values.T]


def mc_expectation(family, statistic, n_paths, horizon, seed, workers=None, chunk_size=None,
                   confidence=None, support=None):
    return mc_expectations(
        family, [statistic], n_paths, horizon, seed, workers, chunk_size, confidence, support,
    )[0]
