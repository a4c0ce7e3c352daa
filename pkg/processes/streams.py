"""
Per-path random streams

Every sample path owns an independent Philox stream keyed by the base seed
and the path index, so a path's noise does not depend on which batch or
thread simulated it.
"""
import numpy as np

from moduli.exceptions import InvalidParameterError

SEED_BITS = 64


def check_seed(seed):
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or not 0 <= seed < 2 ** SEED_BITS:
        raise InvalidParameterError("seed", seed, "an unsigned 64-bit integer")
    return int(seed)


def path_generator(seed, path_index):
    """np.random.Generator for path ``path_index`` of a run seeded with ``seed``"""
    sequence = np.random.SeedSequence(entropy=check_seed(seed), spawn_key=(int(path_index),))
    return np.random.Generator(np.random.Philox(sequence))


def uniforms(seed, path_indices, steps, width=1):
    """Uniform draws of shape (paths, steps) or (paths, steps, width)

    Draws are consumed step by step from each path's stream, so a longer
    horizon extends a shorter one prefix-exactly.
    """
    shape = (steps,) if width == 1 else (steps, width)
    draws = [path_generator(seed, index).random(shape) for index in path_indices]
    if not draws:
        return np.empty((0,) + shape)
    return np.stack(draws)


def normals(seed, path_indices, steps):
    """Standard normal draws of shape (paths, steps), sequential per path"""
    draws = [path_generator(seed, index).standard_normal(steps) for index in path_indices]
    if not draws:
        return np.empty((0, steps))
    return np.stack(draws)
