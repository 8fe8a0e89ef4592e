"""Small shared helpers: seeding and wall-clock bucketing."""

from contextlib import contextmanager
from time import perf_counter

import numpy as np


def make_rng(seed=None):
    """Build the package-wide random generator.

    All randomness (core initialization, synthetic data, noise) goes through
    the counter-based Philox4x32 bit generator so that a seed, an integer or
    a tuple of integers, pins the full stream.  ``None`` draws fresh OS
    entropy.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        ss = seed
    else:
        ss = np.random.SeedSequence(seed)
    return np.random.Generator(np.random.Philox(ss))


def spawn_seeds(seed, n):
    """Derive ``n`` independent child seed sequences from ``seed``."""
    if isinstance(seed, np.random.SeedSequence):
        ss = seed
    else:
        ss = np.random.SeedSequence(seed)
    return ss.spawn(n)


@contextmanager
def stopwatch(buckets, key):
    """Accumulate the elapsed wall time of the block into ``buckets[key]``."""
    t0 = perf_counter()
    try:
        yield
    finally:
        buckets[key] += perf_counter() - t0
