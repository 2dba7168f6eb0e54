#! /usr/bin/env python

# External Imports
import numpy as np

# coresmc Imports
from coresmc import *

# logging
log = logging.getLogger('coresmc.utils.rng')

# stream purposes, the first element of every stream key
PURPOSE_INIT = 1
PURPOSE_STEP = 2
PURPOSE_RESAMPLE = 3
PURPOSE_PROPOSE = 4
PURPOSE_MOVE = 5
PURPOSE_PATHS = 6
PURPOSE_SIMULATE = 7
PURPOSE_SUMMARY = 8
PURPOSE_PRIOR = 9


def stream(seed, *key):
    """
    counter-based random stream for (seed, key...).
    the same (seed, key) always yields the same Philox generator, independently of which thread asks
    or in which order, so particle results never depend on scheduling.
    :param seed: the run seed (non-negative int)
    :param key: integers identifying the work unit, e.g. (purpose, step, slot)
    :return: numpy Generator
    """
    seed_seq = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(seed_seq))


__all__ = [
    'stream', 'PURPOSE_INIT', 'PURPOSE_STEP', 'PURPOSE_RESAMPLE', 'PURPOSE_PROPOSE', 'PURPOSE_MOVE',
    'PURPOSE_PATHS', 'PURPOSE_SIMULATE', 'PURPOSE_SUMMARY', 'PURPOSE_PRIOR',
]
