#! /usr/bin/env python

# External Imports
import numpy as np
from scipy.special import logsumexp

# coresmc Imports
from coresmc import *

# logging
log = logging.getLogger('coresmc.utils.stats')


def clean_log_weights(log_w):
    """copy of log-weights with NaN (and +inf) mapped to -inf, so nothing downstream goes NaN silently"""
    log_w = np.array(log_w, dtype=float)
    bad = ~np.isfinite(log_w) & ~np.isneginf(log_w)
    if bad.any():
        log.trace('non-finite log-weights mapped to -inf: count={}'.format(int(bad.sum())))
        log_w[bad] = -np.inf
    return log_w


def normalize_log_weights(log_w):
    """
    normalized weights from log-weights
    :param log_w: array of log-weights, -inf allowed
    :return: (W, log_sum) where W sums to 1, or (zeros, -inf) when every weight is -inf
    """
    log_w = clean_log_weights(log_w)
    log_sum = logsumexp(log_w) if np.isfinite(log_w).any() else -np.inf
    if not np.isfinite(log_sum):
        return np.zeros_like(log_w), -np.inf
    return np.exp(log_w - log_sum), log_sum


def log_mean_exp(log_w):
    """log of the mean of exp(log_w), -inf if all weights are -inf"""
    _, log_sum = normalize_log_weights(log_w)
    return log_sum - np.log(len(log_w))


def ess(weights):
    """effective sample size 1 / sum(w^2) of normalized weights"""
    weights = np.asarray(weights, dtype=float)
    total = np.sum(weights ** 2)
    return 1.0 / total if total > 0 else 0.0


def systematic_resample(weights, rng):
    """
    systematic resampling: one uniform draw, N evenly spaced points through the cumulative weights.
    :param weights: normalized weights
    :param rng: numpy Generator
    :return: ancestor indices (int array, non-decreasing)
    """
    weights = np.asarray(weights, dtype=float)
    n = len(weights)
    positions = (rng.uniform() + np.arange(n)) / n
    cumulative = np.cumsum(weights)
    cumulative[-1] = 1.0  # guard against round-off leaving the last point outside
    idx = np.searchsorted(cumulative, positions, side='right')
    # round-off in the cumulative sum must not hand a pick to a trailing zero-weight particle
    positive = np.flatnonzero(weights > 0)
    if len(positive):
        idx = np.minimum(idx, positive[-1])
    return idx.astype(np.int64)


def weighted_mean_var(values, weights, axis=0):
    """weighted mean and (biased, plug-in) variance of values along axis"""
    values = np.asarray(values, dtype=float)
    weights = np.asarray(weights, dtype=float)
    shape = [1] * values.ndim
    shape[axis] = -1
    w = weights.reshape(shape)
    mean = np.sum(w * values, axis=axis)
    var = np.sum(w * (values - np.expand_dims(mean, axis)) ** 2, axis=axis)
    return mean, np.maximum(var, 0.0)


__all__ = [
    'clean_log_weights', 'normalize_log_weights', 'log_mean_exp', 'ess', 'systematic_resample',
    'weighted_mean_var',
]
