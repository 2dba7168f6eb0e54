#! /usr/bin/env python

# Standard Imports
from collections import namedtuple

# External Imports
import numpy as np
from scipy.special import log_ndtr

# coresmc Imports
from coresmc import *

# Logging
log = logging.getLogger('coresmc.kits.archive')

DEFAULT_RETRY_CAP = 100
_LOG_2PI = np.log(2.0 * np.pi)

ArchiveParams = namedtuple('ArchiveParams', 'mu_s sigma_s compaction phi0')


def validate_archive(params):
    if not all(np.isfinite(v) for v in params):
        raise utils.ParameterError('archive parameters must be finite: params={}'.format(params))
    if not params.mu_s > 0 or not params.sigma_s > 0:
        raise utils.ParameterError('accumulation mean and volatility must be positive: mu_s={} sigma_s={}'.format(
            params.mu_s, params.sigma_s))
    if not 0 <= params.phi0 < 1:
        raise utils.ParameterError('surface porosity must lie in [0, 1): phi0={}'.format(params.phi0))
    if params.compaction < 0:
        raise utils.ParameterError('compaction gradient must be non-negative: compaction={}'.format(
            params.compaction))
    return params


def compact_correct(H, params):
    """
    non-compacted equivalent depth H + c / (1 - phi0) * H^2
    :param H: depth(s) in metres, >= 0
    :param params: ArchiveParams
    :return: corrected depth(s)
    """
    if params.phi0 >= 1:
        raise utils.ParameterError('surface porosity must be below 1: phi0={}'.format(params.phi0))
    H = np.asarray(H, dtype=float)
    if np.any(H < 0):
        raise utils.ParameterError('depths must be non-negative: min_depth={}'.format(np.min(H)))
    return H + params.compaction / (1.0 - params.phi0) * H ** 2


def _check_ig(mean, shape):
    if not np.all(np.asarray(mean) > 0) or not np.all(np.asarray(shape) > 0):
        raise utils.ParameterError('inverse gaussian mean and shape must be positive: mean={} shape={}'.format(
            mean, shape))


def ig_logpdf(x, mean, shape):
    """
    inverse gaussian log-density, (mean, shape) parameterization
    :return: log sqrt(shape / (2 pi x^3)) - shape (x - mean)^2 / (2 mean^2 x), -inf for x <= 0
    """
    _check_ig(mean, shape)
    x = np.asarray(x, dtype=float)
    with np.errstate(divide='ignore', invalid='ignore'):
        value = (0.5 * (np.log(shape) - _LOG_2PI - 3.0 * np.log(x))
                 - shape * (x - mean) ** 2 / (2.0 * mean ** 2 * x))
    value = np.where(x > 0, value, -np.inf)
    return value[()] if value.ndim == 0 else value


def ig_logcdf(x, mean, shape):
    """log P(X <= x) for X ~ IG(mean, shape), from log_ndtr so deep tails stay finite"""
    _check_ig(mean, shape)
    x = np.asarray(x, dtype=float)
    with np.errstate(divide='ignore', invalid='ignore'):
        root = np.sqrt(shape / x)
        first = log_ndtr(root * (x / mean - 1.0))
        second = 2.0 * shape / mean + log_ndtr(-root * (x / mean + 1.0))
        value = np.logaddexp(first, second)
    value = np.where(x > 0, np.minimum(value, 0.0), -np.inf)
    return value[()] if value.ndim == 0 else value


def sample_ig(mean, shape, rng, size=None):
    """inverse gaussian draws by the transformation method (chi-square variate plus root selection)"""
    _check_ig(mean, shape)
    return rng.wald(mean, shape, size=size)


def increment_law(H_young, H_old, params):
    """(mean, shape) of the time needed to accumulate the corrected depth between H_young and H_old"""
    dH = np.asarray(H_old, dtype=float) - np.asarray(H_young, dtype=float)
    return dH / params.mu_s, dH ** 2 / params.sigma_s ** 2


def age_marginal_logpdf(T, H_corrected, params):
    """log p(T) for a slice at corrected depth H, anchored at the present"""
    if not np.all(np.asarray(H_corrected) > 0):
        raise utils.OrderingError('corrected depth must be positive: H={}'.format(H_corrected))
    mean, shape = increment_law(0.0, H_corrected, params)
    return ig_logpdf(-np.asarray(T, dtype=float), mean, shape)


def _check_order(H_m, H_prev):
    if not H_prev > H_m > 0:
        raise utils.OrderingError('slice depths out of order: H_prev={} H_m={}'.format(H_prev, H_m))


def age_transition_logpdf(T_m, T_prev, H_m, H_prev, params):
    """
    log p(T_m | T_prev), the forward (older to younger) age transition between two slices.
    exactly normalized on T_prev < T_m < 0, -inf elsewhere.
    """
    _check_order(H_m, H_prev)
    T_m = np.asarray(T_m, dtype=float)
    T_prev = np.asarray(T_prev, dtype=float)
    mean, shape = increment_law(H_m, H_prev, params)
    value = (ig_logpdf(T_m - T_prev, mean, shape)
             + age_marginal_logpdf(T_m, H_m, params)
             - age_marginal_logpdf(T_prev, H_prev, params))
    value = np.where((T_prev < T_m) & (T_m < 0), value, -np.inf)
    return value[()] if value.ndim == 0 else value


def propose_age(T_prev, H_m, H_prev, params, rng, retry_cap=DEFAULT_RETRY_CAP):
    """
    draw T_m = T_prev + tau with tau ~ IG(dH / mu_s, dH^2 / sigma_s^2), redrawn while T_m >= 0.
    :param T_prev: array of previous ages
    :return: (T_m, log_q). particles that exhaust the retry cap get T_m = nan and log_q = -inf
    """
    _check_order(H_m, H_prev)
    T_prev = np.array(T_prev, dtype=float, ndmin=1)
    mean, shape = increment_law(H_m, H_prev, params)
    T_m = T_prev + rng.wald(mean, shape, size=T_prev.shape)
    pending = np.flatnonzero(T_m >= 0)
    for _ in range(retry_cap - 1):
        if not len(pending):
            break
        T_m[pending] = T_prev[pending] + rng.wald(mean, shape, size=len(pending))
        pending = pending[T_m[pending] >= 0]
    if len(pending):
        log.trace('age proposal retry cap exhausted: particles={} retry_cap={}'.format(len(pending), retry_cap))
        T_m[pending] = np.nan
    log_q = ig_logpdf(T_m - T_prev, mean, shape) - ig_logcdf(-T_prev, mean, shape)
    log_q = np.where(np.isfinite(T_m), log_q, -np.inf)
    return T_m, log_q


class DepthGrid(object):
    """slice depths, deepest first (strictly decreasing), with the compaction-corrected copy"""

    def __init__(self, depths, corrected_depths):
        self.depths = np.asarray(depths, dtype=float)
        self.corrected_depths = np.asarray(corrected_depths, dtype=float)
        if self.depths.ndim != 1 or not len(self.depths):
            raise utils.ConfigError('depth grid must be a non-empty vector')
        if np.any(self.depths <= 0):
            raise utils.OrderingError('depths must be positive: min_depth={}'.format(self.depths.min()))
        if np.any(np.diff(self.depths) >= 0) or np.any(np.diff(self.corrected_depths) >= 0):
            raise utils.OrderingError('depths must be strictly decreasing, deepest first')

    @classmethod
    def from_depths(cls, depths, params):
        return cls(depths, compact_correct(depths, params))

    def __len__(self):
        return len(self.depths)


class Chronology(object):
    """slice ages T_1 < T_2 < ... < T_M < 0 in kyr"""

    def __init__(self, times):
        self.times = np.array(times, dtype=float)
        if self.times.ndim != 1 or not len(self.times):
            raise utils.ConfigError('chronology must be a non-empty vector')
        if not is_monotone(self.times):
            raise utils.OrderingError('chronology must be strictly increasing and negative')

    @property
    def ages(self):
        return -self.times

    def __len__(self):
        return len(self.times)

    def __eq__(self, other):
        return isinstance(other, Chronology) and np.array_equal(self.times, other.times)


def is_monotone(times):
    times = np.asarray(times, dtype=float)
    return bool(np.all(np.isfinite(times)) and np.all(np.diff(times) > 0) and np.all(times < 0))


def sample_chronology(grid, params, rng):
    """
    forward draw of a chronology: the shallowest slice age from the present-anchored law, then deeper
    slices by independent IG increments
    :param grid: DepthGrid
    :param params: ArchiveParams
    :param rng: numpy Generator
    :return: Chronology
    """
    corrected = grid.corrected_depths
    tops = np.append(corrected[1:], 0.0)
    mean, shape = increment_law(tops, corrected, params)
    increments = rng.wald(mean, shape)
    # cumulate from the top of the core downwards
    ages = np.cumsum(increments[::-1])[::-1]
    return Chronology(-ages)
