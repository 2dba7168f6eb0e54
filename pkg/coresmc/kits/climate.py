#! /usr/bin/env python

# Standard Imports
from collections import namedtuple

# External Imports
import numpy as np

# coresmc Imports
from coresmc import *
from coresmc.kits.orbital import ForcingWeights, UNFORCED

# Logging
log = logging.getLogger('coresmc.kits.climate')

SCHEME_EULER_MARUYAMA = 'euler-maruyama'
DEFAULT_MAX_STEP = 0.2  # kyr

DynamicsParams = namedtuple('DynamicsParams', 'beta0 beta1 beta2 delta alpha sigma1 sigma2')
ClimateState = namedtuple('ClimateState', 'x1 x2 t')
IntegratorConfig = namedtuple('IntegratorConfig', 'max_step scheme')
IntegratorConfig.__new__.__defaults__ = (DEFAULT_MAX_STEP, SCHEME_EULER_MARUYAMA)


def validate_dynamics(params):
    if not all(np.isfinite(v) for v in params):
        raise utils.ParameterError('dynamics parameters must be finite: params={}'.format(params))
    if params.sigma1 < 0 or params.sigma2 < 0:
        raise utils.ParameterError('diffusion scales must be non-negative: sigma1={} sigma2={}'.format(
            params.sigma1, params.sigma2))
    return params


def validate_integrator(config):
    if not config.max_step > 0:
        raise utils.ConfigError('integrator max_step must be positive: max_step={}'.format(config.max_step))
    if config.scheme != SCHEME_EULER_MARUYAMA:
        raise utils.ConfigError('unknown integration scheme: scheme={}'.format(config.scheme))
    return config


def drift(state, params, F):
    """
    drift of the forced oscillator, works on scalars or particle arrays
    :param state: ClimateState (or anything with x1, x2)
    :param params: DynamicsParams
    :param F: forcing value(s)
    :return: (dx1_dt, dx2_dt)
    """
    return _drift(state.x1, state.x2, params, F)


def _drift(x1, x2, params, F):
    dx1 = -(params.beta0 + params.beta1 * x1 + params.beta2 * (x1 ** 3 - x1) + params.delta * x2 + F)
    dx2 = params.alpha * params.delta * (x1 + x2 - x2 ** 3 / 3.0)
    return dx1, dx2


def integrate_paths(x1, x2, t_start, t_end, params, curve, config, rng):
    """
    Euler-Maruyama over per-particle intervals [t_start, t_end].
    every particle gets its own exact partition: n = ceil(dt / max_step) substeps of size dt / n,
    forcing taken at the left end of each substep. particles with an empty interval draw nothing.
    :param x1: array of states
    :param x2: array of states
    :param t_start: array (or scalar) of start times
    :param t_end: array (or scalar) of end times, t_end >= t_start
    :param params: DynamicsParams
    :param curve: callable t -> forcing, or None for no forcing
    :param config: IntegratorConfig
    :param rng: numpy Generator
    :return: (x1, x2) at t_end (new arrays)
    """
    x1 = np.array(x1, dtype=float, ndmin=1)
    x2 = np.array(x2, dtype=float, ndmin=1)
    size = len(x1)
    t_start = np.broadcast_to(np.asarray(t_start, dtype=float), (size,))
    t_end = np.broadcast_to(np.asarray(t_end, dtype=float), (size,))
    span = t_end - t_start
    if np.any(span < 0):
        raise utils.OrderingError('integration end precedes start: min_span={}'.format(np.min(span)))

    n_steps = np.ceil(span / config.max_step).astype(np.int64)
    h = np.where(n_steps > 0, span / np.maximum(n_steps, 1), 0.0)
    sqrt_h = np.sqrt(h)
    t = t_start.copy()
    noisy = params.sigma1 > 0 or params.sigma2 > 0
    for k in range(int(n_steps.max()) if size else 0):
        idx = np.flatnonzero(n_steps > k)
        F = curve(t[idx]) if curve is not None else 0.0
        dx1, dx2 = _drift(x1[idx], x2[idx], params, F)
        step = h[idx]
        x1[idx] += dx1 * step
        x2[idx] += dx2 * step
        if noisy:
            xi = rng.standard_normal((2, len(idx)))
            x1[idx] += params.sigma1 * sqrt_h[idx] * xi[0]
            x2[idx] += params.sigma2 * sqrt_h[idx] * xi[1]
        t[idx] += step
    return x1, x2


def integrate(state, t_end, params, weights, forcing, config, rng):
    """
    integrate one (or an array of) climate state(s) up to t_end
    :param state: ClimateState, fields may be arrays
    :param t_end: kyr, >= state.t
    :param params: DynamicsParams
    :param weights: ForcingWeights
    :param forcing: OrbitalForcing, or None for the unforced system
    :param config: IntegratorConfig
    :param rng: numpy Generator
    :return: ClimateState at t_end
    """
    if np.any(np.asarray(t_end) < np.asarray(state.t)):
        raise utils.OrderingError('integration end precedes start: t={} t_end={}'.format(state.t, t_end))
    if np.all(np.asarray(t_end) == np.asarray(state.t)):
        return state
    curve = forcing.curve(weights) if forcing is not None else None
    scalar = np.ndim(state.x1) == 0
    x1, x2 = integrate_paths(state.x1, state.x2, state.t, t_end, params, curve, config, rng)
    t_out = np.broadcast_to(np.asarray(t_end, dtype=float), x1.shape).copy()
    if scalar:
        return ClimateState(float(x1[0]), float(x2[0]), float(t_end))
    return ClimateState(x1, x2, t_out)


class ClimateModel(object):
    """
    a model variant: which forcing weights are free and how the forcing curve is built.
    every variant switch (prior, filter, sampler, simulator) goes through get_model.
    forced: gamma is inferred. unforced: gamma is pinned to zero.
    """
    name = None
    forced = None
    pinned = {}

    def weights(self, weights):
        raise NotImplementedError

    def curve(self, forcing, weights):
        """forcing curve t -> F for these weights, None when the system runs unforced"""
        weights = self.weights(weights)
        if forcing is None or not any(weights):
            return None
        return forcing.curve(weights)

    def pin(self, params):
        """ModelParams with the pinned parameters of this variant applied"""
        return params.replace(**self.pinned) if self.pinned else params

    def check_free(self, names):
        """raise ConfigError when the free parameter names disagree with this variant"""
        weight_names = set(ForcingWeights._fields)
        if self.forced and not weight_names.issubset(names):
            raise utils.ConfigError('forced model needs the forcing weights in the prior')
        if not self.forced and not weight_names.isdisjoint(names):
            raise utils.ConfigError('unforced model cannot infer forcing weights, pin them in the prior')


class ForcedModel(ClimateModel):
    name = 'forced'
    forced = True

    def weights(self, weights):
        return ForcingWeights(*weights)


class UnforcedModel(ClimateModel):
    name = 'unforced'
    forced = False
    pinned = dict(zip(UNFORCED._fields, UNFORCED))

    def weights(self, weights):
        return UNFORCED


CLIMATE_MODELS = {
    ForcedModel.name: ForcedModel(),
    UnforcedModel.name: UnforcedModel(),
}


def get_model(variant):
    if isinstance(variant, ClimateModel):
        return variant
    try:
        return CLIMATE_MODELS[variant]
    except KeyError:
        raise utils.ConfigError('unknown model variant: variant={} known={}'.format(
            variant, sorted(CLIMATE_MODELS)))
