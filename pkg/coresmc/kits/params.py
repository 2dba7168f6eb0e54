#! /usr/bin/env python

# External Imports
import numpy as np
from scipy import stats
from scipy.special import expit, logit

# coresmc Imports
from coresmc import *
from coresmc.kits.archive import ArchiveParams, validate_archive
from coresmc.kits.climate import DynamicsParams, get_model, validate_dynamics
from coresmc.kits.observation import CalibrationParams, validate_calibration
from coresmc.kits.orbital import ForcingWeights, validate_weights

# Logging
log = logging.getLogger('coresmc.kits.params')

DYNAMICS_NAMES = DynamicsParams._fields
WEIGHT_NAMES = ForcingWeights._fields
CALIBRATION_NAMES = CalibrationParams._fields
ARCHIVE_NAMES = ArchiveParams._fields
PARAM_NAMES = DYNAMICS_NAMES + WEIGHT_NAMES + CALIBRATION_NAMES + ARCHIVE_NAMES
N_PARAMS = len(PARAM_NAMES)  # 17

# support each prior must stay inside: (lower, upper), None = unbounded
PARAM_SUPPORT = {
    'sigma1': (0.0, None),
    'sigma2': (0.0, None),
    'sigma_y': (0.0, None),
    'mu_s': (0.0, None),
    'sigma_s': (0.0, None),
    'compaction': (0.0, None),
    'phi0': (0.0, 1.0),
}


class ModelParams(object):
    """the 17 model parameters, grouped as dynamics / forcing weights / calibration / archive"""

    def __init__(self, dynamics, weights, calib, archive):
        self.dynamics = DynamicsParams(*dynamics)
        self.weights = ForcingWeights(*weights)
        self.calib = CalibrationParams(*calib)
        self.archive = ArchiveParams(*archive)

    def validate(self, allow_zero_noise=False):
        validate_dynamics(self.dynamics)
        validate_weights(self.weights)
        validate_calibration(self.calib, allow_zero_noise=allow_zero_noise)
        validate_archive(self.archive)
        return self

    @classmethod
    def from_vector(cls, values):
        values = [float(v) for v in values]
        if len(values) != N_PARAMS:
            raise utils.ParameterError('expected {} parameters, got {}'.format(N_PARAMS, len(values)))
        a, b, c = len(DYNAMICS_NAMES), len(DYNAMICS_NAMES) + len(WEIGHT_NAMES), N_PARAMS - len(ARCHIVE_NAMES)
        return cls(values[:a], values[a:b], values[b:c], values[c:])

    @classmethod
    def from_dict(cls, data):
        missing = [name for name in PARAM_NAMES if name not in data]
        if missing:
            raise utils.ParameterError('missing parameters: {}'.format(missing))
        unknown = sorted(set(data) - set(PARAM_NAMES))
        if unknown:
            raise utils.ParameterError('unknown parameters: {}'.format(unknown))
        return cls.from_vector([data[name] for name in PARAM_NAMES])

    def to_vector(self):
        return np.array(tuple(self.dynamics) + tuple(self.weights) + tuple(self.calib) + tuple(self.archive),
                        dtype=float)

    def to_dict(self):
        return dict(zip(PARAM_NAMES, (float(v) for v in self.to_vector())))

    def replace(self, **kwargs):
        data = self.to_dict()
        data.update(kwargs)
        return ModelParams.from_dict(data)

    def __eq__(self, other):
        return isinstance(other, ModelParams) and np.array_equal(self.to_vector(), other.to_vector())

    def __repr__(self):
        return '<ModelParams {}>'.format(' '.join('{}={:.6g}'.format(k, v) for k, v in self.to_dict().items()))


class ParamPrior(object):
    """
    a one-dimensional prior with its map to the unconstrained line used by the rejuvenation moves.
    the map follows the support: logit for two finite bounds, log distance for one, identity otherwise.
    """
    DISTRIBUTIONS = ('uniform', 'gaussian', 'log-gaussian', 'truncated-gaussian')

    def __init__(self, name, dist, args):
        self.name = name
        self.dist = dist
        self.args = [float(a) for a in args]
        self.frozen = self._freeze(dist, self.args)
        lower, upper = self.frozen.support()
        self.lower = float(lower) if np.isfinite(lower) else None
        self.upper = float(upper) if np.isfinite(upper) else None
        self._check_support()

    def _freeze(self, dist, args):
        expected = {'uniform': 2, 'gaussian': 2, 'log-gaussian': 2, 'truncated-gaussian': 4}
        if dist not in expected:
            raise utils.ConfigError('unknown prior distribution: param={} dist={} known={}'.format(
                self.name, dist, self.DISTRIBUTIONS))
        if len(args) != expected[dist]:
            raise utils.ConfigError('prior {} takes {} arguments: param={} args={}'.format(
                dist, expected[dist], self.name, args))
        if dist == 'uniform':
            a, b = args
            if not b > a:
                raise utils.ConfigError('uniform prior needs a < b: param={} args={}'.format(self.name, args))
            return stats.uniform(loc=a, scale=b - a)
        if args[1] <= 0:
            raise utils.ConfigError('prior scale must be positive: param={} args={}'.format(self.name, args))
        if dist == 'gaussian':
            return stats.norm(loc=args[0], scale=args[1])
        if dist == 'log-gaussian':
            return stats.lognorm(s=args[1], scale=np.exp(args[0]))
        m, s, a, b = args
        if not b > a:
            raise utils.ConfigError('truncated-gaussian prior needs a < b: param={} args={}'.format(self.name, args))
        return stats.truncnorm((a - m) / s, (b - m) / s, loc=m, scale=s)

    def _check_support(self):
        lower, upper = PARAM_SUPPORT.get(self.name, (None, None))
        if lower is not None and (self.lower is None or self.lower < lower):
            raise utils.ConfigError('prior support reaches below {}: param={} dist={} args={}'.format(
                lower, self.name, self.dist, self.args))
        if upper is not None and (self.upper is None or self.upper > upper):
            raise utils.ConfigError('prior support reaches above {}: param={} dist={} args={}'.format(
                upper, self.name, self.dist, self.args))

    @property
    def transform(self):
        if self.lower is not None and self.upper is not None:
            return 'logit'
        if self.lower is not None:
            return 'log-lower'
        if self.upper is not None:
            return 'log-upper'
        return 'identity'

    def logpdf(self, x):
        return self.frozen.logpdf(x)

    def rvs(self, size, rng):
        return self.frozen.rvs(size=size, random_state=rng)

    def median(self):
        return float(self.frozen.median())

    def to_unconstrained(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide='ignore', invalid='ignore'):
            if self.transform == 'logit':
                return logit((x - self.lower) / (self.upper - self.lower))
            if self.transform == 'log-lower':
                return np.log(x - self.lower)
            if self.transform == 'log-upper':
                return np.log(self.upper - x)
        return x

    def from_unconstrained(self, u):
        u = np.asarray(u, dtype=float)
        if self.transform == 'logit':
            return self.lower + (self.upper - self.lower) * expit(u)
        if self.transform == 'log-lower':
            return self.lower + np.exp(u)
        if self.transform == 'log-upper':
            return self.upper - np.exp(u)
        return u

    def log_jacobian(self, u):
        """log |dx/du|"""
        u = np.asarray(u, dtype=float)
        if self.transform == 'logit':
            return np.log(self.upper - self.lower) - np.logaddexp(0.0, u) - np.logaddexp(0.0, -u)
        if self.transform in ('log-lower', 'log-upper'):
            return u
        return np.zeros_like(u)

    def to_dict(self):
        return {'dist': self.dist, 'args': list(self.args)}


class Prior(object):
    """
    the joint (independent) prior over the free parameters of a run. parameters that are not free are
    pinned: forcing weights to 0 in the unforced model, archive parameters to their prior median when
    the chronology is fixed.
    """

    def __init__(self, param_priors, free_names, fixed_values):
        self.param_priors = param_priors
        self.names = tuple(free_names)
        self.fixed_values = dict(fixed_values)
        if set(self.names) | set(self.fixed_values) != set(PARAM_NAMES):
            raise utils.ConfigError('prior does not cover every parameter: missing={}'.format(
                sorted(set(PARAM_NAMES) - set(self.names) - set(self.fixed_values))))
        self.components = [param_priors[name] for name in self.names]

    @classmethod
    def from_config(cls, priors_config, variant='forced', fixed_chronology=False):
        """
        :param priors_config: {name: {'dist': ..., 'args': [...]}} for all 17 parameters
        :param variant: 'forced' or 'unforced'
        :param fixed_chronology: exclude the archive parameters
        """
        missing = [name for name in PARAM_NAMES if name not in priors_config]
        if missing:
            raise utils.ConfigError('priors missing for parameters: {}'.format(missing))
        unknown = sorted(set(priors_config) - set(PARAM_NAMES))
        if unknown:
            raise utils.ConfigError('priors given for unknown parameters: {}'.format(unknown))
        param_priors = {name: ParamPrior(name, entry.get('dist'), entry.get('args', ()))
                        for name, entry in priors_config.items()}
        fixed = dict(get_model(variant).pinned)
        if fixed_chronology:
            fixed.update({name: param_priors[name].median() for name in ARCHIVE_NAMES})
        free = [name for name in PARAM_NAMES if name not in fixed]
        log.debug('prior built: variant={} fixed_chronology={} free={}'.format(variant, fixed_chronology, len(free)))
        return cls(param_priors, free, fixed)

    @property
    def dim(self):
        return len(self.names)

    def _columns(self, theta):
        theta = np.atleast_2d(np.asarray(theta, dtype=float))
        if theta.shape[1] != self.dim:
            raise utils.ParameterError('expected {} free parameters, got {}'.format(self.dim, theta.shape[1]))
        return theta

    def logpdf(self, theta):
        """log prior density of each row (free parameters)"""
        theta = self._columns(theta)
        return np.sum([p.logpdf(theta[:, i]) for i, p in enumerate(self.components)], axis=0)

    def rvs(self, n, rng):
        return np.column_stack([p.rvs(n, rng) for p in self.components])

    def to_unconstrained(self, theta):
        theta = self._columns(theta)
        return np.column_stack([p.to_unconstrained(theta[:, i]) for i, p in enumerate(self.components)])

    def from_unconstrained(self, u):
        u = self._columns(u)
        return np.column_stack([p.from_unconstrained(u[:, i]) for i, p in enumerate(self.components)])

    def log_jacobian(self, u):
        u = self._columns(u)
        return np.sum([p.log_jacobian(u[:, i]) for i, p in enumerate(self.components)], axis=0)

    def build(self, theta_row):
        """ModelParams from one row of free parameters plus the pinned values"""
        data = dict(self.fixed_values)
        data.update(zip(self.names, (float(v) for v in theta_row)))
        return ModelParams.from_dict(data).validate()

    def free_vector(self, params):
        data = params.to_dict()
        return np.array([data[name] for name in self.names])

    def to_dict(self):
        return {
            'free': list(self.names),
            'fixed': dict(self.fixed_values),
            'priors': {name: p.to_dict() for name, p in self.param_priors.items()},
        }
