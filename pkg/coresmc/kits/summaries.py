#! /usr/bin/env python

# Standard Imports
from collections import namedtuple

# External Imports
import numpy as np
from scipy.stats import gaussian_kde

# coresmc Imports
from coresmc import *
from coresmc.kits.archive import Chronology

# Logging
log = logging.getLogger('coresmc.kits.summaries')

HDR_HEADERS = ('slice', 'quantity', 'lo', 'hi', 'segment')
MEANS_HEADERS = ('slice', 'age_mean', 'age_sd', 'x1_mean', 'x2_mean')
QUANTITIES = ('age', 'x1', 'x2')
DEFAULT_GRID_POINTS = 512
GRID_PAD_BANDWIDTHS = 3.0

# (upper bound on 2 ln B, label), the first band whose bound exceeds the value applies
BF_BANDS = (
    (0.0, 'favours second'),
    (2.0, 'not worth more than a bare mention'),
    (6.0, 'positive'),
    (10.0, 'strong'),
    (np.inf, 'very strong'),
)

HdrInterval = namedtuple('HdrInterval', 'slice_index quantity intervals mass bandwidth')
BayesFactor = namedtuple('BayesFactor', 'log_bf log_z1 log_z2 log_bf_se two_ln_b band')


def _normalized(samples, weights):
    samples = np.asarray(samples, dtype=float)
    weights = np.full(len(samples), 1.0 / len(samples)) if weights is None else np.asarray(weights, dtype=float)
    keep = np.isfinite(samples) & (weights > 0)
    samples, weights = samples[keep], weights[keep]
    if not len(samples):
        raise utils.ConfigError('no finite weighted samples to summarise')
    return samples, weights / weights.sum()


def hdr(samples, weights=None, mass=0.95, grid_points=DEFAULT_GRID_POINTS, slice_index=None, quantity=None):
    """
    highest density region of weighted samples: gaussian kde (silverman bandwidth) on a grid spanning the
    sample range +- 3 bandwidths, the densest cells accumulated to the target mass and merged into intervals
    :return: HdrInterval
    """
    if not 0 < mass <= 1:
        raise utils.ConfigError('hdr mass must lie in (0, 1]: mass={}'.format(mass))
    samples, weights = _normalized(samples, weights)
    lo, hi = float(samples.min()), float(samples.max())
    if hi == lo:
        log.warn('degenerate samples, returning a point interval: slice={} quantity={} value={}'.format(
            slice_index, quantity, lo))
        return HdrInterval(slice_index, quantity, [(lo, hi)], mass, 0.0)
    if mass >= 1.0:
        return HdrInterval(slice_index, quantity, [(lo, hi)], mass, 0.0)

    kde = gaussian_kde(samples, bw_method='silverman', weights=weights)
    bandwidth = float(np.sqrt(kde.covariance[0, 0]))
    grid = np.linspace(lo - GRID_PAD_BANDWIDTHS * bandwidth, hi + GRID_PAD_BANDWIDTHS * bandwidth, grid_points)
    dx = grid[1] - grid[0]
    density = kde(grid)
    cell_mass = density / density.sum()
    order = np.argsort(-density, kind='stable')
    n_cells = min(int(np.searchsorted(np.cumsum(cell_mass[order]), mass)) + 1, grid_points)
    selected = np.zeros(grid_points, dtype=bool)
    selected[order[:n_cells]] = True

    intervals = []
    edges = np.diff(np.concatenate(([0], selected.astype(np.int8), [0])))
    for start, stop in zip(np.flatnonzero(edges == 1), np.flatnonzero(edges == -1) - 1):
        intervals.append((float(grid[start] - dx / 2.0), float(grid[stop] + dx / 2.0)))
    return HdrInterval(slice_index, quantity, intervals, mass, bandwidth)


def weighted_quantile(values, weights, q):
    """quantile(s) q of weighted samples, linear in the cumulative weight at the sample midpoints"""
    values, weights = _normalized(values, weights)
    order = np.argsort(values, kind='stable')
    values, weights = values[order], weights[order]
    cumulative = np.cumsum(weights) - 0.5 * weights
    return np.interp(q, cumulative, values)


def marginal_intervals(theta, weights, names, mass=0.95):
    """central weighted intervals of each parameter column, {name: (lo, hi)}"""
    tail = (1.0 - mass) / 2.0
    theta = np.asarray(theta, dtype=float)
    return {name: tuple(float(v) for v in weighted_quantile(theta[:, i], weights, [tail, 1.0 - tail]))
            for i, name in enumerate(names)}


def age_sd_profile(times, weights=None):
    """
    weighted sd of the age -T for every slice, and its mean over slices
    :param times: (n_particles, M) chronologies
    :return: (sd per slice, mean sd)
    """
    times = np.asarray(times, dtype=float)
    keep = np.all(np.isfinite(times), axis=1)
    weights = np.ones(len(times)) if weights is None else np.asarray(weights, dtype=float)
    weights = weights[keep] / weights[keep].sum()
    _, var = utils.weighted_mean_var(-times[keep], weights, axis=0)
    sd = np.sqrt(var)
    return sd, float(np.mean(sd))


def bf_band(two_ln_b):
    for bound, label in BF_BANDS:
        if two_ln_b < bound:
            return label
    return BF_BANDS[-1][1]


def bayes_factor(ev1, ev2):
    """
    log Bayes factor of the first model over the second
    :param ev1: EvidenceEstimate
    :param ev2: EvidenceEstimate
    :return: BayesFactor
    """
    if ev1.record_hash and ev2.record_hash and ev1.record_hash != ev2.record_hash:
        raise utils.InputConsistencyError('evidence estimates come from different records: {} != {}'.format(
            ev1.record_hash, ev2.record_hash))
    log_bf = ev1.log_z - ev2.log_z
    se = float(np.hypot(ev1.log_z_se or 0.0, ev2.log_z_se or 0.0))
    return BayesFactor(log_bf, ev1.log_z, ev2.log_z, se, 2.0 * log_bf, bf_band(2.0 * log_bf))


def bayes_factor_report(bf, ev1=None, ev2=None):
    report = dict(bf._asdict())
    if ev1 is not None and ev2 is not None:
        report['first'] = {'variant': ev1.variant, 'mode': ev1.mode, 'seed': ev1.seed}
        report['second'] = {'variant': ev2.variant, 'mode': ev2.mode, 'seed': ev2.seed}
        report['record_hash'] = ev1.record_hash
    return report


def sample_chronologies(times, weights, k, rng):
    """
    k whole-particle chronologies drawn by weight, slices never mixed across particles
    :param times: (n_particles, M)
    :return: list of Chronology
    """
    if k < 1:
        raise utils.ConfigError('need at least one chronology draw: k={}'.format(k))
    times = np.asarray(times, dtype=float)
    weights = np.asarray(weights, dtype=float) * np.all(np.isfinite(times), axis=1)
    if not weights.sum() > 0:
        raise utils.ConfigError('no complete chronology in the posterior')
    picks = rng.choice(len(times), size=k, p=weights / weights.sum())
    return [Chronology(times[i]) for i in picks]


class PosteriorSample(object):
    """weighted parameter particles with one trajectory (T, x1, x2 per slice) each"""

    def __init__(self, names, theta, weights, paths=None):
        self.names = tuple(names)
        self.theta = np.asarray(theta, dtype=float)
        self.weights = np.asarray(weights, dtype=float)
        self.paths = paths

    @classmethod
    def from_result(cls, result):
        return cls(result.names, result.theta, result.weights, result.paths)

    @classmethod
    def from_csv(cls, posterior_path, chronology_path=None):
        rows, headers = utils.read_csv(posterior_path, return_headers=True)
        if not rows or 'weight' not in (headers or ()):
            raise utils.CoreParseError('posterior csv needs parameter columns and a weight column',
                                       posterior_path, 1)
        names = [h for h in headers if h != 'weight']
        try:
            theta = np.array([[float(row[name]) for name in names] for row in rows]).reshape(len(rows), len(names))
            weights = np.array([float(row['weight']) for row in rows])
        except (TypeError, ValueError) as exc:
            raise utils.CoreParseError('non-numeric posterior value: {}'.format(exc), posterior_path)
        paths = None
        if chronology_path:
            paths, _ = read_chronology_csv(chronology_path, n_particles=len(rows))
        return cls(names, theta, weights, paths)

    @property
    def complete(self):
        """mask of particles that carry a full trajectory"""
        if self.paths is None:
            return np.zeros(len(self.weights), dtype=bool)
        return np.all(np.isfinite(self.paths['T']), axis=1)

    def path_weights(self):
        weights = self.weights * self.complete
        if not weights.sum() > 0:
            raise utils.ConfigError('posterior carries no trajectories')
        return weights / weights.sum()

    def quantity(self, name):
        if name == 'age':
            return -self.paths['T']
        return self.paths[name]


def hdr_table(posterior, mass=0.95, quantities=QUANTITIES, grid_points=DEFAULT_GRID_POINTS):
    """hdr rows (slice,quantity,lo,hi,segment) for every slice and quantity, slices 1-based"""
    weights = posterior.path_weights()
    keep = weights > 0
    rows = []
    for quantity in quantities:
        values = posterior.quantity(quantity)[keep]
        for m in range(values.shape[1]):
            interval = hdr(values[:, m], weights[keep], mass=mass, grid_points=grid_points, slice_index=m + 1,
                           quantity=quantity)
            for segment, (lo, hi) in enumerate(interval.intervals):
                rows.append({'slice': m + 1, 'quantity': quantity, 'lo': lo, 'hi': hi, 'segment': segment})
    return rows


def posterior_means(posterior):
    """per slice weighted mean and sd of the age, and the mean climate state"""
    weights = posterior.path_weights()
    keep = weights > 0
    w = weights[keep]
    age_mean, age_var = utils.weighted_mean_var(posterior.quantity('age')[keep], w)
    x1_mean, _ = utils.weighted_mean_var(posterior.quantity('x1')[keep], w)
    x2_mean, _ = utils.weighted_mean_var(posterior.quantity('x2')[keep], w)
    return [{'slice': m + 1, 'age_mean': float(age_mean[m]), 'age_sd': float(np.sqrt(age_var[m])),
             'x1_mean': float(x1_mean[m]), 'x2_mean': float(x2_mean[m])} for m in range(len(age_mean))]


def coverage(intervals_by_slice, truth_values):
    """fraction of slices whose true value falls inside one of that slice's intervals"""
    hits = 0
    for m, value in enumerate(truth_values):
        hits += any(lo <= value <= hi for lo, hi in intervals_by_slice.get(m + 1, ()))
    return hits / float(len(truth_values))


def intervals_by_slice(rows, quantity):
    out = {}
    for row in rows:
        if row['quantity'] == quantity:
            out.setdefault(int(row['slice']), []).append((float(row['lo']), float(row['hi'])))
    return out


def read_chronology_csv(path, n_particles=None):
    """
    trajectories of a chronology csv (particle,slice,T_kyr,x1,x2,weight)
    :return: ({'T', 'x1', 'x2'}: (n_particles, M) arrays, nan where a particle has no row), weights
    """
    rows = utils.read_csv(path)
    if not rows:
        raise utils.CoreParseError('empty chronology csv', path, 1)
    try:
        M = max(int(row['slice']) for row in rows)
        n_particles = n_particles or max(int(row['particle']) for row in rows) + 1
        paths = {k: np.full((n_particles, M), np.nan) for k in ('T', 'x1', 'x2')}
        weights = np.zeros(n_particles)
        for row in rows:
            n, m = int(row['particle']), int(row['slice']) - 1
            paths['T'][n, m] = float(row['T_kyr'])
            paths['x1'][n, m] = float(row['x1'])
            paths['x2'][n, m] = float(row['x2'])
            weights[n] = float(row['weight'])
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise utils.CoreParseError('malformed chronology row: {}'.format(exc), path)
    return paths, weights
