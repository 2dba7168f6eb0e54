#! /usr/bin/env python

# Standard Imports
import copy
from collections import namedtuple

# External Imports
import numpy as np

# coresmc Imports
from coresmc import *
from coresmc.kits import archive
from coresmc.kits.climate import IntegratorConfig, get_model, integrate_paths
from coresmc.kits.observation import obs_loglik, tiepoint_loglik

# Logging
log = logging.getLogger('coresmc.kits.particle_filter')

MODE_JOINT = 'joint'
MODE_FIXED = 'fixed'

FilterSettings = namedtuple(
    'FilterSettings', 'n_x ess_threshold retry_cap init_mean init_sd age_marginal_at_first_slice')
FilterSettings.__new__.__defaults__ = (1024, 0.5, archive.DEFAULT_RETRY_CAP, (0.0, 0.0), (1.5, 1.5), True)


class InnerFilter(object):
    """
    particle filter over (x1, x2, T) for one parameter set, slices taken deepest (oldest) first.
    joint mode proposes the ages, fixed mode clamps them to a given chronology.
    a filter whose particles all reach weight zero is flagged with collapsed_at and returns -inf
    increments from then on.
    """

    def __init__(self, params, record, forcing, settings=None, integrator=None, chronology=None,
                 track_paths=False, variant='forced'):
        self.params = params
        self.model = get_model(variant)
        self.record = record
        self.settings = settings or FilterSettings()
        self.integrator = integrator or IntegratorConfig()
        self.mode = MODE_FIXED if chronology is not None else MODE_JOINT
        self.window = forcing.window if forcing is not None else ORBITAL_WINDOW
        self.curve = self.model.curve(forcing, params.weights)
        if self.mode == MODE_JOINT:
            self.grid = archive.DepthGrid.from_depths(record.depths, params.archive)
            self.chronology = None
        else:
            chronology = chronology if isinstance(chronology, archive.Chronology) else archive.Chronology(chronology)
            if len(chronology) != record.M:
                raise utils.ConfigError('chronology length {} does not match record length {}'.format(
                    len(chronology), record.M))
            self.grid = None
            self.chronology = chronology.times
        self.tie_points = record.tie_point_map
        self.n_x = int(self.settings.n_x)
        self.track_paths = track_paths

        self.m = 0  # next slice to process
        self.T = self.x1 = self.x2 = None
        self.W = None
        self.increments = []
        self.log_lik = 0.0
        self.collapsed_at = None
        self.n_resample = 0
        self.paths = None

    @property
    def collapsed(self):
        return self.collapsed_at is not None

    def copy(self):
        clone = copy.copy(self)
        for name in ('T', 'x1', 'x2', 'W'):
            value = getattr(self, name)
            setattr(clone, name, None if value is None else value.copy())
        clone.increments = list(self.increments)
        if self.paths is not None:
            clone.paths = {k: v.copy() for k, v in self.paths.items()}
        return clone

    def _record_paths(self):
        if not self.track_paths:
            return
        if self.paths is None:
            self.paths = {k: np.full((self.record.M, self.n_x), np.nan) for k in ('T', 'x1', 'x2')}
        self.paths['T'][self.m] = self.T
        self.paths['x1'][self.m] = self.x1
        self.paths['x2'][self.m] = self.x2

    def _absorb(self, log_w, rng):
        """combine incremental log-weights with the carried weights, resample when the ess is low"""
        log_w = utils.clean_log_weights(log_w)
        if self.W is not None:
            with np.errstate(divide='ignore'):
                log_w = log_w + np.log(self.W)
        else:
            log_w = log_w - np.log(self.n_x)
        W, incr = utils.normalize_log_weights(log_w)
        if not np.isfinite(incr):
            self.collapsed_at = self.m
            self.log_lik = -np.inf
            self.increments.append(-np.inf)
            log.trace('inner filter collapsed: slice={} params={}'.format(self.m, self.params))
            return -np.inf
        self.W = W
        if utils.ess(W) < self.settings.ess_threshold * self.n_x:
            idx = utils.systematic_resample(W, rng)
            self.T, self.x1, self.x2 = self.T[idx], self.x1[idx], self.x2[idx]
            self.W = np.full(self.n_x, 1.0 / self.n_x)
            self.n_resample += 1
            if self.paths is not None:
                for key, rows in self.paths.items():
                    rows[:self.m + 1] = rows[:self.m + 1][:, idx]
        self.increments.append(incr)
        self.log_lik += incr
        return incr

    def initialise(self, rng):
        """
        slice 1: ages from the tie point (joint) or the chronology (fixed), climate from the initial-state
        distribution, weights from the observation
        :return: log incremental likelihood
        """
        if self.m != 0:
            raise utils.OrderingError('filter already initialised: next_slice={}'.format(self.m))
        n = self.n_x
        calib = self.params.calib
        if self.mode == MODE_JOINT:
            tp = self.tie_points.get(0)
            if tp is None:
                raise utils.ConfigError('joint inference needs a tie point on the deepest slice: record={}'.format(
                    self.record.name))
            self.T = -(tp.age_mean + tp.age_sd * rng.standard_normal(n))
        else:
            self.T = np.full(n, self.chronology[0])
        self.x1 = self.settings.init_mean[0] + self.settings.init_sd[0] * rng.standard_normal(n)
        self.x2 = self.settings.init_mean[1] + self.settings.init_sd[1] * rng.standard_normal(n)

        log_w = obs_loglik(self.record.d18o[0], self.x1, calib)
        if self.mode == MODE_JOINT and self.settings.age_marginal_at_first_slice:
            log_w = log_w + archive.age_marginal_logpdf(
                self.T, self.grid.corrected_depths[0], self.params.archive)
        log_w = np.where((self.T < 0) & (self.T >= self.window[0]), log_w, -np.inf)
        self._record_paths()
        incr = self._absorb(log_w, rng)
        self.m = 1
        return incr

    def step(self, rng):
        """
        advance one slice: propose ages, integrate the climate, weight by observation, age transition
        over proposal, and tie point
        :return: log incremental likelihood
        """
        m = self.m
        if m == 0:
            raise utils.OrderingError('filter must be initialised before stepping')
        if m >= self.record.M:
            raise utils.OrderingError('no slice left: slice={} M={}'.format(m, self.record.M))
        if self.collapsed:
            self.m += 1
            self.increments.append(-np.inf)
            return -np.inf

        with np.errstate(over='ignore', invalid='ignore'):
            if self.mode == MODE_JOINT:
                H = self.grid.corrected_depths
                T_new, log_q = archive.propose_age(self.T, H[m], H[m - 1], self.params.archive, rng,
                                                   retry_cap=self.settings.retry_cap)
                ok = np.isfinite(T_new)
                T_end = np.where(ok, T_new, self.T)
                log_age = archive.age_transition_logpdf(T_end, self.T, H[m], H[m - 1], self.params.archive)
                log_age = np.where(ok, log_age - log_q, -np.inf)
            else:
                T_end = np.full(self.n_x, self.chronology[m])
                log_age = 0.0
            self.x1, self.x2 = integrate_paths(self.x1, self.x2, self.T, T_end, self.params.dynamics, self.curve,
                                               self.integrator, rng)
            self.T = T_end
            log_w = obs_loglik(self.record.d18o[m], self.x1, self.params.calib) + log_age
            tp = self.tie_points.get(m)
            if tp is not None and self.mode == MODE_JOINT:
                log_w = log_w + tiepoint_loglik(self.T, tp.age_mean, tp.age_sd)
            self._record_paths()
            incr = self._absorb(log_w, rng)
        self.m += 1
        return incr

    def run(self, n_slices, streams):
        """
        initialise and step through the first n_slices slices
        :param n_slices: number of slices, 1..M
        :param streams: callable slice_index -> numpy Generator
        :return: the cumulative log-likelihood estimate
        """
        self.initialise(streams(0))
        for m in range(1, n_slices):
            self.step(streams(m))
        return self.log_lik

    def draw_path(self, rng):
        """one whole trajectory (T, x1, x2) over the processed slices, chosen by the final weights"""
        if self.paths is None:
            raise utils.ConfigError('filter was not run with path tracking')
        if self.collapsed:
            return None
        i = int(rng.choice(self.n_x, p=self.W))
        return tuple(self.paths[k][:self.m, i].copy() for k in ('T', 'x1', 'x2'))


def pf_init(params, record, forcing, settings, rng, integrator=None, chronology=None, track_paths=False,
            variant='forced'):
    """a fresh filter with its first slice processed, returns (filter, log_incr)"""
    pf = InnerFilter(params, record, forcing, settings, integrator, chronology=chronology, track_paths=track_paths,
                     variant=variant)
    return pf, pf.initialise(rng)


def pf_step(pf, m, rng):
    """process slice m (0-based) of an initialised filter, returns log_incr"""
    if m != pf.m:
        raise utils.OrderingError('slices must be processed in order: expected={} got={}'.format(pf.m, m))
    return pf.step(rng)


def run_filter(params, record, forcing, settings, seed, key=(), n_slices=None, integrator=None, chronology=None,
               track_paths=False, raise_on_collapse=False, variant='forced'):
    """
    run a filter over the first n_slices slices (all by default), slice s drawing from stream(seed, *key, s)
    """
    pf = InnerFilter(params, record, forcing, settings, integrator, chronology=chronology, track_paths=track_paths,
                     variant=variant)
    pf.run(n_slices or record.M, lambda s: utils.stream(seed, *(tuple(key) + (s,))))
    if raise_on_collapse and pf.collapsed:
        raise utils.FilterCollapseError('every inner particle has zero weight: slice={}'.format(pf.collapsed_at),
                                        slice_index=pf.collapsed_at)
    return pf
