#! /usr/bin/env python

# Standard Imports
import time
from collections import namedtuple

# External Imports
import numpy as np
from scipy import stats

# coresmc Imports
from coresmc import *
from coresmc.kits.archive import Chronology, is_monotone
from coresmc.kits.climate import get_model
from coresmc.kits.observation import record_hash
from coresmc.kits.params import ARCHIVE_NAMES
from coresmc.kits.particle_filter import InnerFilter, FilterSettings
from coresmc.kits.thread_pool import ThreadPool

# Logging
log = logging.getLogger('coresmc.kits.smc2')

Smc2Settings = namedtuple('Smc2Settings', 'n_theta ess_threshold n_moves proposal_scale seed workers extract_paths')
Smc2Settings.__new__.__defaults__ = (1024, 0.5, 3, 1.0, 0, None, True)

# added to the proposal covariance diagonal so a collapsed cloud still gives a usable proposal
_COV_JITTER = 1e-10


class ThetaParticle(object):
    """a parameter draw (free parameters, constrained and unconstrained) with its inner filter"""

    def __init__(self, theta, u, log_prior, log_jac, params, pf):
        self.theta = theta
        self.u = u
        self.log_prior = log_prior
        self.log_jac = log_jac
        self.params = params
        self.pf = pf

    @property
    def log_lik(self):
        return self.pf.log_lik

    @property
    def log_target(self):
        """log of likelihood x prior x jacobian, the move target in unconstrained space"""
        return self.pf.log_lik + self.log_prior + self.log_jac

    def copy(self):
        return ThetaParticle(self.theta, self.u, self.log_prior, self.log_jac, self.params, self.pf.copy())


class EvidenceEstimate(object):
    """log evidence with its per-slice increments and the settings it was produced with"""

    def __init__(self, log_z, increments, n_theta, n_x, seed, n_rejuvenations=0, acceptance_rates=None,
                 log_z_se=None, record_hash=None, variant=None, mode=None, wall_time=None, settings=None,
                 ess_history=None):
        self.log_z = float(log_z)
        self.increments = [float(v) for v in increments]
        self.n_theta = int(n_theta)
        self.n_x = int(n_x)
        self.seed = int(seed)
        self.n_rejuvenations = int(n_rejuvenations)
        self.acceptance_rates = [float(v) for v in (acceptance_rates or [])]
        self.log_z_se = None if log_z_se is None else float(log_z_se)
        self.record_hash = record_hash
        self.variant = variant
        self.mode = mode
        self.wall_time = wall_time
        self.settings = settings or {}
        self.ess_history = [float(v) for v in (ess_history or [])]

    def telescoping_error(self):
        return abs(self.log_z - float(np.sum(self.increments)))

    def to_dict(self):
        return {
            'log_Z': self.log_z,
            'log_Z_se': self.log_z_se,
            'increments': self.increments,
            'n_theta': self.n_theta,
            'n_x': self.n_x,
            'seed': self.seed,
            'n_rejuvenations': self.n_rejuvenations,
            'acceptance_rates': self.acceptance_rates,
            'ess_history': self.ess_history,
            'record_hash': self.record_hash,
            'variant': self.variant,
            'mode': self.mode,
            'wall_time': self.wall_time,
            'settings': self.settings,
        }

    @classmethod
    def from_dict(cls, data):
        try:
            return cls(data['log_Z'], data['increments'], data['n_theta'], data['n_x'], data['seed'],
                       n_rejuvenations=data.get('n_rejuvenations', 0),
                       acceptance_rates=data.get('acceptance_rates'),
                       log_z_se=data.get('log_Z_se'),
                       record_hash=data.get('record_hash'),
                       variant=data.get('variant'),
                       mode=data.get('mode'),
                       wall_time=data.get('wall_time'),
                       settings=data.get('settings'),
                       ess_history=data.get('ess_history'))
        except (KeyError, TypeError) as exc:
            raise utils.ConfigError('malformed evidence data: missing={}'.format(exc))

    @classmethod
    def load(cls, path):
        try:
            return cls.from_dict(utils.read_json(path))
        except (OSError, ValueError) as exc:
            raise utils.ConfigError('cannot read evidence file: path={} exc={}'.format(path, exc))

    def write(self, path):
        return utils.create_json_report(self.to_dict(), path)


class Smc2Result(object):
    """the weighted parameter cloud after the last slice, the evidence, and one trajectory per particle"""

    def __init__(self, names, theta, weights, evidence, paths=None):
        self.names = tuple(names)
        self.theta = theta
        self.weights = weights
        self.evidence = evidence
        self.paths = paths

    @property
    def n_theta(self):
        return len(self.weights)

    def posterior_rows(self):
        rows = []
        for n in range(self.n_theta):
            row = dict(zip(self.names, (float(v) for v in self.theta[n])))
            row['weight'] = float(self.weights[n])
            rows.append(row)
        return rows

    def posterior_headers(self):
        return list(self.names) + ['weight']

    def chronology_rows(self):
        rows = []
        if self.paths is None:
            return rows
        T, x1, x2 = self.paths['T'], self.paths['x1'], self.paths['x2']
        for n in range(self.n_theta):
            if not np.all(np.isfinite(T[n])):
                continue
            for m in range(T.shape[1]):
                rows.append({'particle': n, 'slice': m + 1, 'T_kyr': float(T[n, m]), 'x1': float(x1[n, m]),
                             'x2': float(x2[n, m]), 'weight': float(self.weights[n])})
        return rows

    def monotone_paths(self):
        """True when every extracted trajectory has a strictly increasing negative chronology"""
        if self.paths is None:
            return True
        return all(is_monotone(row) for row in self.paths['T'] if np.all(np.isfinite(row)))


def fit_proposal(u, weights, scale=1.0):
    """independent gaussian proposal fitted to the weighted cloud in unconstrained space"""
    mean = np.average(u, axis=0, weights=weights)
    cov = np.atleast_2d(np.cov(u, rowvar=False, aweights=weights, bias=True)) * scale
    cov = cov + _COV_JITTER * np.eye(u.shape[1])
    return stats.multivariate_normal(mean=mean, cov=cov, allow_singular=True)


class Smc2Sampler(object):
    """
    SMC^2 over the slices of one record: an outer population of parameter particles, each carrying an
    inner filter. when the parameter ess falls under the threshold the cloud is resampled and moved by
    particle marginal Metropolis-Hastings with a fresh inner filter over the slices seen so far.
    every work unit draws from its own (seed, purpose, slice, ...) stream, so results do not depend on
    the number of workers.
    """

    def __init__(self, record, prior, forcing, filter_settings=None, settings=None, integrator=None,
                 variant='forced', chronology=None):
        self.record = record
        self.prior = prior
        self.forcing = forcing
        self.filter_settings = filter_settings or FilterSettings()
        self.settings = settings or Smc2Settings()
        self.integrator = integrator
        self.model = get_model(variant)
        self.variant = self.model.name
        self.chronology = None if chronology is None else (
            chronology if isinstance(chronology, Chronology) else Chronology(chronology))
        self.mode = 'fixed' if self.chronology is not None else 'joint'
        self._check()
        self.record_hash = record_hash(record)
        self.seed = int(self.settings.seed)

    def _check(self):
        self.model.check_free(self.prior.names)
        if self.chronology is not None:
            if len(self.chronology) != self.record.M:
                raise utils.ConfigError('chronology length {} does not match record length {}'.format(
                    len(self.chronology), self.record.M))
            if not set(ARCHIVE_NAMES).isdisjoint(self.prior.names):
                raise utils.ConfigError('fixed chronology runs exclude the archive parameters from the prior')
        elif 0 not in self.record.tie_point_map:
            raise utils.ConfigError('joint inference needs a tie point on the deepest slice: record={}'.format(
                self.record.name))
        if self.settings.n_theta < 1 or self.filter_settings.n_x < 1:
            raise utils.ConfigError('particle counts must be positive: n_theta={} n_x={}'.format(
                self.settings.n_theta, self.filter_settings.n_x))
        if self.settings.n_moves < 0:
            raise utils.ConfigError('n_moves must be non-negative: n_moves={}'.format(self.settings.n_moves))

    def _filter(self, params, track_paths=False):
        return InnerFilter(params, self.record, self.forcing, self.filter_settings, self.integrator,
                           chronology=self.chronology, track_paths=track_paths, variant=self.model)

    def _particle(self, theta, u=None):
        """ThetaParticle with an empty filter, or None when theta lies outside the parameter domain"""
        theta = np.asarray(theta, dtype=float)
        u = self.prior.to_unconstrained(theta)[0] if u is None else u
        log_prior = float(self.prior.logpdf(theta)[0])
        if not np.isfinite(log_prior) or not np.all(np.isfinite(u)):
            return None
        try:
            params = self.prior.build(theta)
        except utils.ParameterError as exc:
            log.trace('parameter draw outside the domain: exc={}'.format(exc))
            return None
        log_jac = float(self.prior.log_jacobian(u)[0])
        return ThetaParticle(theta, u, log_prior, log_jac, params, self._filter(params))

    def settings_dict(self):
        return {
            'smc': dict(self.settings._asdict()),
            'filter': dict(self.filter_settings._asdict()),
            'integrator': dict(self.integrator._asdict()) if self.integrator else None,
            'prior': self.prior.to_dict(),
            'forcing': self.forcing.metadata() if self.forcing is not None else None,
        }

    def run(self):
        """
        :return: Smc2Result
        """
        start = time.time()
        settings = self.settings
        n_theta = int(settings.n_theta)
        M = self.record.M
        workers = utils.resolve_worker_count(settings.workers)
        log.info('smc2 run starting: record={} M={} variant={} mode={} n_theta={} n_x={} workers={} seed={}'.format(
            self.record.name, M, self.variant, self.mode, n_theta, self.filter_settings.n_x, workers, self.seed))

        theta = self.prior.rvs(n_theta, utils.stream(self.seed, utils.PURPOSE_PRIOR))
        particles = [None] * n_theta
        incr = np.empty(n_theta)
        increments, ess_history, acceptance_rates = [], [], []
        log_z, log_z_var = 0.0, 0.0
        log_w = np.zeros(n_theta)
        n_rejuvenations = 0

        with ThreadPool(workers, name='smc2') as pool:

            def init_unit(n):
                particle = self._particle(theta[n])
                if particle is None:
                    raise utils.ConfigError('prior draw outside the parameter domain: theta={}'.format(theta[n]))
                particles[n] = particle
                incr[n] = particle.pf.initialise(utils.stream(self.seed, utils.PURPOSE_INIT, 0, n))

            def step_unit(n):
                incr[n] = particles[n].pf.step(utils.stream(self.seed, utils.PURPOSE_STEP, m, n))

            for m in range(M):
                pool.run_indexed(init_unit if m == 0 else step_unit, n_theta)

                W_prev, log_sum_prev = utils.normalize_log_weights(log_w)
                combined = utils.clean_log_weights(log_w + incr)
                W, log_sum = utils.normalize_log_weights(combined)
                step_incr = log_sum - log_sum_prev
                if not np.isfinite(step_incr):
                    raise utils.RunCollapseError('every parameter particle collapsed: slice={}'.format(m + 1),
                                                 slice_index=m)
                increments.append(step_incr)
                log_z += step_incr
                log_z_var += self._step_variance(W_prev, incr)
                log_w = combined
                degenerate = int(np.sum(~np.isfinite(incr)))
                if degenerate:
                    log.debug('collapsed parameter particles: slice={} count={}'.format(m + 1, degenerate))

                ess = utils.ess(W)
                ess_history.append(ess)
                rejuvenated = ess < settings.ess_threshold * n_theta
                if rejuvenated:
                    rate = self._rejuvenate(pool, particles, W, m)
                    acceptance_rates.append(rate)
                    n_rejuvenations += 1
                    log_w = np.zeros(n_theta)
                log.info('slice={} ess={:.1f} log_z={:.6f} rejuvenated={}'.format(m + 1, ess, log_z, rejuvenated))

            W, _ = utils.normalize_log_weights(log_w)
            paths = self._extract_paths(pool, particles) if settings.extract_paths else None

        evidence = EvidenceEstimate(
            log_z, increments, n_theta, self.filter_settings.n_x, self.seed,
            n_rejuvenations=n_rejuvenations,
            acceptance_rates=acceptance_rates,
            log_z_se=float(np.sqrt(log_z_var)),
            record_hash=self.record_hash,
            variant=self.variant,
            mode=self.mode,
            wall_time=time.time() - start,
            settings=self.settings_dict(),
            ess_history=ess_history)
        log.info('smc2 run finished: log_z={:.6f} se={:.4f} rejuvenations={} wall_time={:.1f}s'.format(
            evidence.log_z, evidence.log_z_se, n_rejuvenations, evidence.wall_time))
        theta_out = np.array([p.theta for p in particles])
        return Smc2Result(self.prior.names, theta_out, W, evidence, paths)

    @staticmethod
    def _step_variance(W_prev, incr):
        """delta-method variance of one log evidence increment"""
        finite = np.isfinite(incr)
        if not finite.any():
            return 0.0
        L = np.where(finite, np.exp(incr - np.max(incr[finite])), 0.0)
        Z = np.sum(W_prev * L)
        if not Z > 0:
            return 0.0
        return float(np.sum(W_prev ** 2 * (L / Z - 1.0) ** 2))

    def _rejuvenate(self, pool, particles, W, m):
        """resample the parameter cloud, then n_moves PMMH moves per particle over slices 1..m+1"""
        n_theta = len(particles)
        u = np.array([p.u for p in particles])
        proposal = fit_proposal(u, W, self.settings.proposal_scale)
        ancestors = utils.systematic_resample(W, utils.stream(self.seed, utils.PURPOSE_RESAMPLE, m))
        particles[:] = [particles[a].copy() for a in ancestors]
        accepted = np.zeros(n_theta, dtype=int)

        for k in range(self.settings.n_moves):

            def move_unit(n):
                rng = utils.stream(self.seed, utils.PURPOSE_PROPOSE, m, k, n)
                u_new = np.atleast_1d(proposal.rvs(random_state=rng))
                candidate = self._particle(self.prior.from_unconstrained(u_new)[0], u_new)
                u_draw = rng.uniform()
                if candidate is None:
                    return
                candidate.pf.run(m + 1, lambda s: utils.stream(self.seed, utils.PURPOSE_MOVE, m, k, n, s))
                current = particles[n]
                with np.errstate(invalid='ignore'):
                    log_alpha = ((candidate.log_target - current.log_target)
                                 + (proposal.logpdf(current.u) - proposal.logpdf(u_new)))
                if np.log(u_draw) < log_alpha:
                    particles[n] = candidate
                    accepted[n] += 1

            pool.run_indexed(move_unit, n_theta)

        rate = float(accepted.sum()) / max(1, n_theta * self.settings.n_moves)
        log.debug('rejuvenation: slice={} moves={} acceptance={:.3f}'.format(m + 1, self.settings.n_moves, rate))
        return rate

    def _extract_paths(self, pool, particles):
        """rerun every particle's filter with path storage and draw one whole trajectory from it"""
        n_theta = len(particles)
        M = self.record.M
        paths = {k: np.full((n_theta, M), np.nan) for k in ('T', 'x1', 'x2')}

        def path_unit(n):
            pf = self._filter(particles[n].params, track_paths=True)
            pf.run(M, lambda s: utils.stream(self.seed, utils.PURPOSE_PATHS, n, s))
            path = pf.draw_path(utils.stream(self.seed, utils.PURPOSE_PATHS, n, M))
            if path is None:
                log.trace('path extraction rerun collapsed: particle={}'.format(n))
                return
            for key, values in zip(('T', 'x1', 'x2'), path):
                paths[key][n] = values

        pool.run_indexed(path_unit, n_theta)
        missing = int(np.sum(~np.isfinite(paths['T'][:, 0])))
        if missing:
            log.warn('trajectories missing after path extraction: count={} of={}'.format(missing, n_theta))
        return paths


def smc2_run(record, prior, forcing, variant='forced', n_theta=1024, n_x=1024, seed=0, filter_settings=None,
             settings=None, integrator=None):
    """joint inference of parameters, ages and climate for one record"""
    filter_settings = (filter_settings or FilterSettings())._replace(n_x=n_x)
    settings = (settings or Smc2Settings())._replace(n_theta=n_theta, seed=seed)
    return Smc2Sampler(record, prior, forcing, filter_settings, settings, integrator, variant=variant).run()


def fixed_chronology_run(record, chronology, prior, forcing, variant='forced', n_theta=1024, n_x=1024, seed=0,
                         filter_settings=None, settings=None, integrator=None):
    """inference with the ages clamped to a chronology, returns the EvidenceEstimate"""
    filter_settings = (filter_settings or FilterSettings())._replace(n_x=n_x)
    settings = (settings or Smc2Settings(extract_paths=False))._replace(n_theta=n_theta, seed=seed)
    sampler = Smc2Sampler(record, prior, forcing, filter_settings, settings, integrator, variant=variant,
                          chronology=chronology)
    return sampler.run().evidence
