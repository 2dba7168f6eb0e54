#! /usr/bin/env python

# Standard Imports
from collections import namedtuple

# External Imports
import numpy as np

# coresmc Imports
from coresmc import *
from coresmc.kits.archive import DepthGrid, sample_chronology
from coresmc.kits.climate import IntegratorConfig, get_model, integrate_paths
from coresmc.kits.observation import CoreRecord, write_core

# Logging
log = logging.getLogger('coresmc.kits.simulator')

TRUTH_HEADERS = ('slice', 'depth_m', 'T_kyr', 'x1', 'x2', 'z', 'y')

SimulationConfig = namedtuple(
    'SimulationConfig',
    'true_params core_length slice_spacing first_tiepoint_sd seed integrator variant top_depth init_mean init_sd name')
SimulationConfig.__new__.__defaults__ = (
    32.0, 0.1, 2.0, 0, IntegratorConfig(), 'forced', None, (0.0, 0.0), (1.5, 1.5), 'synthetic')

SimulationTruth = namedtuple('SimulationTruth', 'depths times x1 x2 z y params')


def validate_simulation(config):
    if not config.core_length > 0 or not config.slice_spacing > 0:
        raise utils.ConfigError('core_length and slice_spacing must be positive: core_length={} spacing={}'.format(
            config.core_length, config.slice_spacing))
    if not config.first_tiepoint_sd > 0:
        raise utils.ConfigError('first_tiepoint_sd must be positive: sd={}'.format(config.first_tiepoint_sd))
    get_model(config.variant)
    config.true_params.validate(allow_zero_noise=True)
    return config


def simulation_depths(core_length, slice_spacing, top_depth=None):
    """
    core_length / slice_spacing + 1 slice depths, deepest first. the shallowest slice sits at top_depth
    (half a spacing by default) so every depth is positive.
    """
    n_slices = int(round(core_length / slice_spacing)) + 1
    top = slice_spacing / 2.0 if top_depth is None else float(top_depth)
    return top + slice_spacing * np.arange(n_slices - 1, -1, -1)


def simulate_core(config, forcing):
    """
    draw a synthetic core from the forward model
    :param config: SimulationConfig
    :param forcing: OrbitalForcing (ignored by the unforced variant)
    :return: (CoreRecord, SimulationTruth)
    """
    validate_simulation(config)
    model = get_model(config.variant)
    params = model.pin(config.true_params)
    rng = utils.stream(config.seed, utils.PURPOSE_SIMULATE)

    depths = simulation_depths(config.core_length, config.slice_spacing, config.top_depth)
    grid = DepthGrid.from_depths(depths, params.archive)
    times = sample_chronology(grid, params.archive, rng).times
    window = forcing.window if forcing is not None else ORBITAL_WINDOW
    if times[0] < window[0]:
        raise utils.OrbitalDomainError('simulated chronology reaches beyond the orbital window: T_1={} window={}'.format(
            times[0], window))

    curve = model.curve(forcing, params.weights)
    M = len(depths)
    x1 = np.empty(M)
    x2 = np.empty(M)
    state = (config.init_mean[0] + config.init_sd[0] * rng.standard_normal(),
             config.init_mean[1] + config.init_sd[1] * rng.standard_normal())
    x1[0], x2[0] = state
    for m in range(1, M):
        a, b = integrate_paths([x1[m - 1]], [x2[m - 1]], times[m - 1], times[m], params.dynamics, curve,
                               config.integrator, rng)
        x1[m], x2[m] = a[0], b[0]

    calib = params.calib
    z = calib.d18o_offset + calib.d18o_scale * x1
    y = z + calib.sigma_y * rng.standard_normal(M)
    tie_mean = -times[0] + config.first_tiepoint_sd * rng.standard_normal()
    record = CoreRecord(depths, y, [(0, tie_mean, config.first_tiepoint_sd)], name=config.name)
    truth = SimulationTruth(depths, times, x1, x2, z, y, params)
    log.info('simulated core: name={} M={} oldest_age={:.2f} variant={} seed={}'.format(
        config.name, M, -times[0], config.variant, config.seed))
    return record, truth


def truth_rows(truth):
    return [{'slice': m + 1, 'depth_m': float(truth.depths[m]), 'T_kyr': float(truth.times[m]),
             'x1': float(truth.x1[m]), 'x2': float(truth.x2[m]), 'z': float(truth.z[m]), 'y': float(truth.y[m])}
            for m in range(len(truth.depths))]


def write_truth(truth, out_dir, truth_name='truth.csv', params_name='true_params.json'):
    """truth csv (slice,depth_m,T_kyr,x1,x2,z,y) and the parameters in the config's simulation layout"""
    truth_path = utils.write_csv(os.path.join(out_dir, truth_name), truth_rows(truth), headers=TRUTH_HEADERS)
    params_path = utils.write_json(os.path.join(out_dir, params_name),
                                   {'simulation': {'true_params': truth.params.to_dict()}})
    return truth_path, params_path


def write_simulation(record, truth, out_dir, core_name='core.csv', **kwargs):
    """core, truth and parameter files of one simulation, returns their paths"""
    core_path = write_core(record, os.path.join(out_dir, core_name))
    return (core_path,) + write_truth(truth, out_dir, **kwargs)
