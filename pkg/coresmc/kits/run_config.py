#! /usr/bin/env python

# coresmc Imports
from coresmc import *
from coresmc.kits.json_structure import JsonStructure
from coresmc.kits.climate import IntegratorConfig, validate_integrator
from coresmc.kits.orbital import build_forcing
from coresmc.kits.params import ModelParams, Prior
from coresmc.kits.particle_filter import FilterSettings
from coresmc.kits.simulator import SimulationConfig
from coresmc.kits.smc2 import Smc2Settings

# Logging
log = logging.getLogger('coresmc.kits.run_config')

DEFAULT_CONFIG_FILE = os.path.join(cs_data_dir, 'default_config.json')


class RunConfig(JsonStructure):
    """
    a run configuration: model / priors / smc / io / simulation sections, every missing value taken from
    the packaged default config
    """
    _js_required_structure = {
        'root': {
            'model': {
                'variant': str,
                'max_step': float,
                'orbital': dict,
                'initial_state': {'mean': [float], 'sd': [float]},
                'age_marginal_at_first_slice': bool,
                'core_top_tiepoint': {'enabled': bool, 'age_kyr': float, 'sd_kyr': float},
            },
            'priors': dict,
            'smc': {
                'n_theta': int,
                'n_x': int,
                'ess_threshold': float,
                'n_moves': int,
                'inner_ess_threshold': float,
                'propose_retry_cap': int,
                'proposal_scale': float,
                'seed': int,
            },
            'io': dict,
            'simulation': {
                'true_params': dict,
                'core_length': float,
                'slice_spacing': float,
                'first_tiepoint_sd': float,
                'seed': int,
            },
        }
    }

    _js_default_data = {
        'root': utils.read_json(DEFAULT_CONFIG_FILE)
    }

    _js_properties = {
        'variant': ['model', 'variant'],
        'seed': ['smc', 'seed'],
        'workers': ['smc', 'workers'],
        'n_theta': ['smc', 'n_theta'],
        'n_x': ['smc', 'n_x'],
    }

    def __init__(self, json_data=None, path=None):
        self.path = path
        self._forcing = None
        super(RunConfig, self).__init__(json_data)

    @classmethod
    def from_file(cls, path):
        if not path or not os.path.isfile(path):
            raise utils.ConfigError('config file not found: path={}'.format(path))
        try:
            data = utils.read_json(path)
        except ValueError as exc:
            raise utils.ConfigError('config file is not valid json: path={} exc={}'.format(path, exc))
        if not isinstance(data, dict):
            raise utils.ConfigError('config root must be an object: path={}'.format(path))
        config = cls(data, path=path)
        log.debug('loaded config: path={} hash={}'.format(path, config.config_hash()))
        return config

    def config_hash(self):
        return utils.hash_text(self.export_to_json_string())

    def set_value(self, section, key, value):
        """override one value (command line flags), None leaves the config untouched"""
        if value is not None:
            self[section][key] = value

    def _resolve(self, path):
        if not path or os.path.isabs(path) or not self.path:
            return path
        return os.path.join(os.path.dirname(os.path.abspath(self.path)), path)

    # ============================================ model ============================================

    def integrator(self):
        return validate_integrator(IntegratorConfig(float(self['model']['max_step'])))

    def forcing(self):
        """the OrbitalForcing of this config, built once"""
        if self._forcing is None:
            orbital = self['model']['orbital']
            self._forcing = build_forcing(
                coefficient_file=self._resolve(orbital.get('coefficient_file')),
                tabulated_file=self._resolve(orbital.get('tabulated_file')),
                n_terms=orbital.get('n_terms'),
                window=tuple(orbital.get('normalization_window', ORBITAL_WINDOW)),
                step=float(orbital.get('normalization_step', 1.0)),
                grid_step=self.integrator().max_step)
        return self._forcing

    def initial_state(self):
        state = self['model']['initial_state']
        if len(state['mean']) != 2 or len(state['sd']) != 2 or min(state['sd']) < 0:
            raise utils.ConfigError('initial_state needs two means and two non-negative sds: {}'.format(state))
        return tuple(float(v) for v in state['mean']), tuple(float(v) for v in state['sd'])

    def prepare_record(self, record):
        """the record with the optional core-top tie point added"""
        top = self['model']['core_top_tiepoint']
        if top['enabled']:
            log.info('adding core-top tie point: age_kyr={} sd_kyr={}'.format(top['age_kyr'], top['sd_kyr']))
            return record.with_core_top(float(top['age_kyr']), float(top['sd_kyr']))
        return record

    # ============================================ inference ============================================

    def prior(self, variant=None, fixed_chronology=False):
        return Prior.from_config(self['priors'], variant or self.variant, fixed_chronology=fixed_chronology)

    def filter_settings(self):
        smc = self['smc']
        mean, sd = self.initial_state()
        if not 0 <= smc['inner_ess_threshold'] <= 1:
            raise utils.ConfigError('inner_ess_threshold must lie in [0, 1]')
        if smc['propose_retry_cap'] < 1:
            raise utils.ConfigError('propose_retry_cap must be at least 1')
        return FilterSettings(int(smc['n_x']), float(smc['inner_ess_threshold']), int(smc['propose_retry_cap']),
                              mean, sd, bool(self['model']['age_marginal_at_first_slice']))

    def smc_settings(self, extract_paths=True):
        smc = self['smc']
        if not 0 <= smc['ess_threshold'] <= 1:
            raise utils.ConfigError('ess_threshold must lie in [0, 1]')
        if not smc['proposal_scale'] > 0:
            raise utils.ConfigError('proposal_scale must be positive')
        return Smc2Settings(int(smc['n_theta']), float(smc['ess_threshold']), int(smc['n_moves']),
                            float(smc['proposal_scale']), int(smc['seed']), smc.get('workers'), extract_paths)

    # ============================================ simulation ============================================

    def true_params(self):
        return ModelParams.from_dict(self['simulation']['true_params']).validate(allow_zero_noise=True)

    def simulation_config(self):
        sim = self['simulation']
        mean, sd = self.initial_state()
        return SimulationConfig(
            self.true_params(), float(sim['core_length']), float(sim['slice_spacing']),
            float(sim['first_tiepoint_sd']), int(sim['seed']), self.integrator(),
            sim.get('variant', 'forced'), sim.get('top_depth'), mean, sd, sim.get('name', 'synthetic'))

    # ============================================ io ============================================

    def output_path(self, out_dir, key):
        return os.path.join(out_dir, self['io'][key])
