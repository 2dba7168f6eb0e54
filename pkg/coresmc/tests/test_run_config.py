#! /usr/bin/env python

# Standard Imports
import unittest
import json
import tempfile
import shutil

# coresmc Imports
from coresmc import *
from coresmc.kits.json_structure import WrongTypeError
from coresmc.kits.observation import CoreRecord
from coresmc.kits.run_config import RunConfig

# Logging
log = logging.getLogger('coresmc.tests.run_config')
utils.logging_setup(level=0, log_file=cs_log_dir + '/test_run_config.log')


class TestRunConfig(unittest.TestCase):

    def setUp(self):
        self.tmp_dir = tempfile.mkdtemp(prefix='coresmc_config_')

    def tearDown(self):
        shutil.rmtree(self.tmp_dir, ignore_errors=True)

    def write(self, name, text):
        path = os.path.join(self.tmp_dir, name)
        with open(path, 'w') as f:
            f.write(text)
        return path

    def test_defaults(self):
        config = RunConfig()
        self.assertEqual(config.variant, 'forced')
        self.assertEqual(config.n_theta, 1024)
        self.assertEqual(config.n_x, 1024)
        self.assertEqual(config.seed, 0)
        self.assertIsNone(config.workers)
        self.assertEqual(config['io']['hdr_mass'], 0.95)
        self.assertEqual(len(config['priors']), 17)

    def test_partial_override(self):
        config = RunConfig({'smc': {'n_theta': 16}, 'model': {'variant': 'unforced'}})
        self.assertEqual(config.n_theta, 16)
        self.assertEqual(config['smc']['n_moves'], 3)
        self.assertEqual(config.variant, 'unforced')
        self.assertEqual(config['model']['max_step'], 0.2)

    def test_wrong_type(self):
        with self.assertRaises(WrongTypeError):
            RunConfig({'smc': {'n_theta': 'many'}})
        with self.assertRaises(utils.ConfigError):
            RunConfig({'model': {'initial_state': {'mean': ['a', 0.0]}}})

    def test_from_file(self):
        path = self.write('run.json', json.dumps({'smc': {'seed': 11}}))
        config = RunConfig.from_file(path)
        self.assertEqual(config.seed, 11)
        self.assertEqual(config.path, path)

    def test_from_file_errors(self):
        with self.assertRaises(utils.ConfigError):
            RunConfig.from_file(os.path.join(self.tmp_dir, 'absent.json'))
        with self.assertRaises(utils.ConfigError):
            RunConfig.from_file(None)
        with self.assertRaises(utils.ConfigError):
            RunConfig.from_file(self.write('bad.json', '{"smc": '))
        with self.assertRaises(utils.ConfigError):
            RunConfig.from_file(self.write('list.json', '[1, 2]'))

    def test_config_hash(self):
        a, b = RunConfig({'smc': {'seed': 1}}), RunConfig({'smc': {'seed': 1}})
        self.assertEqual(a.config_hash(), b.config_hash())
        self.assertEqual(len(a.config_hash()), 64)
        self.assertNotEqual(a.config_hash(), RunConfig({'smc': {'seed': 2}}).config_hash())

    def test_set_value(self):
        config = RunConfig()
        config.set_value('smc', 'seed', None)
        self.assertEqual(config.seed, 0)
        config.set_value('smc', 'seed', 7)
        self.assertEqual(config.seed, 7)
        self.assertEqual(config.smc_settings().seed, 7)

    def test_initial_state(self):
        self.assertEqual(RunConfig().initial_state(), ((0.0, 0.0), (1.5, 1.5)))
        with self.assertRaises(utils.ConfigError):
            RunConfig({'model': {'initial_state': {'mean': [0.0], 'sd': [1.0, 1.0]}}}).initial_state()
        with self.assertRaises(utils.ConfigError):
            RunConfig({'model': {'initial_state': {'mean': [0.0, 0.0], 'sd': [1.0, -1.0]}}}).initial_state()

    def test_filter_settings(self):
        settings = RunConfig({'smc': {'n_x': 64}}).filter_settings()
        self.assertEqual(settings.n_x, 64)
        self.assertEqual(settings.retry_cap, 100)
        self.assertTrue(settings.age_marginal_at_first_slice)
        with self.assertRaises(utils.ConfigError):
            RunConfig({'smc': {'inner_ess_threshold': 1.5}}).filter_settings()
        with self.assertRaises(utils.ConfigError):
            RunConfig({'smc': {'propose_retry_cap': 0}}).filter_settings()

    def test_smc_settings(self):
        settings = RunConfig({'smc': {'workers': 3}}).smc_settings(extract_paths=False)
        self.assertEqual(settings.n_theta, 1024)
        self.assertEqual(settings.workers, 3)
        self.assertFalse(settings.extract_paths)
        with self.assertRaises(utils.ConfigError):
            RunConfig({'smc': {'ess_threshold': -0.1}}).smc_settings()
        with self.assertRaises(utils.ConfigError):
            RunConfig({'smc': {'proposal_scale': 0.0}}).smc_settings()

    def test_integrator(self):
        self.assertEqual(RunConfig({'model': {'max_step': 0.5}}).integrator().max_step, 0.5)
        with self.assertRaises(utils.ConfigError):
            RunConfig({'model': {'max_step': 0.0}}).integrator()

    def test_prior_variants(self):
        config = RunConfig()
        self.assertEqual(config.prior().dim, 17)
        self.assertEqual(config.prior('unforced').dim, 14)
        self.assertEqual(config.prior(fixed_chronology=True).dim, 13)
        self.assertEqual(RunConfig({'model': {'variant': 'unforced'}}).prior().dim, 14)

    def test_forcing_built_once(self):
        config = RunConfig()
        forcing = config.forcing()
        self.assertIs(config.forcing(), forcing)

    def test_prepare_record(self):
        record = CoreRecord([2.0, 1.0, 0.5], [4.0, 4.1, 4.2], [(0, 50.0, 2.0)])
        self.assertIs(RunConfig().prepare_record(record), record)
        topped = RunConfig({'model': {'core_top_tiepoint': {'enabled': True, 'sd_kyr': 1.0}}}).prepare_record(record)
        self.assertEqual(len(topped.tie_points), 2)
        self.assertEqual(tuple(topped.tie_point_map[2]), (2, 0.0, 1.0))

    def test_simulation(self):
        config = RunConfig({'simulation': {'core_length': 1.0, 'seed': 4}, 'smc': {'seed': 9}})
        sim = config.simulation_config()
        self.assertEqual(sim.core_length, 1.0)
        self.assertEqual(sim.seed, 4)
        self.assertEqual(sim.variant, 'forced')
        self.assertEqual(config.true_params().dynamics.alpha, 10.0)
        with self.assertRaises(utils.ParameterError):
            RunConfig({'simulation': {'true_params': {'sigma_s': -1.0}}}).true_params()

    def test_output_path(self):
        config = RunConfig({'io': {'posterior': 'theta.csv'}})
        self.assertEqual(config.output_path(self.tmp_dir, 'posterior'), os.path.join(self.tmp_dir, 'theta.csv'))
        self.assertEqual(config.output_path(self.tmp_dir, 'evidence'), os.path.join(self.tmp_dir, 'evidence.json'))


if __name__ == '__main__':
    unittest.main()
