#! /usr/bin/env python

# Standard Imports
import unittest

# External Imports
import numpy as np
from scipy import stats

# coresmc Imports
from coresmc import *
from coresmc.kits import observation

# Logging
log = logging.getLogger('coresmc.tests.observation')
utils.logging_setup(level=0, log_file=cs_log_dir + '/test_observation.log')

DATA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'data')
CALIB = observation.CalibrationParams(d18o_offset=4.0, d18o_scale=0.8, sigma_y=0.1)


class TestLikelihoods(unittest.TestCase):

    def test_obs_loglik(self):
        x1 = np.linspace(-2, 2, 9)
        expected = stats.norm(4.0 + 0.8 * x1, 0.1).logpdf(4.3)
        np.testing.assert_allclose(observation.obs_loglik(4.3, x1, CALIB), expected, rtol=1e-12)

    def test_tiepoint_loglik(self):
        self.assertAlmostEqual(observation.tiepoint_loglik(-781.0, 780.0, 2.0), stats.norm(780.0, 2.0).logpdf(781.0))
        with self.assertRaises(utils.ParameterError):
            observation.tiepoint_loglik(-781.0, 780.0, 0.0)

    def test_calibration(self):
        zero = CALIB._replace(sigma_y=0.0)
        with self.assertRaises(utils.ParameterError):
            observation.validate_calibration(zero)
        self.assertEqual(observation.validate_calibration(zero, allow_zero_noise=True), zero)


class TestCoreRecord(unittest.TestCase):

    def test_validation(self):
        with self.assertRaises(utils.OrderingError):
            observation.CoreRecord([1.0, 2.0], [4.0, 4.1])
        with self.assertRaises(utils.InputConsistencyError):
            observation.CoreRecord([2.0, 1.0], [4.0])
        with self.assertRaises(utils.ConfigError):
            observation.CoreRecord([2.0, 1.0], [4.0, 4.1], [(0, 10.0, 1.0), (0, 11.0, 1.0)])
        with self.assertRaises(utils.ConfigError):
            observation.CoreRecord([2.0, 1.0], [4.0, 4.1], [(2, 10.0, 1.0)])

    def test_immutable(self):
        record = observation.CoreRecord([2.0, 1.0], [4.0, 4.1])
        with self.assertRaises(ValueError):
            record.d18o[0] = 0.0

    def test_core_top(self):
        record = observation.CoreRecord([2.0, 1.0, 0.5], [4.0, 4.1, 4.2], [(0, 50.0, 2.0)])
        topped = record.with_core_top(0.0, 2.0)
        self.assertEqual(topped.tie_point_map[2], observation.TiePoint(2, 0.0, 2.0))
        self.assertIs(topped.with_core_top(), topped)
        self.assertEqual(len(record.tie_points), 1)

    def test_record_hash_ignores_name(self):
        a = observation.CoreRecord([2.0, 1.0], [4.0, 4.1], [(0, 50.0, 2.0)], name='a')
        b = observation.CoreRecord([2.0, 1.0], [4.0, 4.1], [(0, 50.0, 2.0)], name='b')
        c = observation.CoreRecord([2.0, 1.0], [4.0, 4.2], [(0, 50.0, 2.0)], name='a')
        self.assertEqual(observation.record_hash(a), observation.record_hash(b))
        self.assertNotEqual(observation.record_hash(a), observation.record_hash(c))


class TestLoadCore(unittest.TestCase):

    def setUp(self):
        self.tmp_dir = utils.get_tmp_dir()

    def tearDown(self):
        utils.clean_paths(self.tmp_dir, log_as_trace=True)

    def write(self, text, name='core.csv'):
        return utils.write_file(os.path.join(self.tmp_dir, name), text)

    def test_odp677_layout(self):
        record = observation.load_core(os.path.join(DATA_DIR, 'odp677_format.csv'))
        self.assertEqual(record.name, 'ODP677')
        self.assertEqual(record.M, 363)
        self.assertEqual(record.depths[0], 30.4)
        self.assertEqual(record.tie_points, (observation.TiePoint(0, 780.0, 2.0),))

    def test_odp846_layout_shallow_first(self):
        record = observation.load_core(os.path.join(DATA_DIR, 'odp846_format.csv'))
        self.assertEqual(record.M, 308)
        self.assertEqual(record.depths[0], 28.7)
        self.assertTrue(np.all(np.diff(record.depths) < 0))
        self.assertEqual(record.tie_points[0].slice_index, 0)

    def test_round_trip(self):
        record = observation.CoreRecord([3.0, 2.5, 1.0 / 3.0], [4.1, 3.9, 4.0 / 3.0], [(0, 120.0, 2.0), (2, 1.0, 0.5)],
                                        name='round')
        path = observation.write_core(record, os.path.join(self.tmp_dir, 'round.csv'))
        loaded = observation.load_core(path)
        self.assertEqual(loaded, record)
        self.assertEqual(loaded.name, 'round')

    def test_name_defaults_to_file_stem(self):
        path = self.write('#tiepoint 2.0 30 1\ndepth_m,d18O\n2.0,4.0\n1.0,4.1\n', name='stem.csv')
        self.assertEqual(observation.load_core(path).name, 'stem')
        self.assertEqual(observation.load_core(path, name='given').name, 'given')

    def test_no_tiepoint_keeps_all(self):
        path = self.write('depth_m,d18O\n2.0,4.0\n1.0,4.1\n')
        record = observation.load_core(path)
        self.assertEqual(record.M, 2)
        self.assertEqual(record.tie_points, ())

    def test_missing_file(self):
        with self.assertRaises(utils.CoreParseError):
            observation.load_core(os.path.join(self.tmp_dir, 'absent.csv'))

    def test_missing_column(self):
        with self.assertRaises(utils.CoreParseError) as ctx:
            observation.load_core(self.write('depth,d18O\n1.0,4.0\n'))
        self.assertEqual(ctx.exception.line_num, 1)

    def test_non_numeric(self):
        with self.assertRaises(utils.CoreParseError) as ctx:
            observation.load_core(self.write('# comment\ndepth_m,d18O\n2.0,4.0\n1.0,abc\n'))
        self.assertEqual(ctx.exception.line_num, 4)

    def test_duplicate_depth(self):
        with self.assertRaises(utils.CoreParseError) as ctx:
            observation.load_core(self.write('depth_m,d18O\n2.0,4.0\n2.0,4.1\n'))
        self.assertEqual(ctx.exception.line_num, 3)

    def test_non_monotone(self):
        with self.assertRaises(utils.CoreParseError) as ctx:
            observation.load_core(self.write('depth_m,d18O\n3.0,4.0\n2.0,4.1\n2.5,4.2\n'))
        self.assertEqual(ctx.exception.line_num, 4)

    def test_empty(self):
        with self.assertRaises(utils.CoreParseError):
            observation.load_core(self.write('depth_m,d18O\n'))

    def test_unmatched_tiepoint(self):
        with self.assertRaises(utils.CoreParseError):
            observation.load_core(self.write('#tiepoint 5.0 30 1\ndepth_m,d18O\n2.0,4.0\n1.0,4.1\n'))

    def test_bad_tiepoint_line(self):
        with self.assertRaises(utils.CoreParseError):
            observation.load_core(self.write('#tiepoint 2.0 30\ndepth_m,d18O\n2.0,4.0\n1.0,4.1\n'))

    def test_drops_slices_below_deepest_tiepoint(self):
        path = self.write('#tiepoint 2.0 30 1\ndepth_m,d18O\n3.0,4.0\n2.0,4.1\n1.0,4.2\n')
        record = observation.load_core(path)
        np.testing.assert_array_equal(record.depths, [2.0, 1.0])
        self.assertEqual(record.tie_points[0].slice_index, 0)


if __name__ == '__main__':
    unittest.main()
