#! /usr/bin/env python

# Standard Imports
import unittest

# External Imports
import numpy as np

# coresmc Imports
from coresmc import *
from coresmc._libs import stats_utils

# Logging
log = logging.getLogger('coresmc.lib_tests.stats_utils')
utils.logging_setup(level=0, log_file=cs_log_dir + '/test_lib_stats_utils.log')


class FixedUniform(object):
    """stands in for a Generator whose single uniform draw is known"""

    def __init__(self, value):
        self.value = value

    def uniform(self):
        return self.value


class TestLogWeights(unittest.TestCase):

    def test_normalize_sums_to_one(self):
        log_w = np.array([-1000.0, -1001.0, -999.5, -np.inf])
        W, log_sum = stats_utils.normalize_log_weights(log_w)
        self.assertAlmostEqual(W.sum(), 1.0, places=12)
        self.assertEqual(W[3], 0.0)
        self.assertAlmostEqual(log_sum, np.log(np.sum(np.exp(log_w[:3] + 1000.0))) - 1000.0, places=10)

    def test_all_minus_inf(self):
        W, log_sum = stats_utils.normalize_log_weights(np.full(5, -np.inf))
        self.assertTrue(np.all(W == 0))
        self.assertEqual(log_sum, -np.inf)

    def test_nan_maps_to_minus_inf(self):
        cleaned = stats_utils.clean_log_weights([0.0, np.nan, np.inf, -np.inf])
        self.assertEqual(cleaned[0], 0.0)
        self.assertTrue(np.all(np.isneginf(cleaned[1:])))

    def test_log_mean_exp(self):
        values = np.log([1.0, 2.0, 3.0])
        self.assertAlmostEqual(stats_utils.log_mean_exp(values), np.log(2.0), places=12)


class TestEss(unittest.TestCase):

    def test_uniform(self):
        self.assertAlmostEqual(stats_utils.ess(np.full(100, 0.01)), 100.0, places=9)

    def test_degenerate(self):
        weights = np.zeros(10)
        weights[4] = 1.0
        self.assertAlmostEqual(stats_utils.ess(weights), 1.0)

    def test_zero_weights(self):
        self.assertEqual(stats_utils.ess(np.zeros(3)), 0.0)


class TestSystematicResample(unittest.TestCase):

    def test_counts_are_floor_or_ceil(self):
        rng = np.random.default_rng(3)
        for n in (7, 50, 333):
            weights = rng.gamma(0.5, size=n)
            weights /= weights.sum()
            idx = stats_utils.systematic_resample(weights, utils.stream(11, n))
            self.assertEqual(len(idx), n)
            self.assertTrue(np.all(np.diff(idx) >= 0))
            counts = np.bincount(idx, minlength=n)
            expected = n * weights
            self.assertTrue(np.all(counts >= np.floor(expected) - 1e-9))
            self.assertTrue(np.all(counts <= np.ceil(expected) + 1e-9))

    def test_never_picks_zero_weight(self):
        weights = np.array([0.0, 0.5, 0.0, 0.5, 0.0])
        idx = stats_utils.systematic_resample(weights, utils.stream(0, 1))
        self.assertTrue(set(idx.tolist()).issubset({1, 3}))

    def test_round_off_never_picks_trailing_zero_weight(self):
        # the positive weights sum to just under one, so the last position falls past their cumulative sum
        weights = np.array([0.5, 0.5 - 1e-12, 0.0, 0.0])
        idx = stats_utils.systematic_resample(weights, FixedUniform(1.0 - 1e-13))
        np.testing.assert_array_equal(idx, [0, 0, 1, 1])


class TestWeightedMeanVar(unittest.TestCase):

    def test_matches_numpy(self):
        rng = np.random.default_rng(5)
        values = rng.normal(size=(40, 3))
        weights = rng.uniform(size=40)
        weights /= weights.sum()
        mean, var = stats_utils.weighted_mean_var(values, weights, axis=0)
        expected_mean = np.average(values, axis=0, weights=weights)
        expected_var = np.average((values - expected_mean) ** 2, axis=0, weights=weights)
        np.testing.assert_allclose(mean, expected_mean, rtol=1e-12)
        np.testing.assert_allclose(var, expected_var, rtol=1e-12)


if __name__ == '__main__':
    unittest.main()
