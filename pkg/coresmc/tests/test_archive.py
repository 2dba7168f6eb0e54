#! /usr/bin/env python

# Standard Imports
import unittest

# External Imports
import numpy as np
from scipy import integrate, stats

# coresmc Imports
from coresmc import *
from coresmc.kits import archive

# Logging
log = logging.getLogger('coresmc.tests.archive')
utils.logging_setup(level=0, log_file=cs_log_dir + '/test_archive.log')

PARAMS = archive.ArchiveParams(mu_s=0.045, sigma_s=0.02, compaction=0.002, phi0=0.6)


def scipy_ig(mean, shape):
    return stats.invgauss(mean / shape, scale=shape)


class TestCompaction(unittest.TestCase):

    def test_correction(self):
        H = np.array([0.0, 1.0, 10.0])
        expected = H + 0.002 / 0.4 * H ** 2
        np.testing.assert_allclose(archive.compact_correct(H, PARAMS), expected)

    def test_no_compaction(self):
        H = np.array([0.5, 2.0])
        np.testing.assert_array_equal(archive.compact_correct(H, PARAMS._replace(compaction=0.0)), H)

    def test_invalid(self):
        with self.assertRaises(utils.ParameterError):
            archive.compact_correct([1.0], PARAMS._replace(phi0=1.0))
        with self.assertRaises(utils.ParameterError):
            archive.compact_correct([-1.0], PARAMS)
        with self.assertRaises(utils.ParameterError):
            archive.validate_archive(PARAMS._replace(mu_s=0.0))


class TestInverseGaussian(unittest.TestCase):

    def test_logpdf_matches_scipy(self):
        x = np.linspace(0.1, 10.0, 50)
        for mean, shape in ((1.0, 0.5), (2.2, 24.7), (0.3, 100.0)):
            np.testing.assert_allclose(archive.ig_logpdf(x, mean, shape), scipy_ig(mean, shape).logpdf(x),
                                       rtol=1e-9, atol=1e-9)

    def test_logpdf_outside_support(self):
        self.assertEqual(archive.ig_logpdf(0.0, 1.0, 1.0), -np.inf)
        self.assertEqual(archive.ig_logpdf(-1.0, 1.0, 1.0), -np.inf)

    def test_logcdf_matches_scipy(self):
        x = np.linspace(0.5, 5.0, 25)
        for mean, shape in ((1.0, 0.5), (2.2, 24.7)):
            np.testing.assert_allclose(archive.ig_logcdf(x, mean, shape), scipy_ig(mean, shape).logcdf(x),
                                       rtol=1e-7, atol=1e-9)

    def test_logcdf_deep_tail_is_finite(self):
        value = archive.ig_logcdf(0.05, 2.2, 2000.0)
        self.assertTrue(np.isfinite(value))
        self.assertLess(value, -100.0)

    def test_invalid_parameters(self):
        with self.assertRaises(utils.ParameterError):
            archive.ig_logpdf(1.0, -1.0, 1.0)

    def test_sampler_ks(self):
        mean, shape = 2.2, 24.7
        draws = archive.sample_ig(mean, shape, utils.stream(3, 1), size=5000)
        self.assertGreater(stats.kstest(draws, scipy_ig(mean, shape).cdf).pvalue, 1e-3)

    def test_increment_moments(self):
        dH = 0.1
        mean, shape = archive.increment_law(1.0, 1.0 + dH, PARAMS)
        self.assertAlmostEqual(mean, dH / PARAMS.mu_s)
        draws = archive.sample_ig(mean, shape, utils.stream(3, 2), size=40000)
        expected_var = dH * PARAMS.sigma_s ** 2 / PARAMS.mu_s ** 3
        self.assertAlmostEqual(draws.mean(), mean, delta=4.0 * np.sqrt(expected_var / len(draws)))
        self.assertAlmostEqual(draws.var() / expected_var, 1.0, delta=0.05)


class TestAgeTransition(unittest.TestCase):

    def test_normalised(self):
        H_prev, H_m = 1.2, 1.1
        for T_prev in (-30.0, -27.0, -24.5):
            value, _ = integrate.quad(
                lambda t: np.exp(archive.age_transition_logpdf(t, T_prev, H_m, H_prev, PARAMS)),
                T_prev, 0.0, points=[T_prev + 0.1 / PARAMS.mu_s], limit=200)
            self.assertAlmostEqual(value, 1.0, places=6)

    def test_outside_support(self):
        self.assertEqual(archive.age_transition_logpdf(-31.0, -30.0, 1.1, 1.2, PARAMS), -np.inf)
        self.assertEqual(archive.age_transition_logpdf(0.5, -30.0, 1.1, 1.2, PARAMS), -np.inf)

    def test_depth_order(self):
        with self.assertRaises(utils.OrderingError):
            archive.age_transition_logpdf(-20.0, -30.0, 1.2, 1.1, PARAMS)
        with self.assertRaises(utils.OrderingError):
            archive.age_marginal_logpdf(-20.0, 0.0, PARAMS)

    def test_marginal_matches_ig(self):
        H = 2.0
        mean, shape = archive.increment_law(0.0, H, PARAMS)
        self.assertAlmostEqual(archive.age_marginal_logpdf(-40.0, H, PARAMS), archive.ig_logpdf(40.0, mean, shape))


class TestProposeAge(unittest.TestCase):

    def test_proposals_in_range(self):
        T_prev = np.full(2000, -25.0)
        T_m, log_q = archive.propose_age(T_prev, 1.0, 1.1, PARAMS, utils.stream(0, 1))
        self.assertTrue(np.all((T_m > T_prev) & (T_m < 0)))
        self.assertTrue(np.all(np.isfinite(log_q)))

    def test_truncated_density_normalised(self):
        T_prev, H_m, H_prev = -1.5, 1.0, 1.1
        mean, shape = archive.increment_law(H_m, H_prev, PARAMS)
        log_norm = archive.ig_logcdf(-T_prev, mean, shape)
        value, _ = integrate.quad(lambda tau: np.exp(archive.ig_logpdf(tau, mean, shape) - log_norm), 0.0, -T_prev,
                                  limit=200)
        self.assertAlmostEqual(value, 1.0, places=6)
        T_m, log_q = archive.propose_age(np.array([T_prev]), H_m, H_prev, PARAMS, utils.stream(0, 2))
        self.assertAlmostEqual(log_q[0], archive.ig_logpdf(T_m[0] - T_prev, mean, shape) - log_norm)

    def test_retry_cap_exhausted(self):
        T_prev = np.full(50, -1e-6)
        T_m, log_q = archive.propose_age(T_prev, 1.0, 1.1, PARAMS, utils.stream(0, 3), retry_cap=2)
        self.assertTrue(np.all(np.isnan(T_m)))
        self.assertTrue(np.all(np.isneginf(log_q)))


class TestChronology(unittest.TestCase):

    def test_depth_grid(self):
        grid = archive.DepthGrid.from_depths([3.0, 2.0, 1.0], PARAMS)
        self.assertEqual(len(grid), 3)
        with self.assertRaises(utils.OrderingError):
            archive.DepthGrid.from_depths([1.0, 2.0], PARAMS)
        with self.assertRaises(utils.OrderingError):
            archive.DepthGrid([1.0, 0.0], [1.0, 0.0])

    def test_chronology_checks(self):
        chron = archive.Chronology([-30.0, -20.0, -1.0])
        np.testing.assert_array_equal(chron.ages, [30.0, 20.0, 1.0])
        with self.assertRaises(utils.OrderingError):
            archive.Chronology([-20.0, -30.0])
        with self.assertRaises(utils.OrderingError):
            archive.Chronology([-1.0, 0.0])

    def test_sample_chronology(self):
        depths = 0.05 + 0.1 * np.arange(40, -1, -1)
        grid = archive.DepthGrid.from_depths(depths, PARAMS)
        oldest = []
        for seed in range(400):
            chron = archive.sample_chronology(grid, PARAMS, utils.stream(seed, utils.PURPOSE_SIMULATE))
            self.assertTrue(archive.is_monotone(chron.times))
            oldest.append(chron.ages[0])
        mean, shape = archive.increment_law(0.0, grid.corrected_depths[0], PARAMS)
        sd = np.sqrt(mean ** 3 / shape)
        self.assertAlmostEqual(np.mean(oldest), mean, delta=4.0 * sd / np.sqrt(len(oldest)))


if __name__ == '__main__':
    unittest.main()
