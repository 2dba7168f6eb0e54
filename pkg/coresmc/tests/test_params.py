#! /usr/bin/env python

# Standard Imports
import unittest

# External Imports
import numpy as np

# coresmc Imports
from coresmc import *
from coresmc.kits import params
from coresmc.kits.run_config import DEFAULT_CONFIG_FILE

# Logging
log = logging.getLogger('coresmc.tests.params')
utils.logging_setup(level=0, log_file=cs_log_dir + '/test_params.log')

DEFAULTS = utils.read_json(DEFAULT_CONFIG_FILE)


class TestModelParams(unittest.TestCase):

    def setUp(self):
        self.truth = params.ModelParams.from_dict(DEFAULTS['simulation']['true_params'])

    def test_names(self):
        self.assertEqual(params.N_PARAMS, 17)
        self.assertEqual(params.PARAM_NAMES[:7], ('beta0', 'beta1', 'beta2', 'delta', 'alpha', 'sigma1', 'sigma2'))
        self.assertEqual(params.PARAM_NAMES[-4:], ('mu_s', 'sigma_s', 'compaction', 'phi0'))

    def test_vector_round_trip(self):
        vector = self.truth.to_vector()
        self.assertEqual(params.ModelParams.from_vector(vector), self.truth)
        self.assertEqual(self.truth.weights.gamma_p, DEFAULTS['simulation']['true_params']['gamma_p'])

    def test_from_dict_errors(self):
        data = self.truth.to_dict()
        data.pop('phi0')
        with self.assertRaises(utils.ParameterError):
            params.ModelParams.from_dict(data)
        data = self.truth.to_dict()
        data['kappa'] = 1.0
        with self.assertRaises(utils.ParameterError):
            params.ModelParams.from_dict(data)
        with self.assertRaises(utils.ParameterError):
            params.ModelParams.from_vector([0.0] * 16)

    def test_validate(self):
        self.truth.validate()
        with self.assertRaises(utils.ParameterError):
            self.truth.replace(phi0=1.2).validate()
        with self.assertRaises(utils.ParameterError):
            self.truth.replace(sigma_y=0.0).validate()
        self.truth.replace(sigma_y=0.0).validate(allow_zero_noise=True)


class TestParamPrior(unittest.TestCase):

    CASES = (
        ('beta0', 'gaussian', [0.0, 0.05], 'identity'),
        ('sigma1', 'log-gaussian', [-3.5, 0.5], 'log-lower'),
        ('phi0', 'uniform', [0.4, 0.8], 'logit'),
        ('compaction', 'truncated-gaussian', [0.002, 0.002, 0.0, 0.02], 'logit'),
    )

    def test_transforms_invert(self):
        for name, dist, args, transform in self.CASES:
            prior = params.ParamPrior(name, dist, args)
            self.assertEqual(prior.transform, transform)
            x = prior.rvs(50, utils.stream(1, 2))
            np.testing.assert_allclose(prior.from_unconstrained(prior.to_unconstrained(x)), x, rtol=1e-9, atol=1e-12)

    def test_log_jacobian(self):
        for name, dist, args, _ in self.CASES:
            prior = params.ParamPrior(name, dist, args)
            u = np.linspace(-2.0, 2.0, 9)
            eps = 1e-6
            numeric = (prior.from_unconstrained(u + eps) - prior.from_unconstrained(u - eps)) / (2 * eps)
            np.testing.assert_allclose(prior.log_jacobian(u), np.log(numeric), atol=1e-5)

    def test_support_checks(self):
        with self.assertRaises(utils.ConfigError):
            params.ParamPrior('sigma1', 'gaussian', [0.1, 0.05])
        with self.assertRaises(utils.ConfigError):
            params.ParamPrior('phi0', 'uniform', [0.5, 1.5])
        with self.assertRaises(utils.ConfigError):
            params.ParamPrior('beta0', 'cauchy', [0.0, 1.0])
        with self.assertRaises(utils.ConfigError):
            params.ParamPrior('beta0', 'gaussian', [0.0])
        with self.assertRaises(utils.ConfigError):
            params.ParamPrior('beta0', 'gaussian', [0.0, -1.0])


class TestPrior(unittest.TestCase):

    def test_variants(self):
        forced = params.Prior.from_config(DEFAULTS['priors'], 'forced')
        self.assertEqual(forced.dim, 17)
        unforced = params.Prior.from_config(DEFAULTS['priors'], 'unforced')
        self.assertEqual(unforced.dim, 14)
        self.assertEqual(unforced.fixed_values, {'gamma_p': 0.0, 'gamma_c': 0.0, 'gamma_e': 0.0})
        fixed = params.Prior.from_config(DEFAULTS['priors'], 'forced', fixed_chronology=True)
        self.assertEqual(fixed.dim, 13)
        self.assertAlmostEqual(fixed.fixed_values['phi0'], 0.6)
        with self.assertRaises(utils.ConfigError):
            params.Prior.from_config(DEFAULTS['priors'], 'damped')

    def test_missing_prior(self):
        priors = dict(DEFAULTS['priors'])
        priors.pop('alpha')
        with self.assertRaises(utils.ConfigError):
            params.Prior.from_config(priors)

    def test_logpdf_is_sum(self):
        prior = params.Prior.from_config(DEFAULTS['priors'], 'unforced')
        theta = prior.rvs(5, utils.stream(0, utils.PURPOSE_PRIOR))
        expected = sum(p.logpdf(theta[:, i]) for i, p in enumerate(prior.components))
        np.testing.assert_allclose(prior.logpdf(theta), expected)
        self.assertTrue(np.all(np.isfinite(prior.logpdf(theta))))

    def test_rvs_reproducible(self):
        prior = params.Prior.from_config(DEFAULTS['priors'])
        a = prior.rvs(8, utils.stream(4, utils.PURPOSE_PRIOR))
        b = prior.rvs(8, utils.stream(4, utils.PURPOSE_PRIOR))
        np.testing.assert_array_equal(a, b)

    def test_build(self):
        prior = params.Prior.from_config(DEFAULTS['priors'], 'unforced')
        theta = prior.rvs(1, utils.stream(0, utils.PURPOSE_PRIOR))[0]
        built = prior.build(theta)
        self.assertEqual(tuple(built.weights), (0.0, 0.0, 0.0))
        np.testing.assert_allclose(prior.free_vector(built), theta)
        with self.assertRaises(utils.ParameterError):
            prior.build(theta[:-1])

    def test_unconstrained_round_trip(self):
        prior = params.Prior.from_config(DEFAULTS['priors'])
        theta = prior.rvs(20, utils.stream(2, utils.PURPOSE_PRIOR))
        np.testing.assert_allclose(prior.from_unconstrained(prior.to_unconstrained(theta)), theta, rtol=1e-9,
                                   atol=1e-12)


if __name__ == '__main__':
    unittest.main()
