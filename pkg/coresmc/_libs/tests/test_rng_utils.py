#! /usr/bin/env python

# Standard Imports
import unittest

# External Imports
import numpy as np

# coresmc Imports
from coresmc import *
from coresmc._libs import rng_utils

# Logging
log = logging.getLogger('coresmc.lib_tests.rng_utils')
utils.logging_setup(level=0, log_file=cs_log_dir + '/test_lib_rng_utils.log')


class TestStream(unittest.TestCase):

    def test_same_key_same_draws(self):
        a = rng_utils.stream(42, rng_utils.PURPOSE_STEP, 3, 17).standard_normal(10)
        b = rng_utils.stream(42, rng_utils.PURPOSE_STEP, 3, 17).standard_normal(10)
        np.testing.assert_array_equal(a, b)

    def test_keys_are_independent_of_order(self):
        keys = [(rng_utils.PURPOSE_INIT, 0, n) for n in range(5)]
        forward = [rng_utils.stream(1, *k).uniform() for k in keys]
        backward = [rng_utils.stream(1, *k).uniform() for k in reversed(keys)][::-1]
        self.assertEqual(forward, backward)

    def test_different_keys_differ(self):
        draws = {rng_utils.stream(7, rng_utils.PURPOSE_MOVE, 2, k, 0, 5).uniform() for k in range(20)}
        self.assertEqual(len(draws), 20)

    def test_different_seeds_differ(self):
        a = rng_utils.stream(1, rng_utils.PURPOSE_PRIOR).uniform(size=4)
        b = rng_utils.stream(2, rng_utils.PURPOSE_PRIOR).uniform(size=4)
        self.assertFalse(np.array_equal(a, b))

    def test_purpose_separates_streams(self):
        a = rng_utils.stream(0, rng_utils.PURPOSE_STEP, 1, 1).uniform()
        b = rng_utils.stream(0, rng_utils.PURPOSE_PROPOSE, 1, 1).uniform()
        self.assertNotEqual(a, b)


if __name__ == '__main__':
    unittest.main()
