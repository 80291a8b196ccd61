import unittest
from collections import deque

import numpy as np
from hypothesis import given, settings, strategies as st

from aoisample.channel import LognormalSpec
from aoisample.detect import (DetectorConfig, KSDetector, bootstrap_threshold,
                              build_windows, calibrate_fixed_threshold,
                              detect, detection_power, ecdf_on_grid,
                              false_alarm_rate, ks_statistic, make_grid)
from aoisample.detect.KSDetector import kth_largest


class TestWindows(unittest.TestCase):
    """Test the assembly of the two windows."""

    def test_build_windows(self):
        history = np.arange(1., 11.)
        recent, older = build_windows(history, 10, 3)
        np.testing.assert_array_equal(recent, [10., 9., 8.])
        np.testing.assert_array_equal(older, [7., 6., 5.])

        recent, older = build_windows(history, 6, 3)
        np.testing.assert_array_equal(recent, [6., 5., 4.])
        np.testing.assert_array_equal(older, [3., 2., 1.])

    def test_insufficient_history(self):
        history = np.arange(1., 11.)
        with self.assertRaises(ValueError):
            build_windows(history, 5, 3)
        with self.assertRaises(ValueError):
            build_windows(history, 11, 3)


class TestStatistic(unittest.TestCase):
    """Test the empirical CDFs and the KS statistic."""

    def test_ecdf(self):
        F = ecdf_on_grid([1., 2., 2., 3.], [0., 1., 2., 2.5, 3.])
        np.testing.assert_allclose(F, [0., 0.25, 0.75, 0.75, 1.])

    def test_statistic(self):
        self.assertEqual(ks_statistic([0., 0.5, 1.], [0., 0.5, 1.]), 0.)
        self.assertEqual(ks_statistic([0., 0.5, 1.], [0.25, 1., 1.]), 0.5)
        with self.assertRaises(ValueError):
            ks_statistic([0., 1.], [0., 0.5, 1.])

    def test_grid(self):
        grid = make_grid([1., 4.], [2., 3.], 5)
        np.testing.assert_allclose(grid, [0., 1., 2., 3., 4.])

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(1e-3, 1e3), min_size=20, max_size=20),
           st.randoms(use_true_random=False))
    def test_permutation_invariance(self, values, random):
        D1, D2 = np.array(values[:10]), np.array(values[10:])
        grid = make_grid(D1, D2, 30)
        delta = ks_statistic(ecdf_on_grid(D1, grid), ecdf_on_grid(D2, grid))

        P1, P2 = list(D1), list(D2)
        random.shuffle(P1)
        random.shuffle(P2)
        grid = make_grid(P1, P2, 30)
        self.assertEqual(
            ks_statistic(ecdf_on_grid(P1, grid), ecdf_on_grid(P2, grid)), delta)
        self.assertTrue(0. <= delta <= 1.)


class TestBootstrap(unittest.TestCase):
    """Test the bootstrap threshold."""

    def setUp(self):
        rng = np.random.default_rng(0)
        self.D1 = rng.lognormal(0., 1., 50)
        self.D2 = rng.lognormal(0., 1., 50)
        self.grid = make_grid(self.D1, self.D2, 100)

    def test_kth_largest(self):
        self.assertEqual(kth_largest([1., 5., 3., 4., 2.], 1), 5.)
        self.assertEqual(kth_largest([1., 5., 3., 4., 2.], 2), 4.)

    def test_reproducible(self):
        d1 = bootstrap_threshold(self.D1, self.D2, 500, 0.05, self.grid,
                                 np.random.default_rng(3))
        d2 = bootstrap_threshold(self.D1, self.D2, 500, 0.05, self.grid,
                                 np.random.default_rng(3))
        self.assertEqual(d1, d2)
        self.assertTrue(0. < d1 < 1.)

    def test_rank(self):
        delta, stats = bootstrap_threshold(
            self.D1, self.D2, 500, 0.05, self.grid, np.random.default_rng(3),
            return_statistics=True)
        self.assertEqual(len(stats), 500)
        # floor(0.05 * 500) = 25 statistics are >= delta
        self.assertGreaterEqual(np.sum(stats >= delta), 25)
        self.assertLess(np.sum(stats > delta), 25)

        # the threshold depends on the replicates, not on their order
        shuffled = np.random.default_rng(11).permutation(stats)
        self.assertEqual(kth_largest(shuffled, 25), delta)

        delta = bootstrap_threshold(self.D1, self.D2, 500, 0.05, self.grid,
                                    np.random.default_rng(3),
                                    resample='separate')
        self.assertTrue(0. < delta <= 1.)

    def test_errors(self):
        with self.assertRaises(ValueError):
            bootstrap_threshold(self.D1, self.D2, 500, 0.001, self.grid,
                                np.random.default_rng(0))
        with self.assertRaises(ValueError):
            bootstrap_threshold(self.D1, self.D2[:10], 500, 0.05, self.grid,
                                np.random.default_rng(0))
        with self.assertRaises(ValueError):
            DetectorConfig(R=10, alpha=0.05)
        with self.assertRaises(ValueError):
            DetectorConfig(mode='fixed')
        with self.assertRaises(ValueError):
            DetectorConfig(n=1)
        with self.assertRaises(ValueError):
            DetectorConfig.from_config({'window': 50})

    def test_integer_fields(self):
        config = DetectorConfig.from_config(
            {'n': 50.0, 'R': 500.0, 'grid_size': 100.0})
        for name in ('n', 'R', 'grid_size'):
            self.assertIsInstance(getattr(config, name), int)
        self.assertEqual(config.rank, 25)
        with self.assertRaises(ValueError):
            DetectorConfig(n=50.5)
        with self.assertRaises(ValueError):
            DetectorConfig(mode='fixed', delta=0.3, R=0.5)


class TestDetect(unittest.TestCase):
    """Test the verdict of the detector."""

    def test_strict_inequality(self):
        # older = {1, 1, 2, 2}, recent = {1, 1, 1, 1}: Delta = 0.5 on [0, 2]
        history = [1., 1., 2., 2., 1., 1., 1., 1.]
        config = DetectorConfig(n=4, mode='fixed', delta=0.5, grid_size=5)
        outcome = detect(history, 8, config)
        self.assertEqual(outcome.delta_stat, 0.5)
        self.assertFalse(outcome.changed)

        config = DetectorConfig(n=4, mode='fixed', delta=0.49, grid_size=5)
        self.assertTrue(detect(history, 8, config).changed)

    def test_bootstrap_needs_rng(self):
        history = np.ones(10)
        with self.assertRaises(ValueError):
            detect(history, 10, DetectorConfig(n=5))

    def test_detector_counts(self):
        rng = np.random.default_rng(1)
        history = np.concatenate((rng.lognormal(2., 0.5, 50),
                                  rng.lognormal(-1., 0.5, 50)))
        detector = KSDetector(DetectorConfig(n=50), rng=2)
        outcome = detector(history, 100)
        self.assertTrue(outcome.changed)
        self.assertEqual(len(outcome.bootstrap), 500)
        self.assertEqual((detector.tests, detector.alarms), (1, 1))

    def test_latest_delays(self):
        """Only the last 2n delays of the history are tested."""
        rng = np.random.default_rng(4)
        history = rng.lognormal(0., 1., 300)
        config = DetectorConfig(n=50, mode='fixed', delta=0.2)
        detector = KSDetector(config)
        full = detect(history, 300, config)
        self.assertEqual(detector(history, 300), full)
        self.assertEqual(detector(deque(history[-100:], maxlen=100), 300), full)
        with self.assertRaises(ValueError):
            detector(history[-99:], 300)
        with self.assertRaises(ValueError):
            detector(history[:99], 99)


class TestCalibration(unittest.TestCase):
    """Statistical behaviour of the detector."""

    def test_false_alarm_rate(self):
        config = DetectorConfig(n=50, R=500, alpha=0.05)
        rate = false_alarm_rate(LognormalSpec(-1., 0.5), config, 3000,
                                np.random.default_rng(2022))
        self.assertTrue(0.03 <= rate <= 0.07)

    def test_power(self):
        config = DetectorConfig(n=50, R=500, alpha=0.05)
        power = detection_power(LognormalSpec(0.3, 1.25), LognormalSpec(-1., 1.),
                                config, 200, np.random.default_rng(2023))
        self.assertGreater(power, 0.9)

    def test_fixed_threshold(self):
        """The fixed threshold of the reference experiment rarely fires on a
        stationary channel and always detects its changes."""
        config = DetectorConfig(n=200, mode='fixed', delta=0.2)
        rng = np.random.default_rng(7)
        for spec in (LognormalSpec(0.3, 1.25), LognormalSpec(-1., 1.),
                     LognormalSpec(-0.2, 1.1)):
            self.assertLess(false_alarm_rate(spec, config, 500, rng), 0.01)
        self.assertGreater(detection_power(LognormalSpec(-1., 1.),
                                           LognormalSpec(-0.2, 1.1),
                                           config, 200, rng), 0.9)

    def test_calibrate(self):
        spec = LognormalSpec(-1., 1.)
        delta, per_spec = calibrate_fixed_threshold(
            [spec, LognormalSpec(0., 0.5)], 50, level=0.1, trials=400,
            rng=np.random.default_rng(0))
        self.assertEqual(delta, max(per_spec))
        self.assertEqual(len(per_spec), 2)
        self.assertTrue(0. < delta < 1.)
        with self.assertRaises(ValueError):
            calibrate_fixed_threshold([spec], 50, level=0.)


if __name__ == '__main__':
    unittest.main()
