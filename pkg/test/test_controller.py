import unittest

import numpy as np

from aoisample.channel import DelayProcess, DelaySegment, LognormalSpec
from aoisample.detect import DetectorConfig, KSDetector, KsOutcome, detect
from aoisample.policies import OnlineKSPolicy, OnlinePolicy, rm_step_size
from aoisample.simulate import Controller, simulate
from aoisample.simulate.Controller import on_ack, reset


class ScriptedDetector(object):
    """Detector answering True at the listed frames."""

    def __init__(self, n, fire_at=()):
        self.config = DetectorConfig(n=n, mode='fixed', delta=0.5)
        self.fire_at = set(fire_at)
        self.calls = []

    def __call__(self, history, k):
        self.calls.append(k)
        changed = k in self.fire_at
        return KsOutcome(0.9 if changed else 0.1, 0.5, changed)


def delays(nframes, seed=0):
    return np.random.default_rng(seed).lognormal(-1., 1., nframes)


class TestController(unittest.TestCase):
    """Test the joint learner and detector."""

    def test_matches_online_without_detection(self):
        for detector in (None, KSDetector(DetectorConfig(n=20, mode='fixed',
                                                         delta=1.))):
            ctrl = Controller(detector, d_lb=0.1)
            policy = OnlinePolicy(d_lb=0.1)
            for k, d in enumerate(delays(2000), start=1):
                self.assertEqual(ctrl.on_ack(k, d), policy.on_ack(k, d))
                self.assertEqual(ctrl.gamma, policy.gamma)
            self.assertEqual(ctrl.detections, [])

    def test_eligibility(self):
        detector = ScriptedDetector(5)
        ctrl = Controller(detector)
        for k, d in enumerate(delays(15), start=1):
            ctrl.on_ack(k, d)
        # first test once k - tau > 2m = 10
        self.assertEqual(detector.calls, [11, 12, 13, 14, 15])

    def test_stride(self):
        detector = ScriptedDetector(5)
        ctrl = Controller(detector, stride=3)
        for k, d in enumerate(delays(20), start=1):
            ctrl.on_ack(k, d)
        self.assertEqual(detector.calls, [11, 14, 17, 20])
        with self.assertRaises(ValueError):
            Controller(detector, stride=0)

    def test_short_eligibility_window(self):
        """A test also needs 2n delays in the history."""
        detector = ScriptedDetector(5)
        ctrl = Controller(detector, eligibility_m=2)
        for k, d in enumerate(delays(12), start=1):
            ctrl.on_ack(k, d)
        self.assertEqual(detector.calls, [10, 11, 12])

    def test_reset(self):
        d_lb = 0.1
        detector = ScriptedDetector(5, fire_at=[11])
        ctrl = Controller(detector, d_lb=d_lb)
        D = delays(30, seed=4)
        for k in range(1, 11):
            ctrl.on_ack(k, D[k - 1], sample_time=float(k))
        gamma = ctrl.gamma
        wait = ctrl.on_ack(11, D[10], sample_time=11.)
        # the detecting frame waits with the estimate held before the ACK
        self.assertEqual(wait, max(gamma - D[10], 0.))
        # no update on the detecting frame
        self.assertEqual(ctrl.gamma, 0.)
        self.assertEqual(ctrl.tau, 11)
        self.assertEqual(ctrl.state.learner.frames_since_reset, 0)
        self.assertEqual(len(ctrl.detections), 1)
        self.assertEqual(ctrl.detections[0].k, 11)
        self.assertEqual(ctrl.detections[0].time, 11.)

        # the next frame restarts with eta_1
        self.assertEqual(ctrl.on_ack(12, D[11]), 0.)
        Q = 0.5 * D[11]**2
        self.assertAlmostEqual(ctrl.gamma, rm_step_size(1, d_lb) * Q)

        for k in range(13, 31):
            ctrl.on_ack(k, D[k - 1])
        # the next test waits until k - 11 > 10
        self.assertEqual(detector.calls[:2], [11, 22])
        # only the latest 2n delays are kept
        self.assertEqual(list(ctrl.state.delay_history), list(D[20:30]))

    def test_bounded_history(self):
        """Tests on the latest 2n delays match tests on the whole record."""
        config = DetectorConfig(n=20, mode='fixed', delta=0.35)
        ctrl = Controller(KSDetector(config), log_tests=True)
        D = np.concatenate((delays(300, seed=5), delays(300, seed=6) * 4.))
        for k, d in enumerate(D, start=1):
            ctrl.on_ack(k, d)
        self.assertEqual(len(ctrl.state.delay_history), 40)
        self.assertGreater(len(ctrl.detections), 0)
        for k, delta, threshold, changed in ctrl.tests:
            outcome = detect(D, k, config)
            self.assertEqual((delta, threshold, changed),
                             (outcome.delta_stat, outcome.threshold,
                              outcome.changed))

    def test_functional_interface(self):
        ctrl = Controller(ScriptedDetector(5))
        wait, state = on_ack(ctrl, 1, 0.5)
        self.assertEqual(wait, 0.)
        self.assertEqual(state.k, 1)
        state = reset(ctrl, 1)
        self.assertEqual((state.tau, state.learner.gamma), (1, 0.))

    def test_out_of_order(self):
        ctrl = Controller()
        ctrl.on_ack(1, 0.5)
        with self.assertRaises(ValueError):
            ctrl.on_ack(3, 0.5)
        with self.assertRaises(ValueError):
            ctrl.on_ack(2, -0.5)

    def test_log_tests(self):
        detector = ScriptedDetector(5, fire_at=[12])
        ctrl = Controller(detector, log_tests=True)
        for k, d in enumerate(delays(12), start=1):
            ctrl.on_ack(k, d)
        self.assertEqual(ctrl.tests, [(11, 0.1, 0.5, False),
                                      (12, 0.9, 0.5, True)])


class TestDifferential(unittest.TestCase):
    """online and online-ks share the channel and agree until the first
    detection."""

    def test_identical_until_detection(self):
        segments = [DelaySegment(0., LognormalSpec(0.3, 1.25)),
                    DelaySegment(3000., LognormalSpec(-1., 1.))]
        traces = {}
        policies = {
            'online': OnlinePolicy(),
            'online-ks': OnlineKSPolicy(
                KSDetector(DetectorConfig(n=100, mode='fixed', delta=0.3))),
        }
        for name, policy in policies.items():
            process = DelayProcess(segments, seed=42)
            engine = simulate(process, policy, horizon=6000., keep_trace=True)
            traces[name] = engine.trace.to_frame()

        detections = policies['online-ks'].detections
        self.assertGreater(len(detections), 0)
        first = detections[0].k

        online = traces['online'].set_index('k').loc[:first]
        online_ks = traces['online-ks'].set_index('k').loc[:first]
        self.assertEqual(len(online), first)
        np.testing.assert_array_equal(online.values, online_ks.values)


if __name__ == '__main__':
    unittest.main()
