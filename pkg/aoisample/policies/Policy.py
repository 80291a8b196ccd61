import numpy as np

from aoisample import config
from aoisample.policies.waiting import LearnerState, wait_zero, wait_threshold, rm_update
from aoisample.policies.ThresholdSolver import solve_optimal_threshold

POLICY_NAMES = ('zero-wait', 'fixed', 'oracle', 'online', 'online-ks')


class WaitingPolicy(object):

    name = None

    def __init__(self):
        """Master class of the sampling policies.

        Note:
            Each subclass must implement ``on_ack(k, delay, sample_time,
            ack_time)`` returning the waiting time W_k chosen after the ACK
            of packet k.
        """
        self.k = 0

    def _advance(self, k):
        if k != self.k + 1:
            raise ValueError(f'Expected frame {self.k + 1}, got frame {k}')
        self.k = k

    def on_ack(self, k, delay, sample_time=None, ack_time=None):
        raise NotImplementedError

    @property
    def gamma(self):
        return None

    @property
    def detections(self):
        return []

    @property
    def tests(self):
        return []


class ZeroWaitPolicy(WaitingPolicy):

    name = 'zero-wait'

    def on_ack(self, k, delay, sample_time=None, ack_time=None):
        self._advance(k)
        return wait_zero(delay)

    @property
    def gamma(self):
        return 0.


class FixedThresholdPolicy(WaitingPolicy):

    name = 'fixed'

    def __init__(self, gamma):
        super().__init__()
        if gamma < 0:
            raise ValueError(f'Threshold must be nonnegative, got {gamma}')
        self._gamma = float(gamma)

    def on_ack(self, k, delay, sample_time=None, ack_time=None):
        self._advance(k)
        return wait_threshold(self._gamma, delay)

    @property
    def gamma(self):
        return self._gamma


class OraclePolicy(WaitingPolicy):

    name = 'oracle'

    def __init__(self, process, solutions=None):
        """Clairvoyant threshold policy.

        Uses the optimal threshold of the segment in force at the ACK time,
        switching exactly at every true change point.

        Args:
            process (DelayProcess): channel whose segments are known
            solutions (list(ThresholdSolution), optional): per segment
                solutions, solved in closed form when omitted
        """
        super().__init__()
        self.process = process
        if solutions is None:
            solutions = [solve_optimal_threshold(s.spec) for s in process.segments]
        self.solutions = list(solutions)
        self._current = self.solutions[0].gamma_star

    def on_ack(self, k, delay, sample_time=None, ack_time=None):
        self._advance(k)
        if ack_time is not None:
            idx = self.process.segment_index(ack_time)
            self._current = self.solutions[idx].gamma_star
        return wait_threshold(self._current, delay)

    @property
    def gamma(self):
        return self._current


class OnlinePolicy(WaitingPolicy):

    name = 'online'

    def __init__(self, d_lb=None):
        """Robbins-Monro threshold learner without change detection."""
        super().__init__()
        d_lb = config.D_LB if d_lb is None else d_lb
        self.state = LearnerState(0., 0, d_lb)

    def on_ack(self, k, delay, sample_time=None, ack_time=None):
        self._advance(k)
        if not delay > 0:
            raise ValueError(f'Transmission delay must be positive, got {delay}')
        wait = wait_threshold(self.state.gamma, delay)
        L = delay + wait
        self.state = rm_update(self.state, 0.5 * L * L, L)
        return wait

    @property
    def gamma(self):
        return self.state.gamma


class OnlineKSPolicy(WaitingPolicy):

    name = 'online-ks'

    def __init__(self, detector, d_lb=None, eligibility_m=None, stride=1,
                 log_tests=False):
        """Robbins-Monro learner restarted by the KS change detector.

        Args:
            detector (KSDetector): change detector with its own random stream
            d_lb (float, optional): delay lower bound of the step sizes
            eligibility_m (int, optional): detection runs when k - tau > 2m
            stride (int, optional): test every ``stride`` eligible frames
            log_tests (bool, optional): keep the outcome of every test
        """
        super().__init__()
        from aoisample.simulate.Controller import Controller
        self.controller = Controller(detector, d_lb=d_lb,
                                     eligibility_m=eligibility_m,
                                     stride=stride, log_tests=log_tests)

    def on_ack(self, k, delay, sample_time=None, ack_time=None):
        self.k = k
        return self.controller.on_ack(k, delay, sample_time=sample_time,
                                      ack_time=ack_time)

    @property
    def gamma(self):
        return self.controller.gamma

    @property
    def detections(self):
        return self.controller.detections

    @property
    def tests(self):
        return self.controller.tests


def make_policy(entry, process, d_lb=None, detector=None, eligibility_m=None,
                stride=1, log_tests=False, solutions=None):
    """Instantiate a policy from its config entry.

    Args:
        entry (str or dict): policy name or {'name': ..., 'gamma': ...}
        process (DelayProcess): channel, used by the oracle
        d_lb (float, optional): delay lower bound of the learners
        detector (KSDetector, optional): detector of the online-ks policy
        eligibility_m (int, optional): eligibility window of online-ks
        stride (int, optional): detection stride of online-ks
        log_tests (bool, optional): keep every KS test of online-ks
        solutions (list(ThresholdSolution), optional): oracle thresholds

    Raises:
        ValueError: unknown policy or missing parameter
    """
    if isinstance(entry, str):
        entry = {'name': entry}
    name = entry.get('name')

    if name == 'zero-wait':
        return ZeroWaitPolicy()
    if name == 'fixed':
        if 'gamma' not in entry:
            raise ValueError('The fixed policy needs a threshold "gamma"')
        return FixedThresholdPolicy(float(entry['gamma']))
    if name == 'oracle':
        return OraclePolicy(process, solutions=solutions)
    if name == 'online':
        return OnlinePolicy(d_lb=d_lb)
    if name == 'online-ks':
        if detector is None:
            raise ValueError('The online-ks policy needs a change detector')
        return OnlineKSPolicy(detector, d_lb=d_lb, eligibility_m=eligibility_m,
                              stride=stride, log_tests=log_tests)
    raise ValueError(
        f'Policy {name} not recognized, choose among {", ".join(POLICY_NAMES)}')


def policy_label(entry):
    """Name used for a policy in the output files."""
    if isinstance(entry, str):
        return entry
    if entry.get('label'):
        return entry['label']
    if entry.get('name') == 'fixed':
        return f'fixed-{np.format_float_positional(float(entry["gamma"]), trim="-")}'
    return entry['name']
