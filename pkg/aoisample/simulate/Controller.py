"""Joint online sampling and change detection, run once per ACK.

For frame k the controller
    1. waits (gamma_k - D_k)^+ with the estimate held before this ACK,
    2. computes Q_k and L_k,
    3. runs the change detector when k - tau > 2m; on a change it records
       tau = k and resets the learner (gamma = 0, step counter restarted),
    4. updates gamma with the step size eta_{k - tau}.

With tau = k right after a reset the step index k - tau is 0: no update is
applied on the detecting frame and the next frame uses eta_1.
"""
from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple

from aoisample import config
from aoisample.config import logger
from aoisample.policies.waiting import LearnerState, wait_threshold, rm_update


class DetectionEvent(NamedTuple):
    k: int
    time: float
    delta: float
    threshold: float


@dataclass
class ControllerState:
    learner: LearnerState
    tau: int = 0
    k: int = 0
    # latest 2n delays, the only ones a test reads
    delay_history: deque = field(default_factory=deque)


class Controller(object):

    def __init__(self, detector=None, d_lb=None, eligibility_m=None,
                 stride=1, log_tests=False):
        """Online threshold learner restarted by a change detector.

        Args:
            detector (KSDetector, optional): change detector, None disables
                detection
            d_lb (float, optional): delay lower bound of the step sizes,
                defaults to config.D_LB
            eligibility_m (int, optional): detection runs when k - tau > 2m,
                defaults to the detector window size n
            stride (int, optional): test every ``stride`` eligible frames
            log_tests (bool, optional): keep (k, delta, threshold, verdict)
                of every test

        Example:

            >>> ctrl = Controller(KSDetector(DetectorConfig(n=50, mode='fixed', delta=0.3)))
            >>> wait = ctrl.on_ack(1, 0.8, sample_time=0.)
        """
        d_lb = config.D_LB if d_lb is None else d_lb
        self.detector = detector
        size = 2 * detector.config.n if detector is not None else 0
        self.state = ControllerState(LearnerState(0., 0, d_lb),
                                     delay_history=deque(maxlen=size))

        if eligibility_m is None and detector is not None:
            eligibility_m = detector.config.n
        self.m = eligibility_m
        if stride < 1:
            raise ValueError(f'Detection stride must be >= 1, got {stride}')
        self.stride = int(stride)

        self.log_tests = log_tests
        self.tests = []
        self.detections = []

    @property
    def gamma(self):
        return self.state.learner.gamma

    @property
    def tau(self):
        return self.state.tau

    def _eligible(self, k):
        st = self.state
        if self.detector is None:
            return False
        lag = k - st.tau - 2 * self.m
        if lag <= 0 or (lag - 1) % self.stride:
            return False
        return len(st.delay_history) >= 2 * self.detector.config.n

    def on_ack(self, k, delay, sample_time=None, ack_time=None):
        """Handle the ACK of packet k and return the waiting time W_k.

        Raises:
            ValueError: if frames are not processed in order or the delay is
                not positive
        """
        st = self.state
        if k != st.k + 1:
            raise ValueError(f'Expected frame {st.k + 1}, got frame {k}')
        if not delay > 0:
            raise ValueError(f'Transmission delay must be positive, got {delay}')
        st.k = k
        st.delay_history.append(delay)

        wait = wait_threshold(st.learner.gamma, delay)
        L = delay + wait
        Q = 0.5 * L * L

        if self._eligible(k):
            outcome = self.detector(st.delay_history, k)
            if self.log_tests:
                self.tests.append((k, outcome.delta_stat, outcome.threshold,
                                   outcome.changed))
            if outcome.changed:
                self.reset(k)
                event = DetectionEvent(k, sample_time, outcome.delta_stat,
                                       outcome.threshold)
                self.detections.append(event)
                logger.debug(
                    f'Change detected at frame {k} (t={sample_time}): '
                    f'delta={outcome.delta_stat:.4f} > {outcome.threshold:.4f}')
                return wait

        st.learner = rm_update(st.learner, Q, L)
        return wait

    def reset(self, k):
        """Record a change at frame k and restart the learner.

        The delay history is kept: windows ending after k + 2n only hold
        delays observed after the change.
        """
        st = self.state
        st.tau = k
        st.learner = LearnerState(0., 0, st.learner.d_lb)
        return st


def on_ack(controller, k, delay, sample_time=None):
    """Functional entry point: waiting time of frame k and the new state."""
    wait = controller.on_ack(k, delay, sample_time=sample_time)
    return wait, controller.state


def reset(controller, k):
    return controller.reset(k)
