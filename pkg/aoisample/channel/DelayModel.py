"""Piecewise-stationary transmission delay.

The channel is described by a list of stationary segments, each with its own
delay distribution. The distribution of the k-th delay is the one of the
segment containing the sampling time S_k, never the reception time.
"""
from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from aoisample import config


@dataclass(frozen=True)
class LognormalSpec:
    """Lognormal delay, log(D) ~ Normal(mu, sigma**2).

    Args:
        mu (float): log-scale location
        sigma (float): log-scale shape, strictly positive
    """
    mu: float
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(
                f'Lognormal sigma must be positive, got {self.sigma}')
        if not np.isfinite(self.mu) or not np.isfinite(self.mean):
            raise ValueError(
                f'Lognormal({self.mu}, {self.sigma}) has no finite mean')

    @property
    def mean(self):
        return float(np.exp(self.mu + 0.5 * self.sigma**2))

    @property
    def second_moment(self):
        return float(np.exp(2 * self.mu + 2 * self.sigma**2))

    def transform(self, z):
        """Map standard normal draws onto delays."""
        return np.exp(self.mu + self.sigma * z)


@dataclass(frozen=True)
class PointMassSpec:
    """Deterministic delay equal to ``value``."""
    value: float

    def __post_init__(self):
        if not self.value > 0:
            raise ValueError(
                f'Deterministic delay must be positive, got {self.value}')

    @property
    def mean(self):
        return float(self.value)

    @property
    def second_moment(self):
        return float(self.value)**2

    def transform(self, z):
        return np.full_like(np.asarray(z, dtype=float), self.value)


@dataclass(frozen=True)
class DelaySegment:
    """Stationary period starting at ``start_time`` (seconds)."""
    start_time: float
    spec: object


def spec_from_config(entry):
    """Build a distribution spec from a config entry.

    Args:
        entry (dict): e.g. {'distribution': 'lognormal', 'mu': 0.3, 'sigma': 1.25}
            or {'distribution': 'point', 'value': 1.0}

    Raises:
        ValueError: unknown distribution or missing parameter
    """
    dist = entry.get('distribution', 'lognormal')
    try:
        if dist == 'lognormal':
            return LognormalSpec(float(entry['mu']), float(entry['sigma']))
        if dist == 'point':
            return PointMassSpec(float(entry['value']))
    except KeyError as ex:
        raise ValueError(
            f'Missing parameter {ex} for {dist} delay distribution') from None
    raise ValueError(f'Delay distribution {dist} not recognized')


class DelayProcess(object):

    def __init__(self, segments, seed=None, d_lb=None):
        """Sampler of a piecewise-stationary delay process.

        Delays are obtained from a stream of standard normal draws produced in
        blocks; the k-th call consumes the k-th draw whatever the segment, so
        two processes with the same seed and segments see the same channel.

        Args:
            segments (list(DelaySegment)): stationary periods, the first one
                starting at 0 and start times strictly increasing
            seed (int or numpy.random.SeedSequence, optional): RNG seed
            d_lb (float, optional): delay lower bound assumed by the learner,
                defaults to config.D_LB

        Raises:
            ValueError: if the segments or d_lb are not valid

        Example:

            >>> process = DelayProcess([DelaySegment(0., LognormalSpec(0.3, 1.25)),
            >>>                         DelaySegment(1e5, LognormalSpec(-1., 1.))],
            >>>                        seed=2022)
            >>> process.sample_delay(5e4)
        """
        self.segments = list(segments)
        self.d_lb = config.D_LB if d_lb is None else float(d_lb)
        self.seed = seed

        if not self.segments:
            raise ValueError('A delay process needs at least one segment')
        if self.segments[0].start_time != 0:
            raise ValueError('The first delay segment must start at 0')
        starts = [s.start_time for s in self.segments]
        if any(b <= a for a, b in zip(starts[:-1], starts[1:])):
            raise ValueError(
                f'Segment start times must be strictly increasing: {starts}')
        if not self.d_lb > 0:
            raise ValueError(f'd_lb must be positive, got {self.d_lb}')

        self.start_times = [float(s) for s in starts]
        self.rng = np.random.default_rng(seed)
        self._block = np.empty(0)
        self._pos = 0
        self.count = 0

    @classmethod
    def from_config(cls, entries, seed=None, d_lb=None):
        """Create the process from the ``segments`` list of a config."""
        segments = [DelaySegment(float(e['start_time']), spec_from_config(e))
                    for e in entries]
        return cls(segments, seed=seed, d_lb=d_lb)

    def segment_index(self, t):
        """Index of the segment containing t, segments are [start, next start)."""
        if t < 0:
            raise ValueError(f'Time must be nonnegative, got {t}')
        return bisect_right(self.start_times, t) - 1

    def segment_at(self, t):
        return self.segments[self.segment_index(t)]

    def _next_normal(self):
        if self._pos == len(self._block):
            self._block = self.rng.standard_normal(config.DELAY_BLOCK)
            self._pos = 0
        z = self._block[self._pos]
        self._pos += 1
        return z

    def sample_delay(self, sample_time):
        """Draw the delay of a packet sampled at ``sample_time``."""
        spec = self.segment_at(sample_time).spec
        self.count += 1
        return float(spec.transform(self._next_normal()))


def sample_delay(process, sample_time):
    """Draw one delay D_k > 0 for a packet sampled at ``sample_time``."""
    return process.sample_delay(sample_time)


def segment_at(process, t):
    """Return the unique segment with start_time <= t < next start_time."""
    return process.segment_at(t)


def true_moments(spec):
    """First and second moment of a delay distribution.

    Returns:
        tuple(float, float): E[D], E[D**2]
    """
    return spec.mean, spec.second_moment
