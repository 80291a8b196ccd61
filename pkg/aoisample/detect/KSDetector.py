"""Two-sample Kolmogorov-Smirnov test between the two latest delay windows.

The last n delays are compared with the n delays before them. Both empirical
CDFs are evaluated on N equally spaced cut points over [0, D_max] and the
statistic is their largest absolute difference. The critical value is either
a fixed number or the floor(alpha R)-th largest statistic of R bootstrap
replicates drawn, by default, from the pooled windows.
"""
from dataclasses import dataclass, asdict
from typing import NamedTuple

import numpy as np

from aoisample import config

MODES = ('bootstrap', 'fixed')
RESAMPLING = ('pooled', 'separate')


@dataclass(frozen=True)
class DetectorConfig:
    """Parameters of the change detector.

    Args:
        n (int): size of each window, >= 2
        R (int): number of bootstrap replicates
        alpha (float): tail level, the threshold is the floor(alpha R)-th
            largest bootstrap statistic
        grid_size (int): number of cut points of the empirical CDFs
        mode (str): 'bootstrap' or 'fixed'
        delta (float): threshold of the fixed mode, in [0, 1]
        resample (str): 'pooled' draws both bootstrap windows from the union
            of the windows, 'separate' draws each from its own window
    """
    n: int = config.WINDOW_SIZE
    R: int = config.BOOTSTRAP_REPLICATES
    alpha: float = config.ALPHA
    grid_size: int = config.GRID_SIZE
    mode: str = 'bootstrap'
    delta: float = None
    resample: str = 'pooled'

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f'Window size n must be an integer >= 2, got {self.n}')
        if int(self.grid_size) != self.grid_size or self.grid_size < 2:
            raise ValueError(
                f'grid_size must be an integer >= 2, got {self.grid_size}')
        if self.mode not in MODES:
            raise ValueError(f'Detection mode {self.mode} not recognized')
        if self.resample not in RESAMPLING:
            raise ValueError(f'Resampling {self.resample} not recognized')
        if int(self.R) != self.R or self.R < 1:
            raise ValueError(f'R must be a positive integer, got {self.R}')
        # JSON numbers such as 50.0 are used as indices and sizes
        for name in ('n', 'R', 'grid_size'):
            object.__setattr__(self, name, int(getattr(self, name)))

        if self.mode == 'bootstrap':
            if not 0 < self.alpha < 1:
                raise ValueError(f'alpha must lie in (0, 1), got {self.alpha}')
            if self.rank < 1:
                raise ValueError(
                    f'floor(alpha R) = 0 for alpha={self.alpha}, R={self.R}')
        else:
            if self.delta is None or not 0 <= self.delta <= 1:
                raise ValueError(
                    f'Fixed mode needs a threshold delta in [0, 1], got {self.delta}')

    @property
    def rank(self):
        """floor(alpha R), rank of the bootstrap threshold from the top."""
        return rank_from_level(self.alpha, self.R)

    @classmethod
    def from_config(cls, entry):
        entry = dict(entry or {})
        known = set(cls.__dataclass_fields__)
        unknown = set(entry) - known
        if unknown:
            raise ValueError(f'Unknown detector parameters: {sorted(unknown)}')
        return cls(**entry)

    def to_dict(self):
        return asdict(self)


class KsOutcome(NamedTuple):
    delta_stat: float
    threshold: float
    changed: bool
    bootstrap: np.ndarray = None


def rank_from_level(alpha, R):
    # alpha * R is an integer up to rounding for the usual levels
    return int(np.floor(alpha * R + 1e-9))


def build_windows(history, k, n):
    """Latest two windows of delays ending at D_k.

    Args:
        history (sequence): delays D_1, D_2, ... (history[0] is D_1)
        k (int): index of the latest delay
        n (int): window size

    Returns:
        tuple(np.array, np.array): {D_k, ..., D_{k-n+1}} and
        {D_{k-n}, ..., D_{k-2n+1}}

    Raises:
        ValueError: if fewer than 2n delays end at k
    """
    if n < 2:
        raise ValueError(f'Window size n must be >= 2, got {n}')
    if k - 2 * n + 1 < 1 or k > len(history):
        raise ValueError(
            f'Need delays D_{k - 2 * n + 1} to D_{k}, '
            f'history holds {len(history)} delays')
    recent = np.asarray(history[k - n:k], dtype=float)[::-1]
    older = np.asarray(history[k - 2 * n:k - n], dtype=float)[::-1]
    return recent, older


def make_grid(D1, D2, grid_size):
    """grid_size equally spaced cut points over [0, max(D1 u D2)]."""
    d_max = max(np.max(D1), np.max(D2))
    return np.linspace(0., d_max, grid_size)


def ecdf_on_grid(data, grid):
    """Empirical CDF of ``data`` at every cut point, F(x) = #{d <= x} / n."""
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError('The grid of cut points is empty')
    data = np.sort(np.asarray(data, dtype=float))
    return np.searchsorted(data, grid, side='right') / data.size


def ks_statistic(F1, F2):
    """Largest absolute difference between two grid-evaluated CDFs."""
    F1, F2 = np.asarray(F1), np.asarray(F2)
    if F1.shape != F2.shape:
        raise ValueError(
            f'CDFs evaluated on different grids: {F1.shape} vs {F2.shape}')
    return float(np.max(np.abs(F1 - F2)))


def bootstrap_statistics(D1, D2, R, grid, rng, resample='pooled'):
    """KS statistics of R bootstrap pairs of windows.

    Returns:
        np.array: the R statistics, in draw order
    """
    D1, D2 = np.asarray(D1, dtype=float), np.asarray(D2, dtype=float)
    n = D1.size
    if resample == 'pooled':
        draws = rng.choice(np.concatenate((D1, D2)), size=(R, 2, n),
                           replace=True)
    else:
        draws = np.stack((rng.choice(D1, size=(R, n), replace=True),
                          rng.choice(D2, size=(R, n), replace=True)), axis=1)
    # (R, 2, N) empirical CDFs
    cdf = (draws[..., None] <= np.asarray(grid)).mean(axis=2)
    return np.abs(cdf[:, 0] - cdf[:, 1]).max(axis=1)


def kth_largest(values, rank):
    values = np.asarray(values)
    return float(np.partition(values, values.size - rank)[values.size - rank])


def bootstrap_threshold(D1, D2, R, alpha, grid, rng, resample='pooled',
                        return_statistics=False):
    """Critical value of the KS statistic by bootstrap.

    Args:
        D1, D2 (np.array): windows of equal size n
        R (int): number of bootstrap replicates
        alpha (float): tail level, the floor(alpha R)-th largest is returned
        grid (np.array): cut points
        rng (numpy.random.Generator): bootstrap random stream
        resample (str, optional): 'pooled' or 'separate'
        return_statistics (bool, optional): also return the R statistics

    Raises:
        ValueError: if the windows differ in size or floor(alpha R) < 1
    """
    if len(D1) != len(D2):
        raise ValueError(f'Windows differ in size: {len(D1)} vs {len(D2)}')
    rank = rank_from_level(alpha, R)
    if rank < 1 or rank > R:
        raise ValueError(f'floor(alpha R) = {rank} for alpha={alpha}, R={R}')
    stats = bootstrap_statistics(D1, D2, R, grid, rng, resample=resample)
    delta = kth_largest(stats, rank)
    if return_statistics:
        return delta, stats
    return delta


def detect(history, k, config, rng=None):
    """Test for a change of the delay distribution at frame k.

    Args:
        history (sequence): delays D_1, ..., at least up to D_k
        k (int): index of the latest delay
        config (DetectorConfig): detector parameters
        rng (numpy.random.Generator, optional): bootstrap stream, required
            in bootstrap mode

    Returns:
        KsOutcome: statistic, threshold and verdict (statistic > threshold)
    """
    D1, D2 = build_windows(history, k, config.n)
    grid = make_grid(D1, D2, config.grid_size)
    delta_stat = ks_statistic(ecdf_on_grid(D1, grid), ecdf_on_grid(D2, grid))

    stats = None
    if config.mode == 'fixed':
        threshold = float(config.delta)
    else:
        if rng is None:
            raise ValueError('Bootstrap mode needs a random generator')
        threshold, stats = bootstrap_threshold(
            D1, D2, config.R, config.alpha, grid, rng,
            resample=config.resample, return_statistics=True)

    return KsOutcome(delta_stat, threshold, delta_stat > threshold, stats)


class KSDetector(object):

    def __init__(self, config=None, rng=None):
        """Change detector bound to its own bootstrap stream.

        Args:
            config (DetectorConfig, optional): parameters, defaults to
                DetectorConfig()
            rng (numpy.random.Generator or int, optional): bootstrap stream
                or its seed

        Example:

            >>> detector = KSDetector(DetectorConfig(n=50, mode='fixed', delta=0.3))
            >>> outcome = detector(delays, k=len(delays))
        """
        self.config = config or DetectorConfig()
        if isinstance(rng, np.random.Generator):
            self.rng = rng
        else:
            self.rng = np.random.default_rng(rng)
        self.tests = 0
        self.alarms = 0

    def __call__(self, history, k):
        """Test for a change at frame k.

        Args:
            history (sequence): delays ending at D_k, either the whole record
                D_1, ..., D_k or only the latest ones
            k (int): index of the last delay of ``history``

        Raises:
            ValueError: if fewer than 2n delays end at k
        """
        size = 2 * self.config.n
        recent = list(history)[-size:]
        if k < size or len(recent) < size:
            raise ValueError(
                f'Frame {k}: need {size} delays, history holds {len(recent)}')
        outcome = detect(recent, size, self.config, self.rng)
        self.tests += 1
        self.alarms += int(outcome.changed)
        return outcome
