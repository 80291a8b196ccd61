"""Monte Carlo calibration of the change detector.

Each trial draws two fresh windows, so trials are independent; the detector
applied every frame of a simulation sees strongly overlapping windows.
"""
import numpy as np

from aoisample import config
from aoisample.detect.KSDetector import detect, make_grid, ecdf_on_grid, ks_statistic


def _windows(spec_older, spec_recent, n, rng):
    older = spec_older.transform(rng.standard_normal(n))
    recent = spec_recent.transform(rng.standard_normal(n))
    # history ordered D_1 ... D_2n, the recent window last
    return np.concatenate((older, recent))


def false_alarm_rate(spec, detector_config, trials, rng):
    """Fraction of independent tests claiming a change on a stationary stream.

    Args:
        spec: delay distribution of both windows
        detector_config (DetectorConfig): detector parameters
        trials (int): number of independent tests
        rng (numpy.random.Generator): draws the windows and the bootstrap
    """
    return detection_power(spec, spec, detector_config, trials, rng)


def detection_power(spec_before, spec_after, detector_config, trials, rng):
    """Fraction of independent tests claiming a change when the older window
    follows ``spec_before`` and the recent one ``spec_after``."""
    n = detector_config.n
    alarms = 0
    for _ in range(trials):
        history = _windows(spec_before, spec_after, n, rng)
        alarms += detect(history, 2 * n, detector_config, rng).changed
    return alarms / trials


def null_statistics(spec, n, trials, rng, grid_size=None):
    """KS statistics of ``trials`` pairs of stationary windows."""
    grid_size = config.GRID_SIZE if grid_size is None else grid_size
    stats = np.empty(trials)
    for i in range(trials):
        history = _windows(spec, spec, n, rng)
        D2, D1 = history[:n], history[n:]
        grid = make_grid(D1, D2, grid_size)
        stats[i] = ks_statistic(ecdf_on_grid(D1, grid), ecdf_on_grid(D2, grid))
    return stats


def calibrate_fixed_threshold(specs, n, level=1e-3, trials=20000, rng=None,
                              grid_size=None):
    """Smallest fixed threshold with per-test false alarms below ``level``.

    The threshold is computed for every stationary spec and the largest is
    returned, so the bound holds on every segment of the channel.

    Args:
        specs (list): delay distributions of the stationary periods
        n (int): window size
        level (float, optional): admissible per-test false alarm probability
        trials (int, optional): Monte Carlo tests per spec
        rng (numpy.random.Generator or int, optional): random stream or seed
        grid_size (int, optional): number of cut points

    Returns:
        tuple(float, list(float)): overall threshold and per-spec thresholds
    """
    if not 0 < level < 1:
        raise ValueError(f'level must lie in (0, 1), got {level}')
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    per_spec = []
    for spec in specs:
        stats = np.sort(null_statistics(spec, n, trials, rng, grid_size))
        # at most level * trials statistics exceed the returned value
        idx = int(np.ceil((1. - level) * trials)) - 1
        per_spec.append(float(stats[min(max(idx, 0), trials - 1)]))
    return max(per_spec), per_spec
