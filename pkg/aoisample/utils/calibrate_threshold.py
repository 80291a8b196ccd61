#!/usr/bin/env python
"""Tune the fixed threshold of the change detector.

Simulates stationary windows for every segment of a configuration and prints
the smallest fixed threshold whose per-test false alarm probability stays
below the requested level on all of them, then checks the detection power
between consecutive segments.

Usage: python -m aoisample.utils.calibrate_threshold <config.json> [options]
"""
import argparse
import json
from dataclasses import replace

import numpy as np

from aoisample.config import logger
from aoisample.channel import spec_from_config
from aoisample.detect import DetectorConfig
from aoisample.detect import calibrate_fixed_threshold, detection_power


def calibrate(segments, n, level=1e-3, trials=20000, grid_size=None,
              power_trials=1000, seed=None):
    """Fixed threshold for the segments of an experiment.

    Returns:
        tuple(float, list(float), list(float)): threshold, per segment
        thresholds and detection power between consecutive segments
    """
    rng = np.random.default_rng(seed)
    specs = [spec_from_config(s) for s in segments]
    delta, per_spec = calibrate_fixed_threshold(
        specs, n, level=level, trials=trials, rng=rng, grid_size=grid_size)
    for seg, d in zip(segments, per_spec):
        logger.info(f'Segment starting at {seg["start_time"]:g}: '
                    f'threshold {d:.4f} at level {level:g}')

    detector = DetectorConfig(n=n, mode='fixed', delta=delta)
    if grid_size is not None:
        detector = replace(detector, grid_size=grid_size)
    power = [detection_power(a, b, detector, power_trials, rng)
             for a, b in zip(specs[:-1], specs[1:])]
    for i, p in enumerate(power):
        logger.info(f'Change {i} -> {i + 1}: detection power {p:.3f}')
    return delta, per_spec, power


if __name__ == '__main__':

    parser = argparse.ArgumentParser(
        description='tune the fixed threshold of the KS change detector')
    parser.add_argument(
        'config',
        help='JSON experiment configuration holding the segments')
    parser.add_argument(
        '-n',
        help='window size',
        default=200,
        type=int)
    parser.add_argument(
        '--level',
        help='per-test false alarm probability',
        default=1e-3,
        type=float)
    parser.add_argument(
        '--trials',
        help='number of simulated stationary tests per segment',
        default=20000,
        type=int)
    parser.add_argument(
        '--seed',
        help='seed of the simulation',
        default=None,
        type=int)
    args = parser.parse_args()

    with open(args.config) as f:
        segments = json.load(f)['segments']
    delta, _, _ = calibrate(segments, args.n, level=args.level,
                            trials=args.trials, seed=args.seed)
    print(f'{delta:.4f}')
