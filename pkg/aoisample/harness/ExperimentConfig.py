import json
import os
from dataclasses import dataclass, field

import numpy as np

from aoisample import config
from aoisample.config import logger
from aoisample.channel import DelayProcess, spec_from_config
from aoisample.detect import DetectorConfig
from aoisample.policies import POLICY_NAMES, policy_label

# default names of the files written in the output directory
OUTPUT_FILES = {
    'metrics': 'metrics.csv',
    'summary': 'summary.csv',
    'detections': 'detections.csv',
    'detection_summary': 'detection_summary.csv',
    'ks_tests': None,
    'traces': None,
    'config': 'experiment.json',
}

TOP_LEVEL_KEYS = ('horizon', 'segments', 'policies', 'replications',
                  'base_seed', 'd_lb', 'detector', 'stride', 'eligibility_m',
                  'metric_grid', 'output')


def read_config(filename):
    """Parse a JSON configuration file into a dictionary.

    Raises:
        ValueError: if the file is not valid JSON
    """
    with open(filename) as f:
        try:
            entries = json.load(f)
        except json.JSONDecodeError as ex:
            raise ValueError(f'Cannot parse {filename}: {ex}') from None
    logger.info(f'Read experiment configuration {filename}')
    return entries


@dataclass
class ExperimentConfig:
    """Everything needed to run and record one experiment.

    Args:
        horizon (float): observation horizon T
        segments (list(dict)): delay segments, each with a ``start_time``,
            a ``distribution`` and its parameters
        policies (list(str or dict)): policies to compare
        replications (int): number of independent runs per policy
        base_seed (int): root of every random stream of the experiment
        d_lb (float): delay lower bound of the learners
        detector (DetectorConfig): change detector of online-ks
        stride (int): detection stride of online-ks
        eligibility_m (int): detection runs when k - tau > 2m, defaults to n
        metric_grid (int or list): number of evenly spaced evaluation times
            over (0, T], or the times themselves
        output (dict): output directory and file names, a file set to None
            is not written
    """
    horizon: float
    segments: list
    policies: list
    replications: int = 1
    base_seed: int = 0
    d_lb: float = config.D_LB
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    stride: int = 1
    eligibility_m: int = None
    metric_grid: object = config.METRIC_POINTS
    output: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.horizon > 0:
            raise ValueError(f'Horizon must be positive, got {self.horizon}')
        if not self.segments:
            raise ValueError('At least one delay segment is needed')
        for seg in self.segments:
            if 'start_time' not in seg:
                raise ValueError(f'Segment {seg} has no start_time')
            if seg['start_time'] >= self.horizon:
                raise ValueError(
                    f'Segment starting at {seg["start_time"]} is past the '
                    f'horizon {self.horizon}')
            spec_from_config(seg)
        # validates the segment ordering
        self.make_process()

        if not self.policies:
            raise ValueError('At least one policy is needed')
        for entry in self.policies:
            name = entry if isinstance(entry, str) else entry.get('name')
            if name not in POLICY_NAMES:
                raise ValueError(
                    f'Policy {name} not recognized, choose among '
                    f'{", ".join(POLICY_NAMES)}')
        labels = [policy_label(p) for p in self.policies]
        if len(set(labels)) != len(labels):
            raise ValueError(f'Duplicate policy labels: {labels}')

        if int(self.replications) != self.replications or self.replications < 1:
            raise ValueError(
                f'replications must be a positive integer, got {self.replications}')
        if not self.d_lb > 0:
            raise ValueError(f'd_lb must be positive, got {self.d_lb}')
        if int(self.stride) != self.stride or self.stride < 1:
            raise ValueError(f'stride must be a positive integer, got {self.stride}')
        if self.eligibility_m is not None and (
                int(self.eligibility_m) != self.eligibility_m
                or self.eligibility_m < 1):
            raise ValueError(
                f'eligibility_m must be a positive integer, got {self.eligibility_m}')
        self.replications = int(self.replications)
        self.stride = int(self.stride)
        if self.eligibility_m is not None:
            self.eligibility_m = int(self.eligibility_m)
        if isinstance(self.detector, dict):
            self.detector = DetectorConfig.from_config(self.detector)

        self.grid = self._make_grid()
        self.output = self._check_output(self.output)

    def _make_grid(self):
        if np.ndim(self.metric_grid) == 0:
            npts = int(self.metric_grid)
            if npts < 1:
                raise ValueError(f'metric_grid must be >= 1, got {npts}')
            return np.linspace(0., self.horizon, npts + 1)[1:]
        grid = np.asarray(self.metric_grid, dtype=float)
        if grid.size == 0 or np.any(grid <= 0) or np.any(grid > self.horizon):
            raise ValueError('metric_grid times must lie in (0, horizon]')
        if np.any(np.diff(grid) <= 0):
            raise ValueError('metric_grid times must be strictly increasing')
        return grid

    @staticmethod
    def _check_output(output):
        output = dict(output or {})
        unknown = set(output) - set(OUTPUT_FILES) - {'directory'}
        if unknown:
            raise ValueError(f'Unknown output entries: {sorted(unknown)}')
        files = dict(OUTPUT_FILES)
        files.update({k: v for k, v in output.items() if k != 'directory'})
        files['directory'] = output.get('directory', '.')

        paths = [os.path.normpath(os.path.join(files['directory'], v))
                 for k, v in files.items() if k != 'directory' and v]
        if len(set(paths)) != len(paths):
            raise ValueError(f'Conflicting output paths: {sorted(paths)}')
        return files

    @property
    def change_points(self):
        """True change times, the start times of the segments after the first."""
        return [float(s['start_time']) for s in self.segments[1:]]

    @property
    def labels(self):
        return [policy_label(p) for p in self.policies]

    def make_process(self, seed=None):
        return DelayProcess.from_config(self.segments, seed=seed, d_lb=self.d_lb)

    def output_path(self, key):
        """Full path of an output file, None when it is not written."""
        name = self.output.get(key)
        if not name:
            return None
        return os.path.join(self.output['directory'], name)

    @classmethod
    def from_dict(cls, entries):
        """Build the configuration from a parsed JSON document.

        Raises:
            ValueError: on unknown keys or invalid values
        """
        unknown = set(entries) - set(TOP_LEVEL_KEYS)
        if unknown:
            raise ValueError(f'Unknown configuration keys: {sorted(unknown)}')
        missing = {'horizon', 'segments', 'policies'} - set(entries)
        if missing:
            raise ValueError(f'Missing configuration keys: {sorted(missing)}')
        kwargs = dict(entries)
        kwargs['horizon'] = float(kwargs['horizon'])
        kwargs['segments'] = [dict(s) for s in kwargs['segments']]
        kwargs['detector'] = DetectorConfig.from_config(kwargs.get('detector'))
        return cls(**kwargs)

    @classmethod
    def from_file(cls, filename):
        """Read a JSON configuration file."""
        return cls.from_dict(read_config(filename))

    def to_dict(self):
        """Resolved configuration, readable back with from_dict."""
        out = {
            'horizon': self.horizon,
            'segments': self.segments,
            'policies': self.policies,
            'replications': self.replications,
            'base_seed': self.base_seed,
            'd_lb': self.d_lb,
            'detector': self.detector.to_dict(),
            'stride': self.stride,
            'eligibility_m': self.eligibility_m,
            'metric_grid': (self.metric_grid if np.ndim(self.metric_grid) == 0
                            else list(self.grid)),
            'output': self.output,
        }
        return out
