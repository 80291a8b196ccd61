import json
import os
from typing import NamedTuple

import h5py
import numpy as np
import pandas as pd

import aoisample
from aoisample import config
from aoisample.config import logger
from aoisample.detect import KSDetector
from aoisample.policies import make_policy, solve_optimal_threshold
from aoisample.simulate import simulate
from aoisample.channel import spec_from_config
from aoisample.utils.logger_helper import set_replication

try:
    from tqdm import tqdm
except ImportError:
    def tqdm(x, **kwargs):
        return x

METRICS_COLUMNS = ['policy', 't', 'a_hat_mean', 'a_hat_stderr']
SUMMARY_COLUMNS = ['policy', 'segment', 'terminal_a_hat', 'gamma_star',
                   'aoi_star', 'start_time', 'end_time', 'terminal_a_hat_stderr']
DETECTIONS_COLUMNS = ['policy', 'replication', 'true_change_time',
                      'detected_time', 'delay', 'delay_frames']
DETECTION_SUMMARY_COLUMNS = ['policy', 'true_change_time', 'detection_rate',
                             'mean_delay', 'median_delay', 'p90_delay',
                             'mean_delay_frames', 'false_alarms']
KS_TESTS_COLUMNS = ['policy', 'replication', 'k', 'delta', 'threshold',
                    'changed']

# relative gap tolerated between the frame decomposition and the direct integral
AUDIT_RTOL = 1e-9


class ExperimentResult(NamedTuple):
    metrics: pd.DataFrame
    summary: pd.DataFrame
    detections: pd.DataFrame
    detection_summary: pd.DataFrame
    ks_tests: pd.DataFrame
    oracle: list
    audit_gap: float


def oracle_reference(config_):
    """Optimal threshold and optimal average age of every segment.

    Args:
        config_ (ExperimentConfig): experiment configuration

    Returns:
        list(ThresholdSolution): one solution per segment, in order
    """
    solutions = []
    for seg in config_.segments:
        sol = solve_optimal_threshold(spec_from_config(seg))
        logger.info(
            f'Segment starting at {seg["start_time"]:g}: '
            f'gamma* = {sol.gamma_star:.6g}, a* = {sol.aoi_star:.6g}')
        solutions.append(sol)
    return solutions


def replication_seeds(base_seed, replications):
    """Delay and bootstrap seeds of every replication.

    Each replication owns two independent streams; the delay stream is shared
    by all the policies of the replication.

    Returns:
        list(tuple(SeedSequence, SeedSequence))
    """
    children = np.random.SeedSequence(base_seed).spawn(replications)
    return [tuple(child.spawn(2)) for child in children]


def segment_bounds(config_):
    starts = [float(s['start_time']) for s in config_.segments]
    ends = starts[1:] + [config_.horizon]
    return np.array(starts), np.array(ends)


def windowed_average_age(trajectory, grid, starts):
    """Average age since the latest segment start strictly before each t.

    Args:
        trajectory (AoiTrajectory): age curve
        grid (np.array): evaluation times, all > 0
        starts (np.array): segment start times, the first one 0

    Returns:
        np.array: a_hat(t) on the grid
    """
    grid = np.asarray(grid, dtype=float)
    idx = np.searchsorted(starts, grid, side='left') - 1
    origin = starts[idx]
    area = trajectory.cumulative_area(grid) - trajectory.cumulative_area(origin)
    return area / (grid - origin)


def _detection_rows(label, index, events, mark_frames, change_points):
    """Match every true change point with the first alarm at or after it.

    Alarms raised before the first change, or after the matched one within
    the same segment, are counted as false alarms of the preceding segment.
    """
    rows = []
    bounds = list(change_points) + [np.inf]
    times = np.array([e.time for e in events], dtype=float)
    false_alarms = []

    before = times < bounds[0]
    false_alarms.append(int(np.sum(before)))
    for c, nxt in zip(bounds[:-1], bounds[1:]):
        inside = [e for e in events if c <= e.time < nxt]
        if inside:
            event = inside[0]
            first_k = mark_frames[c]
            rows.append([label, index, c, event.time, event.time - c,
                         event.k - first_k + 1])
        else:
            rows.append([label, index, c, np.nan, np.nan, np.nan])
        false_alarms.append(max(len(inside) - 1, 0))
    return rows, false_alarms


def run_replication(config_, index, seeds, oracle=None, keep_trace=False):
    """Run every policy of the experiment on one channel realisation.

    Args:
        config_ (ExperimentConfig): experiment configuration
        index (int): replication index
        seeds (tuple(SeedSequence, SeedSequence)): delay and bootstrap seeds
        oracle (list(ThresholdSolution), optional): per segment solutions
        keep_trace (bool, optional): keep the frame table of every run

    Returns:
        list(dict): one record per policy
    """
    delay_seed, boot_seed = seeds
    starts, ends = segment_bounds(config_)
    set_replication(index)

    records = []
    for entry, label in zip(config_.policies, config_.labels):
        process = config_.make_process(seed=delay_seed)
        detector = KSDetector(config_.detector,
                              rng=np.random.default_rng(boot_seed))
        policy = make_policy(entry, process, d_lb=config_.d_lb,
                             detector=detector,
                             eligibility_m=config_.eligibility_m,
                             stride=config_.stride,
                             log_tests=config_.output.get('ks_tests') is not None,
                             solutions=oracle)

        engine = simulate(process, policy, horizon=config_.horizon,
                          keep_trace=keep_trace,
                          marks=config_.change_points)

        traj = engine.trajectory
        a_hat = windowed_average_age(traj, config_.grid, starts)
        terminal = traj.integrate_age(starts, ends) / (ends - starts)
        decomposed, direct = engine.decomposition_audit()
        gap = abs(decomposed - direct) / direct
        if gap > AUDIT_RTOL:
            logger.warning(
                f'{label}, replication {index}: frame decomposition differs '
                f'from the age integral by {gap:.3g} (relative)')

        record = {'policy': label, 'replication': index, 'a_hat': a_hat,
                  'terminal': terminal, 'audit_gap': gap,
                  'frames': engine.frames, 'gamma': policy.gamma,
                  'detects': policy.name == 'online-ks',
                  'detections': [], 'false_alarms': [], 'tests': []}

        if record['detects']:
            record['detections'], record['false_alarms'] = _detection_rows(
                label, index, policy.detections,
                engine.mark_frames,
                config_.change_points)
            record['tests'] = [[label, index] + list(t) for t in policy.tests]

        if keep_trace:
            record['trace'] = engine.trace.to_records()

        logger.info(
            f'{label}, replication {index}: {engine.frames} frames, '
            f'terminal a_hat {np.array2string(terminal, precision=4)}, '
            f'{len(policy.detections)} detections')
        records.append(record)

    set_replication(None)
    return records


def _stderr(values):
    values = np.asarray(values, dtype=float)
    if values.shape[0] < 2:
        return np.zeros(values.shape[1:])
    return values.std(axis=0, ddof=1) / np.sqrt(values.shape[0])


def aggregate(config_, records, oracle):
    """Average the replication records, in replication order.

    Returns:
        ExperimentResult
    """
    records = sorted(records, key=lambda r: (r['replication'],
                                             config_.labels.index(r['policy'])))
    starts, ends = segment_bounds(config_)

    metrics, summary = [], []
    detections, detection_summary, tests = [], [], []
    for label in config_.labels:
        recs = [r for r in records if r['policy'] == label]
        a_hat = np.array([r['a_hat'] for r in recs])
        mean, err = a_hat.mean(axis=0), _stderr(a_hat)
        metrics.append(pd.DataFrame({'policy': label, 't': config_.grid,
                                     'a_hat_mean': mean,
                                     'a_hat_stderr': err}))

        terminal = np.array([r['terminal'] for r in recs])
        t_mean, t_err = terminal.mean(axis=0), _stderr(terminal)
        for j, sol in enumerate(oracle):
            summary.append([label, j, t_mean[j], sol.gamma_star, sol.aoi_star,
                            starts[j], ends[j], t_err[j]])

        if recs and recs[0]['detects']:
            rows = [row for r in recs for row in r['detections']]
            detections.extend(rows)
            alarms = np.array([r['false_alarms'] for r in recs], dtype=float)
            for i, c in enumerate(config_.change_points):
                delays = np.array([row[4] for row in rows if row[2] == c])
                frames = np.array([row[5] for row in rows if row[2] == c])
                found = ~np.isnan(delays)
                if found.any():
                    stats = [np.mean(delays[found]), np.median(delays[found]),
                             np.percentile(delays[found], 90),
                             np.mean(frames[found])]
                else:
                    stats = [np.nan] * 4
                detection_summary.append(
                    [label, c, found.mean()] + stats + [alarms[:, i].mean()])
            tests.extend(row for r in recs for row in r['tests'])

    return ExperimentResult(
        metrics=pd.concat(metrics, ignore_index=True)[METRICS_COLUMNS],
        summary=pd.DataFrame(summary, columns=SUMMARY_COLUMNS),
        detections=pd.DataFrame(detections, columns=DETECTIONS_COLUMNS),
        detection_summary=pd.DataFrame(detection_summary,
                                       columns=DETECTION_SUMMARY_COLUMNS),
        ks_tests=pd.DataFrame(tests, columns=KS_TESTS_COLUMNS),
        oracle=oracle,
        audit_gap=max(r['audit_gap'] for r in records))


def write_traces(filename, records):
    """Store the frame table of every run in an hdf5 file.

    One group per policy holds one dataset per replication.
    """
    with h5py.File(filename, 'w') as f5:
        f5.attrs['aoisample_version'] = aoisample.__version__
        for rec in records:
            grp = f5.require_group(rec['policy'])
            ds = grp.create_dataset(f'rep_{rec["replication"]:03d}',
                                    data=rec['trace'])
            ds.attrs['frames'] = rec['frames']
            ds.attrs['final_gamma'] = rec['gamma']
    logger.info(f'Frame traces written in {filename}')


def write_results(config_, result):
    """Write the csv outputs and the resolved configuration of an experiment."""
    os.makedirs(config_.output['directory'], exist_ok=True)
    tables = {'metrics': result.metrics, 'summary': result.summary,
              'detections': result.detections,
              'detection_summary': result.detection_summary,
              'ks_tests': result.ks_tests}
    for key, df in tables.items():
        path = config_.output_path(key)
        if path is None:
            continue
        df.to_csv(path, index=False, float_format=config.CSV_FLOAT_FORMAT)
        logger.info(f'{key} written in {path}')

    path = config_.output_path('config')
    if path is not None:
        with open(path, 'w') as f:
            json.dump(config_.to_dict(), f, indent=4)


def run_experiment(config_, mpi_comm=None, prog_bar=False, write=True):
    """Run every (policy, replication) pair and aggregate the metrics.

    Replications are distributed round-robin over the ranks of ``mpi_comm``
    and gathered on rank 0, which aggregates them and writes the outputs.
    The random streams only depend on the base seed and the replication
    index, so the results do not depend on the number of ranks.

    Args:
        config_ (ExperimentConfig): experiment configuration
        mpi_comm (MPI_COMM, optional): MPI communicator
        prog_bar (bool, optional): use tqdm
        write (bool, optional): write the csv and hdf5 outputs

    Returns:
        ExperimentResult: on rank 0, None on the other ranks

    Example:

        >>> from aoisample.harness import ExperimentConfig, run_experiment
        >>> exp = ExperimentConfig.from_file('example/single_segment.json')
        >>> result = run_experiment(exp, prog_bar=True)
        >>> result.summary
    """
    if mpi_comm is not None:
        rank = mpi_comm.Get_rank()
        size = mpi_comm.Get_size()
    else:
        rank, size = 0, 1

    oracle = oracle_reference(config_)
    seeds = replication_seeds(config_.base_seed, config_.replications)
    local = list(range(config_.replications))[rank::size]
    trace_file = config_.output_path('traces') if write else None

    desc = '{:25s}'.format('Replications')
    records = []
    for index in tqdm(local, desc=desc, disable=not prog_bar):
        records.extend(run_replication(config_, index, seeds[index],
                                       oracle=oracle,
                                       keep_trace=trace_file is not None))

    if trace_file is not None:
        if size > 1:
            head, tail = os.path.split(trace_file)
            trace_file = os.path.join(head, f'{rank:03d}_{tail}')
        os.makedirs(os.path.dirname(trace_file) or '.', exist_ok=True)
        write_traces(trace_file, records)
        for rec in records:
            del rec['trace']

    if size > 1:
        gathered = mpi_comm.gather(records, root=0)
        if rank != 0:
            return None
        records = [r for part in gathered for r in part]

    result = aggregate(config_, records, oracle)
    if result.audit_gap > AUDIT_RTOL:
        logger.warning(f'Largest decomposition gap: {result.audit_gap:.3g}')
    if write:
        write_results(config_, result)
    return result
