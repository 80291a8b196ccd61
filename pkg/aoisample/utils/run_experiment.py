#!/usr/bin/env python
"""Run an age of information sampling experiment from a JSON configuration.

Usage: python -m aoisample.utils.run_experiment <config.json> [options]
Example: python -m aoisample.utils.run_experiment example/reference_experiment.json --outdir results
"""
import argparse
from time import time

import aoisample.config
from aoisample.config import logger
from aoisample.harness import ExperimentConfig, read_config, run_experiment


def load_config(filename, seed=None, replications=None, outdir=None):
    """Read a configuration file and apply the command line overrides."""
    entries = read_config(filename)
    if seed is not None:
        entries['base_seed'] = seed
    if replications is not None:
        entries['replications'] = replications
    if outdir is not None:
        entries['output'] = dict(entries.get('output') or {}, directory=outdir)
    return ExperimentConfig.from_dict(entries)


def get_parser():
    parser = argparse.ArgumentParser(
        description='simulate sampling policies over a piecewise-stationary '
                    'delay channel')
    parser.add_argument(
        'config',
        help='JSON experiment configuration')
    parser.add_argument(
        '--seed',
        help='override the base seed of the experiment',
        default=None,
        type=int)
    parser.add_argument(
        '--replications',
        help='override the number of replications',
        default=None,
        type=int)
    parser.add_argument(
        '--outdir',
        help='directory where the csv files are written',
        default=None,
        type=str)
    parser.add_argument(
        '-v',
        '--verbose',
        help='print debug messages (detection events)',
        action='store_true')
    parser.add_argument(
        '--no-progress',
        help='hide the progress bar',
        action='store_true')
    parser.add_argument(
        '--mpi',
        help='distribute the replications over MPI.COMM_WORLD',
        action='store_true')
    return parser


def main(argv=None):
    args = get_parser().parse_args(argv)
    if args.verbose:
        aoisample.config.DEBUG = True

    exp = load_config(args.config, seed=args.seed,
                      replications=args.replications, outdir=args.outdir)

    comm = None
    if args.mpi:
        from mpi4py import MPI
        comm = MPI.COMM_WORLD

    t0 = time()
    result = run_experiment(exp, mpi_comm=comm, prog_bar=not args.no_progress)
    if result is not None:
        logger.info(f'Experiment done in {time() - t0:.1f} s, outputs in '
                    f'{exp.output["directory"]}')
    return result


if __name__ == '__main__':
    main()
