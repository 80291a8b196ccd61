#!/usr/bin/env python
"""Export the frame table of one run stored in a traces hdf5 file to csv.

Usage: python {0} <hdf5 traces file> <policy> <replication> <csv output file>
Example: python {0} results/traces.hdf5 online-ks 3 online-ks_003.csv
"""
import sys

import h5py
import pandas as pd

from aoisample import config
from aoisample.simulate import TRACE_COLUMNS

USAGE = __doc__.format(__file__)


def check_input(args):
    if len(args) != 4:
        sys.stderr.write(USAGE)
        sys.exit(1)


def export_trace(fin, policy, replication, fout=None):
    """Read the frames of one (policy, replication) run.

    Args:
        fin (str): traces hdf5 file
        policy (str): policy label
        replication (int): replication index
        fout (str, optional): csv file to write

    Returns:
        pd.DataFrame: columns k, S_k, W_k, D_k, R_k, X_k
    """
    name = f'{policy}/rep_{int(replication):03d}'
    with h5py.File(fin, 'r') as f5:
        if name not in f5:
            raise ValueError(f'{name} not found in {fin}')
        df = pd.DataFrame(f5[name][()])[TRACE_COLUMNS]
    if fout is not None:
        df.to_csv(fout, index=False, float_format=config.CSV_FLOAT_FORMAT)
    return df


if __name__ == '__main__':
    check_input(sys.argv[1:])
    fin, policy, replication, fout = sys.argv[1:]
    export_trace(fin, policy, replication, fout)
    print(f'{fout} generated.')
