"""Column-wise z-scoring, fitted on training rows only."""

from collections import namedtuple

import numpy as np

from fairfold.data import FairfoldError

STD_FLOOR = 1e-12

class EmptyRowSet(FairfoldError):
    def __init__(self):
        super().__init__('Cannot fit a standardizer on an empty row set')

Standardizer = namedtuple('Standardizer', ['mean', 'std'])

def fit_standardizer(d, rows=None):
    """Per-column mean and (population) standard deviation over `rows` (positions)"""
    rows = np.arange(d.n) if rows is None else np.asarray(rows, dtype=int)
    if len(rows) == 0:
        raise EmptyRowSet()

    fit_on = d.features[rows]
    constant = np.ptp(fit_on, axis=0) == 0
    # constant columns map to exact zeros on the fit rows
    mean = np.where(constant, fit_on[0], fit_on.mean(axis=0))
    std = np.maximum(fit_on.std(axis=0), STD_FLOOR)
    mean.setflags(write=False)
    std.setflags(write=False)
    return Standardizer(mean, std)

def apply_standardizer(s, d):
    return d.with_features((d.features - s.mean) / s.std)

def invert_standardizer(s, d):
    return d.with_features(d.features * s.std + s.mean)

def identity_standardizer(d):
    return Standardizer(np.zeros(d.d), np.ones(d.d))
