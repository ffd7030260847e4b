"""
Where datasets come from: CSV files named in the config and the built-in
leak probe, a dataset with no signal at all.
"""

import numpy as np
import pandas as pd

from fairfold.data import Dataset, FairfoldError, load_csv
from fairfold.rng import make_rng

import logging
logger = logging.getLogger(__name__)

LEAK_PROBE_ID = 'leak_probe'

class BadCounts(FairfoldError):
    def __init__(self, n_majority, n_minority, d):
        super().__init__(f'Leak probe needs n_minority >= 5, n_majority >= n_minority and d >= 2, '
                         f'got {n_majority},{n_minority},{d}',
                         {'n_majority': n_majority, 'n_minority': n_minority, 'd': d})

def generate_leak_probe(n_majority, n_minority, d, rng):
    """
    Every row drawn from one standard d-dimensional Gaussian, labels dealt by a random permutation.

    Any classifier evaluated honestly on it should have an AUC near 0.5.
    """
    if n_minority < 5 or d < 2 or n_majority < n_minority:
        raise BadCounts(n_majority, n_minority, d)

    n = n_majority + n_minority
    features = rng.normal(size=(n, d))
    labels = np.zeros(n, dtype=int)
    labels[rng.permutation(n)[:n_minority]] = 1
    return Dataset(features, labels,
                   feature_names=[f'x{j}' for j in range(d)],
                   positive_label='1', name=LEAK_PROBE_ID)

def leak_probe_frame(dataset):
    """A leak probe as a CSV-ready table, label column `label`"""
    frame = pd.DataFrame(dataset.features, columns=dataset.feature_names)
    frame['label'] = dataset.labels
    return frame

def _unique_name(name, taken):
    candidate, suffix = name, 2
    while candidate in taken:
        candidate = f'{name}_{suffix}'
        suffix += 1
    return candidate

def make_dataset(source):
    return load_csv(source.path, source.label_column, source.positive_value,
                    missing_policy=source.missing_policy)

def load_datasets(config):
    """Every dataset of an experiment, in config order, names made unique"""
    datasets, taken = [], set()

    for source in config.datasets:
        dataset = make_dataset(source)
        name = _unique_name(dataset.name, taken)
        if name != dataset.name:
            logger.warning(f'Two datasets are called {dataset.name}, calling {source.path} {name}')
            dataset = dataset.renamed(name)
        taken.add(name)
        datasets.append(dataset)

    if config.leak_probe is not None:
        probe = generate_leak_probe(*config.leak_probe, rng=make_rng(config.seed, LEAK_PROBE_ID))
        if probe.name in taken:
            name = _unique_name(probe.name, taken)
            logger.warning(f'A data file is already called {probe.name}, calling the leak probe {name}')
            probe = probe.renamed(name)
        datasets.append(probe)

    return datasets
