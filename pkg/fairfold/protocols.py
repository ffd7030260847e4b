"""
The two evaluation pipelines.

EFIDL splits first and resamples only the training folds, so every test
row is an untouched original. Traditional resamples the whole dataset
and cross-validates on the result, so synthetic rows derived from
training rows end up being scored.
"""

from collections import namedtuple

import numpy as np

from fairfold.classifiers import fit
from fairfold.data import FairfoldError
from fairfold.metrics import ScoredPredictions, auc, f1_at_half
from fairfold.resamplers import canonical_resampler, resample
from fairfold.scaling import apply_standardizer, fit_standardizer, identity_standardizer
from fairfold.splitter import stratified_kfold, train_test_split_of_fold

import logging
logger = logging.getLogger(__name__)

DEFAULT_K = 5

class Protocol(object):
    EFIDL = 'efidl'
    TRADITIONAL = 'traditional'
    # resampler None, shared by both protocols
    BEF = 'bef'

class ProtocolViolation(FairfoldError):
    def __init__(self, message, details=None):
        super().__init__(f'Evaluation protocol violated: {message}', details)

class NonpositiveBaseline(FairfoldError):
    def __init__(self, before):
        super().__init__(f'Percent difference needs a positive baseline, got {before}', {'before': before})

_CellResult = namedtuple('CellResult', ['dataset', 'resampler', 'classifier', 'protocol',
                                        'fold_aucs', 'fold_f1s', 'predictions', 'n_synthetic_scored', 'skipped'])

class CellResult(_CellResult):
    """
    Outcome of one (dataset, resampler, classifier, protocol) cell.

    A skipped cell has a reason in `skipped` and no folds.
    """

    @property
    def coordinates(self):
        return (self.dataset, self.resampler, self.classifier, self.protocol)

    @property
    def mean_auc(self):
        return float(np.mean(self.fold_aucs)) if self.fold_aucs else float('nan')

    @property
    def mean_f1(self):
        return float(np.mean(self.fold_f1s)) if self.fold_f1s else float('nan')

    @property
    def is_skipped(self):
        return self.skipped is not None

    @staticmethod
    def skip(dataset, resampler, classifier, protocol, reason):
        return CellResult(dataset, resampler, classifier, protocol, [], [], [], 0, str(reason))

def _standardizer(train, standardize):
    return fit_standardizer(train) if standardize else identity_standardizer(train)

def _score_fold(model, test, fold):
    predictions = ScoredPredictions(model.score(test.features), test.labels, fold=fold, row_ids=test.row_ids)
    return predictions, auc(predictions), f1_at_half(predictions)

def run_efidl(d, resampler, classifier, rng, k=DEFAULT_K, standardize=True, tree_splitter='best',
              protocol=Protocol.EFIDL):
    """
    Split, then per fold: standardize on train, resample train, fit, score the original test fold.
    """
    resampler = canonical_resampler(resampler)
    if not d.is_all_original():
        raise ProtocolViolation('input dataset already contains synthetic rows', {'dataset': d.name})

    plan = stratified_kfold(d, k, rng)
    times_scored = np.zeros(d.n, dtype=int)
    fold_aucs, fold_f1s, predictions = [], [], []

    for fold in range(k):
        fold_rng = rng.for_fold(fold)
        train_positions, test_positions = train_test_split_of_fold(plan, fold)
        train, test = d.subset(train_positions), d.subset(test_positions)

        standardizer = _standardizer(train, standardize)
        train, test = apply_standardizer(standardizer, train), apply_standardizer(standardizer, test)

        resampled = resample(resampler, train, fold_rng.child('resample'))
        model = fit(classifier, resampled.data, fold_rng.child('classifier'), tree_splitter=tree_splitter)

        if test.synthetic.any():
            raise ProtocolViolation(f'synthetic rows in test fold {fold}', {'fold': fold})
        times_scored[test_positions] += 1

        fold_predictions, fold_auc, fold_f1 = _score_fold(model, test, fold)
        predictions.append(fold_predictions)
        fold_aucs.append(fold_auc)
        fold_f1s.append(fold_f1)
        logger.debug(f'{d.name} {resampler} {classifier} {protocol} fold {fold}: AUC {fold_auc:.4f}')

    if not np.all(times_scored == 1):
        raise ProtocolViolation('some original rows were not scored exactly once',
                                {'unscored': int(np.sum(times_scored == 0)),
                                 'rescored': int(np.sum(times_scored > 1))})

    return CellResult(d.name, resampler, classifier, protocol, fold_aucs, fold_f1s, predictions, 0, None)

def run_traditional(d, resampler, classifier, rng, k=DEFAULT_K, standardize=True, tree_splitter='best'):
    """
    Standardize and resample the full dataset once, then stratified k-fold over the augmented set.

    Without a resampler there is nothing to augment and this is exactly
    the EFIDL loop.
    """
    resampler = canonical_resampler(resampler)
    if resampler == 'None':
        return run_efidl(d, resampler, classifier, rng, k=k, standardize=standardize,
                         tree_splitter=tree_splitter, protocol=Protocol.TRADITIONAL)

    standardized = apply_standardizer(_standardizer(d, standardize), d)
    augmented = resample(resampler, standardized, rng.child('resample')).data
    plan = stratified_kfold(augmented, k, rng)

    fold_aucs, fold_f1s, predictions = [], [], []
    n_synthetic_scored = 0
    for fold in range(k):
        fold_rng = rng.for_fold(fold)
        train_positions, test_positions = train_test_split_of_fold(plan, fold)
        train, test = augmented.subset(train_positions), augmented.subset(test_positions)

        model = fit(classifier, train, fold_rng.child('classifier'), tree_splitter=tree_splitter)
        n_synthetic_scored += int(test.synthetic.sum())

        fold_predictions, fold_auc, fold_f1 = _score_fold(model, test, fold)
        predictions.append(fold_predictions)
        fold_aucs.append(fold_auc)
        fold_f1s.append(fold_f1)
        logger.debug(f'{d.name} {resampler} {classifier} traditional fold {fold}: AUC {fold_auc:.4f}')

    return CellResult(d.name, resampler, classifier, Protocol.TRADITIONAL,
                      fold_aucs, fold_f1s, predictions, n_synthetic_scored, None)

RUNNERS = {
    Protocol.EFIDL: run_efidl,
    Protocol.TRADITIONAL: run_traditional
}

def percent_diff(aug, before):
    """100 * (aug - before) / before"""
    if not before > 0:
        raise NonpositiveBaseline(before)
    return 100.0 * (aug - before) / before
