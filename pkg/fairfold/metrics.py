"""
ROC curves, AUC and threshold metrics.

AUC is computed two independent ways: as the trapezoidal area under the
ROC curve and as the Mann-Whitney rank statistic. They agree to rounding
error, ties included, which the tests use as an oracle.
"""

from collections import namedtuple

import numpy as np
import pandas as pd
from scipy.stats import rankdata

from fairfold.data import FairfoldError

F1_THRESHOLD = 0.5

class OneClassOnly(FairfoldError):
    def __init__(self, n_positive, n_negative):
        super().__init__(f'AUC needs both classes among the scored rows, got {n_positive} positive '
                         f'and {n_negative} negative', {'n_positive': n_positive, 'n_negative': n_negative})

class ScoredPredictions():
    """Scores with their true labels, optionally tagged with the fold they come from"""

    def __init__(self, scores, truth, fold=None, row_ids=None):
        self.scores = np.asarray(scores, dtype=float).reshape(-1)
        self.truth = np.asarray(truth, dtype=int).reshape(-1)
        if len(self.scores) != len(self.truth):
            raise ValueError(f'{len(self.scores)} scores but {len(self.truth)} labels')
        if len(self.scores) == 0:
            raise ValueError('No predictions')
        self.fold = fold
        self.row_ids = None if row_ids is None else np.asarray(row_ids, dtype=int)

    def __len__(self):
        return len(self.scores)

    @property
    def n_positive(self):
        return int(self.truth.sum())

    @property
    def n_negative(self):
        return len(self) - self.n_positive

    def require_both_classes(self):
        if self.n_positive == 0 or self.n_negative == 0:
            raise OneClassOnly(self.n_positive, self.n_negative)

    @staticmethod
    def pool(predictions):
        """All folds' predictions as one set"""
        predictions = list(predictions)
        return ScoredPredictions(np.concatenate([p.scores for p in predictions]),
                                 np.concatenate([p.truth for p in predictions]))

class RocCurve(namedtuple('RocCurve', ['fpr', 'tpr', 'thresholds'])):
    """Points from (0, 0) to (1, 1); the first threshold is +inf"""

    def to_frame(self):
        return pd.DataFrame({'threshold': self.thresholds, 'fpr': self.fpr, 'tpr': self.tpr})

def roc_curve(p):
    """One point per distinct score, thresholds descending; ties form a single step"""
    p.require_both_classes()
    order = np.argsort(-p.scores, kind='stable')
    scores, truth = p.scores[order], p.truth[order]

    # last position of every group of equal scores
    ends = np.r_[np.flatnonzero(np.diff(scores) != 0), len(scores) - 1]
    tp = np.cumsum(truth)[ends]
    fp = (ends + 1) - tp

    tpr = np.r_[0.0, tp / p.n_positive]
    fpr = np.r_[0.0, fp / p.n_negative]
    thresholds = np.r_[np.inf, scores[ends]]
    # endpoints exact
    tpr[-1], fpr[-1] = 1.0, 1.0
    return RocCurve(fpr, tpr, thresholds)

def auc(p):
    """Trapezoidal area under roc_curve(p)"""
    curve = roc_curve(p)
    return float(np.sum(np.diff(curve.fpr) * (curve.tpr[1:] + curve.tpr[:-1]) / 2))

def auc_rank(p):
    """(concordant pairs + ties / 2) / (n_positive * n_negative), from average ranks"""
    p.require_both_classes()
    ranks = rankdata(p.scores, method='average')
    n_pos, n_neg = p.n_positive, p.n_negative
    u = ranks[p.truth == 1].sum() - n_pos * (n_pos + 1) / 2
    return float(u / (n_pos * n_neg))

ConfusionCounts = namedtuple('ConfusionCounts', ['tp', 'fp', 'fn', 'tn'])

def confusion_counts(p, threshold=F1_THRESHOLD):
    """A row is predicted positive when its score is at least `threshold`"""
    predicted = p.scores >= threshold
    actual = p.truth == 1
    return ConfusionCounts(int(np.sum(predicted & actual)),
                           int(np.sum(predicted & ~actual)),
                           int(np.sum(~predicted & actual)),
                           int(np.sum(~predicted & ~actual)))

def f1_at_half(p):
    counts = confusion_counts(p, F1_THRESHOLD)
    denominator = 2 * counts.tp + counts.fp + counts.fn
    if denominator == 0:
        return 0.0
    return 2 * counts.tp / denominator
