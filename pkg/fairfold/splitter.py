"""Stratified k-fold partitioning."""

import numpy as np
import pandas as pd

from fairfold.data import FairfoldError

class TooFewClassMembers(FairfoldError):
    def __init__(self, label, have, need):
        super().__init__(f'Class {label} has {have} members, stratified {need}-fold needs at least {need}',
                         {'class': label, 'have': have, 'need': need})

class FoldOutOfRange(FairfoldError):
    def __init__(self, fold, k):
        super().__init__(f'Fold {fold} does not exist in a {k}-fold plan', {'fold': fold, 'k': k})

class FoldPlan():
    """
    Assignment of dataset positions to k folds.

    `assignments[i]` is the fold of position i, `folds[f]` the sorted
    positions in fold f. Built once, never modified.
    """

    def __init__(self, k, assignments, row_ids):
        self.k = k
        self.assignments = np.asarray(assignments, dtype=int)
        self.assignments.setflags(write=False)
        self.row_ids = np.asarray(row_ids, dtype=int)
        self.folds = [np.flatnonzero(self.assignments == f) for f in range(k)]

    def __len__(self):
        return len(self.assignments)

    def fold_class_counts(self, labels):
        """[(n_positive, n_negative)] per fold"""
        labels = np.asarray(labels)
        return [(int(labels[fold].sum()), int(len(fold) - labels[fold].sum())) for fold in self.folds]

    def to_frame(self):
        return pd.DataFrame({'row_id': self.row_ids, 'fold': self.assignments})

def stratified_kfold(d, k, rng):
    """
    Shuffle each class with `rng`, then deal its rows round-robin to the folds.

    The minority class is dealt first. The majority deal picks up at the
    fold after the last one the minority deal served, so fold sizes stay
    within one of each other overall as well as per class.
    """
    k = int(k)
    if k < 2:
        raise ValueError(f'k must be at least 2, got {k}')

    minority = d.minority_label()
    assignments = np.full(d.n, -1, dtype=int)
    next_fold = 0

    for label in (minority, 1 - minority):
        members = np.flatnonzero(d.labels == label)
        if len(members) < k:
            raise TooFewClassMembers(label, len(members), k)

        shuffled = members[rng.permutation(len(members))]
        assignments[shuffled] = (next_fold + np.arange(len(shuffled))) % k
        next_fold = (next_fold + len(shuffled)) % k

    return FoldPlan(k, assignments, d.row_ids)

def train_test_split_of_fold(plan, fold):
    """(train positions, test positions) for one fold"""
    if not 0 <= fold < plan.k:
        raise FoldOutOfRange(fold, plan.k)
    test = plan.folds[fold]
    train = np.flatnonzero(plan.assignments != fold)
    return train, test
