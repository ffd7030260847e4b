"""
Datasets, their provenance and CSV ingestion.

A Dataset is a feature matrix with binary labels (1 = positive = minority
by convention) and one provenance record per row. Provenance is stored
columnwise:

    synthetic     False for rows read from a file
    parent_a      row id the synthetic row was generated from (-1 if none)
    parent_b      second parent for interpolated rows (-1 if none)
    lam           interpolation weight
    extrapolated  True if the row lies beyond parent_a, away from parent_b

An interpolated row equals parent_a + lam * (parent_b - parent_a), an
extrapolated one parent_a - lam * (parent_b - parent_a).
"""

from collections import namedtuple
import os

import numpy as np
import pandas as pd

import logging
logger = logging.getLogger(__name__)

class FairfoldError(Exception):
    """Base class for everything fairfold raises on purpose"""
    def __init__(self, message, details=None):
        super().__init__(message)
        self.details = details or {}

class InapplicableError(FairfoldError):
    """This method cannot be applied to this input. Grid cells hitting it are skipped"""
    pass

class SingleClass(FairfoldError):
    def __init__(self, counts=None):
        super().__init__(f'Both classes must be present, got class counts {counts}',
                         {'counts': counts})

class MissingColumn(FairfoldError):
    def __init__(self, column, path):
        super().__init__(f'Column {column!r} not found in {path}', {'column': column, 'path': path})

class UnparseableCell(FairfoldError):
    def __init__(self, row, col, value):
        super().__init__(f'Cannot parse {value!r} at data row {row}, column {col!r} as a finite number',
                         {'row': row, 'col': col})

class UnreadableFile(FairfoldError):
    def __init__(self, path, reason):
        super().__init__(f'Cannot read {path} as UTF-8 delimited text: {reason}', {'path': path})

class EmptyAfterPolicy(FairfoldError):
    def __init__(self, policy, reason='no rows left'):
        super().__init__(f'Missing value policy {policy!r} left an unusable dataset: {reason}',
                         {'policy': policy})

class MissingPolicy(object):
    DROP_ROW = 'drop'
    MEAN_IMPUTE = 'mean'

    @classmethod
    def parse(cls, value):
        value = str(value).lower()
        aliases = {'drop': cls.DROP_ROW, 'droprow': cls.DROP_ROW,
                   'mean': cls.MEAN_IMPUTE, 'meanimpute': cls.MEAN_IMPUTE}
        try:
            return aliases[value]
        except KeyError:
            raise ValueError(f'Unknown missing value policy {value!r}, expected drop or mean')

ImbalanceRate = namedtuple('ImbalanceRate', ['value', 'n_minority', 'n_majority'])

DatasetDescription = namedtuple('DatasetDescription',
                                ['name', 'n_cases', 'n_features', 'n_positive', 'n_negative', 'imbalance_rate'])

def _frozen(arr, dtype):
    arr = np.array(arr, dtype=dtype)
    arr.setflags(write=False)
    return arr

class Dataset():
    """
    Immutable feature matrix + binary labels + per-row provenance.

    Row ids are stable across subsetting and concatenation, positions are not.
    Everything that returns a changed dataset returns a new object.
    """

    def __init__(self, features, labels, feature_names=None, positive_label='1', name='dataset',
                 row_ids=None, synthetic=None, parent_a=None, parent_b=None, lam=None, extrapolated=None):
        features = np.asarray(features, dtype=float)
        if features.ndim == 1:
            features = features.reshape(-1, 1)
        n = features.shape[0]
        labels = np.asarray(labels).reshape(-1)
        if len(labels) != n:
            raise ValueError(f'{n} feature rows but {len(labels)} labels')
        if not np.all(np.isin(labels, (0, 1))):
            raise ValueError('Labels must be 0 or 1')

        self.features = _frozen(features, float)
        self.labels = _frozen(labels, int)
        self.feature_names = list(feature_names) if feature_names is not None \
                             else [f'x{j}' for j in range(features.shape[1])]
        if len(self.feature_names) != features.shape[1]:
            raise ValueError('One name per feature column required')
        self.positive_label = str(positive_label)
        self.name = name

        def column(values, default, dtype):
            values = default if values is None else values
            return _frozen(np.broadcast_to(np.asarray(values), (n,)), dtype)

        self.row_ids = column(np.arange(n) if row_ids is None else row_ids, 0, int)
        self.synthetic = column(synthetic, False, bool)
        self.parent_a = column(parent_a, -1, int)
        self.parent_b = column(parent_b, -1, int)
        self.lam = column(lam, 0.0, float)
        self.extrapolated = column(extrapolated, False, bool)

    @property
    def n(self):
        return self.features.shape[0]

    @property
    def d(self):
        return self.features.shape[1]

    def __len__(self):
        return self.n

    def class_counts(self):
        """(n_positive, n_negative)"""
        n_pos = int(self.labels.sum())
        return n_pos, self.n - n_pos

    def minority_label(self):
        """The rarer label; ties go to the positive class"""
        n_pos, n_neg = self.class_counts()
        return 1 if n_pos <= n_neg else 0

    def require_both_classes(self):
        n_pos, n_neg = self.class_counts()
        if n_pos == 0 or n_neg == 0:
            raise SingleClass({'positive': n_pos, 'negative': n_neg})

    def is_all_original(self):
        return not self.synthetic.any()

    def _provenance(self):
        return {
            'row_ids': self.row_ids,
            'synthetic': self.synthetic,
            'parent_a': self.parent_a,
            'parent_b': self.parent_b,
            'lam': self.lam,
            'extrapolated': self.extrapolated
        }

    def _like(self, features, labels, **provenance):
        return Dataset(features, labels,
                       feature_names=self.feature_names,
                       positive_label=self.positive_label,
                       name=self.name, **provenance)

    def subset(self, positions):
        positions = np.asarray(positions, dtype=int)
        provenance = {key: col[positions] for key, col in self._provenance().items()}
        return self._like(self.features[positions], self.labels[positions], **provenance)

    def with_features(self, features):
        """Same rows, same labels and provenance, different feature values"""
        features = np.asarray(features, dtype=float)
        assert features.shape == self.features.shape
        return self._like(features, self.labels, **self._provenance())

    def renamed(self, name):
        return Dataset(self.features, self.labels, feature_names=self.feature_names,
                       positive_label=self.positive_label, name=name, **self._provenance())

    def concat(self, other):
        assert self.d == other.d
        mine, theirs = self._provenance(), other._provenance()
        provenance = {key: np.concatenate([mine[key], theirs[key]]) for key in mine}
        return self._like(np.vstack([self.features, other.features]),
                          np.concatenate([self.labels, other.labels]),
                          **provenance)

    def append_synthetic(self, features, label, parent_a, parent_b, lam, extrapolated=None, first_id=None):
        """
        Append generated rows of one class with Synthetic provenance.

        New rows get consecutive ids from `first_id` (default: above every id
        in this dataset).
        """
        features = np.asarray(features, dtype=float).reshape(-1, self.d)
        count = features.shape[0]
        start = self.next_row_id() if first_id is None else int(first_id)
        synthetic_rows = Dataset(features, np.full(count, label, dtype=int),
                                 feature_names=self.feature_names,
                                 positive_label=self.positive_label,
                                 name=self.name,
                                 row_ids=np.arange(start, start + count),
                                 synthetic=np.full(count, True),
                                 parent_a=parent_a, parent_b=parent_b, lam=lam,
                                 extrapolated=extrapolated)
        return self.concat(synthetic_rows)

    def next_row_id(self):
        return int(self.row_ids.max()) + 1 if self.n else 0

    def positions_of(self, row_ids):
        lookup = {row_id: pos for pos, row_id in enumerate(self.row_ids)}
        return np.array([lookup[row_id] for row_id in np.asarray(row_ids).reshape(-1)], dtype=int)

    def to_frame(self):
        """Features, label and provenance in one table, for audit CSVs"""
        frame = pd.DataFrame(self.features, columns=self.feature_names)
        frame.insert(0, 'row_id', self.row_ids)
        frame['label'] = self.labels
        frame['provenance'] = np.where(self.synthetic, 'synthetic', 'original')
        frame['parent_a'] = self.parent_a
        frame['parent_b'] = self.parent_b
        frame['lambda'] = self.lam
        frame['extrapolated'] = self.extrapolated
        return frame

    def __repr__(self):
        n_pos, n_neg = self.class_counts()
        return f'Dataset({self.name!r}, n={self.n}, d={self.d}, positive={n_pos}, negative={n_neg})'

def _parse_feature_column(raw, column, missing_markers):
    stripped = raw.str.strip()
    missing = stripped.isin(missing_markers).to_numpy()
    parsed = pd.to_numeric(stripped.where(~missing), errors='coerce').to_numpy(dtype=float)
    bad = ~missing & ~np.isfinite(parsed)
    if bad.any():
        row = int(np.flatnonzero(bad)[0])
        raise UnparseableCell(row, column, raw.iloc[row])
    return parsed, missing

def load_csv(path, label_column, positive_value, missing_policy=MissingPolicy.DROP_ROW,
             missing_markers=('',), name=None):
    """
    Read a delimited text file with a header row into a Dataset.

    Every non-label column must be numeric. Cells equal to one of
    `missing_markers` (after stripping whitespace) are missing and handled
    by `missing_policy`. Rows keep their file order.
    """
    missing_policy = MissingPolicy.parse(missing_policy)
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding='utf-8')
    except (UnicodeDecodeError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise UnreadableFile(str(path), e)
    frame.columns = [str(c).strip() for c in frame.columns]

    if label_column not in frame.columns:
        raise MissingColumn(label_column, str(path))

    feature_names = [c for c in frame.columns if c != label_column]
    columns, missing = [], []
    for column in feature_names:
        values, is_missing = _parse_feature_column(frame[column], column, missing_markers)
        columns.append(values)
        missing.append(is_missing)

    n_rows = len(frame)
    features = np.column_stack(columns) if columns else np.zeros((n_rows, 0))
    missing = np.column_stack(missing) if missing else np.zeros((n_rows, 0), dtype=bool)

    raw_labels = frame[label_column].str.strip()
    label_missing = raw_labels.isin(missing_markers).to_numpy()
    labels = (raw_labels == str(positive_value).strip()).to_numpy().astype(int)

    keep = ~label_missing
    if label_missing.any():
        logger.warning(f'{path}: dropping {int(label_missing.sum())} rows without a label')

    if missing_policy == MissingPolicy.DROP_ROW:
        incomplete = missing.any(axis=1)
        if incomplete.any():
            logger.info(f'{path}: dropping {int((incomplete & keep).sum())} incomplete rows')
        keep &= ~incomplete
        features, labels = features[keep], labels[keep]
    else:
        features, labels, missing = features[keep], labels[keep], missing[keep]
        for j, column in enumerate(feature_names):
            observed = features[~missing[:, j], j]
            if missing[:, j].any():
                if len(observed) == 0:
                    raise EmptyAfterPolicy(missing_policy, f'column {column!r} has no values to impute from')
                features[missing[:, j], j] = observed.mean()

    if len(labels) == 0:
        raise EmptyAfterPolicy(missing_policy)

    dataset = Dataset(features, labels,
                      feature_names=feature_names,
                      positive_label=positive_value,
                      name=name or _stem(path))
    dataset.require_both_classes()

    n_pos, n_neg = dataset.class_counts()
    if n_pos > n_neg:
        logger.warning(f'{dataset.name}: positive class {positive_value!r} is the majority ({n_pos} vs {n_neg})')
    return dataset

def _stem(path):
    return os.path.splitext(os.path.basename(str(path)))[0]

def imbalance_rate(d):
    """Minority count divided by majority count"""
    d.require_both_classes()
    n_pos, n_neg = d.class_counts()
    n_minority, n_majority = min(n_pos, n_neg), max(n_pos, n_neg)
    return ImbalanceRate(n_minority / n_majority, n_minority, n_majority)

def describe_dataset(d):
    n_pos, n_neg = d.class_counts()
    return DatasetDescription(d.name, d.n, d.d, n_pos, n_neg, imbalance_rate(d).value)
