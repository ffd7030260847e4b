"""
Storage of evaluated cells and the comparison tables built from them.
"""

from collections import namedtuple

import numpy as np
import pandas as pd

from fairfold.metrics import ScoredPredictions, roc_curve
from fairfold.protocols import Protocol, percent_diff
from fairfold.resamplers import RESAMPLERS, display_name

import logging
logger = logging.getLogger(__name__)

PROTOCOL_LABELS = {Protocol.EFIDL: 'EFIDL', Protocol.TRADITIONAL: 'TRA'}

LONG_COLUMNS = ['dataset', 'resampler', 'classifier', 'protocol', 'fold', 'auc', 'f1']
LONG_DTYPES = [object, object, object, object, int, float, float]

ComparisonRow = namedtuple('ComparisonRow', ['dataset', 'resampler', 'classifier', 'before_auc',
                                             'efidl_auc', 'traditional_auc',
                                             'pct_diff_efidl', 'pct_diff_traditional'])

BestCell = namedtuple('BestCell', ['dataset', 'classifier', 'resampler', 'auc'])

def make_dataframe(columns, dtypes):
    assert len(columns) == len(dtypes)
    return pd.DataFrame({c: pd.Series(dtype=d) for c, d in zip(columns, dtypes)})

def _safe_diff(aug, before):
    if np.isnan(aug) or np.isnan(before):
        return float('nan')
    return percent_diff(aug, before)

class EvaluationReport():
    """
    Append-only store of CellResults.

    The no-resampling cell of a (dataset, classifier) is stored once under
    protocol `bef` and answers for both protocols. Everything that lists
    cells does it in the order the axes were given.
    """

    def __init__(self, datasets, resamplers, classifiers, protocols):
        self.datasets = list(datasets)
        self.resamplers = list(resamplers)
        self.classifiers = list(classifiers)
        self.protocols = list(protocols)
        self.cells = {}
        self.descriptions = []
        self.records = []

    def add_description(self, description):
        self.descriptions.append(description)

    def commit(self, cell):
        if cell.coordinates in self.cells:
            logger.warning(f'Cell {cell.coordinates} committed twice, keeping the latest')
        self.cells[cell.coordinates] = cell
        for fold, (auc, f1) in enumerate(zip(cell.fold_aucs, cell.fold_f1s)):
            self.records.append({
                'dataset': cell.dataset,
                'resampler': cell.resampler,
                'classifier': cell.classifier,
                'protocol': cell.protocol,
                'fold': fold,
                'auc': auc,
                'f1': f1
            })

    def cell(self, dataset, resampler, classifier, protocol):
        if resampler == 'None':
            protocol = Protocol.BEF
        return self.cells[(dataset, resampler, classifier, protocol)]

    def __len__(self):
        return len(self.cells)

    def report_cells(self):
        """Every (dataset, resampler, classifier, protocol) of the grid, BEF repeated per protocol"""
        for dataset in self.datasets:
            for resampler in self.resamplers:
                for classifier in self.classifiers:
                    for protocol in self.protocols:
                        yield (dataset, resampler, classifier, protocol), \
                              self.cell(dataset, resampler, classifier, protocol)

    def computed_cells(self):
        return list(self.cells.values())

    def skipped_cells(self):
        return [cell for cell in self.cells.values() if cell.is_skipped]

    def mean_auc(self, dataset, resampler, classifier, protocol):
        return self.cell(dataset, resampler, classifier, protocol).mean_auc

    @property
    def data_frame(self):
        if not self.records:
            return make_dataframe(LONG_COLUMNS, LONG_DTYPES)
        return pd.DataFrame(self.records, columns=LONG_COLUMNS)

    def long_frame(self):
        return self.data_frame

    def comparison_rows(self, dataset):
        rows = []
        for resampler in self.resamplers:
            if resampler == 'None':
                continue
            for classifier in self.classifiers:
                before = self.mean_auc(dataset, 'None', classifier, Protocol.BEF)
                aucs = {protocol: self.mean_auc(dataset, resampler, classifier, protocol)
                        if protocol in self.protocols else float('nan')
                        for protocol in (Protocol.EFIDL, Protocol.TRADITIONAL)}
                rows.append(ComparisonRow(dataset, resampler, classifier, before,
                                          aucs[Protocol.EFIDL], aucs[Protocol.TRADITIONAL],
                                          _safe_diff(aucs[Protocol.EFIDL], before),
                                          _safe_diff(aucs[Protocol.TRADITIONAL], before)))
        return rows

    def wide_frame(self):
        """
        One block per dataset, one group of rows per resampler in table order.

        BEF has a row per protocol, every other resampler also gets a
        percent difference row per protocol. `Avg` ignores skipped cells.
        """
        rows = []
        table_order = [r for r in RESAMPLERS if r in self.resamplers]

        for dataset in self.datasets:
            for resampler in table_order:
                for protocol in self.protocols:
                    values = [self.mean_auc(dataset, resampler, c, protocol) for c in self.classifiers]
                    rows.append([dataset, display_name(resampler), PROTOCOL_LABELS[protocol]] + values)

                if resampler == 'None':
                    continue
                for protocol in self.protocols:
                    values = [_safe_diff(self.mean_auc(dataset, resampler, c, protocol),
                                         self.mean_auc(dataset, 'None', c, Protocol.BEF))
                              for c in self.classifiers]
                    rows.append([dataset, display_name(resampler), f'% diff ({PROTOCOL_LABELS[protocol]})'] + values)

        frame = pd.DataFrame(rows, columns=['dataset', 'method', 'row'] + self.classifiers)
        frame['Avg'] = frame[self.classifiers].astype(float).mean(axis=1, skipna=True)
        return frame

    def cells_frame(self):
        """Mean AUC and F1 of every grid cell"""
        rows = []
        for (dataset, resampler, classifier, protocol), cell in self.report_cells():
            rows.append({
                'dataset': dataset,
                'resampler': display_name(resampler),
                'classifier': classifier,
                'protocol': PROTOCOL_LABELS[protocol],
                'mean_auc': cell.mean_auc,
                'mean_f1': cell.mean_f1,
                'synthetic_scored': cell.n_synthetic_scored,
                'skipped': cell.skipped or ''
            })
        return pd.DataFrame(rows, columns=['dataset', 'resampler', 'classifier', 'protocol',
                                           'mean_auc', 'mean_f1', 'synthetic_scored', 'skipped'])

    def improvements_frame(self):
        """How many classifiers a resampler helped on each dataset, per protocol"""
        rows = []
        for dataset in self.datasets:
            for resampler in self.resamplers:
                if resampler == 'None':
                    continue
                for protocol in self.protocols:
                    compared = improved = 0
                    for classifier in self.classifiers:
                        aug = self.mean_auc(dataset, resampler, classifier, protocol)
                        before = self.mean_auc(dataset, 'None', classifier, Protocol.BEF)
                        if np.isnan(aug) or np.isnan(before):
                            continue
                        compared += 1
                        improved += int(aug > before)
                    rows.append({'dataset': dataset, 'resampler': resampler,
                                 'protocol': PROTOCOL_LABELS[protocol],
                                 'improved': improved, 'compared': compared})
        return pd.DataFrame(rows, columns=['dataset', 'resampler', 'protocol', 'improved', 'compared'])

    def datasets_frame(self):
        return pd.DataFrame([d._asdict() for d in self.descriptions],
                            columns=['name', 'n_cases', 'n_features', 'n_positive', 'n_negative',
                                     'imbalance_rate'])

    def best_frame(self, protocol=Protocol.EFIDL):
        best = best_cells(self, protocol)
        return pd.DataFrame([{'dataset': b.dataset, 'best_model': b.classifier,
                              'sampling_method': display_name(b.resampler), 'best_auc': b.auc}
                             for b in best],
                            columns=['dataset', 'best_model', 'sampling_method', 'best_auc'])

    def to_string(self):
        return '\t' + self.cells_frame().to_string().replace('\n', '\n\t')

def best_cells(report, protocol=Protocol.EFIDL):
    """
    Highest mean AUC per dataset under one protocol, BEF included.

    Ties go to the earlier classifier, then the earlier resampler.
    """
    best = []
    for dataset in report.datasets:
        winner = None
        for classifier in report.classifiers:
            for resampler in report.resamplers:
                value = report.mean_auc(dataset, resampler, classifier, protocol)
                if np.isnan(value):
                    continue
                if winner is None or value > winner.auc:
                    winner = BestCell(dataset, classifier, resampler, value)
        if winner is not None:
            best.append(winner)
    return best

def cell_roc_frame(cell):
    """Per-fold ROC curves of a cell in one table"""
    frames = []
    for predictions in cell.predictions:
        frame = roc_curve(predictions).to_frame()
        frame.insert(0, 'fold', predictions.fold)
        frames.append(frame)
    return pd.concat(frames, ignore_index=True)

def pooled_roc(cell):
    """ROC of all out-of-fold predictions of a cell taken together"""
    return roc_curve(ScoredPredictions.pool(cell.predictions))
