"""Runs every cell of an experiment and collects them in an EvaluationReport."""

from fairfold.data import InapplicableError, describe_dataset
from fairfold.extensions import load_datasets
from fairfold.protocols import RUNNERS, CellResult, Protocol, run_efidl
from fairfold.report import EvaluationReport
from fairfold.rng import rng_for_cell

import logging
logger = logging.getLogger(__name__)

def _run_cell(config, dataset, resampler, classifier, protocol):
    rng = rng_for_cell(config.seed, dataset.name, resampler, classifier, protocol)
    runner = run_efidl if protocol == Protocol.BEF else RUNNERS[protocol]
    kwargs = {'protocol': Protocol.BEF} if protocol == Protocol.BEF else {}

    try:
        cell = runner(dataset, resampler, classifier, rng, k=config.k,
                      standardize=config.standardize, tree_splitter=config.tree_splitter, **kwargs)
    except InapplicableError as e:
        logger.warning(f'SKIP {dataset.name} {resampler} {classifier} {protocol}: {e}')
        return CellResult.skip(dataset.name, resampler, classifier, protocol, e)

    logger.info(f'CELL {dataset.name} {resampler} {classifier} {protocol}: '
                f'mean AUC {cell.mean_auc:.4f}, mean F1 {cell.mean_f1:.4f}')
    return cell

def run_grid(config, datasets=None):
    """
    Evaluate the Cartesian product of datasets, resamplers, classifiers and protocols.

    The no-resampling cell is computed once per (dataset, classifier)
    and shared by both protocols. Every cell has its own random stream,
    so the result does not depend on the order cells are computed in.
    """
    if datasets is None:
        datasets = load_datasets(config)
    resamplers = ('None',) + tuple(r for r in config.resamplers if r != 'None')

    report = EvaluationReport([d.name for d in datasets], resamplers,
                              config.classifiers, config.protocols)

    for dataset in datasets:
        report.add_description(describe_dataset(dataset))
        for classifier in config.classifiers:
            for resampler in resamplers:
                if resampler == 'None':
                    report.commit(_run_cell(config, dataset, resampler, classifier, Protocol.BEF))
                    continue
                for protocol in config.protocols:
                    report.commit(_run_cell(config, dataset, resampler, classifier, protocol))

    return report
