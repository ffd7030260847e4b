import click
import logging
import os
import sys
import yaml

from importlib_metadata import PackageNotFoundError, version

from fairfold.config import (config_hash, config_to_dict, parse_config, parse_leak_probe,
                             seed_from_environment)
from fairfold.data import FairfoldError
from fairfold.extensions import LEAK_PROBE_ID, generate_leak_probe, leak_probe_frame, load_datasets
from fairfold.grid import run_grid
from fairfold.plots import roc_svg
from fairfold.protocols import Protocol
from fairfold.report import PROTOCOL_LABELS, best_cells, cell_roc_frame, pooled_roc
from fairfold.resamplers import display_name
from fairfold.rng import DEFAULT_SEED, make_rng

logging.basicConfig(format='%(asctime)s %(message)s')
logger = logging.getLogger('fairfold')

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_SKIPPED = 3

FULL_PRECISION = '%.17g'
TABLE_PRECISION = '%.3f'

def installed_version():
    try:
        return version('fairfold')
    except PackageNotFoundError:
        return 'unknown'

class ArtifactWriter():
    """Writes files under out_dir and remembers them, so a failed run can take them back"""

    def __init__(self, out_dir):
        self.out_dir = out_dir
        self.written = []

    def path(self, *parts):
        path = os.path.join(self.out_dir, *parts)
        os.makedirs(os.path.dirname(path), exist_ok=True)
        self.written.append(path)
        return path

    def csv(self, frame, name, float_format=FULL_PRECISION):
        frame.to_csv(self.path(*name.split('/')), index=False, float_format=float_format)

    def text(self, content, name):
        with open(self.path(name), 'w', encoding='utf-8', newline='\n') as f:
            f.write(content)

    def yaml(self, data, name):
        with open(self.path(name), 'w', encoding='utf-8', newline='\n') as f:
            yaml.safe_dump(data, f, sort_keys=True)

    def remove_all(self):
        for path in reversed(self.written):
            try:
                os.remove(path)
            except FileNotFoundError:
                pass
        roc_dir = os.path.join(self.out_dir, 'roc')
        if os.path.isdir(roc_dir) and not os.listdir(roc_dir):
            os.rmdir(roc_dir)
        self.written = []

def write_roc_artifacts(report, writer):
    for cell in report.computed_cells():
        if cell.is_skipped:
            continue
        name = f'{cell.dataset}__{display_name(cell.resampler)}__{cell.classifier}__{cell.protocol}.csv'
        writer.csv(cell_roc_frame(cell), f'roc/{name}')

    for dataset in report.datasets:
        for protocol in report.protocols:
            curves = []
            for resampler in report.resamplers:
                for classifier in report.classifiers:
                    cell = report.cell(dataset, resampler, classifier, protocol)
                    if not cell.is_skipped:
                        curves.append((f'{display_name(resampler)} {classifier}', pooled_roc(cell)))
            if curves:
                title = f'{dataset}, {PROTOCOL_LABELS[protocol]}'
                writer.text(roc_svg(curves, title), f'roc_{dataset}_{protocol}.svg')

def make_summary(config, report):
    skipped = report.skipped_cells()
    return {
        'fairfold-version': installed_version(),
        'experiment': config_hash(config),
        'config': config_to_dict(config),
        'cells': {
            'computed': len(report) - len(skipped),
            'skipped': len(skipped),
            'reported': sum(1 for _ in report.report_cells())
        },
        'skipped': [{'dataset': c.dataset, 'resampler': c.resampler, 'classifier': c.classifier,
                     'protocol': c.protocol, 'reason': c.skipped} for c in skipped],
        'best': [{'dataset': b.dataset, 'classifier': b.classifier,
                  'resampler': display_name(b.resampler), 'auc': float(b.auc)}
                 for b in best_cells(report, Protocol.EFIDL)]
    }

def write_report(config, report, writer):
    writer.csv(report.long_frame(), 'long.csv')
    writer.csv(report.wide_frame(), 'wide.csv', float_format=TABLE_PRECISION)
    writer.csv(report.best_frame(), 'best.csv')
    writer.csv(report.datasets_frame(), 'datasets.csv')
    writer.csv(report.improvements_frame(), 'improvements.csv')
    writer.csv(report.cells_frame(), 'f1.csv')
    if config.roc:
        write_roc_artifacts(report, writer)
    writer.yaml(make_summary(config, report), 'summary.yml')

def main(config):
    """Run an experiment end to end. Returns the process exit code"""
    try:
        os.makedirs(config.out_dir, exist_ok=True)
    except OSError as e:
        logger.error(f'Cannot create output directory {config.out_dir}: {e}')
        return EXIT_FAILURE

    logger.setLevel(config.log_level)
    handler = logging.FileHandler(os.path.join(config.out_dir, 'log.log'))
    logger.addHandler(handler)
    writer = ArtifactWriter(config.out_dir)

    try:
        logger.info('INIT - Reading datasets')
        datasets = load_datasets(config)
        for dataset in datasets:
            logger.info(repr(dataset))

        logger.info('RUN - Evaluating the grid')
        report = run_grid(config, datasets)

        logger.info(f'REPORT - Writing results to {config.out_dir}')
        write_report(config, report, writer)
    except OSError as e:
        logger.error(f'{getattr(e, "filename", None) or config.out_dir}: {e}')
        writer.remove_all()
        return EXIT_FAILURE
    except FairfoldError as e:
        logger.error(f'{type(e).__name__}: {e}')
        writer.remove_all()
        return EXIT_FAILURE
    except Exception as e:
        logger.exception(f'Unexpected {type(e).__name__}, removing partial results: {e}')
        writer.remove_all()
        return EXIT_FAILURE
    finally:
        logger.removeHandler(handler)
        handler.close()

    skipped = report.skipped_cells()
    if skipped:
        for cell in skipped:
            logger.warning(f'Skipped {cell.dataset} {cell.resampler} {cell.classifier} {cell.protocol}: {cell.skipped}')
        return EXIT_SKIPPED
    return EXIT_OK

@click.command()
@click.option('--config', 'config_file', type=click.Path(exists=True, dir_okay=False),
              help='YAML or key=value file with any of the options below')
@click.option('--data', multiple=True, help='CSV file to evaluate, can be repeated')
@click.option('--label-col', help='Name of the label column')
@click.option('--positive', help='Label value of the positive (minority) class')
@click.option('--missing', type=click.Choice(['drop', 'mean']), help='What to do with missing feature values')
@click.option('--resamplers', help='Comma-separated resamplers, the no-resampling baseline is always included')
@click.option('--classifiers', help='Comma-separated classifiers')
@click.option('--k', type=int, help='Number of folds')
@click.option('--seed', type=int, help='Experiment seed')
@click.option('--protocols', type=click.Choice(['efidl', 'traditional', 'both']))
@click.option('--no-standardize', is_flag=True, help='Do not z-score features')
@click.option('--tree-splitter', type=click.Choice(['best', 'random']))
@click.option('--out', help='Output directory')
@click.option('--leak-probe', help='Add a no-signal dataset N_MAJ,N_MIN,D')
@click.option('--log-level', type=click.Choice(['DEBUG', 'INFO', 'WARNING', 'ERROR'], case_sensitive=False))
@click.option('--no-roc', is_flag=True, help='Skip per-cell ROC CSVs and SVG plots')
def run_cmd(config_file, data, no_standardize, no_roc, **flags):
    flags['data'] = list(data) or None
    flags['no_standardize'] = True if no_standardize else None
    flags['no_roc'] = True if no_roc else None

    try:
        config = parse_config(flags, config_file=config_file)
    except (FairfoldError, OSError) as e:
        logger.error(str(e))
        sys.exit(EXIT_FAILURE)

    sys.exit(main(config))

@click.command()
@click.argument('counts', type=str)
@click.option('--seed', type=int, help='Seed, defaults to FAIRFOLD_SEED or the built-in one')
@click.option('--out', required=True, type=click.Path(dir_okay=False), help='CSV file to write')
def probe_cmd(counts, seed, out):
    """Write a leak probe dataset N_MAJ,N_MIN,D as CSV (label column `label`)"""
    try:
        probe = parse_leak_probe(counts)
        if seed is None:
            seed = seed_from_environment().get('seed', DEFAULT_SEED)
        dataset = generate_leak_probe(*probe, rng=make_rng(seed, LEAK_PROBE_ID))
        leak_probe_frame(dataset).to_csv(out, index=False, float_format=FULL_PRECISION)
    except (FairfoldError, OSError) as e:
        logger.error(str(e))
        sys.exit(EXIT_FAILURE)
    click.echo(f'Wrote {dataset!r} to {out}')

if __name__ == '__main__':
    run_cmd()
