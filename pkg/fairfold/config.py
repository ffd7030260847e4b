"""
Experiment configuration.

Sources, later ones winning: defaults, the FAIRFOLD_SEED environment
variable (seed only), a config file, command line flags. A config file is
either YAML (`.yml`, `.yaml`) or `key=value` lines.
"""

from collections import namedtuple
import logging
import os

import yaml
from importlib_metadata import PackageNotFoundError, version

from fairfold.classifiers import CLASSIFIERS, UnknownClassifier, canonical_classifier
from fairfold.data import FairfoldError, MissingPolicy
from fairfold.protocols import DEFAULT_K, Protocol
from fairfold.resamplers import RESAMPLERS, UnknownResampler, canonical_resampler
from fairfold.rng import DEFAULT_SEED, UINT64_MASK
from fairfold.utils import calc_hash, normalize_key, parse_key_value_lines, split_csv_list, update_keys

logger = logging.getLogger(__name__)

SEED_ENV_VAR = 'FAIRFOLD_SEED'

class UnknownFlag(FairfoldError):
    def __init__(self, key):
        super().__init__(f'Unknown configuration key {key!r}', {'key': key})

class InvalidValue(FairfoldError):
    def __init__(self, key, value, reason=''):
        message = f'Invalid value {value!r} for {key!r}'
        if reason:
            message += f': {reason}'
        super().__init__(message, {'key': key, 'value': value})
        self.key = key

class MissingDataset(FairfoldError):
    def __init__(self):
        super().__init__('Nothing to evaluate: give at least one --data file or --leak-probe')

DatasetSource = namedtuple('DatasetSource', ['path', 'label_column', 'positive_value', 'missing_policy'])

LeakProbe = namedtuple('LeakProbe', ['n_majority', 'n_minority', 'd'])

ExperimentConfig = namedtuple('ExperimentConfig', [
    'datasets', 'leak_probe', 'resamplers', 'classifiers', 'k', 'seed', 'protocols',
    'standardize', 'tree_splitter', 'out_dir', 'log_level', 'roc'
])

DEFAULTS = {
    'data': [],
    'label_column': 'label',
    'positive_value': '1',
    'missing_policy': MissingPolicy.DROP_ROW,
    'leak_probe': None,
    'resamplers': list(RESAMPLERS),
    'classifiers': list(CLASSIFIERS),
    'k': DEFAULT_K,
    'seed': DEFAULT_SEED,
    'protocols': 'both',
    'standardize': True,
    'tree_splitter': 'best',
    'out_dir': 'fairfold_out',
    'log_level': 'INFO',
    'roc': True,
    'fairfold_version': None
}

# flag spellings accepted next to the canonical keys
ALIASES = {
    'label_col': 'label_column',
    'positive': 'positive_value',
    'missing': 'missing_policy',
    'out': 'out_dir',
    'no_standardize': 'standardize',
    'no_roc': 'roc'
}

def canonical_key(key):
    key = normalize_key(str(key))
    key = ALIASES.get(key, key)
    if key not in DEFAULTS:
        raise UnknownFlag(key)
    return key

def read_config_file(path):
    """Raw settings of a YAML or key=value file, keys with dashes turned to underscores"""
    with open(path, 'r', encoding='utf-8') as f:
        if str(path).endswith(('.yml', '.yaml')):
            raw = yaml.safe_load(f) or {}
            if not isinstance(raw, dict):
                raise InvalidValue('config', str(path), 'expected a mapping at the top level')
            raw = update_keys(raw, lambda key: normalize_key(str(key)))
        else:
            try:
                raw = parse_key_value_lines(f.readlines())
            except ValueError as e:
                raise InvalidValue('config', str(path), str(e))
    return raw

def _negated(settings):
    """`no_standardize: true` means `standardize: false`"""
    return {canonical_key(key): (not _as_bool(key, value) if normalize_key(str(key)).startswith('no_') else value)
            for key, value in settings.items()}

def _as_bool(key, value):
    if isinstance(value, bool):
        return value
    if str(value).lower() in ('true', 'yes', '1', 'on'):
        return True
    if str(value).lower() in ('false', 'no', '0', 'off'):
        return False
    raise InvalidValue(key, value, 'expected true or false')

def _as_int(key, value, minimum=None, maximum=None):
    if isinstance(value, bool):
        raise InvalidValue(key, value, 'expected an integer')
    try:
        number = value if isinstance(value, int) else int(str(value).strip())
    except ValueError:
        raise InvalidValue(key, value, 'expected an integer')
    if minimum is not None and number < minimum:
        raise InvalidValue(key, value, f'must be at least {minimum}')
    if maximum is not None and number > maximum:
        raise InvalidValue(key, value, f'must be at most {maximum}')
    return number

def _as_protocols(value):
    value = str(value).lower()
    choices = {
        'both': (Protocol.EFIDL, Protocol.TRADITIONAL),
        Protocol.EFIDL: (Protocol.EFIDL,),
        'eflad': (Protocol.EFIDL,),
        Protocol.TRADITIONAL: (Protocol.TRADITIONAL,),
        'tra': (Protocol.TRADITIONAL,)
    }
    try:
        return choices[value]
    except KeyError:
        raise InvalidValue('protocols', value, 'expected efidl, traditional or both')

def parse_leak_probe(value):
    if value is None:
        return None
    parts = split_csv_list(value)
    if len(parts) != 3:
        raise InvalidValue('leak_probe', value, 'expected N_MAJ,N_MIN,D')
    return LeakProbe(*[_as_int('leak_probe', part, minimum=0) for part in parts])

def _as_resamplers(value):
    try:
        resamplers = [canonical_resampler(name) for name in split_csv_list(value)]
    except UnknownResampler as e:
        raise InvalidValue('resamplers', value, str(e))
    # the no-resampling baseline is always part of the grid
    resamplers = ['None'] + [r for r in resamplers if r != 'None']
    return tuple(dict.fromkeys(resamplers))

def _as_classifiers(value):
    try:
        classifiers = [canonical_classifier(name) for name in split_csv_list(value)]
    except UnknownClassifier as e:
        raise InvalidValue('classifiers', value, str(e))
    if not classifiers:
        raise InvalidValue('classifiers', value, 'at least one classifier is required')
    return tuple(dict.fromkeys(classifiers))

def _as_datasets(settings):
    entries = settings['data']
    if entries is None:
        entries = []
    if not isinstance(entries, (list, tuple)):
        entries = [entries]

    try:
        default_policy = MissingPolicy.parse(settings['missing_policy'])
    except ValueError as e:
        raise InvalidValue('missing_policy', settings['missing_policy'], str(e))

    sources = []
    for entry in entries:
        if isinstance(entry, dict):
            entry = update_keys(entry, lambda key: normalize_key(str(key)))
            unknown = set(entry) - {'path', 'label_column', 'label_col', 'positive_value', 'positive',
                                    'missing_policy', 'missing'}
            if unknown:
                raise UnknownFlag(sorted(unknown)[0])
            if 'path' not in entry:
                raise InvalidValue('data', entry, 'dataset entries need a path')
            label_column = entry.get('label_column', entry.get('label_col', settings['label_column']))
            positive_value = entry.get('positive_value', entry.get('positive', settings['positive_value']))
            try:
                policy = MissingPolicy.parse(entry.get('missing_policy', entry.get('missing', default_policy)))
            except ValueError as e:
                raise InvalidValue('missing_policy', entry, str(e))
            sources.append(DatasetSource(str(entry['path']), str(label_column), str(positive_value), policy))
        else:
            for path in split_csv_list(entry):
                sources.append(DatasetSource(path, str(settings['label_column']),
                                             str(settings['positive_value']), default_policy))
    return tuple(sources)

def _check_version(required):
    if required is None:
        return
    try:
        installed = version('fairfold')
    except PackageNotFoundError:
        logger.warning('fairfold is not installed as a package, cannot check fairfold-version')
        return
    if not installed.startswith(str(required)):
        raise InvalidValue('fairfold_version', required, f'this is fairfold {installed}')

def seed_from_environment(environ=None):
    environ = os.environ if environ is None else environ
    if environ.get(SEED_ENV_VAR):
        return {'seed': _as_int(SEED_ENV_VAR, environ[SEED_ENV_VAR], minimum=0, maximum=UINT64_MASK)}
    return {}

def parse_config(flags=None, config_file=None, environ=None):
    """
    Merge all configuration sources into a validated ExperimentConfig.

    `flags` maps flag names to values; None values count as not given.
    """
    settings = dict(DEFAULTS)
    settings.update(seed_from_environment(environ))
    if config_file:
        settings.update(_negated(read_config_file(config_file)))
    if flags:
        settings.update(_negated({key: value for key, value in flags.items() if value is not None}))

    _check_version(settings['fairfold_version'])

    level = str(settings['log_level']).upper()
    if level not in ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'):
        raise InvalidValue('log_level', settings['log_level'])

    tree_splitter = str(settings['tree_splitter']).lower()
    if tree_splitter not in ('best', 'random'):
        raise InvalidValue('tree_splitter', settings['tree_splitter'], 'expected best or random')

    out_dir = settings['out_dir']
    if not out_dir:
        raise InvalidValue('out_dir', out_dir, 'an output directory is required')

    config = ExperimentConfig(
        datasets=_as_datasets(settings),
        leak_probe=parse_leak_probe(settings['leak_probe']),
        resamplers=_as_resamplers(settings['resamplers']),
        classifiers=_as_classifiers(settings['classifiers']),
        k=_as_int('k', settings['k'], minimum=2),
        seed=_as_int('seed', settings['seed'], minimum=0, maximum=UINT64_MASK),
        protocols=_as_protocols(settings['protocols']),
        standardize=_as_bool('standardize', settings['standardize']),
        tree_splitter=tree_splitter,
        out_dir=str(out_dir),
        log_level=level,
        roc=_as_bool('roc', settings['roc'])
    )

    if not config.datasets and config.leak_probe is None:
        raise MissingDataset()
    return config

def config_to_dict(config):
    result = dict(config._asdict())
    result['datasets'] = [dict(source._asdict()) for source in config.datasets]
    result['leak_probe'] = None if config.leak_probe is None else list(config.leak_probe)
    result['resamplers'] = list(config.resamplers)
    result['classifiers'] = list(config.classifiers)
    result['protocols'] = list(config.protocols)
    return result

def config_hash(config):
    """Hash of everything that influences results"""
    settings = config_to_dict(config)
    for key in ('out_dir', 'log_level', 'roc'):
        del settings[key]
    return calc_hash(yaml.safe_dump(settings, sort_keys=True))
