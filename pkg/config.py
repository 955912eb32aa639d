"""
Configuration: environment defaults plus the JSON run configuration.
"""
import os
import json
import hashlib
import logging
from dataclasses import dataclass, field, asdict, replace
from pathlib import Path

from errors import ConfigError

logger = logging.getLogger(__name__)

# Environment defaults
LOG_FILE = os.environ.get('COLLAR_LOG_FILE', '')
LOG_LEVEL = os.environ.get('COLLAR_LOG_LEVEL', 'INFO')
WORKERS = int(os.environ.get('COLLAR_WORKERS', '1'))
OUT_DIR = os.environ.get('COLLAR_OUT_DIR', 'out')
ELEMENT_BUDGET = int(os.environ.get('COLLAR_ELEMENT_BUDGET', '400000'))
MAX_WORD_LENGTH = int(os.environ.get('COLLAR_MAX_WORD_LENGTH', '10'))
COVERING_RADIUS = float(os.environ.get('COLLAR_COVERING_RADIUS', '3.0'))
ORACLE_CUTOFF = float(os.environ.get('COLLAR_ORACLE_CUTOFF', '8.0'))
ORACLE_WORD_LENGTH = int(os.environ.get('COLLAR_ORACLE_WORD_LENGTH', '6'))

SCHEMA = 'collar-interaction/1'


@dataclass(frozen=True)
class SearchSettings:
    covering_radius: float = COVERING_RADIUS
    max_word_length: int = MAX_WORD_LENGTH
    element_budget: int = ELEMENT_BUDGET
    tolerance: float = 1e-6
    oracle_cutoff: float = ORACLE_CUTOFF
    oracle_word_length: int = ORACLE_WORD_LENGTH
    max_pairs: int = 50_000
    workers: int = WORKERS


@dataclass(frozen=True)
class ExperimentSettings:
    epsilons: tuple = (0.5, 0.2, 0.1, 0.05, 0.02)
    r_values: tuple = (0.1, 0.03, 0.01, 0.003, 0.001)
    loop_lengths: tuple = (2.0, 2.0)
    companion_slack: float = 10.0
    audit_slack: float = 10.0
    cutoff_slack: float = 10.0
    max_cutoff: float = 0.0  # 0 means the cutoff rule is not capped
    properness_bound: float = 12.0
    horocycle_norm: float = 2.0
    companion_word_length: int = 6


@dataclass(frozen=True)
class RunConfig:
    surface: dict = None
    cutoff: float = None
    search: SearchSettings = field(default_factory=SearchSettings)
    experiment: ExperimentSettings = field(default_factory=ExperimentSettings)
    out_dir: str = OUT_DIR
    oracle: bool = False
    pair: tuple = None
    cuff: str = None
    name: str = ''

    def to_dict(self):
        return asdict(self)


def _settings(cls, raw, section):
    if raw is None:
        return cls()
    if not isinstance(raw, dict):
        raise ConfigError(f"'{section}' must be an object", section=section)
    known = set(cls.__dataclass_fields__)
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError(f"unknown keys in '{section}': {', '.join(unknown)}", section=section, keys=unknown)
    values = {key: tuple(value) if isinstance(value, list) else value for key, value in raw.items()}
    return cls(**values)


def config_from_dict(raw):
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a JSON object")
    schema = raw.get('schema', SCHEMA)
    if schema != SCHEMA:
        raise ConfigError(f"unsupported schema {schema!r}, expected {SCHEMA!r}", schema=schema)
    try:
        config = RunConfig(
            surface=raw.get('surface'),
            cutoff=raw.get('cutoff'),
            search=_settings(SearchSettings, raw.get('search'), 'search'),
            experiment=_settings(ExperimentSettings, raw.get('experiment'), 'experiment'),
            out_dir=raw.get('out_dir', OUT_DIR),
            oracle=bool(raw.get('oracle', False)),
            pair=tuple(raw['pair']) if raw.get('pair') else None,
            cuff=raw.get('cuff'),
            name=raw.get('name', ''),
        )
    except TypeError as e:
        raise ConfigError(f"invalid configuration: {e}") from e
    validate(config)
    return config


def load_config(path):
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}", path=str(path))
    try:
        with open(path, encoding='utf-8') as f:
            raw = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"config file {path} is not valid JSON: {e}", path=str(path)) from e
    config = config_from_dict(raw)
    logger.debug(f"Loaded config {path} (hash {config_hash(config)})")
    return config


def validate(config):
    search, experiment = config.search, config.experiment
    if config.cutoff is not None and not config.cutoff > 0:
        raise ConfigError(f"cutoff must be positive, got {config.cutoff}", cutoff=config.cutoff)
    for name in ('covering_radius', 'tolerance', 'oracle_cutoff'):
        value = getattr(search, name)
        if not value > 0:
            raise ConfigError(f"search.{name} must be positive, got {value}", key=name)
    if not search.tolerance < 1e-2:
        raise ConfigError(f"search.tolerance must be below 0.01, got {search.tolerance}", key='tolerance')
    for name in ('max_word_length', 'element_budget', 'oracle_word_length', 'max_pairs', 'workers'):
        value = getattr(search, name)
        if not isinstance(value, int) or value < 1:
            raise ConfigError(f"search.{name} must be a positive integer, got {value!r}", key=name)
    eps = list(experiment.epsilons)
    if any(not 0 < e < 1 for e in eps):
        raise ConfigError("epsilon grid values must lie in (0, 1)", epsilons=eps)
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise ConfigError("epsilon grid must be strictly decreasing", epsilons=eps)
    if any(not 0 < r <= 0.5 for r in experiment.r_values):
        raise ConfigError("r values must lie in (0, 1/2]", r_values=list(experiment.r_values))
    for name in ('companion_slack', 'audit_slack', 'cutoff_slack', 'properness_bound', 'horocycle_norm'):
        value = getattr(experiment, name)
        if not value > 0:
            raise ConfigError(f"experiment.{name} must be positive, got {value}", key=name)
    if not isinstance(experiment.companion_word_length, int) or experiment.companion_word_length < 1:
        raise ConfigError("experiment.companion_word_length must be a positive integer", key='companion_word_length')
    if experiment.max_cutoff < 0:
        raise ConfigError("experiment.max_cutoff must be >= 0", key='max_cutoff')
    return config


def apply_overrides(config, cutoff=None, workers=None, out_dir=None, tolerance=None, oracle=None):
    """Layer command-line flags over a loaded configuration."""
    search = config.search
    if workers is not None:
        search = replace(search, workers=workers)
    if tolerance is not None:
        search = replace(search, tolerance=tolerance)
    config = replace(
        config,
        search=search,
        cutoff=cutoff if cutoff is not None else config.cutoff,
        out_dir=out_dir if out_dir is not None else config.out_dir,
        oracle=config.oracle if oracle is None else (config.oracle or oracle),
    )
    return validate(config)


def config_hash(config):
    """Provenance hash; the worker count and output directory do not change results."""
    data = config.to_dict()
    data['search'].pop('workers', None)
    data.pop('out_dir', None)
    canonical = json.dumps(data, sort_keys=True, separators=(',', ':'), default=str)
    return hashlib.sha256(canonical.encode('utf-8')).hexdigest()[:16]
