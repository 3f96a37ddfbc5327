"""
Settings loader

Reads config/solver.yml (or the file named by DIRAC1D_CONFIG), validates it
against config/solver.schema.json and exposes the result as frozen dataclasses.
DIRAC1D_TOL overrides spectral.refine_tol.
"""

import os
import json
import logging
from dataclasses import dataclass, replace
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
import jsonschema

from dirac1d.errors import ConfigError

logger = logging.getLogger(__name__)

REPO_ROOT = Path(__file__).resolve().parent.parent
CONFIG_DIR = REPO_ROOT / 'config'
DATA_DIR = REPO_ROOT / 'data'
DEFAULT_CONFIG = CONFIG_DIR / 'solver.yml'
SCHEMA_FILE = CONFIG_DIR / 'solver.schema.json'
TABLE1_FILE = DATA_DIR / 'table1.yml'

ENV_CONFIG = 'DIRAC1D_CONFIG'
ENV_TOL = 'DIRAC1D_TOL'


@dataclass(frozen=True)
class SeriesConfig:
    """Truncation policy for the Kummer series"""

    rel_tol: float = 1e-16
    max_terms: int = 500
    series_window: float = 3.0
    z_max: float = 18.0

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError(f"rel_tol must be positive, got {self.rel_tol}")
        if self.max_terms < 50:
            raise ValueError(f"max_terms must be at least 50, got {self.max_terms}")
        if not 0 < self.series_window <= self.z_max:
            raise ValueError(
                f"series_window must lie in (0, z_max], got {self.series_window}"
            )


@dataclass(frozen=True)
class SpectralSettings:
    scan_step: float = 0.05
    min_step: float = 0.01
    refine_tol: float = 1e-12
    max_iterations: int = 200
    residual_tol: float = 1e-8
    nudge_factor: float = 1e-3
    table_tol: float = 5e-6


@dataclass(frozen=True)
class WavefunctionSettings:
    n_points: int = 2001
    tail_factor: float = 8.0
    tail_tol: float = 1e-10
    norm_tol: float = 1e-6


@dataclass(frozen=True)
class OracleSettings:
    step: float = 1e-3
    window: float = 12.0
    scan_step: float = 0.02
    bisect_tol: float = 1e-8
    mismatch_tol: float = 1e-5
    agreement_tol: float = 1e-5


@dataclass(frozen=True)
class OutputSettings:
    digits: int = 9


@dataclass(frozen=True)
class Settings:
    series: SeriesConfig
    spectral: SpectralSettings
    wavefunction: WavefunctionSettings
    oracle: OracleSettings
    output: OutputSettings


def _read_yaml(path: Path) -> Dict[str, Any]:
    try:
        with open(path, 'r') as f:
            document = yaml.safe_load(f)
    except FileNotFoundError:
        raise ConfigError(f"Settings file not found: {path}")
    except yaml.YAMLError as e:
        raise ConfigError(f"Settings file {path} is not valid YAML: {e}")

    if not isinstance(document, dict):
        raise ConfigError(f"Settings file {path} must contain a mapping")
    return document


def _validate(document: Dict[str, Any], path: Path):
    with open(SCHEMA_FILE, 'r') as f:
        schema = json.load(f)

    try:
        jsonschema.validate(instance=document, schema=schema)
    except jsonschema.ValidationError as e:
        key_path = '.'.join(str(p) for p in e.absolute_path) or '<root>'
        raise ConfigError(f"{path}: {key_path}: {e.message}")


def _env_tolerance() -> Optional[float]:
    raw = os.environ.get(ENV_TOL)
    if raw is None or raw.strip() == '':
        return None
    try:
        tol = float(raw)
    except ValueError:
        raise ConfigError(f"{ENV_TOL}={raw!r} is not a number")
    if not tol > 0:
        raise ConfigError(f"{ENV_TOL} must be positive, got {tol}")
    return tol


def load_settings(path: Optional[str] = None) -> Settings:
    """
    Load and validate solver settings

    Args:
        path: YAML file to read; defaults to $DIRAC1D_CONFIG, then config/solver.yml

    Returns:
        Settings with the DIRAC1D_TOL override applied
    """

    if path is None:
        path = os.environ.get(ENV_CONFIG) or DEFAULT_CONFIG
    path = Path(path)

    document = _read_yaml(path)
    _validate(document, path)

    try:
        settings = Settings(
            series=SeriesConfig(**document['series']),
            spectral=SpectralSettings(**document['spectral']),
            wavefunction=WavefunctionSettings(**document['wavefunction']),
            oracle=OracleSettings(**document['oracle']),
            output=OutputSettings(**document['output']),
        )
    except ValueError as e:
        raise ConfigError(f"{path}: {e}")

    tol = _env_tolerance()
    if tol is not None:
        logger.info(f"{ENV_TOL} overrides refine_tol: {tol:g}")
        settings = replace(settings, spectral=replace(settings.spectral, refine_tol=tol))

    logger.debug(f"Loaded settings from {path}")
    return settings


@lru_cache(maxsize=1)
def default_settings() -> Settings:
    """Packaged settings, read once per process"""
    return load_settings()


def load_reference_table(path: Optional[str] = None) -> Dict[float, list]:
    """
    Load the published nu_0..nu_4 values keyed by alpha

    Returns:
        {alpha: [nu_0, ..., nu_4]}
    """

    path = Path(path) if path else TABLE1_FILE
    document = _read_yaml(path)

    table = {}
    for column in document.get('columns', []):
        table[float(column['alpha'])] = [float(v) for v in column['nu']]

    if not table:
        raise ConfigError(f"No columns found in reference table {path}")
    return table
