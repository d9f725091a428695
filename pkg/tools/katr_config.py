#!/usr/bin/env python3
"""
Configuration for the route engine tools
Class-level defaults, overridden by config/katr.yml, overridden by command-line flags
"""

import logging
import os
from pathlib import Path

import yaml

logger = logging.getLogger(__name__)

# Setup paths
TOOLS_DIR = Path(__file__).parent
PROJECT_DIR = TOOLS_DIR.parent
CONFIG_PATH = PROJECT_DIR / "config" / "katr.yml"
DATA_DIR = PROJECT_DIR / "data"


class KatrConfig:
    # Preprocessing
    PARTITION_SIZE = 64
    SEED = 42
    INDEX_PATH = str(DATA_DIR / "katr_index.db")
    INDEX_WORKERS = 4

    # Query limits
    MAX_KEYWORDS = 8
    ORACLE_GUARD = 10 ** 7
    TIMEOUT_S = 10.0
    SLOW_QUERY_S = 1.0

    # Synthetic network defaults (comparable to a small city network)
    SYNTH_VERTICES = 5000
    SYNTH_AVG_DEGREE = 3.0
    SYNTH_KEYWORDS = 20
    SYNTH_POIS_PER_KEYWORD = 10
    SYNTH_RATING_DIST = "uniform"

    # Benchmark workload
    BENCH_QUERIES = 100
    BENCH_M = [2, 3]
    BENCH_K = [1, 2, 4]
    BENCH_ALPHA = [0.2, 0.5, 0.8]
    BENCH_WORKERS = 4
    BENCH_POI_FRACTION = 1.0

    # Tool service
    BIND = "127.0.0.1"
    PORT = 8350

    # Memory monitoring
    MEMORY_WARNING_THRESHOLD_MB = 500
    MEMORY_CRITICAL_THRESHOLD_MB = 1000

    ENV_OVERRIDES = {
        "KATR_BIND": ("BIND", str),
        "KATR_PORT": ("PORT", int),
        "KATR_INDEX_PATH": ("INDEX_PATH", str),
        "KATR_TIMEOUT_S": ("TIMEOUT_S", float),
    }

    def __init__(self, overrides=None):
        for key, value in (overrides or {}).items():
            self.set(key, value)

    def set(self, key, value):
        attr = key.upper()
        if not hasattr(type(self), attr) or attr == "ENV_OVERRIDES":
            logger.warning(f"Ignoring unknown config key '{key}'")
            return
        setattr(self, attr, value)

    def apply_env(self, environ=None):
        """Apply KATR_* environment variables on top of file values"""
        environ = os.environ if environ is None else environ
        for var, (attr, cast) in self.ENV_OVERRIDES.items():
            if var in environ:
                setattr(self, attr, cast(environ[var]))
        return self

    def as_dict(self):
        return {
            name: getattr(self, name)
            for name in dir(type(self))
            if name.isupper() and name != "ENV_OVERRIDES"
        }


def _flatten(section, prefix=""):
    flat = {}
    for key, value in section.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, f"{name}_"))
        else:
            flat[name] = value
    return flat


def load_config(path=None):
    """Load KatrConfig from a YAML file; missing file means defaults"""
    path = Path(path or os.environ.get("KATR_CONFIG", CONFIG_PATH))
    config = KatrConfig()
    if not path.exists():
        logger.debug(f"No config file at {path}, using defaults")
        return config

    with open(path) as f:
        data = yaml.safe_load(f) or {}
    if not isinstance(data, dict):
        logger.warning(f"Config file {path} is not a mapping, using defaults")
        return config

    for key, value in _flatten(data).items():
        config.set(key, value)
    logger.debug(f"Loaded config from {path}")
    return config


def apply_cli_overrides(config, args, names):
    """Copy non-None argparse values onto the config (flags win over the file)"""
    for name in names:
        value = getattr(args, name, None)
        if value is not None:
            config.set(name, value)
    return config
