"""Configs, topology generators, seeded batches and the command line."""

from .batch import CSV_COLUMNS, MetricsRecord, records_csv, run_batch, run_one, run_seeds, write_csv
from .config import ConfigError, ExperimentConfig, config_from_dict, load_config
from .topologies import (
    RotatingPath,
    SpanningTreeReshuffler,
    StaticWrapper,
    generate_topology,
    make_provider,
)

__all__ = [
    "CSV_COLUMNS",
    "ConfigError",
    "ExperimentConfig",
    "MetricsRecord",
    "RotatingPath",
    "SpanningTreeReshuffler",
    "StaticWrapper",
    "config_from_dict",
    "generate_topology",
    "load_config",
    "make_provider",
    "records_csv",
    "run_batch",
    "run_one",
    "run_seeds",
    "write_csv",
]
