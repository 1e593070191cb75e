"""Experiment configuration, read from a JSON document."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Any

from ..bcc import CONSTRUCTIONS

PROTOCOLS = (
    "local_full",
    "local_half",
    "local_multihop",
    "rlnc",
    "rlnc_bcc",
    "estimation",
    "rlnc_after_estimation",
)

# N = n^O(1); larger ID universes are rejected
MAX_ID_EXPONENT = 4


class ConfigError(ValueError):
    """Raised for a malformed config; the message names the offending field."""


@dataclass
class Constants:
    c1: int = 16
    round_multiplier: int = 32
    prefix_bits: int = 16
    fail_bits: int | None = None


@dataclass
class ExperimentConfig:
    protocol: str
    n: int
    topology: dict
    a: int | None = None
    N: int | None = None
    ell: int | None = None
    payload_lengths: list[int] | None = None
    senders: dict = field(default_factory=lambda: {"random": 1})
    seeds: dict = field(default_factory=lambda: {"count": 1, "master": 0})
    constants: Constants = field(default_factory=Constants)
    construction: str = "auto"
    d_bound: int | None = None
    max_rounds: int | None = None
    out: str | None = None
    transcript: str | None = None

    @property
    def id_universe(self) -> int:
        return self.n if self.N is None else self.N

    @property
    def seed_count(self) -> int:
        return int(self.seeds.get("count", 1))

    @property
    def master_seed(self) -> int:
        return int(self.seeds.get("master", 0))

    def to_dict(self) -> dict:
        return asdict(self)


_REQUIRED = ("protocol", "n", "topology")
_NEEDS_A = ("local_full", "local_half", "local_multihop", "rlnc", "rlnc_bcc")
_NEEDS_ELL = ("local_multihop", "rlnc", "rlnc_bcc", "rlnc_after_estimation")


def config_from_dict(raw: dict[str, Any]) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    for name in _REQUIRED:
        if name not in raw or raw[name] is None:
            raise ConfigError(f"missing required field '{name}'")
    known = {f for f in ExperimentConfig.__dataclass_fields__}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError(f"unknown field '{unknown[0]}'")
    data = dict(raw)
    consts = data.pop("constants", None) or {}
    if not isinstance(consts, dict):
        raise ConfigError("field 'constants' must be an object")
    bad = sorted(set(consts) - set(Constants.__dataclass_fields__))
    if bad:
        raise ConfigError(f"unknown field 'constants.{bad[0]}'")
    try:
        cfg = ExperimentConfig(constants=Constants(**consts), **data)
    except TypeError as e:
        raise ConfigError(str(e)) from None
    validate(cfg)
    return cfg


def _int_field(cfg, name, minimum=0, optional=False):
    value = getattr(cfg, name)
    if value is None and optional:
        return
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
        raise ConfigError(f"field '{name}' must be an integer >= {minimum}, got {value!r}")


def validate(cfg: ExperimentConfig) -> None:
    if cfg.protocol not in PROTOCOLS:
        raise ConfigError(f"field 'protocol' must be one of {PROTOCOLS}, got {cfg.protocol!r}")
    _int_field(cfg, "n", 1)
    _int_field(cfg, "N", 1, optional=True)
    _int_field(cfg, "a", 1, optional=True)
    _int_field(cfg, "ell", 0, optional=True)
    _int_field(cfg, "d_bound", 0, optional=True)
    _int_field(cfg, "max_rounds", 0, optional=True)
    if cfg.protocol in _NEEDS_A and cfg.a is None:
        raise ConfigError(f"missing required field 'a' for protocol {cfg.protocol}")
    if cfg.protocol in _NEEDS_ELL and cfg.ell is None:
        raise ConfigError(f"missing required field 'ell' for protocol {cfg.protocol}")
    if cfg.protocol in ("local_full", "local_half") and cfg.ell is None and not cfg.payload_lengths:
        raise ConfigError(f"missing required field 'ell' (or 'payload_lengths') for {cfg.protocol}")
    if cfg.protocol in ("estimation", "rlnc_after_estimation") and cfg.d_bound is None:
        raise ConfigError(f"missing required field 'd_bound' for protocol {cfg.protocol}")
    N = cfg.id_universe
    if N < cfg.n:
        raise ConfigError(f"field 'N' must be >= n ({cfg.n}), got {N}")
    if N > max(cfg.n, 2) ** MAX_ID_EXPONENT:
        raise ConfigError(f"field 'N' must be at most n^{MAX_ID_EXPONENT}, got {N}")
    if not isinstance(cfg.topology, dict) or "kind" not in cfg.topology:
        raise ConfigError("field 'topology' must be an object with a 'kind'")
    if cfg.construction not in CONSTRUCTIONS + ("auto",):
        raise ConfigError(f"field 'construction' must be one of {CONSTRUCTIONS + ('auto',)}")
    s = cfg.senders
    if not isinstance(s, dict) or len(s) != 1 or not ({"ids", "random"} & set(s)):
        raise ConfigError("field 'senders' must be {\"ids\": [...]} or {\"random\": k}")
    if "ids" in s:
        ids = s["ids"]
        if (not isinstance(ids, list) or len(set(ids)) != len(ids)
                or any(not isinstance(i, int) or not 0 <= i < cfg.n for i in ids)):
            raise ConfigError(f"field 'senders.ids' must list distinct nodes in [0, {cfg.n})")
    else:
        k = s["random"]
        if not isinstance(k, int) or not 0 <= k <= cfg.n:
            raise ConfigError(f"field 'senders.random' must be in [0, {cfg.n}]")
    if cfg.payload_lengths is not None:
        count = len(s["ids"]) if "ids" in s else s["random"]
        if len(cfg.payload_lengths) != count:
            raise ConfigError(
                f"field 'payload_lengths' has {len(cfg.payload_lengths)} entries for {count} senders")
    if not isinstance(cfg.seeds, dict):
        raise ConfigError("field 'seeds' must be an object")
    count = cfg.seeds.get("count", 1)
    if not isinstance(count, int) or count < 1:
        raise ConfigError("field 'seeds.count' must be a positive integer")
    if not isinstance(cfg.seeds.get("master", 0), int):
        raise ConfigError("field 'seeds.master' must be an integer")
    c = cfg.constants
    for name in ("c1", "round_multiplier", "prefix_bits"):
        v = getattr(c, name)
        if not isinstance(v, int) or v < 1:
            raise ConfigError(f"field 'constants.{name}' must be a positive integer")
    if c.fail_bits is not None and (not isinstance(c.fail_bits, int) or c.fail_bits < 1):
        raise ConfigError("field 'constants.fail_bits' must be a positive integer")


def load_config(path) -> ExperimentConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: not valid JSON ({e})") from None
    return config_from_dict(raw)
