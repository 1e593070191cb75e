"""Seeded experiment batches and CSV metrics."""

from __future__ import annotations

import csv
import io
import json
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..channel import RunMetrics, StaticTopology, diameter, stream
from ..protocols import (
    neighborhood_contention,
    random_payloads,
    run_estimation,
    run_local_multihop,
    run_local_single_hop_full,
    run_local_single_hop_half,
    run_rlnc,
    run_rlnc_after_estimation,
)
from .config import ExperimentConfig
from .topologies import make_provider

CSV_COLUMNS = ("seed", "protocol", "n", "N", "a", "a_prime", "ell", "rounds", "channel_bits",
               "success", "extra_json")

# extras copied into the CSV per protocol
_EXTRA_KEYS = {
    "local_full": ("code_width", "contention_violation", "decode_failures"),
    "local_half": ("code_width", "rounds_per_phase", "decode_failures"),
    "local_multihop": ("code_M", "code_width", "neighborhood_contention", "decode_failures"),
    "rlnc": ("packet_width", "round_bound", "completion_round", "decode_rounds"),
    "rlnc_bcc": ("packet_width", "round_bound", "completion_round", "decode_rounds",
                 "header_failures"),
    "estimation": ("final_k", "iterations", "iteration_bits", "diverged"),
    "rlnc_after_estimation": ("packet_width", "round_bound", "completion_round",
                              "estimation_success", "estimation_channel_bits"),
}


@dataclass
class MetricsRecord:
    seed: int
    protocol: str
    n: int
    N: int
    a: int | None
    a_prime: int
    ell: int | None
    rounds: int
    channel_bits: int
    success: bool
    extra: dict = field(default_factory=dict)

    def row(self) -> list:
        return [self.seed, self.protocol, self.n, self.N, "" if self.a is None else self.a,
                self.a_prime, "" if self.ell is None else self.ell, self.rounds,
                self.channel_bits, int(self.success),
                json.dumps(self.extra, sort_keys=True, separators=(",", ":"))]


def run_seeds(master: int, count: int) -> list[int]:
    """Per-run seeds derived from the master seed."""
    children = np.random.SeedSequence(master).spawn(count)
    return [int(c.generate_state(1, dtype=np.uint64)[0] >> 1) for c in children]


def pick_senders(cfg: ExperimentConfig, seed: int, topology=None) -> list[int]:
    if "ids" in cfg.senders:
        return sorted(cfg.senders["ids"])
    rng = stream(seed, "senders")
    k = cfg.senders["random"]
    if cfg.protocol == "local_multihop" and topology is not None:
        # rejection-sample a set that respects the per-neighbourhood bound
        for _ in range(10_000):
            chosen = sorted(rng.sample(range(cfg.n), k))
            if neighborhood_contention(topology, chosen) <= cfg.a:
                return chosen
        raise ValueError(f"could not place {k} senders with neighbourhood contention <= {cfg.a}")
    return sorted(rng.sample(range(cfg.n), k))


def run_one(cfg: ExperimentConfig, seed: int, transcript: bool = False) -> tuple[MetricsRecord, RunMetrics]:
    """One simulation; every random choice is a function of ``seed``."""
    provider = make_provider(cfg.topology, cfg.n, stream(seed, "topology"))
    static = provider.graph if isinstance(provider, StaticTopology) else None
    senders = pick_senders(cfg, seed, static)
    lengths = cfg.payload_lengths if cfg.payload_lengths is not None else (cfg.ell or 0)
    payloads = random_payloads(senders, lengths, stream(seed, "payloads"))
    c = cfg.constants
    N = cfg.id_universe
    p = cfg.protocol
    extra_run = {}

    if p in ("local_full", "local_half"):
        if static is None or static.num_edges != static.n * (static.n - 1) // 2:
            raise ValueError(f"{p} needs a complete graph topology")
        if p == "local_full":
            m = run_local_single_hop_full(cfg.n, cfg.a, payloads, seed, N, cfg.construction,
                                          c.prefix_bits, transcript)
        else:
            m = run_local_single_hop_half(cfg.n, cfg.a, payloads, seed, N, c.c1,
                                          cfg.construction, c.prefix_bits, transcript)
    elif p == "local_multihop":
        if static is None:
            raise ValueError("local_multihop needs a static topology")
        m = run_local_multihop(static, cfg.a, payloads, cfg.ell, seed, N, c.c1,
                               cfg.construction, transcript)
    elif p in ("rlnc", "rlnc_bcc"):
        m = run_rlnc(provider, cfg.a, payloads, cfg.ell, seed, N=N, plain_headers=(p == "rlnc"),
                     max_rounds=cfg.max_rounds, round_multiplier=c.round_multiplier,
                     construction=cfg.construction, transcript=transcript)
    elif p == "estimation":
        m = _estimate(cfg, provider, senders, seed, transcript)
    elif p == "rlnc_after_estimation":
        est = _estimate(cfg, provider, senders, seed, False)
        extra_run = {"estimation_success": est.all_success,
                     "estimation_channel_bits": est.channel_bits}
        if est.all_success:
            rlnc_provider = make_provider(cfg.topology, cfg.n, stream(seed, "topology"))
            m = run_rlnc_after_estimation(rlnc_provider, payloads, cfg.ell,
                                          est.extras["sender_sets"], seed, N=N,
                                          max_rounds=cfg.max_rounds,
                                          round_multiplier=c.round_multiplier,
                                          transcript=transcript)
        else:
            m = est
            m.success = [False] * cfg.n
    else:
        raise ValueError(f"unknown protocol {p!r}")

    m.extras.update(extra_run)
    extra = {k: m.extras[k] for k in _EXTRA_KEYS[p] if k in m.extras}
    tx = m.per_node_tx_bits
    extra["tx_bits_max"] = max(tx, default=0)
    extra["tx_bits_total"] = sum(tx)
    rec = MetricsRecord(
        seed=seed, protocol=p, n=cfg.n, N=N, a=cfg.a, a_prime=len(senders), ell=cfg.ell,
        rounds=m.rounds_elapsed, channel_bits=m.channel_bits, success=m.all_success,
        extra=extra)
    return rec, m


def _estimate(cfg, provider, senders, seed, transcript):
    d_bound = cfg.d_bound
    if d_bound is None and isinstance(provider, StaticTopology):
        d_bound = diameter(provider.graph)
    return run_estimation(provider, senders, seed, d_bound=d_bound, n=cfg.n,
                          N=cfg.id_universe, round_multiplier=cfg.constants.round_multiplier,
                          fail_bits=cfg.constants.fail_bits, construction=cfg.construction,
                          transcript=transcript)


def _run_record(args) -> MetricsRecord:
    cfg, seed = args
    return run_one(cfg, seed)[0]


def run_batch(cfg: ExperimentConfig, workers: int = 1) -> tuple[list[MetricsRecord], dict]:
    """Run ``cfg.seeds.count`` independent simulations; results come back in seed order."""
    seeds = run_seeds(cfg.master_seed, cfg.seed_count)
    jobs = [(cfg, s) for s in seeds]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_record, jobs))
    else:
        records = [_run_record(j) for j in jobs]
    return records, summarize(records)


def summarize(records: list[MetricsRecord]) -> dict:
    if not records:
        return {"runs": 0}
    rounds = [r.rounds for r in records]
    bits = [r.channel_bits for r in records]
    return {
        "runs": len(records),
        "successes": sum(r.success for r in records),
        "success_fraction": sum(r.success for r in records) / len(records),
        "mean_rounds": statistics.fmean(rounds),
        "max_rounds": max(rounds),
        "mean_channel_bits": statistics.fmean(bits),
        "max_channel_bits": max(bits),
    }


def records_csv(records: list[MetricsRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow(r.row())
    return buf.getvalue()


def write_csv(records: list[MetricsRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(records_csv(records))
