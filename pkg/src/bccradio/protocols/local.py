"""Local broadcast: every node learns what its transmitting neighbours hold.

Node ``u`` has ID ``u``; ``N`` is the size of the ID universe (``N >= n``).
"""

from __future__ import annotations

import random
from typing import Mapping

from ..bcc import IndexSpace, build_code, ceil_log2, decode_bits
from ..channel import (
    LISTEN,
    RadioMode,
    RunMetrics,
    StaticTopology,
    Topology,
    run_rounds,
)
from ..gf2 import BitVec
from .common import PREFIX_BITS, frame, unframe


def complete_graph(n: int) -> Topology:
    return Topology.from_edges(n, ((u, v) for u in range(n) for v in range(u + 1, n)))


def _check_senders(n: int, N: int, senders: Mapping[int, BitVec]) -> None:
    if N < n:
        raise ValueError(f"ID universe N={N} smaller than n={n}")
    for u in senders:
        if not 0 <= u < n:
            raise ValueError(f"sender {u} is not a node in [0, {n})")


class _SingleHopBase:
    requires_connectivity = False

    def __init__(self, n, a, senders, N, construction, prefix_bits):
        self.n = n
        self.a = a
        self.N = N
        self.senders = dict(senders)
        self.prefix_bits = prefix_bits
        self.code = build_code(N, min(a, N), construction)
        self.width = self.code.m
        self.bound = self.code.a
        # decoded sender set per node, senders always include themselves
        self.known: list[set[int]] = [{u} if u in self.senders else set() for u in range(n)]
        self.heard: list[dict[int, BitVec]] = [
            ({u: self.senders[u]} if u in self.senders else {}) for u in range(n)]
        self.decode_failures = 0

    def _learn_ids(self, u: int, bits: int) -> None:
        s = decode_bits(self.code, bits, self.bound)
        if s is None:
            self.decode_failures += 1
            return
        self.known[u].update(v for v in s if 0 <= v < self.n)

    def _schedule(self, u: int) -> list[int]:
        return sorted(self.known[u])

    def node_success(self, u: int) -> bool:
        return self.heard[u] == self.senders


class LocalFullDuplex(_SingleHopBase):
    """One codeword slot to learn the sender set, then one self-delimited slot per sender."""

    def __init__(self, n, a, senders, N, construction="auto", prefix_bits=PREFIX_BITS):
        super().__init__(n, a, senders, N, construction, prefix_bits)
        self.widths: list[int] = []

    def finished(self, r: int) -> bool:
        return r > 0 and r >= 1 + max(len(k) for k in self.known)

    def _scheduled_at(self, r: int) -> list[int]:
        return [v for v in self.senders
                if len(self._schedule(v)) >= r and self._schedule(v)[r - 1] == v]

    def begin_round(self, r: int):
        if r == 0:
            w = self.width
        else:
            tx = self._scheduled_at(r)
            w = max((self.prefix_bits + self.senders[v].length for v in tx), default=0)
        self.widths.append(w)
        return [w]

    def intent(self, r, slot, u, rng):
        if r == 0:
            if u in self.senders:
                return BitVec(self.width, self.code.column_bits[u])
            return LISTEN
        sched = self._schedule(u)
        if u in self.senders and len(sched) >= r and sched[r - 1] == u:
            return frame(self.senders[u], self.prefix_bits).padded(self.widths[r])
        return LISTEN

    def receive(self, r, slot, u, data):
        if data is None:
            return
        if r == 0:
            bits = data.bits
            if u in self.senders:
                # full duplex: add back our own codeword, which we do not hear
                bits ^= self.code.column_bits[u]
            self._learn_ids(u, bits)
            return
        sched = self._schedule(u)
        if len(sched) < r:
            return
        v = sched[r - 1]
        if v == u:
            return
        payload = unframe(data, self.prefix_bits)
        if payload is not None:
            self.heard[u][v] = payload


def run_local_single_hop_full(
    n: int,
    a: int,
    senders: Mapping[int, BitVec],
    seed: int = 0,
    N: int | None = None,
    construction: str = "auto",
    prefix_bits: int = PREFIX_BITS,
    transcript: bool = False,
) -> RunMetrics:
    """Deterministic single-hop local broadcast with full-duplex radios.

    Slot 0: every sender transmits its ID codeword and every node decodes the
    collision into the sender set.  Then the senders take turns by increasing
    ID, each sending a 16-bit length prefix followed by its payload.
    """
    N = n if N is None else N
    _check_senders(n, N, senders)
    proto = LocalFullDuplex(n, a, senders, N, construction, prefix_bits)
    metrics = run_rounds(StaticTopology(complete_graph(n)), RadioMode.FULL_DUPLEX, proto,
                         max_rounds=2 + n, seed=seed, transcript=transcript)
    metrics.success = [proto.node_success(u) for u in range(n)]
    metrics.phases = {"ids": min(1, metrics.rounds_elapsed),
                      "payloads": max(0, metrics.rounds_elapsed - 1)}
    metrics.extras.update(
        code_width=proto.width,
        code_m=proto.code.m,
        sender_sets=[sorted(k) for k in proto.known],
        contention_violation=len(senders) > a,
        decode_failures=proto.decode_failures,
        slot_widths=proto.widths,
    )
    return metrics


class LocalHalfDuplex(_SingleHopBase):
    def __init__(self, n, a, senders, N, rounds_per_phase, construction="auto",
                 prefix_bits=PREFIX_BITS):
        super().__init__(n, a, senders, N, construction, prefix_bits)
        self.R = rounds_per_phase
        self.blocks: int | None = None
        self.block_width: list[int] = []

    def _phase(self, r: int) -> tuple[str, int]:
        if r < self.R:
            return "ids", -1
        return "payloads", (r - self.R) // self.R

    def finished(self, r: int) -> bool:
        return r >= self.R and (r - self.R) >= self.R * self._num_blocks()

    def _num_blocks(self) -> int:
        if self.blocks is None:
            self.blocks = max(len(k) for k in self.known)
            for j in range(self.blocks):
                tx = [v for v in self.senders
                      if j < len(self._schedule(v)) and self._schedule(v)[j] == v]
                self.block_width.append(
                    max((self.prefix_bits + self.senders[v].length for v in tx), default=0))
        return self.blocks

    def begin_round(self, r: int):
        phase, j = self._phase(r)
        if phase == "ids":
            return [self.width]
        self._num_blocks()
        return [self.block_width[j]]

    def intent(self, r, slot, u, rng):
        phase, j = self._phase(r)
        if u not in self.senders:
            return LISTEN
        if phase == "ids":
            if rng.getrandbits(1):
                return BitVec(self.width, self.code.column_bits[u])
            return LISTEN
        sched = self._schedule(u)
        if j < len(sched) and sched[j] == u:
            if rng.getrandbits(1):
                return frame(self.senders[u], self.prefix_bits).padded(self.block_width[j])
        return LISTEN

    def receive(self, r, slot, u, data):
        if data is None:
            return
        phase, j = self._phase(r)
        if phase == "ids":
            self._learn_ids(u, data.bits)
            return
        sched = self._schedule(u)
        if j >= len(sched) or sched[j] == u or sched[j] in self.heard[u]:
            return
        v = sched[j]
        if data.is_zero():
            # silence; a zero-length payload carries nothing to wait for
            if v in self.senders and self.senders[v].length == 0:
                self.heard[u][v] = BitVec(0)
            return
        payload = unframe(data, self.prefix_bits)
        if payload is not None:
            self.heard[u][v] = payload


def run_local_single_hop_half(
    n: int,
    a: int,
    senders: Mapping[int, BitVec],
    seed: int = 0,
    N: int | None = None,
    c1: int = 16,
    construction: str = "auto",
    prefix_bits: int = PREFIX_BITS,
    transcript: bool = False,
) -> RunMetrics:
    """Single-hop local broadcast with half-duplex radios.

    ``c1 * ceil(log2 n)`` rounds in which senders send their ID codeword with
    probability 1/2, followed by one block of the same length per discovered
    sender in which that sender sends its framed payload with probability 1/2.
    """
    N = n if N is None else N
    _check_senders(n, N, senders)
    R = c1 * ceil_log2(n)
    proto = LocalHalfDuplex(n, a, senders, N, R, construction, prefix_bits)
    max_rounds = R * (1 + n)
    metrics = run_rounds(StaticTopology(complete_graph(n)), RadioMode.HALF_DUPLEX, proto,
                         max_rounds=max_rounds, seed=seed, transcript=transcript,
                         phase_of=lambda r: proto._phase(r)[0])
    metrics.success = [proto.node_success(u) for u in range(n)]
    metrics.extras.update(
        code_width=proto.width,
        rounds_per_phase=R,
        sender_sets=[sorted(k) for k in proto.known],
        contention_violation=len(senders) > a,
        decode_failures=proto.decode_failures,
    )
    return metrics


class LocalMultihop:
    """Senders transmit the codeword of (ID, payload) with probability 1/2; collisions are decoded."""

    requires_connectivity = False

    def __init__(self, topology, a, senders, N, ell, rounds, construction):
        self.n = topology.n
        self.topology = topology
        self.senders = dict(senders)
        for v, p in self.senders.items():
            if p.length != ell:
                raise ValueError(f"sender {v} payload has {p.length} bits, expected {ell}")
        self.space = IndexSpace(ceil_log2(N), ell)
        self.code = build_code(self.space.M, a, construction)
        self.a = a
        self.rounds = rounds
        self.index = {v: self.space.pack(v, p) for v, p in self.senders.items()}
        self.learned: list[dict[int, BitVec]] = [{} for _ in range(self.n)]
        self.decode_failures = 0

    def finished(self, r: int) -> bool:
        return r >= self.rounds

    def begin_round(self, r: int):
        return [self.code.m]

    def intent(self, r, slot, u, rng):
        if u in self.senders and rng.getrandbits(1):
            return BitVec(self.code.m, self.code.column_bits[self.index[u]])
        return LISTEN

    def receive(self, r, slot, u, data):
        if data is None or data.is_zero():
            return
        s = decode_bits(self.code, data.bits, self.a)
        if s is None:
            self.decode_failures += 1
            return
        for i in s:
            v, payload = self.space.unpack(i)
            self.learned[u][v] = payload

    def expected(self, u: int) -> dict[int, BitVec]:
        return {v: self.senders[v] for v in self.topology.neighbors(u) if v in self.senders}


def neighborhood_contention(topology: Topology, senders) -> int:
    """Largest number of senders inside any open neighbourhood N(u)."""
    s = set(senders)
    return max((len(topology.neighbors(u) & s) for u in range(topology.n)), default=0)


def run_local_multihop(
    topology: Topology,
    a: int,
    senders: Mapping[int, BitVec],
    ell: int,
    seed: int = 0,
    N: int | None = None,
    c1: int = 16,
    construction: str = "auto",
    transcript: bool = False,
) -> RunMetrics:
    """Multi-hop local broadcast over an ``[N * 2^ell, m, a]`` code.

    Runs ``c1 * ceil(log2 n)`` half-duplex rounds.  The harness checks up
    front that no neighbourhood holds more than ``a`` senders.
    """
    n = topology.n
    N = n if N is None else N
    _check_senders(n, N, senders)
    contention = neighborhood_contention(topology, senders)
    rounds = c1 * ceil_log2(n)
    proto = LocalMultihop(topology, a, senders, N, ell, rounds, construction)
    metrics = run_rounds(StaticTopology(topology), RadioMode.HALF_DUPLEX, proto,
                         max_rounds=rounds, seed=seed, transcript=transcript)
    metrics.success = [proto.learned[u] == proto.expected(u) for u in range(n)]
    metrics.extras.update(
        code_M=proto.space.M,
        code_width=proto.code.m,
        construction=proto.code.construction,
        neighborhood_contention=contention,
        contention_violation=contention > a,
        decode_failures=proto.decode_failures,
    )
    return metrics


def random_payloads(senders, ell: int | list[int], rng: random.Random) -> dict[int, BitVec]:
    """Random payloads; ``ell`` may be one length or one per sender."""
    senders = sorted(senders)
    lengths = [ell] * len(senders) if isinstance(ell, int) else list(ell)
    if len(lengths) != len(senders):
        raise ValueError(f"{len(lengths)} payload lengths for {len(senders)} senders")
    return {v: BitVec.random(length, rng) for v, length in zip(senders, lengths)}


__all__ = [
    "complete_graph",
    "neighborhood_contention",
    "random_payloads",
    "run_local_multihop",
    "run_local_single_hop_full",
    "run_local_single_hop_half",
]
