"""Contention estimation by doubling.

Each iteration fixes an estimate ``k`` (4, 8, 16, ...) and an
``[N, 2k log N, 2k]`` code.  For ``multiplier * (D + log n)`` rounds, every
round has two sub-slots:

1. fail slot (``ceil(log2 n)`` bits): failed nodes shout random bits, the
   others listen and fail on any non-zero reception;
2. data slot: with probability 1/2 a node sends the XOR of a random subset
   of the codewords of the IDs it knows, otherwise it listens and decodes
   with bound ``k``; a decoding failure sets the fail flag.

At the end of an iteration a node stops, keeping its ID set, if it has not
failed and knows at most ``k`` IDs.  Stopped nodes stay silent.
"""

from __future__ import annotations

from typing import Iterable

from ..bcc import ceil_log2, decode_bits, encode_bits, protocol_code
from ..channel import IDLE, LISTEN, RadioMode, RunMetrics, Topology, StaticTopology, run_rounds
from ..gf2 import BitVec

INITIAL_K = 2


class EstimationProtocol:
    requires_connectivity = True

    def __init__(self, n, N, senders, rounds_per_iteration, fail_bits, max_iterations,
                 construction="auto"):
        self.n = n
        self.N = N
        self.senders = frozenset(senders)
        self.L = rounds_per_iteration
        self.fail_bits = fail_bits
        self.max_iterations = max_iterations
        self.construction = construction
        self.k = INITIAL_K
        self.code = None
        self.width = 0
        self.bound = 0
        self.iteration = -1
        self.fail = [False] * n
        self.ids: list[set[int]] = [set() for _ in range(n)]
        self.exited = [False] * n
        self.exit_k: list[int | None] = [None] * n
        self.exit_round: list[int | None] = [None] * n
        self.exit_ids: list[frozenset[int] | None] = [None] * n
        self.iteration_bits: list[int] = []
        self.fail_events = 0

    def finished(self, r: int) -> bool:
        if all(self.exited):
            return True
        return r >= self.L * self.max_iterations

    def begin_round(self, r: int):
        if r % self.L == 0:
            self._start_iteration()
        self.iteration_bits[-1] += self.fail_bits + self.width
        return [self.fail_bits, self.width]

    def _start_iteration(self):
        self.iteration += 1
        self.k *= 2
        self.code, self.width = protocol_code(self.N, 2 * self.k, self.construction)
        self.bound = min(self.k, self.code.a)
        self.iteration_bits.append(0)
        for u in range(self.n):
            if self.exited[u]:
                continue
            self.fail[u] = False
            self.ids[u] = {u} if u in self.senders else set()

    def intent(self, r, slot, u, rng):
        if self.exited[u]:
            return IDLE
        if slot == 0:
            if self.fail[u]:
                return BitVec.random(self.fail_bits, rng)
            return LISTEN
        if rng.getrandbits(1):
            picked = [v for v in sorted(self.ids[u]) if rng.getrandbits(1)]
            return BitVec(self.width, encode_bits(self.code, picked))
        return LISTEN

    def receive(self, r, slot, u, data):
        if data is not None:
            if slot == 0:
                if not data.is_zero():
                    self._set_fail(u)
            else:
                s = decode_bits(self.code, data.bits, self.bound)
                if s is None:
                    self._set_fail(u)
                else:
                    self.ids[u].update(s)
        if slot == 1 and r % self.L == self.L - 1 and not self.exited[u]:
            if not self.fail[u] and len(self.ids[u]) <= self.k:
                self.exited[u] = True
                self.exit_k[u] = self.k
                self.exit_round[u] = r + 1
                self.exit_ids[u] = frozenset(self.ids[u])

    def _set_fail(self, u):
        if not self.fail[u]:
            self.fail_events += 1
        self.fail[u] = True


def run_estimation(
    topology,
    senders: Iterable[int],
    seed: int = 0,
    d_bound: int | None = None,
    n: int | None = None,
    N: int | None = None,
    round_multiplier: int = 32,
    fail_bits: int | None = None,
    max_iterations: int | None = None,
    construction: str = "auto",
    transcript: bool = False,
) -> RunMetrics:
    """Identify the sender set without a known contention bound.

    ``d_bound`` (an upper bound on the diameter) and ``n`` size the
    iterations; nodes do not learn them from the network.  Returns metrics
    whose ``extras["sender_sets"]`` holds each node's final ID set.
    """
    provider = StaticTopology(topology) if isinstance(topology, Topology) else topology
    size = getattr(provider, "graph", None)
    n_nodes = size.n if size is not None else getattr(provider, "n")
    n = n_nodes if n is None else n
    N = n_nodes if N is None else N
    if N < n_nodes:
        raise ValueError(f"ID universe N={N} smaller than n={n_nodes}")
    if d_bound is None:
        raise ValueError("d_bound is required")
    senders = sorted(set(senders))
    log_n = ceil_log2(n)
    if fail_bits is None:
        fail_bits = log_n
    L = round_multiplier * (d_bound + log_n)
    if max_iterations is None:
        # k = 2^(i+2) reaches N after this many iterations; decoding never fails beyond
        max_iterations = max(1, ceil_log2(N) - 1)
    proto = EstimationProtocol(n_nodes, N, senders, L, fail_bits, max_iterations, construction)
    metrics = run_rounds(provider, RadioMode.HALF_DUPLEX, proto,
                         max_rounds=L * max_iterations, seed=seed, transcript=transcript,
                         phase_of=lambda r: f"k={4 << (r // L)}")
    truth = frozenset(senders)
    metrics.success = [proto.exited[u] and proto.exit_ids[u] == truth for u in range(n_nodes)]
    exit_ks = {k for k in proto.exit_k if k is not None}
    metrics.extras.update(
        sender_sets=[sorted(s) if s is not None else None for s in proto.exit_ids],
        final_k=proto.exit_k,
        exit_rounds=proto.exit_round,
        rounds_per_iteration=L,
        iterations=proto.iteration + 1,
        iteration_bits=proto.iteration_bits,
        diverged=len(exit_ks) > 1 or not all(proto.exited),
        fail_events=proto.fail_events,
    )
    return metrics
