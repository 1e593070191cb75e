"""Global broadcast with random linear network coding over GF(2).

Every node keeps the packets it has received.  Each round it listens with
probability 1/2; otherwise it sends the XOR of a random subset of its
packets (each included with probability 1/2).  The three variants differ
only in how the coefficient vector is written on air:

* plain: the ``N``-bit characteristic vector,
* bcc: the XOR of the BCC codewords of the support (``a * ceil(log2 N)`` bits),
* basis: one bit per sender once the sender set is known (``a'`` bits).

Nodes convert the received header back into a support before storing, so
the random choices, and hence the dynamics, are the same for all three.
"""

from __future__ import annotations

from typing import Mapping

from ..bcc import ceil_log2, protocol_code
from ..channel import (
    LISTEN,
    RadioMode,
    RunMetrics,
    StaticTopology,
    Topology,
    diameter,
    provider_size,
    run_rounds,
)
from ..gf2 import BitVec, EchelonBasis
from .common import (
    BasisHeader,
    BccHeader,
    Packet,
    PlainHeader,
    ProtocolInvariantError,
    bits_of,
    xor_messages,
)


class RlncProtocol:
    requires_connectivity = True

    def __init__(self, n, N, target_rank, senders, ell, header, stop_when_complete=True,
                 check_validity=True):
        self.n = n
        self.N = N
        self.ell = ell
        self.header = header
        self.width = header.width + ell
        self.target_rank = target_rank
        self.messages = {u: p.bits for u, p in senders.items()}
        self.true_rank = len(self.messages)
        self.stop_when_complete = stop_when_complete
        self.check_validity = check_validity
        # packets[u]: list of (support, payload); basis[u] spans their supports
        self.packets: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        self.basis = [EchelonBasis(N) for _ in range(n)]
        self.decode_round: list[int | None] = [None] * n
        self.complete_round: list[int | None] = [None] * n
        self.rank_trace_ok = True
        self.header_failures = 0
        for u, m in self.messages.items():
            self._store(u, 1 << u, m, 0)

    def _store(self, u, support, payload, r):
        basis = self.basis[u]
        before = basis.rank
        basis.insert(support)
        self.packets[u].append((support, payload))
        if basis.rank < before or basis.rank > self.true_rank:
            self.rank_trace_ok = False
        if self.decode_round[u] is None and basis.rank >= self.target_rank:
            self.decode_round[u] = r
        if self.complete_round[u] is None and basis.rank == self.true_rank:
            self.complete_round[u] = r

    def finished(self, r: int) -> bool:
        return self.stop_when_complete and all(c is not None for c in self.complete_round)

    def begin_round(self, r):
        return [self.width]

    def intent(self, r, slot, u, rng):
        if rng.getrandbits(1):
            return LISTEN
        support = payload = 0
        for s, p in self.packets[u]:
            if rng.getrandbits(1):
                support ^= s
                payload ^= p
        pkt = Packet(BitVec(self.header.width, self.header.encode(support)),
                     BitVec(self.ell, payload))
        return pkt.to_bitvec()

    def receive(self, r, slot, u, data):
        if data is None or data.is_zero():
            return
        pkt = Packet.parse(data, self.header.width)
        support = self.header.decode(pkt.header.bits)
        if support is None:
            self.header_failures += 1
            return
        if self.check_validity:
            if any(v not in self.messages for v in bits_of(support)):
                raise ProtocolInvariantError(f"round {r} node {u}: support outside sender set")
            if xor_messages(support, self.messages) != pkt.payload.bits:
                raise ProtocolInvariantError(f"round {r} node {u}: invalid packet")
        self._store(u, support, pkt.payload.bits, r + 1)

    def decoded_messages(self, u: int) -> dict[int, BitVec]:
        """Gaussian elimination: recover every message whose basis vector is in the span."""
        out = {}
        basis = self.basis[u]
        for v in self.messages:
            combo = basis.combination(1 << v)
            if combo is None:
                continue
            acc = 0
            for i in bits_of(combo):
                acc ^= self.packets[u][i][1]
            out[v] = BitVec(self.ell, acc)
        return out


def _resolve_provider(topology):
    if isinstance(topology, Topology):
        return StaticTopology(topology)
    return topology


def default_round_bound(provider, a: int, N: int, multiplier: int = 32) -> int:
    """``32 (D + a + log N)`` on a static graph, ``32 (n + a + log n)`` on a dynamic one."""
    if isinstance(provider, StaticTopology):
        return multiplier * (diameter(provider.graph) + a + ceil_log2(N))
    n = provider_size(provider)
    if n is None:
        raise ValueError("cannot derive a round bound for this provider; pass max_rounds")
    return multiplier * (n + a + ceil_log2(n))


def _run(provider, n, N, a, senders, ell, header, max_rounds, seed, stop_when_complete,
         transcript, kind):
    for v, p in senders.items():
        if not 0 <= v < n:
            raise ValueError(f"sender {v} is not a node in [0, {n})")
        if p.length != ell:
            raise ValueError(f"sender {v} payload has {p.length} bits, expected {ell}")
    if len(senders) > a:
        raise ValueError(f"{len(senders)} senders exceed the contention bound a={a}")
    proto = RlncProtocol(n, N, a, senders, ell, header, stop_when_complete)
    metrics = run_rounds(provider, RadioMode.HALF_DUPLEX, proto, max_rounds=max_rounds,
                         seed=seed, transcript=transcript)
    truth = dict(senders)
    metrics.success = [
        proto.complete_round[u] is not None and proto.decoded_messages(u) == truth
        for u in range(n)
    ]
    done = [c for c in proto.complete_round if c is not None]
    metrics.extras.update(
        variant=kind,
        packet_width=proto.width,
        header_width=header.width,
        round_bound=max_rounds,
        decode_rounds=proto.decode_round,
        complete_rounds=proto.complete_round,
        completion_round=max(done) if len(done) == n else None,
        header_failures=proto.header_failures,
        rank_monotone=proto.rank_trace_ok,
    )
    return metrics


def run_rlnc(
    topology,
    a: int,
    senders: Mapping[int, BitVec],
    ell: int,
    seed: int = 0,
    N: int | None = None,
    plain_headers: bool = True,
    max_rounds: int | None = None,
    round_multiplier: int = 32,
    construction: str = "auto",
    stop_when_complete: bool = True,
    transcript: bool = False,
) -> RunMetrics:
    """RLNC global broadcast of at most ``a`` messages of ``ell`` bits.

    ``topology`` is a :class:`Topology` or any topology provider.  With
    ``plain_headers=False`` the coefficient header is the BCC sparse
    representation (see :func:`run_rlnc_bcc`).  By default the run stops as
    soon as every node can decode; ``stop_when_complete=False`` plays out the
    whole round budget.
    """
    provider = _resolve_provider(topology)
    n = provider_size(provider)
    N = n if N is None else N
    if N < n:
        raise ValueError(f"ID universe N={N} smaller than n={n}")
    if max_rounds is None:
        max_rounds = default_round_bound(provider, a, N, round_multiplier)
    if plain_headers:
        header, kind = PlainHeader(N), "plain"
    else:
        code, width = protocol_code(N, a, construction)
        header, kind = BccHeader(code, width, min(a, code.a)), "bcc"
    return _run(provider, n, N, a, dict(senders), ell, header, max_rounds, seed,
                stop_when_complete, transcript, kind)


def run_rlnc_bcc(topology, a, senders, ell, seed=0, **kwargs) -> RunMetrics:
    """RLNC with BCC-coded headers: packets of ``a * ceil(log2 N) + ell`` bits."""
    return run_rlnc(topology, a, senders, ell, seed, plain_headers=False, **kwargs)


def run_rlnc_after_estimation(
    topology,
    senders: Mapping[int, BitVec],
    ell: int,
    sender_sets,
    seed: int = 0,
    N: int | None = None,
    max_rounds: int | None = None,
    round_multiplier: int = 32,
    stop_when_complete: bool = True,
    transcript: bool = False,
) -> RunMetrics:
    """RLNC whose header is one bit per sender, ranked by ID.

    ``sender_sets`` holds every node's sender set from a contention
    estimation run; they must all agree.
    """
    sets = [tuple(sorted(s)) for s in sender_sets]
    if not sets or any(s != sets[0] for s in sets):
        diverging = sorted({s for s in sets})
        raise ValueError(f"nodes disagree on the sender set: {diverging}")
    known = sets[0]
    if set(known) != set(senders):
        raise ValueError(f"estimated sender set {list(known)} != actual {sorted(senders)}")
    provider = _resolve_provider(topology)
    n = provider_size(provider)
    N = n if N is None else N
    a_prime = len(known)
    if max_rounds is None:
        max_rounds = default_round_bound(provider, a_prime, N, round_multiplier)
    return _run(provider, n, N, a_prime, dict(senders), ell, BasisHeader(known), max_rounds,
                seed, stop_when_complete, transcript, "basis")
