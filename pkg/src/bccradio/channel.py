"""Synchronous additive radio channel.

A listening node receives the XOR of everything its neighbours transmit in
the same slot; silence is indistinguishable from an all-zero transmission.
"""

from __future__ import annotations

import enum
import random
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Protocol, Sequence, Union

import numpy as np

from .gf2 import BitVec


class RadioMode(enum.Enum):
    FULL_DUPLEX = "full"
    HALF_DUPLEX = "half"


class Action(enum.Enum):
    LISTEN = "listen"
    IDLE = "idle"


LISTEN = Action.LISTEN
IDLE = Action.IDLE

Intent = Union[BitVec, Action]


class TopologyError(RuntimeError):
    """A topology provider produced a graph the run cannot accept."""


@dataclass(frozen=True)
class Topology:
    n: int
    adjacency: tuple[frozenset[int], ...]

    def __post_init__(self):
        if len(self.adjacency) != self.n:
            raise ValueError(f"adjacency has {len(self.adjacency)} entries for n={self.n}")
        for u, nbrs in enumerate(self.adjacency):
            if u in nbrs:
                raise ValueError(f"self-loop at {u}")
            for v in nbrs:
                if not 0 <= v < self.n or u not in self.adjacency[v]:
                    raise ValueError(f"edge {u}-{v} is not symmetric")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> Topology:
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge {u}-{v} outside [0, {n})")
            if u == v:
                raise ValueError(f"self-loop at {u}")
            nbrs[u].add(v)
            nbrs[v].add(u)
        return cls(n, tuple(frozenset(s) for s in nbrs))

    def neighbors(self, u: int) -> frozenset[int]:
        return self.adjacency[u]

    def edges(self) -> list[tuple[int, int]]:
        return sorted((u, v) for u in range(self.n) for v in self.adjacency[u] if u < v)

    @property
    def num_edges(self) -> int:
        return sum(len(s) for s in self.adjacency) // 2


def bfs_distances(t: Topology, source: int) -> list[int]:
    """Hop distances from ``source``; -1 marks unreachable nodes."""
    dist = [-1] * t.n
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in t.adjacency[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def is_connected(t: Topology) -> bool:
    if t.n == 0:
        raise ValueError("empty topology")
    return min(bfs_distances(t, 0)) >= 0


def diameter(t: Topology) -> int:
    if not is_connected(t):
        raise ValueError("diameter of a disconnected graph")
    return max(max(bfs_distances(t, u)) for u in range(t.n))


def deliver(
    topology: Topology,
    mode: RadioMode,
    intents: Sequence[Intent],
    width: int | None = None,
) -> list[BitVec | None]:
    """Resolve one slot.

    ``intents[u]`` is a :class:`BitVec` to transmit, ``LISTEN`` or ``IDLE``.
    Listeners get the XOR over transmitting neighbours.  In full duplex a
    transmitter also hears its neighbours (never itself); in half duplex it
    hears nothing.  Idle nodes hear nothing.  ``width`` fixes the slot length
    when nobody transmits.
    """
    if len(intents) != topology.n:
        raise ValueError(f"{len(intents)} intents for {topology.n} nodes")
    tx: dict[int, int] = {}
    for u, it in enumerate(intents):
        if isinstance(it, BitVec):
            if width is None:
                width = it.length
            elif it.length != width:
                raise ValueError(f"mixed slot lengths: {it.length} != {width}")
            tx[u] = it.bits
        elif not isinstance(it, Action):
            raise TypeError(f"bad intent for node {u}: {it!r}")
    if width is None:
        width = 0
    out: list[BitVec | None] = []
    adjacency = topology.adjacency
    full = mode is RadioMode.FULL_DUPLEX
    for u, it in enumerate(intents):
        if it is IDLE or (u in tx and not full):
            out.append(None)
            continue
        acc = 0
        for v in adjacency[u]:
            b = tx.get(v)
            if b is not None:
                acc ^= b
        out.append(BitVec(width, acc))
    return out


# -- topology providers ---------------------------------------------------

@dataclass
class RunHistory:
    """What an adversary may look at: everything that happened before this round."""

    round: int
    transcript: list[str]
    protocol: object
    topologies: list[Topology]


class TopologyProvider(Protocol):
    def topology(self, round: int, history: RunHistory) -> Topology: ...


@dataclass
class StaticTopology:
    graph: Topology

    def topology(self, round: int, history: RunHistory) -> Topology:
        return self.graph


@dataclass
class ScriptedTopology:
    """Round ``r`` uses ``graphs[r]``; the last graph repeats once the script runs out."""

    graphs: list[Topology]

    def __post_init__(self):
        if not self.graphs:
            raise ValueError("empty topology script")

    def topology(self, round: int, history: RunHistory) -> Topology:
        return self.graphs[min(round, len(self.graphs) - 1)]


@dataclass
class AdversaryTopology:
    callback: Callable[[int, RunHistory], Topology]

    def topology(self, round: int, history: RunHistory) -> Topology:
        return self.callback(round, history)


def provider_size(provider) -> int | None:
    if isinstance(provider, StaticTopology):
        return provider.graph.n
    if isinstance(provider, ScriptedTopology):
        return provider.graphs[0].n
    return getattr(provider, "n", None)


# -- round engine ---------------------------------------------------------

class RoundProtocol(Protocol):
    """What :func:`run_rounds` drives.

    A round consists of one or more sub-slots, each with a fixed width.  For
    each sub-slot every node states an intent, the channel resolves it, and
    every node is handed its reception.
    """

    n: int
    requires_connectivity: bool

    def finished(self, round: int) -> bool: ...

    def begin_round(self, round: int) -> Sequence[int]:
        """Called once at the start of each round; returns the sub-slot widths."""

    def intent(self, round: int, slot: int, u: int, rng: random.Random) -> Intent: ...

    def receive(self, round: int, slot: int, u: int, data: BitVec | None) -> None: ...


@dataclass
class RunMetrics:
    rounds_elapsed: int = 0
    slots_elapsed: int = 0
    channel_bits: int = 0
    per_node_tx_bits: list[int] = field(default_factory=list)
    success: list[bool] = field(default_factory=list)
    phases: dict[str, int] = field(default_factory=dict)
    transcript: list[str] = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    @property
    def all_success(self) -> bool:
        return bool(self.success) and all(self.success)


def node_streams(seed: int, n: int, salt: str = "node") -> list[random.Random]:
    """Independent per-node generators keyed by ``(seed, salt, node)``."""
    states = np.random.SeedSequence([seed & (2**63 - 1), _salt(salt)]).spawn(n)
    return [random.Random(int(s.generate_state(2, dtype=np.uint64)[0])) for s in states]


def stream(seed: int, salt: str) -> random.Random:
    ss = np.random.SeedSequence([seed & (2**63 - 1), _salt(salt)])
    return random.Random(int(ss.generate_state(2, dtype=np.uint64)[0]))


def _salt(s: str) -> int:
    return int.from_bytes(s.encode()[:8].ljust(8, b"\0"), "little")


def run_rounds(
    provider: TopologyProvider,
    mode: RadioMode,
    protocol: RoundProtocol,
    max_rounds: int,
    seed: int,
    transcript: bool = False,
    phase_of: Callable[[int], str] | None = None,
) -> RunMetrics:
    """Drive ``protocol`` until it reports ``finished`` or ``max_rounds`` pass."""
    n = protocol.n
    rngs = node_streams(seed, n)
    metrics = RunMetrics(per_node_tx_bits=[0] * n)
    history = RunHistory(0, metrics.transcript, protocol, [])
    r = 0
    while r < max_rounds and not protocol.finished(r):
        history.round = r
        topo = provider.topology(r, history)
        if topo.n != n:
            raise TopologyError(f"round {r}: provider gave {topo.n} nodes, protocol has {n}")
        if protocol.requires_connectivity and not is_connected(topo):
            raise TopologyError(f"round {r}: disconnected topology in a run that needs connectivity")
        history.topologies.append(topo)
        for s, width in enumerate(protocol.begin_round(r)):
            intents = [protocol.intent(r, s, u, rngs[u]) for u in range(n)]
            received = deliver(topo, mode, intents, width)
            for u in range(n):
                it = intents[u]
                if isinstance(it, BitVec):
                    metrics.per_node_tx_bits[u] += it.length
                    if transcript:
                        metrics.transcript.append(f"round {r} node {u} TX bits={it}")
            for u in range(n):
                if received[u] is not None and transcript:
                    metrics.transcript.append(f"round {r} node {u} RX bits={received[u]}")
                protocol.receive(r, s, u, received[u])
            metrics.channel_bits += width
            metrics.slots_elapsed += 1
        if phase_of is not None:
            name = phase_of(r)
            metrics.phases[name] = metrics.phases.get(name, 0) + 1
        r += 1
    metrics.rounds_elapsed = r
    return metrics


# -- edge-list files ------------------------------------------------------

def topology_text(t: Topology) -> str:
    lines = [str(t.n)] + [f"{u} {v}" for u, v in t.edges()]
    return "\n".join(lines) + "\n"


def parse_topology(text: str) -> Topology:
    lines = [ln.split("#")[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ValueError("empty topology file")
    n = int(lines[0])
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise ValueError(f"bad edge line {ln!r}")
        edges.append((int(parts[0]), int(parts[1])))
    return Topology.from_edges(n, edges)


def scripted_text(graphs: Sequence[Topology]) -> str:
    return "".join(f"round {r}\n" + topology_text(g) for r, g in enumerate(graphs))


def parse_scripted(text: str) -> list[Topology]:
    """Concatenated edge lists separated by ``round r`` lines, in round order."""
    blocks: dict[int, list[str]] = {}
    current = None
    for ln in text.splitlines():
        s = ln.strip()
        if not s:
            continue
        if s.startswith("round"):
            parts = s.split()
            if len(parts) != 2:
                raise ValueError(f"bad separator {s!r}")
            current = int(parts[1])
            if current in blocks:
                raise ValueError(f"round {current} listed twice")
            blocks[current] = []
        elif current is None:
            raise ValueError("edge data before the first 'round' separator")
        else:
            blocks[current].append(s)
    if sorted(blocks) != list(range(len(blocks))):
        raise ValueError(f"rounds must be 0..{len(blocks) - 1}, got {sorted(blocks)}")
    return [parse_topology("\n".join(blocks[r])) for r in range(len(blocks))]


def read_topology(path) -> Topology:
    with open(path) as fh:
        return parse_topology(fh.read())


def write_topology(t: Topology, path) -> None:
    with open(path, "w") as fh:
        fh.write(topology_text(t))
