"""Topology generators and dynamic-graph adversaries."""

from __future__ import annotations

import random
from typing import Mapping

from ..channel import (
    RunHistory,
    ScriptedTopology,
    StaticTopology,
    Topology,
    is_connected,
    parse_scripted,
    read_topology,
)


class TopologySpecError(ValueError):
    pass


def complete(n: int) -> Topology:
    return Topology.from_edges(n, ((u, v) for u in range(n) for v in range(u + 1, n)))


def path(n: int, order=None) -> Topology:
    order = list(range(n)) if order is None else list(order)
    return Topology.from_edges(n, zip(order, order[1:]))


def grid(width: int, height: int) -> Topology:
    def node(x, y):
        return y * width + x
    edges = [(node(x, y), node(x + 1, y)) for y in range(height) for x in range(width - 1)]
    edges += [(node(x, y), node(x, y + 1)) for y in range(height - 1) for x in range(width)]
    return Topology.from_edges(width * height, edges)


def star(n: int, center: int = 0) -> Topology:
    return Topology.from_edges(n, ((center, v) for v in range(n) if v != center))


def random_connected(n: int, p: float, rng: random.Random, max_tries: int = 1000) -> Topology:
    """G(n, p), resampled until connected."""
    if n == 1:
        return Topology(1, (frozenset(),))
    for _ in range(max_tries):
        edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
        t = Topology.from_edges(n, edges)
        if is_connected(t):
            return t
    raise TopologySpecError(f"no connected G({n}, {p}) after {max_tries} draws; raise p")


def random_spanning_tree(n: int, rng: random.Random) -> Topology:
    """Random recursive tree over a random node order."""
    order = list(range(n))
    rng.shuffle(order)
    edges = [(order[i], order[rng.randrange(i)]) for i in range(1, n)]
    return Topology.from_edges(n, edges)


class SpanningTreeReshuffler:
    """A fresh random spanning tree every round."""

    def __init__(self, n: int, rng: random.Random):
        self.n = n
        self.rng = rng
        self._cache: dict[int, Topology] = {}

    def topology(self, round: int, history: RunHistory | None = None) -> Topology:
        if round not in self._cache:
            self._cache = {round: random_spanning_tree(self.n, self.rng)}
        return self._cache[round]


class RotatingPath:
    """Hamiltonian path over the node order rotated by the round number."""

    def __init__(self, n: int):
        self.n = n

    def topology(self, round: int, history: RunHistory | None = None) -> Topology:
        k = round % self.n
        order = list(range(k, self.n)) + list(range(k))
        return path(self.n, order)


class StaticWrapper(StaticTopology):
    """The same graph every round, presented as an adversary."""

    @property
    def n(self) -> int:
        return self.graph.n


ADVERSARIES = ("spanning_tree", "rotating_path", "static")
KINDS = ("complete", "path", "grid", "star", "random_connected", "file", "dynamic")


def generate_topology(spec: Mapping, n: int | None, rng: random.Random) -> Topology:
    """Build a static graph from a spec such as ``{"kind": "grid", "width": 5, "height": 5}``."""
    kind = spec.get("kind")
    if kind == "complete":
        return complete(_need_n(n, spec))
    if kind == "path":
        return path(_need_n(n, spec))
    if kind == "star":
        return star(_need_n(n, spec))
    if kind == "grid":
        try:
            w, h = int(spec["width"]), int(spec["height"])
        except KeyError as e:
            raise TopologySpecError(f"topology.{e.args[0]} is required for a grid") from None
        if n is not None and w * h != n:
            raise TopologySpecError(f"grid {w}x{h} has {w * h} nodes, config says n={n}")
        return grid(w, h)
    if kind == "random_connected":
        if "p" not in spec:
            raise TopologySpecError("topology.p is required for random_connected")
        return random_connected(_need_n(n, spec), float(spec["p"]), rng,
                                int(spec.get("max_tries", 1000)))
    if kind == "file":
        if "path" not in spec:
            raise TopologySpecError("topology.path is required for a file topology")
        t = read_topology(spec["path"])
        if n is not None and t.n != n:
            raise TopologySpecError(f"topology file has {t.n} nodes, config says n={n}")
        return t
    raise TopologySpecError(f"unknown topology.kind {kind!r}; expected one of {KINDS}")


def make_provider(spec: Mapping, n: int | None, rng: random.Random):
    """Topology provider for a run: static kinds are wrapped, ``dynamic`` picks an adversary."""
    if spec.get("kind") != "dynamic":
        return StaticTopology(generate_topology(spec, n, rng))
    adversary = spec.get("adversary")
    n = _need_n(n, spec)
    if adversary == "spanning_tree":
        return SpanningTreeReshuffler(n, rng)
    if adversary == "rotating_path":
        return RotatingPath(n)
    if adversary == "static":
        base = spec.get("base", {"kind": "complete"})
        return StaticWrapper(generate_topology(base, n, rng))
    if adversary == "scripted":
        with open(spec["path"]) as fh:
            return ScriptedTopology(parse_scripted(fh.read()))
    raise TopologySpecError(
        f"unknown topology.adversary {adversary!r}; expected one of {ADVERSARIES + ('scripted',)}")


def _need_n(n, spec):
    n = spec.get("n", n)
    if n is None:
        raise TopologySpecError("n is required for this topology")
    return int(n)
