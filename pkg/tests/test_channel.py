import random

import pytest
from hypothesis import given, strategies as st

from bccradio.channel import (
    IDLE,
    LISTEN,
    AdversaryTopology,
    RadioMode,
    ScriptedTopology,
    StaticTopology,
    Topology,
    TopologyError,
    deliver,
    diameter,
    is_connected,
    parse_scripted,
    parse_topology,
    read_topology,
    run_rounds,
    scripted_text,
    topology_text,
    write_topology,
)
from bccradio.gf2 import BitVec
from bccradio.harness.topologies import complete, grid, path

FULL, HALF = RadioMode.FULL_DUPLEX, RadioMode.HALF_DUPLEX


def triangle():
    return Topology.from_edges(3, [(0, 1), (1, 2), (0, 2)])


def test_deliver_silence():
    out = deliver(triangle(), HALF, [LISTEN] * 3, width=4)
    assert out == [BitVec.zero(4)] * 3


def test_deliver_single_transmitter():
    t = path(4)
    s = BitVec.from_str("1011")
    out = deliver(t, HALF, [LISTEN, s, LISTEN, LISTEN])
    assert out[0] == s and out[2] == s
    assert out[1] is None
    assert out[3] == BitVec.zero(4)


def test_deliver_triangle_collision():
    p, q = BitVec.from_str("1100"), BitVec.from_str("1010")
    out = deliver(triangle(), HALF, [p, q, LISTEN])
    assert str(out[2]) == "0110"


def test_full_duplex_transmitter_hears_others_not_itself():
    p, q = BitVec.from_str("1100"), BitVec.from_str("1010")
    out = deliver(triangle(), FULL, [p, q, LISTEN])
    assert out[0] == q and out[1] == p


def test_idle_hears_nothing_and_mixed_widths_rejected():
    out = deliver(triangle(), FULL, [IDLE, BitVec.from_str("1"), LISTEN])
    assert out[0] is None
    with pytest.raises(ValueError):
        deliver(triangle(), HALF, [BitVec.from_str("1"), BitVec.from_str("10"), LISTEN])


@given(st.lists(st.integers(0, 255), min_size=4, max_size=4), st.integers(0, 15))
def test_deliver_is_linear(vals, mask):
    # reception is the XOR over transmitting neighbours, so splitting the
    # transmitters into two groups and XORing the outcomes gives the same result
    t = complete(4)
    tx = [BitVec(8, v) for v in vals]
    listener = 3
    senders = [i for i in range(3) if mask >> i & 1]
    a = [tx[i] if i in senders else LISTEN for i in range(3)] + [LISTEN]
    b = [tx[i] if i not in senders else LISTEN for i in range(3)] + [LISTEN]
    both = tx[:3] + [LISTEN]
    ra = deliver(t, HALF, a, 8)[listener]
    rb = deliver(t, HALF, b, 8)[listener]
    assert deliver(t, HALF, both, 8)[listener] == ra ^ rb


def test_connectivity_and_diameter():
    assert is_connected(complete(6)) and diameter(complete(6)) == 1
    assert diameter(path(7)) == 6
    assert diameter(grid(3, 3)) == 4
    two_edges = Topology.from_edges(4, [(0, 1), (2, 3)])
    assert not is_connected(two_edges)
    with pytest.raises(ValueError):
        diameter(two_edges)


def test_topology_validation():
    with pytest.raises(ValueError):
        Topology.from_edges(3, [(0, 0)])
    with pytest.raises(ValueError):
        Topology(2, (frozenset({1}), frozenset()))


class NoOp:
    requires_connectivity = False

    def __init__(self, n, rounds, slot):
        self.n, self.rounds, self.slot = n, rounds, slot

    def finished(self, r):
        return r >= self.rounds

    def begin_round(self, r):
        return [self.slot]

    def intent(self, r, s, u, rng):
        return LISTEN

    def receive(self, r, s, u, data):
        pass


def test_run_rounds_accounting():
    m = run_rounds(StaticTopology(complete(3)), HALF, NoOp(3, 0, 5), 10, seed=0)
    assert (m.rounds_elapsed, m.channel_bits) == (0, 0)
    m = run_rounds(StaticTopology(complete(3)), HALF, NoOp(3, 3, 5), 10, seed=0)
    assert (m.rounds_elapsed, m.channel_bits) == (3, 15)
    m = run_rounds(StaticTopology(complete(3)), HALF, NoOp(3, 100, 5), 4, seed=0)
    assert m.rounds_elapsed == 4


class Flood:
    """Node 0 holds a token; anyone who has it keeps transmitting it."""

    requires_connectivity = False

    def __init__(self, n):
        self.n = n
        self.got = [None] * n
        self.got[0] = 0

    def finished(self, r):
        return all(g is not None for g in self.got)

    def begin_round(self, r):
        return [3]

    def intent(self, r, s, u, rng):
        return BitVec.from_str("101") if self.got[u] is not None else LISTEN

    def receive(self, r, s, u, data):
        if self.got[u] is None and data is not None and not data.is_zero():
            self.got[u] = r + 1


def test_flood_on_path_reaches_far_end_after_four_rounds():
    proto = Flood(5)
    m = run_rounds(StaticTopology(path(5)), FULL, proto, 100, seed=0)
    assert proto.got == [0, 1, 2, 3, 4]
    assert m.rounds_elapsed == 4


class RandomTalk(NoOp):
    requires_connectivity = True

    def intent(self, r, s, u, rng):
        return BitVec.random(self.slot, rng) if rng.getrandbits(1) else LISTEN


def test_run_rounds_deterministic_per_seed():
    def go(seed):
        return run_rounds(StaticTopology(complete(5)), HALF, RandomTalk(5, 6, 8), 10, seed,
                          transcript=True)

    a, b = go(11), go(11)
    assert a.transcript == b.transcript and a.per_node_tx_bits == b.per_node_tx_bits
    assert a.transcript != go(12).transcript
    assert all(line.startswith("round ") and " bits=" in line for line in a.transcript)


def test_disconnected_round_raises():
    bad = Topology.from_edges(4, [(0, 1), (2, 3)])
    with pytest.raises(TopologyError):
        run_rounds(ScriptedTopology([complete(4), bad]), HALF, RandomTalk(4, 5, 2), 5, 0)


def test_adversary_sees_history():
    seen = []

    def pick(r, history):
        seen.append((r, len(history.transcript)))
        return complete(3)

    run_rounds(AdversaryTopology(pick), HALF, RandomTalk(3, 3, 4), 3, 0, transcript=True)
    assert [r for r, _ in seen] == [0, 1, 2]
    assert seen[0][1] == 0 and seen[2][1] > 0


def test_topology_file_roundtrip(tmp_path):
    t = grid(3, 2)
    assert parse_topology(topology_text(t)) == t
    p = tmp_path / "g.txt"
    write_topology(t, p)
    assert read_topology(p) == t
    assert parse_topology("# comment\n3\n0 1\n1 2\n") == path(3)


def test_scripted_roundtrip():
    graphs = [path(4), complete(4), grid(2, 2)]
    assert parse_scripted(scripted_text(graphs)) == graphs
    provider = ScriptedTopology(graphs)
    assert provider.topology(7, None) == graphs[-1]


def test_random_streams_are_seeded():
    from bccradio.channel import node_streams, stream

    a = [r.random() for r in node_streams(5, 4)]
    assert a == [r.random() for r in node_streams(5, 4)]
    assert len(set(a)) == 4
    assert stream(1, "x").random() != stream(1, "y").random()
    assert isinstance(stream(1, "x"), random.Random)
