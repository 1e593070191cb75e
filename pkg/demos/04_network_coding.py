"""
Gossip with XOR-ed packets
==========================

Nodes forward random combinations of what they hold.  The coefficient
header is either one bit per possible ID, or a short sparse code.
"""

import random

from bccradio.harness.topologies import SpanningTreeReshuffler, random_connected
from bccradio.protocols import run_rlnc, run_rlnc_bcc
from bccradio.protocols.local import random_payloads

g = random_connected(20, 0.25, random.Random(11))
msgs = random_payloads([1, 6, 14, 19], 8, random.Random(12))

plain = run_rlnc(g, 4, msgs, 8, seed=5, N=32)
coded = run_rlnc_bcc(g, 4, msgs, 8, seed=5, N=32)

# same coins, so the same rounds; only the packet size differs
for name, m in (("plain", plain), ("coded", coded)):
    print(f"{name:6s} width {m.extras['packet_width']:2d} bits, "
          f"done after {m.extras['completion_round']} rounds, "
          f"{m.channel_bits} channel bits")

# a fresh random spanning tree every round still lets everyone decode
dyn = run_rlnc(SpanningTreeReshuffler(16, random.Random(0)), 3,
               random_payloads([0, 7, 9], 8, random.Random(1)), 8, seed=2)
print("dynamic graph: rounds", dyn.rounds_elapsed, "success", dyn.all_success)
