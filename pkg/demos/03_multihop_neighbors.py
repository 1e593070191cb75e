"""
Hearing the neighbours on a grid
================================

Each sender folds its ID and payload into a single codebook index, so one
decoded collision yields both who spoke and what they said.
"""

from bccradio.bcc import ceil_log2
from bccradio.gf2 import BitVec
from bccradio.harness.topologies import grid
from bccradio.protocols import run_local_multihop
from bccradio.protocols.local import neighborhood_contention

g = grid(5, 5)
# corners and the centre; no node has more than 2 of them as neighbours
senders = {0: BitVec.from_str("1010"), 4: BitVec.from_str("0111"), 12: BitVec.from_str("0001"),
           20: BitVec.from_str("1100"), 24: BitVec.from_str("1111")}
print("neighbourhood contention:", neighborhood_contention(g, senders))

m = run_local_multihop(g, a=2, senders=senders, ell=4, seed=3)
print(f"codebook over M={m.extras['code_M']} indices, {m.extras['code_width']}-bit slots")
print(f"{m.rounds_elapsed} rounds (= 16 * {ceil_log2(25)}), success {m.all_success}")
