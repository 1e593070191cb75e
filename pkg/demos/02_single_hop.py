"""
One hop, many speakers
======================

Every node hears every other.  First the senders shout their codewords
simultaneously, then they take turns with their payloads.
"""

import random

from bccradio.protocols import run_local_single_hop_full, run_local_single_hop_half
from bccradio.protocols.local import random_payloads

rng = random.Random(7)
payloads = random_payloads([2, 9, 13], [8, 16, 24], rng)

# full duplex: deterministic, one ID slot plus one slot per sender
m = run_local_single_hop_full(16, 4, payloads)
print("full duplex  rounds", m.rounds_elapsed, "bits", m.channel_bits,
      "slot widths", m.extras["slot_widths"], "ok", m.all_success)

# half duplex: a radio cannot listen while talking, so senders flip coins
ok = 0
for seed in range(20):
    ok += run_local_single_hop_half(16, 4, payloads, seed=seed).all_success
print(f"half duplex  {ok}/20 seeds delivered everything")
