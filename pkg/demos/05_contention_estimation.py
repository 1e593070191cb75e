"""
Counting the senders first
==========================

Without a known bound on the number of senders, nodes guess k = 4, 8, ...
and raise an alarm whenever a collision will not decode.  Once everyone
agrees on the sender set, the headers shrink to one bit per sender.
"""

import random

from bccradio.harness.topologies import path
from bccradio.protocols import run_estimation, run_rlnc_after_estimation
from bccradio.protocols.local import random_payloads

line = path(16)
senders = [0, 3, 8, 11, 15]

est = run_estimation(line, senders, seed=4, d_bound=15)
print("final k per node:", sorted(set(est.extras["final_k"])))
print("rounds per guess:", est.phases)
print("bits per guess:  ", est.extras["iteration_bits"])
print("everyone agrees: ", est.all_success)

msgs = random_payloads(senders, 8, random.Random(9))
m = run_rlnc_after_estimation(line, msgs, 8, est.extras["sender_sets"], seed=4)
print(f"then RLNC with {m.extras['packet_width']}-bit packets: "
      f"{m.rounds_elapsed} rounds, success {m.all_success}")
