"""
Collision-decodable codebooks
=============================

Build two codebooks in which the XOR of any few codewords can be undone,
then watch a three-way collision get pulled apart.
"""

import random

from bccradio.bcc import build_greedy, build_powermap, decode_sum, encode, encode_set

# a greedy code over 64 indices where any 3 superimposed codewords stay decodable
greedy = build_greedy(64, 3)
print(f"greedy:   M={greedy.M} a={greedy.a} m={greedy.m}")

# the algebraic construction is longer but needs no search at all
power = build_powermap(64, 3)
print(f"powermap: M={power.M} a={power.a} m={power.m}")

# three transmitters collide; the listener hears only the XOR
rng = random.Random(1)
senders = sorted(rng.sample(range(64), 3))
heard = encode(greedy, senders[0]) ^ encode(greedy, senders[1]) ^ encode(greedy, senders[2])
print("heard   ", heard)
print("decoded ", decode_sum(greedy, heard, 3), "actual", tuple(senders))

# encoding is linear: XOR of two sparse vectors encodes their symmetric difference
S, T = {3, 17}, {17, 40, 41}
assert encode_set(power, S) ^ encode_set(power, T) == encode_set(power, S ^ T)
print("decode of S xor T:", decode_sum(power, encode_set(power, S ^ T), 3))
