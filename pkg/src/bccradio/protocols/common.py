from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from ..bcc import BccCode, decode_bits, encode_bits
from ..gf2 import BitVec

PREFIX_BITS = 16


class ProtocolInvariantError(AssertionError):
    """A node ended up holding something the model says is impossible."""


@dataclass(frozen=True)
class Packet:
    """Coefficient header followed by a payload; on air they are simply concatenated."""

    header: BitVec
    payload: BitVec

    @property
    def width(self) -> int:
        return self.header.length + self.payload.length

    def to_bitvec(self) -> BitVec:
        return self.header.concat(self.payload)

    @classmethod
    def parse(cls, data: BitVec, header_bits: int) -> Packet:
        h, p = data.split(header_bits)
        return cls(h, p)


def frame(payload: BitVec, prefix_bits: int = PREFIX_BITS) -> BitVec:
    """Length-prefix a variable-length payload."""
    if payload.length >> prefix_bits:
        raise ValueError(f"payload of {payload.length} bits overflows a {prefix_bits}-bit prefix")
    return BitVec(prefix_bits, payload.length).concat(payload)


def unframe(data: BitVec, prefix_bits: int = PREFIX_BITS) -> BitVec | None:
    """Inverse of :func:`frame`; ``None`` when the prefix is inconsistent with the slot."""
    if data.length < prefix_bits:
        return None
    prefix, rest = data.split(prefix_bits)
    n = prefix.bits
    if n > rest.length:
        return None
    body, tail = rest.split(n)
    if tail.bits:
        return None
    return body


def xor_messages(support: int, messages: Mapping[int, int]) -> int:
    """XOR of ``messages[u]`` for every bit ``u`` set in ``support``."""
    acc = 0
    while support:
        low = support & -support
        acc ^= messages.get(low.bit_length() - 1, 0)
        support ^= low
    return acc


def bits_of(support: int) -> list[int]:
    out = []
    while support:
        low = support & -support
        out.append(low.bit_length() - 1)
        support ^= low
    return out


# -- coefficient header codecs --------------------------------------------
# Internally a support is an int with bit u set for ID u.

class PlainHeader:
    """Raw characteristic vector over the whole ID universe (``N`` bits)."""

    kind = "plain"

    def __init__(self, N: int):
        self.N = N
        self.width = N

    def encode(self, support: int) -> int:
        # BitVec position u <-> int bit (N - 1 - u)
        return sum(1 << (self.N - 1 - u) for u in bits_of(support))

    def decode(self, bits: int) -> int | None:
        return sum(1 << (self.N - 1 - p) for p in bits_of(bits))


class BccHeader:
    """Sparse representation: XOR of the BCC codewords of the support."""

    kind = "bcc"

    def __init__(self, code: BccCode, width: int, bound: int):
        if width != code.m:
            raise ValueError(f"code width {code.m} != header width {width}")
        self.code = code
        self.width = width
        self.bound = bound

    def encode(self, support: int) -> int:
        return encode_bits(self.code, bits_of(support))

    def decode(self, bits: int) -> int | None:
        s = decode_bits(self.code, bits, self.bound)
        if s is None:
            return None
        return sum(1 << u for u in s)


class BasisHeader:
    """``a'``-bit header: the i-th known sender (by ascending ID) owns basis vector i."""

    kind = "basis"

    def __init__(self, sender_ids):
        self.order = sorted(sender_ids)
        self.rank_of = {u: i for i, u in enumerate(self.order)}
        self.width = len(self.order)

    def encode(self, support: int) -> int:
        w = self.width
        return sum(1 << (w - 1 - self.rank_of[u]) for u in bits_of(support))

    def decode(self, bits: int) -> int | None:
        w = self.width
        return sum(1 << self.order[w - 1 - p] for p in bits_of(bits))
