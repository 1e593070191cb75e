"""Bit vectors and bit matrices over GF(2).

Vectors are packed into a Python ``int``.  Bit ``i`` of a vector of length
``n`` is the ``i``-th character of its binary string, so ``BitVec.from_str``
and ``int(s, 2)`` agree on the packed value.
"""

from __future__ import annotations

import bisect
import random
from dataclasses import dataclass
from typing import Iterable, Sequence


@dataclass(frozen=True, slots=True)
class BitVec:
    length: int
    bits: int = 0

    def __post_init__(self):
        if self.length < 0:
            raise ValueError(f"negative length {self.length}")
        if self.bits < 0 or self.bits >> self.length:
            raise ValueError(f"bits 0x{self.bits:x} do not fit in length {self.length}")

    @classmethod
    def zero(cls, length: int) -> BitVec:
        return cls(length, 0)

    @classmethod
    def from_str(cls, s: str) -> BitVec:
        s = s.strip()
        if any(ch not in "01" for ch in s):
            raise ValueError(f"not a binary string: {s!r}")
        return cls(len(s), int(s, 2) if s else 0)

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> BitVec:
        return cls.from_str("".join("1" if b else "0" for b in bits))

    @classmethod
    def random(cls, length: int, rng: random.Random) -> BitVec:
        return cls(length, rng.getrandbits(length) if length else 0)

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, i: int) -> int:
        if not -self.length <= i < self.length:
            raise IndexError(i)
        i %= self.length
        return (self.bits >> (self.length - 1 - i)) & 1

    def __iter__(self):
        for i in range(self.length):
            yield (self.bits >> (self.length - 1 - i)) & 1

    def __xor__(self, other: BitVec) -> BitVec:
        return xor(self, other)

    def __bool__(self) -> bool:
        return self.bits != 0

    def __str__(self) -> str:
        return format(self.bits, f"0{self.length}b") if self.length else ""

    def is_zero(self) -> bool:
        return self.bits == 0

    def weight(self) -> int:
        return bin(self.bits).count("1")

    def support(self) -> list[int]:
        """Positions of the set bits, ascending."""
        return [i for i, b in enumerate(self) if b]

    def concat(self, other: BitVec) -> BitVec:
        return BitVec(self.length + other.length, (self.bits << other.length) | other.bits)

    def split(self, head: int) -> tuple[BitVec, BitVec]:
        """Split into the first ``head`` bits and the remainder."""
        if not 0 <= head <= self.length:
            raise ValueError(f"cannot split {self.length} bits at {head}")
        tail = self.length - head
        return BitVec(head, self.bits >> tail), BitVec(tail, self.bits & ((1 << tail) - 1))

    def padded(self, length: int) -> BitVec:
        """Append zero bits up to ``length``."""
        if length < self.length:
            raise ValueError(f"cannot pad {self.length} bits down to {length}")
        return BitVec(length, self.bits << (length - self.length))


def xor(a: BitVec, b: BitVec) -> BitVec:
    if a.length != b.length:
        raise ValueError(f"length mismatch: {a.length} != {b.length}")
    return BitVec(a.length, a.bits ^ b.bits)


def xor_all(vectors: Iterable[BitVec], length: int) -> BitVec:
    acc = 0
    for v in vectors:
        if v.length != length:
            raise ValueError(f"length mismatch: {v.length} != {length}")
        acc ^= v.bits
    return BitVec(length, acc)


@dataclass(frozen=True)
class BitMatrix:
    rows: tuple[BitVec, ...]
    cols: int

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        for r in self.rows:
            if r.length != self.cols:
                raise ValueError(f"row length {r.length} != cols {self.cols}")

    @classmethod
    def from_strings(cls, rows: Sequence[str]) -> BitMatrix:
        vecs = [BitVec.from_str(r) for r in rows]
        cols = vecs[0].length if vecs else 0
        return cls(tuple(vecs), cols)

    @classmethod
    def identity(cls, n: int) -> BitMatrix:
        return cls(tuple(BitVec(n, 1 << (n - 1 - i)) for i in range(n)), n)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def __len__(self) -> int:
        return len(self.rows)

    def __getitem__(self, i: int) -> BitVec:
        return self.rows[i]

    def transpose(self) -> BitMatrix:
        n = len(self.rows)
        out = []
        for j in range(self.cols):
            bits = 0
            for r in self.rows:
                bits = (bits << 1) | r[j]
            out.append(BitVec(n, bits))
        return BitMatrix(tuple(out), n)


class EchelonBasis:
    """Incrementally maintained row-echelon basis of a GF(2) row space.

    Each stored row remembers which inserted vectors it is built from, so
    membership queries can return an explicit combination.
    """

    def __init__(self, width: int):
        self.width = width
        # pivot (highest set bit) -> (row bits, combination bits over inserted vectors)
        self._rows: dict[int, tuple[int, int]] = {}
        self._pivots: list[int] = []  # descending
        self._count = 0

    @property
    def rank(self) -> int:
        return len(self._pivots)

    @property
    def inserted(self) -> int:
        return self._count

    def reduce(self, bits: int) -> tuple[int, int]:
        """Return ``(residue, combination)`` after eliminating against the basis."""
        combo = 0
        rows = self._rows
        for p in self._pivots:
            if (bits >> p) & 1:
                r, c = rows[p]
                bits ^= r
                combo ^= c
        return bits, combo

    def insert(self, bits: int) -> bool:
        """Add a vector; returns True iff it increased the rank."""
        if bits < 0 or bits >> self.width:
            raise ValueError("vector wider than basis")
        tag = 1 << self._count
        self._count += 1
        residue, combo = self.reduce(bits)
        if not residue:
            return False
        p = residue.bit_length() - 1
        self._rows[p] = (residue, combo ^ tag)
        bisect.insort(self._pivots, p, key=lambda x: -x)
        return True

    def contains(self, bits: int) -> bool:
        return self.reduce(bits)[0] == 0

    def combination(self, bits: int) -> int | None:
        """Combination (over inserted vectors, bit ``i`` = ``i``-th insert) summing to ``bits``."""
        residue, combo = self.reduce(bits)
        return combo if residue == 0 else None


def rank(M: BitMatrix) -> int:
    basis = EchelonBasis(M.cols)
    for r in M.rows:
        basis.insert(r.bits)
    return basis.rank


def solve_membership(M: BitMatrix, t: BitVec) -> BitVec | None:
    """Find ``c`` with ``c . M = t``; ``None`` when ``t`` is outside the row span.

    Bit ``i`` of the returned vector selects row ``i`` of ``M``.
    """
    if t.length != M.cols:
        raise ValueError(f"length mismatch: {t.length} != {M.cols}")
    basis = EchelonBasis(M.cols)
    for r in M.rows:
        basis.insert(r.bits)
    combo = basis.combination(t.bits)
    if combo is None:
        return None
    n = len(M.rows)
    # combination bit i is row i; BitVec position i is bit (n - 1 - i)
    out = 0
    for i in range(n):
        if (combo >> i) & 1:
            out |= 1 << (n - 1 - i)
    return BitVec(n, out)


def random_subset_xor(
    vectors: Sequence[BitVec], rng: random.Random, length: int | None = None
) -> tuple[list[int], BitVec]:
    """Include each vector independently with probability 1/2 and XOR the picks."""
    if not vectors:
        if length is None:
            raise ValueError("empty vector list needs an explicit length")
        return [], BitVec.zero(length)
    width = vectors[0].length
    if length is not None and length != width:
        raise ValueError(f"length mismatch: {width} != {length}")
    chosen = []
    acc = 0
    for i, v in enumerate(vectors):
        if v.length != width:
            raise ValueError(f"length mismatch: {v.length} != {width}")
        if rng.getrandbits(1):
            chosen.append(i)
            acc ^= v.bits
    return chosen, BitVec(width, acc)
