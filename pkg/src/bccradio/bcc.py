"""Bounded-contention codes.

An ``[M, m, a]`` code assigns each index in ``[0, M)`` a length-``m``
codeword such that XORs of distinct index sets of size at most ``a`` are
pairwise distinct.  Equivalently, any ``2a`` codewords are linearly
independent, which is what both constructions here guarantee.

Codewords are the columns of a parity-check matrix; they are stored packed
as ints (see :mod:`bccradio.gf2` for the bit order).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable

import numpy as np

from .gf2 import BitVec, EchelonBasis
from .gf2m import MAX_DEGREE, field as gf_field

GREEDY = "greedy"
POWERMAP = "powermap"
CONSTRUCTIONS = (GREEDY, POWERMAP)

# the greedy search keeps (2a) boolean tables of 2^m entries
MAX_GREEDY_BITS = 24
# above this many codewords "auto" switches from greedy to powermap
AUTO_GREEDY_MAX_M = 128


def ceil_log2(x: int) -> int:
    """``ceil(log2(x))`` with a floor of 1, the bit-width convention used throughout."""
    if x < 1:
        raise ValueError(f"log of {x}")
    return max(1, (x - 1).bit_length())


def information_floor(M: int, a: int) -> int:
    """Fewest bits that can separate all index sets of size <= ``a``."""
    return max(1, ceil_log2(sum(math.comb(M, j) for j in range(a + 1))))


def greedy_bound(M: int, a: int) -> int:
    """Upper bound on the greedy codeword length (Gilbert-Varshamov style count)."""
    return ceil_log2(sum(math.comb(M, j) for j in range(2 * a))) + 1


SupportSet = tuple[int, ...]


def support_set(indices: Iterable[int], M: int | None = None) -> SupportSet:
    """Normalise ``indices`` into a sorted, duplicate-free tuple."""
    s = tuple(sorted(indices))
    if any(x == y for x, y in zip(s, s[1:])):
        raise ValueError(f"duplicate index in {s}")
    if s and (s[0] < 0 or (M is not None and s[-1] >= M)):
        raise ValueError(f"index out of range [0, {M}) in {s}")
    return s


@dataclass(frozen=True, eq=False)
class BccCode:
    M: int
    m: int
    a: int
    column_bits: tuple[int, ...]
    construction: str
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if len(self.column_bits) != self.M:
            raise ValueError(f"expected {self.M} columns, got {len(self.column_bits)}")
        if any(c < 0 or c >> self.m for c in self.column_bits):
            raise ValueError(f"column wider than m={self.m}")

    def __eq__(self, other):
        if not isinstance(other, BccCode):
            return NotImplemented
        return (self.M, self.m, self.a, self.column_bits, self.construction) == (
            other.M, other.m, other.a, other.column_bits, other.construction)

    def __hash__(self):
        return hash((self.M, self.m, self.a, self.column_bits, self.construction))

    @property
    def columns(self) -> tuple[BitVec, ...]:
        return tuple(BitVec(self.m, c) for c in self.column_bits)

    @property
    def full_rank(self) -> bool:
        """True when all ``M`` codewords are linearly independent."""
        if "full_rank" not in self._cache:
            basis = EchelonBasis(self.m)
            for c in self.column_bits:
                basis.insert(c)
            self._cache["full_rank"] = basis.rank == self.M
        return self._cache["full_rank"]


def build_greedy(M: int, a: int) -> BccCode:
    """Column-greedy construction.

    For increasing trial lengths ``m``, scan candidate columns in increasing
    integer order and accept one iff it is not the XOR of at most ``2a - 1``
    columns accepted so far.  The first length at which ``M`` columns fit wins.
    """
    _check_params(M, a)
    if 2 * a >= M:
        # every subset is constrained: the scan picks 1, 2, 4, ... at m = M
        return BccCode(M, M, a, tuple(1 << i for i in range(M)), GREEDY)

    depth = 2 * a - 1
    m = information_floor(M, a)
    while True:
        if m > MAX_GREEDY_BITS:
            raise ValueError(f"greedy search for M={M}, a={a} exceeds {MAX_GREEDY_BITS} bits")
        cols = _greedy_at(M, depth, m)
        if cols is not None:
            return BccCode(M, m, a, tuple(cols), GREEDY)
        m += 1


def _greedy_at(M: int, depth: int, m: int) -> list[int] | None:
    size = 1 << m
    idx = np.arange(size)
    # levels[j][v]: v is the XOR of some j accepted columns
    levels = [np.zeros(size, dtype=bool) for _ in range(depth + 1)]
    levels[0][0] = True
    forbidden = levels[0].copy()
    cols: list[int] = []
    c = 0
    while len(cols) < M:
        free = np.flatnonzero(~forbidden[c + 1:])
        if free.size == 0:
            return None
        c = c + 1 + int(free[0])
        cols.append(c)
        shifted = idx ^ c
        for j in range(min(depth - 1, len(cols) - 1), -1, -1):
            grown = levels[j][shifted]
            levels[j + 1] |= grown
            forbidden |= grown
    return cols


def build_powermap(M: int, a: int, t: int | None = None) -> BccCode:
    """Codeword of index ``i`` is ``u, u^3, ..., u^(2a-1)`` for ``u = i + 1`` in GF(2^t).

    These are the columns of a binary BCH parity-check matrix with designed
    distance ``2a + 1``, so ``m = a * t``.
    """
    _check_params(M, a)
    if t is None:
        t = ceil_log2(M + 1)
    if t > MAX_DEGREE:
        raise ValueError(f"M={M} needs GF(2^{t}); largest supported degree is {MAX_DEGREE}")
    if M > (1 << t) - 1:
        raise ValueError(f"M={M} exceeds the {(1 << t) - 1} nonzero elements of GF(2^{t})")
    gf = gf_field(t)
    cols = []
    for i in range(M):
        u = i + 1
        word = 0
        for e in range(1, 2 * a, 2):
            word = (word << t) | gf.pow(u, e)
        cols.append(word)
    return BccCode(M, a * t, a, tuple(cols), POWERMAP)


def _check_params(M: int, a: int) -> None:
    if M < 1:
        raise ValueError(f"M must be >= 1, got {M}")
    if not 1 <= a <= M:
        raise ValueError(f"need 1 <= a <= M, got a={a}, M={M}")


@lru_cache(maxsize=64)
def build_code(M: int, a: int, construction: str = "auto") -> BccCode:
    """Deterministic codebook for ``(M, a, construction)``; cached per process.

    ``"auto"`` uses the greedy search for small codebooks and the power map
    beyond :data:`AUTO_GREEDY_MAX_M` codewords.
    """
    if construction == "auto":
        construction = GREEDY if M <= AUTO_GREEDY_MAX_M else POWERMAP
    if construction == GREEDY:
        return build_greedy(M, a)
    if construction == POWERMAP:
        return build_powermap(M, a)
    raise ValueError(f"unknown construction {construction!r}")


def padded(code: BccCode, width: int) -> BccCode:
    """Same code with ``width - m`` zero bits appended to every codeword."""
    if width == code.m:
        return code
    if width < code.m:
        raise ValueError(f"cannot shrink a {code.m}-bit code to {width} bits")
    shift = width - code.m
    return BccCode(code.M, width, code.a, tuple(c << shift for c in code.column_bits),
                   code.construction)


def encode(code: BccCode, i: int) -> BitVec:
    if not 0 <= i < code.M:
        raise IndexError(f"index {i} out of range [0, {code.M})")
    return BitVec(code.m, code.column_bits[i])


def encode_bits(code: BccCode, indices: Iterable[int]) -> int:
    """Packed XOR of the codewords of ``indices`` (no duplicate check)."""
    acc = 0
    cols = code.column_bits
    for i in indices:
        acc ^= cols[i]
    return acc


def encode_set(code: BccCode, S: Iterable[int]) -> BitVec:
    S = support_set(S, code.M)
    return BitVec(code.m, encode_bits(code, S))


def decode_sum(code: BccCode, received: BitVec, bound: int) -> SupportSet | None:
    """Unique support of size <= ``bound`` whose codewords XOR to ``received``.

    Returns ``None`` when no such support exists.  ``bound`` may not exceed
    ``code.a``, where uniqueness is guaranteed.
    """
    if received.length != code.m:
        raise ValueError(f"length mismatch: {received.length} != {code.m}")
    return decode_bits(code, received.bits, bound)


def decode_bits(code: BccCode, received: int, bound: int) -> SupportSet | None:
    if not 0 <= bound <= code.a:
        raise ValueError(f"decode bound {bound} outside [0, a={code.a}]")
    if received == 0:
        return ()
    if bound == 0:
        return None
    key = ("decoder", bound)
    decoder = code._cache.get(key)
    if decoder is None:
        decoder = _LinearDecoder(code, bound) if code.full_rank else _SplitDecoder(code, bound)
        code._cache[key] = decoder
    return decoder(received)


class _LinearDecoder:
    """Exact decoding when every codeword is independent: solve, then check the size."""

    def __init__(self, code: BccCode, bound: int):
        self.bound = bound
        self.basis = EchelonBasis(code.m)
        for c in code.column_bits:
            self.basis.insert(c)

    def __call__(self, received: int) -> SupportSet | None:
        combo = self.basis.combination(received)
        if combo is None or bin(combo).count("1") > self.bound:
            return None
        return tuple(i for i in range(combo.bit_length()) if (combo >> i) & 1)


class _SplitDecoder:
    """Meet-in-the-middle search.

    Any support of size <= bound splits into a part of size <= ceil(bound/2),
    looked up in a table of precomputed XORs, and a part of size
    <= floor(bound/2), enumerated.  Table keys are unique because
    ceil(bound/2) <= a.
    """

    def __init__(self, code: BccCode, bound: int):
        self.bound = bound
        cols = code.column_bits
        half = (bound + 1) // 2
        self.table: dict[int, tuple[int, ...]] = {}
        for size in range(half + 1):
            for combo in itertools.combinations(range(code.M), size):
                self.table[encode_bits(code, combo)] = combo
        self.rest = []
        for size in range(bound - half + 1):
            for combo in itertools.combinations(range(code.M), size):
                self.rest.append((encode_bits(code, combo), combo))
        self.cols = cols

    def __call__(self, received: int) -> SupportSet | None:
        table = self.table
        bound = self.bound
        for x, part in self.rest:
            other = table.get(received ^ x)
            if other is None:
                continue
            if len(other) + len(part) > bound or set(other) & set(part):
                continue
            return tuple(sorted(other + part))
        return None


@dataclass(frozen=True)
class IndexSpace:
    """Index space ``id * 2^payload_bits + payload`` for (ID, payload) codewords."""

    id_bits: int
    payload_bits: int

    @property
    def M(self) -> int:
        return 1 << (self.id_bits + self.payload_bits)

    def pack(self, node_id: int, payload: BitVec) -> int:
        return pack_index(self, node_id, payload)

    def unpack(self, i: int) -> tuple[int, BitVec]:
        return unpack_index(self, i)


def pack_index(space: IndexSpace, node_id: int, payload: BitVec) -> int:
    if not 0 <= node_id < (1 << space.id_bits):
        raise ValueError(f"id {node_id} does not fit in {space.id_bits} bits")
    if payload.length != space.payload_bits:
        raise ValueError(f"payload length {payload.length} != {space.payload_bits}")
    return (node_id << space.payload_bits) | payload.bits


def unpack_index(space: IndexSpace, i: int) -> tuple[int, BitVec]:
    if not 0 <= i < space.M:
        raise ValueError(f"index {i} out of range [0, {space.M})")
    return i >> space.payload_bits, BitVec(space.payload_bits, i & ((1 << space.payload_bits) - 1))


# -- codebook text format: header "M m a construction", then one codeword per line

def codebook_text(code: BccCode) -> str:
    lines = [f"{code.M} {code.m} {code.a} {code.construction}"]
    lines.extend(format(c, f"0{code.m}b") for c in code.column_bits)
    return "\n".join(lines) + "\n"


def parse_codebook(text: str) -> BccCode:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty codebook")
    header = lines[0].split()
    if len(header) != 4:
        raise ValueError(f"bad codebook header {lines[0]!r}")
    M, m, a = (int(x) for x in header[:3])
    words = lines[1:]
    if len(words) != M:
        raise ValueError(f"header says {M} codewords, found {len(words)}")
    cols = []
    for w in words:
        if len(w) != m or set(w) - {"0", "1"}:
            raise ValueError(f"bad codeword line {w!r}")
        cols.append(int(w, 2))
    return BccCode(M, m, a, tuple(cols), header[3])


def write_codebook(code: BccCode, path) -> None:
    with open(path, "w") as fh:
        fh.write(codebook_text(code))


def read_codebook(path) -> BccCode:
    with open(path) as fh:
        return parse_codebook(fh.read())


def protocol_code(N: int, a: int, construction: str = "auto") -> tuple[BccCode, int]:
    """Code over an ID universe of size ``N`` padded to the ``a * ceil(log2 N)`` slot width.

    When the realised code is longer than that nominal width (tiny ``N``) the
    code's own length is used.  Returns ``(code, width)``.
    """
    code = build_code(N, min(a, N), construction)
    width = max(code.m, a * ceil_log2(N))
    return padded(code, width), width

