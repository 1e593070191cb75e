"""Arithmetic in GF(2^t) through log/antilog tables."""

from __future__ import annotations

from functools import lru_cache

# primitive polynomials, bit i = coefficient of x^i
PRIMITIVE_POLYS = {
    1: 0b11,
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10001001,
    8: 0b100011101,
    9: 0b1000010001,
    10: 0b10000001001,
    11: 0b100000000101,
    12: 0b1000001010011,
    13: 0b10000000011011,
    14: 0b100010001000011,
    15: 0b1000000000000011,
    16: 0b10001000000001011,
}

MAX_DEGREE = max(PRIMITIVE_POLYS)


class GF2m:
    """The field GF(2^t); elements are ints in ``[0, 2^t)``."""

    def __init__(self, t: int):
        if t not in PRIMITIVE_POLYS:
            raise ValueError(f"no primitive polynomial for degree {t} (max {MAX_DEGREE})")
        self.t = t
        self.order = (1 << t) - 1
        self.poly = PRIMITIVE_POLYS[t]
        self.exp = [0] * (2 * self.order)
        self.log = [0] * (1 << t)
        x = 1
        for i in range(self.order):
            self.exp[i] = x
            self.log[x] = i
            x <<= 1
            if x >> t:
                x ^= self.poly
        if x != 1 or len(set(self.exp[: self.order])) != self.order:
            raise ValueError(f"polynomial 0b{self.poly:b} is not primitive")
        for i in range(self.order, 2 * self.order):
            self.exp[i] = self.exp[i - self.order]

    def mul(self, x: int, y: int) -> int:
        if x == 0 or y == 0:
            return 0
        return self.exp[self.log[x] + self.log[y]]

    def pow(self, x: int, e: int) -> int:
        if e == 0:
            return 1
        if x == 0:
            return 0
        return self.exp[(self.log[x] * e) % self.order]

    def inv(self, x: int) -> int:
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return self.exp[(self.order - self.log[x]) % self.order]


@lru_cache(maxsize=None)
def field(t: int) -> GF2m:
    return GF2m(t)
