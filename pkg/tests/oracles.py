"""Slow, obviously-correct reference implementations.

Nothing here imports ffsums.  Elements are coefficient tuples (constant
first); codes follow the same base-p numeral convention as the library so
results can be compared directly.
"""

from __future__ import annotations

import cmath
import itertools
import math
from fractions import Fraction
from functools import lru_cache


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % k for k in range(2, math.isqrt(n) + 1))


def prime_powers(lo: int, hi: int) -> list[tuple[int, int]]:
    out = []
    for q in range(max(lo, 2), hi + 1):
        p = next(k for k in range(2, q + 1) if q % k == 0)
        r, m = 0, q
        while m % p == 0:
            m //= p
            r += 1
        if m == 1:
            out.append((p, r))
    return out


def _trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_divmod_rem(a, b, p):
    a = _trim(a)
    b = _trim(b)
    inv = pow(b[-1], p - 2, p)
    while len(a) >= len(b):
        f = a[-1] * inv % p
        s = len(a) - len(b)
        for i, bi in enumerate(b):
            a[s + i] = (a[s + i] - f * bi) % p
        a = _trim(a)
    return a


def all_monic(p, deg):
    for tail in itertools.product(range(p), repeat=deg):
        yield list(tail) + [1]


def is_irreducible_bruteforce(f, p) -> bool:
    """No monic factor of degree 1..deg/2 (trial division)."""
    n = len(f) - 1
    for k in range(1, n // 2 + 1):
        for g in all_monic(p, k):
            if not poly_divmod_rem(f, g, p):
                return False
    return True


def least_irreducible(p, r):
    if r == 1:
        return (0, 1)
    for n in range(p**r):
        tail = [(n // p**j) % p for j in range(r)]
        f = tail + [1]
        if is_irreducible_bruteforce(f, p):
            return tuple(f)
    raise AssertionError("no irreducible polynomial")


class NaiveField:
    """F_p[t]/(m) with pure-Python tuple arithmetic."""

    def __init__(self, p, r):
        self.p, self.r, self.q = p, r, p**r
        self.modulus = least_irreducible(p, r)

    def to_code(self, v) -> int:
        return sum(c * self.p**i for i, c in enumerate(v))

    def from_code(self, n):
        return tuple((n // self.p**i) % self.p for i in range(self.r))

    def add(self, x, y):
        return tuple((a + b) % self.p for a, b in zip(x, y))

    def neg(self, x):
        return tuple((-a) % self.p for a in x)

    def mul(self, x, y):
        prod = [0] * (2 * self.r)
        for i, a in enumerate(x):
            for j, b in enumerate(y):
                prod[i + j] = (prod[i + j] + a * b) % self.p
        rem = poly_divmod_rem(prod, self.modulus, self.p) if self.r > 1 else _trim([prod[0]])
        rem = rem + [0] * (self.r - len(rem))
        return tuple(rem)

    def power(self, x, n):
        out = self.from_code(1)
        for _ in range(n):
            out = self.mul(out, x)
        return out

    def elements(self):
        return [self.from_code(n) for n in range(self.q)]

    def order(self, x) -> int:
        one, y, k = self.from_code(1), x, 1
        while y != one:
            y = self.mul(y, x)
            k += 1
        return k

    def trace(self, x) -> int:
        acc, y = self.from_code(0), x
        for _ in range(self.r):
            acc = self.add(acc, y)
            y = self.power(y, self.p)
        assert all(c == 0 for c in acc[1:])
        return acc[0]


@lru_cache(maxsize=None)
def naive_field(p, r) -> NaiveField:
    return NaiveField(p, r)


# --- code-level tables built from the naive field --------------------------


@lru_cache(maxsize=None)
def tables(p, r):
    F = naive_field(p, r)
    els = F.elements()
    add = [[F.to_code(F.add(x, y)) for y in els] for x in els]
    mul = [[F.to_code(F.mul(x, y)) for y in els] for x in els]
    return add, mul


def pow_table(p, r, d):
    _, mul = tables(p, r)
    out = []
    for x in range(p**r):
        y = 1
        for _ in range(d):
            y = mul[y][x]
        out.append(y)
    return out


def sum_set(p, r, d, a=1, b=1):
    """{a x^d + b y^d} by the raw double loop."""
    add, mul = tables(p, r)
    pw = pow_table(p, r, d)
    q = p**r
    return {add[mul[a][pw[x]]][mul[b][pw[y]]] for x in range(q) for y in range(q)}


def count_table(p, r, d, a=1, b=1):
    add, mul = tables(p, r)
    pw = pow_table(p, r, d)
    q = p**r
    counts = [0] * q
    for x in range(q):
        for y in range(q):
            counts[add[mul[a][pw[x]]][mul[b][pw[y]]]] += 1
    return counts


def weil_sum(p, r, poly, label):
    """sum_g exp(2 pi i Tr(label * P(g)) / p) with a naive trace."""
    F = naive_field(p, r)
    add, mul = tables(p, r)
    q = p**r
    total = 0j
    for g in range(q):
        v, gp = 0, 1
        for c in poly:
            v = add[v][mul[c][gp]]
            gp = mul[gp][g]
        t = F.trace(F.from_code(mul[label][v]))
        total += cmath.exp(2j * math.pi * t / p)
    return total


def averaged_deviation(p, r, A, B, poly):
    """|(1/q) sum_g |A cap (B + P(g))| / q - |A||B|/q^2| by direct counting."""
    add, mul = tables(p, r)
    q = p**r
    A, B = set(A), set(B)
    total = 0
    for g in range(q):
        v, gp = 0, 1
        for c in poly:
            v = add[v][mul[c][gp]]
            gp = mul[gp][g]
        shifted = {add[b][v] for b in B}
        total += len(A & shifted)
    return abs(Fraction(total, q * q) - Fraction(len(A) * len(B), q * q))
