"""Finite fields F_q = F_p[t]/(m(t)) materialized at desk scale.

Elements are identified with integer codes: the coefficient vector
``(c_0, ..., c_{r-1})`` of the reduced polynomial read as the base-p numeral
``c_0 + c_1 p + ... + c_{r-1} p^{r-1}``.  Code order is the enumeration order
used for every "least element" tie-break in the package.

Scalar arithmetic goes through :class:`FieldElement`; the bulk routines on
:class:`FiniteField` (``add_codes``, ``mul_codes``, ...) act elementwise on
numpy integer arrays of codes and back every sweep.
"""

from __future__ import annotations

import functools
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from sympy import factorint, isprime

from .errors import DivisionByZero, FieldMismatch, NotPrime, TooLarge

CEILING = 1 << 20
_CHUNK = 1 << 14


def is_prime(n: int) -> bool:
    return n >= 2 and bool(isprime(n))


def prime_power(q: int) -> tuple[int, int] | None:
    """Return ``(p, r)`` with ``q == p**r`` and p prime, or None."""
    if q < 2:
        return None
    factors = factorint(q)
    if len(factors) != 1:
        return None
    ((p, r),) = factors.items()
    return int(p), int(r)


def prime_factors(n: int) -> list[int]:
    return sorted(int(f) for f in factorint(n)) if n > 1 else []


# --- polynomials over F_p as coefficient lists, constant term first -------


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: list[int], m: Sequence[int], p: int) -> list[int]:
    a = [c % p for c in a]
    _trim(a)
    dm = len(m) - 1
    inv_lead = pow(m[-1], -1, p)
    while len(a) - 1 >= dm:
        coef = a[-1] * inv_lead % p
        shift = len(a) - 1 - dm
        for i, mc in enumerate(m):
            a[shift + i] = (a[shift + i] - coef * mc) % p
        _trim(a)
    return a


def _poly_mul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim([c % p for c in out])


def _poly_powmod(base: list[int], e: int, m: Sequence[int], p: int) -> list[int]:
    result = [1]
    base = _poly_mod(base, m, p)
    while e:
        if e & 1:
            result = _poly_mod(_poly_mul(result, base, p), m, p)
        e >>= 1
        if e:
            base = _poly_mod(_poly_mul(base, base, p), m, p)
    return result


def _poly_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim([c % p for c in a]), _trim([c % p for c in b])
    while b:
        a, b = b, _poly_mod(a, b, p)
    return a


def is_irreducible(coeffs: Sequence[int], p: int) -> bool:
    """Rabin's test for a monic polynomial over F_p (coefficients constant first).

    f of degree r is irreducible iff t^(p^r) = t mod f and
    gcd(t^(p^(r/l)) - t, f) = 1 for every prime l dividing r.
    """
    f = _trim([c % p for c in coeffs])
    r = len(f) - 1
    if r < 1:
        return False
    if r == 1:
        return True
    t = [0, 1]

    def frob_iter(k: int) -> list[int]:
        h = t
        for _ in range(k):
            h = _poly_powmod(h, p, f, p)
        return h

    if frob_iter(r) != t:
        return False
    for ell in prime_factors(r):
        h = frob_iter(r // ell)
        diff = list(h) + [0] * max(0, 2 - len(h))
        diff[1] = (diff[1] - 1) % p
        g = _poly_gcd(_trim(diff), f, p)
        if len(g) - 1 > 0:
            return False
    return True


def least_irreducible(p: int, r: int) -> tuple[int, ...]:
    """Lexicographically least monic irreducible of degree r (high-degree-first order)."""
    for n in range(p**r):
        low = [(n // p**j) % p for j in range(r)]
        cand = low + [1]
        if is_irreducible(cand, p):
            return tuple(cand)
    raise AssertionError(f"no irreducible polynomial of degree {r} over F_{p}")


# --- fields ----------------------------------------------------------------


class FiniteField:
    """The field F_q with q = p^r, built on a fixed irreducible modulus.

    Instances are immutable; lookup tables are computed lazily on first use
    and never change afterwards.  Use :func:`construct_field` rather than the
    constructor so equal ``(p, r)`` share one instance.
    """

    def __init__(self, p: int, r: int, modulus: Sequence[int]):
        self.p = p
        self.r = r
        self.q = p**r
        self.modulus = tuple(int(c) for c in modulus)
        self._pw = [p**i for i in range(r)]

    def __repr__(self) -> str:
        return f"FiniteField(p={self.p}, r={self.r})"

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, FiniteField):
            return NotImplemented
        return (self.p, self.r, self.modulus) == (other.p, other.r, other.modulus)

    def __hash__(self) -> int:
        return hash((self.p, self.r, self.modulus))

    def __reduce__(self):
        return (construct_field, (self.p, self.r))

    @property
    def characteristic(self) -> int:
        return self.p

    @property
    def element_count(self) -> int:
        return self.q

    # element construction

    def __call__(self, code: int) -> FieldElement:
        code = int(code)
        if not 0 <= code < self.q:
            raise ValueError(f"code {code} outside [0, {self.q})")
        return FieldElement(self, code)

    def element(self, rep: Sequence[int]) -> FieldElement:
        """Element from a coefficient vector (constant term first)."""
        if len(rep) > self.r:
            raise ValueError(f"rep longer than extension degree {self.r}")
        return FieldElement(self, sum((int(c) % self.p) * w for c, w in zip(rep, self._pw)))

    def scalar(self, n: int) -> FieldElement:
        """The prime-subfield element n * 1."""
        return FieldElement(self, n % self.p)

    @property
    def zero(self) -> FieldElement:
        return FieldElement(self, 0)

    @property
    def one(self) -> FieldElement:
        return FieldElement(self, 1)

    def elements(self) -> list[FieldElement]:
        return [FieldElement(self, c) for c in range(self.q)]

    def rep(self, code: int) -> tuple[int, ...]:
        return tuple((code // w) % self.p for w in self._pw)

    # lookup tables

    def _mul_digits(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Multiply code arrays by schoolbook polynomial product and reduction."""
        p, r = self.p, self.r
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if r == 1:
            return (a * b) % p
        a, b = np.broadcast_arrays(a, b)
        pw = np.array(self._pw, dtype=np.int64)
        da = (a[..., None] // pw) % p
        db = (b[..., None] // pw) % p
        prod = np.zeros(a.shape + (2 * r - 1,), dtype=np.int64)
        for i in range(r):
            prod[..., i : i + r] += da[..., i : i + 1] * db
        prod %= p
        low = np.array(self.modulus[:r], dtype=np.int64)
        for k in range(2 * r - 2, r - 1, -1):
            coef = prod[..., k : k + 1]
            prod[..., k - r : k] = (prod[..., k - r : k] - coef * low) % p
        return (prod[..., :r] * pw).sum(axis=-1)

    def _mul_by_constant(self, a: np.ndarray, c: int) -> np.ndarray:
        """Multiplication by a fixed element as an F_p-linear map on digits."""
        p, r = self.p, self.r
        if r == 1:
            return (np.asarray(a, dtype=np.int64) * c) % p
        pw = np.array(self._pw, dtype=np.int64)
        cols = [int(self._mul_digits(c, w)) for w in self._pw]
        mat = (np.array(cols, dtype=np.int64)[:, None] // pw) % p
        da = (np.asarray(a, dtype=np.int64)[..., None] // pw) % p
        return ((da @ mat) % p) @ pw

    def _pow_slow(self, code: int, k: int) -> int:
        result, base = 1, code
        while k:
            if k & 1:
                result = int(self._mul_digits(result, base))
            k >>= 1
            if k:
                base = int(self._mul_digits(base, base))
        return result

    @cached_property
    def generator_code(self) -> int:
        n = self.q - 1
        ells = prime_factors(n)
        for g in range(1, self.q):
            if all(self._pow_slow(g, n // ell) != 1 for ell in ells):
                return g
        raise AssertionError("multiplicative group is not cyclic")

    @cached_property
    def exp_table(self) -> np.ndarray:
        """``exp_table[k]`` is the code of g^k for the least generator g."""
        n = self.q - 1
        exp = np.empty(n, dtype=np.int64)
        exp[0] = 1
        m, gm = 1, self.generator_code
        while m < n:
            k = min(m, n - m)
            for lo in range(0, k, _CHUNK):
                hi = min(k, lo + _CHUNK)
                exp[m + lo : m + hi] = self._mul_by_constant(exp[lo:hi], gm)
            gm = int(self._mul_digits(gm, gm))
            m += k
        exp.setflags(write=False)
        return exp

    @cached_property
    def log_table(self) -> np.ndarray:
        """Discrete log base the least generator; entry 0 is -1."""
        log = np.full(self.q, -1, dtype=np.int64)
        log[self.exp_table] = np.arange(self.q - 1, dtype=np.int64)
        log.setflags(write=False)
        return log

    @cached_property
    def _exp_list(self) -> list[int]:
        return self.exp_table.tolist()

    @cached_property
    def _log_list(self) -> list[int]:
        return self.log_table.tolist()

    @cached_property
    def trace_table(self) -> np.ndarray:
        """Absolute trace of every code, as integers in [0, p)."""
        basis = [self._trace_by_definition(w) for w in self._pw]
        codes = np.arange(self.q, dtype=np.int64)
        tr = np.zeros(self.q, dtype=np.int64)
        for w, t in zip(self._pw, basis):
            tr += ((codes // w) % self.p) * t
        tr %= self.p
        tr.setflags(write=False)
        return tr

    def _trace_by_definition(self, code: int) -> int:
        total, x = 0, code
        for _ in range(self.r):
            total = self._add_scalar(total, x)
            x = self._pow_slow(x, self.p)
        if total >= self.p:
            raise AssertionError("trace left the prime subfield")
        return total

    # scalar kernels on codes

    def _add_scalar(self, a: int, b: int) -> int:
        p = self.p
        if self.r == 1:
            return (a + b) % p
        if p == 2:
            return a ^ b
        out = 0
        for w in self._pw:
            out += (((a // w) + (b // w)) % p) * w
        return out

    def _neg_scalar(self, a: int) -> int:
        p = self.p
        if self.r == 1:
            return -a % p
        if p == 2:
            return a
        return sum(((-(a // w)) % p) * w for w in self._pw)

    def _mul_scalar(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self.r == 1:
            return a * b % self.p
        log = self._log_list
        return self._exp_list[(log[a] + log[b]) % (self.q - 1)]

    def _pow_scalar(self, a: int, k: int) -> int:
        if k == 0:
            return 1
        if a == 0:
            return 0
        if self.r == 1:
            return pow(a, k, self.p)
        n = self.q - 1
        return self._exp_list[(self._log_list[a] * (k % n)) % n]

    def _inv_scalar(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("inverse of zero")
        if self.r == 1:
            return pow(a, -1, self.p)
        n = self.q - 1
        return self._exp_list[(-self._log_list[a]) % n]

    # vectorized kernels on code arrays

    def add_codes(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        p = self.p
        if self.r == 1:
            return (a + b) % p
        if p == 2:
            return a ^ b
        out = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=np.int64)
        for w in self._pw:
            out += (((a // w) + (b // w)) % p) * w
        return out

    def neg_codes(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        p = self.p
        if self.r == 1:
            return (-a) % p
        if p == 2:
            return a.copy()
        out = np.zeros_like(a)
        for w in self._pw:
            out += ((-(a // w)) % p) * w
        return out

    def sub_codes(self, a, b) -> np.ndarray:
        return self.add_codes(a, self.neg_codes(b))

    def mul_codes(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.r == 1:
            return (a * b) % self.p
        log = self.log_table
        out = self.exp_table[(log[a] + log[b]) % (self.q - 1)]
        return np.where((a == 0) | (b == 0), 0, out)

    def pow_codes(self, a, k: int) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if k < 0:
            return self.pow_codes(self.inv_codes(a), -k)
        if k == 0:
            return np.ones_like(a)
        n = self.q - 1
        out = self.exp_table[(self.log_table[a] * (k % n)) % n]
        return np.where(a == 0, 0, out)

    def inv_codes(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise DivisionByZero("inverse of zero")
        n = self.q - 1
        return self.exp_table[(-self.log_table[a]) % n]

    def trace_codes(self, a) -> np.ndarray:
        return self.trace_table[np.asarray(a, dtype=np.int64)]

    def is_square_code(self, a: int) -> bool:
        """Whether the code is a square (0 counts as a square)."""
        if a == 0 or self.p == 2:
            return True
        return self._log_list[a] % 2 == 0

    def sqrt_code(self, a: int) -> int:
        """Least square root of a square, by code order."""
        if a == 0:
            return 0
        if self.p == 2:
            return self._pow_scalar(a, self.q // 2)
        k = self._log_list[a]
        if k % 2:
            raise ValueError("not a square")
        root = self._exp_list[k // 2]
        return min(root, self._neg_scalar(root))

    def least_preimages(self, d: int) -> np.ndarray:
        """``out[v]`` = least x with x^d = v, or -1 when v is not a d-th power."""
        xs = np.arange(self.q, dtype=np.int64)
        vals = self.pow_codes(xs, d)
        out = np.full(self.q, -1, dtype=np.int64)
        # reversed assignment keeps the smallest x for each value
        out[vals[::-1]] = xs[::-1]
        return out


class FieldElement:
    """An element of a specific FiniteField, canonically stored by its code."""

    __slots__ = ("field", "value")

    def __init__(self, field: FiniteField, value: int):
        self.field = field
        self.value = int(value)

    @property
    def rep(self) -> tuple[int, ...]:
        return self.field.rep(self.value)

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"GF{self.field.q}({self.value})"

    def __str__(self) -> str:
        if self.field.r == 1:
            return str(self.value)
        terms = []
        for i, c in reversed(list(enumerate(self.rep))):
            if c == 0:
                continue
            mono = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
            if not mono:
                terms.append(str(c))
            else:
                terms.append(mono if c == 1 else f"{c}{mono}")
        return " + ".join(terms) or "0"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.value == other.value and self.field == other.field

    def __hash__(self) -> int:
        return hash((self.field, self.value))

    def __lt__(self, other: FieldElement) -> bool:
        _same_field(self, other)
        return self.value < other.value

    def __bool__(self) -> bool:
        return self.value != 0

    def __add__(self, other: FieldElement) -> FieldElement:
        if not isinstance(other, FieldElement):
            return NotImplemented
        return add(self, other)

    def __sub__(self, other: FieldElement) -> FieldElement:
        if not isinstance(other, FieldElement):
            return NotImplemented
        return add(self, neg(other))

    def __mul__(self, other: FieldElement) -> FieldElement:
        if not isinstance(other, FieldElement):
            return NotImplemented
        return mul(self, other)

    def __truediv__(self, other: FieldElement) -> FieldElement:
        if not isinstance(other, FieldElement):
            return NotImplemented
        return mul(self, inv(other))

    def __neg__(self) -> FieldElement:
        return neg(self)

    def __pow__(self, k: int) -> FieldElement:
        if k < 0:
            return power(inv(self), -k)
        return power(self, k)

    def inverse(self) -> FieldElement:
        return inv(self)


def _same_field(x: FieldElement, y: FieldElement) -> FiniteField:
    if x.field is not y.field and x.field != y.field:
        raise FieldMismatch(f"{x.field!r} vs {y.field!r}")
    return x.field


@functools.lru_cache(maxsize=None)
def construct_field(p: int, r: int = 1) -> FiniteField:
    """Build F_{p^r} with the lexicographically least monic irreducible modulus.

    >>> construct_field(2, 2).modulus
    (1, 1, 1)
    """
    p, r = int(p), int(r)
    if r < 1:
        raise ValueError("extension degree must be >= 1")
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if p**r > CEILING:
        raise TooLarge(f"{p}^{r} exceeds the ceiling {CEILING}")
    modulus = (0, 1) if r == 1 else least_irreducible(p, r)
    return FiniteField(p, r, modulus)


def field_of_order(q: int) -> FiniteField:
    pr = prime_power(q)
    if pr is None:
        raise NotPrime(f"{q} is not a prime power")
    return construct_field(*pr)


def add(x: FieldElement, y: FieldElement) -> FieldElement:
    f = _same_field(x, y)
    return FieldElement(f, f._add_scalar(x.value, y.value))


def mul(x: FieldElement, y: FieldElement) -> FieldElement:
    f = _same_field(x, y)
    return FieldElement(f, f._mul_scalar(x.value, y.value))


def neg(x: FieldElement) -> FieldElement:
    return FieldElement(x.field, x.field._neg_scalar(x.value))


def inv(x: FieldElement) -> FieldElement:
    return FieldElement(x.field, x.field._inv_scalar(x.value))


def power(x: FieldElement, k: int) -> FieldElement:
    """x**k for k >= 0, with 0**0 == 1."""
    if k < 0:
        raise ValueError("exponent must be nonnegative")
    return FieldElement(x.field, x.field._pow_scalar(x.value, k))


def absolute_trace(x: FieldElement) -> int:
    return int(x.field.trace_table[x.value])


def multiplicative_generator(field: FiniteField) -> FieldElement:
    return FieldElement(field, field.generator_code)


def enumerate_field(field: FiniteField) -> list[FieldElement]:
    return field.elements()


def codes_of(field: FiniteField, items: Iterable[FieldElement | int]) -> np.ndarray:
    """Code array for a collection of elements (ints are taken as codes)."""
    out = []
    for it in items:
        if isinstance(it, FieldElement):
            _same_field(it, FieldElement(field, 0))
            out.append(it.value)
        else:
            c = int(it)
            if not 0 <= c < field.q:
                raise ValueError(f"code {c} outside [0, {field.q})")
            out.append(c)
    return np.array(sorted(set(out)), dtype=np.int64)
