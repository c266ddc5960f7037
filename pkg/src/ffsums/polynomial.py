"""Dense univariate polynomials over a FiniteField and the differencing calculus."""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from .errors import FieldMismatch
from .field import FieldElement, FiniteField

ZERO_DEGREE = -math.inf


class DensePolynomial:
    """Coefficient vector over a field, constant term first, no trailing zeros."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: FiniteField, coeffs: Iterable[FieldElement | int]):
        self.field = field
        cs = []
        for c in coeffs:
            if isinstance(c, FieldElement):
                if c.field != field:
                    raise FieldMismatch("coefficient from another field")
                cs.append(c.value)
            else:
                cs.append(field(c).value)
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[int, ...] = tuple(cs)

    @classmethod
    def monomial(cls, c: FieldElement, d: int) -> DensePolynomial:
        """c * x^d."""
        return cls(c.field, [0] * d + [c.value])

    @property
    def degree(self) -> int | float:
        return len(self.coeffs) - 1 if self.coeffs else ZERO_DEGREE

    @property
    def leading(self) -> FieldElement:
        return self.field(self.coeffs[-1]) if self.coeffs else self.field.zero

    def coefficient(self, k: int) -> FieldElement:
        return self.field(self.coeffs[k] if k < len(self.coeffs) else 0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DensePolynomial):
            return NotImplemented
        return self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.field, self.coeffs))

    def __repr__(self) -> str:
        return f"DensePolynomial(GF{self.field.q}, {list(self.coeffs)})"

    def _check(self, other: DensePolynomial) -> None:
        if self.field != other.field:
            raise FieldMismatch("polynomials over different fields")

    def __add__(self, other: DensePolynomial) -> DensePolynomial:
        self._check(other)
        f = self.field
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return DensePolynomial(f, [f._add_scalar(x, y) for x, y in zip(a, b)])

    def __neg__(self) -> DensePolynomial:
        f = self.field
        return DensePolynomial(f, [f._neg_scalar(c) for c in self.coeffs])

    def __sub__(self, other: DensePolynomial) -> DensePolynomial:
        return self + (-other)

    def __mul__(self, other: DensePolynomial | FieldElement) -> DensePolynomial:
        f = self.field
        if isinstance(other, FieldElement):
            if other.field != f:
                raise FieldMismatch("scalar from another field")
            return DensePolynomial(f, [f._mul_scalar(c, other.value) for c in self.coeffs])
        self._check(other)
        if not self.coeffs or not other.coeffs:
            return DensePolynomial(f, [])
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            if x:
                for j, y in enumerate(other.coeffs):
                    out[i + j] = f._add_scalar(out[i + j], f._mul_scalar(x, y))
        return DensePolynomial(f, out)

    __rmul__ = __mul__

    def __call__(self, x: FieldElement) -> FieldElement:
        f = self.field
        acc = 0
        for c in reversed(self.coeffs):
            acc = f._add_scalar(f._mul_scalar(acc, x.value), c)
        return FieldElement(f, acc)

    def evaluate_codes(self, xs) -> np.ndarray:
        """Horner evaluation over an array of codes."""
        f = self.field
        xs = np.asarray(xs, dtype=np.int64)
        acc = np.zeros_like(xs)
        for c in reversed(self.coeffs):
            acc = f.add_codes(f.mul_codes(acc, xs), c)
        return acc

    def values(self) -> np.ndarray:
        """P(g) for every code g in enumeration order."""
        return self.evaluate_codes(np.arange(self.field.q, dtype=np.int64))

    def shift(self, h: FieldElement) -> DensePolynomial:
        """The polynomial x -> P(x + h)."""
        f = self.field
        lin = DensePolynomial(f, [h.value, 1])
        acc = DensePolynomial(f, [])
        for c in reversed(self.coeffs):
            acc = acc * lin + DensePolynomial(f, [c])
        return acc


def poly_from_ints(field: FiniteField, coeffs: Sequence[int]) -> DensePolynomial:
    """Polynomial from integer codes, constant term first."""
    return DensePolynomial(field, [int(c) for c in coeffs])


def difference_polynomial(P: DensePolynomial, h: FieldElement) -> DensePolynomial:
    """P(x + h) - P(x)."""
    return P.shift(h) - P


def iterated_difference(P: DensePolynomial, hs: Sequence[FieldElement]) -> DensePolynomial:
    """P(x; h_1, ..., h_k), differencing by h_1 first."""
    for h in hs:
        P = difference_polynomial(P, h)
    return P


def batch_difference(field: FiniteField, C: np.ndarray, h: np.ndarray) -> np.ndarray:
    """Row-wise P(x + h) - P(x) for a stack of coefficient rows.

    ``C`` has shape (N, m), constant term first; ``h`` has shape (N,).  The
    result has shape (N, m - 1) since differencing drops the top degree.
    """
    C = np.asarray(C, dtype=np.int64)
    h = np.asarray(h, dtype=np.int64)
    n, m = C.shape
    acc = np.zeros((n, m), dtype=np.int64)
    for j in range(m - 1, -1, -1):
        # acc <- acc * (x + h) + C[:, j]
        shifted = np.zeros_like(acc)
        shifted[:, 1:] = acc[:, :-1]
        acc = field.add_codes(shifted, field.mul_codes(acc, h[:, None]))
        acc[:, 0] = field.add_codes(acc[:, 0], C[:, j])
    return field.sub_codes(acc, C)[:, : max(m - 1, 0)]


def iterated_difference_grid(P: DensePolynomial, k: int, h1: int | None = None):
    """P(x; h_1, ..., h_k) for every tuple of nonzero h_i, vectorized.

    Returns ``(H, C)`` where row i of ``H`` is a tuple of codes and row i of
    ``C`` the coefficients of the corresponding iterated difference.  Fixing
    ``h1`` restricts to one slice, which keeps memory bounded.
    """
    f = P.field
    nz = np.arange(1, f.q, dtype=np.int64)
    C = np.asarray(P.coeffs, dtype=np.int64)[None, :]
    H = np.zeros((1, 0), dtype=np.int64)
    for level in range(k):
        choices = nz if (level > 0 or h1 is None) else np.array([h1], dtype=np.int64)
        rows = len(C)
        C = np.repeat(C, len(choices), axis=0)
        hcol = np.tile(choices, rows)
        H = np.hstack([np.repeat(H, len(choices), axis=0), hcol[:, None]])
        C = batch_difference(f, C, hcol)
    return H, C
