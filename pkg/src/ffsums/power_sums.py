"""d-th power images and representations c = a x^d + b y^d.

Coverage is decided from the two power images rather than from all q^2
pairs: the image of x -> x^d has 1 + (q-1)/gcd(d, q-1) elements, and each
image value remembers its least preimage so witnesses come out as the least
(x, y) pair in enumeration order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from .errors import CharacteristicTwo, FieldMismatch, ZeroCoefficient
from .field import FieldElement, FiniteField

_BLOCK = 1 << 22

METHODS = ("brute", "constructive-weber", "constructive-cauchy")


@dataclass(frozen=True)
class PowerImage:
    field: FiniteField
    d: int
    delta: int
    elements: frozenset

    def __post_init__(self):
        expected = 1 + (self.field.q - 1) // self.delta
        if len(self.elements) != expected:
            raise AssertionError(f"power image size {len(self.elements)} != {expected}")

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, x: FieldElement) -> bool:
        return x in self.elements

    @property
    def codes(self) -> list[int]:
        return sorted(x.value for x in self.elements)

    @property
    def measure(self):
        from fractions import Fraction

        return Fraction(len(self.elements), self.field.q)


def _check_exponent(d: int) -> None:
    if d < 1:
        raise ValueError("exponent must be >= 1")


def _check_nonzero(*xs: FieldElement) -> None:
    for x in xs:
        if x.value == 0:
            raise ZeroCoefficient("coefficients must be nonzero")


def _check_fields(field: FiniteField, *xs: FieldElement) -> None:
    for x in xs:
        if x.field != field:
            raise FieldMismatch("element from another field")


def gcd_reduce_exponent(field: FiniteField, d: int) -> int:
    _check_exponent(d)
    return math.gcd(d, field.q - 1)


def image_codes(field: FiniteField, d: int) -> np.ndarray:
    """Sorted codes of {x^d : x in F_q}."""
    _check_exponent(d)
    return np.unique(field.pow_codes(np.arange(field.q), d))


def power_image(field: FiniteField, d: int) -> PowerImage:
    codes = image_codes(field, d)
    return PowerImage(
        field=field,
        d=d,
        delta=gcd_reduce_exponent(field, d),
        elements=frozenset(FieldElement(field, int(c)) for c in codes),
    )


def witness_arrays(field: FiniteField, d: int, a: int, b: int) -> tuple[np.ndarray, np.ndarray]:
    """Least witnesses for every c, as code arrays indexed by c (-1 if none).

    Rows are the image values ordered by their least preimage, so the first
    hit for each c in row-major order is the least x, and within a row the
    matching column is unique.
    """
    q = field.q
    pre = field.least_preimages(d)
    img = np.flatnonzero(pre >= 0)
    rows = img[np.argsort(pre[img], kind="stable")]
    row_vals = field.mul_codes(rows, a)
    col_vals = field.mul_codes(img, b)
    wx = np.full(q, -1, dtype=np.int64)
    wy = np.full(q, -1, dtype=np.int64)
    remaining = q
    step = max(1, _BLOCK // max(1, len(img)))
    for lo in range(0, len(rows), step):
        block = field.add_codes(row_vals[lo : lo + step, None], col_vals[None, :]).ravel()
        uniq, first = np.unique(block, return_index=True)
        fresh = wx[uniq] < 0
        uniq, first = uniq[fresh], first[fresh]
        if uniq.size:
            wx[uniq] = pre[rows[lo + first // len(img)]]
            wy[uniq] = pre[img[first % len(img)]]
            remaining -= uniq.size
        if remaining == 0:
            break
    return wx, wy


def sum_of_two_powers_set(field: FiniteField, d: int, a: FieldElement, b: FieldElement) -> frozenset:
    _check_fields(field, a, b)
    _check_nonzero(a, b)
    wx, _ = witness_arrays(field, d, a.value, b.value)
    return frozenset(FieldElement(field, int(c)) for c in np.flatnonzero(wx >= 0))


@dataclass(frozen=True)
class CoverageReport:
    field: FiniteField
    d: int
    a: FieldElement
    b: FieldElement
    covered: bool
    witnesses: dict = dc_field(repr=False)
    unrepresented: frozenset = frozenset()
    method: str = "brute"

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.covered != (not self.unrepresented):
            raise AssertionError("covered flag disagrees with unrepresented set")
        f, d = self.field, self.d
        if self.witnesses:
            cs = np.array([c.value for c in self.witnesses], dtype=np.int64)
            xs = np.array([w[0].value for w in self.witnesses.values()], dtype=np.int64)
            ys = np.array([w[1].value for w in self.witnesses.values()], dtype=np.int64)
            lhs = f.add_codes(
                f.mul_codes(self.a.value, f.pow_codes(xs, d)),
                f.mul_codes(self.b.value, f.pow_codes(ys, d)),
            )
            if not np.array_equal(lhs, cs):
                raise AssertionError("stored witness fails a x^d + b y^d = c")
        if len(self.witnesses) + len(self.unrepresented) != f.q:
            raise AssertionError("witnesses and unrepresented do not partition the field")

    @property
    def unrepresented_codes(self) -> list[int]:
        return sorted(c.value for c in self.unrepresented)


def coverage_report(
    field: FiniteField, d: int, a: FieldElement, b: FieldElement, method: str = "brute"
) -> CoverageReport:
    """Decide F_q = {a x^d + b y^d} and witness every represented c."""
    _check_exponent(d)
    _check_fields(field, a, b)
    _check_nonzero(a, b)
    if method == "brute":
        wx, wy = witness_arrays(field, d, a.value, b.value)
        witnesses = {
            FieldElement(field, c): (FieldElement(field, int(wx[c])), FieldElement(field, int(wy[c])))
            for c in np.flatnonzero(wx >= 0).tolist()
        }
        missing = frozenset(FieldElement(field, int(c)) for c in np.flatnonzero(wx < 0))
    elif d != 2:
        raise ValueError(f"{method} applies to squares only")
    else:
        solve = weber_representation if method == "constructive-weber" else cauchy_two_squares
        witnesses = {c: solve(field, a, b, c) for c in field.elements()}
        missing = frozenset()
    return CoverageReport(field, d, a, b, not missing, witnesses, missing, method)


# --- constructive square solvers --------------------------------------------


def _verify_squares(a: FieldElement, b: FieldElement, c: FieldElement, x: FieldElement, y: FieldElement):
    if a * x * x + b * y * y != c:
        raise AssertionError(f"{a}*{x}^2 + {b}*{y}^2 != {c}")
    return x, y


def _sqrt(x: FieldElement) -> FieldElement:
    return FieldElement(x.field, x.field.sqrt_code(x.value))


def _is_square(x: FieldElement) -> bool:
    return x.field.is_square_code(x.value)


def weber_two_squares(field: FiniteField, c: FieldElement) -> tuple[FieldElement, FieldElement]:
    """Write c = x^2 + y^2 by Weber's case analysis.

    Characteristic 2: c is its own square of c^(2^(r-1)).  Odd characteristic:
    squares are immediate; otherwise use (c + 1/4)^2 + (g(c - 1/4))^2 with
    g^2 = -1 when -1 is a square, and h^2 a + h^2 with a square, a + 1 a
    nonsquare in the prime field when it is not.
    """
    _check_fields(field, c)
    one = field.one
    if field.p == 2:
        return _verify_squares(one, one, c, c ** (2 ** (field.r - 1)), field.zero)
    if _is_square(c):
        return _verify_squares(one, one, c, _sqrt(c), field.zero)
    minus_one = -one
    if _is_square(minus_one):
        g = _sqrt(minus_one)
        quarter = field.scalar(4).inverse()
        return _verify_squares(one, one, c, c + quarter, g * (c - quarter))
    a = next(
        field.scalar(k)
        for k in range(1, field.p - 1)
        if _is_square(field.scalar(k)) and not _is_square(field.scalar(k + 1))
    )
    g = _sqrt(a)
    h = _sqrt(c / (a + one))
    return _verify_squares(one, one, c, h * g, h)


def weber_representation(
    field: FiniteField, a: FieldElement, b: FieldElement, c: FieldElement
) -> tuple[FieldElement, FieldElement]:
    """c = a x^2 + b y^2 via the square-class reduction to Weber's solver."""
    _check_fields(field, a, b, c)
    _check_nonzero(a, b)
    sa, sb = _is_square(a), _is_square(b)
    if sa != sb:
        if _is_square(c / a):
            return _verify_squares(a, b, c, _sqrt(c / a), field.zero)
        return _verify_squares(a, b, c, field.zero, _sqrt(c / b))
    g = _sqrt(a / b)
    x0, y0 = weber_two_squares(field, c / a)
    return _verify_squares(a, b, c, x0, y0 * g)


def cauchy_two_squares(
    field: FiniteField, a: FieldElement, b: FieldElement, c: FieldElement
) -> tuple[FieldElement, FieldElement]:
    """c = a x^2 + b y^2 from the least common element of {a x^2} and {c - b y^2}."""
    _check_fields(field, a, b, c)
    _check_nonzero(a, b)
    if field.p == 2:
        raise CharacteristicTwo("pigeonhole argument needs odd characteristic")
    pre = field.least_preimages(2)
    squares = np.flatnonzero(pre >= 0)
    left = field.mul_codes(a.value, squares)
    right = field.sub_codes(c.value, field.mul_codes(b.value, squares))
    z = int(np.intersect1d(left, right)[0])
    x = pre[field.mul_codes(z, field._inv_scalar(a.value))]
    y_sq = field.mul_codes(field._add_scalar(c.value, field._neg_scalar(z)), field._inv_scalar(b.value))
    y = pre[y_sq]
    return _verify_squares(a, b, c, field(int(x)), field(int(y)))


# --- three-term diagonal instances ------------------------------------------


def three_term_diagonal_witness(
    field: FiniteField, e: int, a: FieldElement, b: FieldElement, c: FieldElement
) -> Optional[tuple[FieldElement, FieldElement, FieldElement]]:
    """Least (x, y, z), all nonzero, with a x^e + b y^e + c z^e = 0, or None."""
    _check_exponent(e)
    _check_fields(field, a, b, c)
    _check_nonzero(a, b, c)
    pre = field.least_preimages(e)
    nz = np.arange(1, field.q, dtype=np.int64)
    by = field.mul_codes(b.value, field.pow_codes(nz, e))
    neg_inv_c = field._neg_scalar(field._inv_scalar(c.value))
    for x in range(1, field.q):
        ax = field._mul_scalar(a.value, field._pow_scalar(x, e))
        target = field.mul_codes(field.add_codes(ax, by), neg_inv_c)
        z = np.where(target == 0, -1, pre[target])
        hits = np.flatnonzero(z > 0)
        if hits.size:
            j = int(hits[0])
            wit = (field(x), field(int(nz[j])), field(int(z[j])))
            xs, ys, zs = wit
            if a * xs**e + b * ys**e + c * zs**e != field.zero:
                raise AssertionError("three-term witness failed verification")
            return wit
    return None


def division_trick(
    witness: tuple[FieldElement, FieldElement, FieldElement],
) -> tuple[FieldElement, FieldElement]:
    """(x/z, y/z), so that a u^e + b v^e = -c."""
    x, y, z = witness
    return x / z, y / z
