"""Solution counts N(b) for diagonal equations a_1 x_1^k_1 + ... + a_n x_n^k_n = b."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import BudgetExceeded, FieldMismatch, ZeroCoefficient, ZeroRhs
from .field import FieldElement, FiniteField
from .power_sums import gcd_reduce_exponent

DEFAULT_BUDGET = 1 << 26
BUDGET_ENV = "FFSUMS_WORK_BUDGET"


def work_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    return int(raw) if raw else DEFAULT_BUDGET


@dataclass(frozen=True)
class DiagonalInstance:
    field: FiniteField
    exponents: tuple
    coefficients: tuple
    rhs: FieldElement

    def __post_init__(self):
        if not self.exponents or len(self.exponents) != len(self.coefficients):
            raise ValueError("need n >= 1 exponents and matching coefficients")
        if any(k < 1 for k in self.exponents):
            raise ValueError("exponents must be >= 1")
        for c in (*self.coefficients, self.rhs):
            if c.field != self.field:
                raise FieldMismatch("element from another field")
        if any(c.value == 0 for c in self.coefficients):
            raise ZeroCoefficient("coefficients must be nonzero")

    @property
    def n(self) -> int:
        return len(self.exponents)

    @classmethod
    def two_term(cls, field: FiniteField, d: int, b: FieldElement, a1=None, a2=None):
        """a1 x^d + a2 y^d = b (unit coefficients by default)."""
        a1 = a1 if a1 is not None else field.one
        a2 = a2 if a2 is not None else field.one
        return cls(field, (d, d), (a1, a2), b)

    @property
    def small_bound_applies(self) -> bool:
        return (
            self.n == 2
            and self.exponents[0] == self.exponents[1]
            and self.rhs.value != 0
        )


@dataclass(frozen=True)
class SolutionCount:
    instance: DiagonalInstance
    count: int
    delta: Optional[int] = None
    bound_slack: Optional[float] = None

    @property
    def bound(self) -> Optional[float]:
        if self.delta is None:
            return None
        return (self.delta - 1) ** 2 * math.sqrt(self.instance.field.q)

    @property
    def within_bound(self) -> Optional[bool]:
        """Exact test of |N - q| <= (delta-1)^2 sqrt(q), squared into integers."""
        if self.delta is None:
            return None
        q = self.instance.field.q
        return (self.count - q) ** 2 <= (self.delta - 1) ** 4 * q


def term_distribution(field: FiniteField, k: int, a: int) -> np.ndarray:
    """mult[v] = #{x : a x^k = v}."""
    vals = field.mul_codes(a, field.pow_codes(np.arange(field.q), k))
    return np.bincount(vals, minlength=field.q)


def convolve(field: FiniteField, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Additive convolution of two multiplicity maps on (F_q, +)."""
    q = field.q
    codes = np.arange(q, dtype=np.int64)
    out = np.zeros(q, dtype=object if u.dtype == object else np.int64)
    for s in np.flatnonzero(v):
        # out[w] += u[w - s] * v[s]
        out += u[field.sub_codes(codes, int(s))] * v[s]
    return out


def _check_budget(field: FiniteField, n: int, budget: Optional[int]) -> None:
    budget = work_budget() if budget is None else budget
    if field.q**n > budget:
        raise BudgetExceeded(f"q^n = {field.q}^{n} exceeds work budget {budget}")


def solution_distribution(
    field: FiniteField, exponents: Sequence[int], coefficients: Sequence[int], budget: Optional[int] = None
) -> np.ndarray:
    """N(b) for every b at once, as an array indexed by the code of b."""
    _check_budget(field, len(exponents), budget)
    dist = None
    for k, a in zip(exponents, coefficients):
        t = term_distribution(field, k, int(a))
        if field.q ** len(exponents) >= 1 << 62:
            t = t.astype(object)
        dist = t if dist is None else convolve(field, dist, t)
    return dist


def _two_term_delta(inst: DiagonalInstance) -> Optional[int]:
    if inst.n == 2 and inst.exponents[0] == inst.exponents[1]:
        return gcd_reduce_exponent(inst.field, inst.exponents[0])
    return None


def count_solutions(instance: DiagonalInstance, budget: Optional[int] = None) -> SolutionCount:
    f = instance.field
    dist = solution_distribution(
        f, instance.exponents, [c.value for c in instance.coefficients], budget
    )
    n_b = int(dist[instance.rhs.value])
    delta = _two_term_delta(instance)
    slack = None
    if delta is not None:
        slack = (delta - 1) ** 2 * math.sqrt(f.q) - abs(n_b - f.q)
    return SolutionCount(instance, n_b, delta, slack)


def verify_small_bound(field: FiniteField, d: int, b: FieldElement) -> SolutionCount:
    """N(b) for x^d + y^d = b together with the slack against (delta-1)^2 sqrt(q)."""
    if b.field != field:
        raise FieldMismatch("rhs from another field")
    if b.value == 0:
        raise ZeroRhs("the bound is stated for b != 0")
    return count_solutions(DiagonalInstance.two_term(field, d, b))


def small_bound_table(field: FiniteField, d: int) -> list[SolutionCount]:
    """verify_small_bound for every nonzero b, sharing one convolution."""
    dist = solution_distribution(field, (d, d), (1, 1))
    delta = gcd_reduce_exponent(field, d)
    bound = (delta - 1) ** 2 * math.sqrt(field.q)
    out = []
    for code in range(1, field.q):
        inst = DiagonalInstance.two_term(field, d, field(code))
        n_b = int(dist[code])
        out.append(SolutionCount(inst, n_b, delta, bound - abs(n_b - field.q)))
    return out


def small_threshold_predicate(q: int, d: int) -> bool:
    """q > (gcd(d, q-1) - 1)^4."""
    delta = math.gcd(d, q - 1)
    return q > (delta - 1) ** 4
