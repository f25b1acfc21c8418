"""
Exact volume formulas for the unit cube and the matching lattice-point counts.

simplex_volume  : Vol{x in [0,1]^k : x_1 + ... + x_k <= a}, exact rational
log_wedge_complement : Vol{x in [0,1]^k : x_1 * ... * x_k > c}, float
bounded_composition_count : #{x in {1..n}^k : x_1 + ... + x_k = m}, exact
"""
import math
from fractions import Fraction
from typing import Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from errors import InvalidParameterError

RationalLike = Union[int, str, Fraction]


def as_rational(value) -> Fraction:
    """Coerce int / str / Fraction (and floats, by their exact binary value) to a Fraction."""
    if isinstance(value, bool):
        raise InvalidParameterError(f"expected a rational number, got {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, float, str)):
        return Fraction(value)
    raise InvalidParameterError(f"expected a rational number, got {value!r}")


def binomial(top: int, r: int) -> int:
    """C(top, r) by the multiplicative recurrence; 0 outside 0 <= r <= top."""
    if r < 0 or top < 0 or r > top:
        return 0
    r = min(r, top - r)
    value = 1
    for i in range(r):
        value = value * (top - i) // (i + 1)
    return value


# -------------------------------------------------
# Simplex volume (sum threshold)
# -------------------------------------------------
class SimplexVolumeQuery(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    k: int = Field(gt=0)
    a: Fraction

    @field_validator("a", mode="before")
    @classmethod
    def _coerce_a(cls, value):
        return as_rational(value)

    @model_validator(mode="after")
    def _threshold_in_range(self):
        if self.a < 0 or self.a > self.k:
            raise ValueError(f"threshold a={self.a} must lie in [0, {self.k}]")
        return self


def _alternating_sum(k: int, p: int, q: int) -> int:
    # sum_{i=0}^{floor(p/q)} (-1)^i C(k,i) (p - i*q)^k, all integers
    total = 0
    coeff = 1
    for i in range(min(p // q, k) + 1):
        term = coeff * (p - i * q) ** k
        total += -term if i & 1 else term
        coeff = coeff * (k - i) // (i + 1)
    return total


def scaled_simplex_volume(k: int, p: int, q: int) -> int:
    """k! * q^k * V(k, p/q) as an exact integer; inputs are trusted (0 <= p <= k*q)."""
    return _alternating_sum(k, p, q)


def simplex_volume(query: SimplexVolumeQuery) -> Fraction:
    a = query.a
    p, q = a.numerator, a.denominator
    return Fraction(_alternating_sum(query.k, p, q), math.factorial(query.k) * q ** query.k)


def simplex_volume_at(k: int, a: RationalLike) -> Fraction:
    return simplex_volume(SimplexVolumeQuery(k=k, a=a))


def simplex_volume_float(k: int, a: float) -> float:
    """
    Float path for real thresholds (used by the sweep). The float is taken at
    its exact binary value, so the only rounding is the final division.
    """
    if k <= 0:
        raise InvalidParameterError(f"k must be positive, got {k}")
    if not math.isfinite(a):
        raise InvalidParameterError(f"threshold must be finite, got {a}")
    if a <= 0:
        return 0.0
    if a >= k:
        return 1.0
    exact = Fraction(a)
    p, q = exact.numerator, exact.denominator
    return _alternating_sum(k, p, q) / (math.factorial(k) * q**k)


# -------------------------------------------------
# Lattice counts
# -------------------------------------------------
def bounded_composition_count(k: int, n: int, m: int) -> int:
    """
    #{(x_1..x_k) in {1..n}^k : sum = m} by inclusion-exclusion over the
    upper bounds x_i <= n.
    """
    if k <= 0 or n <= 0:
        raise InvalidParameterError(f"k and n must be positive, got k={k}, n={n}")
    if m < k or m > k * n:
        return 0
    s = m - k  # shift to y_i = x_i - 1 in [0, n-1]
    total = 0
    coeff = 1
    for j in range(min(s // n, k) + 1):
        term = coeff * binomial(s - j * n + k - 1, k - 1)
        total += -term if j & 1 else term
        coeff = coeff * (k - j) // (j + 1)
    return total


def product_exceeds_count(n: int, k: int, beta: float) -> int:
    """Exact #{b in {1..n}^k : b_1 * ... * b_k > beta * n^k}."""
    if n <= 0 or k <= 0:
        raise InvalidParameterError(f"n and k must be positive, got n={n}, k={k}")
    if not 0 < beta <= 1:
        raise InvalidParameterError(f"beta must lie in (0, 1], got {beta}")
    threshold = Fraction(beta) * n**k
    num, den = threshold.numerator, threshold.denominator

    def count_from(depth: int, prod: int) -> int:
        if depth == k - 1:
            # last coordinate: b > threshold / prod
            floor_ratio = num // (den * prod)
            return n - min(n, floor_ratio)
        return sum(count_from(depth + 1, prod * b) for b in range(1, n + 1))

    return count_from(0, 1)


# -------------------------------------------------
# Multiplicative simplex
# -------------------------------------------------
def log_wedge_complement(k: int, c: float) -> float:
    """1 - c * sum_{i<k} ln(1/c)^i / i!, the volume where the coordinate product exceeds c."""
    if k <= 0:
        raise InvalidParameterError(f"k must be positive, got {k}")
    if not 0 < c <= 1:
        raise InvalidParameterError(f"c must lie in (0, 1], got {c}")
    if c == 1:
        return 0.0
    log_inv = -math.log(c)
    terms = []
    term = 1.0
    for i in range(k):
        if i > 0:
            term *= log_inv / i
        terms.append(term)
    value = 1.0 - c * math.fsum(terms)
    return min(max(value, 0.0), 1.0 - c)
