"""
Explicit sumfree objects in the discrete hypercube {1..n}^k: diagonal stripes,
unions of cross-sections K_a, and the l-fold-sumfree predicate.
"""
import math
import itertools
from fractions import Fraction
from typing import FrozenSet, Iterable, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from errors import AmbientMismatchError, InstanceTooLargeError, InvalidParameterError
from exact_math import as_rational, bounded_composition_count
from settings import MATERIALIZE_CAP, SUMFREE_WORK_CAP

LatticePoint = Tuple[int, ...]


def check_point(p: LatticePoint, n: int, k: int) -> None:
    if len(p) != k:
        raise AmbientMismatchError(f"point {p} has {len(p)} coordinates, expected {k}")
    for c in p:
        if not 1 <= c <= n:
            raise AmbientMismatchError(f"point {p} leaves the box {{1..{n}}}^{k}")


def iter_box(n: int, k: int) -> Iterable[LatticePoint]:
    """All points of {1..n}^k in lexicographic order."""
    return itertools.product(range(1, n + 1), repeat=k)


def _check_materialize_cap(n: int, k: int) -> None:
    if n**k > MATERIALIZE_CAP:
        raise InstanceTooLargeError(
            f"n^k = {n}^{k} = {n**k} exceeds the materialization cap {MATERIALIZE_CAP}"
        )


# -------------------------------------------------
# PART 1: DATA MODELS
# -------------------------------------------------
class PointSet(BaseModel):
    model_config = ConfigDict(frozen=True)

    ambient_n: int = Field(gt=0)
    ambient_k: int = Field(gt=0)
    points: FrozenSet[Tuple[int, ...]] = frozenset()

    @model_validator(mode="after")
    def _points_in_box(self):
        for p in self.points:
            check_point(p, self.ambient_n, self.ambient_k)
        return self

    def __len__(self) -> int:
        return len(self.points)

    def __contains__(self, p) -> bool:
        return p in self.points

    def sorted_points(self) -> List[LatticePoint]:
        return sorted(self.points)

    def density(self) -> float:
        return len(self.points) / self.ambient_n**self.ambient_k


class StripeSpec(BaseModel):
    """Points whose coordinate sum lies in [a, l*a)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int = Field(gt=0)
    k: int = Field(gt=0)
    a: Fraction
    l: int = Field(2, ge=2)

    @field_validator("a", mode="before")
    @classmethod
    def _coerce_a(cls, value):
        return as_rational(value)

    @model_validator(mode="after")
    def _offset_positive(self):
        if self.a <= 0:
            raise ValueError(f"stripe offset a must be positive, got {self.a}")
        return self

    @property
    def upper(self) -> Fraction:
        return self.l * self.a

    @classmethod
    def balanced(cls, n: int, k: int, l: int = 2) -> "StripeSpec":
        # a = kn/(l+1): the choice behind the lower bounds
        return cls(n=n, k=k, a=Fraction(k * n, l + 1), l=l)


class CrossSectionFamily(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int = Field(gt=0)
    k: int = Field(gt=0)
    sums: FrozenSet[int] = frozenset()

    @model_validator(mode="after")
    def _sums_in_range(self):
        for a in self.sums:
            if not self.k <= a <= self.k * self.n:
                raise ValueError(f"cross-section sum {a} outside [{self.k}, {self.k * self.n}]")
        return self


class SumfreeViolation(BaseModel):
    model_config = ConfigDict(frozen=True)

    summands: Tuple[Tuple[int, ...], ...]
    total: Tuple[int, ...]

    def describe(self) -> str:
        return " + ".join(str(p) for p in self.summands) + f" = {self.total}"


class SumfreeVerdict(BaseModel):
    model_config = ConfigDict(frozen=True)

    ok: bool
    witness: Optional[SumfreeViolation] = None

    def __bool__(self) -> bool:
        return self.ok


# -------------------------------------------------
# PART 2: STRIPES
# -------------------------------------------------
def stripe_contains(spec: StripeSpec, p: LatticePoint) -> bool:
    check_point(p, spec.n, spec.k)
    total = sum(p)
    return spec.a <= total < spec.upper


def stripe_count(spec: StripeSpec) -> int:
    lo = max(math.ceil(spec.a), spec.k)
    hi = min(math.ceil(spec.upper) - 1, spec.k * spec.n)
    return sum(bounded_composition_count(spec.k, spec.n, m) for m in range(lo, hi + 1))


def materialize_stripe(spec: StripeSpec) -> PointSet:
    _check_materialize_cap(spec.n, spec.k)
    points = frozenset(p for p in iter_box(spec.n, spec.k) if spec.a <= sum(p) < spec.upper)
    return PointSet(ambient_n=spec.n, ambient_k=spec.k, points=points)


def best_stripe(n: int, k: int, l: int = 2) -> Tuple[int, int]:
    """Largest stripe over integer offsets a in [1, kn]; ties keep the smallest a."""
    best_a, best_count = 1, -1
    for a in range(1, k * n + 1):
        count = stripe_count(StripeSpec(n=n, k=k, a=a, l=l))
        if count > best_count:
            best_a, best_count = a, count
    return best_a, best_count


# -------------------------------------------------
# PART 3: CROSS-SECTIONS
# -------------------------------------------------
def cross_section_union(fam: CrossSectionFamily) -> PointSet:
    _check_materialize_cap(fam.n, fam.k)
    if not fam.sums:
        return PointSet(ambient_n=fam.n, ambient_k=fam.k)
    points = frozenset(p for p in iter_box(fam.n, fam.k) if sum(p) in fam.sums)
    return PointSet(ambient_n=fam.n, ambient_k=fam.k, points=points)


def integer_set_is_l_fold_sumfree(values: Iterable[int], l: int = 2) -> bool:
    if l < 2:
        raise InvalidParameterError(f"fold parameter l must be >= 2, got {l}")
    members = sorted(set(values))
    member_set = set(members)
    if not members:
        return True
    top = members[-1]
    for combo in itertools.combinations_with_replacement(members, l):
        total = sum(combo)
        if total > top:
            continue
        if total in member_set:
            return False
    return True


def complementary_pair_count(b: LatticePoint) -> int:
    """Unordered pairs {x, y} of positive lattice points with x + y = b."""
    ordered = math.prod(c - 1 for c in b)
    if all(c % 2 == 0 for c in b):
        ordered += 1
    return ordered // 2


# -------------------------------------------------
# PART 4: SUMFREE PREDICATE
# -------------------------------------------------
def is_l_fold_sumfree(s: PointSet, l: int = 2) -> SumfreeVerdict:
    """
    Checks x_1 + ... + x_l != z over all multisets {x_i} of s and z in s.
    Multisets are walked in nondecreasing order of coordinate sum so a branch
    is cut as soon as its total cannot fit in the box.
    """
    if l < 2:
        raise InvalidParameterError(f"fold parameter l must be >= 2, got {l}")
    if not s.points:
        return SumfreeVerdict(ok=True)
    n, k = s.ambient_n, s.ambient_k
    ordered = sorted(s.points, key=lambda p: (sum(p), p))
    weights = [sum(p) for p in ordered]
    members = s.points
    max_weight = k * n
    min_weight = weights[0]
    work_cap = SUMFREE_WORK_CAP
    visited = 0

    def extend(start: int, depth: int, partial: Tuple[int, ...], weight: int, chosen: list):
        nonlocal visited
        remaining = l - depth - 1
        for idx in range(start, len(ordered)):
            visited += 1
            if visited > work_cap:
                raise InstanceTooLargeError(
                    f"sumfree check on {len(ordered)} points passed the work cap {work_cap}"
                )
            w = weight + weights[idx]
            if w + remaining * min_weight > max_weight:
                break
            p = ordered[idx]
            total = tuple(x + y for x, y in zip(partial, p))
            # every later summand adds at least 1 to each coordinate
            if any(c + remaining > n for c in total):
                continue
            chosen.append(p)
            if remaining == 0:
                if total in members:
                    return SumfreeViolation(summands=tuple(chosen), total=total)
            else:
                found = extend(idx, depth + 1, total, w, chosen)
                if found is not None:
                    return found
            chosen.pop()
        return None

    witness = extend(0, 0, (0,) * k, 0, [])
    if witness is None:
        return SumfreeVerdict(ok=True)
    return SumfreeVerdict(ok=False, witness=witness)
