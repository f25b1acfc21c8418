"""Stripes, cross-section unions and the l-fold-sumfree predicate."""

import itertools
from fractions import Fraction

import numpy as np
import pytest
from pydantic import ValidationError

import constructions
from bounds import stripe_volume
from constructions import (
    CrossSectionFamily,
    PointSet,
    StripeSpec,
    best_stripe,
    complementary_pair_count,
    cross_section_union,
    integer_set_is_l_fold_sumfree,
    is_l_fold_sumfree,
    iter_box,
    materialize_stripe,
    stripe_contains,
    stripe_count,
)
from errors import AmbientMismatchError, InstanceTooLargeError, InvalidParameterError
from exact_math import bounded_composition_count


def _naive_is_sumfree(points, l):
    pts = sorted(points)
    members = set(pts)
    for combo in itertools.combinations_with_replacement(pts, l):
        total = tuple(sum(c) for c in zip(*combo))
        if total in members:
            return False
    return True


class TestPointSet:
    def test_rejects_points_outside_box(self):
        with pytest.raises(ValidationError):
            PointSet(ambient_n=2, ambient_k=2, points=frozenset({(1, 3)}))
        with pytest.raises(ValidationError):
            PointSet(ambient_n=2, ambient_k=2, points=frozenset({(1, 1, 1)}))

    def test_len_contains_density(self):
        s = PointSet(ambient_n=2, ambient_k=2, points=frozenset({(1, 2), (2, 1)}))
        assert len(s) == 2
        assert (1, 2) in s and (2, 2) not in s
        assert s.density() == 0.5
        assert s.sorted_points() == [(1, 2), (2, 1)]

    def test_iter_box_is_lexicographic(self):
        pts = list(iter_box(2, 2))
        assert pts == [(1, 1), (1, 2), (2, 1), (2, 2)]


class TestStripes:
    SPEC = StripeSpec(n=3, k=2, a=2, l=2)

    @pytest.mark.parametrize("p, expected", [((1, 1), True), ((2, 2), False), ((1, 2), True)])
    def test_contains(self, p, expected):
        assert stripe_contains(self.SPEC, p) is expected

    def test_contains_ambient_mismatch(self):
        with pytest.raises(AmbientMismatchError):
            stripe_contains(self.SPEC, (4, 1))
        with pytest.raises(AmbientMismatchError):
            stripe_contains(self.SPEC, (1, 1, 1))

    @pytest.mark.parametrize(
        "n, k, a, l, expected",
        [(3, 2, 2, 2, 3), (1, 2, 2, 2, 1), (2, 1, 2, 2, 1)],
    )
    def test_count_examples(self, n, k, a, l, expected):
        assert stripe_count(StripeSpec(n=n, k=k, a=a, l=l)) == expected

    def test_rational_offset_boundaries(self):
        # sums in [5/2, 5) are 3 and 4
        spec = StripeSpec(n=3, k=2, a=Fraction(5, 2), l=2)
        assert stripe_count(spec) == bounded_composition_count(2, 3, 3) + bounded_composition_count(2, 3, 4)
        assert not stripe_contains(spec, (1, 1))
        assert stripe_contains(spec, (2, 2))
        assert not stripe_contains(spec, (2, 3))

    def test_rejects_nonpositive_offset(self):
        with pytest.raises(ValidationError):
            StripeSpec(n=3, k=2, a=0)
        with pytest.raises(ValidationError):
            StripeSpec(n=3, k=2, a=2, l=1)

    def test_count_matches_enumeration(self):
        for n, k in [(4, 1), (5, 2), (4, 3), (3, 4)]:
            for l in (2, 3):
                for numer in range(1, 3 * k * n + 1):
                    spec = StripeSpec(n=n, k=k, a=Fraction(numer, 3), l=l)
                    direct = sum(1 for p in iter_box(n, k) if stripe_contains(spec, p))
                    assert stripe_count(spec) == direct
                    assert len(materialize_stripe(spec)) == direct

    def test_materialized_stripes_are_sumfree(self):
        for n, k in [(6, 1), (4, 2), (3, 3)]:
            for l in (2, 3):
                for a in range(1, k * n + 1):
                    if l * a > k * n + 1:
                        continue
                    spec = StripeSpec(n=n, k=k, a=a, l=l)
                    assert is_l_fold_sumfree(materialize_stripe(spec), l)

    @pytest.mark.parametrize(
        "n, k, a, l",
        [
            (30, 2, 15, 3),
            (10, 4, 14, 2),
        ],
    )
    def test_large_stripes_are_sumfree(self, n, k, a, l):
        spec = StripeSpec(n=n, k=k, a=a, l=l)
        s = materialize_stripe(spec)
        assert is_l_fold_sumfree(s, l)

    def test_work_cap_counts_visited_tuples(self, monkeypatch):
        s = materialize_stripe(StripeSpec(n=30, k=2, a=15, l=3))
        monkeypatch.setattr(constructions, "SUMFREE_WORK_CAP", 1000)
        with pytest.raises(InstanceTooLargeError, match="work cap 1000"):
            is_l_fold_sumfree(s, 3)

    def test_balanced_offset(self):
        spec = StripeSpec.balanced(9, 2, 2)
        assert spec.a == 6 and spec.upper == 12

    def test_materialize_cap(self):
        with pytest.raises(InstanceTooLargeError):
            materialize_stripe(StripeSpec(n=1000, k=2, a=100))

    @pytest.mark.parametrize("n", [30, 60, 120, 240])
    def test_lattice_count_converges_to_volume(self, n):
        k = 2
        spec = StripeSpec(n=n, k=k, a=Fraction(k * n, 3), l=2)
        volume = stripe_volume(k, Fraction(k, 3), 2)
        assert volume == Fraction(5, 9)
        error = abs(Fraction(stripe_count(spec), n**k) - volume)
        assert n * error <= 4

    def test_best_stripe_dominates_balanced(self):
        for n, k in [(3, 2), (6, 2), (4, 3)]:
            a, count = best_stripe(n, k, 2)
            assert count == stripe_count(StripeSpec(n=n, k=k, a=a))
            for other in range(1, k * n + 1):
                assert stripe_count(StripeSpec(n=n, k=k, a=other)) <= count


class TestSumfreePredicate:
    def test_examples(self):
        good = PointSet(ambient_n=2, ambient_k=2, points=frozenset({(1, 2), (2, 1), (2, 2)}))
        assert is_l_fold_sumfree(good, 2)

        bad = PointSet(ambient_n=2, ambient_k=2, points=frozenset({(1, 1), (2, 2)}))
        verdict = is_l_fold_sumfree(bad, 2)
        assert not verdict
        assert verdict.witness.summands == ((1, 1), (1, 1))
        assert verdict.witness.total == (2, 2)
        assert "(1, 1) + (1, 1) = (2, 2)" == verdict.witness.describe()

        assert is_l_fold_sumfree(PointSet(ambient_n=3, ambient_k=2), 2)

    def test_odd_numbers_are_sumfree(self):
        odds = PointSet(ambient_n=9, ambient_k=1, points=frozenset((x,) for x in range(1, 10, 2)))
        assert is_l_fold_sumfree(odds, 2)
        assert not is_l_fold_sumfree(odds, 3)  # 1 + 1 + 1 = 3

    def test_rejects_small_l(self):
        with pytest.raises(InvalidParameterError):
            is_l_fold_sumfree(PointSet(ambient_n=2, ambient_k=1), 1)

    def test_matches_naive_on_random_sets(self):
        rng = np.random.default_rng(42)
        for n, k in [(5, 1), (3, 2), (4, 2), (2, 3)]:
            box = list(iter_box(n, k))
            for _ in range(60):
                mask = rng.random(len(box)) < rng.uniform(0.1, 0.7)
                pts = frozenset(p for p, keep in zip(box, mask) if keep)
                s = PointSet(ambient_n=n, ambient_k=k, points=pts)
                for l in (2, 3):
                    verdict = is_l_fold_sumfree(s, l)
                    assert bool(verdict) == _naive_is_sumfree(pts, l)
                    if not verdict:
                        w = verdict.witness
                        assert len(w.summands) == l
                        assert tuple(sum(c) for c in zip(*w.summands)) == w.total
                        assert w.total in pts


class TestCrossSections:
    def test_examples(self):
        assert cross_section_union(CrossSectionFamily(n=2, k=2, sums=frozenset({3}))).points == {(1, 2), (2, 1)}
        assert len(cross_section_union(CrossSectionFamily(n=2, k=2))) == 0
        assert cross_section_union(CrossSectionFamily(n=2, k=2, sums=frozenset({2, 3}))).points == {
            (1, 1),
            (1, 2),
            (2, 1),
        }

    def test_rejects_sums_outside_range(self):
        with pytest.raises(ValidationError):
            CrossSectionFamily(n=2, k=2, sums=frozenset({1}))
        with pytest.raises(ValidationError):
            CrossSectionFamily(n=2, k=2, sums=frozenset({5}))

    def test_cardinality(self):
        fam = CrossSectionFamily(n=4, k=3, sums=frozenset({5, 7, 11}))
        expected = sum(bounded_composition_count(3, 4, a) for a in fam.sums)
        assert len(cross_section_union(fam)) == expected

    def test_integer_predicate(self):
        assert integer_set_is_l_fold_sumfree({1, 3, 5}, 2)
        assert not integer_set_is_l_fold_sumfree({2, 4}, 2)
        assert not integer_set_is_l_fold_sumfree({1, 3}, 3)
        assert integer_set_is_l_fold_sumfree(set(), 2)

    def test_sumfree_integer_sets_give_sumfree_unions(self):
        rng = np.random.default_rng(7)
        checked = 0
        for n, k in [(4, 2), (3, 3), (6, 2)]:
            candidates = list(range(k, k * n + 1))
            for _ in range(200):
                size = int(rng.integers(1, len(candidates) + 1))
                sums = set(int(x) for x in rng.choice(candidates, size=size, replace=False))
                for l in (2, 3):
                    if not integer_set_is_l_fold_sumfree(sums, l):
                        continue
                    union = cross_section_union(CrossSectionFamily(n=n, k=k, sums=frozenset(sums)))
                    assert is_l_fold_sumfree(union, l)
                    checked += 1
        assert checked > 0


class TestComplementaryPairs:
    def test_matches_enumeration(self):
        for b in [(2,), (5,), (6,), (3, 4), (4, 4), (2, 2, 2), (5, 3, 6)]:
            box = list(itertools.product(*[range(1, c) for c in b]))
            pairs = set()
            for x in box:
                y = tuple(c - xi for c, xi in zip(b, x))
                pairs.add(frozenset({x, y}))
            assert complementary_pair_count(b) == len(pairs)
