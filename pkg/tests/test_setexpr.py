from fractions import Fraction

import pytest
from hypothesis import given, settings

from gtskit.carriers import FiniteEnum, NatFC, QLine
from gtskit.errors import CarrierMismatch, UnrepresentablePoint
from gtskit import setexpr as sx

from conftest import any_sets, qline_sets, same_carrier_pairs, same_carrier_triples


def iv(lo, hi, lo_open=True, hi_open=True):
    return sx.interval(lo, hi, lo_open, hi_open)


def test_interval_normalization_merges_touching():
    # (0,1] u (1,2) collapses into one interval
    s = sx.union(iv(0, 1, True, False), iv(1, 2))
    assert sx.render(s) == "(0,2)"
    # (0,1) u (1,2) keeps the puncture
    s = sx.union(iv(0, 1), iv(1, 2))
    assert sx.render(s) == "(0,1) u (1,2)"
    # adding the point heals it
    s = sx.union(s, sx.qpoint(1))
    assert sx.render(s) == "(0,2)"


def test_interval_complement_exact():
    s = iv(0, 1, False, True)  # [0,1)
    c = sx.complement(s)
    assert sx.render(c) == "(-inf,0) u [1,+inf)"
    assert sx.union(s, c).is_whole()
    assert sx.intersect(s, c).is_empty()


def test_point_rendering_roundtrip_values():
    s = sx.union(iv(0, Fraction(1, 2)), sx.qpoint(3))
    assert sx.render(s) == "(0,1/2) u [3,3]"


def test_nat_cofinite_ops():
    a = sx.nat_cofinite([0, 1])
    b = sx.nat_finite([1, 2])
    assert sx.render(sx.union(a, b)) == "co{0}"
    assert sx.render(sx.intersect(a, b)) == "{2}"
    assert sx.render(sx.complement(a)) == "{0,1}"
    assert sx.render(sx.minus(a, b)) == "co{0,1,2}"


def test_enum_ops():
    c = FiniteEnum(("a", "b", "c"))
    ab = sx.atoms(c, ["a", "b"])
    bc = sx.atoms(c, ["b", "c"])
    assert sx.render(sx.intersect(ab, bc)) == "{b}"
    assert sx.render(sx.union(ab, bc)) == "{a,b,c}"
    assert sx.union(ab, bc).is_whole()


def test_mixed_carrier_rejected():
    with pytest.raises(CarrierMismatch):
        sx.union(sx.nat_finite([0]), iv(0, 1))


def test_contains_matrix():
    s = sx.union(iv(0, 1, False, True), sx.qpoint(2))
    assert sx.contains(s, 0)
    assert sx.contains(s, Fraction(1, 2))
    assert not sx.contains(s, 1)
    assert sx.contains(s, 2)
    assert not sx.contains(s, -1)


def test_closure_and_interior():
    s = sx.union(iv(0, 1), sx.qpoint(2))
    assert sx.render(sx.interval_closure(s)) == "[0,1] u [2,2]"
    assert sx.render(sx.interval_interior(s)) == "(0,1)"
    # idempotent
    assert sx.interval_closure(sx.interval_closure(s)) == sx.interval_closure(s)
    assert sx.interval_interior(sx.interval_interior(s)) == sx.interval_interior(s)


def test_enumerate_points_lands_inside():
    s = sx.union(iv(0, 1), iv(5, 6, False, False))
    for x in sx.enumerate_points(s, 20):
        assert sx.contains(s, x)


# -- algebraic laws -------------------------------------------------------

@given(same_carrier_pairs())
def test_union_commutes(pair):
    a, b = pair
    assert sx.union(a, b) == sx.union(b, a)


@given(same_carrier_pairs())
def test_intersect_commutes(pair):
    a, b = pair
    assert sx.intersect(a, b) == sx.intersect(b, a)


@given(same_carrier_triples())
def test_union_associates(triple):
    a, b, c = triple
    assert sx.union(sx.union(a, b), c) == sx.union(a, sx.union(b, c))


@given(same_carrier_triples())
def test_distributivity(triple):
    a, b, c = triple
    assert sx.intersect(a, sx.union(b, c)) == \
        sx.union(sx.intersect(a, b), sx.intersect(a, c))


@given(any_sets)
def test_complement_involution(a):
    assert sx.complement(sx.complement(a)) == a


@given(same_carrier_pairs())
def test_de_morgan(pair):
    a, b = pair
    assert sx.complement(sx.union(a, b)) == \
        sx.intersect(sx.complement(a), sx.complement(b))


@given(any_sets)
def test_idempotence_and_absorption(a):
    assert sx.union(a, a) == a
    assert sx.intersect(a, a) == a
    assert sx.union(a, sx.empty(a.carrier)) == a
    assert sx.intersect(a, sx.whole(a.carrier)) == a


@given(same_carrier_pairs())
def test_minus_is_intersection_with_complement(pair):
    a, b = pair
    assert sx.minus(a, b) == sx.intersect(a, sx.complement(b))


@given(same_carrier_pairs())
def test_subset_consistent_with_union(pair):
    a, b = pair
    assert sx.is_subset(a, b) == (sx.union(a, b) == b)


@given(qline_sets())
@settings(max_examples=60)
def test_normalization_is_canonical(a):
    # rebuilding from the rendered pieces gives the identical object
    rebuilt = sx.empty(QLine())
    for piece in a.form:
        rebuilt = sx.union(
            rebuilt,
            sx.interval(piece.lo, piece.hi, piece.lo_open, piece.hi_open),
        )
    assert rebuilt == a
    assert hash(rebuilt) == hash(a)


@given(same_carrier_pairs())
@settings(max_examples=60)
def test_contains_respects_ops(pair):
    a, b = pair
    pts = sx.enumerate_points(sx.union(a, b), 8)
    for x in pts:
        assert sx.contains(sx.union(a, b), x) == \
            (sx.contains(a, x) or sx.contains(b, x))
        assert sx.contains(sx.intersect(a, b), x) == \
            (sx.contains(a, x) and sx.contains(b, x))
