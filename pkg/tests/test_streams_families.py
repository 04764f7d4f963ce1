from fractions import Fraction

import pytest

from gtskit.carriers import NatFC, QLine
from gtskit.families import (
    FamilyExpr,
    clip_family,
    essentially_finite_on,
    family_union,
    large_stage,
    merge_family,
    pointwise_intersection,
    pointwise_union,
    refines,
    union_families,
)
from gtskit import setexpr as sx
from gtskit.streams import (
    GrowBalls,
    InitialSegments,
    ShrinkIntervals,
    Singletons,
    clip_stream,
)


def shrink01(n0=3):
    return ShrinkIntervals(0, 1, Fraction(1), Fraction(1), n0)


def test_shrink_members():
    s = shrink01()
    assert sx.render(s.member(3)) == "(1/3,2/3)"
    assert sx.render(s.member(10)) == "(1/10,9/10)"
    assert sx.render(s.union()) == "(0,1)"
    # monotone growth
    for n in range(3, 12):
        assert sx.is_subset(s.member(n), s.member(n + 1))


def test_shrink_one_sided():
    s = ShrinkIntervals(0, 1, Fraction(0), Fraction(1), 2)
    assert sx.render(s.member(2)) == "(0,1/2)"
    assert sx.render(s.union()) == "(0,1)"


def test_growballs_members():
    s = GrowBalls(1)
    assert sx.render(s.member(2)) == "(-2,2)"
    assert s.union().is_whole()


def test_initial_segments():
    s = InitialSegments(0)
    assert sx.render(s.member(0)) == "{0}"
    assert sx.render(s.member(3)) == "{0,1,2,3}"
    assert s.union().is_whole()


def test_singletons_pointwise():
    s = Singletons()
    assert not s.monotone
    assert sx.render(s.member(5)) == "{5}"
    assert s.index_of(7) == 7
    assert s.union().is_whole()


def test_clip_stream_members_are_clipped():
    window = sx.interval(0, Fraction(1, 2))
    c = clip_stream(shrink01(), window)
    for n in range(3, 8):
        assert sx.is_subset(c.member(n), window)
    assert c.union() == window


def test_family_union_includes_stream_unions():
    F = FamilyExpr(QLine(), (sx.interval(5, 6),), (shrink01(),))
    assert sx.render(family_union(F)) == "(0,1) u (5,6)"


def test_union_and_pointwise_combinators():
    F = FamilyExpr(QLine(), (sx.interval(0, 1),))
    G = FamilyExpr(QLine(), (sx.interval(2, 3),))
    u = union_families(F, G)
    assert len(u.finite_part) == 2
    pu = pointwise_union(F, G)
    assert sx.render(pu.finite_part[0]) == "(0,1) u (2,3)"
    pi = pointwise_intersection(F, G)
    assert pi.finite_part[0].is_empty()


def test_refines():
    fine = FamilyExpr(QLine(), (sx.interval(0, 1), sx.interval(1, 2)))
    coarse = FamilyExpr(QLine(), (sx.interval(0, 2),))
    assert not refines(fine, coarse)  # unions differ by the puncture at 1
    healed = FamilyExpr(
        QLine(), (sx.interval(0, 1, True, False), sx.interval(1, 2, False, True)))
    assert refines(healed, coarse)
    assert not refines(coarse, healed)


# -- essential finiteness -------------------------------------------------

def test_shrink_alone_not_essentially_finite():
    F = FamilyExpr(QLine(), (), (shrink01(),))
    r = essentially_finite_on(F, sx.interval(0, 1))
    assert not r.yes


def test_shrink_with_absorbing_interval():
    F = FamilyExpr(QLine(), (sx.interval(0, 1),), (shrink01(),))
    r = essentially_finite_on(F, sx.interval(0, 1))
    assert r.yes


def test_shrink_with_larger_interval():
    F = FamilyExpr(QLine(), (sx.interval(0, 2),), (shrink01(),))
    r = essentially_finite_on(F, family_union(F))
    assert r.yes


def test_singletons_not_essentially_finite_on_infinite_set():
    F = FamilyExpr(NatFC(), (), (Singletons(),))
    r = essentially_finite_on(F, sx.whole(NatFC()))
    assert not r.yes
    # but on a finite window it is
    r = essentially_finite_on(F, sx.nat_finite([0, 4, 9]))
    assert r.yes


def test_initial_segments_absorbed_by_whole():
    F = FamilyExpr(NatFC(), (sx.whole(NatFC()),), (InitialSegments(0),))
    r = essentially_finite_on(F, sx.whole(NatFC()))
    assert r.yes


def test_large_stage_bounds_monotone_streams():
    s = shrink01()
    stage = large_stage([s], [sx.interval(Fraction(1, 4), Fraction(3, 4))])
    # from that stage on the member already contains (1/4,3/4)
    assert sx.is_subset(
        sx.interval(Fraction(1, 4), Fraction(3, 4)), s.member(stage))


def test_clip_and_merge_families():
    F = FamilyExpr(QLine(), (sx.interval(0, 2),), (shrink01(),))
    V = sx.interval(1, 3)
    clipped = clip_family(F, V)
    assert all(sx.is_subset(m, V) for m in clipped.finite_part)
    merged = merge_family(F, V)
    assert all(sx.is_subset(V, m) for m in merged.finite_part)
