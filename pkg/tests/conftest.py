"""Shared strategies for drawing carriers, sets, and families."""

from fractions import Fraction

from hypothesis import strategies as st

from gtskit.carriers import FiniteEnum, NatFC, QLine
from gtskit import setexpr as sx

rationals = st.fractions(
    min_value=Fraction(-8), max_value=Fraction(8), max_denominator=6
)

endpoints = st.one_of(
    rationals,
    st.just(sx.NEG_INF),
    st.just(sx.POS_INF),
)


@st.composite
def qline_sets(draw):
    n = draw(st.integers(min_value=0, max_value=4))
    parts = []
    for _ in range(n):
        lo = draw(endpoints)
        hi = draw(endpoints)
        if lo is sx.POS_INF or hi is sx.NEG_INF:
            continue
        if isinstance(lo, Fraction) and isinstance(hi, Fraction) and lo > hi:
            lo, hi = hi, lo
        lo_open = lo is sx.NEG_INF or draw(st.booleans())
        hi_open = hi is sx.POS_INF or draw(st.booleans())
        if lo == hi:
            lo_open = hi_open = False
        parts.append(sx.interval(lo, hi, lo_open, hi_open))
    out = sx.empty(QLine())
    for p in parts:
        out = sx.union(out, p)
    return out


@st.composite
def nat_sets(draw):
    elems = draw(st.sets(st.integers(min_value=0, max_value=12), max_size=5))
    if draw(st.booleans()):
        return sx.nat_cofinite(elems)
    return sx.nat_finite(elems)


ENUM3 = FiniteEnum(("a", "b", "c"))


@st.composite
def enum_sets(draw, carrier=ENUM3):
    picked = draw(st.sets(st.sampled_from(carrier.elements), max_size=3))
    return sx.atoms(carrier, picked)


any_sets = st.one_of(qline_sets(), nat_sets(), enum_sets())


@st.composite
def same_carrier_pairs(draw):
    kind = draw(st.sampled_from(("q", "n", "e")))
    s = {"q": qline_sets, "n": nat_sets, "e": enum_sets}[kind]
    return draw(s()), draw(s())


@st.composite
def same_carrier_triples(draw):
    kind = draw(st.sampled_from(("q", "n", "e")))
    s = {"q": qline_sets, "n": nat_sets, "e": enum_sets}[kind]
    return draw(s()), draw(s()), draw(s())
