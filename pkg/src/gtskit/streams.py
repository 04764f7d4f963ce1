"""Parametric streams: the only infinite-family mechanism.

Every stream is either *monotone* (members increase with the index, so the
union is approached from inside at a known rate) or *pointwise* (members are
pairwise disjoint finite sets).  Both shapes make essential-finiteness and
refinement questions exactly decidable via a large-enough-stage argument:
all residual phenomena happen within a computable distance of finitely many
critical endpoints.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .carriers import NatFC, QLine
from . import setexpr as sx
from .setexpr import NEG_INF, POS_INF, SetExpr


class Stream:
    """Common stream interface."""

    carrier = None
    n0: int = 0
    monotone: bool = True  # pointwise streams override

    def member(self, n: int) -> SetExpr:
        raise NotImplementedError

    def union(self) -> SetExpr:
        raise NotImplementedError

    def critical_endpoints(self) -> set:
        """Finite endpoint values near which members approach the union."""
        return set()

    def index_of(self, x):
        """For pointwise streams: an index whose member contains x, or None."""
        return None

    def stage_sufficient(self, eps: Fraction, radius: Fraction) -> int:
        """A stage past which members are eps-close to the union out to radius."""
        return self.n0

    def render(self) -> str:
        raise NotImplementedError

    def __repr__(self):
        return f"<stream {self.render()}>"

    def __eq__(self, other):
        return type(self) is type(other) and self.render() == other.render()

    def __hash__(self):
        return hash((type(self).__name__, self.render()))


def _fin(x):
    return x not in (NEG_INF, POS_INF)


@dataclass(frozen=True, eq=False)
class ShrinkIntervals(Stream):
    """Open intervals (a + la/n, b - lb/n) increasing to (a, b).

    ``rate_left``/``rate_right`` of 0 mean the endpoint does not move; the
    rates are kept rational so affine images stay in the schema.
    """

    a: object
    b: object
    rate_left: Fraction
    rate_right: Fraction
    n0: int

    carrier = QLine()
    monotone = True

    def __post_init__(self):
        a = self.a if self.a == NEG_INF else Fraction(self.a)
        b = self.b if self.b == POS_INF else Fraction(self.b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "rate_left", Fraction(self.rate_left))
        object.__setattr__(self, "rate_right", Fraction(self.rate_right))
        if self.rate_left < 0 or self.rate_right < 0:
            raise ValueError("rates must be nonnegative")
        if self.rate_left > 0 and not _fin(a):
            raise ValueError("cannot shrink an infinite left endpoint")
        if self.rate_right > 0 and not _fin(b):
            raise ValueError("cannot shrink an infinite right endpoint")
        if self.n0 < 1:
            raise ValueError("n0 must be >= 1")
        if self.member(self.n0).is_empty():
            raise ValueError("first member is empty; raise n0")

    def member(self, n: int) -> SetExpr:
        lo = self.a + self.rate_left / n if self.rate_left else self.a
        hi = self.b - self.rate_right / n if self.rate_right else self.b
        return sx.interval(lo, hi, True, True)

    def union(self) -> SetExpr:
        return sx.interval(self.a, self.b, True, True)

    def critical_endpoints(self) -> set:
        out = set()
        if self.rate_left:
            out.add(Fraction(self.a))
        if self.rate_right:
            out.add(Fraction(self.b))
        return out

    def stage_sufficient(self, eps: Fraction, radius: Fraction) -> int:
        n = self.n0
        top = max(self.rate_left, self.rate_right)
        if top > 0 and eps > 0:
            n = max(n, int(top / eps) + 1)
        return n

    def render(self) -> str:
        return "shrink(%s,%s,%s,%s,%d)" % (
            sx.rq(self.a), sx.rq(self.b),
            str(self.rate_left), str(self.rate_right), self.n0,
        )


def shrink(a, b, mode: str = "both", n0: int = 3) -> ShrinkIntervals:
    """Convenience builder: mode in {left, right, both, none}, unit rates."""
    rl = Fraction(1) if mode in ("left", "both") else Fraction(0)
    rr = Fraction(1) if mode in ("right", "both") else Fraction(0)
    return ShrinkIntervals(a, b, rl, rr, n0)


@dataclass(frozen=True, eq=False)
class GrowBalls(Stream):
    """Open intervals (center - rate*n, center + rate*n) exhausting the line."""

    n0: int
    center: Fraction = Fraction(0)
    rate: Fraction = Fraction(1)

    carrier = QLine()
    monotone = True

    def __post_init__(self):
        object.__setattr__(self, "center", Fraction(self.center))
        object.__setattr__(self, "rate", Fraction(self.rate))
        if self.rate <= 0:
            raise ValueError("rate must be positive")
        if self.n0 < 1:
            raise ValueError("n0 must be >= 1")

    def member(self, n: int) -> SetExpr:
        return sx.interval(self.center - self.rate * n, self.center + self.rate * n)

    def union(self) -> SetExpr:
        return sx.whole(QLine())

    def stage_sufficient(self, eps: Fraction, radius: Fraction) -> int:
        return max(self.n0, int((radius + abs(self.center)) / self.rate) + 1)

    def render(self) -> str:
        if self.center == 0 and self.rate == 1:
            return "growballs(%d)" % self.n0
        return "growballs(%d,%s,%s)" % (self.n0, self.center, self.rate)


@dataclass(frozen=True, eq=False)
class InitialSegments(Stream):
    """Initial segments {0..n+offset} of the naturals."""

    n0: int
    offset: int = 0

    carrier = NatFC()
    monotone = True

    def __post_init__(self):
        if self.n0 + self.offset < 0:
            raise ValueError("first member is empty; raise n0")

    def member(self, n: int) -> SetExpr:
        top = n + self.offset
        return sx.nat_finite(range(top + 1)) if top >= 0 else sx.nat_finite([])

    def union(self) -> SetExpr:
        return sx.whole(NatFC())

    def stage_sufficient(self, eps: Fraction, radius: Fraction) -> int:
        return max(self.n0, int(radius) - self.offset + 1)

    def render(self) -> str:
        if self.offset:
            return "initsegs(%d,%d)" % (self.n0, self.offset)
        return "initsegs(%d)" % self.n0


@dataclass(frozen=True, eq=False)
class Singletons(Stream):
    """All singletons {n}, n in N: pairwise disjoint, not monotone."""

    carrier = NatFC()
    n0 = 0
    monotone = False

    def member(self, n: int) -> SetExpr:
        return sx.nat_finite([n])

    def union(self) -> SetExpr:
        return sx.whole(NatFC())

    def index_of(self, x):
        return int(x)

    def render(self) -> str:
        return "singletons"


@dataclass(frozen=True, eq=False)
class DerivedStream(Stream):
    """A shipped stream post-composed with a fixed union or intersection.

    Both operations preserve monotonicity (and the pointwise shape for the
    intersection case), and commute with the union of the stream, so all
    exact decisions still apply.
    """

    base: Stream
    op: str  # "clip" (intersect) or "merge" (union)
    other: SetExpr

    def __post_init__(self):
        if self.op not in ("clip", "merge"):
            raise ValueError("op must be clip or merge")
        if self.op == "merge" and not self.base.monotone:
            raise ValueError("merge of a pointwise stream is not a stream shape")

    @property
    def carrier(self):
        return self.base.carrier

    @property
    def n0(self):
        return self.base.n0

    @property
    def monotone(self):
        return self.base.monotone

    def member(self, n: int) -> SetExpr:
        m = self.base.member(n)
        return sx.intersect(m, self.other) if self.op == "clip" else sx.union(m, self.other)

    def union(self) -> SetExpr:
        u = self.base.union()
        return sx.intersect(u, self.other) if self.op == "clip" else sx.union(u, self.other)

    def critical_endpoints(self) -> set:
        out = set(self.base.critical_endpoints())
        out |= set_endpoints(self.other)
        return out

    def index_of(self, x):
        if self.op == "clip" and not sx.contains(self.other, x):
            return None
        return self.base.index_of(x)

    def stage_sufficient(self, eps: Fraction, radius: Fraction) -> int:
        return self.base.stage_sufficient(eps, radius)

    def render(self) -> str:
        return "%s(%s, %s)" % (self.op, self.base.render(), sx.render(self.other))


def clip_stream(s: Stream, v: SetExpr) -> DerivedStream:
    return DerivedStream(s, "clip", v)


def merge_stream(s: Stream, v: SetExpr) -> DerivedStream:
    return DerivedStream(s, "merge", v)


def set_endpoints(S: SetExpr) -> set:
    """Finite endpoint/element values of a QLine or NatFC SetExpr."""
    if isinstance(S.carrier, QLine):
        out = set()
        for iv in S.form:
            if _fin(iv.lo):
                out.add(Fraction(iv.lo))
            if _fin(iv.hi):
                out.add(Fraction(iv.hi))
        return out
    if isinstance(S.carrier, NatFC):
        elems, _ = S.form
        return {Fraction(x) for x in elems}
    return set()
