"""Finitely-presented open families and their exact decision procedures."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .carriers import Carrier, FiniteEnum, NatFC, Product, QLine
from .errors import CarrierMismatch
from . import setexpr as sx
from .setexpr import NEG_INF, POS_INF, SetExpr
from .streams import (
    DerivedStream,
    GrowBalls,
    InitialSegments,
    ShrinkIntervals,
    Singletons,
    Stream,
    clip_stream,
    merge_stream,
    set_endpoints,
)


@dataclass(frozen=True)
class FamilyExpr:
    carrier: Carrier
    finite_part: tuple[SetExpr, ...] = ()
    streams: tuple[Stream, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "finite_part", tuple(self.finite_part))
        object.__setattr__(self, "streams", tuple(self.streams))
        for m in self.finite_part:
            if m.carrier != self.carrier:
                raise CarrierMismatch("family member on the wrong carrier")
        for s in self.streams:
            if s.carrier != self.carrier:
                raise CarrierMismatch("stream on the wrong carrier")

    def is_finite(self) -> bool:
        return not self.streams

    def sample_members(self, stages: int = 3) -> list[SetExpr]:
        out = list(self.finite_part)
        for s in self.streams:
            for n in range(s.n0, s.n0 + stages):
                out.append(s.member(n))
        return out

    def render(self) -> str:
        parts = ["{%s}" % ", ".join(sx.render(m) for m in self.finite_part)]
        for s in self.streams:
            parts.append("stream " + s.render())
        return " + ".join(parts)


def family_union(F: FamilyExpr) -> SetExpr:
    u = sx.empty(F.carrier)
    for m in F.finite_part:
        u = sx.union(u, m)
    for s in F.streams:
        u = sx.union(u, s.union())
    return u


def clip_family(F: FamilyExpr, V: SetExpr) -> FamilyExpr:
    """The family of member-wise intersections with a fixed set."""
    return FamilyExpr(
        F.carrier,
        tuple(sx.intersect(m, V) for m in F.finite_part),
        tuple(clip_stream(s, V) for s in F.streams),
    )


def merge_family(F: FamilyExpr, V: SetExpr) -> FamilyExpr:
    """The family of member-wise unions with a fixed set."""
    return FamilyExpr(
        F.carrier,
        tuple(sx.union(m, V) for m in F.finite_part),
        tuple(merge_stream(s, V) for s in F.streams),
    )


def union_families(F: FamilyExpr, G: FamilyExpr) -> FamilyExpr:
    if F.carrier != G.carrier:
        raise CarrierMismatch("families on different carriers")
    return FamilyExpr(F.carrier, F.finite_part + G.finite_part, F.streams + G.streams)


def pointwise_union(F: FamilyExpr, G: FamilyExpr) -> FamilyExpr:
    """{A u B : A in F, B in G}; at most one side may carry streams."""
    return _pointwise(F, G, merge_family, sx.union)


def pointwise_intersection(F: FamilyExpr, G: FamilyExpr) -> FamilyExpr:
    """{A n B : A in F, B in G}; at most one side may carry streams."""
    return _pointwise(F, G, clip_family, sx.intersect)


def _pointwise(F, G, one_sided, op):
    if F.carrier != G.carrier:
        raise CarrierMismatch("families on different carriers")
    if F.streams and G.streams:
        raise ValueError("pointwise operation needs one stream-free side")
    if G.streams:
        F, G = G, F
    parts: list[SetExpr] = []
    streams: list[Stream] = []
    for b in G.finite_part:
        H = one_sided(F, b)
        parts.extend(H.finite_part)
        streams.extend(H.streams)
    return FamilyExpr(F.carrier, tuple(parts), tuple(streams))


# -- essential finiteness -------------------------------------------------

@dataclass(frozen=True)
class WitnessMember:
    source: str  # "finite" or the stream render
    index: int
    stage: int | None
    set: SetExpr


@dataclass(frozen=True)
class EssFinResult:
    yes: bool
    witness: tuple[WitnessMember, ...] = ()
    reason: str = ""


def _endpoint_pool(sets: list[SetExpr], streams: list[Stream]) -> set[Fraction]:
    pool: set[Fraction] = set()
    for S in sets:
        pool |= set_endpoints(S)
    for s in streams:
        pool |= set(s.critical_endpoints())
        pool |= set_endpoints(s.union())
    return pool


def large_stage(streams: list[Stream], sets: list[SetExpr]) -> int:
    """A stage past which monotone coverage questions stabilize.

    All residual behavior of monotone streams happens within a shrinking
    band around finitely many critical endpoints; once the band is thinner
    than every positive gap between relevant endpoints (and the growing
    streams reach past every relevant value), coverage at the returned
    stage equals coverage in the limit.
    """
    pool = _endpoint_pool(sets, streams)
    vals = sorted(pool)
    eps = Fraction(1)
    for p, q in zip(vals, vals[1:]):
        if q > p:
            eps = min(eps, q - p)
    eps = eps / 2
    radius = max((abs(v) for v in vals), default=Fraction(0)) + 1
    stage = 2
    for s in streams:
        stage = max(stage, s.n0, s.stage_sufficient(eps, radius))
    return stage + 1


def _coverage_at(streams: list[Stream], stage: int, base: SetExpr) -> SetExpr:
    cov = base
    for s in streams:
        cov = sx.union(cov, s.member(max(stage, s.n0)))
    return cov


def essentially_finite_on(F: FamilyExpr, K: SetExpr) -> EssFinResult:
    """Does a finite subfamily of F cover K n union(F)?"""
    if K.carrier != F.carrier:
        raise CarrierMismatch("K on the wrong carrier")
    target = sx.intersect(K, family_union(F))
    witness: list[WitnessMember] = []
    residual = target
    # prefer finite members, in list order
    for i, m in enumerate(F.finite_part):
        if residual.is_empty():
            break
        if not sx.intersect(m, residual).is_empty():
            witness.append(WitnessMember("finite", i, None, m))
            residual = sx.minus(residual, m)
    if residual.is_empty():
        return EssFinResult(True, tuple(witness), "covered by finite part")

    monotone = [s for s in F.streams if s.monotone]
    pointwise = [s for s in F.streams if not s.monotone]
    pw_union = sx.empty(F.carrier)
    for s in pointwise:
        pw_union = sx.union(pw_union, s.union())

    def absorbable(rem: SetExpr) -> bool:
        # pointwise streams can only pick up finitely many points
        if rem.is_empty():
            return True
        return bool(pointwise) and rem.is_finite_pointset() and sx.is_subset(rem, pw_union)

    if monotone:
        cap = large_stage(monotone, [residual] + list(F.finite_part))
        leftover = lambda n: sx.minus(residual, _coverage_at(monotone, n, sx.empty(F.carrier)))
        if not absorbable(leftover(cap)):
            return EssFinResult(False, (), "residual approaches a stream limit")
        lo, hi = 1, cap  # smallest sufficient shared stage, by bisection
        while lo < hi:
            mid = (lo + hi) // 2
            if absorbable(leftover(mid)):
                hi = mid
            else:
                lo = mid + 1
        stage = lo
        covered_part = sx.intersect(residual, _coverage_at(monotone, stage, sx.empty(F.carrier)))
        for j, s in enumerate(F.streams):
            if s.monotone and not sx.intersect(s.member(max(stage, s.n0)), covered_part).is_empty():
                witness.append(WitnessMember(s.render(), j, max(stage, s.n0), s.member(max(stage, s.n0))))
        residual = leftover(stage)
    elif not absorbable(residual):
        if pointwise:
            return EssFinResult(False, (), "infinite residual against pointwise streams")
        return EssFinResult(False, (), "residual not covered by any finite subfamily")

    if not residual.is_empty():
        for j, s in enumerate(F.streams):
            if s.monotone or residual.is_empty():
                continue
            for x in residual.finite_points():
                x = int(x)
                idx = s.index_of(x)
                if idx is not None:
                    witness.append(WitnessMember(s.render(), j, idx, s.member(idx)))
            residual = sx.minus(residual, s.union())
        if not residual.is_empty():
            return EssFinResult(False, (), "residual outside all members")
    return EssFinResult(True, tuple(witness), "finite subfamily covers the target")


# -- refinement -----------------------------------------------------------

def _contained_in_some_member(A: SetExpr, G: FamilyExpr) -> bool:
    if A.is_empty():
        return True
    for B in G.finite_part:
        if sx.is_subset(A, B):
            return True
    for s in G.streams:
        if not s.monotone:
            pts = A.finite_points() if A.is_finite_pointset() else None
            if pts is not None and len(pts) == 1 and sx.is_subset(A, s.union()):
                return True
            continue
        stage = large_stage([s], [A])
        if sx.is_subset(A, s.member(stage)):
            return True
    return False


def _lo_descriptor(s: Stream):
    """(limit, kind) for the left endpoint: kind in {const, above, to_inf}."""
    if isinstance(s, DerivedStream):
        return None
    if isinstance(s, ShrinkIntervals):
        return (s.a, "above" if s.rate_left else "const")
    if isinstance(s, GrowBalls):
        return (NEG_INF, "to_inf")
    if isinstance(s, InitialSegments):
        return (Fraction(0), "const")
    return None


def _hi_descriptor(s: Stream):
    if isinstance(s, DerivedStream):
        return None
    if isinstance(s, ShrinkIntervals):
        return (s.b, "below" if s.rate_right else "const")
    if isinstance(s, GrowBalls):
        return (POS_INF, "to_inf")
    if isinstance(s, InitialSegments):
        return (POS_INF, "to_inf")
    return None


def _stream_tail_contained(f: Stream, G: FamilyExpr) -> bool:
    """Every member of monotone stream f sits inside some member of G."""
    fu = f.union()
    for B in G.finite_part:
        if sx.is_subset(fu, B):
            return True
    for g in G.streams:
        if not g.monotone:
            continue
        flo, fhi = _lo_descriptor(f), _hi_descriptor(f)
        glo, ghi = _lo_descriptor(g), _hi_descriptor(g)
        if None in (flo, fhi, glo, ghi):
            continue
        if _left_fits(glo, flo) and _right_fits(ghi, fhi):
            return True
    return False


def _left_fits(g, f) -> bool:
    (gl, gk), (fl, fk) = g, f
    if gk == "to_inf":
        return True
    if fk == "to_inf":
        return False
    if gk == "const":
        return gl <= fl
    # g approaches gl from above, never attaining it
    if fk == "above":
        return gl <= fl
    return gl < fl


def _right_fits(g, f) -> bool:
    (gl, gk), (fl, fk) = g, f
    if gk == "to_inf":
        return True
    if fk == "to_inf":
        return False
    if gk == "const":
        return gl >= fl
    if fk == "below":
        return gl >= fl
    return gl > fl


def refines(F: FamilyExpr, G: FamilyExpr) -> bool:
    """Same union, and every member of F lies inside some member of G."""
    if F.carrier != G.carrier:
        raise CarrierMismatch("families on different carriers")
    if family_union(F) != family_union(G):
        return False
    for A in F.finite_part:
        if not _contained_in_some_member(A, G):
            return False
    for s in F.streams:
        if not s.monotone:
            # singleton members: each point of the union lies in some member
            # of G because the unions coincide
            continue
        if not _stream_tail_contained(s, G):
            return False
    return True
