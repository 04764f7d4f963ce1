"""Space constructors: subspaces, products, gluing, sums, adjoint functors."""

from __future__ import annotations

import random

from .carriers import FiniteEnum, NatFC, Product, QLine
from .errors import (
    BallNotOpen,
    CarrierMismatch,
    IncompatibleTraces,
    NonSmallFactor,
    OverlapNotOpen,
    UnsupportedPresentation,
    UnsupportedSubset,
)
from .exhaustions import Exhaustion
from .families import FamilyExpr, clip_family, family_union
from .maps import Composite, Projection, SpaceMap, identity_map
from .presentation import (
    All,
    AllCanonicalOpen,
    AllSets,
    EssCountable,
    EssFin,
    ExplicitList,
    FiniteOrWhole,
    GluedOpens,
    GtsPresentation,
    LocallyEssFin,
    PiecewiseEssFin,
    ProductOpens,
    TraceOpens,
    enumerate_opens,
    is_open,
    smallness,
)
from . import setexpr as sx
from .setexpr import SetExpr
from .streams import GrowBalls, clip_stream


# -- subspaces ------------------------------------------------------------

def subspace(X: GtsPresentation, Y: SetExpr) -> GtsPresentation:
    """The trace presentation on Y, where the theory provides one."""
    if Y.carrier != X.carrier:
        raise CarrierMismatch("subset on the wrong carrier")
    support = sx.intersect(Y, X.support)
    opens = TraceOpens(X, support)
    open_in_X = is_open(X, support)
    small = smallness(X, support)
    layered = isinstance(X.policy, (LocallyEssFin, PiecewiseEssFin))
    if not (open_in_X or small.is_small() or layered):
        raise UnsupportedSubset(
            "subset is neither open nor small, and the policy carries no layers"
        )
    if small.is_small():
        policy = EssFin()
    elif isinstance(X.policy, LocallyEssFin):
        policy = LocallyEssFin(clip_family(X.policy.base, support))
    elif isinstance(X.policy, PiecewiseEssFin):
        policy = PiecewiseEssFin(_trace_exhaustion(X.policy.exhaustion, support))
    else:
        policy = X.policy
    name = (X.name + "|" + sx.render(support)) if X.name else ""
    return GtsPresentation(X.carrier, opens, policy, support, name)


def _trace_exhaustion(exh: Exhaustion, Y: SetExpr) -> Exhaustion:
    if exh.is_chain():
        return Exhaustion(chain=clip_stream(exh.chain, Y))
    pieces = tuple((i, sx.intersect(P, Y)) for i, P in exh.pieces)
    return Exhaustion(poset=exh.poset, pieces=pieces)


# -- products -------------------------------------------------------------

def _is_small_space(X: GtsPresentation) -> bool:
    return isinstance(X.policy, EssFin) or isinstance(X.carrier, FiniteEnum)


def product(Xs: list) -> tuple:
    """Finite product of small spaces; returns (space, projections)."""
    if not Xs:
        raise ValueError("product needs at least one factor")
    for X in Xs:
        if not _is_small_space(X):
            raise NonSmallFactor(X.name or X.carrier.describe())
    if len(Xs) == 1:
        X = Xs[0]
        return X, [identity_map(X, name="pi1")]
    left, lprojs = product(Xs[:-1])
    right = Xs[-1]
    carrier = Product(left.carrier, right.carrier)
    support = sx.box(left.support, right.support)
    name = "x".join(x.name or "?" for x in Xs)
    P = GtsPresentation(carrier, ProductOpens(left, right), EssFin(), support, name)
    pl = SpaceMap(P, left, Projection("left"), name="pi_left")
    projs = []
    for i, lp in enumerate(lprojs):
        if len(Xs) == 2:
            projs.append(SpaceMap(P, left, Projection("left"), name="pi1"))
        else:
            projs.append(SpaceMap(P, lp.codomain, Composite(lp, pl),
                                  name="pi%d" % (i + 1)))
    projs.append(SpaceMap(P, right, Projection("right"), name="pi%d" % len(Xs)))
    return P, projs


# -- gluing and sums ------------------------------------------------------

def glue(pieces: list) -> GtsPresentation:
    """The admissible union of open-overlapping pieces on a shared carrier."""
    if not pieces:
        raise ValueError("glue needs at least one piece")
    carrier = pieces[0].carrier
    for P in pieces:
        if P.carrier != carrier:
            raise CarrierMismatch("pieces on different carriers")
    for i, A in enumerate(pieces):
        for B in pieces[i + 1:]:
            O = sx.intersect(A.support, B.support)
            if O.is_empty():
                continue
            if not (is_open(A, O) and is_open(B, O)):
                raise OverlapNotOpen(sx.render(O))
            _check_trace_agreement(A, B, O)
    support = sx.empty(carrier)
    for P in pieces:
        support = sx.union(support, P.support)
    base = FamilyExpr(carrier, tuple(P.support for P in pieces))
    return GtsPresentation(
        carrier, GluedOpens(tuple(pieces)), LocallyEssFin(base), support,
        name="glue(%s)" % ",".join(P.name or "?" for P in pieces),
    )


def _check_trace_agreement(A: GtsPresentation, B: GtsPresentation, O: SetExpr):
    """Probe that the two pieces induce the same opens on the overlap."""
    if type(A.opens) is type(B.opens) and not isinstance(A.opens, ExplicitList):
        return
    from .audit import random_open
    rng = random.Random(11)
    for _ in range(16):
        SA = sx.intersect(random_open(A, rng), O)
        SB = sx.intersect(random_open(B, rng), O)
        if not is_open(B, sx.intersect(SA, B.support)) or \
                not is_open(A, sx.intersect(SB, A.support)):
            raise IncompatibleTraces(sx.render(O))


def direct_sum(Xs: list) -> GtsPresentation:
    """Glue pairwise disjoint pieces; summands come out open and closed."""
    if not Xs:
        raise ValueError("direct sum needs at least one summand")
    if all(isinstance(X.carrier, FiniteEnum) for X in Xs) and (
        len({X.carrier for X in Xs}) != 1
        or any(
            not sx.intersect(A.support, B.support).is_empty()
            for i, A in enumerate(Xs) for B in Xs[i + 1:]
        )
    ):
        Xs = _tag_enum_summands(Xs)
    carrier = Xs[0].carrier
    for i, A in enumerate(Xs):
        if A.carrier != carrier:
            raise CarrierMismatch("summands on different carriers; tag them first")
        for B in Xs[i + 1:]:
            if not sx.intersect(A.support, B.support).is_empty():
                raise ValueError("summand supports must be pairwise disjoint")
    out = glue(Xs)
    return GtsPresentation(carrier, out.opens, out.policy, out.support,
                           name="sum(%s)" % ",".join(X.name or "?" for X in Xs))


def _tag_enum_summands(Xs: list) -> list:
    """Move atom summands onto one carrier with prefixed atom names."""
    atoms = []
    for i, X in enumerate(Xs):
        atoms.extend("%d.%s" % (i, a) for a in X.carrier.elements)
    big = FiniteEnum(tuple(atoms))
    out = []
    for i, X in enumerate(Xs):
        ren = lambda S, i=i: sx.atoms(big, ["%d.%s" % (i, a) for a in S.form])
        support = ren(X.support)
        if isinstance(X.opens, ExplicitList):
            opens = ExplicitList(tuple(ren(S) for S in X.opens.sets))
        elif isinstance(X.opens, AllSets):
            opens = AllSets()
        else:
            raise UnsupportedPresentation("cannot retag this opens description")
        out.append(GtsPresentation(big, opens, X.policy, support, X.name))
    return out


def summand_family(X: GtsPresentation) -> FamilyExpr:
    """The family of summand supports of a glued presentation."""
    if not isinstance(X.opens, GluedOpens):
        raise UnsupportedPresentation("not a glued presentation")
    return FamilyExpr(X.carrier, tuple(P.support for P in X.opens.pieces))


# -- adjoint constructions ------------------------------------------------

def smallify(X: GtsPresentation) -> GtsPresentation:
    """Keep the opens, admit only the essentially finite families."""
    if isinstance(X.policy, EssFin):
        return X
    name = X.name + "_sm" if X.name else ""
    return GtsPresentation(X.carrier, X.opens, EssFin(), X.support, name)


def topologize(X: GtsPresentation):
    """The generated topology with all covers admissible.

    Finite presentations return a full space.  On the naturals the
    generated topology of finite-or-whole opens is discrete.  On the line
    the generated topology escapes the finite-interval algebra, so a
    weak-openness predicate is returned instead of a space.
    """
    c = X.carrier
    if isinstance(c, QLine) and isinstance(X.opens, AllCanonicalOpen):
        def weakly_open(S: SetExpr) -> bool:
            if S.carrier != c:
                raise CarrierMismatch("set on the wrong carrier")
            return all(iv.lo_open and iv.hi_open for iv in S.form)
        return weakly_open
    if isinstance(c, NatFC) and isinstance(X.opens, (FiniteOrWhole, AllSets)):
        name = X.name + "_top" if X.name else ""
        return GtsPresentation(c, AllSets(), All(), X.support, name)
    opens = enumerate_opens(X)  # raises NonFiniteCarrier past this point
    closed = set(opens)
    while True:
        fresh = set()
        for A in closed:
            for B in closed:
                u = sx.union(A, B)
                if u not in closed:
                    fresh.add(u)
        if not fresh:
            break
        closed |= fresh
    name = X.name + "_top" if X.name else ""
    return GtsPresentation(
        c, ExplicitList(tuple(sorted(closed, key=sx.sort_key))), All(),
        X.support, name,
    )


def localize(X: GtsPresentation, balls: GrowBalls = None) -> GtsPresentation:
    """The admissible union of a growing ball cover of a small line space."""
    if not isinstance(X.carrier, QLine):
        raise UnsupportedPresentation("localization is provided on the line")
    if balls is None:
        balls = GrowBalls(1)
    for n in range(balls.n0, balls.n0 + 3):
        if not is_open(X, balls.member(n)):
            raise BallNotOpen(sx.render(balls.member(n)))
    base = FamilyExpr(X.carrier, (), (balls,))
    name = X.name + "_loc" if X.name else ""
    return GtsPresentation(X.carrier, X.opens, LocallyEssFin(base), X.support, name)
