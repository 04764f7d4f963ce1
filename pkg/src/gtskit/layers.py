"""Locally small and weakly small structure: bases, closures, exhaustions."""

from __future__ import annotations

from dataclasses import dataclass, field

from .carriers import FiniteEnum, NatFC, Product, QLine
from .errors import (
    CarrierMismatch,
    NoInfimum,
    NonOpenMember,
    PointNotCovered,
    PolicyMismatch,
    PreconditionUnmet,
    TheoremViolation,
    UnsupportedCarrier,
)
from .exhaustions import Exhaustion
from .families import FamilyExpr, essentially_finite_on, family_union
from .presentation import (
    All,
    AllCanonicalOpen,
    AllSets,
    EssFin,
    ExplicitList,
    FiniteOrWhole,
    GluedOpens,
    GtsPresentation,
    LocallyEssFin,
    PiecewiseEssFin,
    ProductOpens,
    TraceOpens,
    check_members_open,
    enumerate_opens,
    is_admissible,
    is_open,
    smallness,
)
from . import setexpr as sx
from .setexpr import SetExpr


@dataclass(frozen=True)
class Flag:
    status: str  # "Yes", "No", "Unknown"
    witness: object = None
    note: str = ""

    def yes(self) -> bool:
        return self.status == "Yes"


@dataclass
class LayerReport:
    flags: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def ok(self, *names) -> bool:
        names = names or tuple(self.flags)
        return all(self.flags[n].yes() for n in names)


# -- weak topology --------------------------------------------------------

def weakly_open(X: GtsPresentation, S: SetExpr) -> bool:
    """Is S a union of open sets (open in the generated topology)?"""
    if S.carrier != X.carrier:
        raise CarrierMismatch("set on the wrong carrier")
    if not sx.is_subset(S, X.support):
        return False
    op = X.opens
    if isinstance(op, (AllSets, FiniteOrWhole)):
        # singletons are open, so every subset is a union of opens
        return True
    if isinstance(op, AllCanonicalOpen):
        return all(iv.lo_open and iv.hi_open for iv in S.form)
    if isinstance(op, ExplicitList):
        hull = sx.empty(X.carrier)
        for O in op.sets:
            if sx.is_subset(O, S):
                hull = sx.union(hull, O)
        return hull == S
    if isinstance(op, TraceOpens):
        parent = op.parent
        if isinstance(parent.opens, AllCanonicalOpen):
            rest = sx.minus(X.support, S)
            return sx.intersect(S, sx.interval_closure(rest)).is_empty()
        return weakly_open_trace_fallback(X, S)
    if isinstance(op, GluedOpens):
        return all(weakly_open(P, sx.intersect(S, P.support)) for P in op.pieces)
    raise UnsupportedCarrier("no weak-openness procedure for this presentation")


def weakly_open_trace_fallback(X: GtsPresentation, S: SetExpr) -> bool:
    op = X.opens
    hull = sx.empty(X.carrier)
    for O in enumerate_opens(op.parent):
        T = sx.intersect(O, op.window)
        if sx.is_subset(T, S):
            hull = sx.union(hull, T)
    return hull == S


def weak_closure(X: GtsPresentation, S: SetExpr) -> SetExpr:
    """The closure of S in the generated topology."""
    if S.carrier != X.carrier:
        raise CarrierMismatch("set on the wrong carrier")
    S = sx.intersect(S, X.support)
    op = X.opens
    c = X.carrier
    if isinstance(c, Product) or isinstance(op, ProductOpens):
        raise UnsupportedCarrier("weak closure is not provided on products")
    if isinstance(op, (AllSets, FiniteOrWhole)):
        return S  # the generated topology is discrete
    if isinstance(op, AllCanonicalOpen):
        return sx.interval_closure(S)
    if isinstance(op, TraceOpens) and isinstance(op.parent.opens, AllCanonicalOpen):
        return sx.intersect(sx.interval_closure(S), X.support)
    if isinstance(op, ExplicitList) or isinstance(op, TraceOpens):
        away = sx.empty(c)
        opens = enumerate_opens(X)
        for O in opens:
            if sx.intersect(O, S).is_empty():
                away = sx.union(away, O)
        return sx.minus(X.support, away)
    if isinstance(op, GluedOpens):
        out = sx.empty(c)
        for P in op.pieces:
            out = sx.union(out, weak_closure(P, sx.intersect(S, P.support)))
        return out
    raise UnsupportedCarrier("no weak-closure procedure for this presentation")


# -- locally small layer --------------------------------------------------

def validate_locally_small(X: GtsPresentation, base: FamilyExpr = None) -> LayerReport:
    """Certify an admissible cover by small open subsets, and its fallout."""
    rep = LayerReport()
    if base is None:
        if not isinstance(X.policy, LocallyEssFin):
            raise PolicyMismatch("no base family to validate")
        base = X.policy.base
    try:
        check_members_open(X, base)
    except NonOpenMember as e:
        rep.flags["locally_small"] = Flag("No", e.member, "base member not open")
        _fill_unknown(rep)
        return rep
    bad = _non_small_member(X, base)
    if bad is not None:
        rep.flags["locally_small"] = Flag("No", bad, "base member not small")
        _fill_unknown(rep)
        return rep
    if family_union(base) != X.support:
        rep.flags["locally_small"] = Flag("No", base, "base does not cover the space")
        _fill_unknown(rep)
        return rep
    if not is_admissible(X, base).admissible:
        rep.flags["locally_small"] = Flag("No", base, "base not admissible")
        _fill_unknown(rep)
        return rep
    rep.flags["locally_small"] = Flag("Yes")
    rep.flags["lindelof"] = Flag("Yes", note="presentable bases are countable")
    rep.flags["paracompact"] = _paracompact_flag(X, base, rep)
    rep.flags["closure_property"] = _closure_property_flag(X)
    from .props import separation_report
    rep.flags["strongly_T1"] = separation_report(X).flags["strongly_T1"]
    return rep


def _fill_unknown(rep: LayerReport):
    for k in ("paracompact", "lindelof", "closure_property", "strongly_T1"):
        rep.flags.setdefault(k, Flag("Unknown"))


def _non_small_member(X: GtsPresentation, base: FamilyExpr):
    for m in base.finite_part:
        if smallness(X, m).status == "NotSmall":
            return m
    for s in base.streams:
        for n in range(s.n0, s.n0 + 3):
            if smallness(X, s.member(n)).status == "NotSmall":
                return s.member(n)
    return None


def _pairwise_disjoint(sets) -> bool:
    for i, A in enumerate(sets):
        for B in sets[i + 1:]:
            if not sx.intersect(A, B).is_empty():
                return False
    return True


def _paracompact_flag(X: GtsPresentation, base: FamilyExpr, rep: LayerReport) -> Flag:
    fin = list(base.finite_part)
    if not base.streams:
        if _pairwise_disjoint(fin):
            return Flag("Yes", note="disjoint bases are locally finite")
        # locally finite: every member meets only finitely many members,
        # which for a finite base is automatic
        return Flag("Yes", note="finite bases are locally finite")
    pointwise = [s for s in base.streams if not s.monotone]
    monotone = [s for s in base.streams if s.monotone]
    if not monotone:
        probes = fin + [s.member(s.n0 + k) for s in pointwise for k in range(3)]
        if _pairwise_disjoint(probes):
            return Flag("Yes", note="pairwise disjoint base is locally finite")
        return Flag("Unknown")
    if isinstance(X.carrier, QLine) and len(monotone) == 1 and not fin and not pointwise:
        ok, witness = _annuli_refinement_ok(X, monotone[0])
        if ok:
            rep.notes.append(
                "nested chain refined by the disjoint-annuli witness " + witness
            )
            return Flag("Yes", note="locally finite refinement witness verified")
    return Flag("Unknown")


def _annuli_refinement_ok(X: GtsPresentation, chain, depth: int = 6):
    """Refine a nested interval chain by two-sided annuli.

    The witness family {(-n-1,-n+1), (n-1,n+1) : n >= 0} is locally finite
    (members two steps apart are disjoint) and locally essentially finite
    over the chain; both facts are brute-forced out to the given depth.
    """
    def annulus(n):
        left = sx.interval(-n - 1, -n + 1)
        right = sx.interval(n - 1, n + 1)
        return sx.union(left, right)

    members = [annulus(n) for n in range(depth + 2)]
    for m in members:
        if not is_open(X, m):
            return False, ""
    for i in range(len(members)):
        for j in range(i + 2, len(members)):
            if not sx.intersect(members[i], members[j]).is_empty():
                return False, ""
    for m in range(1, depth):
        ball = chain.member(max(chain.n0, m))
        cover = sx.empty(X.carrier)
        for n in range(m + 2):
            cover = sx.union(cover, members[n])
        if not sx.is_subset(ball, cover):
            return False, ""
    return True, "{(-n-1,-n+1) u (n-1,n+1) : n >= 0}"


def _closure_property_flag(X: GtsPresentation) -> Flag:
    op = X.opens
    if isinstance(op, (AllSets, FiniteOrWhole)):
        return Flag("Yes", note="discrete generated topology: closure is identity")
    if isinstance(op, AllCanonicalOpen):
        return Flag(
            "Yes",
            note="interval closure adds finitely many endpoints to a small set",
        )
    if isinstance(op, (ExplicitList, GluedOpens)):
        return Flag("Yes", note="finite or summand-wise closures stay small")
    return Flag("Unknown")


# -- exhaustions ----------------------------------------------------------

def validate_exhaustion(X: GtsPresentation, E: Exhaustion = None,
                        chain_probe: int = 8) -> LayerReport:
    """Check the directed-family conditions and closed/small pieces."""
    rep = LayerReport()
    if E is None:
        if not isinstance(X.policy, PiecewiseEssFin):
            raise PolicyMismatch("no exhaustion to validate")
        E = X.policy.exhaustion
    if E.is_chain():
        _validate_chain(X, E, rep, chain_probe)
    else:
        _validate_poset(X, E, rep)
    if isinstance(X.policy, PiecewiseEssFin) and X.policy.exhaustion == E:
        rep.notes.append("admissibility is defined piecewise over this exhaustion")
    return rep


def _validate_chain(X, E, rep, probe):
    s = E.chain
    ok_cover = sx.is_subset(X.support, s.union())
    rep.flags["W1"] = Flag("Yes" if ok_cover else "No", None if ok_cover else s.union(),
                           "pieces must exhaust the space")
    mono = all(
        sx.is_subset(s.member(n), s.member(n + 1))
        for n in range(s.n0, s.n0 + probe)
    )
    rep.flags["W2"] = Flag("Yes" if mono and s.monotone else "No",
                           note="monotone generator" if mono else "")
    rep.flags["W3"] = Flag("Yes", note="chain indices have finite histories")
    meets = all(
        sx.intersect(s.member(a), s.member(b)) == s.member(min(a, b))
        for a in range(s.n0, s.n0 + probe)
        for b in range(s.n0, s.n0 + probe)
    )
    rep.flags["W4"] = Flag("Yes" if meets else "No")
    rep.flags["W5"] = Flag("Yes", note="the larger index bounds both")
    bad = None
    for n in range(s.n0, s.n0 + probe):
        P = sx.intersect(s.member(n), X.support)
        closed = is_open(X, sx.minus(X.support, P))
        small = smallness(X, P).status != "NotSmall"
        if not (closed and small):
            bad = P
            break
    rep.flags["pieces_closed_small"] = Flag("Yes" if bad is None else "No", bad)


def _validate_poset(X, E, rep):
    pieces = dict(E.pieces)
    poset = E.poset
    union = sx.empty(X.carrier)
    for P in pieces.values():
        union = sx.union(union, P)
    rep.flags["W1"] = Flag("Yes" if union == X.support else "No", union)
    bad = next(
        ((a, b) for a in poset.elements for b in poset.elements
         if poset.leq(a, b) and not sx.is_subset(pieces[a], pieces[b])),
        None,
    )
    rep.flags["W2"] = Flag("Yes" if bad is None else "No", bad)
    rep.flags["W3"] = Flag("Yes", note="finite index posets have finite histories")
    missing = None
    for a in poset.elements:
        for b in poset.elements:
            want = sx.intersect(pieces[a], pieces[b])
            if not any(pieces[g] == want for g in poset.elements):
                missing = (a, b)
                break
        if missing:
            break
    rep.flags["W4"] = Flag("Yes" if missing is None else "No", missing)
    unbounded = next(
        ((a, b) for a in poset.elements for b in poset.elements
         if not poset.upper_bounds(a, b)),
        None,
    )
    rep.flags["W5"] = Flag("Yes" if unbounded is None else "No", unbounded)
    bad = None
    for P in pieces.values():
        if not is_open(X, sx.minus(X.support, P)) or \
                smallness(X, P).status == "NotSmall":
            bad = P
            break
    rep.flags["pieces_closed_small"] = Flag("Yes" if bad is None else "No", bad)


def index_function(E: Exhaustion, x, search_cap: int = 4096):
    """The least index whose piece contains x."""
    if E.is_chain():
        s = E.chain
        if not sx.contains(s.union(), x):
            raise PointNotCovered(x)
        for n in range(s.n0, s.n0 + search_cap):
            if sx.contains(s.member(n), x):
                return n
        raise PointNotCovered(x)
    containing = [i for i, P in E.pieces if sx.contains(P, x)]
    if not containing:
        raise PointNotCovered(x)
    poset = E.poset
    lower = [m for m in poset.elements
             if all(poset.leq(m, c) for c in containing)]
    glb = next(
        (g for g in lower if all(poset.leq(m, g) for m in lower)),
        None,
    )
    if glb is None:
        raise NoInfimum(x)
    return glb


# -- subset classification ------------------------------------------------

@dataclass(frozen=True)
class SubsetClassification:
    flags: dict

    def __getitem__(self, k):
        return self.flags[k]


def _constructible_flag(X: GtsPresentation, S: SetExpr) -> Flag:
    op = X.opens
    if isinstance(op, (AllSets, FiniteOrWhole)):
        return Flag("Yes", note="every representable set is a boolean combination")
    if isinstance(op, AllCanonicalOpen):
        return Flag("Yes", note="rational intervals are boolean combinations of opens")
    if isinstance(op, TraceOpens) and isinstance(op.parent.opens, AllCanonicalOpen):
        return Flag("Yes", note="traces of boolean combinations")
    if isinstance(op, ExplicitList):
        algebra = set(op.sets)
        while True:
            fresh = set()
            for A in algebra:
                comp = sx.minus(X.support, A)
                if comp not in algebra:
                    fresh.add(comp)
                for B in algebra:
                    for C in (sx.union(A, B), sx.intersect(A, B)):
                        if C not in algebra:
                            fresh.add(C)
            if not fresh:
                break
            algebra |= fresh
        return Flag("Yes" if S in algebra else "No")
    return Flag("Unknown")


def classify_subset(X: GtsPresentation, S: SetExpr) -> SubsetClassification:
    if S.carrier != X.carrier:
        raise CarrierMismatch("set on the wrong carrier")
    S = sx.intersect(S, X.support)
    flags = {}
    flags["open"] = Flag("Yes" if is_open(X, S) else "No")
    comp = sx.minus(X.support, S)
    flags["closed"] = Flag("Yes" if is_open(X, comp) else "No")
    try:
        wo = weakly_open(X, S)
        wc = weakly_open(X, comp)
        flags["weakly_open"] = Flag("Yes" if wo else "No")
        flags["weakly_closed"] = Flag("Yes" if wc else "No")
    except UnsupportedCarrier:
        flags["weakly_open"] = flags["weakly_closed"] = Flag("Unknown")
    try:
        closure = weak_closure(X, S)
        rim = sx.minus(closure, S)
        locally_closed = weakly_open(X, sx.minus(X.support, rim))
        flags["locally_closed"] = Flag("Yes" if locally_closed else "No", rim)
    except UnsupportedCarrier:
        flags["locally_closed"] = Flag("Unknown")
    flags["constructible"] = _constructible_flag(X, S)
    if isinstance(X.policy, LocallyEssFin):
        flags["locally_constructible"] = _piecewise_constructible(
            X, S, X.policy.base.sample_members(3)
        )
    if isinstance(X.policy, PiecewiseEssFin):
        exh = X.policy.exhaustion
        pieces = [exh.piece(i) for i in exh.indices(6)]
        flags["piecewise_constructible"] = _piecewise_constructible(X, S, pieces)
    return SubsetClassification(flags)


def _piecewise_constructible(X, S, pieces) -> Flag:
    for P in pieces:
        f = _constructible_flag(X, sx.intersect(S, P))
        if f.status != "Yes":
            return Flag(f.status, P)
    return Flag("Yes")


# -- the piece-capture theorem --------------------------------------------

def piece_capture(f, exhaustion: Exhaustion = None, search_cap: int = 4096):
    """The image of a small domain lands in one piece of the exhaustion."""
    X = f.codomain
    if exhaustion is None:
        if not isinstance(X.policy, PiecewiseEssFin):
            raise PreconditionUnmet("codomain carries no exhaustion")
        exhaustion = X.policy.exhaustion
    rep = validate_exhaustion(X, exhaustion)
    if not rep.ok("W1", "W2", "W3", "W4", "W5"):
        raise PreconditionUnmet("exhaustion conditions not established")
    from .props import separation_report
    if not separation_report(X).flags["strongly_T1"].yes():
        raise PreconditionUnmet("codomain not certified strongly T1")
    if smallness(f.domain, f.domain.support).status != "Small":
        raise PreconditionUnmet("domain not certified small")
    image = f.image(f.domain.support)
    if exhaustion.is_chain():
        s = exhaustion.chain
        for n in range(s.n0, s.n0 + search_cap):
            if sx.is_subset(image, s.member(n)):
                return n
        raise TheoremViolation(
            "no chain piece captured the image " + sx.render(image)
        )
    containing = [i for i, P in exhaustion.pieces if sx.is_subset(image, P)]
    if not containing:
        raise TheoremViolation(
            "no piece captured the image " + sx.render(image)
        )
    poset = exhaustion.poset
    containing.sort(key=lambda i: len(poset.below(i)))
    return containing[0]
