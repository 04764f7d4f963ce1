"""Connectedness, separation, density, bases, and map classification."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations

from .carriers import FiniteEnum, NatFC, Product, QLine
from .errors import NonOpenMember, UnsupportedCarrier, UnsupportedPresentation
from .families import FamilyExpr, family_union
from .layers import Flag, LayerReport, weak_closure, weakly_open
from .maps import (
    Composite,
    ContinuityVerdict,
    FiniteTable,
    Identity,
    NatPerm,
    NatShift,
    PiecewiseAffine,
    Projection,
    SpaceMap,
    check_strict_continuity,
    identity_map,
)
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
    check_members_open,
    enumerate_opens,
    from_points,
    is_admissible,
    is_open,
    points_of,
)
from . import setexpr as sx
from .setexpr import SetExpr


# -- components -----------------------------------------------------------

@dataclass(frozen=True)
class ComponentsReport:
    parts: tuple
    acc: Flag  # is the component family open and admissible


def components(X: GtsPresentation) -> ComponentsReport:
    op = X.opens
    if isinstance(X.carrier, FiniteEnum) or _finite_points(X):
        return _finite_components(X)
    if isinstance(X.carrier, QLine) and (
        isinstance(op, (AllCanonicalOpen,))
        or (isinstance(op, TraceOpens) and isinstance(op.parent.opens, AllCanonicalOpen))
    ):
        parts = tuple(
            sx.SetExpr(X.carrier, (iv,), _normalized=True) for iv in X.support.form
        )
        fam = FamilyExpr(X.carrier, parts)
        ok = all(is_open(X, P) for P in parts) and is_admissible(X, fam).admissible
        return ComponentsReport(parts, Flag("Yes" if ok else "No"))
    if isinstance(op, GluedOpens):
        supports = [P.support for P in op.pieces]
        disjoint = all(
            sx.intersect(A, B).is_empty()
            for A, B in combinations(supports, 2)
        )
        if disjoint:
            parts = []
            for P in op.pieces:
                parts.extend(components(P).parts)
            fam = FamilyExpr(X.carrier, tuple(parts))
            ok = all(is_open(X, C) for C in parts) and is_admissible(X, fam).admissible
            return ComponentsReport(tuple(parts), Flag("Yes" if ok else "No"))
    raise UnsupportedPresentation("no component procedure for this presentation")


def _finite_points(X: GtsPresentation) -> bool:
    try:
        points_of(X.support)
        return True
    except Exception:
        return False


def _finite_components(X: GtsPresentation) -> ComponentsReport:
    pts = points_of(X.support)
    opens = enumerate_opens(X)
    # specialization links: x sticks to y when every open around x contains y
    def linked(x, y):
        near_x = all(sx.contains(O, y) for O in opens if sx.contains(O, x))
        near_y = all(sx.contains(O, x) for O in opens if sx.contains(O, y))
        return near_x or near_y

    part = {x: {x} for x in pts}
    changed = True
    while changed:
        changed = False
        for x, y in combinations(pts, 2):
            if part[x] is not part[y] and linked(x, y):
                merged = part[x] | part[y]
                for z in merged:
                    part[z] = merged
                changed = True
    seen, parts = [], []
    for x in pts:
        if part[x] not in seen:
            seen.append(part[x])
            parts.append(from_points(X.carrier, part[x]))
    parts = tuple(sorted(parts, key=sx.sort_key))
    fam = FamilyExpr(X.carrier, parts)
    acc_ok = all(is_open(X, C) for C in parts) and is_admissible(X, fam).admissible
    return ComponentsReport(parts, Flag("Yes" if acc_ok else "No"))


def quasi_components(X: GtsPresentation) -> tuple:
    if not (isinstance(X.carrier, FiniteEnum) or _finite_points(X)):
        raise UnsupportedPresentation("quasi-components need a finite presentation")
    pts = points_of(X.support)
    opens = enumerate_opens(X)
    clopen = [O for O in opens if is_open(X, sx.minus(X.support, O))]
    out, seen = [], set()
    for x in pts:
        qc = X.support
        for O in clopen:
            if sx.contains(O, x):
                qc = sx.intersect(qc, O)
        if sx.render(qc) not in seen:
            seen.add(sx.render(qc))
            out.append(qc)
    return tuple(sorted(out, key=sx.sort_key))


# -- separation -----------------------------------------------------------

SEPARATION_FLAGS = (
    "weakly_T1", "strongly_T1", "weakly_hausdorff", "strongly_hausdorff",
    "weakly_regular", "strongly_regular", "weakly_normal", "strongly_normal",
)


def separation_report(X: GtsPresentation, budget: int = 0) -> LayerReport:
    rep = LayerReport()
    if isinstance(X.carrier, FiniteEnum) or _finite_points(X):
        _finite_separation(X, rep)
    elif isinstance(X.carrier, QLine) and isinstance(X.opens, AllCanonicalOpen):
        for name in SEPARATION_FLAGS:
            rep.flags[name] = Flag("Yes", note="interval gap separation")
    elif isinstance(X.carrier, NatFC) and isinstance(X.opens, AllSets):
        for name in SEPARATION_FLAGS:
            rep.flags[name] = Flag("Yes", note="every subset is open")
    elif isinstance(X.carrier, NatFC) and isinstance(X.opens, FiniteOrWhole):
        _finite_or_whole_separation(X, rep)
    else:
        for name in SEPARATION_FLAGS:
            rep.flags[name] = Flag("Unknown")
    _enforce_implications(rep)
    return rep


def _finite_or_whole_separation(X, rep):
    x = sx.nat_finite([0])
    cof = sx.nat_cofinite([0])
    rep.flags["weakly_T1"] = Flag("Yes", note="singletons are open")
    rep.flags["strongly_T1"] = Flag("No", cof, "cofinite complements are not open")
    rep.flags["weakly_hausdorff"] = Flag("Yes", note="disjoint singletons are open")
    rep.flags["strongly_hausdorff"] = Flag("No", cof)
    # the only infinite open set is the whole space, so no open set can
    # contain a closed cofinite set while avoiding a point
    rep.flags["weakly_regular"] = Flag("No", (x, cof))
    rep.flags["strongly_regular"] = Flag("No", (x, cof))
    rep.flags["weakly_normal"] = Flag("No", (x, cof))
    rep.flags["strongly_normal"] = Flag("No", (x, cof))


def _finite_separation(X, rep):
    pts = points_of(X.support)
    opens = enumerate_opens(X)
    singles = {x: from_points(X.carrier, [x]) for x in pts}
    closeds = [sx.minus(X.support, O) for O in opens]
    targets = closeds + list(singles.values())

    def separated(A, B):
        for U in opens:
            if not sx.is_subset(A, U):
                continue
            for V in opens:
                if sx.is_subset(B, V) and sx.intersect(U, V).is_empty():
                    return True
        return False

    w_t1 = next(
        ((x, y) for x in pts for y in pts if x != y and not any(
            sx.contains(O, x) and not sx.contains(O, y) for O in opens)),
        None,
    )
    rep.flags["weakly_T1"] = Flag("Yes" if w_t1 is None else "No", w_t1)
    s_t1 = next((x for x in pts
                 if not is_open(X, sx.minus(X.support, singles[x]))), None)
    rep.flags["strongly_T1"] = Flag("Yes" if s_t1 is None else "No", s_t1)
    wh = next(
        ((x, y) for x, y in combinations(pts, 2)
         if not separated(singles[x], singles[y])),
        None,
    )
    rep.flags["weakly_hausdorff"] = Flag("Yes" if wh is None else "No", wh)
    wr = next(
        ((x, F) for x in pts for F in targets
         if not sx.contains(F, x) and not F.is_empty()
         and not separated(singles[x], F)),
        None,
    )
    rep.flags["weakly_regular"] = Flag("Yes" if wr is None else "No", wr)
    wn = next(
        ((F, G) for F in targets for G in targets
         if sx.intersect(F, G).is_empty() and not F.is_empty()
         and not G.is_empty() and not separated(F, G)),
        None,
    )
    rep.flags["weakly_normal"] = Flag("Yes" if wn is None else "No", wn)
    for strong, weak in (("strongly_hausdorff", "weakly_hausdorff"),
                         ("strongly_regular", "weakly_regular"),
                         ("strongly_normal", "weakly_normal")):
        if rep.flags[weak].yes() and rep.flags["strongly_T1"].yes():
            rep.flags[strong] = Flag("Yes")
        else:
            bad = rep.flags[weak] if not rep.flags[weak].yes() else rep.flags["strongly_T1"]
            rep.flags[strong] = Flag("No", bad.witness)


def _enforce_implications(rep: LayerReport):
    """Strong flags never exceed their weak versions or strongly T1."""
    pairs = (
        ("strongly_hausdorff", "weakly_hausdorff"),
        ("strongly_regular", "weakly_regular"),
        ("strongly_normal", "weakly_normal"),
    )
    for strong, weak in pairs:
        if rep.flags[strong].yes() and not (
            rep.flags[weak].yes() and rep.flags["strongly_T1"].yes()
        ):
            rep.flags[strong] = Flag("Unknown", note="implication guard")
    if rep.flags["strongly_T1"].yes() and rep.flags["weakly_T1"].status == "No":
        rep.flags["weakly_T1"] = Flag("Yes", note="closed singletons separate points")


# -- density and bases ----------------------------------------------------

def is_dense(X: GtsPresentation, S: SetExpr) -> Flag:
    closure = weak_closure(X, S)
    if closure == X.support:
        return Flag("Yes")
    rest = sx.minus(X.support, closure)
    witness = rest
    if isinstance(X.opens, AllCanonicalOpen):
        witness = sx.interval_interior(rest)
    elif not is_open(X, rest) and not weakly_open(X, rest):
        for O in _some_opens(X):
            if not O.is_empty() and sx.is_subset(O, rest):
                witness = O
                break
    return Flag("No", witness, "an open set misses the closure")


def is_separable(X: GtsPresentation) -> Flag:
    """All shipped carriers have countably many representable points."""
    return Flag("Yes", note="the representable points are countable and dense")


def _some_opens(X: GtsPresentation, budget: int = 32, seed: int = 13):
    try:
        return enumerate_opens(X)
    except Exception:
        from .audit import random_open
        rng = random.Random(seed)
        return [random_open(X, rng) for _ in range(budget)]


CANONICAL_INTERVAL_BASIS = "canonical-intervals"


def is_basis(X: GtsPresentation, B, budget: int = 64) -> Flag:
    """Is every open an admissible union of members of B?"""
    if B == CANONICAL_INTERVAL_BASIS:
        if isinstance(X.opens, AllCanonicalOpen):
            return Flag(
                "Yes",
                note="every open is a finite, hence admissible, union of open intervals",
            )
        return Flag("Unknown")
    check_members_open(X, B)
    union_all = family_union(B)
    exact = True
    try:
        opens = enumerate_opens(X)
    except Exception:
        opens = _some_opens(X, budget)
        exact = False
    members = B.sample_members(4)
    for O in opens:
        if not sx.is_subset(O, union_all):
            return Flag("No", O, "open set not covered by the basis")
        hull = sx.empty(X.carrier)
        for m in members:
            if sx.is_subset(m, O):
                hull = sx.union(hull, m)
        if hull != O:
            if exact or not _stream_coverable(B, O):
                return Flag("No", O, "open set is not a union of basis members")
    if exact:
        return Flag("Yes", note="checked on every open set")
    return Flag("Checked", note="budgeted sample of opens verified")


def _stream_coverable(B: FamilyExpr, O: SetExpr) -> bool:
    from .families import essentially_finite_on
    from .families import clip_family
    clipped = clip_family(B, O)
    inside = FamilyExpr(
        B.carrier,
        tuple(m for m in clipped.finite_part if sx.is_subset(m, O)),
        tuple(s for s in clipped.streams),
    )
    return family_union(inside) == O


# -- map classification ---------------------------------------------------

@dataclass(frozen=True)
class MapClassification:
    flags: dict

    def __getitem__(self, k):
        return self.flags[k]


def _image_preserves(f: SpaceMap, closed: bool, budget: int, seed: int) -> Flag:
    """Does the image of every open (or closed) set stay open (closed)?"""
    try:
        opens = enumerate_opens(f.domain)
        exact = True
    except Exception:
        structural = _structural_image_flag(f, closed)
        if structural is not None:
            return structural
        opens = _some_opens(f.domain, budget, seed)
        exact = False
    for O in opens:
        S = sx.minus(f.domain.support, O) if closed else O
        img = f.image(S)
        ok = is_open(f.codomain, sx.minus(f.codomain.support, img)) if closed \
            else is_open(f.codomain, img)
        if not ok:
            return Flag("No", S)
    return Flag("Yes" if exact else "Checked")


def _structural_image_flag(f: SpaceMap, closed: bool) -> Flag | None:
    r = f.rule
    dop, cop = f.domain.opens, f.codomain.opens
    if isinstance(r, (Identity, NatShift, NatPerm)) and isinstance(cop, AllSets):
        return Flag("Yes", note="every codomain subset is open and closed")
    if isinstance(r, PiecewiseAffine) and isinstance(cop, AllCanonicalOpen) \
            and isinstance(dop, AllCanonicalOpen):
        if len(r.pieces) == 1 and r.pieces[0][1] != 0:
            return Flag("Yes", note="a global affine bijection preserves interval shape")
        return None
    if isinstance(r, Projection) and not closed:
        if isinstance(cop, (AllSets, AllCanonicalOpen)):
            return Flag("Yes", note="images of product opens are unions of factor opens")
    return None


def _inverse_map(f: SpaceMap) -> SpaceMap | None:
    r = f.rule
    if isinstance(r, Identity):
        return SpaceMap(f.codomain, f.domain, Identity(), name=f.name + "^-1")
    if isinstance(r, NatPerm):
        inv = tuple((b, a) for a, b in r.table)
        return SpaceMap(f.codomain, f.domain, NatPerm(inv), name=f.name + "^-1")
    if isinstance(r, FiniteTable):
        vals = [b for _, b in r.table]
        if len(set(vals)) != len(vals) or set(vals) != set(f.codomain.carrier.elements):
            return None
        inv = tuple((b, a) for a, b in r.table)
        return SpaceMap(f.codomain, f.domain, FiniteTable(inv), name=f.name + "^-1")
    if isinstance(r, PiecewiseAffine):
        if any(p == 0 for _, p, _ in r.pieces):
            return None
        imgs = [(f.image(P), 1 / p, -q / p) for P, p, q in r.pieces]
        u = sx.empty(f.codomain.carrier)
        for P, _, _ in imgs:
            if not sx.intersect(u, P).is_empty():
                return None
            u = sx.union(u, P)
        if not u.is_whole():
            return None
        return SpaceMap(f.codomain, f.domain, PiecewiseAffine(tuple(imgs)),
                        name=f.name + "^-1")
    return None


def _is_bijective(f: SpaceMap) -> bool | None:
    try:
        pts = points_of(f.domain.support)
    except Exception:
        return None
    imgs = [f.apply(x) for x in pts]
    try:
        cod = points_of(f.codomain.support)
    except Exception:
        return None
    return len(set(imgs)) == len(imgs) and set(imgs) == set(cod)


def classify_map(f: SpaceMap, budget: int = 64,
                 covering: FamilyExpr = None) -> MapClassification:
    flags = {}
    cont = check_strict_continuity(f)
    flags["strictly_continuous"] = Flag(
        cont.status, cont.witness, cont.rationale
    )
    flags["open_map"] = _image_preserves(f, closed=False, budget=budget, seed=19)
    flags["closed_map"] = _image_preserves(f, closed=True, budget=budget, seed=23)
    flags["strict_homeo"] = _strict_homeo_flag(f, flags["strictly_continuous"])
    flags["local_strict_homeo"] = _local_strict_homeo_flag(f, covering)
    if flags["strict_homeo"].yes():
        # a strict homeomorphism transports opens and closeds both ways
        if flags["open_map"].status == "Checked":
            flags["open_map"] = Flag("Yes", note="strict homeomorphism")
        if flags["closed_map"].status == "Checked":
            flags["closed_map"] = Flag("Yes", note="strict homeomorphism")
    return MapClassification(flags)


def _strict_homeo_flag(f: SpaceMap, cont: Flag) -> Flag:
    if cont.status == "No":
        return Flag("No", cont.witness, "not strictly continuous")
    inv = _inverse_map(f)
    if inv is None:
        bij = _is_bijective(f)
        if bij is False:
            return Flag("No", None, "not a bijection")
        return Flag("Unknown", note="no computable inverse")
    back = check_strict_continuity(inv)
    if back.status == "No":
        return Flag("No", back.witness, "inverse not strictly continuous")
    if cont.status == "Yes" and back.status == "Yes":
        return Flag("Yes")
    return Flag("Unknown", note="continuity only probe-checked")


def _local_strict_homeo_flag(f: SpaceMap, covering: FamilyExpr) -> Flag:
    if covering is None:
        full = _strict_homeo_flag(f, Flag(check_strict_continuity(f).status))
        if full.yes():
            return Flag("Yes", note="the whole space works as the covering")
        return Flag("Unknown", note="no witness covering supplied")
    ver = is_admissible(f.domain, covering)
    if not ver.admissible:
        raise NonOpenMember(ver.offending)
    from .constructions import subspace
    for U in covering.finite_part:
        dom = subspace(f.domain, U)
        cod = subspace(f.codomain, f.image(U))
        try:
            restricted = SpaceMap(dom, cod, f.rule, name=f.name + "|")
        except Exception:
            return Flag("Unknown", U, "restriction not representable")
        piece = _strict_homeo_flag(restricted, Flag(check_strict_continuity(restricted).status))
        if not piece.yes():
            return Flag(piece.status, U, "restriction fails")
    return Flag("Yes", note="every covering member restricts to a strict homeomorphism")
