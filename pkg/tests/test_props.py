from fractions import Fraction
from itertools import combinations, product as iproduct

import pytest

from gtskit.carriers import FiniteEnum
from gtskit.families import FamilyExpr
from gtskit import library as lib
from gtskit.maps import Identity, NatPerm, PiecewiseAffine, SpaceMap
from gtskit.presentation import (
    All,
    GtsPresentation,
    enumerate_opens,
    from_points,
    generate_finite_gts,
    points_of,
)
from gtskit.props import (
    CANONICAL_INTERVAL_BASIS,
    SEPARATION_FLAGS,
    classify_map,
    components,
    is_basis,
    is_dense,
    quasi_components,
    separation_report,
)
from gtskit import setexpr as sx
from gtskit.streams import Singletons


# -- separation: brute-force oracle on finite spaces ----------------------

def oracle_separation(X):
    pts = points_of(X.support)
    opens = enumerate_opens(X)
    closeds = [sx.minus(X.support, O) for O in opens]
    singles = {x: from_points(X.carrier, [x]) for x in pts}
    targets = [F for F in closeds if not F.is_empty()] + list(singles.values())

    def sep(A, B):
        return any(
            sx.is_subset(A, U) and sx.is_subset(B, V)
            and sx.intersect(U, V).is_empty()
            for U in opens for V in opens)

    out = {}
    out["weakly_T1"] = all(
        any(sx.contains(O, x) and not sx.contains(O, y) for O in opens)
        for x in pts for y in pts if x != y)
    out["strongly_T1"] = all(
        sx.minus(X.support, singles[x]) in opens for x in pts)
    out["weakly_hausdorff"] = all(
        sep(singles[x], singles[y]) for x, y in combinations(pts, 2))
    out["weakly_regular"] = all(
        sep(singles[x], F)
        for x in pts for F in targets if not sx.contains(F, x))
    out["weakly_normal"] = all(
        sep(F, G) for F in targets for G in targets
        if sx.intersect(F, G).is_empty())
    out["strongly_hausdorff"] = out["weakly_hausdorff"] and out["strongly_T1"]
    out["strongly_regular"] = out["weakly_regular"] and out["strongly_T1"]
    out["strongly_normal"] = out["weakly_normal"] and out["strongly_T1"]
    return out


def all_topologies(atoms):
    c = FiniteEnum(atoms)
    pts = list(atoms)
    subsets = [from_points(c, s)
               for r in range(len(pts) + 1) for s in combinations(pts, r)]
    inner = [S for S in subsets if not S.is_empty() and not S.is_whole()]
    for r in range(len(inner) + 1):
        for picks in combinations(inner, r):
            T = set(picks) | {sx.empty(c), sx.whole(c)}
            if all(sx.union(a, b) in T and sx.intersect(a, b) in T
                   for a in T for b in T):
                yield c, tuple(sorted(T, key=sx.sort_key))


def test_separation_matches_oracle_on_all_3_point_topologies():
    for c, opens in all_topologies(("a", "b", "c")):
        X = generate_finite_gts(c, opens)
        rep = separation_report(X)
        want = oracle_separation(X)
        got = {k: rep.flags[k].yes() for k in SEPARATION_FLAGS}
        assert got == want, [sx.render(S) for S in opens]


def test_weakly_discrete_nat_flags():
    rep = separation_report(lib.weakly_discrete_nat())
    assert rep.flags["weakly_T1"].yes()
    assert rep.flags["strongly_T1"].status == "No"
    assert rep.flags["weakly_hausdorff"].yes()
    assert rep.flags["weakly_regular"].status == "No"
    assert rep.flags["strongly_normal"].status == "No"


def test_line_fully_separated():
    rep = separation_report(lib.rational_interval_line())
    assert all(rep.flags[k].yes() for k in SEPARATION_FLAGS)


def test_strong_implies_weak_everywhere():
    for X in lib.shipped().values():
        rep = separation_report(X)
        for strong, weak in (("strongly_hausdorff", "weakly_hausdorff"),
                             ("strongly_regular", "weakly_regular"),
                             ("strongly_normal", "weakly_normal")):
            if rep.flags[strong].yes():
                assert rep.flags[weak].yes()
                assert rep.flags["strongly_T1"].yes()


# -- components -----------------------------------------------------------

def test_components_discrete_and_indiscrete():
    assert len(components(lib.discrete_pair()).parts) == 2
    assert len(components(lib.indiscrete_pair()).parts) == 1
    assert len(components(lib.sierpinski()).parts) == 1


def test_components_acc_flag():
    cr = components(lib.discrete_pair())
    assert cr.acc.yes()


def test_quasi_components_refine_to_components_on_small_examples():
    for name in ("sierpinski", "discrete_pair", "indiscrete_pair"):
        X = lib.shipped()[name]
        comp = {sx.render(p) for p in components(X).parts}
        quasi = {sx.render(p) for p in quasi_components(X)}
        assert comp == quasi  # they agree on these finite examples


def test_line_subspace_components_are_intervals():
    from gtskit.constructions import subspace
    X = lib.rational_interval_line()
    Y = subspace(X, sx.union(sx.interval(0, 1), sx.interval(2, 3)))
    parts = components(Y).parts
    assert [sx.render(p) for p in parts] == ["(0,1)", "(2,3)"]


# -- density and bases ----------------------------------------------------

def test_dense_and_non_dense():
    X = lib.rational_interval_line()
    assert is_dense(X, sx.whole(X.carrier)).yes()
    v = is_dense(X, sx.interval(0, 1))
    assert v.status == "No"
    # the witness open avoids the closure
    assert sx.intersect(v.witness, sx.interval(0, 1, False, False)).is_empty()


def test_interval_basis_of_the_small_line():
    assert is_basis(lib.rational_interval_line(), CANONICAL_INTERVAL_BASIS).yes()


def test_singleton_basis_of_discrete_pair():
    D = lib.discrete_pair()
    B = FamilyExpr(D.carrier, (sx.atoms(D.carrier, ["a"]),
                               sx.atoms(D.carrier, ["b"])))
    assert is_basis(D, B).yes()
    whole_only = FamilyExpr(D.carrier, (sx.whole(D.carrier),))
    assert is_basis(D, whole_only).status == "No"


# -- map classification ---------------------------------------------------

def test_identity_discrete_directions():
    f = SpaceMap(lib.topological_discrete_nat(), lib.discrete_small_nat(),
                 Identity())
    cls = classify_map(f)
    assert cls["strictly_continuous"].yes()
    assert cls["open_map"].yes()
    assert cls["closed_map"].yes()
    assert cls["strict_homeo"].status == "No"
    assert isinstance(cls["strict_homeo"].witness.streams[0], Singletons)


def test_affine_strict_homeo():
    L = lib.rational_interval_line()
    f = SpaceMap(L, L, PiecewiseAffine(
        ((sx.whole(L.carrier), Fraction(2), Fraction(1)),)))
    cls = classify_map(f)
    assert all(cls[k].yes() for k in
               ("strictly_continuous", "open_map", "closed_map",
                "strict_homeo", "local_strict_homeo"))


def test_permutation_strict_homeo():
    N = lib.discrete_small_nat()
    f = SpaceMap(N, N, NatPerm(((0, 2), (2, 0))))
    assert classify_map(f)["strict_homeo"].yes()


def test_collapse_not_homeo():
    from gtskit.maps import Const
    f = SpaceMap(lib.sierpinski(), lib.point_space(), Const("p"))
    cls = classify_map(f)
    assert cls["strict_homeo"].status == "No"
