import random

import pytest

from gtskit.audit import (
    AXIOMS,
    audit_axioms,
    random_admissible_family,
    random_open,
    recheck,
)
from gtskit.carriers import FiniteEnum
from gtskit import library as lib
from gtskit.presentation import (
    All,
    ExplicitList,
    GtsPresentation,
    is_admissible,
    is_open,
)
from gtskit import setexpr as sx


def test_shipped_presentations_audit_clean():
    for name, X in lib.shipped().items():
        rep = audit_axioms(X, budget=120, seed=5)
        assert rep.ok(), (name, rep.violations)
        assert all(rep.pass_counts[a] > 0 for a in AXIOMS), name


def test_small_finite_spaces_audited_exhaustively():
    for name in ("point_p", "sierpinski", "discrete_pair", "indiscrete_pair"):
        rep = audit_axioms(lib.shipped()[name], budget=10, seed=0)
        assert rep.exhaustive, name
        assert rep.ok(), name


def test_determinism_per_seed():
    X = lib.rational_interval_line()
    a = audit_axioms(X, budget=60, seed=11)
    b = audit_axioms(X, budget=60, seed=11)
    assert a.pass_counts == b.pass_counts
    assert a.violations == b.violations


def test_corrupted_space_caught_and_rechecks():
    c = FiniteEnum(("a", "b"))
    # {a} and {b} open but their union missing: closure violations
    broken = GtsPresentation(
        c,
        ExplicitList((sx.empty(c), sx.atoms(c, ["a"]), sx.atoms(c, ["b"]))),
        All(),
        validate=False,
    )
    rep = audit_axioms(broken, budget=80, seed=2)
    assert not rep.ok()
    assert any(v.axiom == "binary_ops_open" for v in rep.violations)
    for v in rep.violations:
        assert recheck(broken, v), v


def test_random_open_draws_opens():
    rng = random.Random(4)
    for name in ("line_small", "nat_wd", "sierpinski"):
        X = lib.shipped()[name]
        for _ in range(30):
            assert is_open(X, random_open(X, rng))


def test_random_admissible_family_is_admissible():
    rng = random.Random(9)
    for name in ("line_small", "line_top", "nat_small", "line_loc"):
        X = lib.shipped()[name]
        for _ in range(10):
            F = random_admissible_family(X, rng)
            assert is_admissible(X, F).admissible, name
