"""Canonical symbolic subsets of a carrier.

Every ``SetExpr`` is kept in a canonical form that is unique per extension,
so set equality, inclusion and emptiness reduce to structural comparison:

* ``FiniteEnum`` -- an explicit frozenset of atoms;
* ``NatFC``      -- a finite set of naturals plus a complemented flag;
* ``QLine``      -- a sorted tuple of maximal, pairwise disjoint, non-adjacent
  intervals with endpoints in Q u {-inf, +inf} (degenerate points allowed);
* ``Product``    -- a union of boxes normalized so the left components are
  pairwise disjoint and the right components pairwise distinct.

All decision procedures consult only rational endpoint/element arithmetic.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

from .carriers import Carrier, FiniteEnum, NatFC, Product, QLine
from .errors import CarrierMismatch, UnrepresentablePoint

NEG_INF = float("-inf")
POS_INF = float("inf")


def rq(x) -> str:
    """Render a rational endpoint (or +-inf)."""
    if x == NEG_INF:
        return "-inf"
    if x == POS_INF:
        return "+inf"
    return str(Fraction(x))


@dataclass(frozen=True)
class Interval:
    """One maximal interval; infinite endpoints are always on an open side."""

    lo: object  # Fraction or -inf
    hi: object  # Fraction or +inf
    lo_open: bool
    hi_open: bool

    def __post_init__(self):
        lo, hi = self.lo, self.hi
        if lo == NEG_INF and not self.lo_open:
            raise ValueError("-inf endpoint must be open")
        if hi == POS_INF and not self.hi_open:
            raise ValueError("+inf endpoint must be open")
        if lo > hi:
            raise ValueError("empty interval")
        if lo == hi and (self.lo_open or self.hi_open):
            raise ValueError("degenerate interval must be closed on both sides")

    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, x: Fraction) -> bool:
        if x < self.lo or (x == self.lo and self.lo_open):
            return False
        if x > self.hi or (x == self.hi and self.hi_open):
            return False
        return True

    def render(self) -> str:
        lb = "(" if self.lo_open else "["
        rb = ")" if self.hi_open else "]"
        return f"{lb}{rq(self.lo)},{rq(self.hi)}{rb}"


def _mergeable(a: Interval, b: Interval) -> bool:
    # assumes a.lo-key <= b.lo-key
    if b.lo < a.hi:
        return True
    if b.lo == a.hi:
        return (not a.hi_open) or (not b.lo_open)
    return False


def _lo_key(iv: Interval):
    # closed endpoint starts "earlier" than open one at the same value
    return (iv.lo, 1 if iv.lo_open else 0)


def normalize_intervals(ivs: Iterable[Interval]) -> tuple[Interval, ...]:
    ivs = sorted(ivs, key=_lo_key)
    out: list[Interval] = []
    for iv in ivs:
        if out and _mergeable(out[-1], iv):
            a = out.pop()
            if iv.hi > a.hi:
                hi, hi_open = iv.hi, iv.hi_open
            elif iv.hi < a.hi:
                hi, hi_open = a.hi, a.hi_open
            else:
                hi, hi_open = a.hi, a.hi_open and iv.hi_open
            out.append(Interval(a.lo, hi, a.lo_open, hi_open))
        else:
            out.append(iv)
    return tuple(out)


def _complement_intervals(ivs: tuple[Interval, ...]) -> tuple[Interval, ...]:
    gaps: list[Interval] = []
    cursor = NEG_INF
    cursor_open = True  # whether `cursor` itself is excluded from the gap
    for iv in ivs:
        lo, hi = cursor, iv.lo
        lo_open, hi_open = cursor_open, not iv.lo_open
        ok = lo < hi or (lo == hi and not lo_open and not hi_open and lo != NEG_INF)
        if ok:
            gaps.append(Interval(lo, hi, lo_open, hi_open))
        cursor = iv.hi
        cursor_open = not iv.hi_open
    if cursor < POS_INF:
        gaps.append(Interval(cursor, POS_INF, cursor_open, True))
    elif cursor == POS_INF:
        pass
    return tuple(gaps)


def _intersect_two(a: Interval, b: Interval) -> Interval | None:
    if a.lo > b.lo:
        lo, lo_open = a.lo, a.lo_open
    elif b.lo > a.lo:
        lo, lo_open = b.lo, b.lo_open
    else:
        lo, lo_open = a.lo, a.lo_open or b.lo_open
    if a.hi < b.hi:
        hi, hi_open = a.hi, a.hi_open
    elif a.hi > b.hi:
        hi, hi_open = b.hi, b.hi_open
    else:
        hi, hi_open = a.hi, a.hi_open or b.hi_open
    if lo > hi:
        return None
    if lo == hi and (lo_open or hi_open):
        return None
    try:
        return Interval(lo, hi, lo_open, hi_open)
    except ValueError:
        return None


class SetExpr:
    """Immutable canonical subset of a carrier."""

    __slots__ = ("carrier", "form")

    def __init__(self, carrier: Carrier, form, _normalized: bool = False):
        object.__setattr__(self, "carrier", carrier)
        if not _normalized:
            form = _canonicalize(carrier, form)
        object.__setattr__(self, "form", form)

    def __setattr__(self, *a):
        raise AttributeError("SetExpr is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, SetExpr)
            and self.carrier == other.carrier
            and self.form == other.form
        )

    def __hash__(self):
        return hash((self.carrier, self.form))

    def __repr__(self):
        return f"SetExpr({render(self)!r})"

    # -- queries ----------------------------------------------------------
    def is_empty(self) -> bool:
        c = self.carrier
        if isinstance(c, FiniteEnum):
            return not self.form
        if isinstance(c, NatFC):
            elems, co = self.form
            return not co and not elems
        if isinstance(c, QLine):
            return not self.form
        return not self.form

    def is_whole(self) -> bool:
        return self == whole(self.carrier)

    def is_finite_pointset(self) -> bool:
        c = self.carrier
        if isinstance(c, FiniteEnum):
            return True
        if isinstance(c, NatFC):
            return not self.form[1]
        if isinstance(c, QLine):
            return all(iv.is_point() for iv in self.form)
        return all(l.is_finite_pointset() and r.is_finite_pointset() for l, r in self.form)

    def finite_points(self) -> list:
        """Points of a finite point set, in canonical order."""
        c = self.carrier
        if isinstance(c, FiniteEnum):
            return sorted(self.form)
        if isinstance(c, NatFC):
            elems, co = self.form
            if co:
                raise ValueError("cofinite set is not a finite point set")
            return sorted(elems)
        if isinstance(c, QLine):
            if not self.is_finite_pointset():
                raise ValueError("not a finite point set")
            return [iv.lo for iv in self.form]
        pts = []
        for l, r in self.form:
            for x in l.finite_points():
                for y in r.finite_points():
                    pts.append((x, y))
        return pts


def _canonicalize(carrier: Carrier, form):
    if isinstance(carrier, FiniteEnum):
        elems = frozenset(form)
        bad = elems - set(carrier.elements)
        if bad:
            raise ValueError(f"atoms outside carrier: {sorted(bad)}")
        return elems
    if isinstance(carrier, NatFC):
        elems, co = form
        elems = frozenset(int(x) for x in elems)
        if any(x < 0 for x in elems):
            raise ValueError("naturals only")
        return (elems, bool(co))
    if isinstance(carrier, QLine):
        return normalize_intervals(form)
    if isinstance(carrier, Product):
        return _normalize_boxes(carrier, form)
    raise TypeError(f"unknown carrier {carrier!r}")


def _normalize_boxes(carrier: Product, boxes) -> tuple:
    boxes = [(l, r) for l, r in boxes if not l.is_empty() and not r.is_empty()]
    for l, r in boxes:
        if l.carrier != carrier.left or r.carrier != carrier.right:
            raise CarrierMismatch("box components on the wrong carrier")
    if not boxes:
        return ()
    # pre-merge to keep the cell decomposition small
    merged: dict[SetExpr, SetExpr] = {}
    for l, r in boxes:
        if r in merged:
            merged[r] = union(merged[r], l)
        else:
            merged[r] = l
    boxes = [(l, r) for r, l in merged.items()]
    n = len(boxes)
    fibers: dict[SetExpr, SetExpr] = {}
    for mask in range(1, 1 << n):
        cell = whole(carrier.left)
        for i in range(n):
            li = boxes[i][0]
            cell = intersect(cell, li if mask & (1 << i) else complement(li))
            if cell.is_empty():
                break
        if cell.is_empty():
            continue
        fiber = empty(carrier.right)
        for i in range(n):
            if mask & (1 << i):
                fiber = union(fiber, boxes[i][1])
        if fiber.is_empty():
            continue
        if fiber in fibers:
            fibers[fiber] = union(fibers[fiber], cell)
        else:
            fibers[fiber] = cell
    out = [(cell, fiber) for fiber, cell in fibers.items()]
    out.sort(key=lambda b: sort_key(b[0]))
    return tuple(out)


# -- constructors ---------------------------------------------------------

def empty(carrier: Carrier) -> SetExpr:
    if isinstance(carrier, FiniteEnum):
        return SetExpr(carrier, frozenset(), _normalized=True)
    if isinstance(carrier, NatFC):
        return SetExpr(carrier, (frozenset(), False), _normalized=True)
    if isinstance(carrier, QLine):
        return SetExpr(carrier, (), _normalized=True)
    return SetExpr(carrier, (), _normalized=True)


def whole(carrier: Carrier) -> SetExpr:
    if isinstance(carrier, FiniteEnum):
        return SetExpr(carrier, frozenset(carrier.elements), _normalized=True)
    if isinstance(carrier, NatFC):
        return SetExpr(carrier, (frozenset(), True), _normalized=True)
    if isinstance(carrier, QLine):
        return SetExpr(carrier, (Interval(NEG_INF, POS_INF, True, True),), _normalized=True)
    return SetExpr(carrier, [(whole(carrier.left), whole(carrier.right))])


def atoms(carrier: FiniteEnum, names: Iterable[str]) -> SetExpr:
    return SetExpr(carrier, frozenset(names))


def nat_finite(elems: Iterable[int], carrier: NatFC = NatFC()) -> SetExpr:
    return SetExpr(carrier, (frozenset(elems), False))


def nat_cofinite(excluded: Iterable[int], carrier: NatFC = NatFC()) -> SetExpr:
    return SetExpr(carrier, (frozenset(excluded), True))


def interval(lo, hi, lo_open=True, hi_open=True, carrier: QLine = QLine()) -> SetExpr:
    lo = lo if lo in (NEG_INF, POS_INF) else Fraction(lo)
    hi = hi if hi in (NEG_INF, POS_INF) else Fraction(hi)
    if lo > hi or (lo == hi and (lo_open or hi_open)):
        return empty(carrier)
    return SetExpr(carrier, (Interval(lo, hi, lo_open, hi_open),))


def qpoint(x, carrier: QLine = QLine()) -> SetExpr:
    x = Fraction(x)
    return SetExpr(carrier, (Interval(x, x, False, False),))


def boxes(carrier: Product, pairs: Iterable[tuple[SetExpr, SetExpr]]) -> SetExpr:
    return SetExpr(carrier, list(pairs))


def box(l: SetExpr, r: SetExpr) -> SetExpr:
    return boxes(Product(l.carrier, r.carrier), [(l, r)])


# -- boolean operations ---------------------------------------------------

def _check_same_carrier(a: SetExpr, b: SetExpr):
    if a.carrier != b.carrier:
        raise CarrierMismatch(f"{a.carrier!r} vs {b.carrier!r}")


def union(a: SetExpr, b: SetExpr) -> SetExpr:
    _check_same_carrier(a, b)
    c = a.carrier
    if isinstance(c, FiniteEnum):
        return SetExpr(c, a.form | b.form, _normalized=True)
    if isinstance(c, NatFC):
        (ea, ca), (eb, cb) = a.form, b.form
        if not ca and not cb:
            return SetExpr(c, (ea | eb, False), _normalized=True)
        if ca and cb:
            return SetExpr(c, (ea & eb, True), _normalized=True)
        if ca:
            return SetExpr(c, (ea - eb, True), _normalized=True)
        return SetExpr(c, (eb - ea, True), _normalized=True)
    if isinstance(c, QLine):
        return SetExpr(c, a.form + b.form)
    return SetExpr(c, list(a.form) + list(b.form))


def complement(a: SetExpr) -> SetExpr:
    c = a.carrier
    if isinstance(c, FiniteEnum):
        return SetExpr(c, frozenset(c.elements) - a.form, _normalized=True)
    if isinstance(c, NatFC):
        elems, co = a.form
        return SetExpr(c, (elems, not co), _normalized=True)
    if isinstance(c, QLine):
        return SetExpr(c, _complement_intervals(a.form), _normalized=True)
    # complement of a union of boxes, recomputed into canonical box form
    result = whole(c)
    for l, r in a.form:
        piece = union(box(complement(l), whole(c.right)), box(l, complement(r)))
        result = intersect(result, piece)
    return result


def intersect(a: SetExpr, b: SetExpr) -> SetExpr:
    _check_same_carrier(a, b)
    c = a.carrier
    if isinstance(c, FiniteEnum):
        return SetExpr(c, a.form & b.form, _normalized=True)
    if isinstance(c, NatFC):
        return complement(union(complement(a), complement(b)))
    if isinstance(c, QLine):
        out = []
        for ia in a.form:
            for ib in b.form:
                r = _intersect_two(ia, ib)
                if r is not None:
                    out.append(r)
        return SetExpr(c, out)
    out = []
    for la, ra in a.form:
        for lb, rb in b.form:
            out.append((intersect(la, lb), intersect(ra, rb)))
    return SetExpr(c, out)


def minus(a: SetExpr, b: SetExpr) -> SetExpr:
    return intersect(a, complement(b))


def apply_boolean(op: str, a: SetExpr, b: SetExpr | None = None) -> SetExpr:
    """Dispatch on one of {union, intersect, complement, minus}."""
    if op == "complement":
        if b is not None:
            raise ValueError("complement is unary")
        return complement(a)
    if b is None:
        raise ValueError(f"{op} needs two operands")
    return {"union": union, "intersect": intersect, "minus": minus}[op](a, b)


# -- comparisons ----------------------------------------------------------

@dataclass(frozen=True)
class Comparison:
    relation: str  # Equal | ProperSubset | ProperSuperset | Disjoint | Overlapping
    a_empty: bool
    b_empty: bool


def is_subset(a: SetExpr, b: SetExpr) -> bool:
    return minus(a, b).is_empty()


def compare(a: SetExpr, b: SetExpr) -> Comparison:
    _check_same_carrier(a, b)
    ae, be = a.is_empty(), b.is_empty()
    if a == b:
        rel = "Equal"
    elif is_subset(a, b):
        rel = "ProperSubset"
    elif is_subset(b, a):
        rel = "ProperSuperset"
    elif intersect(a, b).is_empty():
        rel = "Disjoint"
    else:
        rel = "Overlapping"
    return Comparison(rel, ae, be)


# -- membership -----------------------------------------------------------

def contains(S: SetExpr, x) -> bool:
    c = S.carrier
    if isinstance(c, FiniteEnum):
        if not isinstance(x, str) or x not in c.elements:
            raise UnrepresentablePoint(f"{x!r} is not an atom of {c.describe()}")
        return x in S.form
    if isinstance(c, NatFC):
        if not isinstance(x, int) or isinstance(x, bool) or x < 0:
            raise UnrepresentablePoint(f"{x!r} is not a natural number")
        elems, co = S.form
        return (x not in elems) if co else (x in elems)
    if isinstance(c, QLine):
        if isinstance(x, float):
            raise UnrepresentablePoint("QLine membership accepts rationals only")
        try:
            x = Fraction(x)
        except (TypeError, ValueError):
            raise UnrepresentablePoint(f"{x!r} is not a rational") from None
        return any(iv.contains(x) for iv in S.form)
    if not isinstance(x, tuple) or len(x) != 2:
        raise UnrepresentablePoint("product points are pairs")
    return any(contains(l, x[0]) and contains(r, x[1]) for l, r in S.form)


# -- point enumeration ----------------------------------------------------

def _interval_point_stream(iv: Interval) -> Iterator[Fraction]:
    if iv.is_point():
        yield iv.lo
        return
    if not iv.lo_open:
        yield iv.lo
    if not iv.hi_open:
        yield iv.hi
    lo, hi = iv.lo, iv.hi
    if lo == NEG_INF and hi == POS_INF:
        yield Fraction(0)
        k = 1
        while True:
            yield Fraction(k)
            yield Fraction(-k)
            k += 1
    elif lo == NEG_INF:
        k = 1
        while True:
            yield Fraction(hi) - k
            k += 1
    elif hi == POS_INF:
        k = 1
        while True:
            yield Fraction(lo) + k
            k += 1
    else:
        # dyadic midpoints, breadth first: all interior, all distinct
        queue = [(Fraction(lo), Fraction(hi))]
        while True:
            nxt = []
            for a, b in queue:
                m = (a + b) / 2
                yield m
                nxt.append((a, m))
                nxt.append((m, b))
            queue = nxt


def _point_streams(S: SetExpr) -> list[Iterator]:
    c = S.carrier
    if isinstance(c, FiniteEnum):
        return [iter(sorted(S.form))]
    if isinstance(c, NatFC):
        elems, co = S.form
        if not co:
            return [iter(sorted(elems))]

        def naturals():
            n = 0
            while True:
                if n not in elems:
                    yield n
                n += 1

        return [naturals()]
    if isinstance(c, QLine):
        return [_interval_point_stream(iv) for iv in S.form]

    def pairs(l: SetExpr, r: SetExpr):
        # Cantor-style enumeration over the two component streams
        lpts: list = []
        rpts: list = []
        lstream = _round_robin(_point_streams(l))
        rstream = _round_robin(_point_streams(r))
        l_done = r_done = False
        for d in itertools.count():
            if not l_done:
                try:
                    lpts.append(next(lstream))
                except StopIteration:
                    l_done = True
            if not r_done:
                try:
                    rpts.append(next(rstream))
                except StopIteration:
                    r_done = True
            if l_done and r_done and (not lpts or not rpts or d >= len(lpts) + len(rpts)):
                return
            for i in range(min(d + 1, len(lpts))):
                j = d - i
                if 0 <= j < len(rpts):
                    yield (lpts[i], rpts[j])

    return [pairs(l, r) for l, r in S.form]


def _round_robin(streams: list[Iterator]) -> Iterator:
    streams = list(streams)
    while streams:
        alive = []
        for s in streams:
            try:
                yield next(s)
                alive.append(s)
            except StopIteration:
                pass
        streams = alive


def enumerate_points(S: SetExpr, n: int, seed: int = 0) -> list:
    """Up to ``n`` distinct representable points of ``S``, deterministic per seed."""
    if n < 0:
        raise ValueError("n must be >= 0")
    seen = []
    seen_set = set()
    pool_target = 4 * n + 8
    for x in _round_robin(_point_streams(S)):
        if x not in seen_set:
            seen.append(x)
            seen_set.add(x)
        if len(seen) >= pool_target:
            break
    if len(seen) <= n:
        return seen
    rng = random.Random(seed)
    picked = rng.sample(range(len(seen)), n)
    return [seen[i] for i in sorted(picked)]


# -- rendering ------------------------------------------------------------

def render(S: SetExpr) -> str:
    c = S.carrier
    if S.is_empty():
        return "empty"
    if isinstance(c, FiniteEnum):
        return "{%s}" % ",".join(sorted(S.form))
    if isinstance(c, NatFC):
        elems, co = S.form
        body = ",".join(str(x) for x in sorted(elems))
        if co:
            return "whole" if not elems else "co{%s}" % body
        return "{%s}" % body
    if isinstance(c, QLine):
        return " u ".join(iv.render() for iv in S.form)
    return " u ".join("box(%s ; %s)" % (render(l), render(r)) for l, r in S.form)


def sort_key(S: SetExpr) -> str:
    return render(S)


def interval_closure(S: SetExpr) -> SetExpr:
    """Close every interval of a QLine set at its finite endpoints."""
    if not isinstance(S.carrier, QLine):
        raise CarrierMismatch("interval_closure only applies to the line")
    closed = [
        Interval(iv.lo, iv.hi, iv.lo == NEG_INF, iv.hi == POS_INF)
        for iv in S.form
    ]
    return SetExpr(S.carrier, normalize_intervals(closed), _normalized=True)


def interval_interior(S: SetExpr) -> SetExpr:
    """Open every interval of a QLine set; degenerate points vanish."""
    if not isinstance(S.carrier, QLine):
        raise CarrierMismatch("interval_interior only applies to the line")
    opened = [
        Interval(iv.lo, iv.hi, True, True)
        for iv in S.form
        if not iv.is_point()
    ]
    return SetExpr(S.carrier, normalize_intervals(opened), _normalized=True)
