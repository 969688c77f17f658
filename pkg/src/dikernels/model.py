"""Fuzzy circular/linear interval models.

A model is a map vertex -> exact rational position plus a set of closed
intervals. Circular positions live on the unit circle [0,1) and an interval
(a, b) is the closed arc from a anticlockwise to b; linear positions live on
the segment [0,1] and intervals are ordinary. Everything is exact Fraction
arithmetic, never floats: the model axioms hinge on exact endpoint equality.

The four axioms:
  1. no two intervals share an endpoint;
  2. no proper inclusions among intervals;
  3. every adjacent vertex pair lies together in some interval;
  4. a non-adjacent pair lies together in an interval only with their two
     positions exactly at its two endpoints (the "fuzzy" pairs).

A model is *nice* when it has at most as many intervals as vertices and
same-position vertices (fibres) are always adjacent.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .bitset import VertexSet, bit, bits, iter_bits, to_list
from .digraph import Digraph, induced_subdigraph, is_independent
from .errors import FlavorError, ModelError, PreconditionError

Rational = Fraction

LINEAR = "linear"
CIRCULAR = "circular"


@dataclass(frozen=True)
class FuzzyModel:
    flavor: str
    pos: tuple[Rational, ...]
    intervals: tuple[tuple[Rational, Rational], ...]

    def __post_init__(self):
        if self.flavor not in (LINEAR, CIRCULAR):
            raise ModelError(f"unknown flavor {self.flavor!r}")
        for p in self.pos:
            if self.flavor == CIRCULAR and not (0 <= p < 1):
                raise ModelError(f"circular position {p} outside [0,1)")
            if self.flavor == LINEAR and not (0 <= p <= 1):
                raise ModelError(f"linear position {p} outside [0,1]")
        for a, b in self.intervals:
            if a == b:
                raise ModelError(f"degenerate interval at {a}")
            if self.flavor == LINEAR and not (0 <= a < b <= 1):
                raise ModelError(f"linear interval ({a},{b}) not increasing in [0,1]")
            if self.flavor == CIRCULAR and not (0 <= a < 1 and 0 <= b < 1):
                raise ModelError(f"circular endpoints ({a},{b}) outside [0,1)")

    @property
    def n(self) -> int:
        return len(self.pos)

    def contains(self, iv: tuple[Rational, Rational], p: Rational) -> bool:
        a, b = iv
        if self.flavor == LINEAR:
            return a <= p <= b
        return (p - a) % 1 <= (b - a) % 1

    def contains_strictly(self, iv: tuple[Rational, Rational], p: Rational) -> bool:
        a, b = iv
        if self.flavor == LINEAR:
            return a < p < b
        return 0 < (p - a) % 1 < (b - a) % 1

    def interval_subset(self, inner, outer) -> bool:
        c, dpt = inner
        a, b = outer
        if self.flavor == LINEAR:
            return a <= c and dpt <= b
        span = (b - a) % 1
        return (c - a) % 1 <= (dpt - a) % 1 <= span

    def covers_whole_circle(self) -> bool:
        """True iff the union of the intervals is the entire circle."""
        if self.flavor == LINEAR or not self.intervals:
            return False
        points = sorted({e for iv in self.intervals for e in iv})
        # The union misses a point iff some gap between consecutive endpoint
        # values (cyclically) has its midpoint uncovered.
        for i, e in enumerate(points):
            nxt = points[(i + 1) % len(points)]
            gap_mid = (e + ((nxt - e) % 1) / 2) % 1
            if not any(self.contains(iv, gap_mid) for iv in self.intervals):
                return False
        return True


@dataclass(frozen=True)
class WeakOrder:
    """Vertices bucketed by position; rank[v] is the index of v's class."""

    classes: tuple[tuple[int, ...], ...]
    rank: tuple[int, ...]

    @cached_property
    def class_masks(self) -> tuple[VertexSet, ...]:
        return tuple(bits(c) for c in self.classes)

    @cached_property
    def upto_masks(self) -> tuple[VertexSet, ...]:
        """upto_masks[r] = vertices of rank <= r."""
        acc, out = 0, []
        for m in self.class_masks:
            acc |= m
            out.append(acc)
        return tuple(out)

    def below_mask(self, r: int) -> VertexSet:
        return self.upto_masks[r - 1] if r > 0 else 0


@dataclass
class ValidationReport:
    vertex_count: int
    shared_endpoint: tuple[int, int] | None
    proper_inclusion: tuple[int, int] | None
    uncovered_edge: tuple[int, int] | None
    forced_pair: tuple[int, int, int] | None
    nonclique_fibre_pair: tuple[int, int] | None
    interval_budget_ok: bool
    injective: bool
    covers_circle: bool
    flavor: str

    @property
    def axioms_ok(self) -> bool:
        return (
            self.shared_endpoint is None
            and self.proper_inclusion is None
            and self.uncovered_edge is None
            and self.forced_pair is None
        )

    @property
    def fibres_are_cliques(self) -> bool:
        return self.nonclique_fibre_pair is None

    @property
    def nice(self) -> bool:
        return self.fibres_are_cliques and self.interval_budget_ok

    @property
    def ok(self) -> bool:
        return self.axioms_ok

    def lines(self) -> list[str]:
        out = []
        out.append(_check_line("axiom-1 distinct endpoints", self.shared_endpoint is None,
                               lambda: f"intervals {self.shared_endpoint} share an endpoint"))
        out.append(_check_line("axiom-2 no proper inclusions", self.proper_inclusion is None,
                               lambda: f"interval {self.proper_inclusion[0]} inside {self.proper_inclusion[1]}"))
        out.append(_check_line("axiom-3 adjacency covered", self.uncovered_edge is None,
                               lambda: f"edge {self.uncovered_edge} lies in no interval"))
        out.append(_check_line("axiom-4 fuzzy only at endpoints", self.forced_pair is None,
                               lambda: f"non-adjacent pair {self.forced_pair[:2]} forced by interval {self.forced_pair[2]}"))
        out.append(_check_line("fibres are cliques", self.nonclique_fibre_pair is None,
                               lambda: f"same-position pair {self.nonclique_fibre_pair} not adjacent"))
        out.append(f"interval budget: {'ok' if self.interval_budget_ok else 'exceeded (warn)'}")
        out.append(f"nice: {'yes' if self.nice else 'no'}")
        out.append(f"injective positions: {'yes' if self.injective else 'no'}")
        if self.flavor == CIRCULAR:
            out.append(
                "covers circle: yes" if self.covers_circle
                else "covers circle: no (model is presentable on a segment)"
            )
        return out


def _check_line(name: str, ok: bool, detail) -> str:
    return f"{name}: pass" if ok else f"{name}: FAIL ({detail()})"


def validate_model(d: Digraph, m: FuzzyModel) -> ValidationReport:
    """Check the four model axioms and niceness, with concrete witnesses."""
    if len(m.pos) != d.n:
        raise ModelError(
            f"missing position: model has {len(m.pos)} positions for {d.n} vertices"
        )
    ivs = m.intervals

    shared = None
    seen: dict[Rational, int] = {}
    for i, (a, b) in enumerate(ivs):
        for e in (a, b):
            if e in seen and shared is None:
                shared = (seen[e], i)
            seen.setdefault(e, i)

    inclusion = None
    for i in range(len(ivs)):
        for j in range(len(ivs)):
            if i != j and m.interval_subset(ivs[i], ivs[j]) and ivs[i] != ivs[j]:
                inclusion = (i, j)
                break
        if inclusion:
            break

    members = [bits(v for v in range(d.n) if m.contains(iv, m.pos[v])) for iv in ivs]

    covered = [0] * d.n
    for mem in members:
        for u in iter_bits(mem):
            covered[u] |= mem
    uncovered_edge = None
    for u in range(d.n):
        missing = d.und_adj[u] & ~covered[u]
        if missing:
            uncovered_edge = (u, next(iter_bits(missing)))
            break

    forced_pair = None
    for i, mem in enumerate(members):
        lo, hi = ivs[i]
        lo_fibre = bits(v for v in iter_bits(mem) if m.pos[v] == lo)
        hi_fibre = bits(v for v in iter_bits(mem) if m.pos[v] == hi)
        for u in iter_bits(mem):
            if m.pos[u] == lo:
                allowed = hi_fibre
            elif m.pos[u] == hi:
                allowed = lo_fibre
            else:
                allowed = 0
            offenders = mem & ~d.und_adj[u] & ~bit(u) & ~allowed
            if offenders:
                forced_pair = (u, next(iter_bits(offenders)), i)
                break
        if forced_pair:
            break

    nonclique = None
    by_pos: dict[Rational, list[int]] = {}
    for v in range(d.n):
        by_pos.setdefault(m.pos[v], []).append(v)
    for group in by_pos.values():
        for i, u in enumerate(group):
            for v in group[i + 1:]:
                if not (d.und_adj[u] >> v) & 1:
                    nonclique = (u, v)
                    break
            if nonclique:
                break
        if nonclique:
            break

    return ValidationReport(
        vertex_count=d.n,
        shared_endpoint=shared,
        proper_inclusion=inclusion,
        uncovered_edge=uncovered_edge,
        forced_pair=forced_pair,
        nonclique_fibre_pair=nonclique,
        interval_budget_ok=len(ivs) <= d.n,
        injective=len(by_pos) == d.n,
        covers_circle=m.covers_whole_circle(),
        flavor=m.flavor,
    )


def fibre_mask(m: FuzzyModel, p: Rational) -> VertexSet:
    return bits(v for v in range(m.n) if m.pos[v] == p)


def nicify(d: Digraph, m: FuzzyModel, report_ok: ValidationReport | None = None) -> FuzzyModel:
    """Delete redundant intervals greedily (input order) while axiom 3 holds.

    Keeps positions untouched. The result may still have more intervals than
    vertices in contrived cases; validate_model exposes that as a warning
    flag, not an error.
    """
    rep = report_ok or validate_model(d, m)
    if not rep.axioms_ok:
        raise ModelError("nicify requires a model passing axioms 1-4")
    if not rep.fibres_are_cliques:
        raise ModelError(
            f"nicify: same-position vertices {rep.nonclique_fibre_pair} are not adjacent"
        )
    kept = list(m.intervals)
    i = 0
    while i < len(kept):
        trial = kept[:i] + kept[i + 1:]
        if _coverage_ok(d, FuzzyModel(m.flavor, m.pos, tuple(trial))):
            kept = trial
        else:
            i += 1
    return FuzzyModel(m.flavor, m.pos, tuple(kept))


def _coverage_ok(d: Digraph, m: FuzzyModel) -> bool:
    covered = [0] * d.n
    for iv in m.intervals:
        mem = bits(v for v in range(d.n) if m.contains(iv, m.pos[v]))
        for u in iter_bits(mem):
            covered[u] |= mem
    return all(d.und_adj[u] & ~covered[u] == 0 for u in range(d.n))


def weak_order(d: Digraph, m: FuzzyModel) -> WeakOrder:
    """Position fibres sorted by increasing position (linear models only)."""
    if m.flavor != LINEAR:
        raise FlavorError("weak order is defined on linear models; cut circular models first")
    if len(m.pos) != d.n:
        raise ModelError("missing position")
    by_pos: dict[Rational, list[int]] = {}
    for v in range(d.n):
        by_pos.setdefault(m.pos[v], []).append(v)
    classes = tuple(tuple(by_pos[p]) for p in sorted(by_pos))
    rank = [0] * d.n
    for r, cls in enumerate(classes):
        for v in cls:
            rank[v] = r
    return WeakOrder(classes, tuple(rank))


def anchor_fibre(m: FuzzyModel, order: WeakOrder, x: int) -> VertexSet:
    """Vertices at the far endpoint of the unique interval closing at x.

    In a linear model at most one interval has its right endpoint exactly at
    x's position (endpoints are pairwise distinct); the result is the fibre
    of that interval's left endpoint, or the empty set when there is no such
    interval or no vertex sits there.
    """
    p = m.pos[x]
    for a, b in m.intervals:
        if b == p:
            return fibre_mask(m, a)
    return 0


def vertex_interval(
    order: WeakOrder,
    x: int,
    y: int,
    left_closed: bool = True,
    right_closed: bool = True,
) -> VertexSet:
    """All vertices whose class rank lies between x's and y's."""
    rx, ry = order.rank[x], order.rank[y]
    if rx > ry:
        raise PreconditionError(f"inverted range: rank({x})={rx} > rank({y})={ry}")
    lo = rx if left_closed else rx + 1
    hi = ry if right_closed else ry - 1
    if lo > hi:
        return 0
    return order.upto_masks[hi] & ~order.below_mask(lo)


def restrict_model(d: Digraph, m: FuzzyModel, s: VertexSet) -> FuzzyModel:
    """Model for the induced subgraph on s, in induced_subdigraph's id order."""
    old_ids = to_list(s)
    return FuzzyModel(m.flavor, tuple(m.pos[v] for v in old_ids), m.intervals)


def restricted_instance(d: Digraph, m: FuzzyModel, s: VertexSet):
    sub, old_ids = induced_subdigraph(d, s)
    return sub, restrict_model(d, m, s), old_ids


def independent_sets_are_chains(d: Digraph, m: FuzzyModel, order: WeakOrder, samples) -> bool:
    """In a nice model every independent set has all-distinct ranks."""
    for s in samples:
        if not is_independent(d, s):
            continue
        ranks = [order.rank[v] for v in iter_bits(s)]
        if len(ranks) != len(set(ranks)):
            return False
    return True
