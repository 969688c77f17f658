"""Kernel counting on circular-model instances.

Kernels of a circular instance decompose into single-vertex kernels plus,
for a fixed reference vertex, the classes "kernel visits a then b with the
reference position strictly inside the gap (a..b)". Each class is exactly
the set of kernels of the induced digraph on the complementary arc that
contain both a and b, and that arc unrolls into a linear instance once the
vertices strictly inside the gap (all absorbed by {a, b}) are deleted and
the intervals that cross the chosen cut point are shrunk away from it.

The per-left reuse: for a fixed a, one cut instance built for the farthest
eligible partner answers every eligible pair (a, b), because the sub-DAG
reachable from node (a, b) only depends on the induced digraph on vertex
intervals [a;y] with y up to b, which the bigger instance shares.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .bitset import VertexSet, bit, bits, iter_bits, popcount, to_list
from .digraph import Digraph, induced_subdigraph, is_kernel
from .errors import FlavorError, ModelError, NotBidirectionalError, PreconditionError
from .linear import (
    ZERO,
    CountReport,
    Key,
    KernelQuery,
    _assemble,
    _build_part,
    _empty_graph_report,
    _key_filter,
    _part_values,
    _witness_labels,
    flig_enumerate,
    flig_query,
    make_linear_instance,
)
from .model import CIRCULAR, LINEAR, FuzzyModel, nicify, validate_model


def single_vertex_kernels(d: Digraph) -> list[VertexSet]:
    """All one-vertex kernels: v must receive an edge from everyone else."""
    full = d.full_mask
    return [bit(v) for v in range(d.n) if d.in_adj[v] == full & ~bit(v)]


def _arc_contains(iv: tuple[Fraction, Fraction], p: Fraction) -> bool:
    a, b = iv
    return (p - a) % 1 <= (b - a) % 1


@dataclass(frozen=True)
class _Layout:
    """Distinct circular positions in anticlockwise order, with fibre masks."""

    values: tuple[Fraction, ...]
    pidx: tuple[int, ...]  # vertex -> index into values
    fibres: tuple[VertexSet, ...]

    @cached_property
    def prefix(self) -> tuple[VertexSet, ...]:
        acc, out = 0, []
        for f in self.fibres:
            acc |= f
            out.append(acc)
        return tuple(out)

    def arc_mask(self, ia: int, ib: int) -> VertexSet:
        """Vertices with position index in the cyclic closed range ia..ib."""
        if ia <= ib:
            lower = self.prefix[ia - 1] if ia else 0
            return self.prefix[ib] & ~lower
        lower = self.prefix[ia - 1] if ia else 0
        return (self.prefix[-1] & ~lower) | self.prefix[ib]

    def interior_mask(self, ia: int, ib: int) -> VertexSet:
        return self.arc_mask(ia, ib) & ~self.fibres[ia] & ~self.fibres[ib]


def _layout(m: FuzzyModel) -> _Layout:
    values = sorted(set(m.pos))
    idx_of = {p: i for i, p in enumerate(values)}
    pidx = tuple(idx_of[p] for p in m.pos)
    fibres = [0] * len(values)
    for v, p in enumerate(m.pos):
        fibres[idx_of[p]] |= bit(v)
    return _Layout(tuple(values), pidx, tuple(fibres))


def eligible_pairs(d: Digraph, m: FuzzyModel, alpha: int) -> list[tuple[int, int]]:
    """Ordered pairs (a, b): reference inside the half-open gap, non-adjacent,
    and {a, b} absorbing the whole closed arc from a to b."""
    lay = _layout(m)
    k = len(lay.values)
    out = []
    for a in range(d.n):
        ia = lay.pidx[a]
        da = (lay.pidx[alpha] - ia) % k
        for b in range(d.n):
            ib = lay.pidx[b]
            if a == b or ia == ib:
                continue
            if not da < (ib - ia) % k:
                continue
            if (d.und_adj[a] >> b) & 1:
                continue
            body = lay.arc_mask(ia, ib) & ~bit(a) & ~bit(b)
            if body & ~(d.in_adj[a] | d.in_adj[b]):
                continue
            out.append((a, b))
    return out


def _check_pair(d: Digraph, m: FuzzyModel, lay: _Layout, a: int, b: int) -> None:
    if a == b or lay.pidx[a] == lay.pidx[b]:
        raise PreconditionError("endpoints must sit at distinct positions")
    if (d.und_adj[a] >> b) & 1:
        raise PreconditionError(f"{a} and {b} are adjacent")
    body = lay.arc_mask(lay.pidx[a], lay.pidx[b]) & ~bit(a) & ~bit(b)
    if body & ~(d.in_adj[a] | d.in_adj[b]):
        raise PreconditionError(f"{{{a},{b}}} does not absorb its arc")


def delete_absorbed(
    d: Digraph, m: FuzzyModel, a: int, b: int
) -> tuple[Digraph, tuple[int, ...]]:
    """Drop the interior of the arc from a to b (all absorbed by {a, b})."""
    lay = _layout(m)
    _check_pair(d, m, lay, a, b)
    body = lay.arc_mask(lay.pidx[a], lay.pidx[b]) & ~bit(a) & ~bit(b)
    assert not body & ~(d.in_adj[a] | d.in_adj[b])
    keep = d.full_mask & ~body
    return induced_subdigraph(d, keep)


def cut_to_flig(
    d: Digraph, m: FuzzyModel, a: int, b: int, renicify: bool = True
) -> tuple[Digraph, FuzzyModel, tuple[int, ...]]:
    """Unroll the circle for the pair (a, b) into a linear instance.

    Deletes the arc interior between a and b, removes the interval joining
    their positions if present, picks a cut point in a gap free of interval
    endpoints inside the now position-free arc, pulls the tip of every
    interval that crosses the cut back to its body's side, and relabels all
    positions clockwise from the cut so that a is leftmost and b rightmost.
    Kernels containing both a and b are preserved exactly.
    """
    if m.flavor != CIRCULAR:
        raise FlavorError("cut_to_flig expects a circular model")
    lay = _layout(m)
    _check_pair(d, m, lay, a, b)
    fa, fb = m.pos[a], m.pos[b]
    span = (fb - fa) % 1

    def off(p: Fraction) -> Fraction:
        return (p - fa) % 1

    body = lay.arc_mask(lay.pidx[a], lay.pidx[b]) & ~bit(a) & ~bit(b)
    sub, old_ids = induced_subdigraph(d, d.full_mask & ~body)

    kept: list[tuple[Fraction, Fraction]] = []
    for iv in m.intervals:
        if iv == (fa, fb):
            continue  # joins the pair's own positions: certifies nothing now
        s, t = iv
        strictly_inside = 0 < off(s) < span and 0 < off(t) < span
        if strictly_inside and off(s) <= off(t):
            continue  # lies wholly inside the position-free arc
        kept.append(iv)

    inner = sorted({off(e) for iv in kept for e in iv if 0 < off(e) < span})
    cut_off = _gap_midpoint(inner, span)
    cut = (fa + cut_off) % 1

    movers_a: list[int] = []  # kept-indices whose anticlockwise tip crosses the cut
    movers_b: list[int] = []
    for i, iv in enumerate(kept):
        if not _arc_contains(iv, cut):
            continue
        if _arc_contains(iv, fa):
            movers_a.append(i)
        else:
            assert _arc_contains(iv, fb), "cut-crossing interval misses both boundaries"
            movers_b.append(i)

    adjusted = list(kept)
    if movers_a:
        movers_a.sort(key=lambda i: off(kept[i][1]))
        lo = max((e for e in inner if e < cut_off), default=ZERO)
        for j, i in enumerate(movers_a):
            fresh = lo + (cut_off - lo) * Fraction(j + 1, len(movers_a) + 1)
            adjusted[i] = (adjusted[i][0], (fa + fresh) % 1)
    if movers_b:
        movers_b.sort(key=lambda i: off(kept[i][0]))
        hi = min((e for e in inner if e > cut_off), default=span)
        for j, i in enumerate(movers_b):
            fresh = cut_off + (hi - cut_off) * Fraction(j + 1, len(movers_b) + 1)
            adjusted[i] = ((fa + fresh) % 1, adjusted[i][1])

    def lam(p: Fraction) -> Fraction:
        return (cut - p) % 1

    new_pos = tuple(lam(m.pos[v]) for v in old_ids)
    new_ivs = []
    for s, t in adjusted:
        lo, hi = lam(t), lam(s)
        assert 0 < lo < hi < 1, "interval still crosses the cut"
        new_ivs.append((lo, hi))
    model = FuzzyModel(LINEAR, new_pos, tuple(new_ivs))
    if renicify:
        model = nicify(sub, model)
    return sub, model, old_ids


def _gap_midpoint(inner: list[Fraction], span: Fraction) -> Fraction:
    """Midpoint of the endpoint-free gap containing the naive arc midpoint."""
    stops = [ZERO] + list(inner) + [span]
    naive = span / 2
    for lo, hi in zip(stops, stops[1:]):
        if lo <= naive <= hi and lo < hi:
            return (lo + hi) / 2
    raise AssertionError("no endpoint-free gap in the forbidden arc")


def _remap_query(q: KernelQuery, old_ids: tuple[int, ...]) -> KernelQuery:
    lower = 0
    upper = 0 if q.upper is not None else None
    for new, old in enumerate(old_ids):
        if (q.lower >> old) & 1:
            lower |= bit(new)
        if upper is not None and (q.upper >> old) & 1:
            upper |= bit(new)
    weights = (
        tuple(q.weights[old] for old in old_ids) if q.weights is not None else None
    )
    return KernelQuery(lower, upper, weights, q.target, q.size)


def _pair_groups(pairs: list[tuple[int, int]], m: FuzzyModel, lay: _Layout):
    groups: dict[int, list[int]] = {}
    for a, b in pairs:
        groups.setdefault(a, []).append(b)
    k = len(lay.values)
    for a, bs in groups.items():
        bs.sort(key=lambda b: (lay.pidx[b] - lay.pidx[a]) % k)
    return groups


def _pair_profiles(
    d: Digraph,
    m: FuzzyModel,
    q: KernelQuery,
    reuse_parts: bool,
):
    """Yield (a, b, profile dict Key->count, witness thunk) per eligible pair.

    Profiles carry full kernel keys (size, weight); size/target filtering is
    left to the assembler so totals and histograms stay consistent.
    """
    lay = _layout(m)
    pairs = eligible_pairs(d, m, alpha=0)
    groups = _pair_groups(pairs, m, lay)
    size_cap = q.size - 1 if q.size is not None else None
    out = []
    for a in sorted(groups):
        bs = groups[a]
        # the nearest eligible partner has the smallest forbidden arc, hence
        # the largest surviving instance: it serves every farther partner
        chain = [bs[0]] if reuse_parts else bs
        served: set[int] = set()
        for anchor_b in chain:
            sub, model, old_ids = cut_to_flig(d, m, a, anchor_b, renicify=False)
            if q.lower & ~bits(old_ids):
                # a required vertex was deleted: every pair served by this
                # instance contributes nothing
                served.update(bs if reuse_parts else [anchor_b])
                continue
            inst = make_linear_instance(sub, model, trust=True)
            new_of = {old: new for new, old in enumerate(old_ids)}
            q2 = _remap_query(q, old_ids)
            part = _build_part(inst, new_of[a], q2)
            vals = _part_values(part, inst.order, q2.weights, size_cap)
            targets = bs if reuse_parts else [anchor_b]
            for b in targets:
                if b in served:
                    continue
                served.add(b)
                nb = new_of[b]
                if not _pair_root_ok(inst, q2, nb):
                    continue
                wb = q2.weight_of(nb)
                profile = {
                    (l + 1, w + wb): c for (l, w), c in vals[nb].items()
                }
                if not profile:
                    continue
                out.append(
                    (
                        a,
                        b,
                        profile,
                        _make_pair_witness(part, vals, q2, nb, wb, old_ids),
                    )
                )
    return out


def _pair_root_ok(inst, q2: KernelQuery, nb: int) -> bool:
    order = inst.order
    rb = order.rank[nb]
    allowed = q2.upper if q2.upper is not None else inst.graph.full_mask
    if not (allowed >> nb) & 1:
        return False
    if q2.lower:
        above = inst.graph.full_mask & ~order.upto_masks[rb]
        if q2.lower & above:
            return False
        if q2.lower & (order.class_masks[rb] & ~bit(nb)):
            return False
    return True


def _make_pair_witness(part, vals, q2, nb, wb, old_ids):
    def thunk(key: Key) -> VertexSet:
        sub_key = (key[0] - 1, key[1] - wb)
        labels = _witness_labels(part, vals, q2.weights, nb, sub_key)
        acc = bit(old_ids[nb])
        for v in labels:
            acc |= bit(old_ids[v])
        return acc

    return thunk


def fcig_query(
    d: Digraph,
    m: FuzzyModel,
    q: KernelQuery = KernelQuery(),
    reuse_parts: bool = True,
    with_witness: bool = True,
) -> CountReport:
    """Count (and optionally exhibit) constrained kernels of a circular instance."""
    if m.flavor != CIRCULAR:
        raise FlavorError("fcig_query expects a circular model; use flig_query")
    if q.trivially_empty():
        return CountReport(0, {}, {} if q.weights is not None else None, None)
    if d.n == 0:
        return _empty_graph_report(q)
    rep = validate_model(d, m)
    if not rep.axioms_ok:
        raise ModelError("model fails an axiom:\n" + "\n".join(rep.lines()))
    if not rep.fibres_are_cliques:
        raise ModelError(
            f"same-position vertices {rep.nonclique_fibre_pair} are not adjacent"
        )
    m = nicify(d, m, rep)

    contribs = []
    witness_thunks = {}
    allowed = q.upper if q.upper is not None else d.full_mask
    for v in (to_list(s)[0] for s in single_vertex_kernels(d)):
        if q.lower & ~bit(v) or not (allowed >> v) & 1:
            continue
        key = (1, q.weight_of(v))
        tag = ("single", v)
        contribs.append((tag, {key: 1}))
        witness_thunks[tag] = (lambda vv: (lambda _key: bit(vv)))(v)
    for a, b, profile, thunk in _pair_profiles(d, m, q, reuse_parts):
        tag = ("pair", a, b)
        contribs.append((tag, profile))
        witness_thunks[tag] = thunk

    def witness_fn(tag, key: Key) -> VertexSet:
        return witness_thunks[tag](key)

    return _assemble(contribs, q, with_witness, witness_fn)


def fcig_breakdown(
    d: Digraph,
    m: FuzzyModel,
    q: KernelQuery = KernelQuery(),
    reuse_parts: bool = True,
) -> dict:
    """Per-class totals of the decomposition, for disjointness checking."""
    rep = validate_model(d, m)
    if not rep.axioms_ok or not rep.fibres_are_cliques:
        raise ModelError("invalid model")
    m2 = nicify(d, m, rep)
    ok = _key_filter(q)
    allowed = q.upper if q.upper is not None else d.full_mask
    singles = []
    for s in single_vertex_kernels(d):
        v = to_list(s)[0]
        if q.lower & ~bit(v) or not (allowed >> v) & 1:
            continue
        if ok((1, q.weight_of(v))):
            singles.append(v)
    pair_totals = {}
    for a, b, profile, _ in _pair_profiles(d, m2, q, reuse_parts):
        pair_totals[(a, b)] = sum(c for key, c in profile.items() if ok(key))
    return {"singles": singles, "pairs": pair_totals}


def fcig_enumerate(
    d: Digraph,
    m: FuzzyModel,
    q: KernelQuery = KernelQuery(),
    limit: int | None = None,
) -> list[VertexSet]:
    """All constrained kernels of a circular instance, each exactly once."""
    if m.flavor != CIRCULAR:
        raise FlavorError("fcig_enumerate expects a circular model")
    if q.trivially_empty() or d.n == 0:
        return [0] if d.n == 0 and not q.trivially_empty() and not q.lower and _key_filter(q)((0, ZERO)) else []
    rep = validate_model(d, m)
    if not rep.axioms_ok or not rep.fibres_are_cliques:
        raise ModelError("invalid model")
    m = nicify(d, m, rep)
    ok = _key_filter(q)
    allowed = q.upper if q.upper is not None else d.full_mask
    out: list[VertexSet] = []
    for s in single_vertex_kernels(d):
        v = to_list(s)[0]
        if q.lower & ~bit(v) or not (allowed >> v) & 1 or not ok((1, q.weight_of(v))):
            continue
        out.append(s)
        if limit is not None and len(out) >= limit:
            return out
    lay = _layout(m)
    for a, b in eligible_pairs(d, m, alpha=0):
        sub, model, old_ids = cut_to_flig(d, m, a, b, renicify=False)
        if q.lower & ~bits(old_ids):
            continue
        q2 = _remap_query(q, old_ids)
        q3 = KernelQuery(
            q2.lower | bit(_new_id(old_ids, a)) | bit(_new_id(old_ids, b)),
            q2.upper,
            q2.weights,
            q2.target,
            q2.size,
        )
        for kmask in flig_enumerate(sub, model, q3, trust_model=True):
            acc = 0
            for v in iter_bits(kmask):
                acc |= bit(old_ids[v])
            out.append(acc)
            if limit is not None and len(out) >= limit:
                return out
    return out


def _new_id(old_ids: tuple[int, ...], old: int) -> int:
    return old_ids.index(old)


def mis_counts(d: Digraph, m: FuzzyModel) -> CountReport:
    """Maximal-independent-set counts: kernels of the all-bidirectional digraph."""
    if not d.is_bidirectional():
        one_way = next((u, v) for u, v in d.edges if (v, u) not in d.edges)
        raise NotBidirectionalError(f"edge {one_way} has no reverse")
    if m.flavor == CIRCULAR:
        return fcig_query(d, m)
    return flig_query(d, m)
