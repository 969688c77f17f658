"""Kernel counting on linear-model instances via a labelled subproblem DAG.

A kernel of a linear-model digraph is totally ordered by position, so it can
be reconstructed right-to-left: a node (x, y) of the subproblem DAG stands
for "kernels of the induced digraph on the vertex interval [x;y] containing
both x and y", and its out-edges enumerate the admissible choices of the
next kernel vertex below y. Directed paths from (x, y) to the terminal of x
are in bijection with those kernels; the kernel is read off the edge labels
plus y itself.

Two label shapes occur: a single vertex w (the next kernel vertex), or a
pair (m, w) where m sits in the anchor fibre of y (the fibre at the far end
of the unique interval closing at y's position) and w is the vertex below m.
Terminal edges close the kernel with x (or with nothing when the part root
is the virtual isolated vertex used by full-graph queries).

Everything is exact: big-int counts, Fraction weights.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .bitset import VertexSet, bit, bits, iter_bits, to_list
from .digraph import Digraph, absorbs
from .errors import ModelError, PreconditionError
from .model import (
    FuzzyModel,
    WeakOrder,
    anchor_fibre,
    validate_model,
    vertex_interval,
    weak_order,
)

ZERO = Fraction(0)

Key = tuple[int, Fraction]  # (number of labels, total label weight)


@dataclass(frozen=True)
class KernelQuery:
    """Constraint bundle: lower <= kernel <= upper, exact weight/size."""

    lower: VertexSet = 0
    upper: VertexSet | None = None
    weights: tuple[Fraction, ...] | None = None
    target: Fraction | None = None
    size: int | None = None

    def weight_of(self, v: int) -> Fraction:
        return self.weights[v] if self.weights is not None else ZERO

    def trivially_empty(self) -> bool:
        return self.upper is not None and bool(self.lower & ~self.upper)


@dataclass
class CountReport:
    total: int
    by_size: dict[int, int]
    by_weight: dict[Fraction, int] | None = None
    witness: VertexSet | None = None


@dataclass(frozen=True)
class DagEdge:
    labels: tuple[int, ...]
    target: int | None  # right coordinate of the target node; None = terminal


@dataclass
class SubproblemDag:
    """Parts of the subproblem DAG, keyed by their left coordinate."""

    parts: dict[int, dict[int, tuple[DagEdge, ...]]]
    order: WeakOrder


@dataclass(frozen=True)
class LinearInstance:
    """A digraph with its weak order and precomputed anchor fibres."""

    graph: Digraph
    order: WeakOrder
    anchors: tuple[VertexSet, ...]

    @property
    def n(self) -> int:
        return self.graph.n


def make_linear_instance(d: Digraph, m: FuzzyModel, trust: bool = False) -> LinearInstance:
    if not trust:
        rep = validate_model(d, m)
        if not rep.axioms_ok:
            raise ModelError("model fails an axiom:\n" + "\n".join(rep.lines()))
        if not rep.fibres_are_cliques:
            raise ModelError(
                f"same-position vertices {rep.nonclique_fibre_pair} are not adjacent"
            )
    order = weak_order(d, m)
    left_of: dict[Fraction, Fraction] = {}
    for a, b in m.intervals:
        left_of[b] = a
    fibres: dict[Fraction, VertexSet] = {}
    for v in range(d.n):
        fibres[m.pos[v]] = fibres.get(m.pos[v], 0) | bit(v)
    anchors = []
    for v in range(d.n):
        a = left_of.get(m.pos[v])
        anchors.append(fibres.get(a, 0) if a is not None else 0)
    return LinearInstance(d, order, tuple(anchors))


# ---------------------------------------------------------------------------
# Candidate sets: the admissible "next kernel vertex" choices.


def candidate_predecessors(
    d: Digraph, m: FuzzyModel, order: WeakOrder, x: int, y: int
) -> VertexSet:
    """Direct evaluation of the plain candidate set for node (x, y).

    Vertices strictly between x and y, not neighbouring either, outside the
    anchor fibre of y, such that {candidate, y} absorbs everything from the
    candidate (exclusive) up to y (inclusive).
    """
    if order.rank[x] >= order.rank[y]:
        raise PreconditionError("need rank(x) < rank(y)")
    anch = anchor_fibre(m, order, y)
    cands = (
        vertex_interval(order, x, y, False, False)
        & ~(d.und_adj[x] | d.und_adj[y])
        & ~anch
    )
    out = 0
    for mm in iter_bits(cands):
        zone = vertex_interval(order, mm, y, False, True)
        if absorbs(d, bit(mm) | bit(y), zone):
            out |= bit(mm)
    return out


def anchored_predecessors(
    d: Digraph, m: FuzzyModel, order: WeakOrder, x: int, mid: int, y: int
) -> VertexSet:
    """Direct evaluation of the anchored candidate set for (x, mid, y)."""
    if order.rank[x] >= order.rank[y]:
        raise PreconditionError("need rank(x) < rank(y)")
    if not (anchor_fibre(m, order, y) >> mid) & 1:
        raise PreconditionError(f"{mid} is not in the anchor fibre of {y}")
    if ((d.und_adj[x] | d.und_adj[y]) >> mid) & 1:
        raise PreconditionError(f"{mid} neighbours x or y")
    if order.rank[mid] <= order.rank[x]:
        return 0
    cands = vertex_interval(order, x, mid, False, False) & ~(
        d.und_adj[x] | d.und_adj[mid]
    )
    out = 0
    for w in iter_bits(cands):
        zone = vertex_interval(order, w, y, False, True)
        if absorbs(d, bit(w) | bit(mid) | bit(y), zone):
            out |= bit(w)
    return out


def _plain_options(inst: LinearInstance, y0: int, stop_rank: int) -> VertexSet:
    """Union over ranks > stop_rank of the plain candidates below y0.

    One descending class sweep: a running candidate mask is intersected with
    the out-neighbourhoods of every swept vertex that is not already absorbed
    by y0, and candidates are harvested class by class. The node-specific set
    is this union intersected with the non-neighbours of the left coordinate.
    """
    d, order = inst.graph, inst.order
    rank, cls = order.rank, order.class_masks
    out_adj, in_y = d.out_adj, d.in_adj[y0]
    ry = rank[y0]
    cand = order.below_mask(ry) & ~d.und_adj[y0] & ~inst.anchors[y0]
    if stop_rank >= 0:
        cand &= ~order.upto_masks[stop_rank]
    for z in iter_bits(cls[ry] & ~bit(y0) & ~in_y):
        cand &= out_adj[z]
        if not cand:
            return 0
    acc = 0
    for r in range(ry - 1, stop_rank, -1):
        if not cand:
            break
        c = cls[r]
        acc |= c & cand
        for z in iter_bits(c & ~in_y):
            cand &= out_adj[z]
            if not cand:
                break
    return acc


def _anchored_options(inst: LinearInstance, y0: int, mid: int, stop_rank: int) -> VertexSet:
    """Like _plain_options but for triples through an anchor vertex mid."""
    d, order = inst.graph, inst.order
    rank, cls = order.rank, order.class_masks
    out_adj = d.out_adj
    exempt = d.in_adj[y0] | d.in_adj[mid]
    ry, rm = rank[y0], rank[mid]
    cand = order.below_mask(rm) & ~d.und_adj[mid]
    if stop_rank >= 0:
        cand &= ~order.upto_masks[stop_rank]
    for z in iter_bits(cls[ry] & ~bit(y0) & ~exempt):
        cand &= out_adj[z]
        if not cand:
            return 0
    acc = 0
    for r in range(ry - 1, stop_rank, -1):
        if not cand:
            break
        c = cls[r]
        if r < rm:
            acc |= c & cand
        for z in iter_bits(c & ~exempt & ~bit(mid)):
            cand &= out_adj[z]
            if not cand:
                break
    return acc


def candidate_predecessors_map(
    d: Digraph, m: FuzzyModel, order: WeakOrder, y0: int, xs: VertexSet
) -> dict[int, VertexSet]:
    """Plain candidates for a fixed y0 and every left coordinate in xs.

    Single sweep, so the cost is O(n * |xs| + size) instead of one full pass
    per pair. Keys are the members of xs strictly below y0.
    """
    inst = make_linear_instance(d, m, trust=True)
    rank, cls = order.rank, order.class_masks
    out_adj, in_y = d.out_adj, d.in_adj[y0]
    ry = rank[y0]
    cand = order.below_mask(ry) & ~d.und_adj[y0] & ~inst.anchors[y0]
    for z in iter_bits(cls[ry] & ~bit(y0) & ~in_y):
        cand &= out_adj[z]
    acc = 0
    result: dict[int, VertexSet] = {}
    for r in range(ry - 1, -1, -1):
        for x in iter_bits(cls[r] & xs):
            result[x] = acc & ~d.und_adj[x]
        c = cls[r]
        acc |= c & cand
        for z in iter_bits(c & ~in_y):
            cand &= out_adj[z]
    return result


def anchored_predecessors_map(
    d: Digraph, m: FuzzyModel, order: WeakOrder, y0: int, xs: VertexSet
) -> dict[tuple[int, int], VertexSet]:
    """Anchored candidates for fixed y0, keyed by (left coordinate, anchor).

    Anchor vertices adjacent to y0 are excluded from the key set, as are
    pairs where the anchor neighbours the left coordinate (the set is not
    defined there).
    """
    inst = make_linear_instance(d, m, trust=True)
    rank, cls = order.rank, order.class_masks
    out_adj = d.out_adj
    ry = rank[y0]
    result: dict[tuple[int, int], VertexSet] = {}
    for mid in to_list(inst.anchors[y0] & ~d.und_adj[y0] & order.below_mask(ry)):
        rm = rank[mid]
        exempt = d.in_adj[y0] | d.in_adj[mid]
        cand = order.below_mask(rm) & ~d.und_adj[mid]
        for z in iter_bits(cls[ry] & ~bit(y0) & ~exempt):
            cand &= out_adj[z]
        acc = 0
        for r in range(ry - 1, -1, -1):
            for x in iter_bits(cls[r] & xs):
                if not (d.und_adj[mid] >> x) & 1:
                    result[(x, mid)] = acc & ~d.und_adj[x]
            c = cls[r]
            if r < rm:
                acc |= c & cand
            for z in iter_bits(c & ~exempt & ~bit(mid)):
                cand &= out_adj[z]
    return result


# ---------------------------------------------------------------------------
# DAG construction.


def _build_part(
    inst: LinearInstance, x0: int | None, q: KernelQuery
) -> dict[int, tuple[DagEdge, ...]]:
    """Out-edges of every node with left coordinate x0 (None = virtual root).

    The virtual root acts as an isolated vertex left of everything: it is in
    no label and never constrains adjacency, which turns "kernels of the
    whole graph with rightmost vertex y" into ordinary (root, y) nodes.

    Lower/upper constraints are enforced here by edge deletion: an edge
    survives only if its labels are allowed and no required vertex is
    skipped inside the position gaps the edge closes.
    """
    d, order = inst.graph, inst.order
    rank, cls, upto = order.rank, order.class_masks, order.upto_masks
    und, in_adj = d.und_adj, d.in_adj
    allowed = q.upper if q.upper is not None else d.full_mask
    s_mask = q.lower
    real = x0 is not None
    x0_rank = rank[x0] if real else -1
    x0_bit = bit(x0) if real else 0
    x0_in = in_adj[x0] if real else 0
    x0_und = und[x0] if real else 0
    x0_extra = (cls[x0_rank] & ~x0_bit) if real else 0
    low_cut = order.below_mask(x0_rank) if real else 0
    x0_allowed = (not real) or bool((allowed >> x0) & 1)

    def between(rlo: int, rhi: int) -> VertexSet:
        # vertices with rank strictly between rlo and rhi
        if rhi - rlo <= 1:
            return 0
        return upto[rhi - 1] & ~upto[rlo] if rlo >= 0 else upto[rhi - 1]

    def gap_clear(wv: int, rw: int, yv: int, ry: int) -> bool:
        # no required vertex inside [w;y] other than w and y themselves
        zone = between(rw, ry) | (cls[rw] & ~bit(wv)) | (cls[ry] & ~bit(yv))
        return not s_mask & zone

    part: dict[int, tuple[DagEdge, ...]] = {}
    for ry in range(x0_rank + 1, len(cls)):
        seg = upto[ry] & ~low_cut
        for y in order.classes[ry]:
            if real and (x0_und >> y) & 1:
                part[y] = ()
                continue
            edges: list[DagEdge] = []
            others = seg & ~x0_bit & ~bit(y)
            if not others & ~(x0_in | in_adj[y]):
                # the pair {x0, y} already absorbs its whole interval
                if x0_allowed and not s_mask & others:
                    edges.append(DagEdge((x0,) if real else (), None))
                part[y] = tuple(edges)
                continue
            lam = _plain_options(inst, y, x0_rank) & allowed & ~x0_und
            for w in to_list(lam):
                if s_mask and not gap_clear(w, rank[w], y, ry):
                    continue
                edges.append(DagEdge((w,), w))
            mids = inst.anchors[y] & between(x0_rank, ry) & ~und[y] & ~x0_und
            for mid in to_list(mids):
                if not (allowed >> mid) & 1:
                    continue
                rm = rank[mid]
                if s_mask and not gap_clear(mid, rm, y, ry):
                    continue
                rest = others & ~bit(mid)
                if not rest & ~(x0_in | in_adj[mid] | in_adj[y]):
                    # the triple {x0, mid, y} closes the kernel
                    low_zone = between(x0_rank, rm) | (cls[rm] & ~bit(mid)) | x0_extra
                    if x0_allowed and not s_mask & low_zone:
                        edges.append(DagEdge((mid, x0) if real else (mid,), None))
                else:
                    lam2 = _anchored_options(inst, y, mid, x0_rank) & allowed & ~x0_und
                    for w in to_list(lam2):
                        if s_mask and not gap_clear(w, rank[w], mid, rm):
                            continue
                        edges.append(DagEdge((mid, w), w))
            part[y] = tuple(edges)
    return part


def build_dag(
    d: Digraph,
    m: FuzzyModel,
    order: WeakOrder,
    q: KernelQuery = KernelQuery(),
    roots: tuple[int, ...] | list[int] = (),
) -> SubproblemDag:
    """Materialize the DAG parts whose left coordinate is in roots."""
    inst = make_linear_instance(d, m, trust=True)
    return SubproblemDag({x: _build_part(inst, x, q) for x in roots}, inst.order)


# ---------------------------------------------------------------------------
# Path computations on a part.


def _edge_key(e: DagEdge, weights: tuple[Fraction, ...] | None) -> Key:
    if weights is None:
        return (len(e.labels), ZERO)
    w = ZERO
    for v in e.labels:
        w += weights[v]
    return (len(e.labels), w)


def _part_values(
    part: dict[int, tuple[DagEdge, ...]],
    order: WeakOrder,
    weights: tuple[Fraction, ...] | None,
    size_cap: int | None,
) -> dict[int, dict[Key, int]]:
    """Bottom-up per-node path profiles: (label count, label weight) -> count."""
    vals: dict[int, dict[Key, int]] = {}
    for y in sorted(part, key=lambda v: (order.rank[v], v)):
        acc: dict[Key, int] = {}
        for e in part[y]:
            lk, wk = _edge_key(e, weights)
            if e.target is None:
                if size_cap is None or lk <= size_cap:
                    key = (lk, wk)
                    acc[key] = acc.get(key, 0) + 1
            else:
                for (tl, tw), c in vals[e.target].items():
                    nl = tl + lk
                    if size_cap is not None and nl > size_cap:
                        continue
                    key = (nl, tw + wk)
                    acc[key] = acc.get(key, 0) + c
        vals[y] = acc
    return vals


def _witness_labels(
    part: dict[int, tuple[DagEdge, ...]],
    vals: dict[int, dict[Key, int]],
    weights: tuple[Fraction, ...] | None,
    y: int,
    key: Key,
) -> list[int]:
    out: list[int] = []
    cur, k = y, key
    while True:
        for e in part[cur]:
            lk, wk = _edge_key(e, weights)
            if e.target is None:
                if k == (lk, wk):
                    out.extend(e.labels)
                    return out
            else:
                rem = (k[0] - lk, k[1] - wk)
                if rem[0] >= 0 and vals[e.target].get(rem, 0) > 0:
                    out.extend(e.labels)
                    cur, k = e.target, rem
                    break
        else:
            raise AssertionError("witness walk found no continuing edge")


Node = tuple[int, int | None]  # (left coordinate, right coordinate | terminal)


def _paths_fold(dag: SubproblemDag, frm: Node, to: Node, fold_unit, fold_edge, fold_add):
    x, y = frm
    x2, y2 = to
    if frm == to:
        return fold_unit()
    if x != x2 or y is None:
        return None  # parts are edge-disjoint; a terminal has no out-edges
    part = dag.parts[x]
    memo: dict[int, object] = {}

    def value(node_y: int):
        # folded paths from (x, node_y) to `to`
        if node_y in memo:
            return memo[node_y]
        acc = None
        for e in part[node_y]:
            if e.target is None:
                sub = fold_unit() if y2 is None else None
            elif e.target == y2:
                sub = fold_unit()
            else:
                sub = value(e.target)
            if sub is None:
                continue
            term = fold_edge(e, sub)
            acc = term if acc is None else fold_add(acc, term)
        memo[node_y] = acc
        return acc

    return value(y)


def count_paths(dag: SubproblemDag, frm: Node, to: Node) -> int:
    """Exact number of directed paths between two nodes of one part."""
    res = _paths_fold(dag, frm, to, lambda: 1, lambda e, s: s, lambda a, b: a + b)
    return res if res is not None else 0


def count_paths_by_length(dag: SubproblemDag, frm: Node, to: Node) -> dict[int, int]:
    """Path counts keyed by total label count along the path."""

    def shift(e: DagEdge, s: dict[int, int]) -> dict[int, int]:
        return {k + len(e.labels): v for k, v in s.items()}

    def merge(a: dict[int, int], b: dict[int, int]) -> dict[int, int]:
        out = dict(a)
        for k, v in b.items():
            out[k] = out.get(k, 0) + v
        return out

    res = _paths_fold(dag, frm, to, lambda: {0: 1}, shift, merge)
    return res if res is not None else {}


def path_weight_distribution(
    dag: SubproblemDag, frm: Node, to: Node, weights: tuple[Fraction, ...]
) -> dict[Fraction, int]:
    """Multiset of path label-weights as a weight -> count map."""

    def shift(e: DagEdge, s: dict[Fraction, int]) -> dict[Fraction, int]:
        w = sum((weights[v] for v in e.labels), ZERO)
        return {k + w: v for k, v in s.items()}

    def merge(a, b):
        out = dict(a)
        for k, v in b.items():
            out[k] = out.get(k, 0) + v
        return out

    res = _paths_fold(dag, frm, to, lambda: {ZERO: 1}, shift, merge)
    return res if res is not None else {}


def extract_kernel(path: list[DagEdge] | tuple[DagEdge, ...], y: int) -> VertexSet:
    """Kernel encoded by a root-to-terminal path: all labels plus y."""
    acc = bit(y)
    for e in path:
        for v in e.labels:
            acc |= bit(v)
    return acc


# ---------------------------------------------------------------------------
# Whole-graph queries.


def _key_filter(q: KernelQuery):
    def ok(key: Key) -> bool:
        if q.size is not None and key[0] != q.size:
            return False
        if q.target is not None and key[1] != q.target:
            return False
        return True

    return ok


def _assemble(
    contribs,
    q: KernelQuery,
    with_witness: bool,
    witness_fn,
) -> CountReport:
    """contribs: iterable of (tag, {kernel-key: count}) with full kernel keys."""
    ok = _key_filter(q)
    total = 0
    by_size: dict[int, int] = {}
    by_weight: dict[Fraction, int] = {}
    witness_pick = None
    for tag, profile in contribs:
        for key in sorted(profile):
            c = profile[key]
            if c == 0 or not ok(key):
                continue
            total += c
            by_size[key[0]] = by_size.get(key[0], 0) + c
            by_weight[key[1]] = by_weight.get(key[1], 0) + c
            if witness_pick is None:
                witness_pick = (tag, key)
    witness = None
    if with_witness and witness_pick is not None:
        witness = witness_fn(*witness_pick)
    return CountReport(
        total=total,
        by_size=dict(sorted(by_size.items())),
        by_weight=dict(sorted(by_weight.items())) if q.weights is not None else None,
        witness=witness,
    )


def _empty_graph_report(q: KernelQuery) -> CountReport:
    # the empty digraph has exactly the empty kernel
    key_ok = _key_filter(q)((0, ZERO)) and not q.lower
    total = 1 if key_ok else 0
    return CountReport(
        total=total,
        by_size={0: 1} if total else {},
        by_weight=({ZERO: 1} if total else {}) if q.weights is not None else None,
        witness=0 if total else None,
    )


def flig_query(
    d: Digraph,
    m: FuzzyModel,
    q: KernelQuery = KernelQuery(),
    with_witness: bool = True,
    trust_model: bool = False,
) -> CountReport:
    """Count (and optionally exhibit) constrained kernels of a linear instance."""
    if q.trivially_empty():
        return CountReport(0, {}, {} if q.weights is not None else None, None)
    if d.n == 0:
        return _empty_graph_report(q)
    inst = make_linear_instance(d, m, trust=trust_model)
    part = _build_part(inst, None, q)
    size_cap = q.size - 1 if q.size is not None else None
    vals = _part_values(part, inst.order, q.weights, size_cap)
    roots = _root_candidates(inst, q)
    contribs = []
    for y in roots:
        wy = q.weight_of(y)
        profile = {(l + 1, w + wy): c for (l, w), c in vals[y].items()}
        contribs.append((y, profile))

    def witness_fn(y: int, key: Key) -> VertexSet:
        sub = (key[0] - 1, key[1] - q.weight_of(y))
        labels = _witness_labels(part, vals, q.weights, y, sub)
        return bits(labels) | bit(y)

    return _assemble(contribs, q, with_witness, witness_fn)


def _root_candidates(inst: LinearInstance, q: KernelQuery) -> list[int]:
    """Vertices eligible as the rightmost kernel vertex of the whole graph.

    Everything strictly to the right of the rightmost kernel vertex can only
    be absorbed by that vertex itself (any deeper absorber would have to
    straddle it inside one interval, forcing an adjacency inside the kernel),
    so eligibility is a per-vertex test.
    """
    d, order = inst.graph, inst.order
    allowed = q.upper if q.upper is not None else d.full_mask
    s_mask = q.lower
    out: list[int] = []
    for ry in range(len(order.class_masks)):
        for y in order.classes[ry]:
            above = d.full_mask & ~order.upto_masks[ry]
            if above & ~d.in_adj[y]:
                continue
            if not (allowed >> y) & 1:
                continue
            if s_mask and (
                s_mask & above or s_mask & (order.class_masks[ry] & ~bit(y))
            ):
                continue
            out.append(y)
    return out


def flig_enumerate(
    d: Digraph,
    m: FuzzyModel,
    q: KernelQuery = KernelQuery(),
    limit: int | None = None,
    trust_model: bool = False,
) -> list[VertexSet]:
    """All constrained kernels, each exactly once, in deterministic order."""
    if q.trivially_empty():
        return []
    if d.n == 0:
        return [0] if not q.lower and _key_filter(q)((0, ZERO)) else []
    inst = make_linear_instance(d, m, trust=trust_model)
    part = _build_part(inst, None, q)
    size_cap = q.size - 1 if q.size is not None else None
    vals = _part_values(part, inst.order, q.weights, size_cap)
    ok = _key_filter(q)
    out: list[VertexSet] = []
    for y in _root_candidates(inst, q):
        wy = q.weight_of(y)
        targets = {sub for sub in vals[y] if ok((sub[0] + 1, sub[1] + wy))}
        if not targets:
            continue

        def rec(node: int, acc: VertexSet, used: Key) -> bool:
            # depth-first over accepting paths; True = output limit reached
            for e in part[node]:
                lk, wk = _edge_key(e, q.weights)
                nxt = (used[0] + lk, used[1] + wk)
                if e.target is None:
                    if nxt in targets:
                        out.append(acc | bits(e.labels))
                        if limit is not None and len(out) >= limit:
                            return True
                else:
                    feasible = any(
                        (nxt[0] + tl, nxt[1] + tw) in targets
                        for (tl, tw) in vals[e.target]
                    )
                    if feasible and rec(e.target, acc | bits(e.labels), nxt):
                        return True
            return False

        if rec(y, bit(y), (0, ZERO)):
            break
    return out
