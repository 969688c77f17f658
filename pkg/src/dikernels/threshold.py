"""Linear-time kernel counting on arbitrarily oriented threshold graphs.

A threshold graph is built by repeatedly adding an isolated vertex ("union")
or a universal vertex ("join"). Two vertices are adjacent exactly when the
later one in the construction sequence is a join vertex, so the maximal
independent sets are: all union vertices, or one join vertex plus every
union vertex added after it. Kernels are maximal independent sets, which
leaves one absorption check per candidate:

  * all-unions: every join vertex needs an out-edge to some earlier union;
  * join v + later unions: every earlier vertex needs an out-edge to v, and
    every later join w needs an out-edge to v or to a union between v and w.

One reversed sweep over the sequence resolves all of this in O(n + m),
keeping the set of later joins that still lack a union out-neighbour.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass

from .bitset import VertexSet, bits_from_indices, iter_bits, to_list
from .digraph import Digraph
from .errors import NotThresholdError, SequenceError

INITIAL = "initial"
UNION = "union"
JOIN = "join"


@dataclass(frozen=True)
class ThresholdStep:
    vertex: int
    kind: str


ThresholdSequence = tuple[ThresholdStep, ...]


def threshold_sequence(d: Digraph) -> ThresholdSequence:
    """Recover a construction sequence by degree-extremal peeling.

    Peels an isolated vertex (union) or a dominating vertex (join) until the
    graph is gone; the reversed peel order is the sequence. Removing a
    dominating vertex lowers every remaining degree by one, so current
    degrees are original degrees minus the number of joins peeled so far and
    a single degree-sorted order serves the whole peel.
    """
    n = d.n
    if n == 0:
        return ()
    deg = [0] * n
    for u, v in d.undirected_pairs:
        deg[u] += 1
        deg[v] += 1
    order = sorted(range(n), key=lambda v: (deg[v], v))
    lo, hi = 0, n - 1
    joins_removed = 0
    peeled: list[ThresholdStep] = []
    while lo <= hi:
        size = hi - lo + 1
        if deg[order[lo]] == joins_removed:
            peeled.append(ThresholdStep(order[lo], UNION))
            lo += 1
        elif deg[order[hi]] == joins_removed + size - 1:
            peeled.append(ThresholdStep(order[hi], JOIN))
            hi -= 1
            joins_removed += 1
        else:
            raise NotThresholdError(order[lo:hi + 1])
    seq = list(reversed(peeled))
    seq[0] = ThresholdStep(seq[0].vertex, INITIAL)
    return tuple(seq)


def replay_sequence(seq: ThresholdSequence) -> set[tuple[int, int]]:
    """Undirected edges produced by replaying the construction steps."""
    pairs: set[tuple[int, int]] = set()
    present: list[int] = []
    for step in seq:
        if step.kind == JOIN:
            for u in present:
                pairs.add((min(u, step.vertex), max(u, step.vertex)))
        present.append(step.vertex)
    return pairs


def validate_sequence(d: Digraph, seq: ThresholdSequence) -> None:
    if len(seq) != d.n or sorted(s.vertex for s in seq) != list(range(d.n)):
        raise SequenceError("sequence does not cover each vertex exactly once")
    if seq and seq[0].kind != INITIAL:
        raise SequenceError("first step must be 'initial'")
    if any(s.kind not in (UNION, JOIN) for s in seq[1:]):
        raise SequenceError("later steps must be 'union' or 'join'")
    if replay_sequence(seq) != set(d.undirected_pairs):
        raise SequenceError("replaying the sequence gives a different edge set")


def _candidates(d: Digraph, seq: ThresholdSequence, forbidden: VertexSet) -> list[int]:
    """Indices of valid join-singleton candidates, plus -1 for all-unions.

    Walks the sequence top-down keeping the still-unresolved later joins
    (those with no union out-neighbour above the current position).
    """
    n = d.n
    idx = [0] * n
    for i, step in enumerate(seq):
        idx[step.vertex] = i
    earlier_in = [0] * n  # in-edges from earlier vertices = absorbed prefix size
    for u, v in d.edges:
        if idx[u] < idx[v]:
            earlier_in[v] += 1
    in_lists = d.in_lists
    forb = set(iter_bits(forbidden))
    unresolved: set[int] = set()
    found: list[int] = []
    blocked = False
    for i in range(n - 1, -1, -1):
        step = seq[i]
        v = step.vertex
        if step.kind == JOIN:
            if v not in forb and earlier_in[v] == i:
                hits = sum(1 for w in in_lists[v] if w in unresolved)
                if hits == len(unresolved):
                    found.append(i)
            unresolved.add(v)
        else:
            if v in forb:
                blocked = True
                break
            for w in in_lists[v]:
                unresolved.discard(w)
    if not blocked and not unresolved:
        found.append(-1)
    return found


def _materialize(seq: ThresholdSequence, union_indices: list[int], cand: int, n: int) -> VertexSet:
    if cand == -1:
        chosen = union_indices
    else:
        pos = bisect_right(union_indices, cand)
        chosen = [cand] + union_indices[pos:]
    return bits_from_indices((seq[i].vertex for i in chosen), n)


def _union_indices(seq: ThresholdSequence) -> list[int]:
    return [i for i, s in enumerate(seq) if s.kind != JOIN]


def threshold_kernel_count(
    d: Digraph, seq: ThresholdSequence, forbidden: VertexSet = 0
) -> int:
    """Number of kernels avoiding the forbidden set, in O(n + m)."""
    validate_sequence(d, seq)
    return len(_candidates(d, seq, forbidden))


def threshold_kernel_find(
    d: Digraph, seq: ThresholdSequence, forbidden: VertexSet = 0
) -> VertexSet | None:
    validate_sequence(d, seq)
    cands = _candidates(d, seq, forbidden)
    if not cands:
        return None
    return _materialize(seq, _union_indices(seq), cands[0], d.n)


def threshold_kernel_enumerate(
    d: Digraph, seq: ThresholdSequence, forbidden: VertexSet = 0
) -> list[VertexSet]:
    """All kernels avoiding the forbidden set; at most clique-number many."""
    validate_sequence(d, seq)
    uni = _union_indices(seq)
    out = [
        _materialize(seq, uni, c, d.n) for c in _candidates(d, seq, forbidden)
    ]
    out.sort(key=to_list)
    return out
