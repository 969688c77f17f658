"""Directed graph data model and the primitive kernel predicates.

A digraph is a simple loopless undirected graph plus an orientation for each
edge, possibly in both directions. A bidirectional edge is stored as the two
ordered pairs. Vertex sets are int bitmasks (see bitset).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .bitset import VertexSet, bit, iter_bits, mask_all, to_list


@dataclass(frozen=True)
class Digraph:
    n: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u},{v}) out of range for n={self.n}")

    @staticmethod
    def from_pairs(n: int, pairs) -> "Digraph":
        return Digraph(n, frozenset((int(u), int(v)) for u, v in pairs))

    @staticmethod
    def from_mixed(n: int, items) -> "Digraph":
        """Build from (u, v, kind) items, kind in {"fwd", "bwd", "bi"}."""
        pairs = set()
        for u, v, kind in items:
            if kind == "fwd":
                pairs.add((u, v))
            elif kind == "bwd":
                pairs.add((v, u))
            elif kind == "bi":
                pairs.add((u, v))
                pairs.add((v, u))
            else:
                raise ValueError(f"unknown orientation {kind!r}")
        return Digraph(n, frozenset(pairs))

    @cached_property
    def undirected_pairs(self) -> frozenset[tuple[int, int]]:
        return frozenset((min(u, v), max(u, v)) for u, v in self.edges)

    @property
    def size(self) -> int:
        """Vertices plus underlying edges, the usual input-size measure."""
        return self.n + len(self.undirected_pairs)

    @cached_property
    def out_adj(self) -> tuple[VertexSet, ...]:
        masks = [0] * self.n
        for u, v in self.edges:
            masks[u] |= 1 << v
        return tuple(masks)

    @cached_property
    def in_adj(self) -> tuple[VertexSet, ...]:
        masks = [0] * self.n
        for u, v in self.edges:
            masks[v] |= 1 << u
        return tuple(masks)

    @cached_property
    def und_adj(self) -> tuple[VertexSet, ...]:
        masks = [0] * self.n
        for u, v in self.edges:
            masks[u] |= 1 << v
            masks[v] |= 1 << u
        return tuple(masks)

    @cached_property
    def out_lists(self) -> tuple[tuple[int, ...], ...]:
        """Adjacency lists; preferred over masks when n is large."""
        lists: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            lists[u].append(v)
        return tuple(tuple(sorted(l)) for l in lists)

    @cached_property
    def in_lists(self) -> tuple[tuple[int, ...], ...]:
        lists: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            lists[v].append(u)
        return tuple(tuple(sorted(l)) for l in lists)

    @property
    def full_mask(self) -> VertexSet:
        return mask_all(self.n)

    def is_bidirectional(self) -> bool:
        return all((v, u) in self.edges for u, v in self.edges)


def neighbours(d: Digraph, s: VertexSet) -> VertexSet:
    acc = 0
    for v in iter_bits(s):
        acc |= d.und_adj[v]
    return acc


def out_neighbours(d: Digraph, s: VertexSet) -> VertexSet:
    acc = 0
    for v in iter_bits(s):
        acc |= d.out_adj[v]
    return acc


def in_neighbours(d: Digraph, s: VertexSet) -> VertexSet:
    acc = 0
    for v in iter_bits(s):
        acc |= d.in_adj[v]
    return acc


def absorbs(d: Digraph, a: VertexSet, b: VertexSet) -> bool:
    """True iff every vertex of b is in a or has an out-edge into a."""
    rest = b & ~a
    for v in iter_bits(rest):
        if not d.out_adj[v] & a:
            return False
    return True


def is_independent(d: Digraph, s: VertexSet) -> bool:
    for v in iter_bits(s):
        if d.und_adj[v] & s:
            return False
    return True


def is_kernel(d: Digraph, k: VertexSet) -> bool:
    return is_independent(d, k) and absorbs(d, k, d.full_mask)


def induced_subdigraph(d: Digraph, s: VertexSet) -> tuple[Digraph, tuple[int, ...]]:
    """Induced sub-digraph on s with dense new ids.

    Returns (subgraph, old_ids) where old_ids[new] is the original id; the
    remap is the sorted-order bijection.
    """
    old_ids = tuple(to_list(s))
    new_of = {old: new for new, old in enumerate(old_ids)}
    pairs = [
        (new_of[u], new_of[v])
        for u, v in d.edges
        if (s >> u) & 1 and (s >> v) & 1
    ]
    return Digraph(len(old_ids), frozenset(pairs)), old_ids


def remap_mask(mask: VertexSet, old_ids: tuple[int, ...]) -> VertexSet:
    """Translate a mask in remapped ids back to original ids."""
    acc = 0
    for new, old in enumerate(old_ids):
        if (mask >> new) & 1:
            acc |= bit(old)
    return acc
