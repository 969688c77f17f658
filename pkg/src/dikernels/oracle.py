"""Exponential-time ground truth for small instances.

Every polynomial-time routine in the package is validated against these
enumerators. Caps are explicit arguments; exceeding one raises, it never
truncates silently.
"""

from __future__ import annotations

from fractions import Fraction

from .bitset import VertexSet, iter_bits, popcount, to_list
from .digraph import Digraph, is_kernel
from .errors import InstanceTooLargeError

MIS_CAP = 40
KERNEL_CAP = 20


def enumerate_maximal_independent_sets(d: Digraph, cap: int = MIS_CAP) -> list[VertexSet]:
    """All maximal independent sets of the undirected view, sorted.

    Bron-Kerbosch with pivoting on bitmasks; the output order is the
    lexicographic order of the sorted member lists, so results are stable
    golden values.
    """
    if d.n > cap:
        raise InstanceTooLargeError(d.n, cap)
    adj = d.und_adj
    found: list[VertexSet] = []

    # Maximal independent sets are the maximal cliques of the complement, so
    # this is Bron-Kerbosch with every neighbourhood complemented.
    def nonadj(v: int) -> VertexSet:
        return ~adj[v] & ~(1 << v)

    def expand(chosen: VertexSet, cand: VertexSet, excl: VertexSet) -> None:
        if cand == 0 and excl == 0:
            found.append(chosen)
            return
        pivot, best = -1, -1
        for p in iter_bits(cand | excl):
            gain = popcount(cand & nonadj(p))
            if gain > best:
                best, pivot = gain, p
        for v in iter_bits(cand & (adj[pivot] | (1 << pivot))):
            expand(chosen | (1 << v), cand & nonadj(v), excl & nonadj(v))
            cand &= ~(1 << v)
            excl |= 1 << v

    expand(0, d.full_mask, 0)
    found.sort(key=to_list)
    return found


def brute_force_kernels(d: Digraph, cap: int = KERNEL_CAP) -> list[VertexSet]:
    """Exactly the kernels, via the maximal-independent-set filter."""
    if d.n > cap:
        raise InstanceTooLargeError(d.n, cap)
    return [s for s in enumerate_maximal_independent_sets(d, cap) if is_kernel(d, s)]


def kernels_by_subsets(d: Digraph, cap: int = 12) -> list[VertexSet]:
    """Raw 2^n enumeration, used to cross-validate brute_force_kernels."""
    if d.n > cap:
        raise InstanceTooLargeError(d.n, cap)
    out = [s for s in range(1 << d.n) if is_kernel(d, s)]
    out.sort(key=to_list)
    return out


def brute_force_query_count(
    d: Digraph,
    lower: VertexSet = 0,
    upper: VertexSet | None = None,
    weights: tuple[Fraction, ...] | None = None,
    target: Fraction | None = None,
    size: int | None = None,
    cap: int = KERNEL_CAP,
) -> int:
    """Number of kernels k with lower <= k <= upper and the exact weight/size."""
    if d.n > cap:
        raise InstanceTooLargeError(d.n, cap)
    if upper is None:
        upper = d.full_mask
    if lower & ~upper:
        return 0
    count = 0
    for k in brute_force_kernels(d, cap):
        if lower & ~k or k & ~upper:
            continue
        if size is not None and popcount(k) != size:
            continue
        if target is not None:
            w = sum((weights[v] for v in iter_bits(k)), Fraction(0)) if weights else Fraction(0)
            if w != target:
                continue
        count += 1
    return count
