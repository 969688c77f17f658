"""Parsimonious compilation of CNF formulas into oriented cographs.

The kernels of the produced digraph are in bijection with the satisfying
assignments of the formula, which makes it both a hard-instance generator
and a strong correctness testbed: every kernel contains the sink special
vertex, excludes the source special vertex and all clause vertices, and
picks exactly one literal per variable.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bitset import VertexSet, bit, iter_bits
from .digraph import Digraph, is_kernel
from .errors import CnfError, NotAKernelError

Literal = tuple[int, bool]  # (variable index, polarity)


@dataclass(frozen=True)
class CnfFormula:
    num_vars: int
    clauses: tuple[tuple[Literal, ...], ...]

    def __post_init__(self):
        for ci, clause in enumerate(self.clauses):
            if not clause:
                raise CnfError(f"clause {ci} is empty")
            seen: dict[int, bool] = {}
            for var, pol in clause:
                if not 0 <= var < self.num_vars:
                    raise CnfError(f"clause {ci}: variable {var} out of range")
                if var in seen and seen[var] != pol:
                    raise CnfError(f"clause {ci} is a tautology on variable {var}")
                seen[var] = pol


def make_cnf(num_vars: int, clauses) -> CnfFormula:
    """Normalize literal order and drop duplicates inside each clause."""
    normal = tuple(
        tuple(sorted(set((int(v), bool(p)) for v, p in clause)))
        for clause in clauses
    )
    return CnfFormula(num_vars, normal)


def parse_dimacs(text: str) -> CnfFormula:
    num_vars = None
    num_clauses = None
    clauses: list[list[Literal]] = []
    current: list[Literal] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise CnfError(f"line {lineno}: malformed problem line {line!r}")
            num_vars, num_clauses = int(parts[2]), int(parts[3])
            continue
        if num_vars is None:
            raise CnfError(f"line {lineno}: clause before 'p cnf' header")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise CnfError(f"line {lineno}: bad literal {tok!r}") from None
            if lit == 0:
                clauses.append(current)
                current = []
            else:
                var = abs(lit) - 1
                if not 0 <= var < num_vars:
                    raise CnfError(f"line {lineno}: variable {abs(lit)} out of range")
                current.append((var, lit > 0))
    if current:
        raise CnfError("last clause not terminated by 0")
    if num_vars is None:
        raise CnfError("missing 'p cnf' header")
    if num_clauses is not None and num_clauses != len(clauses):
        raise CnfError(f"header announces {num_clauses} clauses, found {len(clauses)}")
    return make_cnf(num_vars, clauses)


def to_dimacs(phi: CnfFormula) -> str:
    lines = [f"p cnf {phi.num_vars} {len(phi.clauses)}"]
    for clause in phi.clauses:
        lines.append(
            " ".join(str(v + 1 if p else -(v + 1)) for v, p in clause) + " 0"
        )
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SatReduction:
    """The compiled digraph plus the vertex-role bookkeeping.

    Layout: clause vertices first, then the literal pairs interleaved
    (positive then negative per variable), then the two special vertices.
    """

    digraph: Digraph
    formula: CnfFormula

    @property
    def num_clauses(self) -> int:
        return len(self.formula.clauses)

    def literal_vertex(self, var: int, polarity: bool) -> int:
        return self.num_clauses + 2 * var + (0 if polarity else 1)

    @property
    def source_vertex(self) -> int:  # must stay outside every kernel
        return self.num_clauses + 2 * self.formula.num_vars

    @property
    def sink_vertex(self) -> int:  # belongs to every kernel
        return self.num_clauses + 2 * self.formula.num_vars + 1

    def roles(self) -> list[str]:
        out = [f"clause{i}" for i in range(self.num_clauses)]
        for v in range(self.formula.num_vars):
            out.append(f"x{v}")
            out.append(f"!x{v}")
        out.append("source")
        out.append("sink")
        return out


def sat_to_cograph(phi: CnfFormula) -> SatReduction:
    """Build the digraph whose kernels are the satisfying assignments."""
    c = len(phi.clauses)
    v = phi.num_vars
    n = c + 2 * v + 2
    source = c + 2 * v
    sink = c + 2 * v + 1
    pairs: set[tuple[int, int]] = set()
    for i in range(c):
        for j in range(i + 1, c):
            pairs.add((i, j))
            pairs.add((j, i))
    for var in range(v):
        pos, neg = c + 2 * var, c + 2 * var + 1
        pairs.add((pos, neg))
        pairs.add((neg, pos))
    pairs.add((source, sink))
    for i, clause in enumerate(phi.clauses):
        members = {c + 2 * var + (0 if pol else 1) for var, pol in clause}
        for lit in range(c, c + 2 * v):
            if lit in members:
                pairs.add((i, lit))
            else:
                pairs.add((lit, i))
        pairs.add((i, source))
        pairs.add((sink, i))
    return SatReduction(Digraph(n, frozenset(pairs)), phi)


def kernel_to_assignment(red: SatReduction, k: VertexSet) -> tuple[bool, ...]:
    """Decode a kernel of the reduction into the assignment it encodes."""
    d = red.digraph
    if not is_kernel(d, k):
        raise NotAKernelError("the given set is not a kernel of the reduction")
    if not (k >> red.sink_vertex) & 1:
        raise NotAKernelError("kernel misses the sink special vertex")
    assignment = []
    for var in range(red.formula.num_vars):
        pos_in = bool((k >> red.literal_vertex(var, True)) & 1)
        neg_in = bool((k >> red.literal_vertex(var, False)) & 1)
        if pos_in == neg_in:
            raise NotAKernelError(f"kernel does not choose a polarity for x{var}")
        assignment.append(pos_in)
    return tuple(assignment)


def assignment_to_kernel(red: SatReduction, assignment) -> VertexSet:
    acc = bit(red.sink_vertex)
    for var, value in enumerate(assignment):
        acc |= bit(red.literal_vertex(var, bool(value)))
    return acc
