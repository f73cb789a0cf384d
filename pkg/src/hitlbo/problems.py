"""Combinatorial problem instances over binary decision variables.

Three instance kinds are supported: maximum clique and minimum vertex cover
on undirected graphs, and unweighted maximum satisfiability on CNF formulas.
An assignment is a 0/1 vector over the declared variable order.

Every assignment, feasible or not, gets a non-negative score so that each
point of a reduced search space has a defined value:

* max clique: number of selected vertices if they form a clique, else 0
* max sat: number of satisfied clauses
* min vertex cover: ``(n + 1) - cost`` where cost is the cover size when the
  selection covers every edge and ``n + 1`` otherwise; the offset turns the
  minimization into an equivalent maximization with non-negative values, so
  downstream code always maximizes

``brute_force_optimum`` is the enumeration oracle used by the test suites.
It refuses instances with more than 26 variables.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

BRUTE_FORCE_LIMIT = 26
_CHUNK = 1 << 16


class ProblemKind(str, enum.Enum):
    MAX_CLIQUE = "max_clique"
    MAX_SAT = "max_sat"
    MIN_VERTEX_COVER = "min_vertex_cover"


class Direction(str, enum.Enum):
    MAXIMIZE = "maximize"
    MINIMIZE = "minimize"


class ParseError(ValueError):
    """Malformed instance document; carries the offending line number."""

    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class ProblemInstance:
    """An immutable combinatorial instance with n binary variables.

    ``edges`` holds deduplicated, sorted vertex pairs for graph kinds;
    ``clauses`` holds tuples of signed 1-based literals for CNF.  Variables
    are addressed by index 0..n-1 everywhere; ``variables`` carries the
    human-facing identifiers in declared order.
    """

    kind: ProblemKind
    variables: tuple[str, ...]
    edges: tuple[tuple[int, int], ...] | None = None
    clauses: tuple[tuple[int, ...], ...] | None = None
    # Bitmask caches, derived in __post_init__.
    _adj: tuple[int, ...] = field(default=(), repr=False, compare=False)
    _clause_pos: tuple[int, ...] = field(default=(), repr=False, compare=False)
    _clause_neg: tuple[int, ...] = field(default=(), repr=False, compare=False)

    @property
    def n(self) -> int:
        return len(self.variables)

    @property
    def direction(self) -> Direction:
        if self.kind is ProblemKind.MIN_VERTEX_COVER:
            return Direction.MINIMIZE
        return Direction.MAXIMIZE

    def __post_init__(self):
        n = self.n
        if n < 1:
            raise ValueError("instance needs at least one variable")
        if self.kind in (ProblemKind.MAX_CLIQUE, ProblemKind.MIN_VERTEX_COVER):
            if self.edges is None:
                raise ValueError(f"{self.kind.value} instance needs an edge payload")
            adj = [0] * n
            seen = set()
            for u, v in self.edges:
                if not (0 <= u < n and 0 <= v < n):
                    raise ValueError(f"edge ({u}, {v}) references an undeclared variable")
                if u == v:
                    raise ValueError(f"self-loop on vertex {u}")
                if (u, v) in seen or u > v:
                    raise ValueError("edges must be sorted pairs without duplicates")
                seen.add((u, v))
                adj[u] |= 1 << v
                adj[v] |= 1 << u
            object.__setattr__(self, "_adj", tuple(adj))
        elif self.kind is ProblemKind.MAX_SAT:
            if self.clauses is None:
                raise ValueError("max_sat instance needs a clause payload")
            pos, neg = [], []
            for ci, clause in enumerate(self.clauses):
                if not clause:
                    raise ValueError(f"clause {ci} is empty")
                p = q = 0
                for lit in clause:
                    var = abs(lit) - 1
                    if lit == 0 or not (0 <= var < n):
                        raise ValueError(f"clause {ci}: literal {lit} out of range")
                    if lit > 0:
                        p |= 1 << var
                    else:
                        q |= 1 << var
                pos.append(p)
                neg.append(q)
            object.__setattr__(self, "_clause_pos", tuple(pos))
            object.__setattr__(self, "_clause_neg", tuple(neg))
        else:  # pragma: no cover - enum is closed
            raise ValueError(f"unknown kind {self.kind}")


def _default_names(prefix: str, n: int) -> tuple[str, ...]:
    return tuple(f"{prefix}{i + 1}" for i in range(n))


def _canonical_edges(n: int, edges: Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    out = set()
    for u, v in edges:
        if u == v:
            raise ValueError(f"self-loop on vertex {u}")
        a, b = (u, v) if u < v else (v, u)
        out.add((a, b))
    return tuple(sorted(out))


def clique_instance(n: int, edges: Iterable[tuple[int, int]]) -> ProblemInstance:
    return ProblemInstance(ProblemKind.MAX_CLIQUE, _default_names("v", n),
                           edges=_canonical_edges(n, edges))


def vertex_cover_instance(n: int, edges: Iterable[tuple[int, int]]) -> ProblemInstance:
    return ProblemInstance(ProblemKind.MIN_VERTEX_COVER, _default_names("v", n),
                           edges=_canonical_edges(n, edges))


def max_sat_instance(n: int, clauses: Iterable[Sequence[int]]) -> ProblemInstance:
    return ProblemInstance(ProblemKind.MAX_SAT, _default_names("x", n),
                           clauses=tuple(tuple(c) for c in clauses))


def parse_graph(text: str) -> ProblemInstance:
    """Parse a DIMACS-style edge list ("p edge <n> <m>", "e <u> <v>", 1-indexed).

    Comment lines start with "c".  Duplicate and reversed edges are folded;
    self-loops are rejected.  The resulting instance is a max-clique instance;
    callers wanting vertex cover can rewrap via :func:`vertex_cover_instance`.
    """
    n = None
    edges: list[tuple[int, int]] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        tok = line.split()
        if tok[0] == "p":
            if n is not None:
                raise ParseError("duplicate problem line", line_no)
            if len(tok) != 4 or tok[1] != "edge":
                raise ParseError(f"expected 'p edge <n> <m>', got {line!r}", line_no)
            try:
                n = int(tok[2])
                int(tok[3])
            except ValueError:
                raise ParseError(f"non-integer header field in {line!r}", line_no) from None
            if n < 1:
                raise ParseError("vertex count must be >= 1", line_no)
        elif tok[0] == "e":
            if n is None:
                raise ParseError("edge before problem line", line_no)
            if len(tok) != 3:
                raise ParseError(f"expected 'e <u> <v>', got {line!r}", line_no)
            try:
                u, v = int(tok[1]), int(tok[2])
            except ValueError:
                raise ParseError(f"non-integer endpoint in {line!r}", line_no) from None
            if not (1 <= u <= n and 1 <= v <= n):
                raise ParseError(f"endpoint out of range in {line!r}", line_no)
            if u == v:
                raise ValueError(f"line {line_no}: self-loop on vertex {u}")
            edges.append((u - 1, v - 1))
        else:
            raise ParseError(f"unrecognized line {line!r}", line_no)
    if n is None:
        raise ParseError("missing problem line")
    return clique_instance(n, edges)


def parse_cnf(text: str) -> ProblemInstance:
    """Parse a standard DIMACS CNF document into a max-sat instance.

    Clauses are zero-terminated and may span lines; clause order is
    preserved.  A clause left unterminated at end of input is a parse
    error; an explicitly empty clause is a validation error.
    """
    n = None
    clauses: list[tuple[int, ...]] = []
    pending: list[int] = []
    last_line = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            tok = line.split()
            if n is not None:
                raise ParseError("duplicate problem line", line_no)
            if len(tok) != 4 or tok[1] != "cnf":
                raise ParseError(f"expected 'p cnf <vars> <clauses>', got {line!r}", line_no)
            try:
                n = int(tok[2])
                int(tok[3])
            except ValueError:
                raise ParseError(f"non-integer header field in {line!r}", line_no) from None
            if n < 1:
                raise ParseError("variable count must be >= 1", line_no)
            continue
        if n is None:
            raise ParseError("clause before problem line", line_no)
        last_line = line_no
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise ParseError(f"non-integer literal {tok!r}", line_no) from None
            if lit == 0:
                if not pending:
                    raise ValueError(f"line {line_no}: empty clause")
                clauses.append(tuple(pending))
                pending.clear()
            else:
                if abs(lit) > n:
                    raise ParseError(f"literal {lit} out of range", line_no)
                pending.append(lit)
    if n is None:
        raise ParseError("missing problem line")
    if pending:
        raise ParseError("unterminated clause at end of input", last_line)
    return max_sat_instance(n, clauses)


def _check_bits(instance: ProblemInstance, bits: Sequence[int]) -> None:
    if len(bits) != instance.n:
        raise ValueError(f"assignment length {len(bits)} != variable count {instance.n}")


def _selection_mask(bits: Sequence[int]) -> int:
    sel = 0
    for i, b in enumerate(bits):
        if b:
            sel |= 1 << i
    return sel


def evaluate_assignment(instance: ProblemInstance, bits: Sequence[int]) -> int:
    """Score an assignment; pure, deterministic, always maximization-oriented."""
    _check_bits(instance, bits)
    n = instance.n
    sel = _selection_mask(bits)
    if instance.kind is ProblemKind.MAX_CLIQUE:
        m = sel
        while m:
            u = (m & -m).bit_length() - 1
            if sel & ~(instance._adj[u] | (1 << u)):
                return 0
            m &= m - 1
        return sel.bit_count()
    if instance.kind is ProblemKind.MAX_SAT:
        inv = ~sel
        sat = 0
        for p, q in zip(instance._clause_pos, instance._clause_neg):
            if (sel & p) or (inv & q):
                sat += 1
        return sat
    # min vertex cover, reported as (n + 1) - cost
    return (n + 1) - vertex_cover_cost(instance, bits)


def vertex_cover_cost(instance: ProblemInstance, bits: Sequence[int]) -> int:
    """Cover size when the selection covers every edge, else the n+1 penalty."""
    if instance.kind is not ProblemKind.MIN_VERTEX_COVER:
        raise ValueError("not a vertex cover instance")
    _check_bits(instance, bits)
    n = instance.n
    sel = _selection_mask(bits)
    out = ~sel
    for u in range(n):
        if (out >> u) & 1 and instance._adj[u] & out:
            return n + 1
    return sel.bit_count()


def max_feasible_value(instance: ProblemInstance) -> int:
    """Largest value ``evaluate_assignment`` can produce for this instance."""
    if instance.kind is ProblemKind.MAX_CLIQUE:
        return instance.n
    if instance.kind is ProblemKind.MAX_SAT:
        return len(instance.clauses)
    return instance.n + 1


def value_range(instance: ProblemInstance, scale: float = 1.0) -> tuple[float, float]:
    """(lower, upper) bounds of the scaled objective, for concentration math."""
    return 0.0, float(scale) * max_feasible_value(instance)


def _chunk_values(instance: ProblemInstance, idx: np.ndarray) -> np.ndarray:
    """Vectorized evaluation of assignment indices (MSB-first bit layout)."""
    n = instance.n
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    bits = ((idx[:, None] >> shifts[None, :]) & 1).astype(np.uint8)
    count = bits.sum(axis=1).astype(np.int64)
    if instance.kind is ProblemKind.MAX_CLIQUE:
        present = {e: True for e in instance.edges}
        bad = np.zeros(len(idx), dtype=bool)
        for u in range(n):
            for v in range(u + 1, n):
                if (u, v) not in present:
                    bad |= (bits[:, u] & bits[:, v]).astype(bool)
        return np.where(bad, 0, count)
    if instance.kind is ProblemKind.MAX_SAT:
        sat = np.zeros(len(idx), dtype=np.int64)
        for clause in instance.clauses:
            ok = np.zeros(len(idx), dtype=bool)
            for lit in clause:
                var = abs(lit) - 1
                ok |= bits[:, var] == (1 if lit > 0 else 0)
            sat += ok
        return sat
    covered = np.ones(len(idx), dtype=bool)
    for u, v in instance.edges:
        covered &= (bits[:, u] | bits[:, v]).astype(bool)
    cost = np.where(covered, count, n + 1)
    return (n + 1) - cost


@dataclass(frozen=True)
class BruteForceResult:
    value: int
    witness: tuple[int, ...]
    epsilon_optimal_count: int
    epsilon: float


def brute_force_optimum(instance: ProblemInstance, epsilon: float = 0.0) -> BruteForceResult:
    """Exhaustively scan all 2^n assignments.

    Ties are broken towards the lexicographically smallest witness.  Also
    counts the assignments whose value is within ``epsilon`` of the optimum
    (with epsilon 0 this is the number of optimal assignments).
    """
    n = instance.n
    if n > BRUTE_FORCE_LIMIT:
        raise ValueError(f"refusing brute force for n={n} > {BRUTE_FORCE_LIMIT}")
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    total = 1 << n
    best = None
    best_idx = None
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        vals = _chunk_values(instance, idx)
        j = int(np.argmax(vals))
        if best is None or vals[j] > best:
            best = int(vals[j])
            best_idx = int(idx[j])
    near = 0
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        vals = _chunk_values(instance, idx)
        near += int(np.count_nonzero(vals >= best - epsilon))
    witness = tuple(int((best_idx >> (n - 1 - j)) & 1) for j in range(n))
    return BruteForceResult(value=best, witness=witness,
                            epsilon_optimal_count=near, epsilon=float(epsilon))
