"""Seeded random instance generators for benchmarks, demos and tests."""

from __future__ import annotations

import numpy as np

from .problems import (ProblemInstance, clique_instance, max_sat_instance,
                       vertex_cover_instance)


def random_graph_instance(n: int, edge_prob: float, seed: int,
                          kind: str = "max_clique") -> ProblemInstance:
    """Erdos-Renyi G(n, p) graph wrapped as a clique or vertex-cover instance."""
    if not 0 <= edge_prob <= 1:
        raise ValueError("edge probability must be in [0, 1]")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    edges = [(u, v) for u in range(n) for v in range(u + 1, n)
             if rng.random() < edge_prob]
    if kind == "max_clique":
        return clique_instance(n, edges)
    if kind == "min_vertex_cover":
        return vertex_cover_instance(n, edges)
    raise ValueError(f"unknown graph instance kind {kind!r}")


def random_cnf_instance(n: int, n_clauses: int, clause_len: int = 3,
                        seed: int = 0) -> ProblemInstance:
    """Uniform random k-CNF over n variables; literals within a clause are
    over distinct variables, each negated with probability one half."""
    if clause_len < 1 or clause_len > n:
        raise ValueError("clause length must be in [1, n]")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    clauses = []
    for _ in range(n_clauses):
        vars_ = rng.choice(n, size=clause_len, replace=False)
        signs = rng.integers(0, 2, size=clause_len)
        clauses.append(tuple(int(v + 1) * (1 if s else -1)
                             for v, s in zip(vars_, signs)))
    return max_sat_instance(n, clauses)
