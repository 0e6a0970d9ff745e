"""Exact cross-checks between independent constructions."""

from __future__ import annotations

import itertools

import numpy as np

from .graph_core import BaseGraph, FieldSpec
from .sym_product import SymSpace, assignment_distance
from .xxz_operator import full_spin_hamiltonian, sector_blocks

__all__ = ["block_oracle", "distance_oracle", "degree_growth"]


def block_oracle(G: BaseGraph, delta: float, field: FieldSpec | None = None, cap: int = 14) -> dict:
    """Tensor-product Hamiltonian vs the symmetric-product blocks."""
    full = full_spin_hamiltonian(G, delta, field, cap=cap)
    rep = sector_blocks(full, G, delta, field, leak_tol=np.inf)
    return {
        "leakage": rep.leakage,
        "max_deviation": rep.max_deviation,
        "deviations": [rep.deviations[N] for N in sorted(rep.deviations)],
    }


def distance_oracle(
    G: BaseGraph, N: int, pairs=None, sample: int | None = None, rng=None
) -> dict:
    """Assignment distance against BFS in ``G_N``.

    ``pairs`` lists rank pairs; by default all unordered pairs of distinct
    configurations, or ``sample`` random ordered pairs.
    """
    space = SymSpace(G, N)
    n = space.dimension
    if pairs is None:
        if sample is None:
            pairs = list(itertools.combinations(range(n), 2))
        else:
            rng = np.random.default_rng(rng)
            pairs = [tuple(int(v) for v in rng.integers(0, n, 2)) for _ in range(sample)]
    by_source: dict[int, np.ndarray] = {}
    mismatches = []
    for i, j in pairs:
        if i not in by_source:
            by_source[i] = space.bfs_from([i])
        bfs = int(by_source[i][j])
        hung = assignment_distance(G, space.config(i), space.config(j))
        if bfs != hung:
            mismatches.append([space.config(i), space.config(j), bfs, hung])
    return {"pairs": len(pairs), "mismatches": mismatches}


def degree_growth(G: BaseGraph, N: int, space: SymSpace | None = None) -> dict:
    """Largest surface jump along edges of ``G_N`` and the ratio test
    ``S(X) <= 2 d S(Y)`` for neighbors with ``S(Y) > 0``."""
    space = space or SymSpace(G, N)
    d = G.max_degree
    bound = 2 * d - 2 if G.is_regular else 2 * d - 1
    indptr, indices = space.neighbor_csr
    S = space.surfaces
    rows = np.repeat(np.arange(space.dimension), np.diff(indptr))
    jump = int(np.abs(S[rows] - S[indices]).max()) if len(indices) else 0
    pos = S[indices] > 0
    ratio_ok = bool(np.all(S[rows][pos] <= 2 * d * S[indices][pos]))
    return {"max_jump": jump, "bound": bound, "edges": int(len(indices) // 2),
            "ok": bool(jump <= bound and ratio_ok), "ratio_ok": ratio_ok}
