"""The N-th symmetric product of a base graph.

Configurations (N-subsets) are ranked colexicographically through the
combinatorial number system, ``rank(X) = sum_i C(x_i, i + 1)`` for sorted
``x_0 < x_1 < ...``. Neighbor lists are ordered by moved vertex, then by
target vertex, both ascending.
"""

from __future__ import annotations

import math
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from . import kernels
from .graph_core import BaseGraph, GraphError

__all__ = [
    "DimensionError",
    "SymSpace",
    "binomial_table",
    "hungarian",
    "assignment_distance",
]

INT64_MAX = np.iinfo(np.int64).max


class DimensionError(ValueError):
    """A configuration space exceeds a configured size cap."""


def binomial_table(n: int, N: int) -> np.ndarray:
    """``T[c, j] = C(c, j)`` for ``0 <= c <= n``, ``0 <= j <= N + 1``."""
    table = np.zeros((n + 1, N + 2), dtype=np.int64)
    for c in range(n + 1):
        for j in range(N + 2):
            v = math.comb(c, j)
            if v > INT64_MAX:
                raise DimensionError(f"C({c}, {j}) overflows int64")
            table[c, j] = v
    return table


class SymSpace:
    """Indexed vertex set of the symmetric product graph ``G_N``.

    Parameters
    ----------
    base : BaseGraph
    N : int
        Particle number, ``0 <= N <= |V|``.
    backend : {"cython", "python"} or None
        Kernel implementation; ``None`` picks the default.
    workers : int
        Threads used by the range kernels. Results do not depend on it.
    sparse_cap : int
        Largest dimension for which explicit sparse operators are built.
    dimension_cap : int
        Refuse spaces larger than this.
    """

    def __init__(
        self,
        base: BaseGraph,
        N: int,
        *,
        backend: str | None = None,
        workers: int = 1,
        sparse_cap: int = 50_000,
        dimension_cap: int = 50_000_000,
    ):
        n = base.vertex_count
        if not 0 <= N <= n:
            raise GraphError(f"particle number {N} outside [0, {n}]")
        self.base = base
        self.N = int(N)
        self.n = n
        self.binom = binomial_table(n, self.N)
        self.dimension = int(self.binom[n, self.N])
        if self.dimension > dimension_cap:
            raise DimensionError(
                f"C({n}, {N}) = {self.dimension} exceeds dimension cap {dimension_cap}"
            )
        self.kernels = kernels.get_backend(backend)
        self.backend = backend or kernels.BACKEND
        self.workers = int(workers)
        self.sparse_cap = int(sparse_cap)
        self._indptr, self._indices = base.csr

    def __repr__(self):
        return f"SymSpace({self.base!r}, N={self.N}, dim={self.dimension})"

    # -- ranking -----------------------------------------------------------

    def _check_config(self, X) -> tuple[int, ...]:
        members = tuple(sorted(int(x) for x in X))
        if len(members) != self.N:
            raise GraphError(f"configuration has {len(members)} elements, expected {self.N}")
        if len(set(members)) != self.N:
            raise GraphError("configuration has repeated vertices")
        if members and (members[0] < 0 or members[-1] >= self.n):
            raise GraphError("configuration has a vertex index out of range")
        return members

    def index(self, X: Iterable[int]) -> int:
        members = self._check_config(X)
        return int(sum(int(self.binom[x, i + 1]) for i, x in enumerate(members)))

    def config(self, i: int) -> tuple[int, ...]:
        i = int(i)
        if not 0 <= i < self.dimension:
            raise GraphError(f"rank {i} outside [0, {self.dimension})")
        out = [0] * self.N
        c = self.n - 1
        for j in range(self.N - 1, -1, -1):
            while self.binom[c, j + 1] > i:
                c -= 1
            out[j] = c
            i -= int(self.binom[c, j + 1])
            c -= 1
        return tuple(out)

    @cached_property
    def configs(self) -> np.ndarray:
        """All configurations as a ``(dimension, N)`` int32 array, rank order."""
        out = np.empty((self.dimension, self.N), dtype=np.int32)
        if self.N == 0:
            return out
        k = self.kernels

        def work(a, b):
            k.unrank_range(a, b, self.n, self.N, self.binom, out[a:b])

        kernels.run_chunked(work, self.dimension, self.workers)
        return out

    # -- geometry ----------------------------------------------------------

    @cached_property
    def surfaces(self) -> np.ndarray:
        """``S(X)`` for every rank; equals the local degree in ``G_N``."""
        out = np.zeros(self.dimension, dtype=np.int64)
        if self.N == 0:
            return out
        k = self.kernels

        def work(a, b):
            k.surface_range(a, b, self.n, self.N, self.binom, self._indptr, self._indices, out[a:b])

        kernels.run_chunked(work, self.dimension, self.workers)
        return out

    def surface_vector(self) -> np.ndarray:
        return self.surfaces.astype(float)

    @cached_property
    def lattice_surfaces(self) -> np.ndarray:
        """Surface counted in the parent lattice: ``S(X) + sum_x deficit(x)``."""
        deficit = self.base.degree_deficit
        if self.N == 0 or not deficit.any():
            return self.surfaces
        return self.surfaces + deficit[self.configs].sum(axis=1)

    def site_sum(self, values: np.ndarray) -> np.ndarray:
        """``sum_{x in X} values[x]`` for every configuration."""
        values = np.asarray(values, dtype=float)
        if self.N == 0:
            return np.zeros(1)
        return values[self.configs].sum(axis=1)

    def neighbors(self, X) -> list[tuple[int, ...]]:
        members = self._check_config(X)
        inside = set(members)
        out = []
        for x in members:
            for y in self.base.adjacency[x]:
                if y not in inside:
                    out.append(tuple(sorted((inside - {x}) | {y})))
        return out

    @cached_property
    def neighbor_csr(self) -> tuple[np.ndarray, np.ndarray]:
        """(indptr, indices) of ``G_N`` in canonical neighbor order."""
        counts = self.surfaces
        indptr = np.zeros(self.dimension + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        indices = np.empty(int(indptr[-1]), dtype=np.int64)
        if self.N == 0 or len(indices) == 0:
            return indptr, indices
        k = self.kernels

        def work(a, b):
            k.neighbor_fill_range(
                a, b, self.n, self.N, self.binom, self._indptr, self._indices,
                indptr[a:b + 1] - indptr[a], indices[indptr[a]:indptr[b]],
            )

        kernels.run_chunked(work, self.dimension, self.workers)
        return indptr, indices

    def adjacency_matrix(self, force: bool = False) -> sp.csr_matrix:
        """Explicit sparse ``A_N`` (refused above ``sparse_cap`` unless forced)."""
        if self.dimension > self.sparse_cap and not force:
            raise DimensionError(
                f"dimension {self.dimension} above sparse cap {self.sparse_cap}; "
                "use apply_adjacency"
            )
        indptr, indices = self.neighbor_csr
        data = np.ones(len(indices))
        return sp.csr_matrix((data, indices, indptr), shape=(self.dimension,) * 2)

    def apply_adjacency(self, v: np.ndarray) -> np.ndarray:
        """Matrix-free ``(A_N v)(X) = sum_{Y ~ X} v(Y)``."""
        v = np.asarray(v)
        if v.shape != (self.dimension,):
            raise GraphError(f"vector length {v.shape} does not match dimension {self.dimension}")
        if np.iscomplexobj(v):
            return self.apply_adjacency(v.real) + 1j * self.apply_adjacency(v.imag)
        v = np.ascontiguousarray(v, dtype=float)
        out = np.zeros(self.dimension)
        if self.N == 0:
            return out
        k = self.kernels
        if "neighbor_csr" in self.__dict__:
            indptr, indices = self.neighbor_csr

            def work(a, b):
                k.csr_matvec_range(a, b, indptr, indices, v, out[a:b])
        else:
            def work(a, b):
                k.adjacency_matvec_range(
                    a, b, self.n, self.N, self.binom, self._indptr, self._indices, v, out[a:b]
                )

        kernels.run_chunked(work, self.dimension, self.workers)
        return out

    # -- distances ---------------------------------------------------------

    def bfs_from(self, sources: Sequence[int]) -> np.ndarray:
        """Multi-source BFS distances (in ``G_N``) from a set of ranks."""
        src = np.unique(np.asarray(list(sources), dtype=np.int64))
        if len(src) == 0:
            raise GraphError("BFS needs a nonempty source set")
        if src[0] < 0 or src[-1] >= self.dimension:
            raise GraphError("source rank out of range")
        indptr, indices = self.neighbor_csr
        dist = np.empty(self.dimension, dtype=np.int64)
        self.kernels.bfs_csr(indptr, indices, src, dist)
        return dist

    def bfs_distance(self, source: Iterable, X) -> int:
        """``d_N(source, X)`` for a set of configurations ``source``."""
        ranks = [self.index(Y) for Y in source]
        return int(self.bfs_from(ranks)[self.index(X)])


def hungarian(cost: np.ndarray) -> tuple[np.ndarray, float]:
    """Minimum-cost perfect assignment for a square cost matrix.

    Shortest augmenting path with row/column potentials, O(n^3). Returns
    ``(col_of_row, total_cost)``.
    """
    cost = np.asarray(cost, dtype=float)
    n = cost.shape[0]
    if cost.shape != (n, n):
        raise ValueError("cost matrix must be square")
    if n == 0:
        return np.zeros(0, dtype=np.int64), 0.0
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    p = np.zeros(n + 1, dtype=np.int64)  # p[j]: row matched to column j (1-based, 0 = free)
    way = np.zeros(n + 1, dtype=np.int64)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = np.full(n + 1, np.inf)
        used = np.zeros(n + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = p[j0]
            free = ~used[1:]
            cur = cost[i0 - 1] - u[i0] - v[1:]
            better = free & (cur < minv[1:])
            minv[1:][better] = cur[better]
            way[1:][better] = j0
            cand = np.where(free, minv[1:], np.inf)
            j1 = int(np.argmin(cand)) + 1
            delta = cand[j1 - 1]
            u[p[used]] += delta
            v[used] -= delta
            minv[1:][free] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    col_of_row = np.empty(n, dtype=np.int64)
    col_of_row[p[1:] - 1] = np.arange(n)
    total = float(cost[np.arange(n), col_of_row].sum())
    return col_of_row, total


def assignment_distance(G: BaseGraph, X, Y) -> int:
    """``min_pi sum_j d(x_j, y_pi(j))`` via the Hungarian method."""
    X = sorted(int(x) for x in X)
    Y = sorted(int(y) for y in Y)
    if len(X) != len(Y):
        raise GraphError(f"cardinality mismatch: {len(X)} vs {len(Y)}")
    if any(not 0 <= z < G.vertex_count for z in X + Y):
        raise GraphError("vertex index out of range")
    cost = G.distance_matrix[np.ix_(X, Y)]
    _, total = hungarian(cost)
    return int(round(total))
