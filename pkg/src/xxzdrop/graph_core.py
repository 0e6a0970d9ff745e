"""Finite base graphs: lattice windows, JSON ingestion, distances and
per-configuration surface measures."""

from __future__ import annotations

import hashlib
import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "GraphError",
    "BaseGraph",
    "ConfigMeasures",
    "FieldSpec",
    "build_lattice_window",
    "parse_graph",
    "load_graph",
    "graph_to_json",
    "from_edges",
    "pair_distance",
    "config_measures",
    "compensating_boundary_field",
    "random_connected_graph",
    "load_field",
]


class GraphError(ValueError):
    """Invalid graph construction or query."""


@dataclass(frozen=True, eq=False)
class BaseGraph:
    """Connected, simple, undirected graph on vertices ``0..n-1``.

    ``lattice_degree`` is the degree each vertex has in the infinite graph
    the window was cut from; for user-supplied graphs it equals the actual
    degree. The difference is what the compensating boundary field and the
    lattice surface measure put back.
    """

    vertex_count: int
    adjacency: tuple[tuple[int, ...], ...]
    labels: tuple | None = None
    lattice_degree: tuple[int, ...] | None = None
    family: str = "custom"

    def __post_init__(self):
        n = self.vertex_count
        if n < 1 or len(self.adjacency) != n:
            raise GraphError("adjacency must have one entry per vertex")
        for i, nbrs in enumerate(self.adjacency):
            if list(nbrs) != sorted(set(nbrs)):
                raise GraphError(f"adjacency of vertex {i} is not sorted/unique")
            for j in nbrs:
                if not 0 <= j < n:
                    raise GraphError(f"vertex {i}: neighbor {j} out of range")
                if j == i:
                    raise GraphError(f"self-loop at vertex {i}")
                if i not in self.adjacency[j]:
                    raise GraphError(f"asymmetric adjacency between {i} and {j}")
        if self.labels is not None and len(self.labels) != n:
            raise GraphError("labels must have one entry per vertex")
        if self.lattice_degree is None:
            object.__setattr__(self, "lattice_degree", tuple(len(a) for a in self.adjacency))
        elif len(self.lattice_degree) != n:
            raise GraphError("lattice_degree must have one entry per vertex")
        if any(ld < len(a) for ld, a in zip(self.lattice_degree, self.adjacency)):
            raise GraphError("lattice_degree below actual degree")
        if not self._connected():
            raise GraphError("graph is disconnected")

    def _connected(self) -> bool:
        seen = {0}
        stack = [0]
        while stack:
            x = stack.pop()
            for y in self.adjacency[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == self.vertex_count

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.array([len(a) for a in self.adjacency], dtype=np.int64)

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max())

    @property
    def is_regular(self) -> bool:
        return bool(np.all(self.degrees == self.degrees[0]))

    @cached_property
    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i, nbrs in enumerate(self.adjacency) for j in nbrs if i < j]

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """(indptr, indices) of the adjacency, int64."""
        indptr = np.zeros(self.vertex_count + 1, dtype=np.int64)
        indptr[1:] = np.cumsum(self.degrees)
        indices = np.fromiter(
            (j for nbrs in self.adjacency for j in nbrs), dtype=np.int64, count=int(indptr[-1])
        )
        return indptr, indices

    @cached_property
    def degree_deficit(self) -> np.ndarray:
        return np.asarray(self.lattice_degree, dtype=np.int64) - self.degrees

    @property
    def interior(self) -> np.ndarray:
        """Vertices that lost no neighbors to the window cut."""
        return np.flatnonzero(self.degree_deficit == 0)

    @cached_property
    def distance_matrix(self) -> np.ndarray:
        n = self.vertex_count
        out = np.empty((n, n), dtype=np.int64)
        for s in range(n):
            out[s] = _bfs(self.adjacency, s)
        return out

    def label_index(self, label) -> int:
        if self.labels is None:
            raise GraphError("graph has no labels")
        try:
            return self.labels.index(tuple(label))
        except ValueError:
            raise GraphError(f"unknown label {label!r}") from None

    def digest(self) -> str:
        payload = json.dumps({"n": self.vertex_count, "edges": self.edges}, separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    def __repr__(self):
        return f"BaseGraph({self.family}, n={self.vertex_count}, edges={len(self.edges)})"


def _bfs(adjacency, source: int) -> np.ndarray:
    dist = np.full(len(adjacency), -1, dtype=np.int64)
    dist[source] = 0
    queue = deque([source])
    while queue:
        x = queue.popleft()
        for y in adjacency[x]:
            if dist[y] < 0:
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


def from_edges(
    n: int,
    edges: Iterable[Sequence[int]],
    labels=None,
    lattice_degree=None,
    family: str = "custom",
) -> BaseGraph:
    """Build a graph from an edge list, rejecting loops and duplicates."""
    nbrs: list[set[int]] = [set() for _ in range(n)]
    for e in edges:
        if len(e) != 2:
            raise GraphError(f"edge {list(e)} must be a pair")
        i, j = int(e[0]), int(e[1])
        if not (0 <= i < n and 0 <= j < n):
            raise GraphError(f"edge {[i, j]} has an index outside [0, {n})")
        if i == j:
            raise GraphError(f"edge {[i, j]} is a self-loop")
        if j in nbrs[i]:
            raise GraphError(f"edge {[i, j]} is duplicated")
        nbrs[i].add(j)
        nbrs[j].add(i)
    adjacency = tuple(tuple(sorted(s)) for s in nbrs)
    if labels is not None:
        labels = tuple(tuple(lab) if isinstance(lab, (list, tuple)) else lab for lab in labels)
    if lattice_degree is not None:
        lattice_degree = tuple(int(v) for v in lattice_degree)
    return BaseGraph(n, adjacency, labels, lattice_degree, family)


def build_lattice_window(family: str, dims: Sequence[int]) -> BaseGraph:
    """Open-boundary window of the chain, a strip or the square lattice.

    ``path`` takes ``[L]``; ``strip`` takes ``[M, L]`` (width, length) with
    labels ``(z, m)``, ``m`` in ``1..M``; ``grid2d`` takes ``[Lx, Ly]``.
    """
    dims = [int(v) for v in dims]
    if family == "path":
        if len(dims) != 1 or dims[0] < 2:
            raise GraphError("path needs dims=[L] with L >= 2")
        (L,) = dims
        edges = [(z, z + 1) for z in range(L - 1)]
        return from_edges(L, edges, [(z,) for z in range(L)], [2] * L, "path")
    if family == "strip":
        if len(dims) != 2 or min(dims) < 2:
            raise GraphError("strip needs dims=[M, L] with M, L >= 2")
        M, L = dims

        def idx(z, m):
            return z * M + (m - 1)

        edges = []
        for z in range(L):
            for m in range(1, M + 1):
                if m < M:
                    edges.append((idx(z, m), idx(z, m + 1)))
                if z < L - 1:
                    edges.append((idx(z, m), idx(z + 1, m)))
        labels = [(z, m) for z in range(L) for m in range(1, M + 1)]
        lattice = [2 + (m > 1) + (m < M) for _z, m in labels]
        return from_edges(M * L, edges, labels, lattice, "strip")
    if family == "grid2d":
        if len(dims) != 2 or min(dims) < 2:
            raise GraphError("grid2d needs dims=[Lx, Ly] with Lx, Ly >= 2")
        Lx, Ly = dims
        edges = []
        for x in range(Lx):
            for y in range(Ly):
                i = x * Ly + y
                if y < Ly - 1:
                    edges.append((i, i + 1))
                if x < Lx - 1:
                    edges.append((i, i + Ly))
        labels = [(x, y) for x in range(Lx) for y in range(Ly)]
        return from_edges(Lx * Ly, edges, labels, [4] * (Lx * Ly), "grid2d")
    raise GraphError(f"unknown lattice family {family!r}")


def parse_graph(text: str) -> BaseGraph:
    """Parse ``{"vertex_count": n, "edges": [[i, j], ...], "labels": ...}``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise GraphError("graph document must be a JSON object")
    n = doc.get("vertex_count", doc.get("n"))
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise GraphError("vertex_count must be a positive integer")
    edges = doc.get("edges")
    if not isinstance(edges, list):
        raise GraphError("edges must be a list of pairs")
    for e in edges:
        if not (isinstance(e, list) and all(isinstance(v, int) for v in e)):
            raise GraphError(f"edge {e!r} must be a pair of integers")
    return from_edges(
        n, edges, doc.get("labels"), doc.get("lattice_degree"), doc.get("family", "custom")
    )


def load_graph(path) -> BaseGraph:
    with open(path) as fh:
        return parse_graph(fh.read())


def graph_to_json(G: BaseGraph) -> str:
    doc = {"vertex_count": G.vertex_count, "edges": [list(e) for e in G.edges]}
    if G.labels is not None:
        doc["labels"] = [list(lab) if isinstance(lab, tuple) else lab for lab in G.labels]
    doc["lattice_degree"] = list(G.lattice_degree)
    doc["family"] = G.family
    return json.dumps(doc, sort_keys=True)


def pair_distance(G: BaseGraph, x: int, y: int) -> int:
    n = G.vertex_count
    if not (0 <= x < n and 0 <= y < n):
        raise GraphError(f"vertex index out of range: {x}, {y}")
    return int(G.distance_matrix[x, y])


@dataclass(frozen=True)
class ConfigMeasures:
    surface: int
    interaction: int
    total_degree: int
    clusters: int


def _validate_config(G: BaseGraph, X) -> list[int]:
    members = sorted(int(x) for x in X)
    if not members:
        raise GraphError("configuration must be nonempty")
    if len(set(members)) != len(members):
        raise GraphError("configuration has repeated vertices")
    if members[0] < 0 or members[-1] >= G.vertex_count:
        raise GraphError("configuration has a vertex index out of range")
    return members


def config_measures(G: BaseGraph, X) -> ConfigMeasures:
    members = _validate_config(G, X)
    inside = set(members)
    parent = {x: x for x in members}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    surface = 0
    inner_half_edges = 0
    for x in members:
        for y in G.adjacency[x]:
            if y in inside:
                inner_half_edges += 1
                rx, ry = find(x), find(y)
                if rx != ry:
                    parent[rx] = ry
            else:
                surface += 1
    interaction = inner_half_edges // 2
    total = int(G.degrees[members].sum())
    clusters = len({find(x) for x in members})
    if surface != total - 2 * interaction:
        raise AssertionError("surface identity violated")
    return ConfigMeasures(surface, interaction, total, clusters)


@dataclass(frozen=True, eq=False)
class FieldSpec:
    """Nonnegative single-site field ``v(x)``; ``V(X)`` is its sum over X."""

    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).copy()
        if v.ndim != 1:
            raise GraphError("field must be a flat array")
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise GraphError("field entries must be finite and nonnegative")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def potential(self, X) -> float:
        return float(self.values[list(X)].sum())

    def digest(self) -> str:
        return hashlib.sha256(self.values.tobytes()).hexdigest()[:16]

    def __add__(self, other: "FieldSpec") -> "FieldSpec":
        return FieldSpec(self.values + other.values)


def load_field(path, n: int | None = None) -> FieldSpec:
    with open(path) as fh:
        values = json.load(fh)
    if not isinstance(values, list):
        raise GraphError("field file must hold a JSON array")
    spec = FieldSpec(np.array(values, dtype=float))
    if n is not None and len(spec.values) != n:
        raise GraphError(f"field has {len(spec.values)} entries, graph has {n} vertices")
    return spec


def compensating_boundary_field(G: BaseGraph, delta: float, bulk_degree=None) -> FieldSpec:
    """``v(x) = (1 - 1/delta)/2 * (bulk_degree - d(x))``.

    ``bulk_degree`` may be a scalar or per-vertex; by default the lattice
    degree recorded on the window is used, so strip edge rows get no field.
    """
    if delta <= 1:
        raise GraphError("compensating field needs delta > 1")
    if bulk_degree is None:
        bulk = np.asarray(G.lattice_degree, dtype=float)
    else:
        bulk = np.broadcast_to(np.asarray(bulk_degree, dtype=float), (G.vertex_count,))
        if np.any(bulk < G.max_degree) and np.ndim(bulk_degree) == 0:
            raise GraphError("bulk_degree must be at least the maximum degree")
    deficit = bulk - G.degrees
    if np.any(deficit < 0):
        raise GraphError("bulk_degree below the degree of some vertex")
    return FieldSpec(0.5 * (1.0 - 1.0 / delta) * deficit)


def random_connected_graph(n: int, p: float, rng: np.random.Generator) -> BaseGraph:
    """Erdos-Renyi G(n, p) resampled until connected."""
    if n < 2:
        raise GraphError("need at least two vertices")
    iu, ju = np.triu_indices(n, k=1)
    for _ in range(10_000):
        keep = rng.random(len(iu)) < p
        edges = list(zip(iu[keep].tolist(), ju[keep].tolist()))
        try:
            return from_edges(n, edges, family="random")
        except GraphError:
            continue
    raise GraphError(f"no connected sample for n={n}, p={p}")
