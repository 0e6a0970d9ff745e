"""Edge-isoperimetric minimization on finite windows and droplet thresholds.

Surface levels are found by exhaustive scan over colex ranks. Two surface
measures are supported: ``graph`` counts boundary edges inside the window,
``lattice`` adds each member's missing lattice degree, i.e. it counts the
boundary in the infinite lattice the window was cut from.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .graph_core import BaseGraph
from .sym_product import DimensionError, SymSpace
from .xxz_operator import SpecError, ising_gap

__all__ = [
    "IsoperimetryError",
    "DropletCatalog",
    "brute_force_surface_levels",
    "droplet_set",
    "droplet_ranks",
    "thresholds",
    "chain_band",
    "chain_band_limit",
    "analytic_minimizers",
]

ENUM_CAP = 10_000_000


class IsoperimetryError(ValueError):
    """Enumeration refused or a hypothesis of an analytic oracle fails."""


@dataclass(frozen=True)
class DropletCatalog:
    """Surface levels of all eligible N-subsets of a window.

    ``ranks`` and ``surfaces`` cover the eligible configurations (all of
    them without constraint) in rank order, so any sublevel set can be
    read off without another scan.
    """

    base: BaseGraph
    N: int
    D_min: int
    second_level: int | None
    minimizers: tuple[tuple[int, ...], ...]
    measure: str
    constraint: str
    ranks: np.ndarray = field(repr=False)
    surfaces: np.ndarray = field(repr=False)

    @property
    def levels(self) -> np.ndarray:
        return np.unique(self.surfaces)

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "D_min": self.D_min,
            "second_level": self.second_level,
            "measure": self.measure,
            "constraint": self.constraint,
            "minimizers": [list(X) for X in self.minimizers],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def brute_force_surface_levels(
    G: BaseGraph,
    N: int,
    constraint: str = "none",
    measure: str = "graph",
    enum_cap: int = ENUM_CAP,
    space: SymSpace | None = None,
) -> DropletCatalog:
    """Exact ``D_min``, minimizer list and second level by full enumeration.

    ``constraint="bulk"`` keeps only configurations whose members all have
    full lattice degree, so every translate of a minimizer that fits in the
    window is represented.
    """
    if constraint not in ("none", "bulk"):
        raise ValueError(f"unknown constraint {constraint!r}")
    if measure not in ("graph", "lattice"):
        raise ValueError(f"unknown surface measure {measure!r}")
    if N < 1:
        raise IsoperimetryError("need at least one particle")
    if space is None:
        try:
            space = SymSpace(G, N, dimension_cap=enum_cap)
        except DimensionError as exc:
            raise IsoperimetryError(f"enumeration cap exceeded: {exc}") from None
    elif space.dimension > enum_cap:
        raise IsoperimetryError(f"C({G.vertex_count}, {N}) exceeds enumeration cap {enum_cap}")
    surf = space.lattice_surfaces if measure == "lattice" else space.surfaces
    if constraint == "bulk":
        ok = (G.degree_deficit[space.configs] == 0).all(axis=1)
        ranks = np.flatnonzero(ok)
        if len(ranks) == 0:
            raise IsoperimetryError("no configuration satisfies the bulk constraint; window too small")
    else:
        ranks = np.arange(space.dimension)
    surfaces = np.asarray(surf[ranks], dtype=np.int64)
    levels = np.unique(surfaces)
    d_min = int(levels[0])
    second = int(levels[1]) if len(levels) > 1 else None
    mins = ranks[surfaces == d_min]
    minimizers = tuple(tuple(int(x) for x in space.configs[r]) for r in mins)
    return DropletCatalog(G, N, d_min, second, minimizers, measure, constraint, ranks, surfaces)


def droplet_ranks(catalog: DropletCatalog, k: int) -> np.ndarray:
    """Ranks of ``V_{N,k} = {X : S(X) < D_min + k}``."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    return catalog.ranks[catalog.surfaces < catalog.D_min + k]


def droplet_set(catalog: DropletCatalog, k: int) -> set[tuple[int, ...]]:
    sel = droplet_ranks(catalog, k)
    if len(sel) == 0:
        return set()
    space = SymSpace(catalog.base, catalog.N)
    return {space.config(r) for r in sel}


def thresholds(catalog: DropletCatalog, delta: float, k: int) -> tuple[float, tuple[float, float]]:
    """``(E_{N,k}, (0, (1 - 1/delta) D_bar / 2))``.

    With a single surface level (e.g. one particle on a lattice window
    under the lattice measure) ``D_bar`` is an infimum over the empty set
    and the window is unbounded.
    """
    if not delta > 1:
        raise SpecError(f"anisotropy delta={delta} must exceed 1")
    if k < 0:
        raise ValueError("k must be nonnegative")
    c = ising_gap(delta)
    e_k = c * (catalog.D_min + k)
    if catalog.second_level is None:
        return e_k, (0.0, math.inf)
    return e_k, (0.0, c * catalog.second_level)


def chain_band(delta: float, N: int, convention: str = "cosh") -> tuple[float, float]:
    """Droplet band of N particles on the chain.

    ``[tanh(r) (cosh(N r) - 1)/sinh(N r), tanh(r) (cosh(N r) + 1)/sinh(N r)]``
    with ``cosh(r) = delta``. ``convention="inverse"`` evaluates the same
    expression at ``r = 1/delta`` for comparison; that choice does not give
    the single-particle band ``[1 - 1/delta, 1 + 1/delta]``.
    """
    if not delta > 1:
        raise SpecError(f"anisotropy delta={delta} must exceed 1")
    if N < 1:
        raise ValueError("N must be at least 1")
    if convention == "cosh":
        r = math.acosh(delta)
    elif convention == "inverse":
        r = 1.0 / delta
    else:
        raise ValueError(f"unknown convention {convention!r}")
    # (cosh x - 1)/sinh x = tanh(x/2) and (cosh x + 1)/sinh x = coth(x/2),
    # which stay finite for large N r
    t = math.tanh(r)
    h = math.tanh(0.5 * N * r)
    return t * h, t / h


def chain_band_limit(delta: float) -> float:
    if not delta > 1:
        raise SpecError(f"anisotropy delta={delta} must exceed 1")
    return math.sqrt(1.0 - 1.0 / delta**2)


def _interval_range(L: int, length: int, bulk: bool) -> range:
    return range(1, L - length) if bulk else range(0, L - length + 1)


def analytic_minimizers(family: str, params: dict, bulk: bool = True) -> list[tuple[int, ...]]:
    """Known minimizers translated across a lattice window.

    family ``chain``: params ``L, N``; intervals.
    family ``strip``: params ``M, L, N`` with ``N = l*M``, ``l > M/2``;
    full-width rectangles of length l.
    family ``grid2d``: params ``Lx, Ly, N`` with ``N`` a perfect square;
    squares.
    Vertex numbering follows :func:`build_lattice_window`.
    """
    p = {k: int(v) for k, v in params.items()}
    if family == "chain":
        L, N = p["L"], p["N"]
        if N < 1:
            raise IsoperimetryError("chain droplets need N >= 1")
        out = [tuple(range(z, z + N)) for z in _interval_range(L, N, bulk)]
    elif family == "strip":
        M, L, N = p["M"], p["L"], p["N"]
        if N % M:
            raise IsoperimetryError(f"strip droplets are known only for N a multiple of M={M}")
        ell = N // M
        if not 2 * ell > M:
            raise IsoperimetryError(
                f"rectangle minimizers require length l={ell} > M/2={M / 2}"
            )
        out = [
            tuple(sorted(z * M + m for z in range(z0, z0 + ell) for m in range(M)))
            for z0 in _interval_range(L, ell, bulk)
        ]
    elif family == "grid2d":
        Lx, Ly, N = p["Lx"], p["Ly"], p["N"]
        s = math.isqrt(N)
        if s * s != N or N < 1:
            raise IsoperimetryError(f"square minimizers require N to be a perfect square, got {N}")
        out = [
            tuple(sorted((x0 + i) * Ly + (y0 + j) for i in range(s) for j in range(s)))
            for x0 in _interval_range(Lx, s, bulk)
            for y0 in _interval_range(Ly, s, bulk)
        ]
    else:
        raise ValueError(f"unknown family {family!r}")
    if not out:
        raise IsoperimetryError("window too small to hold a droplet")
    return sorted(out)


def minimal_surface(family: str, params: dict) -> int:
    """Bulk minimal surface: 2 on the chain, 2M on the strip, 4 sqrt(N) on Z^2."""
    analytic_minimizers(family, params)
    if family == "chain":
        return 2
    if family == "strip":
        return 2 * int(params["M"])
    return 4 * math.isqrt(int(params["N"]))


def catalog_from_configs(configs: Sequence[Sequence[int]]) -> set[tuple[int, ...]]:
    return {tuple(sorted(int(x) for x in X)) for X in configs}
