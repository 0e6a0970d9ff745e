"""Spectrum-free intervals from a two-block partition of the configurations.

Write ``H = -g A + U`` and split the configurations into ``V1`` and ``V2``.
With ``a = min_{V1} (U - g S)``, ``b = max_{V2} U + g ||A_2||`` and the
boundary hopping degrees ``d1, d2``, every ``E`` in ``(b, a)`` with
``(a - E)(E - b) > g^2 d1 d2`` lies in the resolvent set: the ``V1`` block
of ``H - E`` is bounded below by ``a - E``, the ``V2`` block above by
``b - E``, and the coupling has norm at most ``g sqrt(d1 d2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .spectral import DENSE_CAP, dense_spectrum, extremal_eigs
from .sym_product import SymSpace
from .xxz_operator import HamiltonianSpec, LinearMap, SpecError, build_hamiltonian, potential_diagonal

__all__ = [
    "CertificateError",
    "Partition",
    "GapCertificate",
    "partition_by_surface",
    "boundary_degrees",
    "restricted_adjacency_norm",
    "certify",
    "certify_from_quantities",
    "chain_gamma",
    "chain_bulk_quantities",
    "strip_bulk_quantities",
    "grid_bulk_quantities",
    "boundary_hopping_norm",
    "verify_certificate",
]

GUARD = 1e-12


class CertificateError(ValueError):
    """Degenerate partition or a violated hypothesis."""


@dataclass(frozen=True)
class Partition:
    v1: np.ndarray
    v2: np.ndarray
    descriptor: str

    def mask2(self, dimension: int) -> np.ndarray:
        m = np.zeros(dimension, dtype=bool)
        m[self.v2] = True
        return m


@dataclass
class GapCertificate:
    g: float
    d1: int
    d2: int
    a2_norm: float
    a2_mode: str
    a: float
    b: float
    interval: tuple[float, float] | None
    v2_size: int
    partition_descriptor: str
    meta: dict = field(default_factory=dict)

    @property
    def empty(self) -> bool:
        return self.interval is None

    def contains(self, E: float) -> bool:
        return self.interval is not None and self.interval[0] < E < self.interval[1]

    def to_json(self) -> dict:
        out = {
            "g": self.g,
            "d1": self.d1,
            "d2": self.d2,
            "a2_norm": self.a2_norm,
            "a2_mode": self.a2_mode,
            "a": self.a,
            "b": self.b,
            "interval": list(self.interval) if self.interval else None,
            "v2_size": self.v2_size,
            "partition": self.partition_descriptor,
        }
        out.update(self.meta)
        return out


def partition_by_surface(
    space: SymSpace, cutoff: int, surface: np.ndarray | None = None
) -> Partition:
    """``V2 = {X : S(X) <= cutoff}``; ``surface`` overrides ``S`` (e.g. the
    lattice surface on a window with compensating field)."""
    surf = space.surfaces if surface is None else np.asarray(surface)
    if len(surf) != space.dimension:
        raise CertificateError("surface vector length does not match the space")
    in2 = surf <= cutoff
    v2 = np.flatnonzero(in2)
    v1 = np.flatnonzero(~in2)
    if len(v2) == 0:
        raise CertificateError(f"V2 is empty: cutoff {cutoff} below the minimal surface")
    if len(v1) == 0:
        raise CertificateError(f"V1 is empty: cutoff {cutoff} covers every configuration")
    kind = "graph" if surface is None else "custom"
    return Partition(v1, v2, f"surface({kind}) <= {cutoff}")


def _adjacency(space: SymSpace) -> sp.csr_matrix:
    return space.adjacency_matrix(force=True)


def boundary_degrees(space: SymSpace, partition: Partition) -> tuple[int, int]:
    """``d1 = max_{X in V1} #{Y in V2 : Y ~ X}`` and ``d2`` the other way."""
    A = _adjacency(space)
    in2 = partition.mask2(space.dimension).astype(float)
    to2 = A @ in2
    to1 = space.surfaces - to2
    d1 = int(round(to2[partition.v1].max()))
    d2 = int(round(to1[partition.v2].max()))
    return d1, d2


def restricted_adjacency_norm(
    space: SymSpace, v2: np.ndarray, mode: str = "lanczos", dense_cap: int = DENSE_CAP
) -> float:
    """``||A_2||`` for the adjacency induced on ``V2``.

    ``mode="degree"`` returns the cheap upper bound (largest degree inside
    ``V2``) instead.
    """
    A2 = _adjacency(space)[v2][:, v2].tocsr()
    if A2.nnz == 0:
        return 0.0
    if mode == "degree":
        return float(np.asarray(A2.sum(axis=1)).max())
    if mode != "lanczos":
        raise ValueError(f"unknown mode {mode!r}")
    op = LinearMap.from_matrix(A2, name="A2")
    if op.dimension <= dense_cap:
        w = np.linalg.eigvalsh(A2.toarray())
        return float(max(-w[0], w[-1]))
    lo = extremal_eigs(op, 1, "smallest", vectors=False).eigenvalues[0]
    hi = extremal_eigs(op, 1, "largest", vectors=False).eigenvalues[0]
    return float(max(-lo, hi))


def _root_interval(a: float, b: float, coupling: float) -> tuple[float, float] | None:
    """Open set of ``E`` with ``(a - E)(E - b) > coupling``."""
    disc = (a - b) ** 2 - 4.0 * coupling
    if a <= b or disc <= 0:
        return None
    r = 0.5 * math.sqrt(disc)
    mid = 0.5 * (a + b)
    lo, hi = mid - r + GUARD, mid + r - GUARD
    if not lo < hi:
        return None
    return lo, hi


def certify_from_quantities(
    g: float, a: float, b: float, d1: int, d2: int, a2_norm: float = 0.0, **meta
) -> GapCertificate:
    """Certificate from given ``a, b, d1, d2`` (``b`` already includes ``g ||A_2||``)."""
    interval = _root_interval(a, b, g * g * d1 * d2)
    return GapCertificate(
        g, int(d1), int(d2), float(a2_norm), "given", float(a), float(b), interval, 0, "given", meta
    )


def certify(
    spec: HamiltonianSpec,
    partition: Partition,
    space: SymSpace | None = None,
    a2_mode: str = "lanczos",
) -> GapCertificate:
    if not spec.delta > 1:
        raise SpecError("certification needs delta > 1")
    if space is None:
        space = SymSpace(spec.base, spec.N)
    if len(partition.v1) == 0 or len(partition.v2) == 0:
        raise CertificateError("degenerate partition")
    g = spec.hopping
    U = potential_diagonal(spec, space)
    S = space.surfaces.astype(float)
    a = float((U - g * S)[partition.v1].min())
    a2 = restricted_adjacency_norm(space, partition.v2, a2_mode)
    b = float(U[partition.v2].max() + g * a2)
    d1, d2 = boundary_degrees(space, partition)
    meta = {
        "delta": spec.delta,
        "N": spec.N,
        "graph_hash": spec.base.digest(),
        "field_hash": spec.field.digest() if spec.field is not None else None,
    }
    return GapCertificate(
        g, d1, d2, a2, a2_mode, a, b, _root_interval(a, b, g * g * d1 * d2),
        int(len(partition.v2)), partition.descriptor, meta,
    )


def chain_gamma(delta: float, k: int) -> tuple[float, float]:
    """``k + (1 - 1/delta)/2 -+ sqrt((delta - 1)(delta - 4k - 1)) / (2 delta)``."""
    if k < 1:
        raise CertificateError("k must be at least 1")
    if not delta > 4 * k + 1:
        raise CertificateError(f"the chain gap needs delta > 4k+1 = {4 * k + 1}, got {delta}")
    mid = k + 0.5 * (1.0 - 1.0 / delta)
    half = math.sqrt((delta - 1.0) * (delta - 4.0 * k - 1.0)) / (2.0 * delta)
    return mid - half, mid + half


def chain_bulk_quantities(delta: float, k: int) -> dict:
    """``a = (k+1)(1-1/delta)``, ``b = k(1+1/delta)``, ``d1 d2 = 4k^2``, ``||A_2|| = 2k``."""
    g = 1.0 / (2.0 * delta)
    return {
        "g": g, "a": (k + 1) * (1 - 1 / delta), "b": k + g * 2 * k,
        "d1": 2 * k, "d2": 2 * k, "a2_norm": 2.0 * k,
    }


def strip_bulk_quantities(delta: float, M: int) -> dict:
    """Strip droplets: ``a = (1-1/delta)(M+1)``, ``b = M``, ``d1 = 1``, ``d2 = 2M``, ``||A_2|| = 0``."""
    return {"g": 1.0 / (2.0 * delta), "a": (1 - 1 / delta) * (M + 1), "b": float(M),
            "d1": 1, "d2": 2 * M, "a2_norm": 0.0}


def grid_bulk_quantities(delta: float, N: int) -> dict:
    """Square droplets on Z^2: ``d1 = 1``, ``d2 = 4 sqrt(N)``, ``||A_2|| = 0``;
    ``a`` from the second surface level ``4 sqrt(N) + 2``."""
    s = math.isqrt(N)
    if s * s != N:
        raise CertificateError("square droplets need N to be a perfect square")
    c = 0.5 * (1 - 1 / delta)
    return {"g": 1.0 / (2.0 * delta), "a": c * (4 * s + 2), "b": 0.5 * 4 * s,
            "d1": 1, "d2": 4 * s, "a2_norm": 0.0}


def boundary_hopping_norm(space: SymSpace, partition: Partition) -> float:
    """Largest singular value of the ``V1 x V2`` adjacency block (dense)."""
    A = _adjacency(space)
    B = A[partition.v1][:, partition.v2].toarray()
    if B.size == 0 or not B.any():
        return 0.0
    return float(np.linalg.norm(B, 2))


def verify_certificate(
    cert: GapCertificate,
    spec: HamiltonianSpec,
    space: SymSpace | None = None,
    dense_cap: int = DENSE_CAP,
) -> dict:
    """Check the certificate against the exact spectrum.

    Clause (i): no eigenvalue inside the interval. Clause (ii): at least
    ``|V2|`` eigenvalues below the interval's upper end.
    """
    if space is None:
        space = SymSpace(spec.base, spec.N)
    op = build_hamiltonian(spec, space)
    w = dense_spectrum(op, dense_cap, vectors=False).eigenvalues
    if cert.interval is None:
        return {
            "clause_i": True, "clause_ii": True, "vacuous": True,
            "inside": [], "count_below": 0, "v2_size": cert.v2_size,
            "below": None, "above": None,
        }
    lo, hi = cert.interval
    inside = w[(w > lo) & (w < hi)]
    count = int(np.sum(w < hi))
    below = w[w <= lo]
    above = w[w >= hi]
    return {
        "clause_i": bool(len(inside) == 0),
        "clause_ii": bool(count >= cert.v2_size),
        "vacuous": False,
        "inside": inside.tolist(),
        "count_below": count,
        "v2_size": cert.v2_size,
        "below": float(below[-1]) if len(below) else None,
        "above": float(above[0]) if len(above) else None,
    }
