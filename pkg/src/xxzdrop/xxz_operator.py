"""N-particle XXZ Hamiltonians on symmetric product graphs, and the full
2^|V| tensor-product Hamiltonian used as an independent oracle."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .graph_core import BaseGraph, FieldSpec
from .sym_product import DimensionError, SymSpace

__all__ = [
    "SpecError",
    "StructuralError",
    "Regularization",
    "HamiltonianSpec",
    "LinearMap",
    "build_hamiltonian",
    "potential_diagonal",
    "full_spin_hamiltonian",
    "twosite_spin_form",
    "twosite_number_form",
    "number_operator",
    "sector_blocks",
    "SectorReport",
]


class SpecError(ValueError):
    """Hamiltonian parameters outside the admissible range."""


class StructuralError(RuntimeError):
    """An internal consistency check failed; indicates a bug."""


def ising_gap(delta: float) -> float:
    """``(1 - 1/delta) / 2``, the energy per unit of surface."""
    return 0.5 * (1.0 - 1.0 / delta)


@dataclass(frozen=True)
class Regularization:
    """``lam * P_{N,k}``, with ``P_{N,k}`` projecting on ``{S(X) < d_min + k}``.

    ``measure`` names the surface function ("graph" or "lattice") and
    ``source`` records where ``d_min`` came from.
    """

    k: int
    lam: float
    d_min: int
    measure: str = "graph"
    source: str = "brute_force"

    @classmethod
    def minimal(cls, k: int, delta: float, d_min: int, measure="graph", source="brute_force"):
        return cls(k, k * ising_gap(delta), d_min, measure, source)

    def mask(self, space: SymSpace) -> np.ndarray:
        surf = space.lattice_surfaces if self.measure == "lattice" else space.surfaces
        return surf < self.d_min + self.k


@dataclass(frozen=True)
class HamiltonianSpec:
    base: BaseGraph
    N: int
    delta: float
    field: FieldSpec | None = None
    regularization: Regularization | None = None

    def __post_init__(self):
        if not self.delta > 1:
            raise SpecError(f"anisotropy delta={self.delta} must exceed 1 (Ising phase)")
        if not 0 <= self.N <= self.base.vertex_count:
            raise SpecError(f"particle number {self.N} outside [0, {self.base.vertex_count}]")
        if self.field is not None and len(self.field.values) != self.base.vertex_count:
            raise SpecError("field length does not match the vertex count")
        reg = self.regularization
        if reg is not None:
            if reg.k < 0:
                raise SpecError("regularization k must be nonnegative")
            floor = reg.k * ising_gap(self.delta)
            if reg.lam < floor - 1e-15:
                raise SpecError(f"lambda={reg.lam} below the floor k(1-1/delta)/2={floor}")
            if reg.measure not in ("graph", "lattice"):
                raise SpecError(f"unknown surface measure {reg.measure!r}")

    @property
    def hopping(self) -> float:
        return 1.0 / (2.0 * self.delta)

    def with_field(self, field: FieldSpec | None) -> "HamiltonianSpec":
        return HamiltonianSpec(self.base, self.N, self.delta, field, self.regularization)

    def with_regularization(self, reg: Regularization | None) -> "HamiltonianSpec":
        return HamiltonianSpec(self.base, self.N, self.delta, self.field, reg)


class LinearMap:
    """A linear operator given by its action, optionally with a matrix.

    ``diagonal`` is kept when the operator is ``-g A + diag`` so callers can
    read the potential without another pass.
    """

    def __init__(
        self,
        dimension: int,
        matvec: Callable[[np.ndarray], np.ndarray],
        *,
        hermitian: bool = True,
        matrix=None,
        diagonal: np.ndarray | None = None,
        name: str = "",
    ):
        self.dimension = int(dimension)
        self._matvec = matvec
        self.hermitian = hermitian
        self.matrix = matrix
        self.diagonal = diagonal
        self.name = name

    def apply(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v)
        if v.shape != (self.dimension,):
            raise ValueError(f"vector shape {v.shape} does not match dimension {self.dimension}")
        return self._matvec(v)

    __call__ = apply

    def to_dense(self) -> np.ndarray:
        if self.matrix is not None:
            return self.matrix.toarray() if sp.issparse(self.matrix) else np.asarray(self.matrix)
        eye = np.eye(self.dimension)
        return np.column_stack([self._matvec(eye[:, j]) for j in range(self.dimension)])

    def as_operator(self) -> spla.LinearOperator:
        return spla.LinearOperator(
            (self.dimension, self.dimension), matvec=self._matvec, dtype=float
        )

    @classmethod
    def from_matrix(cls, matrix, hermitian=True, name="") -> "LinearMap":
        m = sp.csr_matrix(matrix) if not sp.issparse(matrix) else matrix.tocsr()
        return cls(m.shape[0], lambda v: m @ v, hermitian=hermitian, matrix=m, name=name)

    def __repr__(self):
        kind = "explicit" if self.matrix is not None else "matrix-free"
        return f"LinearMap({self.name or 'op'}, dim={self.dimension}, {kind})"


def potential_diagonal(spec: HamiltonianSpec, space: SymSpace) -> np.ndarray:
    """``S(X)/2 + V(X) + lam * [X in V_{N,k}]``."""
    diag = 0.5 * space.surfaces.astype(float)
    if spec.field is not None:
        diag = diag + space.site_sum(spec.field.values)
    if spec.regularization is not None:
        reg = spec.regularization
        diag = diag + reg.lam * reg.mask(space)
    return diag


def build_hamiltonian(
    spec: HamiltonianSpec, space: SymSpace | None = None, explicit: bool | None = None
) -> LinearMap:
    """``H = -(1/2 delta) A_N + D_N/2 + V_N + lam P_{N,k}`` on ``l2(V_N)``.

    ``explicit=None`` assembles a sparse matrix when the dimension is within
    the space's sparse cap and stays matrix-free otherwise.
    """
    if space is None:
        space = SymSpace(spec.base, spec.N)
    elif space.base is not spec.base or space.N != spec.N:
        raise SpecError("space does not match the Hamiltonian spec")
    g = spec.hopping
    diag = potential_diagonal(spec, space)
    if explicit is None:
        explicit = space.dimension <= space.sparse_cap
    name = f"H^{spec.N}"
    if explicit:
        A = space.adjacency_matrix(force=True)
        H = (-g * A + sp.diags(diag)).tocsr()
        return LinearMap(space.dimension, lambda v: H @ v, matrix=H, diagonal=diag, name=name)

    def matvec(v):
        return -g * space.apply_adjacency(v) + diag * v

    return LinearMap(space.dimension, matvec, diagonal=diag, name=name)


# -- tensor-product oracle -------------------------------------------------

_NUM = sp.csr_matrix(np.array([[0.0, 0.0], [0.0, 1.0]]))
_LOWER = sp.csr_matrix(np.array([[0.0, 0.0], [1.0, 0.0]]))  # S^-: up -> down
_RAISE = sp.csr_matrix(np.array([[0.0, 1.0], [0.0, 0.0]]))  # S^+


def _site_op(op, x: int, n: int):
    """``op`` acting on site ``x``; site x is bit x of the basis index."""
    left = sp.identity(2 ** (n - 1 - x), format="csr")
    right = sp.identity(2**x, format="csr")
    return sp.kron(sp.kron(left, op, format="csr"), right, format="csr")


def twosite_number_form(delta: float) -> np.ndarray:
    """4x4 ``h_xy`` from the number/ladder identity (site x = low bit)."""
    n_x = np.kron(np.eye(2), _NUM.toarray())
    n_y = np.kron(_NUM.toarray(), np.eye(2))
    lo_x = np.kron(np.eye(2), _LOWER.toarray())
    hi_x = np.kron(np.eye(2), _RAISE.toarray())
    lo_y = np.kron(_LOWER.toarray(), np.eye(2))
    hi_y = np.kron(_RAISE.toarray(), np.eye(2))
    return -n_x @ n_y + 0.5 * n_x + 0.5 * n_y - (lo_x @ hi_y + lo_y @ hi_x) / (2 * delta)


def twosite_spin_form(delta: float) -> np.ndarray:
    """4x4 ``h_xy = -(S1S1 + S2S2)/delta - S3S3 + 1/4`` from spin matrices."""
    s1 = 0.5 * np.array([[0, 1], [1, 0]], dtype=complex)
    s2 = 0.5 * np.array([[0, -1j], [1j, 0]], dtype=complex)
    s3 = 0.5 * np.array([[1, 0], [0, -1]], dtype=complex)
    pair = lambda a: np.kron(a, a)  # noqa: E731
    h = -(pair(s1) + pair(s2)) / delta - pair(s3) + 0.25 * np.eye(4)
    if np.abs(h.imag).max() > 0:
        raise StructuralError("two-site Hamiltonian is not real")
    return h.real


def number_operator(n: int) -> sp.csr_matrix:
    """Total particle number, diagonal popcount of the basis index."""
    idx = np.arange(2**n)
    pop = np.zeros(2**n)
    for x in range(n):
        pop += (idx >> x) & 1
    return sp.diags(pop).tocsr()


def full_spin_hamiltonian(
    G: BaseGraph, delta: float, field: FieldSpec | None = None, cap: int = 14
) -> sp.csr_matrix:
    """``sum_{xy in E} h_xy + sum_x v(x) N_x`` on ``(C^2)^{\\otimes |V|}``.

    Basis index ``sum_x b_x 2^x`` with ``b_x = 1`` for a down spin at x.
    """
    n = G.vertex_count
    if n > cap:
        raise DimensionError(f"|V|={n} exceeds the tensor-oracle cap {cap}")
    if not delta > 1:
        raise SpecError("delta must exceed 1")
    dim = 2**n
    H = sp.csr_matrix((dim, dim))
    num = [_site_op(_NUM, x, n) for x in range(n)]
    lower = [_site_op(_LOWER, x, n) for x in range(n)]
    raise_ = [_site_op(_RAISE, x, n) for x in range(n)]
    for x, y in G.edges:
        H = H + (
            -(num[x] @ num[y])
            + 0.5 * num[x]
            + 0.5 * num[y]
            - (lower[x] @ raise_[y] + lower[y] @ raise_[x]) / (2 * delta)
        )
    if field is not None:
        for x in range(n):
            if field.values[x]:
                H = H + field.values[x] * num[x]
    H = H.tocsr()
    H.eliminate_zeros()
    return H


@dataclass
class SectorReport:
    blocks: dict
    deviations: dict
    leakage: float

    @property
    def max_deviation(self) -> float:
        return max(self.deviations.values())


def sector_blocks(
    full: sp.spmatrix,
    G: BaseGraph,
    delta: float | None = None,
    field: FieldSpec | None = None,
    leak_tol: float = 1e-12,
) -> SectorReport:
    """Split the tensor Hamiltonian into fixed-N blocks in colex order.

    When ``delta`` is given, each block is compared entrywise with the
    symmetric-product construction.
    """
    n = G.vertex_count
    full = sp.coo_matrix(full)
    pop = np.array([bin(i).count("1") for i in range(2**n)])
    off = pop[full.row] != pop[full.col]
    leakage = float(np.abs(full.data[off]).max()) if off.any() else 0.0
    if leakage > leak_tol:
        raise StructuralError(f"off-block leakage {leakage:.3e} between particle sectors")
    dense = full.tocsr()
    blocks, deviations = {}, {}
    for N in range(n + 1):
        space = SymSpace(G, N)
        masks = np.array(
            [sum(1 << x for x in space.config(r)) for r in range(space.dimension)], dtype=np.int64
        )
        block = dense[masks][:, masks].toarray()
        blocks[N] = block
        if delta is not None:
            ref = build_hamiltonian(HamiltonianSpec(G, N, delta, field), space).to_dense()
            deviations[N] = float(np.abs(block - ref).max())
    return SectorReport(blocks, deviations, leakage)
