"""Combes-Thomas resolvent bound and its eigenstate / projector consequences,
checked against exact resolvents and spectra.

Bound for ``E`` at offset ``delta`` below the regularized threshold::

    ||chi_A (H + lam P_k - E)^{-1} chi_B||
        <= 4 D_min / (delta (1 - 1/Delta)) * (1 + delta (Delta-1) D_min / ((D_min+k)^2 sqrt d))^{-dist}

The constant doubles for complex ``E``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .isoperimetry import DropletCatalog, droplet_ranks
from .spectral import DENSE_CAP, DenseResolvent, SpectrumError, dense_spectrum, spectral_projector
from .sym_product import SymSpace
from .xxz_operator import HamiltonianSpec, Regularization, SpecError, build_hamiltonian, ising_gap

__all__ = [
    "CTParams",
    "CTReport",
    "ct_rate",
    "ct_rhs",
    "fit_decay_rate",
    "default_energies",
    "verify_ct_grid",
    "eigenstate_decay_check",
    "projector_decay_check",
    "distance_shells",
]

FIT_FLOOR = 1e-13


@dataclass(frozen=True)
class CTParams:
    """Hypotheses of the bound. ``offset`` is the energy margin ``delta``."""

    anisotropy: float
    N: int
    k: int
    offset: float
    E: complex
    d: int
    D_min: int
    lam: float

    def __post_init__(self):
        D, k, dl = self.anisotropy, self.k, self.offset
        if not D > 1:
            raise SpecError(f"anisotropy {D} must exceed 1")
        if k < 0:
            raise SpecError("k must be nonnegative")
        if self.D_min < 1 or self.d < 1:
            raise SpecError("D_min and d must be positive")
        top = 0.5 * (self.D_min + k)
        if not 0 < dl <= top:
            raise SpecError(f"offset delta={dl} outside (0, (D_min+k)/2 = {top}]")
        e_max = (1 - 1 / D) * (top - dl)
        if np.real(self.E) > e_max + 1e-12:
            raise SpecError(f"energy Re E={np.real(self.E)} above (1-1/Delta)((D_min+k)/2 - delta) = {e_max}")
        floor = k * ising_gap(D)
        if self.lam < floor - 1e-15:
            raise SpecError(f"lambda={self.lam} below k(1-1/Delta)/2 = {floor}")

    @property
    def is_complex(self) -> bool:
        return bool(np.imag(self.E) != 0)

    @property
    def e_max(self) -> float:
        return (1 - 1 / self.anisotropy) * (0.5 * (self.D_min + self.k) - self.offset)


def ct_rate(p: CTParams) -> float:
    D = p.anisotropy
    return math.log1p(p.offset * (D - 1) * p.D_min / ((p.D_min + p.k) ** 2 * math.sqrt(p.d)))


def ct_constant(p: CTParams) -> float:
    c = 4.0 * p.D_min / (p.offset * (1 - 1 / p.anisotropy))
    return 2.0 * c if p.is_complex else c


def ct_rhs(p: CTParams, dist) -> np.ndarray | float:
    dist = np.asarray(dist, dtype=float)
    if np.any(dist < 0):
        raise ValueError("distances must be nonnegative")
    out = ct_constant(p) * np.exp(-ct_rate(p) * dist)
    return float(out) if out.ndim == 0 else out


def fit_decay_rate(dist, values) -> tuple[float, float, int]:
    """Least-squares slope of ``-log(value)`` against distance.

    Values at or below the floating-point floor are dropped. Returns
    ``(rate, log_prefactor, points_used)``; the rate is NaN with fewer than
    two points.
    """
    dist = np.asarray(dist, dtype=float)
    values = np.asarray(values, dtype=float)
    ok = values > FIT_FLOOR
    if ok.sum() < 2:
        return float("nan"), float("nan"), int(ok.sum())
    slope, icpt = np.polyfit(dist[ok], np.log(values[ok]), 1)
    return float(-slope), float(icpt), int(ok.sum())


def distance_shells(space: SymSpace, sources: np.ndarray) -> np.ndarray:
    """``d_N(X, sources)`` for every configuration, by multi-source BFS."""
    return space.bfs_from(sources)


def default_energies(e_max: float, count: int = 5, span: float = 2.0) -> np.ndarray:
    """``count`` admissible energies ending at the largest allowed one."""
    return np.linspace(e_max - span, e_max, count)


@dataclass
class CTReport:
    """One row per (offset, E, A, B); arrays share the row index."""

    offset: np.ndarray
    E_re: np.ndarray
    E_im: np.ndarray
    A: np.ndarray
    B: np.ndarray
    distance: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    eta: np.ndarray
    fitted: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    @property
    def rows(self) -> int:
        return len(self.lhs)

    @property
    def margin(self) -> np.ndarray:
        return self.rhs - self.lhs

    @property
    def violations(self) -> int:
        return int(np.sum(self.lhs > self.rhs))

    @property
    def max_ratio(self) -> float:
        return float(np.max(self.lhs / self.rhs)) if self.rows else 0.0

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["delta", "E_re", "E_im", "A", "B", "distance", "lhs", "rhs", "eta", "margin"])
        for i in range(self.rows):
            w.writerow([
                f"{self.offset[i]:.17g}", f"{self.E_re[i]:.17g}", f"{self.E_im[i]:.17g}",
                int(self.A[i]), int(self.B[i]), int(self.distance[i]),
                f"{self.lhs[i]:.17g}", f"{self.rhs[i]:.17g}", f"{self.eta[i]:.17g}",
                f"{self.rhs[i] - self.lhs[i]:.17g}",
            ])
        return buf.getvalue()

    def summary(self) -> dict:
        return {
            "rows": self.rows,
            "violations": self.violations,
            "max_lhs_over_rhs": self.max_ratio,
            "fitted_rates": self.fitted,
            **self.meta,
        }

    @classmethod
    def concat(cls, reports: list["CTReport"]) -> "CTReport":
        cat = lambda name: np.concatenate([getattr(r, name) for r in reports])  # noqa: E731
        fitted, meta = {}, {}
        for r in reports:
            fitted.update(r.fitted)
            meta.update(r.meta)
        return cls(*(cat(n) for n in ("offset", "E_re", "E_im", "A", "B", "distance", "lhs", "rhs", "eta")), fitted, meta)


def _regularized(spec: HamiltonianSpec, catalog: DropletCatalog, k: int, lam: float | None):
    lam = k * ising_gap(spec.delta) if lam is None else lam
    reg = Regularization(k, lam, catalog.D_min, catalog.measure, "brute_force")
    return spec.with_regularization(reg), lam


def verify_ct_grid(
    spec: HamiltonianSpec,
    catalog: DropletCatalog,
    k: int,
    offsets,
    energies=None,
    pair_family: str = "singleton_pairs",
    imag_shift: float = 0.0,
    lam: float | None = None,
    space: SymSpace | None = None,
    dense_cap: int = DENSE_CAP,
) -> CTReport:
    """Compare exact block resolvent norms with the bound on a grid.

    ``energies`` maps an offset to its energy list (default: five points
    ending at the largest admissible energy). ``pair_family`` is
    ``singleton_pairs`` (all ordered pairs of configurations) or
    ``set_to_droplets`` (each singleton against ``V_{N,k}``).
    """
    if pair_family not in ("singleton_pairs", "set_to_droplets"):
        raise ValueError(f"unknown pair family {pair_family!r}")
    if space is None:
        space = SymSpace(spec.base, spec.N)
    if catalog.N != spec.N or catalog.base is not spec.base:
        raise SpecError("catalog does not belong to this Hamiltonian")
    reg_spec, lam = _regularized(spec, catalog, k, lam)
    op = build_hamiltonian(reg_spec, space)
    n = space.dimension
    d = spec.base.max_degree
    if pair_family == "singleton_pairs":
        dist = np.stack([space.bfs_from([r]) for r in range(n)])
        A_idx, B_idx = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
        A_idx, B_idx, dist = A_idx.ravel(), B_idx.ravel(), dist.ravel()
        droplets = None
    else:
        droplets = droplet_ranks(catalog, k)
        if len(droplets) == 0:
            raise SpecError("V_{N,k} is empty for k=0")
        A_idx = np.arange(n)
        B_idx = np.full(n, -1)
        dist = distance_shells(space, droplets)

    parts = []
    fitted = {}
    for offset in offsets:
        probe = CTParams(spec.delta, spec.N, k, float(offset), 0.0, d, catalog.D_min, lam)
        Es = default_energies(probe.e_max) if energies is None else energies(offset)
        for E in Es:
            Ec = complex(E, imag_shift) if imag_shift else float(E)
            p = CTParams(spec.delta, spec.N, k, float(offset), Ec, d, catalog.D_min, lam)
            R = DenseResolvent(op, Ec, check_below=not p.is_complex, cap=dense_cap).matrix
            if droplets is None:
                lhs = np.abs(R).ravel()
            else:
                lhs = np.linalg.norm(R[:, droplets], axis=1)
            rhs = ct_rhs(p, dist)
            eta = ct_rate(p)
            m = len(lhs)
            parts.append(CTReport(
                np.full(m, float(offset)), np.full(m, float(E)), np.full(m, float(imag_shift)),
                A_idx.copy(), B_idx.copy(), dist.copy(), lhs, np.asarray(rhs), np.full(m, eta),
            ))
            shell = np.unique(dist)
            top = np.array([lhs[dist == s].max() for s in shell])
            rate, _, used = fit_decay_rate(shell, top)
            fitted[f"delta={offset:.17g},E={E:.17g}"] = {"rate": rate, "eta": eta, "shells": used}
    report = CTReport.concat(parts)
    order = np.lexsort((report.B, report.A, report.E_re, report.offset, report.distance))
    for name in ("offset", "E_re", "E_im", "A", "B", "distance", "lhs", "rhs", "eta"):
        setattr(report, name, getattr(report, name)[order])
    report.fitted = fitted
    report.meta = {"pair_family": pair_family, "k": k, "lambda": lam, "D_min": catalog.D_min,
                   "d": d, "imag_shift": imag_shift, "dimension": n}
    return report


def _shell_table(space, catalog, k):
    droplets = droplet_ranks(catalog, k)
    if len(droplets) == 0:
        raise SpecError("V_{N,k} is empty")
    dist = distance_shells(space, droplets)
    return droplets, dist


def eigenstate_decay_check(
    spec: HamiltonianSpec,
    catalog: DropletCatalog,
    k: int,
    E: float,
    psi: np.ndarray,
    space: SymSpace | None = None,
    residual_tol: float = 1e-10,
) -> dict:
    """Shell weights ``||chi_{A_r} psi||`` against the eigenstate bound.

    ``A_r`` is the set of configurations at distance ``r`` from ``V_{N,k}``.
    """
    if k < 1:
        raise SpecError("k=0 gives a vanishing regularization; the bound certifies nothing")
    if space is None:
        space = SymSpace(spec.base, spec.N)
    D = spec.delta
    e_k = ising_gap(D) * (catalog.D_min + k)
    if not E < e_k:
        raise SpecError(f"energy {E} not below the threshold E_(N,k) = {e_k}")
    op = build_hamiltonian(spec, space)
    psi = np.asarray(psi, dtype=float)
    res = float(np.linalg.norm(op.apply(psi) - E * psi))
    if res > residual_tol * max(1.0, np.linalg.norm(psi)):
        raise SpecError(f"(H - E) psi has residual {res:.2e}; not an eigenpair")
    droplets, dist = _shell_table(space, catalog, k)
    gap = e_k - E
    const = 2 * (D - 1) * k * catalog.D_min / (D * gap)
    gamma = math.log1p((D - 1) * gap * catalog.D_min / (math.sqrt(spec.base.max_degree) * (catalog.D_min + k) ** 2))
    core = float(np.linalg.norm(psi[droplets]))
    shells = np.unique(dist)
    measured = np.array([np.linalg.norm(psi[dist == r]) for r in shells])
    bound = const * np.exp(-gamma * shells) * core
    rate, icpt, used = fit_decay_rate(shells, measured)
    return {
        "E": float(E),
        "E_threshold": e_k,
        "constant": const,
        "gamma": gamma,
        "core_weight": core,
        "residual": res,
        "shells": shells.tolist(),
        "measured": measured.tolist(),
        "bound": bound.tolist(),
        "pass": bool(np.all(measured <= bound)),
        "fitted_rate": rate,
        "fit_points": used,
    }


def projector_decay_check(
    spec: HamiltonianSpec,
    catalog: DropletCatalog,
    k: int,
    offset: float | None = None,
    space: SymSpace | None = None,
    dense_cap: int = DENSE_CAP,
    guard: float = 1e-9,
    min_shells: int = 4,
) -> dict:
    """``||chi_{A_r} Q||`` over distance shells, with ``Q`` the spectral
    projector onto ``(0, E_{N,k})``.

    The gap hypothesis needs ``((1-1/Delta)(D_min+k-delta)/2, E_{N,k})``
    to be free of eigenvalues. When ``offset`` is None the largest such
    ``delta`` (capped at ``(D_min+k)/2``) is used, shrunk by ``guard``.
    """
    if space is None:
        space = SymSpace(spec.base, spec.N)
    D = spec.delta
    c = ising_gap(D)
    e_k = c * (catalog.D_min + k)
    op = build_hamiltonian(spec, space)
    w = dense_spectrum(op, dense_cap, vectors=False).eigenvalues
    below = w[(w > guard) & (w < e_k)]
    top = 0.5 * (catalog.D_min + k)
    if offset is None:
        last = below[-1] if len(below) else 0.0
        offset = min(top, (catalog.D_min + k) - last / c) - guard
    if not 0 < offset <= top:
        raise SpecError(f"no admissible gap offset (got {offset})")
    lo_gap = c * (catalog.D_min + k - offset)
    intruders = w[(w > lo_gap) & (w < e_k)]
    if len(intruders):
        raise SpectrumError(f"gap hypothesis fails: eigenvalues {intruders.tolist()} in ({lo_gap}, {e_k})")
    Q = spectral_projector(op, (guard, e_k - guard), dense_cap)
    droplets, dist = _shell_table(space, catalog, k)
    shells = np.unique(dist)
    norms = np.array([np.linalg.norm(Q[dist == r], 2) for r in shells])
    probe = CTParams(D, spec.N, k, float(offset), 0.0, spec.base.max_degree, catalog.D_min, k * c)
    eta = ct_rate(probe)
    outer = shells >= 1
    rate, icpt, used = fit_decay_rate(shells[outer], norms[outer])
    return {
        "E_threshold": e_k,
        "offset": float(offset),
        "gap": [lo_gap, e_k],
        "rank_Q": int(round(np.trace(Q))),
        "shells": shells.tolist(),
        "norms": norms.tolist(),
        "eta": eta,
        "fitted_rate": rate,
        "log_prefactor": icpt,
        "fit_points": used,
        "pass": bool(used >= min_shells and rate >= eta - 0.02),
    }
