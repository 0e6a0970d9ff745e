"""Eigenvalues, resolvent block norms and spectral projectors."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg as sla

from .xxz_operator import LinearMap, StructuralError

__all__ = [
    "DEFAULT_SEED",
    "ConvergenceError",
    "SpectrumError",
    "SpectrumResult",
    "dense_spectrum",
    "extremal_eigs",
    "conjugate_gradient",
    "block_resolvent_norm",
    "DenseResolvent",
    "spectral_projector",
    "count_below",
]

DEFAULT_SEED = 0x5EED
DENSE_CAP = 6000


class ConvergenceError(RuntimeError):
    def __init__(self, message, best_residual=None):
        super().__init__(message)
        self.best_residual = best_residual


class SpectrumError(ValueError):
    """Request incompatible with the operator's spectrum or size."""


@dataclass
class SpectrumResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None
    method: str
    residual_norms: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "eigenvalues": self.eigenvalues.tolist(),
            "max_residual": float(self.residual_norms.max()) if len(self.residual_norms) else 0.0,
        }


def _dense_matrix(op: LinearMap, cap: int) -> np.ndarray:
    if op.dimension > cap:
        raise SpectrumError(
            f"dimension {op.dimension} above dense cap {cap}; use extremal_eigs instead"
        )
    return op.to_dense()


def dense_spectrum(op: LinearMap, cap: int = DENSE_CAP, vectors: bool = True) -> SpectrumResult:
    if not op.hermitian:
        raise SpectrumError("dense_spectrum needs a hermitian operator")
    H = _dense_matrix(op, cap)
    if not np.allclose(H, H.T.conj(), atol=1e-12, rtol=0):
        raise SpectrumError("operator matrix is not symmetric")
    if not vectors:
        return SpectrumResult(np.linalg.eigvalsh(H), None, "dense")
    w, V = np.linalg.eigh(H)
    res = np.linalg.norm(H @ V - V * w, axis=0)
    scale = max(1.0, float(np.abs(w).max()))
    if res.max(initial=0.0) > 1e-10 * scale:
        raise StructuralError(f"dense eigensolver residual {res.max():.2e}")
    return SpectrumResult(w, V, "dense", res)


def extremal_eigs(
    op: LinearMap,
    count: int = 1,
    which: str = "smallest",
    tol: float = 1e-10,
    seed: int = DEFAULT_SEED,
    basis_size: int | None = None,
    max_restarts: int = 500,
    vectors: bool = True,
) -> SpectrumResult:
    """Thick-restart Lanczos with full reorthogonalization.

    Converged pairs satisfy ``||A y - theta y|| <= tol`` (checked with one
    explicit matvec per pair). Exactly degenerate eigenvalues are resolved
    only as far as rounding lets the Krylov space see them.
    """
    if which not in ("smallest", "largest"):
        raise ValueError("which must be 'smallest' or 'largest'")
    n = op.dimension
    count = int(count)
    if not 1 <= count <= n:
        raise ValueError(f"count must lie in [1, {n}]")
    sign = 1.0 if which == "smallest" else -1.0

    def apply(v):
        return sign * op.apply(v)

    m = basis_size or min(n, max(2 * count + 20, 40))
    m = min(max(m, count + 1), n) if n > 1 else 1
    keep = min(m - 1, count + max(count // 2, 5)) if m > 1 else 0
    rng = np.random.default_rng(seed)
    V = np.zeros((m, n))
    H = np.zeros((m, m))

    def fresh(j):
        v = rng.standard_normal(n)
        for _ in range(2):
            v -= V[:j].T @ (V[:j] @ v)
        nv = np.linalg.norm(v)
        return v / nv if nv > 1e-8 else None

    v = fresh(0)
    j = 0
    beta = 0.0
    anorm = 0.0
    theta = S = None
    best = np.inf
    for restart in range(max_restarts + 1):
        while j < m:
            V[j] = v
            w = apply(v)
            h = V[: j + 1] @ w
            w -= V[: j + 1].T @ h
            h2 = V[: j + 1] @ w
            w -= V[: j + 1].T @ h2
            h += h2
            H[: j + 1, j] = h
            H[j, : j + 1] = h
            anorm = max(anorm, abs(h[j]) + np.linalg.norm(w))
            beta = float(np.linalg.norm(w))
            j += 1
            if j == n:
                beta = 0.0
                break
            if beta <= 1e-12 * max(anorm, 1.0):
                # invariant subspace: continue with a fresh orthogonal direction
                beta = 0.0
                v = fresh(j)
                if v is None:
                    break
                continue
            v = w / beta
        theta, S = np.linalg.eigh(H[:j, :j])
        est = beta * np.abs(S[j - 1, :count])
        best = min(best, float(est.max()))
        if j >= n or est.max() <= 0.1 * tol or (beta == 0.0 and j >= count):
            break
        if restart == max_restarts:
            raise ConvergenceError(
                f"Lanczos did not converge after {max_restarts} restarts", best_residual=best
            )
        # thick restart: keep the lowest Ritz vectors, continue from the residual
        k = keep
        V[:k] = S[:, :k].T @ V[:j]
        H[:] = 0.0
        H[np.arange(k), np.arange(k)] = theta[:k]
        j = k
        if beta == 0.0:
            v = fresh(j)
    nconv = min(count, j)
    evals = sign * theta[:nconv]
    Y = (S[:, :nconv].T @ V[:j]).T
    res = np.array(
        [np.linalg.norm(op.apply(Y[:, i]) - evals[i] * Y[:, i]) for i in range(nconv)]
    )
    if res.max(initial=0.0) > tol:
        raise ConvergenceError(
            f"Lanczos residual {res.max():.2e} above tolerance {tol:.1e}", best_residual=res.max()
        )
    order = np.argsort(evals) if which == "smallest" else np.argsort(-evals)
    return SpectrumResult(
        evals[order], Y[:, order] if vectors else None, "krylov", res[order]
    )


def conjugate_gradient(
    apply: Callable[[np.ndarray], np.ndarray],
    b: np.ndarray,
    tol: float = 1e-10,
    maxiter: int | None = None,
) -> np.ndarray:
    """CG for a hermitian positive definite operator, relative residual ``tol``."""
    b = np.asarray(b)
    nb = np.linalg.norm(b)
    if nb == 0:
        return np.zeros_like(b)
    maxiter = maxiter or 10 * len(b)
    x = np.zeros_like(b)
    r = b.copy()
    p = r.copy()
    rr = np.vdot(r, r).real
    for _ in range(maxiter):
        Ap = apply(p)
        alpha = rr / np.vdot(p, Ap).real
        x = x + alpha * p
        r = r - alpha * Ap
        rr_new = np.vdot(r, r).real
        if np.sqrt(rr_new) <= tol * nb:
            return x
        p = r + (rr_new / rr) * p
        rr = rr_new
    raise ConvergenceError(
        f"CG stalled at relative residual {np.sqrt(rr) / nb:.2e}", best_residual=np.sqrt(rr) / nb
    )


def _min_eigenvalue(op: LinearMap, dense_cap: int) -> float:
    if op.dimension <= dense_cap:
        return float(np.linalg.eigvalsh(op.to_dense())[0])
    return float(extremal_eigs(op, 1, vectors=False).eigenvalues[0])


class DenseResolvent:
    """Explicit ``(op - E)^{-1}`` for repeated block-norm queries."""

    def __init__(self, op: LinearMap, E, check_below: bool = True, cap: int = DENSE_CAP):
        H = _dense_matrix(op, cap)
        if np.iscomplexobj(E) and np.imag(E) != 0:
            M = H - E * np.eye(op.dimension)
        else:
            E = float(np.real(E))
            if check_below:
                lo = float(np.linalg.eigvalsh(H)[0])
                if not E < lo:
                    raise SpectrumError(f"E={E} is not below the spectrum (min {lo})")
            M = H - E * np.eye(op.dimension)
        self.E = E
        self.matrix = sla.inv(M)

    def block_norm(self, A: Sequence[int], B: Sequence[int]) -> float:
        blk = self.matrix[np.ix_(np.asarray(A), np.asarray(B))]
        if blk.size == 1:
            return float(abs(blk[0, 0]))
        return float(np.linalg.norm(blk, 2))


def block_resolvent_norm(
    op: LinearMap,
    E,
    A: Sequence[int],
    B: Sequence[int],
    method: str = "auto",
    dense_cap: int = DENSE_CAP,
    cg_tol: float = 1e-10,
    power_tol: float = 1e-8,
    seed: int = DEFAULT_SEED,
) -> float:
    """``|| chi_A (op - E)^{-1} chi_B ||`` for real E below the spectrum or
    complex E off the real axis."""
    A = np.unique(np.asarray(A, dtype=np.int64))
    B = np.unique(np.asarray(B, dtype=np.int64))
    if len(A) == 0 or len(B) == 0:
        raise ValueError("index sets must be nonempty")
    is_complex = np.iscomplexobj(E) and np.imag(E) != 0
    if method == "auto":
        method = "dense" if op.dimension <= dense_cap else "iterative"
    if method == "dense":
        return DenseResolvent(op, E, check_below=not is_complex, cap=dense_cap).block_norm(A, B)
    if method != "iterative":
        raise ValueError(f"unknown method {method!r}")

    n = op.dimension
    if is_complex:
        e, eps = float(np.real(E)), float(np.imag(E))

        def shifted(v):
            return op.apply(v.real) - e * v.real + 1j * (op.apply(v.imag) - e * v.imag)

        def solve(b, conj=False):
            # (H - e - i eps)^{-1} = (H - e + i eps) ((H - e)^2 + eps^2)^{-1}
            y = conjugate_gradient(lambda u: shifted(shifted(u)) + eps**2 * u, b, cg_tol)
            return shifted(y) + (-1j if conj else 1j) * eps * y
    else:
        E = float(np.real(E))
        lo = _min_eigenvalue(op, dense_cap)
        if not E < lo:
            raise SpectrumError(f"E={E} is not below the spectrum (min {lo})")

        def solve(b, conj=False):
            return conjugate_gradient(lambda u: op.apply(u) - E * u, b, cg_tol)

    rng = np.random.default_rng(seed)
    x = rng.standard_normal(len(B)).astype(complex if is_complex else float)
    x /= np.linalg.norm(x)
    lam_old = 0.0
    buf = np.zeros(n, dtype=x.dtype)
    for _ in range(10 * n):
        buf[:] = 0
        buf[B] = x
        y = solve(buf)[A]
        buf[:] = 0
        buf[A] = y
        z = solve(buf, conj=True)[B]
        lam = float(np.vdot(x, z).real)
        nz = np.linalg.norm(z)
        if nz == 0:
            return 0.0
        x = z / nz
        if abs(lam - lam_old) <= power_tol * abs(lam):
            return float(np.sqrt(lam))
        lam_old = lam
    raise ConvergenceError("power iteration did not converge", best_residual=abs(lam - lam_old))


def spectral_projector(
    op: LinearMap, interval: tuple[float, float], cap: int = DENSE_CAP, guard: float = 1e-9
) -> np.ndarray:
    """``Q = sum_{E_i in (lo, hi)} psi_i psi_i^T``."""
    lo, hi = interval
    res = dense_spectrum(op, cap)
    w, V = res.eigenvalues, res.eigenvectors
    for end in (lo, hi):
        if np.isfinite(end) and np.any(np.abs(w - end) < guard):
            raise SpectrumError(f"interval endpoint {end} within {guard} of an eigenvalue; shift it")
    sel = (w > lo) & (w < hi)
    Vs = V[:, sel]
    return Vs @ Vs.T


def count_below(op: LinearMap, E: float, cap: int = DENSE_CAP) -> int:
    w = dense_spectrum(op, cap, vectors=False).eigenvalues
    return int(np.sum(w < E))
