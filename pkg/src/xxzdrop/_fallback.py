"""Vectorized numpy versions of the compiled kernels (same signatures)."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

# rows per vectorized batch; bounds the (batch, N * d) temporaries
_BATCH = 1 << 15


def _unrank_many(ranks: np.ndarray, n: int, N: int, binom: np.ndarray) -> np.ndarray:
    r = ranks.astype(np.int64, copy=True)
    out = np.empty((len(r), N), dtype=np.int32)
    for i in range(N - 1, -1, -1):
        col = binom[:, i + 1]
        c = np.searchsorted(col, r, side="right") - 1
        out[:, i] = c
        r -= col[c]
    return out


def unrank_range(start, stop, n, N, binom, out):
    out[:] = _unrank_many(np.arange(start, stop, dtype=np.int64), n, N, binom)


def _tables(n, indptr, indices):
    deg = np.diff(indptr)
    dmax = int(deg.max()) if len(deg) else 0
    padded = np.full((n, max(dmax, 1)), -1, dtype=np.int64)
    for x in range(n):
        padded[x, : deg[x]] = indices[indptr[x] : indptr[x + 1]]
    return deg, padded


def _neighbor_block(C, N, binom, padded):
    """(B, N*d) neighbor ranks in canonical order, -1 where no move exists."""
    B = C.shape[0]
    d = padded.shape[1]
    out = np.full((B, N, d), -1, dtype=np.int64)
    Ci = C.astype(np.int64)
    for p in range(N):
        rest = np.delete(Ci, p, axis=1)
        targets = padded[Ci[:, p]]
        for t in range(d):
            y = targets[:, t]
            ok = y >= 0
            if N > 1:
                ok &= ~(rest == y[:, None]).any(axis=1)
            if not ok.any():
                continue
            new = np.sort(np.concatenate([rest[ok], y[ok, None]], axis=1), axis=1)
            r = np.zeros(len(new), dtype=np.int64)
            for i in range(N):
                r += binom[new[:, i], i + 1]
            out[ok, p, t] = r
    return out.reshape(B, N * d)


def surface_range(start, stop, n, N, binom, indptr, indices, out):
    deg, _ = _tables(n, indptr, indices)
    adj = sp.csr_matrix(
        (np.ones(len(indices), dtype=np.int8), indices, indptr), shape=(n, n)
    ).toarray().astype(bool)
    for lo in range(start, stop, _BATCH):
        hi = min(lo + _BATCH, stop)
        C = _unrank_many(np.arange(lo, hi, dtype=np.int64), n, N, binom)
        s = deg[C].sum(axis=1)
        for p in range(N):
            for q in range(p + 1, N):
                s -= 2 * adj[C[:, p], C[:, q]]
        out[lo - start : hi - start] = s


def neighbor_fill_range(start, stop, n, N, binom, indptr, indices, row_ptr, out):
    _, padded = _tables(n, indptr, indices)
    for lo in range(start, stop, _BATCH):
        hi = min(lo + _BATCH, stop)
        C = _unrank_many(np.arange(lo, hi, dtype=np.int64), n, N, binom)
        nb = _neighbor_block(C, N, binom, padded)
        flat = nb[nb >= 0]
        base = row_ptr[lo - start]
        out[base : base + len(flat)] = flat


def adjacency_matvec_range(start, stop, n, N, binom, indptr, indices, v, out):
    _, padded = _tables(n, indptr, indices)
    vpad = np.append(np.asarray(v, dtype=float), 0.0)
    for lo in range(start, stop, _BATCH):
        hi = min(lo + _BATCH, stop)
        C = _unrank_many(np.arange(lo, hi, dtype=np.int64), n, N, binom)
        nb = _neighbor_block(C, N, binom, padded)
        # -1 indexes the appended zero; summation order matches the compiled loop
        acc = np.zeros(hi - lo)
        for j in range(nb.shape[1]):
            acc += vpad[nb[:, j]]
        out[lo - start : hi - start] = acc


def csr_matvec_range(start, stop, indptr, indices, v, out):
    lo, hi = indptr[start], indptr[stop]
    rows = np.repeat(np.arange(stop - start), np.diff(indptr[start : stop + 1]))
    out[:] = np.bincount(rows, weights=np.asarray(v)[indices[lo:hi]], minlength=stop - start)


def bfs_csr(indptr, indices, sources, dist):
    m = len(dist)
    A = sp.csr_matrix((np.ones(len(indices), dtype=np.int8), indices, indptr), shape=(m, m))
    dist[:] = -1
    frontier = np.zeros(m, dtype=bool)
    frontier[np.asarray(sources, dtype=np.int64)] = True
    level = 0
    while frontier.any():
        dist[frontier] = level
        reach = (A @ frontier.astype(np.int8)) > 0
        frontier = reach & (dist < 0)
        level += 1
