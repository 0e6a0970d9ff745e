# cython: language_level=3
"""Compiled inner loops over colex-ranked N-subsets.

Every function works on a rank range [start, stop) and writes into a
caller-owned buffer, so ranges can be handed to threads independently.
"""

from libc.stdlib cimport malloc, free
from libc.string cimport memset

import numpy as np
cimport numpy as cnp

ctypedef cnp.int64_t i64


cdef inline void _unrank(i64 r, int n, int N, const i64[:, ::1] binom, int* x) noexcept nogil:
    cdef int c = n - 1
    cdef int i
    for i in range(N - 1, -1, -1):
        while binom[c, i + 1] > r:
            c -= 1
        x[i] = c
        r -= binom[c, i + 1]
        c -= 1


cdef inline void _successor(int N, int* x) noexcept nogil:
    cdef int i = 0
    cdef int j
    while i < N - 1 and x[i] + 1 == x[i + 1]:
        i += 1
    x[i] += 1
    for j in range(i):
        x[j] = j


cdef inline i64 _rank_moved(int N, const int* x, int p, int y,
                            const i64[:, ::1] binom) noexcept nogil:
    # rank of (x without x[p]) with y inserted
    cdef i64 r = 0
    cdef int i, k = 0, v
    cdef bint placed = False
    for i in range(N):
        if i == p:
            continue
        v = x[i]
        if not placed and y < v:
            r += binom[y, k + 1]
            k += 1
            placed = True
        r += binom[v, k + 1]
        k += 1
    if not placed:
        r += binom[y, k + 1]
    return r


def unrank_range(i64 start, i64 stop, int n, int N, const i64[:, ::1] binom, int[:, ::1] out):
    cdef i64 r
    cdef int i
    cdef int* x = <int*> malloc(N * sizeof(int))
    with nogil:
        _unrank(start, n, N, binom, x)
        for r in range(start, stop):
            for i in range(N):
                out[r - start, i] = x[i]
            if r + 1 < stop:
                _successor(N, x)
    free(x)


def surface_range(i64 start, i64 stop, int n, int N, const i64[:, ::1] binom,
                  const i64[::1] indptr, const i64[::1] indices, i64[::1] out):
    cdef i64 r, e
    cdef int i, s
    cdef int* x = <int*> malloc(N * sizeof(int))
    cdef unsigned char* mark = <unsigned char*> malloc(n)
    with nogil:
        memset(mark, 0, n)
        _unrank(start, n, N, binom, x)
        for r in range(start, stop):
            for i in range(N):
                mark[x[i]] = 1
            s = 0
            for i in range(N):
                for e in range(indptr[x[i]], indptr[x[i] + 1]):
                    if not mark[indices[e]]:
                        s += 1
            out[r - start] = s
            for i in range(N):
                mark[x[i]] = 0
            if r + 1 < stop:
                _successor(N, x)
    free(x)
    free(mark)


def neighbor_fill_range(i64 start, i64 stop, int n, int N, const i64[:, ::1] binom,
                        const i64[::1] indptr, const i64[::1] indices,
                        const i64[::1] row_ptr, i64[::1] out):
    """Neighbor ranks in canonical order; row r starts at row_ptr[r - start]."""
    cdef i64 r, e, pos
    cdef int i, y
    cdef int* x = <int*> malloc(N * sizeof(int))
    cdef unsigned char* mark = <unsigned char*> malloc(n)
    with nogil:
        memset(mark, 0, n)
        _unrank(start, n, N, binom, x)
        for r in range(start, stop):
            for i in range(N):
                mark[x[i]] = 1
            pos = row_ptr[r - start]
            for i in range(N):
                for e in range(indptr[x[i]], indptr[x[i] + 1]):
                    y = <int> indices[e]
                    if not mark[y]:
                        out[pos] = _rank_moved(N, x, i, y, binom)
                        pos += 1
            for i in range(N):
                mark[x[i]] = 0
            if r + 1 < stop:
                _successor(N, x)
    free(x)
    free(mark)


def adjacency_matvec_range(i64 start, i64 stop, int n, int N, const i64[:, ::1] binom,
                           const i64[::1] indptr, const i64[::1] indices,
                           const double[::1] v, double[::1] out):
    cdef i64 r, e
    cdef int i, y
    cdef double acc
    cdef int* x = <int*> malloc(N * sizeof(int))
    cdef unsigned char* mark = <unsigned char*> malloc(n)
    with nogil:
        memset(mark, 0, n)
        _unrank(start, n, N, binom, x)
        for r in range(start, stop):
            for i in range(N):
                mark[x[i]] = 1
            acc = 0.0
            for i in range(N):
                for e in range(indptr[x[i]], indptr[x[i] + 1]):
                    y = <int> indices[e]
                    if not mark[y]:
                        acc += v[_rank_moved(N, x, i, y, binom)]
            out[r - start] = acc
            for i in range(N):
                mark[x[i]] = 0
            if r + 1 < stop:
                _successor(N, x)
    free(x)
    free(mark)


def csr_matvec_range(i64 start, i64 stop, const i64[::1] indptr, const i64[::1] indices,
                     const double[::1] v, double[::1] out):
    cdef i64 r, e
    cdef double acc
    with nogil:
        for r in range(start, stop):
            acc = 0.0
            for e in range(indptr[r], indptr[r + 1]):
                acc += v[indices[e]]
            out[r - start] = acc


def bfs_csr(const i64[::1] indptr, const i64[::1] indices, const i64[::1] sources, i64[::1] dist):
    """Multi-source BFS; ``dist`` is filled with -1 for unreached nodes."""
    cdef i64 m = dist.shape[0]
    cdef i64 head = 0, tail = 0, u, w, e, i
    cdef i64* queue = <i64*> malloc(max(m, 1) * sizeof(i64))
    with nogil:
        for i in range(m):
            dist[i] = -1
        for i in range(sources.shape[0]):
            u = sources[i]
            if dist[u] < 0:
                dist[u] = 0
                queue[tail] = u
                tail += 1
        while head < tail:
            u = queue[head]
            head += 1
            for e in range(indptr[u], indptr[u + 1]):
                w = indices[e]
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    queue[tail] = w
                    tail += 1
    free(queue)
