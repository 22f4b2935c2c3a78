# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled lexicographic multi-source Dijkstra (see _kernels_py for the reference version)."""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free

ctypedef long long i64

cdef struct Entry:
    double key
    i64 pert
    int center
    int node


cdef inline bint _before(double k1, i64 p1, int c1, double k2, i64 p2, int c2) noexcept nogil:
    if k1 != k2:
        return k1 < k2
    if p1 != p2:
        return p1 < p2
    return c1 < c2


cdef inline bint _entry_before(Entry* a, Entry* b) noexcept nogil:
    if a.key != b.key:
        return a.key < b.key
    if a.pert != b.pert:
        return a.pert < b.pert
    if a.center != b.center:
        return a.center < b.center
    return a.node < b.node


cdef inline void _push(Entry* heap, Py_ssize_t* size, Entry e) noexcept nogil:
    cdef Py_ssize_t i = size[0]
    cdef Py_ssize_t p
    size[0] += 1
    heap[i] = e
    while i > 0:
        p = (i - 1) >> 1
        if _entry_before(&heap[i], &heap[p]):
            heap[i], heap[p] = heap[p], heap[i]
            i = p
        else:
            break


cdef inline Entry _pop(Entry* heap, Py_ssize_t* size) noexcept nogil:
    cdef Entry top = heap[0]
    cdef Py_ssize_t i = 0
    cdef Py_ssize_t c, n
    size[0] -= 1
    n = size[0]
    heap[0] = heap[n]
    while True:
        c = 2 * i + 1
        if c >= n:
            break
        if c + 1 < n and _entry_before(&heap[c + 1], &heap[c]):
            c += 1
        if _entry_before(&heap[c], &heap[i]):
            heap[i], heap[c] = heap[c], heap[i]
            i = c
        else:
            break
    return top


cdef void _run(int n, const i64[:] indptr, const int[:] nbr, const i64[:] alen, const i64[:] apert,
               const i64[:] atie, const int[:] sources, const double[:] start, const i64[:] spert,
               i64 bound, int[:] center, i64[:] dist, i64[:] psum, int[:] parent, i64[:] parc,
               double[:] startn, char* done, Entry* heap) noexcept nogil:
    cdef Py_ssize_t size = 0
    cdef Py_ssize_t j, a
    cdef int u, v, s, c
    cdef i64 nd, np_
    cdef double nk, ck
    cdef Entry e
    for j in range(n):
        center[j] = -1
        dist[j] = -1
        psum[j] = 0
        parent[j] = -1
        parc[j] = -1
        done[j] = 0
    for j in range(sources.shape[0]):
        s = sources[j]
        startn[s] = start[j]
        center[s] = s
        dist[s] = 0
        psum[s] = spert[j]
        e.key = start[j]
        e.pert = spert[j]
        e.center = s
        e.node = s
        _push(heap, &size, e)
    while size > 0:
        e = _pop(heap, &size)
        u = e.node
        if done[u] or e.center != center[u] or e.pert != psum[u]:
            continue
        if e.key != startn[center[u]] + <double>dist[u]:
            continue
        done[u] = 1
        c = center[u]
        for a in range(indptr[u], indptr[u + 1]):
            v = nbr[a]
            if done[v]:
                continue
            nd = dist[u] + alen[a]
            if bound >= 0 and nd > bound:
                continue
            np_ = psum[u] + apert[a]
            nk = startn[c] + <double>nd
            if center[v] >= 0:
                ck = startn[center[v]] + <double>dist[v]
                if _before(nk, np_, c, ck, psum[v], center[v]):
                    pass
                elif nk == ck and np_ == psum[v] and c == center[v]:
                    if atie[a] < atie[parc[v]]:
                        parent[v] = u
                        parc[v] = a
                    continue
                else:
                    continue
            center[v] = c
            dist[v] = nd
            psum[v] = np_
            parent[v] = u
            parc[v] = a
            e.key = nk
            e.pert = np_
            e.center = c
            e.node = v
            _push(heap, &size, e)


def lex_dijkstra(cnp.ndarray indptr, cnp.ndarray nbr, cnp.ndarray arc_len, cnp.ndarray arc_pert,
                 cnp.ndarray arc_tie, cnp.ndarray sources, cnp.ndarray start, cnp.ndarray src_pert,
                 long long bound=-1):
    cdef int n = indptr.shape[0] - 1
    cdef Py_ssize_t cap = arc_len.shape[0] + sources.shape[0] + 1
    center = np.empty(n, dtype=np.int32)
    dist = np.empty(n, dtype=np.int64)
    psum = np.empty(n, dtype=np.int64)
    parent = np.empty(n, dtype=np.int32)
    parc = np.empty(n, dtype=np.int64)
    startn = np.zeros(n, dtype=np.float64)
    cdef char* done = <char*> malloc(n + 1)
    cdef Entry* heap = <Entry*> malloc(cap * sizeof(Entry))
    try:
        _run(n, indptr.astype(np.int64, copy=False), nbr.astype(np.int32, copy=False),
             arc_len.astype(np.int64, copy=False), arc_pert.astype(np.int64, copy=False),
             arc_tie.astype(np.int64, copy=False), sources.astype(np.int32, copy=False),
             start.astype(np.float64, copy=False), src_pert.astype(np.int64, copy=False), bound,
             center, dist, psum, parent, parc, startn, done, heap)
    finally:
        free(done)
        free(heap)
    return center, dist, psum, parent, parc


def lex_dijkstra_sweep(cnp.ndarray indptr, cnp.ndarray nbr, cnp.ndarray arc_len, cnp.ndarray arc_pert,
                       cnp.ndarray arc_tie, cnp.ndarray sources, cnp.ndarray start,
                       cnp.ndarray src_pert, long long bound=-1):
    """Row l runs lex_dijkstra with arc_len[l], arc_tie[l] and start[l]."""
    cdef int n = indptr.shape[0] - 1
    cdef Py_ssize_t rows = arc_len.shape[0]
    cdef Py_ssize_t cap = arc_len.shape[1] + sources.shape[0] + 1
    cdef Py_ssize_t l
    center = np.empty((rows, n), dtype=np.int32)
    dist = np.empty((rows, n), dtype=np.int64)
    psum = np.empty((rows, n), dtype=np.int64)
    parent = np.empty((rows, n), dtype=np.int32)
    parc = np.empty((rows, n), dtype=np.int64)
    startn = np.zeros(n, dtype=np.float64)
    cdef const i64[:] ip = indptr.astype(np.int64, copy=False)
    cdef const int[:] nb = nbr.astype(np.int32, copy=False)
    cdef const i64[:, :] al = arc_len.astype(np.int64, copy=False)
    cdef const i64[:] ap = arc_pert.astype(np.int64, copy=False)
    cdef const i64[:, :] at = arc_tie.astype(np.int64, copy=False)
    cdef const int[:] src = sources.astype(np.int32, copy=False)
    cdef const double[:, :] st = start.astype(np.float64, copy=False)
    cdef const i64[:] sp = src_pert.astype(np.int64, copy=False)
    cdef int[:, :] ce = center
    cdef i64[:, :] di = dist
    cdef i64[:, :] ps = psum
    cdef int[:, :] pa = parent
    cdef i64[:, :] pc = parc
    cdef double[:] sn = startn
    cdef char* done = <char*> malloc(n + 1)
    cdef Entry* heap = <Entry*> malloc(cap * sizeof(Entry))
    try:
        with nogil:
            for l in range(rows):
                _run(n, ip, nb, al[l], ap, at[l], src, st[l], sp, bound,
                     ce[l], di[l], ps[l], pa[l], pc[l], sn, done, heap)
    finally:
        free(done)
        free(heap)
    return center, dist, psum, parent, parc
