"""Pure-Python reference for the compiled kernels; outputs are identical element for element.

Labels are compared lexicographically as (start[center] + dist, perturbation sum, center id).
Among equal labels the parent is the tail of the arc with the smallest tie key.
"""

from __future__ import annotations

import heapq

import numpy as np


def lex_dijkstra(indptr, nbr, arc_len, arc_pert, arc_tie, sources, start, src_pert, bound=-1):
    n = len(indptr) - 1
    indptr = indptr.tolist()
    nbr = nbr.tolist()
    arc_len = arc_len.tolist()
    arc_pert = arc_pert.tolist()
    arc_tie = arc_tie.tolist()
    center = [-1] * n
    dist = [-1] * n
    psum = [0] * n
    parent = [-1] * n
    parc = [-1] * n
    startn = [0.0] * n
    done = [False] * n
    heap = []
    for s, t, p in zip(sources.tolist(), np.asarray(start, dtype=np.float64).tolist(), src_pert.tolist()):
        startn[s] = t
        center[s] = s
        dist[s] = 0
        psum[s] = p
        heap.append((t, p, s, s))
    heapq.heapify(heap)
    while heap:
        key, pert, c, u = heapq.heappop(heap)
        if done[u] or c != center[u] or pert != psum[u] or key != startn[c] + float(dist[u]):
            continue
        done[u] = True
        du, pu = dist[u], psum[u]
        base = startn[c]
        for a in range(indptr[u], indptr[u + 1]):
            v = nbr[a]
            if done[v]:
                continue
            nd = du + arc_len[a]
            if bound >= 0 and nd > bound:
                continue
            npert = pu + arc_pert[a]
            nk = base + float(nd)
            cv = center[v]
            if cv >= 0:
                cur = (startn[cv] + float(dist[v]), psum[v], cv)
                new = (nk, npert, c)
                if new > cur:
                    continue
                if new == cur:
                    if arc_tie[a] < arc_tie[parc[v]]:
                        parent[v] = u
                        parc[v] = a
                    continue
            center[v] = c
            dist[v] = nd
            psum[v] = npert
            parent[v] = u
            parc[v] = a
            heapq.heappush(heap, (nk, npert, c, v))
    return (np.asarray(center, dtype=np.int32), np.asarray(dist, dtype=np.int64),
            np.asarray(psum, dtype=np.int64), np.asarray(parent, dtype=np.int32),
            np.asarray(parc, dtype=np.int64))


def lex_dijkstra_sweep(indptr, nbr, arc_len, arc_pert, arc_tie, sources, start, src_pert, bound=-1):
    rows = [lex_dijkstra(indptr, nbr, arc_len[l], arc_pert, arc_tie[l], sources, start[l], src_pert, bound)
            for l in range(arc_len.shape[0])]
    return tuple(np.stack([r[i] for r in rows]) if rows else np.empty((0, len(indptr) - 1))
                 for i in range(5))
