"""Approximate hop-bounded SSSP by BFS on scaled graphs, with optional tree-alignment records.

For each distance guess d_l = (1+lam)^l the weighted graph is subdivided with
Gamma_l = sigma d_l / r and a BFS bounded by r' = ceil((1 + 1/sigma) r) rounds runs from
each source. The estimate is the smallest Gamma_l * dist'_l(s, u) over l.

Two execution backends give identical tables:

* ``faithful`` materialises each scaled graph and exchanges messages round by round;
* ``compressed`` runs a bounded Dijkstra on the base graph with the integer subdivision
  lengths, breaking ties exactly as the BFS would (smallest sender id in the scaled graph)
  and metering the messages the BFS would have sent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from . import kernels
from .congest import CostLedger, SyncNetwork, _bfs_rounds
from .graph import INF, GraphError, WeightedGraph
from .scaling import ScaledGraph, graph_scaling

FAITHFUL_NODE_LIMIT = 20_000


def rational_step(x) -> Fraction:
    """x itself if it is a short rational, else the largest 1/q not exceeding x."""
    f = Fraction(x)
    if f <= 0:
        raise ValueError("step must be positive")
    if f.denominator <= 1 << 20:
        return f
    return Fraction(1, math.ceil(1 / f))


def grid_size(lam: Fraction, target) -> int:
    """Smallest L with (1 + lam)^L >= target."""
    L = max(0, math.floor(math.log(max(float(target), 1.0)) / math.log1p(float(lam))) - 2)
    while (1 + lam) ** L < target:
        L += 1
    return L


@dataclass(frozen=True)
class ScalingGrid:
    lam: Fraction
    sigma: Fraction
    r: int
    r_prime: int
    d: tuple[Fraction, ...]
    gamma: tuple[Fraction, ...]

    @property
    def L(self) -> int:
        return len(self.d) - 1

    @classmethod
    def build(cls, n: int, W: int, r: int, eps) -> "ScalingGrid":
        if r < 1:
            raise ValueError("hop bound must be at least 1")
        half = rational_step(eps) / 2
        lam = sigma = half
        L = grid_size(lam, n * max(W, 1))
        d = [Fraction(1)]
        for _ in range(L):
            d.append(d[-1] * (1 + lam))
        d = tuple(d)
        gamma = tuple(sigma * dl / r for dl in d)
        r_prime = math.ceil((1 + 1 / sigma) * r)
        return cls(lam, sigma, r, r_prime, d, gamma)


def check_eps_floor(n: int, eps) -> None:
    if n >= 2 and float(eps) < 2 / math.log2(n):
        raise ValueError(f"eps={float(eps):.4g} below the floor 2/log2(n)={2 / math.log2(n):.4g}")


@dataclass
class HopDistanceTable:
    sources: tuple[int, ...]
    n: int
    grid: ScalingGrid
    dist: dict[int, list] = field(default_factory=dict)
    l_star: dict[int, list] = field(default_factory=dict)
    parents: dict[int, dict[int, np.ndarray]] = field(default_factory=dict)
    flag: dict[int, list] | None = None

    def estimate(self, s: int, u: int):
        return self.dist[s][u]

    def record(self, s: int, u: int):
        """B(s, u): True, False, or None when the estimate is infinite."""
        if self.flag is None:
            raise ValueError("this table carries no records")
        return self.flag[s][u]

    def estimation_path(self, s: int, u: int) -> list[int] | None:
        """Base nodes s .. u of the path realising the estimate."""
        l = self.l_star[s][u]
        if l is None:
            return None
        parent = self.parents[s][l]
        out = [u]
        while out[-1] != s:
            out.append(int(parent[out[-1]]))
        return out[::-1]


def _arc_ties(g: WeightedGraph, lengths: np.ndarray) -> np.ndarray:
    """Per arc, the scaled-graph id of the sender adjacent to the arc's head."""
    c = g.csr
    n = g.n
    offsets = n + np.concatenate(([0], np.cumsum(lengths - 1)[:-1])) if g.m else np.zeros(0, np.int64)
    first = np.asarray([u for u, _, _ in g.edges], dtype=np.int64)
    le = lengths[c.eid]
    off = offsets[c.eid]
    head_is_first = c.nbr == first[c.eid]
    internal = np.where(head_is_first, off, off + le - 2)
    return np.where(le == 1, c.src, internal).astype(np.int64)


def _arc_usage(g: WeightedGraph, lengths: np.ndarray, dist: np.ndarray, r_prime: int) -> np.ndarray:
    """1 on each base arc whose direction carried a message of one bounded BFS (rows broadcast)."""
    c = g.csr
    ds = dist[..., c.src]
    dh = dist[..., c.nbr]
    le = lengths[..., c.eid]
    tail_sends = (ds >= 0) & (ds < r_prime)
    inner_sends = (le >= 2) & (dh >= 0) & (dh + 1 < r_prime)
    return (tail_sends | inner_sends).astype(np.int64)


class _Sweep:
    """Per-iteration scaled lengths and tie keys for one (graph, grid) pair."""

    def __init__(self, g: WeightedGraph, grid: ScalingGrid):
        self.g = g
        self.grid = grid
        w = np.asarray([e[2] for e in g.edges], dtype=object)
        rows, ties = [], []
        for gamma in grid.gamma:
            p, q = gamma.numerator, gamma.denominator
            lengths = np.asarray([max(1, -((-int(x) * q) // p)) for x in w], dtype=np.int64)
            rows.append(lengths)
            ties.append(_arc_ties(g, lengths))
        self.lengths = np.stack(rows) if rows else np.zeros((0, g.m), np.int64)
        eid = g.csr.eid
        self.arc_len = self.lengths[:, eid]
        self.arc_tie = np.stack(ties)
        self.gamma_f = np.asarray([float(x) for x in grid.gamma])

    def run(self, s: int):
        g, grid = self.g, self.grid
        rows = len(grid.gamma)
        c = g.csr
        center, dist, _, parent, parc = kernels.lex_dijkstra_sweep(
            c.indptr, c.nbr, self.arc_len, np.zeros(c.arcs, np.int64), self.arc_tie,
            np.asarray([s], np.int32), np.zeros((rows, 1)), np.zeros(1, np.int64), grid.r_prime)
        return dist, parent, parc

    def usage(self, dist: np.ndarray) -> np.ndarray:
        return _arc_usage(self.g, self.lengths, dist, self.grid.r_prime).sum(axis=0)


def _faithful_runs(g: WeightedGraph, grid: ScalingGrid, s: int, edge_set: frozenset | None):
    """Message-level BFS on every scaled graph; returns arrays shaped like _Sweep.run plus usage."""
    rows = len(grid.gamma)
    n = g.n
    c = g.csr
    dist = np.full((rows, n), -1, dtype=np.int64)
    parent = np.full((rows, n), -1, dtype=np.int32)
    parc = np.full((rows, n), -1, dtype=np.int64)
    flags = np.zeros((rows, n), dtype=bool)
    usage = np.zeros(c.arcs, dtype=np.int64)
    arc_of = {(int(c.src[a]), int(c.nbr[a])): a for a in range(c.arcs)}
    for l, gamma in enumerate(grid.gamma):
        sg = graph_scaling(g, gamma)
        if sg.node_count > FAITHFUL_NODE_LIMIT:
            raise GraphError(f"scaled graph has {sg.node_count} nodes; use the compressed backend")
        gp = sg.graph
        base_arc = {}
        for i in range(g.m):
            path = sg.edge_path(i)
            a, b = path[0], path[-1]
            for x, y in zip(path, path[1:]):
                base_arc[(x, y)] = arc_of[(a, b)]
                base_arc[(y, x)] = arc_of[(b, a)]
        dd = None
        if edge_set is not None:
            dd = sg.scaled_edges(edge_set)
        net = SyncNetwork(gp)
        res = _bfs_rounds(gp, s, grid.r_prime, net,
                          None if dd is None else (lambda x, y: (min(x, y), max(x, y)) in dd))
        used = {base_arc[arc] for arc in net.messages}
        usage[list(used)] += 1
        for u in range(n):
            if res.dist[u] == INF:
                continue
            dist[l, u] = res.dist[u]
            if res.flag is not None:
                flags[l, u] = bool(res.flag[u])
            if u == s:
                continue
            x = res.parent[u]
            while x >= n:
                x = res.parent[x]
            parent[l, u] = x
            parc[l, u] = arc_of[(x, u)]
    return dist, parent, parc, flags, usage


def _select(grid: ScalingGrid, dist: np.ndarray) -> tuple[list, list]:
    """Per node: min over l of Gamma_l * dist_l (exact), smallest l on ties."""
    gamma_f = np.asarray([float(x) for x in grid.gamma])
    est = np.where(dist >= 0, gamma_f[:, None] * np.maximum(dist, 0), np.inf)
    best_f = est.min(axis=0) if est.size else np.full(dist.shape[1], np.inf)
    values: list = []
    which: list = []
    for u in range(dist.shape[1]):
        if not np.isfinite(best_f[u]):
            values.append(INF)
            which.append(None)
            continue
        cands = np.nonzero(est[:, u] <= best_f[u] * (1 + 1e-9))[0]
        best = None
        for l in cands.tolist():
            val = grid.gamma[l] * int(dist[l, u])
            if best is None or val < best[0]:
                best = (val, l)
        values.append(best[0])
        which.append(best[1])
    return values, which


def _tree_flags(g: WeightedGraph, s: int, parent: np.ndarray, parc: np.ndarray, dist: np.ndarray,
                in_set: np.ndarray) -> np.ndarray:
    """flag[u] = every base edge on the tree path s..u lies in the set."""
    eid = g.csr.eid
    order = np.argsort(np.where(dist >= 0, dist, np.iinfo(np.int64).max), kind="stable")
    flag = np.zeros(g.n, dtype=bool)
    flag[s] = True
    for u in order.tolist():
        if dist[u] < 0:
            break
        if u != s:
            flag[u] = flag[parent[u]] and bool(in_set[eid[parc[u]]])
    return flag


class SourceTables:
    """Memoised per-source BFS sweeps for one (graph, r, eps); tables do not depend on E'."""

    def __init__(self, g: WeightedGraph, r: int, eps, backend: str = "auto"):
        if g.directed:
            raise GraphError("hop-bounded SSSP is defined for undirected graphs")
        self.g = g
        self.grid = ScalingGrid.build(g.n, g.W, r, eps)
        if backend == "auto":
            backend = "compressed"
        if backend not in ("compressed", "faithful"):
            raise ValueError(f"unknown backend {backend!r}")
        self.backend = backend
        self._sweep = _Sweep(g, self.grid) if backend == "compressed" else None
        self._cache: dict[int, tuple] = {}

    def source(self, s: int):
        """(values, l_star, parents by l, parc by l, dist by l, usage) for source s."""
        hit = self._cache.get(s)
        if hit is None:
            if self.backend == "compressed":
                dist, parent, parc = self._sweep.run(s)
                usage = self._sweep.usage(dist)
            else:
                dist, parent, parc, _, usage = _faithful_runs(self.g, self.grid, s, None)
            values, which = _select(self.grid, dist)
            hit = (values, which, parent, parc, dist, usage)
            self._cache[s] = hit
        return hit

    def flags(self, s: int, in_set: np.ndarray, which: list, parent, parc, dist) -> list:
        out: list = [None] * self.g.n
        per_l: dict[int, np.ndarray] = {}
        for u, l in enumerate(which):
            if l is None:
                continue
            if u == s:
                out[u] = any(bool(in_set[i]) for _, _, i in self.g.adj[s])
                continue
            if l not in per_l:
                per_l[l] = _tree_flags(self.g, s, parent[l], parc[l], dist[l], in_set)
            out[u] = bool(per_l[l][u])
        return out


def _run_table(g: WeightedGraph, S: Iterable[int], r: int, eps, edge_subset, ledger, phase, backend,
               tables: SourceTables | None = None) -> HopDistanceTable:
    S = tuple(sorted(set(S)))
    if not S:
        raise ValueError("source set must be nonempty")
    tables = tables or SourceTables(g, r, eps, backend)
    in_set = None
    if edge_subset is not None:
        in_set = np.zeros(g.m, dtype=bool)
        in_set[list(edge_subset)] = True
    table = HopDistanceTable(S, g.n, tables.grid, flag={} if in_set is not None else None)
    usage = np.zeros(g.csr.arcs, dtype=np.int64)
    for s in S:
        values, which, parent, parc, dist, used = tables.source(s)
        usage += used
        table.dist[s] = values
        table.l_star[s] = which
        table.parents[s] = {l: parent[l] for l in set(which) if l is not None}
        if in_set is None:
            continue
        if tables.backend == "faithful":
            flags = _faithful_runs(g, tables.grid, s, frozenset(edge_subset))[3]
            table.flag[s] = [None if l is None else bool(flags[l, u]) for u, l in enumerate(which)]
        else:
            table.flag[s] = tables.flags(s, in_set, which, parent, parc, dist)
    if ledger is not None:
        c = g.csr
        ledger.record_rounds(phase, tables.grid.r_prime)
        ledger.record_messages(phase, {(int(c.src[a]), int(c.nbr[a])): int(usage[a])
                                       for a in np.nonzero(usage)[0]})
    return table


def bfs_based_sssp(g: WeightedGraph, S: Iterable[int], r: int, eps, ledger: CostLedger | None = None,
                   phase: str = "bfs-sssp", backend: str = "auto") -> HopDistanceTable:
    """Estimates d~(s, u) for s in S with dist^(r) <= d~ <= (1 + eps) dist^(r)."""
    return _run_table(g, S, r, eps, None, ledger, phase, backend)


def modified_bfs_based_sssp(g: WeightedGraph, S: Iterable[int], r: int, eps, E_prime: Iterable[int],
                            ledger: CostLedger | None = None, phase: str = "mod-bfs-sssp",
                            backend: str = "auto", tables: SourceTables | None = None) -> HopDistanceTable:
    """As bfs_based_sssp, plus B(s, u): does the estimation path stay inside E' (base edge ids)?"""
    return _run_table(g, S, r, eps, frozenset(E_prime), ledger, phase, backend, tables)


def modified_hop_bounded_bfs(g_prime: WeightedGraph, s: int, r_prime: int,
                             E_dd: Iterable[tuple[int, int]], ledger: CostLedger | None = None,
                             phase: str = "mod-bfs"):
    """BFS whose messages carry (source id, flag); flag stays true while the path is in E''.

    Returns (dist, B, parent) lists; B[s] is true iff s has an incident edge in E''.
    """
    dd = {(min(a, b), max(a, b)) for a, b in E_dd}
    for a, b in dd:
        if g_prime.edge_id(a, b) is None:
            raise GraphError(f"({a}, {b}) is not an edge of the graph")
    net = SyncNetwork(g_prime, ledger, phase)
    res = _bfs_rounds(g_prime, s, r_prime, net, lambda x, y: (min(x, y), max(x, y)) in dd)
    net.close()
    return res.dist, res.flag, res.parent
