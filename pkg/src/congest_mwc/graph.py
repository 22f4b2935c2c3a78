"""Weighted graphs, exact shortest paths and exact minimum-weight-cycle oracles."""

from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

INF = math.inf
MAX_WEIGHT = (1 << 63) - 1


class GraphError(ValueError):
    """Raised when a graph violates a structural invariant."""


class ParseError(GraphError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class PathRecord:
    nodes: tuple[int, ...]
    weight: int
    hops: int


@dataclass(frozen=True)
class CycleRecord:
    nodes: tuple[int, ...]
    weight: int
    hops: int


class WeightedGraph:
    """Simple graph on nodes 0..n-1 with integer edge weights.

    ``allow_zero`` admits weight-0 edges (used by lower-bound instances);
    otherwise every weight must lie in [1, 2^63 - 1].
    """

    def __init__(self, n: int, edges: Iterable[Sequence[int]], directed: bool = False,
                 allow_zero: bool = False):
        if n < 0:
            raise GraphError("node count must be nonnegative")
        self.n = n
        self.directed = directed
        self.allow_zero = allow_zero
        lo = 0 if allow_zero else 1
        seen: dict[tuple[int, int], int] = {}
        clean = []
        for e in edges:
            u, v, w = (int(x) for x in e)
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge {(u, v, w)}: node id out of range 0..{n - 1}")
            if u == v:
                raise GraphError(f"edge {(u, v, w)}: self-loop")
            if not lo <= w <= MAX_WEIGHT:
                raise GraphError(f"edge {(u, v, w)}: weight must be in [{lo}, 2^63-1]")
            key = (u, v) if directed else (min(u, v), max(u, v))
            if key in seen:
                raise GraphError(f"edge {(u, v, w)}: parallel edge")
            seen[key] = len(clean)
            clean.append((u, v, w))
        self.edges: tuple[tuple[int, int, int], ...] = tuple(clean)
        self._index = seen
        self.W = max((w for _, _, w in clean), default=0)
        adj: list[list[tuple[int, int, int]]] = [[] for _ in range(n)]
        for i, (u, v, w) in enumerate(clean):
            adj[u].append((v, w, i))
            if not directed:
                adj[v].append((u, w, i))
        self.adj = adj

    @property
    def m(self) -> int:
        return len(self.edges)

    def edge_id(self, u: int, v: int) -> int | None:
        key = (u, v) if self.directed else (min(u, v), max(u, v))
        return self._index.get(key)

    def weight(self, u: int, v: int) -> int:
        i = self.edge_id(u, v)
        if i is None:
            raise GraphError(f"no edge ({u}, {v})")
        return self.edges[i][2]

    def neighbors(self, u: int) -> list[int]:
        return [v for v, _, _ in self.adj[u]]

    @cached_property
    def csr(self) -> "Csr":
        return Csr.build(self)

    def path_record(self, nodes: Sequence[int]) -> PathRecord:
        nodes = tuple(nodes)
        weight = sum(self.weight(a, b) for a, b in zip(nodes, nodes[1:]))
        return PathRecord(nodes, weight, len(nodes) - 1)

    def cycle_record(self, nodes: Sequence[int]) -> CycleRecord:
        nodes = tuple(nodes)
        if len(nodes) < 2 or nodes[0] != nodes[-1]:
            raise GraphError("a cycle must be closed")
        minimum = 2 if self.directed else 3
        if len(nodes) - 1 < minimum or len(set(nodes[:-1])) != len(nodes) - 1:
            raise GraphError(f"{nodes} is not a simple cycle")
        weight = sum(self.weight(a, b) for a, b in zip(nodes, nodes[1:]))
        return CycleRecord(nodes, weight, len(nodes) - 1)

    def to_text(self) -> str:
        lines = [f"{self.n} {self.m} {'directed' if self.directed else 'undirected'}"]
        lines += [f"{u} {v} {w}" for u, v, w in self.edges]
        return "\n".join(lines) + "\n"

    def __repr__(self) -> str:
        kind = "directed" if self.directed else "undirected"
        return f"WeightedGraph(n={self.n}, m={self.m}, {kind}, W={self.W})"


@dataclass(frozen=True)
class Csr:
    """Arc arrays: arc a runs src[a] -> nbr[a] along base edge eid[a]."""

    indptr: np.ndarray
    nbr: np.ndarray
    src: np.ndarray
    eid: np.ndarray
    weight: np.ndarray

    @classmethod
    def build(cls, g: WeightedGraph) -> "Csr":
        indptr = np.zeros(g.n + 1, dtype=np.int64)
        nbr, src, eid, wt = [], [], [], []
        for u in range(g.n):
            for v, w, i in g.adj[u]:
                nbr.append(v)
                src.append(u)
                eid.append(i)
                wt.append(w)
            indptr[u + 1] = len(nbr)
        return cls(indptr, np.asarray(nbr, dtype=np.int32), np.asarray(src, dtype=np.int32),
                   np.asarray(eid, dtype=np.int64), np.asarray(wt, dtype=np.int64))

    @property
    def arcs(self) -> int:
        return len(self.nbr)


def load_graph(document: str, allow_zero: bool = False) -> WeightedGraph:
    """Parse the edge-list format: header ``n m directed|undirected`` then ``u v w`` lines."""
    rows = [(no, line.split()) for no, line in enumerate(document.splitlines(), 1)]
    rows = [(no, parts) for no, parts in rows if parts and not parts[0].startswith("#")]
    if not rows:
        raise ParseError(1, "missing header")
    no, head = rows[0]
    if len(head) != 3 or head[2] not in ("directed", "undirected"):
        raise ParseError(no, "header must be 'n m directed|undirected'")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError:
        raise ParseError(no, "header counts must be integers") from None
    body = rows[1:]
    if len(body) != m:
        raise ParseError(body[-1][0] if body else no, f"header declares {m} edges, found {len(body)}")
    edges = []
    for no, parts in body:
        if len(parts) != 3:
            raise ParseError(no, "edge line must be 'u v w'")
        try:
            edges.append(tuple(int(x) for x in parts))
        except ValueError:
            raise ParseError(no, "edge fields must be integers") from None
    try:
        return WeightedGraph(n, edges, directed=head[2] == "directed", allow_zero=allow_zero)
    except GraphError as exc:
        raise GraphError(f"invalid graph: {exc}") from None


def dijkstra(g: WeightedGraph, source: int | None = None,
             offsets: Mapping[int, object] | None = None,
             skip_edge: int | None = None) -> tuple[list, list]:
    """Exact single-source distances, or from a virtual super source seeded with ``offsets``.

    Distances keep the numeric type of the offsets (ints or Fractions); unreached nodes get INF.
    """
    if (source is None) == (offsets is None):
        raise ValueError("give exactly one of source or offsets")
    seeds = {source: 0} if offsets is None else dict(offsets)
    dist: list = [INF] * g.n
    parent: list = [None] * g.n
    for u, off in seeds.items():
        if off < 0:
            raise ValueError("offsets must be nonnegative")
        if off < dist[u]:
            dist[u] = off
    heap = [(d, u) for u, d in enumerate(dist) if d != INF]
    heapq.heapify(heap)
    done = [False] * g.n
    while heap:
        du, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for v, w, i in g.adj[u]:
            if i == skip_edge:
                continue
            nd = du + w
            if nd < dist[v]:
                dist[v] = nd
                parent[v] = u
                heapq.heappush(heap, (nd, v))
    return dist, parent


def _pruned_distance(g: WeightedGraph, s: int, t: int, skip_edge: int, limit) -> object:
    """dist(s, t) in g minus one edge, or INF when it is at least ``limit``."""
    dist = {s: 0}
    heap = [(0, s)]
    done = set()
    while heap:
        du, u = heapq.heappop(heap)
        if du >= limit:
            return INF
        if u == t:
            return du
        if u in done:
            continue
        done.add(u)
        for v, w, i in g.adj[u]:
            if i == skip_edge:
                continue
            nd = du + w
            if nd < dist.get(v, INF):
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return INF


def exact_min_cycle(g: WeightedGraph) -> CycleRecord | None:
    """A minimum-weight cycle, or None when g is acyclic."""
    best, arg = INF, None
    if g.directed:
        into: list[list[tuple[int, int]]] = [[] for _ in range(g.n)]
        for u, v, w in g.edges:
            into[v].append((u, w))
        for v in range(g.n):
            if not into[v] or not g.adj[v]:
                continue
            dist, parent = dijkstra(g, v)
            for a, w in into[v]:
                if dist[a] + w < best:
                    best, arg = dist[a] + w, (v, a, parent)
        if arg is None:
            return None
        v, a, parent = arg
        walk = [a]
        while walk[-1] != v:
            walk.append(parent[walk[-1]])
        return g.cycle_record(walk[::-1] + [v])
    for i, (u, v, w) in enumerate(g.edges):
        if w >= best:
            continue
        d = _pruned_distance(g, u, v, i, best - w)
        if d + w < best:
            best, arg = d + w, i
    if arg is None:
        return None
    u, v, w = g.edges[arg]
    _, parent = dijkstra(g, u, skip_edge=arg)
    walk = [v]
    while walk[-1] != u:
        walk.append(parent[walk[-1]])
    return g.cycle_record(walk[::-1] + [u])


def exact_mwc(g: WeightedGraph):
    """Minimum cycle weight w*, or None when g is acyclic."""
    c = exact_min_cycle(g)
    return None if c is None else c.weight


def enumerate_cycles_bruteforce(g: WeightedGraph, cap: int = 12):
    """Minimum simple-cycle weight by exhaustive DFS enumeration (bounded by the best so far)."""
    if g.n > cap:
        raise GraphError(f"brute-force enumeration capped at {cap} nodes, got {g.n}")
    best = INF
    shortest = 2 if g.directed else 3
    out = [[(v, w) for v, w, _ in g.adj[u]] for u in range(g.n)]

    def extend(start: int, u: int, weight, length: int, on_path: set) -> None:
        nonlocal best
        for v, w in out[u]:
            total = weight + w
            if total >= best:
                continue
            if v == start:
                if length + 1 >= shortest:
                    best = total
            elif v > start and v not in on_path:
                on_path.add(v)
                extend(start, v, total, length + 1, on_path)
                on_path.discard(v)

    for s in range(g.n):
        extend(s, s, 0, 0, {s})
    return None if best == INF else best


def girth_unweighted(g: WeightedGraph) -> int | None:
    """Minimum cycle hop count, ignoring weights; None when acyclic."""
    best = INF
    for s in range(g.n):
        dist = [-1] * g.n
        via = [-1] * g.n
        dist[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            if 2 * dist[u] + 1 >= best:
                break
            for v, _, i in g.adj[u]:
                if g.directed:
                    if v == s:
                        best = min(best, dist[u] + 1)
                    elif dist[v] < 0:
                        dist[v] = dist[u] + 1
                        queue.append(v)
                elif dist[v] < 0:
                    dist[v] = dist[u] + 1
                    via[v] = i
                    queue.append(v)
                elif via[u] != i:
                    best = min(best, dist[u] + dist[v] + 1)
    return None if best == INF else int(best)


def hop_diameter(g: WeightedGraph) -> int | None:
    """Unweighted diameter of the underlying undirected graph; None if disconnected."""
    und = [set() for _ in range(g.n)]
    for u, v, _ in g.edges:
        und[u].add(v)
        und[v].add(u)
    worst = 0
    for s in range(g.n):
        dist = {s: 0}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v in und[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        if len(dist) < g.n:
            return None
        worst = max(worst, max(dist.values()))
    return worst
