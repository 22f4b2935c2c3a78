"""The two-party lower-bound family G(gamma, k, d, p, H, x, y).

Layout: 2 gamma paths of d^p nodes (P^i carries v^i_j, Q^i carries w^i_j), a d-ary tree of
depth p whose i-th leaf touches the i-th node of every path, and two copies of a
high-girth bipartite graph H joining the path starts (kept where x is 1) and the path
ends (kept where y is 1).
"""

from __future__ import annotations

import heapq
import json
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .graph import INF, WeightedGraph, exact_mwc, girth_unweighted

DIRECTED, WEIGHTED = "directed-unweighted", "undirected-weighted"
VARIANTS = (DIRECTED, WEIGHTED)


@dataclass(frozen=True)
class Bipartite:
    """gamma x gamma bipartite graph; edges (a, b) join left a to right b, sorted lexicographically."""

    gamma: int
    edges: tuple[tuple[int, int], ...]

    @property
    def graph(self) -> WeightedGraph:
        return WeightedGraph(2 * self.gamma, [(a, self.gamma + b, 1) for a, b in self.edges])

    @property
    def girth(self):
        return girth_unweighted(self.graph)


def _hop_distance(adj: list[set], s: int, t: int, limit: int) -> float:
    seen = {s: 0}
    queue = deque([s])
    while queue:
        u = queue.popleft()
        if seen[u] >= limit:
            continue
        for v in adj[u]:
            if v not in seen:
                seen[v] = seen[u] + 1
                if v == t:
                    return seen[v]
                queue.append(v)
    return INF


def gen_high_girth_bipartite(gamma: int, k: int, rng: np.random.Generator | None = None) -> Bipartite:
    """K_{gamma,gamma} for k = 1, else greedy insertion keeping every cycle longer than 2k."""
    if gamma < 1 or k < 1:
        raise ValueError("gamma and k must be positive")
    pairs = [(a, b) for a in range(gamma) for b in range(gamma)]
    if k == 1:
        return Bipartite(gamma, tuple(pairs))
    rng = rng if rng is not None else np.random.default_rng(0)
    adj: list[set] = [set() for _ in range(2 * gamma)]
    kept = []
    for i in rng.permutation(len(pairs)).tolist():
        a, b = pairs[i]
        # the new edge closes a cycle of length dist + 1, which must exceed 2k
        if _hop_distance(adj, a, gamma + b, 2 * k - 1) >= 2 * k:
            adj[a].add(gamma + b)
            adj[gamma + b].add(a)
            kept.append((a, b))
    H = Bipartite(gamma, tuple(sorted(kept)))
    girth = H.girth
    assert girth is None or girth > 2 * k
    return H


def bits_to_hex(bits) -> str:
    bits = [int(b) for b in bits]
    if not bits:
        return "0"
    return format(int("".join(map(str, bits)), 2), "x")


def hex_to_bits(text: str, length: int) -> tuple[int, ...]:
    value = int(text, 16)
    if value >> length:
        raise ValueError(f"{text!r} does not fit in {length} bits")
    return tuple((value >> (length - 1 - i)) & 1 for i in range(length))


@dataclass
class HardInstance:
    graph: WeightedGraph
    gamma: int
    k: int
    d: int
    p: int
    H: Bipartite
    x: tuple[int, ...]
    y: tuple[int, ...]
    variant: str
    paths_P: list[list[int]]
    paths_Q: list[list[int]]
    tree_levels: list[list[int]]
    roles: dict[str, str] = field(repr=False)
    edge_class: list[str] = field(repr=False)

    @property
    def alpha(self) -> int:
        return self.tree_levels[-1][0]

    @property
    def beta(self) -> int:
        return self.tree_levels[-1][-1]

    @property
    def source_sink_pairs(self) -> list[tuple[int, int]]:
        """S(H): (w^b_0, v^a) for every base edge (a, b)."""
        return [(self.paths_Q[b][0], self.paths_P[a][-1]) for a, b in self.H.edges]

    @property
    def intersects(self) -> bool:
        return any(a and b for a, b in zip(self.x, self.y))

    @property
    def expected_nodes(self) -> int:
        d, p = self.d, self.p
        return 2 * self.gamma * d ** p + (d ** (p + 1) - 1) // (d - 1)

    @property
    def stated_diameter(self) -> int:
        return 2 * self.p + 2

    def sidecar(self) -> dict:
        return {
            "variant": self.variant, "gamma": self.gamma, "k": self.k, "d": self.d, "p": self.p,
            "H": [list(e) for e in self.H.edges], "x": bits_to_hex(self.x), "y": bits_to_hex(self.y),
            "bits": len(self.x), "paths_P": self.paths_P, "paths_Q": self.paths_Q,
            "tree_levels": self.tree_levels, "alpha": self.alpha, "beta": self.beta,
            "source_sink_pairs": [list(t) for t in self.source_sink_pairs],
        }

    def export(self) -> tuple[str, str]:
        """(edge-list text, JSON sidecar text)."""
        return self.graph.to_text(), json.dumps(self.sidecar(), indent=1, sort_keys=True) + "\n"


def gen_lower_bound_graph(gamma: int, k: int, d: int, p: int, H: Bipartite, x, y,
                          variant: str = WEIGHTED) -> HardInstance:
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    if d < 2 or p < 1:
        raise ValueError("need d >= 2 and p >= 1")
    if H.gamma != gamma:
        raise ValueError("H must be gamma x gamma")
    x, y = tuple(int(b) for b in x), tuple(int(b) for b in y)
    if len(x) != len(H.edges) or len(y) != len(H.edges):
        raise ValueError(f"x and y need {len(H.edges)} bits, got {len(x)} and {len(y)}")
    span = d ** p
    P = [[i * span + j for j in range(span)] for i in range(gamma)]
    Q = [[(gamma + i) * span + j for j in range(span)] for i in range(gamma)]
    base = 2 * gamma * span
    levels = []
    for t in range(p + 1):
        first = base + (d ** t - 1) // (d - 1)
        levels.append(list(range(first, first + d ** t)))
    n = levels[-1][-1] + 1
    heavy = 4 * n * n
    directed = variant == DIRECTED
    edges: list[tuple[int, int, int]] = []
    cls: list[str] = []

    def add(u, v, kind, w):
        edges.append((u, v, w if not directed else 1))
        cls.append(kind)

    for path in P:
        for a, b in zip(path, path[1:]):
            add(a, b, "path", 0)
    for path in Q:
        for a, b in zip(path, path[1:]):
            add(b, a, "path", 0)
    for t in range(p):
        for i, u in enumerate(levels[t]):
            for c in range(d):
                add(u, levels[t + 1][d * i + c], "tree", heavy)
    for i, leaf in enumerate(levels[-1]):
        for j in range(gamma):
            add(leaf, P[j][i], "leaf", heavy)
            add(leaf, Q[j][i], "leaf", heavy)
    for e, (a, b) in enumerate(H.edges):
        if x[e]:
            add(Q[b][0], P[a][0], "alice", 1)
        if y[e]:
            add(P[a][-1], Q[b][-1], "bob", 1)
    g = WeightedGraph(n, edges, directed=directed, allow_zero=not directed)
    roles = {}
    for i in range(gamma):
        for j in range(span):
            roles[P[i][j]] = f"v[{i}][{j}]"
            roles[Q[i][j]] = f"w[{i}][{j}]"
    for t, level in enumerate(levels):
        for i, u in enumerate(level):
            roles[u] = f"u[{t}][{i}]"
    return HardInstance(g, gamma, k, d, p, H, x, y, variant, P, Q, levels, roles, cls)


@dataclass(frozen=True)
class GapReport:
    mwc: object
    gap_ok: bool
    intersects: bool
    short_cycle: int
    long_cycle: int


def gap_thresholds(inst: HardInstance) -> tuple[int, int]:
    """(cycle weight when x and y intersect, lower bound otherwise).

    A directed path of d^p nodes has d^p - 1 edges, so the shortest directed cycle
    (path, bridge, path, bridge) has 2 d^p edges.
    """
    if inst.variant == DIRECTED:
        short = 2 * inst.d ** inst.p
    else:
        short = 2
    return short, (inst.k + 1) * short


def verify_gap(inst: HardInstance) -> GapReport:
    mwc = exact_mwc(inst.graph)
    short, long = gap_thresholds(inst)
    if inst.intersects:
        ok = mwc == short
    else:
        ok = mwc is None or mwc >= long
    return GapReport(mwc, ok, inst.intersects, short, long)


def tree_edges_on_cycles(inst: HardInstance) -> list[int]:
    """Tree and leaf edges of a directed instance that lie on some directed cycle (should be none)."""
    g = inst.graph
    comp = _scc(g)
    return [i for i, (u, v, _) in enumerate(g.edges)
            if inst.edge_class[i] in ("tree", "leaf") and comp[u] == comp[v]]


def _scc(g: WeightedGraph) -> list[int]:
    """Strongly connected component labels (iterative Tarjan)."""
    n = g.n
    index = [-1] * n
    low = [0] * n
    on = [False] * n
    comp = [-1] * n
    stack: list[int] = []
    counter = 0
    ncomp = 0
    for root in range(n):
        if index[root] >= 0:
            continue
        work = [(root, 0)]
        while work:
            u, i = work.pop()
            if i == 0:
                index[u] = low[u] = counter
                counter += 1
                stack.append(u)
                on[u] = True
            nbrs = g.adj[u]
            if i < len(nbrs):
                work.append((u, i + 1))
                v = nbrs[i][0]
                if index[v] < 0:
                    work.append((v, 0))
                elif on[v]:
                    low[u] = min(low[u], index[v])
                continue
            if low[u] == index[u]:
                while True:
                    v = stack.pop()
                    on[v] = False
                    comp[v] = ncomp
                    if v == u:
                        break
                ncomp += 1
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[u])
    return comp


@dataclass(frozen=True)
class MovingCutAssignment:
    lengths: tuple[Fraction, ...]
    capacity: Fraction
    distance: Fraction
    pair_count: int
    int_lengths: tuple[int, ...]
    int_capacity: int
    int_distance: int
    path_route: int
    tree_bound: Fraction

    @property
    def strict(self) -> bool:
        """Is the capacity strictly below the number of source-sink pairs?"""
        return self.capacity < self.pair_count


def _min_pair_distance(n: int, edges, lengths, pairs) -> object:
    adj: list[list[tuple[int, object]]] = [[] for _ in range(n)]
    for (u, v, _), l in zip(edges, lengths):
        adj[u].append((v, l))
        adj[v].append((u, l))
    sinks: dict[int, set] = {}
    for s, t in pairs:
        sinks.setdefault(s, set()).add(t)
    best = INF
    for s, targets in sinks.items():
        dist = {s: 0}
        heap = [(0, s)]
        done = set()
        left = set(targets)
        while heap and left:
            du, u = heapq.heappop(heap)
            if u in done:
                continue
            if du >= best:
                break
            done.add(u)
            if u in left:
                best = min(best, du)
                left.discard(u)
            for v, l in adj[u]:
                nd = du + l
                if nd < dist.get(v, INF):
                    dist[v] = nd
                    heapq.heappush(heap, (nd, v))
    return best


def moving_cut(inst: HardInstance) -> MovingCutAssignment:
    """Lengths 1 + |E(H)| / (p d^i) on tree edges entering level i, 1 elsewhere (undirected view)."""
    if not (all(inst.x) and all(inst.y)):
        raise ValueError("the moving cut is defined on the all-ones instance")
    m_h = len(inst.H.edges)
    level_of = {u: t for t, level in enumerate(inst.tree_levels) for u in level}
    lengths = []
    for (u, v, _), kind in zip(inst.graph.edges, inst.edge_class):
        if kind == "tree":
            i = level_of[v]
            lengths.append(1 + Fraction(m_h, inst.p * inst.d ** i))
        else:
            lengths.append(Fraction(1))
    ints = [math.ceil(l) for l in lengths]
    pairs = inst.source_sink_pairs
    n = inst.graph.n
    d, p = inst.d, inst.p
    return MovingCutAssignment(
        tuple(lengths), sum(l - 1 for l in lengths), _min_pair_distance(n, inst.graph.edges, lengths, pairs),
        len(pairs), tuple(ints), sum(l - 1 for l in ints), _min_pair_distance(n, inst.graph.edges, ints, pairs),
        d ** p, Fraction(m_h, d * p))
