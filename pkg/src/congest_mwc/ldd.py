"""Low-diameter decomposition with exponential start-time shifts.

Every source u starts a shortest-path wavefront at time X - delta_u; each node joins the
first wavefront to arrive. Ties are broken exactly by a lexicographic label
(arrival time, sum of random edge keys along the path, centre id), which plays the role
of the infinitesimal edge perturbation and of the centre-id encoding on the super-source
edges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

from . import kernels
from .graph import INF, CycleRecord, WeightedGraph, dijkstra

# keys stay below 2^40 so that path sums over up to 2^23 edges fit in int64
KEY_BITS = 40


def sample_exponential(beta: float, rng: np.random.Generator) -> float:
    """Inverse-CDF draw -ln(U)/beta with U uniform on (0, 1]."""
    if not beta > 0:
        raise ValueError("rate must be positive")
    u = 1.0 - rng.random()
    return -math.log(u) / beta


def sample_exponentials(beta: float, size, rng: np.random.Generator) -> np.ndarray:
    if not beta > 0:
        raise ValueError("rate must be positive")
    return -np.log1p(-rng.random(size)) / beta


def max_secondmax_gap_stat(m: int, beta: float, offsets: Iterable[float], c: float, trials: int,
                           rng: np.random.Generator) -> float:
    """Monte-Carlo estimate of Pr[Y_(m) - Y_(m-1) >= c] for Y_i = delta_i - offsets_i."""
    if m < 2:
        raise ValueError("need at least two variables")
    if trials < 10_000:
        raise ValueError("use at least 10^4 trials")
    offsets = np.asarray(list(offsets), dtype=np.float64)
    if offsets.shape != (m,):
        raise ValueError(f"expected {m} offsets")
    y = sample_exponentials(beta, (trials, m), rng) - offsets
    top2 = np.partition(y, m - 2, axis=1)[:, m - 2:]
    gap = top2.max(axis=1) - top2.min(axis=1)
    return float(np.mean(gap >= c))


def shift_rate(s_count: int, k: float, d) -> float:
    """beta = ln|S| / (k d); a lone source has nothing to compete with and gets a zero shift."""
    if s_count == 1:
        return math.inf
    return math.log(s_count) / (k * float(d))


def eps1(k: float, s_count: int) -> float:
    """epsilon_1^S = (k / (k + 1)) / ln|S|."""
    if s_count <= 1:
        return math.inf
    return k / (k + 1) / math.log(s_count)


@dataclass(frozen=True)
class ShiftAssignment:
    sources: tuple[int, ...]
    delta: tuple[float, ...]
    beta: float
    X: float
    failed: bool

    @property
    def start_times(self) -> dict[int, float]:
        return {u: self.X - dl for u, dl in zip(self.sources, self.delta)}


def sample_shifts(S: Iterable[int], k: float, d, rng: np.random.Generator) -> ShiftAssignment:
    sources = tuple(sorted(set(S)))
    if not sources:
        raise ValueError("source set must be nonempty")
    if not (k > 0 and d > 0):
        raise ValueError("k and d must be positive")
    beta = shift_rate(len(sources), k, d)
    X = 100 * k * float(d)
    if math.isinf(beta):
        delta = np.zeros(1)
    else:
        delta = sample_exponentials(beta, len(sources), rng)
    return ShiftAssignment(sources, tuple(delta.tolist()), beta, X, bool((delta >= X).any()))


@dataclass(frozen=True)
class Perturbation:
    """Random secondary keys: one per edge and one per super-source edge (per node)."""

    edge_keys: np.ndarray
    node_keys: np.ndarray

    @classmethod
    def random(cls, g: WeightedGraph, rng: np.random.Generator) -> "Perturbation":
        hi = 1 << KEY_BITS
        return cls(rng.integers(1, hi, g.m, dtype=np.int64), rng.integers(1, hi, g.n, dtype=np.int64))

    @classmethod
    def zero(cls, g: WeightedGraph) -> "Perturbation":
        return cls(np.zeros(g.m, dtype=np.int64), np.zeros(g.n, dtype=np.int64))


@dataclass
class ClusterForest:
    """Per-node centre, distance from centre, and tree parent (-1 marks none)."""

    g: WeightedGraph
    center: np.ndarray
    dist: np.ndarray
    parent: np.ndarray
    parent_edge: np.ndarray
    shifts: ShiftAssignment | None = None

    def cluster_of(self, v: int) -> int | None:
        c = int(self.center[v])
        return None if c < 0 else c

    @cached_property
    def children(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.g.n)]
        for v, p in enumerate(self.parent.tolist()):
            if p >= 0:
                out[p].append(v)
        return out

    @cached_property
    def clusters(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for v, c in enumerate(self.center.tolist()):
            if c >= 0:
                out.setdefault(c, []).append(v)
        return out

    @cached_property
    def tree_edges(self) -> frozenset[int]:
        return frozenset(int(e) for e in self.parent_edge if e >= 0)

    def path_to_center(self, v: int) -> list[int]:
        out = [v]
        while self.parent[out[-1]] >= 0:
            out.append(int(self.parent[out[-1]]))
        return out

    @property
    def radius(self) -> int:
        reached = self.dist[self.center >= 0]
        return int(reached.max()) if reached.size else 0


class LddFailure:
    """Some shift reached the cutoff X; the decomposition is not produced."""

    def __init__(self, shifts: ShiftAssignment):
        self.shifts = shifts

    def __bool__(self) -> bool:
        return False

    def __repr__(self) -> str:
        return f"LddFailure(max delta={max(self.shifts.delta):.4g} >= X={self.shifts.X:.4g})"


def _forest(g: WeightedGraph, sources: list[int], start: list[float], perturbation: Perturbation,
            shifts: ShiftAssignment | None = None) -> ClusterForest:
    c = g.csr
    arc_pert = perturbation.edge_keys[c.eid]
    src = np.asarray(sources, dtype=np.int32)
    center, dist, _, parent, parc = kernels.lex_dijkstra(
        c.indptr, c.nbr, c.weight, arc_pert, c.src.astype(np.int64), src,
        np.asarray(start, dtype=np.float64), perturbation.node_keys[src])
    parent_edge = np.where(parc >= 0, c.eid[np.maximum(parc, 0)], -1)
    return ClusterForest(g, center, dist, parent, parent_edge, shifts)


def mssp_tree(g: WeightedGraph, S: Iterable[int], start_times: Mapping[int, float],
              perturbation: Perturbation | None = None) -> ClusterForest:
    """Forest grown from a virtual super source whose edge to u carries (start_u, key_u, u)."""
    if g.directed:
        raise ValueError("forests are built on undirected graphs")
    sources = sorted(set(S))
    if not sources:
        raise ValueError("source set must be nonempty")
    start = [float(start_times[u]) for u in sources]
    if min(start) < 0:
        raise ValueError("start times must be nonnegative")
    return _forest(g, sources, start, perturbation or Perturbation.zero(g))


def sssp_tree(g: WeightedGraph, s: int, perturbation: Perturbation) -> ClusterForest:
    """The unique shortest-path tree from s under the perturbation order."""
    return mssp_tree(g, [s], {s: 0.0}, perturbation)


def ldd(g: WeightedGraph, S: Iterable[int], k: float, d, rng: np.random.Generator,
        perturbation: Perturbation | None = None) -> ClusterForest | LddFailure:
    shifts = sample_shifts(S, k, d, rng)
    if perturbation is None:
        perturbation = Perturbation.random(g, rng)
    if shifts.failed:
        return LddFailure(shifts)
    forest = mssp_tree(g, shifts.sources, shifts.start_times, perturbation)
    forest.shifts = shifts
    return forest


def check_ldd_properties(forest: ClusterForest | LddFailure, g: WeightedGraph, C_star: CycleRecord,
                         S: Iterable[int], k: float, d, dist_from=None) -> tuple[bool, bool]:
    """Properties I and II of a (k, d)-decomposition with respect to the cycle C_star.

    ``dist_from(c)`` may supply exact distances from c (defaults to Dijkstra).
    """
    S = set(S)
    s_star = sorted(set(C_star.nodes) & S)
    if not s_star:
        raise ValueError("the cycle contains no source")
    if not forest:
        return False, False
    bound = (1 + eps1(k, len(S))) * (k + 1) * d
    centers = forest.center
    prop1 = all(centers[u] >= 0 and forest.dist[u] <= bound for u in S)
    cs = {int(centers[u]) for u in s_star}
    prop2 = False
    if len(cs) == 1 and -1 not in cs:
        c = cs.pop()
        dist = dist_from(c) if dist_from is not None else dijkstra(g, c)[0]
        to_cycle = min(dist[u] for u in s_star)
        prop2 = to_cycle != INF and to_cycle + d <= bound
    return prop1, prop2


@dataclass
class LddBatch:
    """Several independent decompositions of one graph, one row per distance scale d."""

    sources: np.ndarray
    X: np.ndarray
    delta: np.ndarray
    failed: np.ndarray
    center: np.ndarray
    dist: np.ndarray
    parent: np.ndarray
    parent_edge: np.ndarray

    def forest(self, row: int, g: WeightedGraph) -> ClusterForest:
        return ClusterForest(g, self.center[row], self.dist[row], self.parent[row], self.parent_edge[row])


def ldd_batch(g: WeightedGraph, S: Iterable[int], k: float, ds, rng: np.random.Generator,
              arc_len: np.ndarray | None = None, arc_tie: np.ndarray | None = None,
              perturbation: Perturbation | None = None) -> LddBatch:
    """One ldd per entry of ``ds`` with fresh shifts; rows share one perturbation.

    ``arc_len``/``arc_tie`` (rows x arcs) replace the base weights, which is how the
    decomposition of a subdivided graph is run without materialising it.
    """
    sources = np.asarray(sorted(set(S)), dtype=np.int32)
    if sources.size == 0:
        raise ValueError("source set must be nonempty")
    c = g.csr
    ds = [float(d) for d in ds]
    rows = len(ds)
    X = 100 * k * np.asarray(ds)
    if sources.size == 1:
        delta = np.zeros((rows, 1))
    else:
        beta = np.asarray([shift_rate(sources.size, k, d) for d in ds])
        delta = -np.log1p(-rng.random((rows, sources.size))) / beta[:, None]
    failed = (delta >= X[:, None]).any(axis=1)
    if perturbation is None:
        perturbation = Perturbation.random(g, rng)
    if arc_len is None:
        arc_len = np.broadcast_to(c.weight, (rows, c.arcs))
    if arc_tie is None:
        arc_tie = np.broadcast_to(c.src.astype(np.int64), (rows, c.arcs))
    center, dist, _, parent, parc = kernels.lex_dijkstra_sweep(
        c.indptr, c.nbr, np.ascontiguousarray(arc_len), perturbation.edge_keys[c.eid],
        np.ascontiguousarray(arc_tie), sources, X[:, None] - delta, perturbation.node_keys[sources])
    parent_edge = np.where(parc >= 0, c.eid[np.maximum(parc, 0)], -1)
    return LddBatch(sources, X, delta, failed, center, dist, parent, parent_edge)
