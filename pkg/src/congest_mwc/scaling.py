"""Subdivide weighted graphs into unit-edge graphs and map paths between the two."""

from __future__ import annotations

import bisect
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .graph import GraphError, PathRecord, WeightedGraph


def as_rational(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, float, str)):
        return Fraction(x)
    raise TypeError(f"cannot read {x!r} as a rational")


def ceil_div_rational(w: int, gamma: Fraction) -> int:
    """ceil(w / gamma) in exact arithmetic."""
    return -((-w * gamma.denominator) // gamma.numerator)


def scaled_lengths(g: WeightedGraph, gamma) -> np.ndarray:
    """Per-edge subdivision lengths max(1, ceil(w/gamma)) as int64."""
    gamma = as_rational(gamma)
    if gamma <= 0:
        raise ValueError("scaling factor must be positive")
    p, q = gamma.numerator, gamma.denominator
    out = np.empty(g.m, dtype=np.int64)
    for i, (_, _, w) in enumerate(g.edges):
        out[i] = max(1, -((-w * q) // p))
    return out


class ScaledGraph:
    """Unit-weight subdivision G' of a base graph.

    Base nodes keep their ids. The internal nodes of edge i's path get the contiguous
    ids ``offsets[i] .. offsets[i] + lengths[i] - 2``, ordered from the edge's first
    endpoint towards its second.
    """

    def __init__(self, base: WeightedGraph, gamma: Fraction, lengths: np.ndarray):
        self.base = base
        self.gamma = gamma
        self.lengths = tuple(int(x) for x in lengths)
        offsets, nxt = [], base.n
        for length in self.lengths:
            offsets.append(nxt)
            nxt += length - 1
        self.offsets = tuple(offsets)
        self.node_count = nxt

    def edge_path(self, i: int) -> list[int]:
        u, v, _ = self.base.edges[i]
        start = self.offsets[i]
        return [u, *range(start, start + self.lengths[i] - 1), v]

    def owner(self, node: int) -> tuple[int, int] | None:
        """(base edge, 1-based position along its path) for a subdivision node, else None."""
        if node < self.base.n:
            return None
        if not self.base.n <= node < self.node_count:
            raise GraphError(f"node {node} not in scaled graph")
        i = bisect.bisect_right(self.offsets, node) - 1
        while self.lengths[i] == 1:
            i -= 1
        return i, node - self.offsets[i] + 1

    def scaled_edges(self, edge_ids: Iterable[int]) -> set[tuple[int, int]]:
        """Image in G' of a set of base edges, as normalised node pairs."""
        out = set()
        for i in edge_ids:
            path = self.edge_path(i)
            out.update((min(a, b), max(a, b)) for a, b in zip(path, path[1:]))
        return out

    @cached_property
    def graph(self) -> WeightedGraph:
        edges = []
        for i in range(self.base.m):
            path = self.edge_path(i)
            edges.extend((a, b, 1) for a, b in zip(path, path[1:]))
        return WeightedGraph(self.node_count, edges)


def graph_scaling(g: WeightedGraph, gamma) -> ScaledGraph:
    if g.directed:
        raise GraphError("scaling is defined for undirected graphs")
    gamma = as_rational(gamma)
    return ScaledGraph(g, gamma, scaled_lengths(g, gamma))


def lift_path(sg: ScaledGraph, base_path: PathRecord | Sequence[int]) -> int:
    """Length in G' of the image of a base path."""
    nodes = base_path.nodes if isinstance(base_path, PathRecord) else tuple(base_path)
    total = 0
    for a, b in zip(nodes, nodes[1:]):
        i = sg.base.edge_id(a, b)
        if i is None:
            raise GraphError(f"edge ({a}, {b}) is not in the base graph")
        total += sg.lengths[i]
    return total


def lift_nodes(sg: ScaledGraph, nodes: Sequence[int]) -> list[int]:
    """Node sequence in G' of the image of a base path."""
    out = [nodes[0]]
    for a, b in zip(nodes, nodes[1:]):
        i = sg.base.edge_id(a, b)
        if i is None:
            raise GraphError(f"edge ({a}, {b}) is not in the base graph")
        path = sg.edge_path(i)
        if path[0] != a:
            path.reverse()
        out.extend(path[1:])
    return out


def prescale_path(sg: ScaledGraph, scaled_path: Sequence[int]) -> PathRecord:
    """The base path whose image is ``scaled_path``."""
    n = sg.base.n
    nodes = list(scaled_path)
    if not nodes or nodes[0] >= n or nodes[-1] >= n:
        raise GraphError("scaled path must start and end at base nodes")
    out = [nodes[0]]
    pos = 0
    while pos < len(nodes) - 1:
        a = nodes[pos]
        nxt = nodes[pos + 1]
        if nxt < n:
            i = sg.base.edge_id(a, nxt)
            if i is None or sg.lengths[i] != 1:
                raise GraphError(f"({a}, {nxt}) is not a unit edge of the scaled graph")
            out.append(nxt)
            pos += 1
            continue
        i, _ = sg.owner(nxt)
        path = sg.edge_path(i)
        if path[0] != a:
            path.reverse()
        if path[0] != a:
            raise GraphError(f"node {nxt} is not adjacent to {a}")
        segment = nodes[pos:pos + len(path)]
        if segment != path:
            raise GraphError(f"scaled path leaves the subdivision of base edge {i} part way")
        out.append(path[-1])
        pos += len(path) - 1
    return sg.base.path_record(out)
