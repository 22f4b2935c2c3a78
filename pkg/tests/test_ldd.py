import math

import numpy as np
import pytest

from conftest import cycle_graph, random_graph
from oracles import bellman_ford
from congest_mwc.graph import INF, WeightedGraph, dijkstra, exact_min_cycle
from congest_mwc.ldd import (LddFailure, Perturbation, check_ldd_properties, eps1, ldd, ldd_batch,
                             max_secondmax_gap_stat, mssp_tree, sample_exponential, sample_exponentials,
                             sample_shifts, shift_rate, sssp_tree)


class FixedUniform:
    """Stands in for a Generator whose uniforms are all ``value``."""

    def __init__(self, value):
        self.value = value

    def random(self, size=None):
        return self.value if size is None else np.full(size, self.value)


def test_exponential_moments():
    rng = np.random.default_rng(1)
    draws = np.array([sample_exponential(2.0, rng) for _ in range(100_000)])
    assert abs(draws.mean() - 0.5) <= 0.01
    assert abs(np.mean(draws <= math.log(2) / 2) - 0.5) <= 0.01
    assert sample_exponential(3.0, FixedUniform(0.0)) == 0.0
    for beta in (0, -1.5):
        with pytest.raises(ValueError):
            sample_exponential(beta, rng)
        with pytest.raises(ValueError):
            sample_exponentials(beta, 3, rng)


def test_gap_statistic():
    rng = np.random.default_rng(2)
    assert abs(max_secondmax_gap_stat(10, 1.0, [0] * 10, math.log(2), 40_000, rng) - 0.5) <= 0.02
    assert max_secondmax_gap_stat(10, 1.0, [0] * 10, 0.0, 10_000, rng) == 1.0
    offsets = rng.random(10) * 3
    assert max_secondmax_gap_stat(10, 1.0, offsets, math.log(2), 40_000, rng) >= 0.48
    with pytest.raises(ValueError):
        max_secondmax_gap_stat(1, 1.0, [0], 1.0, 10_000, rng)
    with pytest.raises(ValueError):
        max_secondmax_gap_stat(3, 1.0, [0, 0, 0], 1.0, 100, rng)
    with pytest.raises(ValueError):
        max_secondmax_gap_stat(3, 1.0, [0, 0], 1.0, 10_000, rng)


def test_shift_parameters():
    assert shift_rate(8, 2, 3) == pytest.approx(math.log(8) / 6)
    assert shift_rate(1, 2, 3) == math.inf
    assert eps1(1, math.e ** 2) == pytest.approx(0.25)
    sh = sample_shifts([5, 2, 2, 9], 1.5, 4, np.random.default_rng(0))
    assert sh.sources == (2, 5, 9) and sh.X == 600
    assert not sh.failed and all(x >= 0 for x in sh.delta)
    assert sample_shifts([3], 1, 1, np.random.default_rng(0)).delta == (0.0,)
    with pytest.raises(ValueError):
        sample_shifts([], 1, 1, np.random.default_rng(0))
    with pytest.raises(ValueError):
        sample_shifts([1], 0, 1, np.random.default_rng(0))


def test_failure_is_reported():
    g = cycle_graph(5)
    with np.errstate(divide="ignore"):
        res = ldd(g, [0, 2], 1, 2, FixedUniform(1.0), Perturbation.zero(g))
    assert isinstance(res, LddFailure) and not res
    assert check_ldd_properties(res, g, exact_min_cycle(g), [0, 2], 1, 2) == (False, False)


def _lex_oracle(g, starts, pert):
    """Per node the lexicographically least (arrival, key sum, centre) over all sources."""
    best = [None] * g.n
    for u, t in starts.items():
        dist = bellman_ford(g.n, g.edges, {u: 0})
        # least perturbation sum among shortest paths, via relaxation restricted to tight edges
        key = [INF] * g.n
        key[u] = int(pert.node_keys[u])
        for _ in range(g.n):
            for i, (a, b, w) in enumerate(g.edges):
                for x, y in ((a, b), (b, a)):
                    if dist[x] + w == dist[y] and key[x] + int(pert.edge_keys[i]) < key[y]:
                        key[y] = key[x] + int(pert.edge_keys[i])
        for v in range(g.n):
            if dist[v] != INF:
                label = (t + float(dist[v]), key[v], u)
                if best[v] is None or label < best[v]:
                    best[v] = label
    return best


def test_mssp_matches_arrival_oracle(rng):
    for trial in range(60):
        g = random_graph(rng, int(rng.integers(2, 14)), W=int(rng.integers(1, 5)))
        S = sorted(rng.choice(g.n, min(g.n, 4), replace=False).tolist())
        starts = {u: float(rng.integers(0, 4)) for u in S}
        pert = Perturbation.random(g, rng) if trial % 2 else Perturbation.zero(g)
        forest = mssp_tree(g, S, starts, pert)
        for v, label in enumerate(_lex_oracle(g, starts, pert)):
            if label is None:
                assert forest.cluster_of(v) is None
                continue
            assert forest.cluster_of(v) == label[2]
            assert starts[label[2]] + forest.dist[v] == label[0]


def test_forest_invariants(rng):
    for _ in range(40):
        g = random_graph(rng, 18, W=7)
        res = ldd(g, rng.choice(18, 5, replace=False).tolist(), 1.5, 4, rng)
        for c, members in res.clusters.items():
            assert c in members and res.cluster_of(c) == c
        for v in range(g.n):
            if res.cluster_of(v) is None:
                continue
            chain = res.path_to_center(v)
            assert chain[-1] == res.cluster_of(v)
            for a, b in zip(chain, chain[1:]):
                assert res.dist[a] - res.dist[b] == g.weight(a, b)
                assert a in res.children[b]


def test_singleton_source_is_dijkstra(rng):
    for _ in range(30):
        g = random_graph(rng, 15, W=9)
        s = int(rng.integers(0, g.n))
        res = ldd(g, [s], 2, 3, rng)
        ref = dijkstra(g, s)[0]
        for v in range(g.n):
            if ref[v] == INF:
                assert res.cluster_of(v) is None
            else:
                assert res.cluster_of(v) == s and res.dist[v] == ref[v]


def test_dominant_shift_takes_everything():
    g = WeightedGraph(6, [(i, i + 1, 3) for i in range(5)])
    forest = mssp_tree(g, [0, 5], {0: 0.0, 5: 16.0})
    assert set(forest.center.tolist()) == {0}
    split = mssp_tree(WeightedGraph(4, [(0, 1, 1), (2, 3, 1)]), [0, 2], {0: 0.0, 2: 0.0})
    assert split.center.tolist() == [0, 0, 2, 2]


def test_sssp_tree_unique_and_repeatable():
    path = WeightedGraph(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1)])
    assert sssp_tree(path, 0, Perturbation.zero(path)).parent.tolist() == [-1, 0, 1, 2]
    c4 = cycle_graph(4)
    parents = {int(sssp_tree(c4, 0, Perturbation.random(c4, np.random.default_rng(9))).parent[2])
               for _ in range(5)}
    assert len(parents) == 1 and parents <= {1, 3}
    seen = {int(sssp_tree(c4, 0, Perturbation.random(c4, np.random.default_rng(s))).parent[2])
            for s in range(40)}
    assert seen == {1, 3}


def test_sssp_tree_paths_are_shortest(rng):
    for _ in range(40):
        g = random_graph(rng, 16, W=12)
        tree = sssp_tree(g, 0, Perturbation.random(g, rng))
        ref = dijkstra(g, 0)[0]
        for v in range(g.n):
            if ref[v] == INF:
                continue
            chain = tree.path_to_center(v)
            assert sum(g.weight(a, b) for a, b in zip(chain, chain[1:])) == ref[v]


def test_property_checker_examples():
    g = cycle_graph(6)
    C = exact_min_cycle(g)
    whole = ldd(g, [0], 1, 3, np.random.default_rng(0))
    assert check_ldd_properties(whole, g, C, [0], 1, 3) == (True, True)
    split = mssp_tree(g, [0, 3], {0: 0.0, 3: 0.0})
    p1, p2 = check_ldd_properties(split, g, C, [0, 3], 1, 3)
    assert p1 and not p2
    with pytest.raises(ValueError):
        check_ldd_properties(split, g, g.cycle_record([0, 1, 2, 3, 4, 5]), [], 1, 3)


def test_radius_within_max_shift(rng):
    for _ in range(200):
        g = random_graph(rng, 20, W=10)
        S = rng.choice(20, int(rng.integers(1, 8)), replace=False).tolist()
        res = ldd(g, S, float(rng.uniform(0.5, 3)), float(rng.uniform(1, 20)), rng)
        if res:
            top = max(res.shifts.delta)
            assert all(res.dist[u] <= top for u in S)


def test_radius_within_max_shift_when_every_node_is_a_source(rng):
    for _ in range(100):
        g = random_graph(rng, 20, W=10)
        res = ldd(g, range(20), float(rng.uniform(0.5, 3)), float(rng.uniform(1, 20)), rng)
        if res:
            assert res.radius <= max(res.shifts.delta)


def test_batch_rows_match_single_runs(rng):
    g = random_graph(rng, 25, W=6)
    S = [1, 4, 9, 16]
    pert = Perturbation.random(g, rng)
    batch = ldd_batch(g, S, 1.5, [1, 2.5, 7], rng, perturbation=pert)
    assert batch.X.tolist() == [150, 375, 1050]
    for row in range(3):
        starts = {u: batch.X[row] - batch.delta[row, i] for i, u in enumerate(S)}
        ref = mssp_tree(g, S, starts, pert)
        got = batch.forest(row, g)
        np.testing.assert_array_equal(got.center, ref.center)
        np.testing.assert_array_equal(got.dist, ref.dist)
        np.testing.assert_array_equal(got.parent, ref.parent)
    single = ldd_batch(g, [3], 1, [2, 4], rng)
    assert (single.delta == 0).all() and not single.failed.any()
