import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import cycle_graph, random_graph
from oracles import bellman_ford, min_cycle_networkx
from congest_mwc.graph import (INF, GraphError, ParseError, WeightedGraph, dijkstra, enumerate_cycles_bruteforce,
                               exact_min_cycle, exact_mwc, girth_unweighted, hop_diameter, load_graph)


def test_load_triangle():
    g = load_graph("3 3 undirected\n0 1 1\n1 2 1\n2 0 1\n")
    assert (g.n, g.m, g.W, g.directed) == (3, 3, 1, False)
    assert exact_mwc(g) == 3


def test_load_forest_has_no_cycle():
    g = load_graph("2 1 undirected\n0 1 5\n")
    assert exact_mwc(g) is None


def test_load_comments_and_directed():
    g = load_graph("# comment\n2 2 directed\n0 1 2\n1 0 3\n")
    assert g.directed and exact_mwc(g) == 5


@pytest.mark.parametrize("text, line", [
    ("3 3 undirected\n0 1 1\n1 2 1\n", 3),
    ("3 1 sideways\n0 1 1\n", 1),
    ("3 1 undirected\n0 1\n", 2),
    ("3 1 undirected\n0 x 1\n", 2),
])
def test_parse_errors_carry_line(text, line):
    with pytest.raises(ParseError) as exc:
        load_graph(text)
    assert exc.value.line == line


@pytest.mark.parametrize("edges", [
    [(0, 1, 1), (1, 0, 2)],
    [(0, 1, 0)],
    [(0, 1, -3)],
    [(0, 3, 1)],
    [(1, 1, 1)],
])
def test_invariant_violations_rejected(edges):
    with pytest.raises(GraphError):
        WeightedGraph(3, edges)


def test_zero_weights_only_when_allowed():
    g = WeightedGraph(3, [(0, 1, 0), (1, 2, 1), (0, 2, 0)], allow_zero=True)
    assert exact_mwc(g) == 1


def test_dijkstra_examples():
    g = WeightedGraph(3, [(0, 1, 2), (1, 2, 3)])
    assert dijkstra(g, 0)[0] == [0, 2, 5]
    assert dijkstra(g, offsets={0: 0, 2: 0})[0] == [0, 2, 0]
    h = WeightedGraph(3, [(0, 1, 2)])
    assert dijkstra(h, 0)[0][2] == INF


def test_dijkstra_needs_one_seed_kind():
    g = cycle_graph(3)
    with pytest.raises(ValueError):
        dijkstra(g)
    with pytest.raises(ValueError):
        dijkstra(g, 0, {1: 0})
    with pytest.raises(ValueError):
        dijkstra(g, offsets={1: -1})


def test_dijkstra_matches_bellman_ford(rng):
    for _ in range(40):
        g = random_graph(rng, 20)
        offsets = {int(v): int(rng.integers(0, 5)) for v in rng.choice(20, 3, replace=False)}
        dist, parent = dijkstra(g, offsets=offsets)
        assert dist == bellman_ford(g.n, g.edges, offsets)
        for u, v, w in g.edges:
            assert dist[v] <= dist[u] + w and dist[u] <= dist[v] + w
        for v in range(g.n):
            if parent[v] is not None:
                assert dist[v] == dist[parent[v]] + g.weight(parent[v], v)


def test_dijkstra_rational_offsets():
    from fractions import Fraction
    g = WeightedGraph(3, [(0, 1, 2), (1, 2, 3)])
    dist, _ = dijkstra(g, offsets={0: Fraction(1, 3)})
    assert dist == [Fraction(1, 3), Fraction(7, 3), Fraction(16, 3)]


def test_mwc_examples():
    assert exact_mwc(cycle_graph(3)) == 3
    tree = WeightedGraph(4, [(0, 1, 1), (1, 2, 1), (1, 3, 1)])
    assert exact_mwc(tree) is None
    assert enumerate_cycles_bruteforce(cycle_graph(4)) == 4
    assert enumerate_cycles_bruteforce(WeightedGraph(1, [])) is None


def test_k4_cross_check():
    edges = [(0, 1, 1), (0, 2, 2), (0, 3, 3), (1, 2, 4), (1, 3, 5), (2, 3, 6)]
    g = WeightedGraph(4, edges)
    # frozen from the brute-force enumeration: triangle 0-1-2 weighs 1 + 4 + 2
    assert enumerate_cycles_bruteforce(g) == 7
    assert exact_mwc(g) == 7


def test_bruteforce_cap():
    with pytest.raises(GraphError):
        enumerate_cycles_bruteforce(cycle_graph(13))


def test_min_cycle_record_is_a_real_cycle(rng):
    for _ in range(50):
        g = random_graph(rng, int(rng.integers(3, 15)))
        c = exact_min_cycle(g)
        if c is None:
            continue
        assert c.nodes[0] == c.nodes[-1]
        assert c.weight == sum(g.weight(a, b) for a, b in zip(c.nodes, c.nodes[1:]))
        assert c.weight == exact_mwc(g)


def test_directed_min_cycle():
    g = WeightedGraph(3, [(0, 1, 1), (1, 2, 1), (2, 0, 1), (1, 0, 5)], directed=True)
    c = exact_min_cycle(g)
    assert c.weight == 3
    assert exact_mwc(WeightedGraph(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)], directed=True)) is None


@settings(max_examples=150, deadline=None)
@given(st.integers(2, 8).flatmap(lambda n: st.tuples(
    st.just(n), st.sets(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1), st.integers(1, 9)), max_size=20))),
    st.booleans())
def test_mwc_matches_networkx(data, directed):
    n, raw = data
    seen, edges = set(), []
    for u, v, w in raw:
        key = (u, v) if directed else (min(u, v), max(u, v))
        if u != v and key not in seen:
            seen.add(key)
            edges.append((u, v, w))
    g = WeightedGraph(n, edges, directed=directed)
    expected = min_cycle_networkx(n, edges, directed)
    assert exact_mwc(g) == expected
    assert enumerate_cycles_bruteforce(g) == expected


def test_girth_examples():
    k33 = WeightedGraph(6, [(a, 3 + b, 1) for a in range(3) for b in range(3)])
    assert girth_unweighted(k33) == 4
    assert girth_unweighted(cycle_graph(10)) == 10
    star = WeightedGraph(5, [(0, i, 1) for i in range(1, 5)])
    assert girth_unweighted(star) is None


@pytest.mark.parametrize("gamma", [2, 3, 5, 8])
def test_complete_bipartite_girth(gamma):
    g = WeightedGraph(2 * gamma, [(a, gamma + b, 7) for a in range(gamma) for b in range(gamma)])
    assert girth_unweighted(g) == 4


def test_girth_matches_unit_mwc(rng):
    for _ in range(60):
        g = random_graph(rng, int(rng.integers(3, 12)), W=1)
        assert girth_unweighted(g) == exact_mwc(g)


def test_hop_diameter():
    assert hop_diameter(cycle_graph(6)) == 3
    assert hop_diameter(WeightedGraph(3, [(0, 1, 1)])) is None


def test_text_roundtrip(rng):
    g = random_graph(rng, 9)
    h = load_graph(g.to_text())
    assert h.edges == g.edges and h.n == g.n
