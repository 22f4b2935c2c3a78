import math

import pytest

from conftest import cycle_graph, random_graph
from oracles import bfs_layers
from congest_mwc.congest import (CostLedger, LedgerError, SyncNetwork, charge_sssp_cost, hop_bounded_bfs,
                                 multi_source_bfs, scheduled_cost, sssp_time)
from congest_mwc.graph import INF, WeightedGraph


def path_graph(n):
    return WeightedGraph(n, [(i, i + 1, 1) for i in range(n - 1)])


def test_bfs_examples():
    led = CostLedger()
    res = hop_bounded_bfs(path_graph(5), 0, 3, led)
    assert res.dist == [0, 1, 2, 3, INF]
    assert led.per_phase_rounds["bfs"] == 3
    star = WeightedGraph(5, [(0, i, 1) for i in range(1, 5)])
    assert hop_bounded_bfs(star, 0, 1).dist == [0, 1, 1, 1, 1]
    assert hop_bounded_bfs(cycle_graph(6), 0, 6).dist == [0, 1, 2, 3, 2, 1]


def test_bfs_parent_chain_and_ties():
    res = hop_bounded_bfs(cycle_graph(4), 0, 4)
    assert res.parent[2] == 1
    for v in range(4):
        x = v
        while x != 0:
            assert res.dist[res.parent[x]] == res.dist[x] - 1
            x = res.parent[x]


def test_bfs_matches_central_bfs_and_meters(rng):
    for _ in range(500):
        n = int(rng.integers(2, 16))
        g = random_graph(rng, n)
        s = int(rng.integers(0, n))
        r = int(rng.integers(1, 6))
        led = CostLedger()
        res = hop_bounded_bfs(g, s, r, led)
        assert res.dist == bfs_layers(n, [g.neighbors(u) for u in range(n)], s, r)
        assert led.per_phase_rounds["bfs"] == r
        per_edge = {}
        for (a, b), c in led.per_edge_messages["bfs"].items():
            assert c <= 1
            key = (min(a, b), max(a, b))
            per_edge[key] = per_edge.get(key, 0) + c
        assert max(per_edge.values(), default=0) <= 2


def test_multi_source():
    g = path_graph(6)
    one = multi_source_bfs(g, [2], 3)
    assert one[2].dist == hop_bounded_bfs(g, 2, 3).dist
    both = multi_source_bfs(g, [0, 5], 5)
    assert both[0].dist == [0, 1, 2, 3, 4, 5]
    assert both[5].dist == [5, 4, 3, 2, 1, 0]
    with pytest.raises(ValueError):
        multi_source_bfs(g, [], 2)


def test_multi_source_equals_independent_runs(rng):
    g = random_graph(rng, 25)
    S = rng.choice(25, 5, replace=False).tolist()
    led = CostLedger()
    res = multi_source_bfs(g, S, 4, led, phase="ms")
    for s in S:
        assert res[s].dist == hop_bounded_bfs(g, s, 4).dist
    assert led.max_edge_messages("ms") <= len(S)
    assert led.per_phase_rounds["ms"] == 4


def test_network_enforces_the_model():
    g = path_graph(3)
    net = SyncNetwork(g)
    with pytest.raises(ValueError):
        net.exchange({0: [(2, (0,))]})
    with pytest.raises(ValueError):
        net.exchange({0: [(1, (0,)), (1, (0,))]})
    with pytest.raises(ValueError):
        net.exchange({0: [(1, (0, 1, 2, 3))]})


def test_cost_model_examples():
    t = sssp_time(100, 10)
    assert t == pytest.approx(10 + 10 + 100 ** 0.4 * 10 ** 0.4)
    assert t == pytest.approx(35.85, abs=0.01)
    assert charge_sssp_cost(100, 10, 1) == pytest.approx((t, t))
    assert charge_sssp_cost(100, 10, t)[1] == pytest.approx(1)
    dil, con = charge_sssp_cost(10000, 1, 2)
    assert (dil, con) == pytest.approx((281.7, 70.4), abs=0.1)
    with pytest.raises(ValueError):
        charge_sssp_cost(100, 10, 0.5)
    with pytest.raises(ValueError):
        charge_sssp_cost(100, 10, t + 1)


def test_cost_model_identity():
    for n in (10, 100, 1000):
        for D in (1, 5, 30):
            t = sssp_time(n, D)
            for q in (1, 2, 3.5, t):
                dil, con = charge_sssp_cost(n, D, q)
                assert math.isclose(dil * con, t * t, rel_tol=1e-9)
                assert dil >= charge_sssp_cost(n, D, 1)[0]


def test_scheduled_cost_examples(rng):
    g = random_graph(rng, 12, connected=True)
    led = CostLedger()
    hop_bounded_bfs(g, 0, 5, led)
    assert scheduled_cost(led, ["bfs"]) == 6
    shared = path_graph(2)
    led = CostLedger()
    for i in range(4):
        hop_bounded_bfs(shared, 0, 3, led, phase=f"p{i}")
    assert led.dilation() == 3 and led.congestion() == 4
    assert scheduled_cost(led) == 7
    led.charge_model("sssp", 10.0, 2.5)
    assert led.dilation() == 10
    assert led.congestion() == 4 + 2.5
    assert scheduled_cost(led) == 16.5
    with pytest.raises(LedgerError):
        scheduled_cost(led, ["nope"])


def test_ledger_merge_and_csv():
    a, b = CostLedger(), CostLedger()
    a.record_messages("x", {(0, 1): 2})
    a.record_rounds("x", 4)
    b.record_messages("x", {(0, 1): 3, (1, 0): 1})
    b.record_rounds("x", 2)
    a.merge(b)
    assert a.max_edge_messages("x") == 5 and a.per_phase_rounds["x"] == 4
    assert a.to_csv() == "phase,rounds,max_edge_messages\nx,4,5\n"
