import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from congest_mwc.experiment import gen_random_graph  # noqa: E402
from congest_mwc.graph import WeightedGraph  # noqa: E402


def random_graph(rng, n, m=None, W=10, connected=False):
    m = m if m is not None else int(rng.integers(n - 1, min(n * (n - 1) // 2, 3 * n) + 1))
    edges = {}
    if connected:
        order = rng.permutation(n).tolist()
        for i in range(1, n):
            a, b = order[i], order[int(rng.integers(0, i))]
            edges[(min(a, b), max(a, b))] = int(rng.integers(1, W + 1))
    while len(edges) < m:
        a, b = rng.integers(0, n, 2).tolist()
        if a != b:
            edges.setdefault((min(a, b), max(a, b)), int(rng.integers(1, W + 1)))
    return WeightedGraph(n, [(a, b, w) for (a, b), w in sorted(edges.items())])


def cycle_graph(n, w=1):
    return WeightedGraph(n, [(i, (i + 1) % n, w) for i in range(n)])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


__all__ = ["random_graph", "cycle_graph", "gen_random_graph"]
