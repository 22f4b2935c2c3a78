"""Time the compiled and pure-Python lexicographic Dijkstra kernels on random graphs.

    python benchmarks/bench_kernels.py --sizes 200 1000 5000 --repeat 5
"""

import argparse
import timeit

import numpy as np

from congest_mwc import kernels
from congest_mwc.experiment import gen_random_graph


def case(n, seed):
    g = gen_random_graph(n, 3 * n, 100, seed)
    c = g.csr
    rng = np.random.default_rng(seed)
    sources = np.arange(n, dtype=np.int32)
    start = rng.exponential(5.0, n)
    args = (c.indptr, c.nbr, c.weight, rng.integers(1, 1 << 40, c.arcs, dtype=np.int64),
            c.src.astype(np.int64), sources, start, rng.integers(1, 1 << 40, n, dtype=np.int64))
    return args


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[200, 1000, 5000])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    opts = ap.parse_args()
    impls = kernels.implementations()
    if "cython" not in impls:
        print("compiled kernels are not built; only the Python backend is timed")
    print(f"{'n':>7} {'arcs':>8} " + " ".join(f"{name + ' ms':>12}" for name in impls) + f" {'speedup':>8}")
    for n in opts.sizes:
        args = case(n, opts.seed)
        ref = None
        times = {}
        for name, mod in impls.items():
            out = mod.lex_dijkstra(*args)
            if ref is None:
                ref = out
            else:
                assert all(np.array_equal(a, b) for a, b in zip(ref, out)), "backends disagree"
            best = min(timeit.repeat(lambda: mod.lex_dijkstra(*args), number=1, repeat=opts.repeat))
            times[name] = best * 1e3
        speed = times["python"] / times["cython"] if "cython" in times else float("nan")
        print(f"{n:>7} {len(args[1]):>8} " + " ".join(f"{times[k]:>12.2f}" for k in impls) + f" {speed:>8.1f}x")


if __name__ == "__main__":
    main()
