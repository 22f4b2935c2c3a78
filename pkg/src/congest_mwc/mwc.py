"""Randomised (k+1)-approximation of the minimum weight cycle.

Short-hop trials cluster a subdivided copy of the graph with every node as a source and
look for a non-tree edge inside a cluster. Long-hop trials cluster around a sampled
skeleton, then look for a non-tree edge inside a cluster (Method 1) or for a pair of
skeleton nodes joined by an estimation path that leaves the cluster forest (Method 2).
Every finite estimate is the weight bound of an explicit closed walk in the graph.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .congest import CostLedger, charge_sssp_cost, sssp_time
from .graph import INF, CycleRecord, GraphError, WeightedGraph, hop_diameter
from .hopsssp import SourceTables, _arc_ties, grid_size
from .ldd import LddBatch, Perturbation, ldd_batch

SHORT, LONG = "shorthop", "longhop"
PHASES = ("shorthop.ldd", "shorthop.detect", "longhop.ldd", "longhop.method1", "longhop.method2",
          "aggregate")


def eps_floor(n: int) -> float:
    return min(2 / math.log2(n), 0.5)


def default_alpha(n: int, k: float) -> float:
    return n ** (k / (2 * k + 1))


def hop_threshold(n: int, alpha: float) -> Fraction:
    """h0 = 10 n ln n / alpha, held as a rational so that the grids are exact."""
    return Fraction(10 * n * math.log(n) / alpha).limit_denominator(1 << 20)


def _grid(lam: Fraction, n: int, W: int) -> tuple[Fraction, ...]:
    L = grid_size(lam, n * W)
    d = [Fraction(1, 2)]
    for _ in range(L):
        d.append(d[-1] * (1 + lam))
    return tuple(d)


@dataclass(frozen=True)
class MwcParams:
    n: int
    W: int
    k_star: float
    eps: float
    k: float
    alpha: float
    h0: Fraction
    lam_short: Fraction
    lam_long: Fraction
    T_short: int
    T_long: int

    @classmethod
    def build(cls, n: int, W: int, k_star: float, alpha: float | None = None,
              eps: float | None = None) -> "MwcParams":
        if n < 3:
            raise ValueError("need at least three nodes")
        if k_star < 1:
            raise ValueError("k_star must be at least 1")
        floor = eps_floor(n)
        eps = floor if eps is None else float(eps)
        if not floor <= eps < 1:
            raise ValueError(f"eps={eps:.4g} outside [{floor:.4g}, 1)")
        k = (1 - eps) * (k_star - eps)
        if alpha is None:
            alpha = default_alpha(n, k)
        if not 1 <= alpha <= n / math.log(n):
            raise ValueError(f"alpha={alpha:.4g} outside [1, n/ln n={n / math.log(n):.4g}]")
        log2n, ln = math.log2(n), math.log(n)
        return cls(n, W, k_star, eps, k, alpha, hop_threshold(n, alpha),
                   Fraction(1, math.ceil(5 * log2n)), Fraction(1, math.ceil(4 * log2n)),
                   math.ceil(40 * n ** (1 / k) * ln),
                   math.ceil(80 * (10 * alpha) ** (1 / k) * ln ** (1 + 1 / k)))

    @property
    def skeleton_rate(self) -> float:
        return min(1.0, self.alpha * math.log(self.n) / self.n)

    @property
    def method2_hops(self) -> int:
        return math.ceil(2 * self.h0)

    def as_dict(self) -> dict:
        return {"n": self.n, "W": self.W, "k_star": self.k_star, "eps": self.eps, "k": self.k,
                "alpha": self.alpha, "h0": str(self.h0), "lambda_short": str(self.lam_short),
                "sigma_short": str(self.lam_short), "lambda_long": str(self.lam_long),
                "sigma_long": str(self.lam_long), "T_short": self.T_short, "T_long": self.T_long,
                "skeleton_rate": self.skeleton_rate, "method2_r": self.method2_hops}


@dataclass(frozen=True)
class Witness:
    """Where a cycle was found: cluster centre, grid row, and the closing edge or skeleton pair."""

    method: str
    center: int
    iteration: int
    d: Fraction
    edge: int | None
    pair: tuple[int, int] | None
    walk: tuple[int, ...]


@dataclass(frozen=True)
class MwcEstimate:
    w_tilde: object
    witness: Witness | None
    regime: str
    trial: int
    failed: int = 0

    @property
    def found(self) -> bool:
        return self.w_tilde != INF

    def __lt__(self, other: "MwcEstimate") -> bool:
        return self.w_tilde < other.w_tilde


def _none(regime: str, trial: int, failed: int = 0) -> MwcEstimate:
    return MwcEstimate(INF, None, regime, trial, failed)


def _exact(x):
    """Integral Fractions become ints so that printed weights stay clean."""
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


def walk_weight(g: WeightedGraph, walk) -> int:
    total = 0
    for a, b in zip(walk, walk[1:]):
        total += g.weight(a, b)
    return total


def witness_cycle(g: WeightedGraph, walk) -> CycleRecord:
    """A simple cycle inside a closed walk that uses some edge exactly once."""
    if len(walk) < 2 or walk[0] != walk[-1]:
        raise GraphError("walk is not closed")
    steps = list(zip(walk, walk[1:]))
    uses: dict[int, int] = {}
    for a, b in steps:
        e = g.edge_id(a, b)
        if e is None:
            raise GraphError(f"walk uses a missing edge ({a}, {b})")
        uses[e] = uses.get(e, 0) + 1
    for i, (a, b) in enumerate(steps):
        if uses[g.edge_id(a, b)] != 1:
            continue
        # the rest of the walk goes b .. a without this edge; erase its loops
        rest = [b] + [y for _, y in steps[i + 1:]] + [y for _, y in steps[:i]]
        path: list[int] = []
        seen: dict[int, int] = {}
        for v in rest:
            if v in seen:
                for x in path[seen[v] + 1:]:
                    del seen[x]
                del path[seen[v] + 1:]
            else:
                seen[v] = len(path)
                path.append(v)
        return g.cycle_record(path + [b])
    raise GraphError("every edge of the walk repeats; no cycle is certified")


def _closing_walk(parent: np.ndarray, a: int, b: int, middle=()) -> tuple[int, ...]:
    def up(v):
        out = [v]
        while parent[out[-1]] >= 0:
            out.append(int(parent[out[-1]]))
        return out

    return tuple(up(a)[::-1] + list(middle) + up(b))


def _argmin_exact(values_f: np.ndarray, exact) -> tuple | None:
    """Index of the exact minimum among entries whose float value is near the float minimum."""
    if values_f.size == 0:
        return None
    best_f = values_f.min()
    if not np.isfinite(best_f):
        return None
    best = None
    for idx in np.argwhere(values_f <= best_f * (1 + 1e-9)).tolist():
        idx = tuple(idx)
        val = exact(idx)
        if best is None or val < best[0] or (val == best[0] and idx < best[1]):
            best = (val, idx)
    return best


class _Meter:
    """Per-arc message totals and round maxima of one driver run, flushed to a ledger."""

    def __init__(self, g: WeightedGraph):
        self.g = g
        self.arcs: dict[str, np.ndarray] = {}
        self.rounds: dict[str, int] = {}
        self.charges: list[tuple[str, float, float]] = []

    def add(self, phase: str, per_arc, rounds: int) -> None:
        if phase not in self.arcs:
            self.arcs[phase] = np.zeros(self.g.csr.arcs, dtype=np.int64)
        self.arcs[phase] += per_arc
        self.rounds[phase] = max(self.rounds.get(phase, 0), int(rounds))

    def flush(self, ledger: CostLedger) -> None:
        c = self.g.csr
        for phase, counts in self.arcs.items():
            ledger.record_rounds(phase, self.rounds[phase])
            ledger.record_messages(phase, {(int(c.src[a]), int(c.nbr[a])): int(counts[a])
                                           for a in np.nonzero(counts)[0]})
        for phase, dil, con in self.charges:
            ledger.charge_model(phase, dil, con)


def _edge_arrays(g: WeightedGraph):
    ea = np.asarray([u for u, _, _ in g.edges], dtype=np.int64)
    eb = np.asarray([v for _, v, _ in g.edges], dtype=np.int64)
    ew = np.asarray([w for _, _, w in g.edges], dtype=np.int64)
    return ea, eb, ew


def _in_cluster_nontree(g: WeightedGraph, batch: LddBatch):
    """(rows x m) mask of edges whose endpoints share a cluster but which no node uses as parent edge."""
    ea, eb, _ = _edge_arrays(g)
    idx = np.arange(g.m)
    ca, cb = batch.center[:, ea], batch.center[:, eb]
    tree = (batch.parent_edge[:, ea] == idx) | (batch.parent_edge[:, eb] == idx)
    return (ca == cb) & (ca >= 0) & ~tree & ~batch.failed[:, None]


def _wavefront_rounds(batch: LddBatch, row: int, lengths: np.ndarray, ea, eb) -> int:
    """Round in which the last subdivision node joins a cluster (start times are absolute)."""
    start = np.zeros(batch.center.shape[1])
    reached = batch.center[row] >= 0
    pos = np.searchsorted(batch.sources, batch.center[row][reached])
    start_of = batch.X[row] - batch.delta[row]
    arrive = np.full(start.shape, np.inf)
    arrive[reached] = start_of[pos] + batch.dist[row][reached]
    latest = arrive[reached].max(initial=0.0)
    ta, tb = arrive[ea], arrive[eb]
    inner = (lengths >= 2) & np.isfinite(ta) & np.isfinite(tb)
    if inner.any():
        ta, tb, le = ta[inner], tb[inner], lengths[inner].astype(np.float64)
        mid = (tb - ta + le) / 2
        best = np.full(ta.shape, -np.inf)
        for i in (np.floor(mid), np.ceil(mid)):
            i = np.clip(i, 1, le - 1)
            best = np.maximum(best, np.minimum(ta + i, tb + le - i))
        latest = max(latest, float(best.max()))
    return math.ceil(latest)


class ShortHopPlan:
    """Everything about short-hop trials that does not depend on the random draws."""

    def __init__(self, g: WeightedGraph, params: MwcParams):
        self.g = g
        self.params = params
        n = g.n
        self.lam = self.sigma = params.lam_short
        self.h0 = params.h0
        self.d = _grid(self.lam, n, g.W)
        self.gamma = tuple(self.sigma * 2 * dl / self.h0 for dl in self.d)
        self.gamma_f = np.asarray([float(x) for x in self.gamma])
        # the cluster scale is the same at every grid row: (1 + sigma) d / Gamma
        self.d_prime = (1 + self.sigma) * self.h0 / (2 * self.sigma)
        self.beta = math.log(n) / (params.k * float(self.d_prime))
        self.X = 100 * params.k * float(self.d_prime)
        rows = []
        for gm in self.gamma:
            p, q = gm.numerator, gm.denominator
            rows.append([max(1, -((-w * q) // p)) for _, _, w in g.edges])
        self.lengths = np.asarray(rows, dtype=np.int64).reshape(len(self.gamma), g.m)
        c = g.csr
        self.arc_len = np.ascontiguousarray(self.lengths[:, c.eid])
        self.arc_tie = np.stack([_arc_ties(g, row) for row in self.lengths]) if g.m else \
            np.zeros((len(self.gamma), 0), np.int64)
        self.zero = Perturbation.zero(g)

    @property
    def rows(self) -> int:
        return len(self.d)

    def constants(self) -> dict:
        return {"short_L": self.rows - 1, "short_d_prime": str(self.d_prime), "short_beta": self.beta,
                "short_X": self.X, "short_gamma_min": str(self.gamma[0]), "short_gamma_max": str(self.gamma[-1])}


class LongHopPlan:
    """Long-hop grid plus per-source Method 2 tables, which do not depend on the forest."""

    def __init__(self, g: WeightedGraph, params: MwcParams, backend: str = "auto"):
        self.g = g
        self.params = params
        self.lam = params.lam_long
        self.d = _grid(self.lam, g.n, g.W)
        self.tables = SourceTables(g, params.method2_hops, self.lam, backend)
        self._pairs: dict[tuple[int, int], tuple] = {}
        D = hop_diameter(g)
        self.D = g.n - 1 if D is None else D
        self.sssp_T = sssp_time(g.n, max(self.D, 1))

    @property
    def rows(self) -> int:
        return len(self.d)

    def pair(self, u: int, v: int):
        """(estimate, estimation-path edge ids, estimation-path nodes) or None if v is unreached."""
        key = (u, v)
        if key not in self._pairs:
            values, which, parent, parc, _, _ = self.tables.source(u)
            l = which[v]
            if l is None:
                self._pairs[key] = None
            else:
                eid = self.g.csr.eid
                nodes, edges = [v], []
                while nodes[-1] != u:
                    x = nodes[-1]
                    edges.append(int(eid[parc[l][x]]))
                    nodes.append(int(parent[l][x]))
                self._pairs[key] = (values[v], np.asarray(edges[::-1], dtype=np.int64), tuple(nodes[::-1]))
        return self._pairs[key]

    def constants(self) -> dict:
        grid = self.tables.grid
        return {"long_L": self.rows - 1, "method2_r_prime": grid.r_prime,
                "method2_lambda": str(grid.lam), "method2_L": grid.L, "sssp_T": self.sssp_T, "hop_D": self.D}


def algo_shorthop(g: WeightedGraph, params: MwcParams, rng: np.random.Generator, trial: int = 0,
                  plan: ShortHopPlan | None = None, meter: _Meter | None = None) -> MwcEstimate:
    if g.directed:
        raise GraphError("the cycle algorithms run on undirected graphs")
    if g.m < 3:
        return _none(SHORT, trial)
    plan = plan or ShortHopPlan(g, params)
    batch = ldd_batch(g, range(g.n), params.k, [plan.d_prime] * plan.rows, rng,
                      arc_len=plan.arc_len, arc_tie=plan.arc_tie, perturbation=plan.zero)
    ea, eb, ew = _edge_arrays(g)
    if meter is not None:
        ones = np.ones(g.csr.arcs, dtype=np.int64)
        for row in range(plan.rows):
            meter.add("shorthop.ldd", ones, _wavefront_rounds(batch, row, plan.lengths[row], ea, eb))
            meter.add("shorthop.detect", ones, 1)
    ok = _in_cluster_nontree(g, batch)
    dsum = batch.dist[:, ea] + batch.dist[:, eb]
    vals = np.where(ok, dsum * plan.gamma_f[:, None] + ew, np.inf)
    best = _argmin_exact(vals, lambda ix: plan.gamma[ix[0]] * int(dsum[ix]) + int(ew[ix[1]]))
    failed = int(batch.failed.sum())
    if best is None:
        return _none(SHORT, trial, failed)
    val, (row, e) = best
    a, b = int(ea[e]), int(eb[e])
    walk = _closing_walk(batch.parent[row], a, b)
    wit = Witness("shorthop", int(batch.center[row, a]), row, plan.d[row], e, None, walk)
    return MwcEstimate(_exact(val), wit, SHORT, trial, failed)


def algo_longhop(g: WeightedGraph, params: MwcParams, rng: np.random.Generator, trial: int = 0,
                 plan: LongHopPlan | None = None, meter: _Meter | None = None, skeleton=None,
                 methods=("method1", "method2")) -> MwcEstimate:
    """``skeleton`` overrides the sampled set; ``methods`` restricts the detection rules."""
    if g.directed:
        raise GraphError("the cycle algorithms run on undirected graphs")
    if skeleton is None:
        S = np.nonzero(rng.random(g.n) < params.skeleton_rate)[0]
    else:
        S = np.asarray(sorted(set(skeleton)), dtype=np.int64)
    if g.m < 3 or S.size == 0:
        return _none(LONG, trial)
    plan = plan or LongHopPlan(g, params)
    batch = ldd_batch(g, S.tolist(), params.k, plan.d, rng)
    ea, eb, ew = _edge_arrays(g)
    failed = int(batch.failed.sum())
    if meter is not None:
        dil, con = charge_sssp_cost(g.n, max(plan.D, 1), 1)
        meter.charges.append(("longhop.ldd", dil, con * plan.rows))
        ones = np.ones(g.csr.arcs, dtype=np.int64)
        usage = sum(plan.tables.source(int(s))[5] for s in S) if "method2" in methods else 0
        for _ in range(plan.rows):
            if "method1" in methods:
                meter.add("longhop.method1", ones, 1)
            if "method2" in methods:
                meter.add("longhop.method2", usage, plan.tables.grid.r_prime)
    cands: list[tuple] = []
    if "method1" in methods:
        ok = _in_cluster_nontree(g, batch)
        vals = np.where(ok, (batch.dist[:, ea] + batch.dist[:, eb] + ew).astype(np.float64), np.inf)
        best = _argmin_exact(vals, lambda ix: int(batch.dist[ix[0], ea[ix[1]]] + batch.dist[ix[0], eb[ix[1]]])
                             + int(ew[ix[1]]))
        if best is not None:
            val, (row, e) = best
            cands.append((val, "method1", row, int(ea[e]), int(eb[e]), e, ()))
    if "method2" in methods and S.size >= 2:
        best = _method2(g, plan, batch, S)
        if best is not None:
            cands.append(best)
    if not cands:
        return _none(LONG, trial, failed)
    val, method, row, a, b, e, middle = min(cands, key=lambda t: (t[0], t[1], t[2]))
    walk = _closing_walk(batch.parent[row], a, b, middle)
    wit = Witness(method, int(batch.center[row, a]), row, plan.d[row], e if method == "method1" else None,
                  (a, b) if method == "method2" else None, walk)
    return MwcEstimate(_exact(val), wit, LONG, trial, failed)


def _method2(g: WeightedGraph, plan: LongHopPlan, batch: LddBatch, S: np.ndarray):
    pu, pv, est, est_f, paths = [], [], [], [], []
    for u in S.tolist():
        for v in S.tolist():
            if u == v:
                continue
            rec = plan.pair(u, v)
            if rec is None:
                continue
            pu.append(u)
            pv.append(v)
            est.append(rec[0])
            est_f.append(float(rec[0]))
            paths.append(rec[1])
    if not pu:
        return None
    pu, pv, est_f = np.asarray(pu), np.asarray(pv), np.asarray(est_f)
    width = max(len(p) for p in paths)
    pad = np.full((len(paths), width), -1, dtype=np.int64)
    for i, p in enumerate(paths):
        pad[i, :len(p)] = p
    valid = pad >= 0
    safe = np.maximum(pad, 0)
    rows = batch.center.shape[0]
    vals = np.full((rows, len(pu)), np.inf)
    for row in range(rows):
        if batch.failed[row]:
            continue
        cu, cv = batch.center[row, pu], batch.center[row, pv]
        same = (cu == cv) & (cu >= 0)
        if not same.any():
            continue
        in_forest = np.zeros(g.m, dtype=bool)
        pe = batch.parent_edge[row]
        in_forest[pe[pe >= 0]] = True
        record = np.all(in_forest[safe] | ~valid, axis=1)
        ok = same & ~record
        vals[row] = np.where(ok, batch.dist[row, pu] + batch.dist[row, pv] + est_f, np.inf)
    best = _argmin_exact(vals, lambda ix: int(batch.dist[ix[0], pu[ix[1]]]) + int(batch.dist[ix[0], pv[ix[1]]])
                         + est[ix[1]])
    if best is None:
        return None
    val, (row, i) = best
    u, v = int(pu[i]), int(pv[i])
    nodes = plan.pair(u, v)[2]
    return (val, "method2", row, u, v, None, nodes[1:-1])


def segment_types(forest, cycle_nodes, S) -> list[int] | None:
    """Classify the cycle's segments between consecutive skeleton nodes as type 1, 2 or 3.

    Returns None unless every skeleton node on the cycle sits in one cluster.
    """
    S = set(S)
    ring = list(cycle_nodes[:-1]) if cycle_nodes[0] == cycle_nodes[-1] else list(cycle_nodes)
    marks = [i for i, v in enumerate(ring) if v in S]
    if not marks:
        return None
    cs = {int(forest.center[ring[i]]) for i in marks}
    if len(cs) != 1 or -1 in cs:
        return None
    c = cs.pop()
    g = forest.g
    tree = forest.tree_edges
    out = []
    for j, start in enumerate(marks):
        stop = marks[(j + 1) % len(marks)]
        length = (stop - start) % len(ring) or len(ring)
        seg = [ring[(start + t) % len(ring)] for t in range(length + 1)]
        edges = [g.edge_id(a, b) for a, b in zip(seg, seg[1:])]
        if all(e in tree for e in edges):
            out.append(1)
        elif all(int(forest.center[v]) == c for v in seg) and any(e not in tree for e in edges):
            out.append(2)
        else:
            out.append(3)
    return out


def trial_rng(seed: int, regime: str, trial: int) -> np.random.Generator:
    """Counter-based stream per (master seed, regime, trial index)."""
    key = (0 if regime == SHORT else 1, trial)
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


@dataclass
class ApproxResult:
    w_tilde: object
    best: MwcEstimate | None
    params: MwcParams | None
    trials_short: int
    trials_long: int
    failed_trials: int
    ledger: CostLedger
    constants: dict = field(default_factory=dict)

    @property
    def no_cycle(self) -> bool:
        return self.w_tilde == INF

    @property
    def regime(self) -> str:
        return "none" if self.best is None else self.best.regime


def approx_mwc(g: WeightedGraph, k_star: float, alpha: float | None = None, seed: int = 0,
               max_trials: int | None = None, eps: float | None = None,
               ledger: CostLedger | None = None, backend: str = "auto") -> ApproxResult:
    """Minimum estimate over the short-hop and long-hop trial budgets.

    ``max_trials`` caps each of the two budgets (the nominal counts are large at desk scale).
    """
    if g.directed:
        raise GraphError("the cycle algorithms run on undirected graphs")
    ledger = ledger if ledger is not None else CostLedger()
    if g.n < 3 or g.m < 3:
        return ApproxResult(INF, None, None, 0, 0, 0, ledger)
    params = MwcParams.build(g.n, g.W, k_star, alpha, eps)
    t_short, t_long = params.T_short, params.T_long
    if max_trials is not None:
        t_short, t_long = min(t_short, max_trials), min(t_long, max_trials)
    short_plan = ShortHopPlan(g, params)
    long_plan = LongHopPlan(g, params, backend)
    meter = _Meter(g)
    best: MwcEstimate | None = None
    failed = 0
    for regime, count in ((SHORT, t_short), (LONG, t_long)):
        for t in range(count):
            rng = trial_rng(seed, regime, t)
            if regime == SHORT:
                est = algo_shorthop(g, params, rng, t, short_plan, meter)
            else:
                est = algo_longhop(g, params, rng, t, long_plan, meter)
            failed += est.failed > 0
            if est.found and (best is None or est.w_tilde < best.w_tilde):
                best = est
    meter.add("aggregate", np.ones(g.csr.arcs, dtype=np.int64), 2 * long_plan.D)
    meter.flush(ledger)
    constants = {**params.as_dict(), **short_plan.constants(), **long_plan.constants()}
    return ApproxResult(INF if best is None else best.w_tilde, best, params, t_short, t_long, failed,
                        ledger, constants)
