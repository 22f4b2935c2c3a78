"""Experiment configuration, random instances and CSV emission."""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from .congest import charge_sssp_cost, scheduled_cost, sssp_time
from .graph import INF, GraphError, WeightedGraph, exact_min_cycle, hop_diameter, load_graph
from .hard import VARIANTS, WEIGHTED, gen_high_girth_bipartite, gen_lower_bound_graph, moving_cut, verify_gap
from .ldd import check_ldd_properties, eps1, ldd, shift_rate
from .mwc import approx_mwc, walk_weight, witness_cycle

MODES = ("approx", "ldd-stats", "hard-gap", "moving-cut", "cost-model")


class ConfigError(ValueError):
    pass


class InvariantViolation(RuntimeError):
    pass


@dataclass
class ExperimentConfig:
    mode: str
    seed: int
    graph: str | None = None
    random: tuple[int, int, int] | None = None
    hard: tuple[int, int, int, int, str] | None = None
    k_star: float = 1.0
    alpha: float | None = None
    eps: float | None = None
    trials: int = 1
    budget: int | None = 4
    k: float = 1.0
    d: float | None = None
    cost: tuple[int, int] | None = None
    q: tuple[float, ...] = (1.0,)
    out: str | None = None

    def validate(self) -> None:
        def bad(name, why):
            raise ConfigError(f"{name}: {why}")

        if self.mode not in MODES:
            bad("mode", f"must be one of {', '.join(MODES)}")
        if not isinstance(self.seed, int) or self.seed < 0:
            bad("seed", "a nonnegative integer is required")
        if self.trials < 1:
            bad("trials", "must be at least 1")
        if self.budget is not None and self.budget < 1:
            bad("budget", "must be at least 1")
        sources = [s for s in (self.graph, self.random, self.hard) if s is not None]
        if self.mode in ("approx", "ldd-stats") and len(sources) != 1:
            bad("graph", "give exactly one of --graph, --random, --hard")
        if self.mode in ("hard-gap", "moving-cut") and self.hard is None:
            bad("hard", f"{self.mode} needs --hard gamma,k,d,p,variant")
        if self.mode == "cost-model" and self.cost is None:
            bad("cost", "cost-model needs --cost n,D")
        if self.random is not None:
            n, m, W = self.random
            if n < 1 or m < 0 or W < 1:
                bad("random", "need n >= 1, m >= 0, W >= 1")
            if m > n * (n - 1) // 2:
                bad("random", f"m={m} exceeds n(n-1)/2={n * (n - 1) // 2}")
        if self.hard is not None:
            gamma, k, d, p, variant = self.hard
            if gamma < 1 or k < 1 or d < 2 or p < 1:
                bad("hard", "need gamma >= 1, k >= 1, d >= 2, p >= 1")
            if variant not in VARIANTS:
                bad("hard", f"variant must be one of {', '.join(VARIANTS)}")
            if self.mode == "approx" and variant != WEIGHTED:
                bad("hard", "approx runs on the undirected-weighted variant only")
        if self.k_star < 1:
            bad("kstar", "must be at least 1")
        if self.k <= 0:
            bad("k", "must be positive")
        if self.d is not None and self.d <= 0:
            bad("d", "must be positive")
        if self.cost is not None:
            n, D = self.cost
            if n < 1 or D < 0:
                bad("cost", "need n >= 1 and D >= 0")
            t = sssp_time(n, D)
            for q in self.q:
                if not 1 <= q <= t:
                    bad("q", f"{q} outside [1, T(n,D)={t:.6g}]")


def gen_random_graph(n: int, m: int, W: int, seed: int) -> WeightedGraph:
    """Uniform simple graph on n nodes with m edges and weights uniform in [1, W]."""
    total = n * (n - 1) // 2
    if m > total or n < 1 or m < 0 or W < 1:
        raise GraphError(f"no simple graph with n={n}, m={m}, W={W}")
    rng = np.random.default_rng(seed)
    if 2 * m >= total:
        iu, ju = np.triu_indices(n, 1)
        pick = np.sort(rng.choice(total, m, replace=False))
        pairs = list(zip(iu[pick].tolist(), ju[pick].tolist()))
    else:
        chosen: set[tuple[int, int]] = set()
        while len(chosen) < m:
            a, b = rng.integers(0, n, 2).tolist()
            if a != b:
                chosen.add((min(a, b), max(a, b)))
        pairs = sorted(chosen)
    weights = rng.integers(1, W + 1, len(pairs)).tolist()
    return WeightedGraph(n, [(a, b, w) for (a, b), w in zip(pairs, weights)])


def row_seed(seed: int, row: int) -> int:
    """Per-row seed derived from the master seed by counter."""
    return int(np.random.SeedSequence(seed, spawn_key=(7, row)).generate_state(1)[0])


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, float):
        return "inf" if x == INF else repr(x)
    return str(x)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, Fraction):
        return _fmt(x)
    if isinstance(x, float) and not math.isfinite(x):
        return "inf"
    return x


def _load_source(cfg: ExperimentConfig, row: int) -> tuple[WeightedGraph, int]:
    seed = row_seed(cfg.seed, row)
    if cfg.graph is not None:
        with open(cfg.graph) as fh:
            return load_graph(fh.read(), allow_zero=True), seed
    if cfg.random is not None:
        return gen_random_graph(*cfg.random, seed), seed
    gamma, k, d, p, variant = cfg.hard
    rng = np.random.default_rng(seed)
    H = gen_high_girth_bipartite(gamma, k, np.random.default_rng(cfg.seed))
    bits = len(H.edges)
    inst = gen_lower_bound_graph(gamma, k, d, p, H, rng.integers(0, 2, bits), rng.integers(0, 2, bits), variant)
    return inst.graph, seed


def _approx_row(cfg: ExperimentConfig, row: int) -> tuple[list, dict]:
    g, seed = _load_source(cfg, row)
    cycle = exact_min_cycle(g)
    w_star = None if cycle is None else cycle.weight
    res = approx_mwc(g, cfg.k_star, cfg.alpha, seed=seed, max_trials=cfg.budget, eps=cfg.eps)
    w = res.w_tilde
    if w != INF:
        if w_star is None or w < w_star:
            raise InvariantViolation(f"row {row}: estimate {w} below the minimum cycle weight {w_star}")
        walk = res.best.witness.walk
        if walk_weight(g, walk) > w:
            raise InvariantViolation(f"row {row}: witness walk heavier than the estimate")
        try:
            witness_cycle(g, walk)
        except GraphError as exc:
            raise InvariantViolation(f"row {row}: witness certifies no cycle ({exc})") from None
    ratio = None if w == INF or not w_star else float(Fraction(w) / w_star)
    led = res.ledger
    cells = [seed, g.n, g.m, g.W, cfg.k_star, None if res.params is None else res.params.alpha, res.regime,
             w_star, "inf" if w == INF else (w if isinstance(w, int) else float(w)), ratio, res.trials_short + res.trials_long, res.failed_trials,
             led.dilation() if led.phases else 0, led.congestion() if led.phases else 0,
             scheduled_cost(led) if led.phases else 0]
    return cells, res.constants


def _ldd_rows(cfg: ExperimentConfig) -> tuple[list[list], dict]:
    g, _ = _load_source(cfg, 0)
    cycle = exact_min_cycle(g)
    if cycle is None:
        raise ConfigError("graph: ldd-stats needs a graph with a cycle")
    d = Fraction(cycle.weight, 2) if cfg.d is None else Fraction(cfg.d)
    S = list(range(g.n))
    consts = {"k": cfg.k, "d": d, "S": len(S), "beta": shift_rate(len(S), cfg.k, d), "X": 100 * cfg.k * float(d),
              "eps1": eps1(cfg.k, len(S)), "w_star": cycle.weight}
    rows = []
    for t in range(cfg.trials):
        rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(3, t)))
        forest = ldd(g, S, cfg.k, d, rng)
        shifts = forest.shifts
        p1, p2 = check_ldd_properties(forest, g, cycle, S, cfg.k, d)
        failed = not forest
        radius = None if failed else forest.radius
        max_delta = max(shifts.delta)
        if not failed and radius > max_delta:
            raise InvariantViolation(f"trial {t}: radius {radius} exceeds max shift {max_delta}")
        rows.append([t, failed, p1, p2, radius, max_delta])
    return rows, consts


def _hard_gap_rows(cfg: ExperimentConfig) -> tuple[list[list], dict]:
    gamma, k, d, p, variant = cfg.hard
    H = gen_high_girth_bipartite(gamma, k, np.random.default_rng(cfg.seed))
    bits = len(H.edges)
    rows = []
    for t in range(cfg.trials):
        rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(4, t)))
        x, y = rng.integers(0, 2, bits), rng.integers(0, 2, bits)
        inst = gen_lower_bound_graph(gamma, k, d, p, H, x, y, variant)
        rep = verify_gap(inst)
        if inst.graph.n != inst.expected_nodes:
            raise InvariantViolation(f"row {t}: {inst.graph.n} nodes, expected {inst.expected_nodes}")
        rows.append([t, gamma, k, d, p, variant, inst.graph.n, hop_diameter(inst.graph), inst.stated_diameter,
                     inst.sidecar()["x"], inst.sidecar()["y"], rep.intersects, rep.mwc, rep.gap_ok])
    consts = {"H_edges": bits, "H_girth": H.girth, "short_cycle": rep.short_cycle, "long_cycle": rep.long_cycle}
    return rows, consts


def _moving_cut_rows(cfg: ExperimentConfig) -> tuple[list[list], dict]:
    gamma, k, d, p, variant = cfg.hard
    H = gen_high_girth_bipartite(gamma, k, np.random.default_rng(cfg.seed))
    bits = len(H.edges)
    inst = gen_lower_bound_graph(gamma, k, d, p, H, [1] * bits, [1] * bits, variant)
    mc = moving_cut(inst)
    target = min(Fraction(d ** p), mc.tree_bound)
    row = [gamma, k, d, p, bits, mc.capacity, mc.pair_count, mc.strict, mc.distance, mc.int_capacity,
           mc.int_distance, mc.path_route, mc.tree_bound, mc.distance >= target / 2]
    return [row], {"H_edges": bits, "levels": p}


def _cost_rows(cfg: ExperimentConfig) -> tuple[list[list], dict]:
    n, D = cfg.cost
    t = sssp_time(n, D)
    rows = []
    for q in cfg.q:
        dil, con = charge_sssp_cost(n, D, q)
        rows.append([n, D, q, t, dil, con, dil * con, t * t])
    return rows, {"T": t}


HEADERS = {
    "approx": ["seed", "n", "m", "W", "k_star", "alpha", "regime", "w_star", "w_tilde", "ratio", "trials_run",
               "failed_trials", "measured_dilation", "measured_congestion", "scheduled_cost"],
    "ldd-stats": ["trial", "failed", "property_1", "property_2", "radius", "max_delta"],
    "hard-gap": ["row", "gamma", "k", "d", "p", "variant", "n", "diameter", "stated_diameter", "x", "y",
                 "intersects", "mwc", "gap_ok"],
    "moving-cut": ["gamma", "k", "d", "p", "H_edges", "capacity", "pairs", "strict", "distance", "int_capacity",
                   "int_distance", "path_route", "tree_bound", "bound_ok"],
    "cost-model": ["n", "D", "q", "T", "dilation", "congestion", "product", "T_squared"],
}


def worker_count() -> int:
    raw = os.environ.get("CONGEST_MWC_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(f"CONGEST_MWC_THREADS: not an integer: {raw!r}") from None


def run_experiment(cfg: ExperimentConfig) -> str:
    """CSV text: one '# {json}' metadata line, a header row, then one row per run."""
    cfg.validate()
    if cfg.mode == "approx":
        workers = min(worker_count(), cfg.trials)
        if workers > 1:
            with ThreadPoolExecutor(workers) as pool:
                results = list(pool.map(lambda r: _approx_row(cfg, r), range(cfg.trials)))
        else:
            results = [_approx_row(cfg, r) for r in range(cfg.trials)]
        rows = [r for r, _ in results]
        consts = {str(i): c for i, (_, c) in enumerate(results)}
    else:
        rows, consts = {"ldd-stats": _ldd_rows, "hard-gap": _hard_gap_rows, "moving-cut": _moving_cut_rows,
                        "cost-model": _cost_rows}[cfg.mode](cfg)
    config = {k: v for k, v in asdict(cfg).items() if k != "out"}
    meta = {"mode": cfg.mode, "config": config, "logs": {"ln": "natural", "log": "base 2"},
            "constants": consts}
    buf = io.StringIO()
    buf.write("# " + json.dumps(_jsonable(meta), sort_keys=True) + "\n")
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(HEADERS[cfg.mode])
    for row in rows:
        out.writerow([_fmt(c) for c in row])
    return buf.getvalue()
