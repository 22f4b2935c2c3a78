"""Command-line entry point: ``congest-mwc --mode ... --seed ...``."""

from __future__ import annotations

import argparse
import sys

from .experiment import MODES, ConfigError, ExperimentConfig, InvariantViolation, run_experiment
from .graph import GraphError, ParseError

EXIT_OK, EXIT_CONFIG, EXIT_INVARIANT = 0, 2, 3


def _ints(text: str, count: int, name: str) -> tuple[int, ...]:
    parts = text.split(",")
    if len(parts) != count:
        raise ConfigError(f"{name}: expected {count} comma-separated values, got {text!r}")
    try:
        return tuple(int(p) for p in parts)
    except ValueError:
        raise ConfigError(f"{name}: not integers: {text!r}") from None


def _hard(text: str) -> tuple:
    parts = text.split(",")
    if len(parts) != 5:
        raise ConfigError(f"hard: expected gamma,k,d,p,variant, got {text!r}")
    return _ints(",".join(parts[:4]), 4, "hard") + (parts[4],)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="congest-mwc", description="Minimum-weight-cycle experiments.")
    ap.add_argument("--mode", required=True, choices=MODES)
    src = ap.add_mutually_exclusive_group()
    src.add_argument("--graph", help="edge-list file")
    src.add_argument("--random", metavar="n,m,W", help="uniform random graph, one per row")
    src.add_argument("--hard", metavar="gamma,k,d,p,variant",
                     help="lower-bound instance (variant: directed-unweighted | undirected-weighted)")
    ap.add_argument("--kstar", type=float, default=1.0)
    ap.add_argument("--alpha", type=float)
    ap.add_argument("--eps", type=float, help="override the default 2/log2(n)")
    ap.add_argument("--trials", type=int, default=1, help="rows (runs or Monte-Carlo trials)")
    ap.add_argument("--budget", type=int, default=4, help="cap on trials per regime inside one approx run")
    ap.add_argument("--k", type=float, default=1.0, help="ldd-stats cluster parameter")
    ap.add_argument("--d", type=float, help="ldd-stats distance scale (default w*/2)")
    ap.add_argument("--cost", metavar="n,D", help="cost-model network size and diameter")
    ap.add_argument("--q", default="1", help="comma-separated trade-off values for cost-model")
    ap.add_argument("--seed", type=int, required=True)
    ap.add_argument("--out", help="output CSV path (default stdout)")
    return ap


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    try:
        q = tuple(float(v) for v in args.q.split(","))
    except ValueError:
        raise ConfigError(f"q: not numbers: {args.q!r}") from None
    return ExperimentConfig(
        mode=args.mode, seed=args.seed, graph=args.graph,
        random=None if args.random is None else _ints(args.random, 3, "random"),
        hard=None if args.hard is None else _hard(args.hard),
        k_star=args.kstar, alpha=args.alpha, eps=args.eps, trials=args.trials, budget=args.budget,
        k=args.k, d=args.d, cost=None if args.cost is None else _ints(args.cost, 2, "cost"), q=q, out=args.out)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        cfg = config_from_args(args)
        text = run_experiment(cfg)
    except (ConfigError, ParseError, GraphError, OSError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
