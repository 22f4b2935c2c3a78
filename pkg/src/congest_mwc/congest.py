"""Synchronous round engine with per-arc message metering, BFS primitives and cost models."""

from __future__ import annotations

import csv
import io
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable

from .graph import INF, WeightedGraph

# a message is one O(log n)-bit unit: an id, a distance and one flag at most
MESSAGE_FIELDS = 3


class LedgerError(KeyError):
    pass


@dataclass
class CostLedger:
    """Raw CONGEST costs grouped by phase label.

    Messages are counted per arc (edge direction), matching the one-message-per-edge-
    direction-per-round channel of the model. Within a phase, round counts combine by
    max and message counts by sum, since phases stand for algorithms run side by side.
    """

    per_edge_messages: dict[str, Counter] = field(default_factory=lambda: defaultdict(Counter))
    per_phase_rounds: dict[str, int] = field(default_factory=dict)
    model_charges: list[tuple[str, float, float]] = field(default_factory=list)

    def touch(self, phase: str) -> None:
        self.per_phase_rounds.setdefault(phase, 0)
        self.per_edge_messages[phase]

    def record_rounds(self, phase: str, rounds: int) -> None:
        self.per_phase_rounds[phase] = max(self.per_phase_rounds.get(phase, 0), int(rounds))
        self.per_edge_messages[phase]

    def record_message(self, phase: str, arc: tuple[int, int], count: int = 1) -> None:
        self.touch(phase)
        self.per_edge_messages[phase][arc] += count

    def record_messages(self, phase: str, counts: dict[Hashable, int]) -> None:
        self.touch(phase)
        bucket = self.per_edge_messages[phase]
        for arc, c in counts.items():
            if c:
                bucket[arc] += int(c)

    def charge_model(self, phase: str, dilation: float, congestion: float) -> None:
        self.touch(phase)
        self.model_charges.append((phase, float(dilation), float(congestion)))

    @property
    def phases(self) -> list[str]:
        return sorted(self.per_phase_rounds)

    def _check(self, phases: Iterable[str]) -> list[str]:
        phases = list(phases)
        for p in phases:
            if p not in self.per_phase_rounds:
                raise LedgerError(f"unknown phase {p!r}")
        return phases

    def max_edge_messages(self, phase: str) -> int:
        bucket = self.per_edge_messages.get(phase)
        return max(bucket.values(), default=0) if bucket else 0

    def dilation(self, phases: Iterable[str] | None = None) -> float:
        phases = self._check(self.phases if phases is None else phases)
        rounds = [self.per_phase_rounds[p] for p in phases]
        rounds += [d for p, d, _ in self.model_charges if p in phases]
        return max(rounds, default=0)

    def congestion(self, phases: Iterable[str] | None = None) -> float:
        """Max over arcs of summed messages, plus model-charged congestion.

        Model charges carry no arc identity, so they are added on top of the worst arc.
        """
        phases = self._check(self.phases if phases is None else phases)
        total: Counter = Counter()
        for p in phases:
            total.update(self.per_edge_messages.get(p, {}))
        measured = max(total.values(), default=0)
        return measured + sum(c for p, _, c in self.model_charges if p in phases)

    def merge(self, other: "CostLedger") -> None:
        for p, r in other.per_phase_rounds.items():
            self.record_rounds(p, r)
        for p, bucket in other.per_edge_messages.items():
            self.record_messages(p, bucket)
        self.model_charges.extend(other.model_charges)

    def to_csv(self) -> str:
        buf = io.StringIO()
        out = csv.writer(buf, lineterminator="\n")
        out.writerow(["phase", "rounds", "max_edge_messages"])
        for p in self.phases:
            out.writerow([p, self.per_phase_rounds[p], self.max_edge_messages(p)])
        return buf.getvalue()


def scheduled_cost(ledger: CostLedger, phases: Iterable[str] | None = None) -> float:
    """dilation + congestion of the phase set (random-delay scheduling, polylog factors dropped)."""
    phases = list(ledger.phases if phases is None else phases)
    return ledger.dilation(phases) + ledger.congestion(phases)


def sssp_time(n: int, D: int) -> float:
    """T(n, D) = D + sqrt(n) + n^(2/5) D^(2/5)."""
    return D + math.sqrt(n) + n ** 0.4 * D ** 0.4


def charge_sssp_cost(n: int, D: int, q: float) -> tuple[float, float]:
    """(dilation, congestion) = (T q, T / q) of the oracle-mode SSSP black box."""
    t = sssp_time(n, D)
    if not 1 <= q <= t:
        raise ValueError(f"trade-off parameter q={q} outside [1, T(n,D)={t:.6g}]")
    return t * q, t / q


class SyncNetwork:
    """One synchronous CONGEST execution on a graph's undirected communication edges.

    ``exchange`` delivers one round: each node may send one message per incident arc.
    """

    def __init__(self, g: WeightedGraph, ledger: CostLedger | None = None, phase: str = "bfs"):
        self.g = g
        self.ledger = ledger
        self.phase = phase
        self.rounds = 0
        self.messages: Counter = Counter()

    def exchange(self, outbox: dict[int, list[tuple[int, tuple]]]) -> dict[int, list[tuple[int, tuple]]]:
        self.rounds += 1
        inbox: dict[int, list[tuple[int, tuple]]] = defaultdict(list)
        for u, msgs in outbox.items():
            used = set()
            for v, payload in msgs:
                if self.g.edge_id(u, v) is None:
                    raise ValueError(f"{u} cannot send to non-neighbour {v}")
                if v in used:
                    raise ValueError(f"two messages on arc ({u}, {v}) in one round")
                if len(payload) > MESSAGE_FIELDS:
                    raise ValueError("payload exceeds one message unit")
                used.add(v)
                self.messages[(u, v)] += 1
                inbox[v].append((u, payload))
        return inbox

    def close(self) -> None:
        if self.ledger is not None:
            self.ledger.record_rounds(self.phase, self.rounds)
            self.ledger.record_messages(self.phase, self.messages)


@dataclass
class BfsResult:
    source: int
    dist: list
    parent: list
    flag: list | None = None


def _bfs_rounds(g: WeightedGraph, s: int, r: int, net: SyncNetwork,
                edge_flag: Callable[[int, int], bool] | None = None) -> BfsResult:
    """Hop-bounded BFS driven round by round; ties go to the smallest sender id."""
    if r < 1:
        raise ValueError("hop bound must be at least 1")
    n = g.n
    dist: list = [INF] * n
    parent: list = [None] * n
    flag: list | None = [None] * n if edge_flag is not None else None
    dist[s] = 0
    if flag is not None:
        flag[s] = any(edge_flag(s, v) for v in g.neighbors(s))
    frontier = [s]
    for t in range(1, r + 1):
        if not frontier:
            # nothing left to send: the remaining rounds are silent
            net.rounds += r - t + 1
            break
        outbox = {}
        for u in frontier:
            if flag is None:
                outbox[u] = [(v, (s,)) for v in g.neighbors(u)]
            else:
                base = True if u == s else flag[u]
                outbox[u] = [(v, (s, base and edge_flag(u, v))) for v in g.neighbors(u)]
        inbox = net.exchange(outbox)
        frontier = []
        for v in sorted(inbox):
            if dist[v] != INF:
                continue
            sender, payload = min(inbox[v])
            dist[v] = t
            parent[v] = sender
            if flag is not None:
                flag[v] = payload[1]
            frontier.append(v)
    return BfsResult(s, dist, parent, flag)


def hop_bounded_bfs(g: WeightedGraph, s: int, r: int, ledger: CostLedger | None = None,
                    phase: str = "bfs") -> BfsResult:
    """dist^(r) from s in the unweighted view of g, exactly r rounds."""
    net = SyncNetwork(g, ledger, phase)
    res = _bfs_rounds(g, s, r, net)
    net.close()
    return res


def multi_source_bfs(g: WeightedGraph, S: Iterable[int], r: int, ledger: CostLedger | None = None,
                     phase: str = "msbfs") -> dict[int, BfsResult]:
    """One hop-bounded BFS per source, metered as a single jointly scheduled phase."""
    S = sorted(set(S))
    if not S:
        raise ValueError("source set must be nonempty")
    out = {}
    for s in S:
        net = SyncNetwork(g, ledger, phase)
        out[s] = _bfs_rounds(g, s, r, net)
        net.close()
    return out
