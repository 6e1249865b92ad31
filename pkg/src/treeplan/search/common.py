from __future__ import annotations

import json
import time
from dataclasses import dataclass, field, replace
from typing import Any, Iterable

from ..actions import ActionRecord
from ..cost import CostConfig, future_cost, imagination_score, step_cost, total_cost
from ..errors import BackendUnavailable, BudgetExceeded, SearchAborted
from ..memory import MemoryStore
from ..proposer.base import ProposalBatch
from ..tree import FRONTIER, PRUNED, TERMINAL, SearchTree

SUCCESS = "success"
BUDGET_EXHAUSTED = "budget_exhausted"
DEAD_END = "dead_end"

EVENT_KINDS = ("select", "expand", "update", "terminal", "error")

# errors that abort a run but keep its partial trace
ABORTING = (BackendUnavailable, BudgetExceeded)


class RealClock:
    def __init__(self):
        self._start = time.perf_counter()

    def now(self) -> float:
        return time.perf_counter() - self._start


class VirtualClock:
    """Charges a fixed simulated latency per backend call; fully deterministic."""

    def __init__(self, proposer, latency: float = 1.0):
        self.proposer = proposer
        self.latency = latency
        self._start = proposer.calls

    def now(self) -> float:
        return (self.proposer.calls - self._start) * self.latency


@dataclass
class TraceEvent:
    run_id: str
    step: int
    kind: str
    node_id: int | None
    f: float | None
    g_cum: float | None
    h_cost: float | None
    proposer_call_count: int
    timestamp: float
    detail: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(self.__dict__, sort_keys=True, ensure_ascii=False)

    @classmethod
    def from_json(cls, line: str) -> TraceEvent:
        return cls(**json.loads(line))


class Recorder:
    def __init__(self, run_id: str, proposer, clock):
        self.run_id = run_id
        self.proposer = proposer
        self.clock = clock
        self._calls0 = proposer.calls
        self.events: list[TraceEvent] = []

    @property
    def calls(self) -> int:
        return self.proposer.calls - self._calls0

    def emit(self, kind: str, node=None, **detail) -> None:
        self.events.append(TraceEvent(
            self.run_id, len(self.events), kind,
            None if node is None else node.node_id,
            None if node is None else node.f,
            None if node is None else node.g_cum,
            None if node is None else node.h_cost,
            self.calls, self.clock.now(), detail))


@dataclass
class SearchResult:
    outcome: str
    best_path: list[ActionRecord]
    best_f: float | None
    nodes_expanded: int
    proposer_calls: int
    wall_time: float
    trace: list[TraceEvent]
    reason: str = ""
    algorithm: str = ""
    run_id: str = ""
    tree: SearchTree | None = field(default=None, repr=False, compare=False)

    @property
    def success(self) -> bool:
        return self.outcome == SUCCESS

    @property
    def best_keys(self) -> list[str]:
        return [a.canonical_key for a in self.best_path]


class Run:
    """Mutable bookkeeping shared by every algorithm for one task."""

    def __init__(self, algorithm: str, task, env, proposer, cfg: CostConfig,
                 memory: MemoryStore | None = None, clock=None, run_id: str | None = None):
        self.algorithm = algorithm
        self.task = task
        self.env = env
        self.proposer = proposer
        self.cfg = cfg
        self.memory = memory if memory else None
        self.clock = clock or RealClock()
        self.run_id = run_id or f"{algorithm}:{task.task_id}"
        self.rec = Recorder(self.run_id, proposer, self.clock)
        self.tree = SearchTree(task.description)
        self.expanded = 0
        self.last_verdict = None

    @property
    def description(self) -> str:
        return self.task.description

    def propose(self, n: int) -> ProposalBatch:
        self.expanded += 1
        return self.proposer.propose_next(self.description, self.tree.path_to_root(n))

    def add_children(self, parent: int, batch: ProposalBatch, *, imagine: bool) -> list[int]:
        """Attach one child per equivalence class and score it."""
        out = []
        for action, count in batch.classes:
            child = self.tree.add_child(parent, action)
            self.score(child, count / batch.k, imagine=imagine)
            out.append(child)
        return out

    def score(self, n: int, g2: float, *, imagine: bool) -> None:
        tree, cfg, mem = self.tree, self.cfg, self.memory
        node = tree.nodes[n]
        parent = tree.nodes[node.parent]
        prefix = tree.path_to_root(n)
        node.g2 = g2
        node.g1 = mem.g1(prefix) if mem is not None and cfg.uses_g1 else None
        node.step_cost = step_cost(node.g1, node.g2, cfg)
        node.g_cum = parent.g_cum + node.step_cost
        node.terminal = self.env.is_terminal(prefix)
        if not cfg.drops("h"):
            node.h1 = mem.h1(node.action) if mem is not None and cfg.uses_h1 else None
            if imagine and cfg.uses_h2:
                suffix = self.proposer.imagine_completion(self.description, prefix)
                node.h2 = imagination_score(node.depth, node.depth + len(suffix), cfg) if suffix else None
            node.h_cost = 0.0 if node.terminal else future_cost(node.h1, node.h2, cfg)
        node.f = total_cost(node, cfg)
        node.scored = True
        self.rec.emit("update", node, parent=parent.node_id, action=node.action.canonical_key,
                      depth=node.depth, g1=node.g1, g2=node.g2, h1=node.h1, h2=node.h2,
                      step_cost=node.step_cost, terminal=node.terminal)

    def try_terminal(self, n: int) -> bool:
        """Verify a selected terminal node; prune it when verification fails."""
        node = self.tree.nodes[n]
        verdict = self.last_verdict = self.env.verify(self.tree.path_to_root(n))
        node.status = TERMINAL if verdict else PRUNED
        if not verdict:
            self.rec.emit("update", node, pruned=verdict.reason)
        return verdict.success

    def fallback(self, candidates: Iterable[int], key) -> SearchResult:
        """Budget exhausted: best verified terminal among ``candidates``, else the best node."""
        ordered = sorted(candidates, key=key)
        for n in ordered:
            node = self.tree.nodes[n]
            if node.terminal and node.status == FRONTIER and self.try_terminal(n):
                return self.finish(SUCCESS, n)
        live = [n for n in ordered if self.tree.nodes[n].status == FRONTIER]
        return self.finish(BUDGET_EXHAUSTED, live[0] if live else None)

    def finish(self, outcome: str, n: int | None, reason: str = "") -> SearchResult:
        node = self.tree.nodes[n] if n is not None else None
        path = self.tree.path_to_root(n) if n is not None else []
        self.rec.emit("terminal", node, outcome=outcome, reason=reason,
                      best_path=[a.canonical_key for a in path],
                      nodes_expanded=self.expanded, wall_time=self.clock.now())
        return SearchResult(outcome, path, None if node is None else node.f, self.expanded,
                            self.rec.calls, self.clock.now(), self.rec.events, reason,
                            self.algorithm, self.run_id, self.tree)

    def abort(self, exc: Exception) -> SearchAborted:
        self.rec.emit("error", None, error=f"{type(exc).__name__}: {exc}")
        partial = self.finish(BUDGET_EXHAUSTED, None, reason=f"aborted: {type(exc).__name__}")
        return SearchAborted(exc, partial)


def g_only(cfg: CostConfig) -> CostConfig:
    """Cost config for baselines ranked by cumulative cost alone."""
    return replace(cfg, ablations=frozenset({"h"} | (cfg.ablations & {"g1", "g2"})))
