"""Algorithm x task experiment runner: traces, summaries and scaling curves."""
from __future__ import annotations

import csv
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Any

from .cost import CostConfig
from .errors import SearchAborted
from .memory import MemoryStore, load_memory, record_success, save_memory
from .proposer.base import ProposerConfig
from .proposer.live import ChatClient, LiveProposer
from .proposer.scripted import ScriptedProposer
from .search import (
    MctsConfig, RealClock, SearchResult, TraceEvent, VirtualClock, beam_bfs, dfs_backtrack,
    greedy_closed_loop, mcts_uct, toolchain_star,
)
from .suites import Suite, SuiteTask, load_suite

log = logging.getLogger(__name__)

ALGORITHMS = ("toolchain", "bfs", "dfs", "mcts", "greedy")
MEMORY_ALGORITHMS = ("toolchain", "mcts")
SUMMARY_COLUMNS = ["algorithm", "suite", "success_rate", "mean_wall_time", "mean_nodes_expanded",
                   "mean_proposer_calls"]
RUN_COLUMNS = ["algorithm", "suite", "task_id", "outcome", "success", "nodes_expanded",
               "proposer_calls", "wall_time", "best_f", "best_path", "reason"]
CURVE_COLUMNS = ["T", "algorithm", "success_rate", "mean_wall_time", "mean_proposer_calls"]
ERROR = "error"


@dataclass(frozen=True)
class Variant:
    """One row group of the matrix: an algorithm plus toolchain ablations."""

    algorithm: str
    ablations: frozenset = frozenset()

    @property
    def label(self) -> str:
        if not self.ablations:
            return self.algorithm
        return self.algorithm + "-" + "+".join(f"drop_{a}" for a in sorted(self.ablations))


@dataclass
class RunConfig:
    suite_path: Path
    algorithms: list[str] = field(default_factory=lambda: ["toolchain"])
    ablations: list[frozenset] = field(default_factory=list)
    cost: CostConfig = field(default_factory=CostConfig)
    backend: str = "scripted"
    temperature: float = 1.0
    max_imagined_steps: int = 20
    call_budget: int | None = None
    memory_in: Path | None = None
    memory_out: Path | None = None
    memory_writeback: bool | None = None
    parallelism: int = 1
    out_dir: Path = Path("runs")
    seed: int = 0
    timing: str = "virtual"
    call_latency: float = 1.0
    beam_width: int = 3
    prune_threshold: float = 0.9
    mcts: MctsConfig = field(default_factory=MctsConfig)
    sweep_T: list[int] | None = None

    def __post_init__(self):
        self.suite_path = Path(self.suite_path)
        self.out_dir = Path(self.out_dir)
        if self.memory_in is not None:
            self.memory_in = Path(self.memory_in)
        if self.memory_out is not None:
            self.memory_out = Path(self.memory_out)
        if self.parallelism < 1:
            raise ValueError("parallelism must be >= 1")
        bad = [a for a in self.algorithms if a not in ALGORITHMS]
        if bad:
            raise ValueError(f"unknown algorithms {bad}; choose from {list(ALGORITHMS)}")
        if self.backend not in ("scripted", "http"):
            raise ValueError("backend must be 'scripted' or 'http'")
        if self.timing not in ("virtual", "real"):
            raise ValueError("timing must be 'virtual' or 'real'")
        self.ablations = [frozenset(CostConfig(ablations=frozenset(a)).ablations) for a in self.ablations]

    def check_paths(self) -> None:
        for p in (self.suite_path, self.memory_in):
            if p is not None and not p.exists():
                raise FileNotFoundError(p)

    def variants(self) -> list[Variant]:
        out = []
        for algo in self.algorithms:
            if algo == "toolchain" and self.ablations:
                out.extend(Variant(algo, a) for a in self.ablations)
            else:
                out.append(Variant(algo, self.cost.ablations))
        return list(dict.fromkeys(out))


def load_config(path: str | Path) -> RunConfig:
    """Read a JSON run config; relative paths resolve against the config's directory."""
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    base = path.parent

    def rel(p):
        return None if p is None else base / p

    cost = raw.get("cost", {})
    cost = CostConfig(**{**cost, "ablations": frozenset(cost.get("ablations", ()))})
    prop = raw.get("proposer", {})
    cfg = RunConfig(
        suite_path=rel(raw["suite"]),
        algorithms=list(raw.get("algorithms", ["toolchain"])),
        ablations=[frozenset(a) for a in raw.get("ablations", [])],
        cost=cost,
        backend=prop.get("backend", "scripted"),
        temperature=prop.get("temperature", 1.0),
        max_imagined_steps=prop.get("max_imagined_steps", 20),
        call_budget=prop.get("call_budget"),
        memory_in=rel(raw.get("memory_in")),
        memory_out=rel(raw.get("memory_out")),
        memory_writeback=raw.get("memory_writeback"),
        parallelism=raw.get("parallelism", 1),
        out_dir=rel(raw.get("out_dir", "runs")),
        seed=raw.get("seed", 0),
        timing=raw.get("timing", "virtual"),
        call_latency=raw.get("call_latency", 1.0),
        beam_width=raw.get("beam_width", 3),
        prune_threshold=raw.get("prune_threshold", 0.9),
        mcts=MctsConfig(**raw.get("mcts", {})),
        sweep_T=raw.get("sweep_T"),
    )
    cfg.check_paths()
    return cfg


@dataclass
class RunRecord:
    variant: Variant
    task_id: str
    result: SearchResult | None
    error: str = ""

    @property
    def success(self) -> bool:
        return self.result is not None and self.result.success and not self.error

    def row(self, suite: str) -> dict[str, Any]:
        r = self.result
        return {
            "algorithm": self.variant.label,
            "suite": suite,
            "task_id": self.task_id,
            "outcome": ERROR if self.error else r.outcome,
            "success": int(self.success),
            "nodes_expanded": r.nodes_expanded if r else 0,
            "proposer_calls": r.proposer_calls if r else 0,
            "wall_time": _fmt(r.wall_time if r else 0.0),
            "best_f": "" if r is None or r.best_f is None else _fmt(r.best_f),
            "best_path": " | ".join(r.best_keys) if r else "",
            "reason": self.error or (r.reason if r else ""),
        }


@dataclass
class MatrixResult:
    suite: str
    runs: list[RunRecord]
    summary: list[dict[str, Any]]
    memory: MemoryStore | None = None

    def records(self, label: str) -> list[RunRecord]:
        return [r for r in self.runs if r.variant.label == label]

    def success_rate(self, label: str) -> Fraction:
        recs = self.records(label)
        return Fraction(sum(r.success for r in recs), len(recs)) if recs else Fraction(0)


def _fmt(x: float | Fraction, places: int = 6) -> str:
    """Fixed-point text; fractions are rounded exactly (half to even)."""
    if isinstance(x, Fraction):
        scaled = round(x * 10 ** places)
        sign = "-" if scaled < 0 else ""
        whole, frac = divmod(abs(scaled), 10 ** places)
        return f"{sign}{whole}.{frac:0{places}d}"
    return f"{x:.{places}f}"


def make_proposer(cfg: RunConfig, task: SuiteTask, memory: MemoryStore | None):
    pcfg = ProposerConfig(k=cfg.cost.k, temperature=cfg.temperature,
                          finish_token=getattr(task.env, "finish_token", "Finish"),
                          max_imagined_steps=cfg.max_imagined_steps)
    if cfg.backend == "scripted":
        return ScriptedProposer(task.script, pcfg, seed=task.seed, global_seed=cfg.seed)
    client = ChatClient.from_env(call_budget=cfg.call_budget)
    docs = getattr(task.env, "tool_docs", lambda: "")()
    demos = "\n\n".join("\n".join(e.keys) for e in memory) if memory else ""
    return LiveProposer(client, pcfg, tool_docs=docs, demonstrations=demos)


def run_one(cfg: RunConfig, variant: Variant, task: SuiteTask, memory: MemoryStore | None,
            suite: str = "") -> RunRecord:
    """One search run; every failure becomes a failed record instead of an exception."""
    cost = replace(cfg.cost, ablations=variant.ablations)
    try:
        proposer = make_proposer(cfg, task, memory)
    except Exception as exc:  # noqa: BLE001 - e.g. backend not configured
        return RunRecord(variant, task.task_id, None, f"{type(exc).__name__}: {exc}")
    clock = VirtualClock(proposer, cfg.call_latency) if cfg.timing == "virtual" else RealClock()
    run_id = f"{variant.label}:{task.task_id}"
    algo = variant.algorithm
    try:
        if algo == "toolchain":
            res = toolchain_star(task, task.env, proposer, memory, cost, clock=clock, run_id=run_id)
        elif algo == "mcts":
            res = mcts_uct(task, task.env, proposer, memory, cost, cfg.mcts, clock=clock, run_id=run_id)
        elif algo == "bfs":
            res = beam_bfs(task, task.env, proposer, cost, cfg.beam_width, clock=clock, run_id=run_id)
        elif algo == "dfs":
            res = dfs_backtrack(task, task.env, proposer, cost, cfg.prune_threshold, clock=clock, run_id=run_id)
        else:
            res = greedy_closed_loop(task, task.env, proposer, cost, clock=clock, run_id=run_id)
    except SearchAborted as exc:
        return RunRecord(variant, task.task_id, exc.result, f"{type(exc.cause).__name__}: {exc.cause}")
    except Exception as exc:  # noqa: BLE001 - per-run errors never abort the matrix
        log.exception("run %s failed", run_id)
        return RunRecord(variant, task.task_id, None, f"{type(exc).__name__}: {exc}")
    return RunRecord(variant, task.task_id, res)


def summarize(suite: str, runs: list[RunRecord], variants: list[Variant]) -> list[dict[str, Any]]:
    rows = []
    for v in variants:
        recs = [r for r in runs if r.variant == v]
        n = len(recs)
        if n == 0:
            continue
        res = [r.result for r in recs]
        wall = sum(r.wall_time for r in res if r) / n
        nodes = Fraction(sum(r.nodes_expanded for r in res if r), n)
        calls = Fraction(sum(r.proposer_calls for r in res if r), n)
        rate = Fraction(sum(r.success for r in recs), n)
        rows.append({"algorithm": v.label, "suite": suite, "success_rate": _fmt(rate),
                     "mean_wall_time": _fmt(wall), "mean_nodes_expanded": _fmt(nodes),
                     "mean_proposer_calls": _fmt(calls)})
    return rows


def _base_memories(cfg: RunConfig, suite: Suite) -> dict[str, MemoryStore]:
    base = load_memory(cfg.memory_in) if cfg.memory_in is not None else None
    return {env: suite.seed_memory(env, base) for env in suite.env_bindings()}


def run_matrix(cfg: RunConfig, *, suite: Suite | None = None, write: bool = True) -> MatrixResult:
    """Run every (variant, task) pair and write traces, ``runs.csv`` and ``summary.csv``.

    Memory-using algorithms get a private copy of the per-environment
    memory. With write-back on, successful plans are appended to that copy
    and tasks run sequentially in file order.
    """
    suite = suite or load_suite(cfg.suite_path)
    writeback = suite.memory_writeback if cfg.memory_writeback is None else cfg.memory_writeback
    variants = cfg.variants()
    base = _base_memories(cfg, suite)
    stores = {(v, env): m.copy() for v in variants for env, m in base.items()}

    def memory_for(v: Variant, task: SuiteTask) -> MemoryStore | None:
        if v.algorithm not in MEMORY_ALGORITHMS:
            return None
        store = stores[v, task.env_binding]
        return store if writeback else store.copy()

    jobs = [(v, t) for v in variants for t in suite.tasks]
    if writeback or cfg.parallelism == 1:
        runs = []
        for v, t in jobs:
            mem = memory_for(v, t)
            rec = run_one(cfg, v, t, mem, suite.name)
            if writeback and mem is not None and rec.success:
                record_success(mem, rec.result.best_path, t.description, env=t.env_binding)
            runs.append(rec)
    else:
        with ThreadPoolExecutor(max_workers=cfg.parallelism) as pool:
            futures = [pool.submit(run_one, cfg, v, t, memory_for(v, t), suite.name) for v, t in jobs]
            runs = [f.result() for f in futures]

    summary = summarize(suite.name, runs, variants)
    merged = MemoryStore()
    for store in base.values():
        for e in store:
            merged.add(e)
    for store in stores.values():
        for e in store:
            merged.add(e)
    result = MatrixResult(suite.name, runs, summary, merged)
    if write:
        write_outputs(cfg.out_dir, result)
        if cfg.memory_out is not None:
            save_memory(merged, cfg.memory_out)
    return result


def trace_path(out_dir: Path, label: str, task_id: str) -> Path:
    return Path(out_dir) / "traces" / f"{label}__{task_id}.jsonl"


def write_csv(path: Path, columns: list[str], rows: list[dict]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)


def write_outputs(out_dir: Path, result: MatrixResult) -> None:
    out_dir = Path(out_dir)
    for rec in result.runs:
        path = trace_path(out_dir, rec.variant.label, rec.task_id)
        path.parent.mkdir(parents=True, exist_ok=True)
        events = rec.result.trace if rec.result is not None else []
        with open(path, "w", encoding="utf-8") as fh:
            for ev in events:
                fh.write(ev.to_json() + "\n")
    write_csv(out_dir / "runs.csv", RUN_COLUMNS, [r.row(result.suite) for r in result.runs])
    write_csv(out_dir / "summary.csv", SUMMARY_COLUMNS, result.summary)


def emit_scaling_curves(cfg: RunConfig, sweep: list[int], out_path: str | Path | None = None,
                        *, suite: Suite | None = None) -> list[dict[str, Any]]:
    """Rerun the matrix once per step limit and emit one row per (T, algorithm)."""
    if not sweep:
        raise ValueError("sweep must be nonempty")
    suite = suite or load_suite(cfg.suite_path)
    rows = []
    for T in sweep:
        sub = replace(cfg, cost=replace(cfg.cost, T=int(T)), memory_out=None)
        for r in run_matrix(sub, suite=suite, write=False).summary:
            rows.append({"T": int(T), "algorithm": r["algorithm"], "success_rate": r["success_rate"],
                         "mean_wall_time": r["mean_wall_time"],
                         "mean_proposer_calls": r["mean_proposer_calls"]})
    if out_path is not None:
        write_csv(Path(out_path), CURVE_COLUMNS, rows)
    return rows


def read_trace(path: str | Path) -> list[TraceEvent]:
    with open(path, encoding="utf-8") as fh:
        return [TraceEvent.from_json(line) for line in fh if line.strip()]


def replay_trace(events: list[TraceEvent] | str | Path) -> dict[str, Any]:
    """Rebuild a run's outcome and metrics from its event log alone."""
    if not isinstance(events, list):
        events = read_trace(events)
    if not events:
        return {"outcome": ERROR, "best_path": [], "nodes_expanded": 0, "proposer_calls": 0,
                "wall_time": 0.0, "best_f": None}
    steps = [e.step for e in events]
    if any(b <= a for a, b in zip(steps, steps[1:])):
        raise ValueError("trace steps are not strictly increasing")
    parent: dict[int, tuple[int, str]] = {}
    for e in events:
        if e.kind == "update" and "action" in e.detail:
            parent[e.node_id] = (e.detail["parent"], e.detail["action"])
    final = [e for e in events if e.kind == "terminal"]
    if not final:
        raise ValueError("trace has no terminal event")
    last = final[-1]
    path, n = [], last.node_id
    while n is not None and n in parent:
        n, action = parent[n]
        path.append(action)
    path.reverse()
    return {
        "outcome": last.detail["outcome"],
        "best_path": path,
        "nodes_expanded": sum(e.kind == "expand" for e in events),
        "proposer_calls": last.proposer_call_count,
        "wall_time": last.timestamp,
        "best_f": last.f,
    }
