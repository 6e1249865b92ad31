"""Task suite files and generators for the scripted benchmark suites.

A suite is a UTF-8 JSON document ``{"name", "env", "memory_writeback",
"tasks": [...]}``; each task bundles its environment (a tool registry with
ordering rules and a goal, or an arithmetic ground truth), the proposer
script, and optional seed plans for the long-term memory.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

from .actions import DEFAULT_FINISH_TOKEN, canonicalize_action
from .envs import ArithmeticEnv, ToyToolEnv
from .memory import SEED, MemoryEntry, MemoryStore
from .proposer.scripted import QUOTA, ScriptEntry

DEFAULT_ENV = "default"


@dataclass(frozen=True)
class TaskSpec:
    task_id: str
    description: str
    env_binding: str = DEFAULT_ENV
    seed: int = 0


@dataclass
class SuiteTask:
    spec: TaskSpec
    env: Any
    script: list[ScriptEntry]
    seed_plans: list[list[str]] = field(default_factory=list)

    @property
    def task_id(self) -> str:
        return self.spec.task_id

    @property
    def description(self) -> str:
        return self.spec.description

    @property
    def seed(self) -> int:
        return self.spec.seed

    @property
    def env_binding(self) -> str:
        return self.spec.env_binding


@dataclass
class Suite:
    name: str
    tasks: list[SuiteTask]
    memory_writeback: bool = False
    finish_token: str = DEFAULT_FINISH_TOKEN

    def env_bindings(self) -> list[str]:
        return list(dict.fromkeys(t.env_binding for t in self.tasks))

    def seed_memory(self, env_binding: str, base: MemoryStore | None = None) -> MemoryStore:
        """Memory for one environment: entries of ``base`` then every task's seed plans."""
        store = MemoryStore()
        for e in base or ():
            if e.env in (None, env_binding):
                store.add(e)
        for t in self.tasks:
            if t.env_binding != env_binding:
                continue
            for plan in t.seed_plans:
                actions = tuple(canonicalize_action(a, self.finish_token) for a in plan)
                store.add(MemoryEntry(t.description, actions, SEED, env_binding))
        return store


def parse_task(row: dict, default_env: str = DEFAULT_ENV,
               finish_token: str = DEFAULT_FINISH_TOKEN) -> SuiteTask:
    spec = TaskSpec(str(row["task_id"]), row.get("description", ""),
                    row.get("env", default_env), int(row.get("seed", 0)))
    if "ground_truth" in row:
        env = ArithmeticEnv(spec.description, Fraction(str(row["ground_truth"])), finish_token=finish_token)
    else:
        env = ToyToolEnv.from_json(row.get("registry", {}), row.get("rules", []), row.get("goal", {}), finish_token)
    script = [ScriptEntry.from_dict(e, finish_token) for e in row.get("script", [])]
    return SuiteTask(spec, env, script, [list(p) for p in row.get("seed_plans", [])])


def parse_suite(doc: dict, name: str = "suite") -> Suite:
    finish = doc.get("finish_token", DEFAULT_FINISH_TOKEN)
    env = doc.get("env", DEFAULT_ENV)
    tasks = [parse_task(row, env, finish) for row in doc["tasks"]]
    ids = [t.task_id for t in tasks]
    if len(set(ids)) != len(ids):
        raise ValueError("task_id values must be unique within a suite")
    return Suite(doc.get("name", name), tasks, bool(doc.get("memory_writeback", False)), finish)


def load_suite(path: str | Path) -> Suite:
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        return parse_suite(json.load(fh), path.stem)


def save_suite(doc: dict, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True, ensure_ascii=False)
        fh.write("\n")


# generators -------------------------------------------------------------

HOME_REGISTRY = {
    "set_location": {"params": ["city"], "sets": {"location": "$city"}},
    "set_buy_or_rent": {"params": ["mode"], "sets": {"mode": "$mode"}},
    "set_budget": {"params": ["max"], "sets": {"budget": "$max"}},
    "set_bedrooms": {"params": ["n"], "sets": {"bedrooms": "$n"}},
    "search": {"params": [], "sets": {"searched": "true"}},
}
HOME_RULES = [["set_location", "search"], ["set_buy_or_rent", "search"]]

DEMO_CITIES = ["Seattle", "Denver", "Austin", "Boston", "Chicago"]
TASK_CITIES = [
    "Pittsburgh", "Cape Coral", "Tucson", "Omaha", "Fresno", "Tulsa", "Raleigh", "Boise",
    "Spokane", "Reno", "Mesa", "Dayton", "Toledo", "Akron", "Eugene", "Provo",
]
DISTRACTOR_CITIES = ["Springfield", "Riverside", "Franklin", "Greenville", "Clinton", "Salem"]


def _entry(prefix, candidates, imagined, sampling=QUOTA) -> dict:
    return {
        "history_key_prefix": list(prefix),
        "candidates": [{"action": a, "prob": p} for a, p in candidates],
        "imagined_completion": list(imagined),
        "sampling": sampling,
    }


def _home_plan(city: str, mode: str, rooms: int, budget: int) -> list[str]:
    return [f"set_location(city='{city}')", f"set_buy_or_rent(mode='{mode}')",
            f"set_bedrooms(n={rooms})", f"set_budget(max={budget})", "search()", "Finish()"]


def _home_request(rng: random.Random) -> tuple[int, int]:
    """Bedrooms and budget of one request."""
    return rng.randint(1, 5), rng.randrange(200, 1500) * 1000


def crafted_distractor_suite(n_tasks: int = 20, memory_reliant_every: int = 4, seed: int = 0,
                             distractor_prob: float = 0.6) -> dict:
    """Home-search tasks whose first step draws a wrong-city distractor most of the time.

    Two task flavours:

    * scattered: after the distractor the proposals split five ways, so
      frequency alone inflates the cost of that subtree;
    * memory-reliant (every ``memory_reliant_every``-th task): after the
      distractor the proposals are unanimous but lead nowhere, and only
      the memory of demonstrated plans separates the right city.

    Every branch below the distractor claims to be one step from done,
    which lures a planner driven purely by estimated future cost.
    """
    rng = random.Random(seed)
    demos = [(c, rng.choice(["buy", "rent"]), *_home_request(rng)) for c in DEMO_CITIES]
    tasks = []
    for i in range(n_tasks):
        reliant = memory_reliant_every > 0 and i % memory_reliant_every == memory_reliant_every - 1
        if reliant:
            city, mode, rooms, budget = demos[i % len(demos)]
        else:
            city, mode = TASK_CITIES[i % len(TASK_CITIES)], rng.choice(["buy", "rent"])
            rooms, budget = _home_request(rng)
        wrong = rng.choice(DISTRACTOR_CITIES)
        other_mode = "rent" if mode == "buy" else "buy"
        plan = _home_plan(city, mode, rooms, budget)
        d = f"set_location(city='{wrong}')"
        loop = f"set_budget(max={rng.randrange(200, 1500) * 1000})"
        if reliant:
            trap = [(loop, 1.0)]
        else:
            trap = [
                (loop, 0.2),
                (f"set_bedrooms(n={rng.randint(1, 5)})", 0.2),
                (f"set_location(city='{rng.choice(DISTRACTOR_CITIES)}')", 0.2),
                (f"set_buy_or_rent(mode='{other_mode}')", 0.2),
                ("Finish()", 0.2),
            ]
        script = [
            _entry([], [(d, distractor_prob), (plan[0], 1.0 - distractor_prob)], plan),
            _entry([d], trap, ["Finish()"]),
        ]
        for step in range(1, len(plan)):
            script.append(_entry(plan[:step], [(plan[step], 1.0)], plan[step:]))
        tasks.append({
            "task_id": f"home-{i:02d}",
            "description": f"I want to {mode} a home in {city} with {rooms} bedrooms. My budget is ${budget}.",
            "seed": seed * 1000 + i,
            "registry": HOME_REGISTRY,
            "rules": HOME_RULES,
            "goal": {"location": city, "mode": mode, "bedrooms": str(rooms), "budget": str(budget),
                     "searched": "true"},
            "script": script,
            "seed_plans": [_home_plan(*demos[i % len(demos)])],
            "solution": plan,
            "memory_reliant": reliant,
        })
    return {"name": "crafted-distractor", "env": "home_search", "memory_writeback": False, "tasks": tasks}


def _partition(rng: random.Random, total: int, parts: int) -> list[int]:
    cuts = sorted(rng.sample(range(1, total), parts - 1))
    return [b - a for a, b in zip([0] + cuts, cuts + [total])]


def random_enumerable_task(rng: random.Random, task_id: str, k: int = 10, max_branching: int = 3,
                           max_depth: int = 4, finish_prob: float = 0.25, n_seed_plans: int = 2) -> dict:
    """A fully scripted finite tree: every leaf is a distinct ``Finish`` action.

    Frequencies are exact (quota sampling with integer counts out of ``k``),
    so the set of reachable paths and their costs are known in advance.
    """
    script = []
    leaves: list[list[str]] = []
    counter = [0]

    def grow(history: list[str]):
        depth = len(history)
        width = rng.randint(1, max_branching)
        counts = _partition(rng, k, width)
        actions = []
        for _ in range(width):
            counter[0] += 1
            last = depth + 1 == max_depth or (depth > 0 and rng.random() < finish_prob)
            actions.append(f"Finish(answer={counter[0]})" if last else f"act(n={counter[0]})")
        script.append(_entry(history, [(a, c / k) for a, c in zip(actions, counts)], actions[:1]))
        for a in actions:
            if a.startswith("Finish"):
                leaves.append(history + [a])
            else:
                grow(history + [a])

    grow([])
    seeds = [leaves[rng.randrange(len(leaves))] for _ in range(n_seed_plans)]
    return {
        "task_id": task_id,
        "description": f"enumerable tree {task_id}",
        "seed": rng.randrange(2 ** 31),
        "registry": {"act": {"params": ["n"], "sets": {}}},
        "rules": [],
        "goal": {},
        "script": script,
        "seed_plans": seeds,
    }


def enumerable_suite(n_tasks: int = 100, seed: int = 0, **kwargs) -> dict:
    rng = random.Random(seed)
    tasks = [random_enumerable_task(rng, f"tree-{i:03d}", **kwargs) for i in range(n_tasks)]
    # each tree keeps its own memory
    for t in tasks:
        t["env"] = t["task_id"]
    return {"name": "enumerable-trees", "memory_writeback": False, "tasks": tasks}


def arithmetic_suite(n_tasks: int = 10, seed: int = 0) -> dict:
    """Two-step word problems whose majority reasoning step is sometimes a slip."""
    rng = random.Random(seed)
    tasks = []
    for i in range(n_tasks):
        a, b, c = rng.randint(2, 9), rng.randint(2, 9), rng.randint(2, 20)
        right = a * b + c
        wrong = a * b + c + rng.choice([-2, -1, 1, 2])
        s1 = f"compute({a} * {b} = {a * b})"
        s1_bad = f"compute({a} * {b} = {a * b + 1})"
        ok, bad = f"Finish(answer={right})", f"Finish(answer={wrong})"
        tasks.append({
            "task_id": f"arith-{i:02d}",
            "description": f"A crate holds {a} rows of {b} apples and {c} loose apples. How many apples?",
            "seed": seed * 1000 + i,
            "ground_truth": right,
            "script": [
                _entry([], [(s1, 0.7), (s1_bad, 0.3)], [s1, ok], sampling="iid"),
                _entry([s1], [(ok, 0.8), (bad, 0.2)], [ok], sampling="iid"),
                _entry([s1_bad], [(bad, 0.9), ("Finish(answer=six)", 0.1)], [bad], sampling="iid"),
            ],
        })
    return {"name": "arithmetic", "env": "arithmetic", "memory_writeback": False, "tasks": tasks}
