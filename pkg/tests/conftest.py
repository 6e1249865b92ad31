"""Shared helpers: independent oracles and small scripted tasks."""
import sys
from dataclasses import dataclass
from itertools import combinations

import pytest

from treeplan.actions import canonicalize_action
from treeplan.envs import ToyToolEnv
from treeplan.memory import MemoryEntry, MemoryStore
from treeplan.proposer.base import ProposerConfig
from treeplan.proposer.scripted import ScriptEntry, ScriptedProposer
from treeplan.search import VirtualClock


def brute_lcs(a, b) -> int:
    """Longest subsequence of ``a`` that is also a subsequence of ``b``, by enumeration."""

    def is_subseq(sub, seq):
        it = iter(seq)
        return all(x in it for x in sub)

    for r in range(min(len(a), len(b)), 0, -1):
        if any(is_subseq(c, b) for c in combinations(a, r)):
            return r
    return 0


def acts(*raw):
    return [canonicalize_action(r) for r in raw]


def store_of(*plans, env=None):
    return MemoryStore(MemoryEntry("demo", tuple(acts(*p)), env=env) for p in plans)


@dataclass
class Task:
    task_id: str
    description: str


def entry(prefix, cands, imagined=(), sampling="quota"):
    return ScriptEntry.from_dict({
        "history_key_prefix": list(prefix),
        "candidates": [{"action": a, "prob": p} for a, p in cands],
        "imagined_completion": list(imagined),
        "sampling": sampling,
    })


def proposer(entries, k=10, seed=0):
    return ScriptedProposer(entries, ProposerConfig(k=k), seed=seed)


def run_kwargs(p):
    return {"clock": VirtualClock(p)}


HOME_REGISTRY = {
    "set_location": {"params": ["city"], "sets": {"location": "$city"}},
    "set_buy_or_rent": {"params": ["mode"], "sets": {"mode": "$mode"}},
    "set_budget": {"params": ["max"], "sets": {"budget": "$max"}},
    "search": {"params": [], "sets": {"searched": "true"}},
}


@pytest.fixture
def home_env():
    return ToyToolEnv.from_json(
        HOME_REGISTRY, [["set_location", "search"], ["set_buy_or_rent", "search"]],
        {"location": "Pittsburgh", "mode": "buy", "searched": "true"})


THREE_STEP = ["set_location(city='Pittsburgh')", "set_buy_or_rent(mode='buy')", "search()", "Finish()"]


def exhaustive_min_g(task: dict, alpha: float = 0.5) -> float:
    """Minimum cumulative step cost over every root-to-finish path of a scripted tree.

    Walks the raw script table directly and scores prefixes with the
    enumeration LCS oracle, independent of the search and memory code.
    """
    table = {tuple(e["history_key_prefix"]): e for e in task["script"]}
    memory = [list(p) for p in task.get("seed_plans", [])]
    k = 10

    def step(prefix, g2):
        if not memory:
            return 1.0 - g2
        g1 = max(brute_lcs(prefix, m) / min(len(prefix), len(m)) for m in memory)
        return (1.0 - g1) ** alpha * (1.0 - g2) ** (1.0 - alpha)

    best = float("inf")
    stack = [((), 0.0)]
    while stack:
        prefix, g = stack.pop()
        for c in table[prefix]["candidates"]:
            path = prefix + (c["action"],)
            cost = g + step(list(path), round(c["prob"] * k) / k)
            if c["action"].startswith("Finish"):
                best = min(best, cost)
            else:
                stack.append((path, cost))
    return best


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.line(n))
