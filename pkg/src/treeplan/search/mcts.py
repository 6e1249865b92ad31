"""UCT Monte Carlo tree search with proposer-driven rollouts."""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass

from ..cost import CostConfig, step_cost
from ..errors import EmptyBatch
from ..memory import MemoryStore
from ..tree import EXPANDED, TERMINAL
from .common import ABORTING, BUDGET_EXHAUSTED, SUCCESS, Run, SearchResult, g_only


@dataclass(frozen=True)
class MctsConfig:
    exploration_c: float = math.sqrt(2)
    rollouts_per_iteration: int = 1
    rollout_depth_cap: int = 8
    iterations: int = 20

    def __post_init__(self):
        if self.exploration_c < 0:
            raise ValueError("exploration_c must be >= 0")
        if min(self.rollouts_per_iteration, self.rollout_depth_cap, self.iterations) < 1:
            raise ValueError("rollouts, depth cap and iterations must be positive")


class _Mcts:
    def __init__(self, run: Run, mcfg: MctsConfig):
        self.run = run
        self.tree = run.tree
        self.mcfg = mcfg
        self.visits: dict[int, int] = defaultdict(int)
        self.value: dict[int, float] = defaultdict(float)

    def uct_child(self, n: int) -> int:
        children = self.tree.nodes[n].children
        for c in children:
            if self.visits[c] == 0:
                return c
        log_parent = math.log(self.visits[n])
        c_explore = self.mcfg.exploration_c

        def score(c):
            mean = self.value[c] / self.visits[c]
            return mean + c_explore * math.sqrt(log_parent / self.visits[c])

        # max() keeps the earliest child on ties
        return max(children, key=score)

    def select(self) -> list[int]:
        path = [self.tree.root]
        node = self.tree.nodes[self.tree.root]
        while node.status == EXPANDED and node.children:
            node = self.tree.nodes[self.uct_child(node.node_id)]
            path.append(node.node_id)
        return path

    def path_reward(self, actions, costs, reached_terminal: bool) -> float:
        if reached_terminal and self.run.env.verify(actions):
            return 1.0
        return 1.0 - (sum(costs) / len(costs) if costs else 1.0)

    def rollout(self, n: int) -> float:
        """Follow modal proposals from ``n`` until a terminal or the depth cap."""
        run, tree = self.run, self.tree
        actions = tree.path_to_root(n)
        costs = [tree.nodes[i].step_cost for i in tree.ancestors(n)]
        terminal = tree.nodes[n].terminal
        calls0 = run.rec.calls
        while not terminal and len(actions) < self.mcfg.rollout_depth_cap:
            try:
                batch = run.proposer.propose_next(run.description, actions)
            except EmptyBatch:
                break
            action, freq = batch.modal()
            actions = actions + [action]
            g1 = run.memory.g1(actions) if run.memory is not None and run.cfg.uses_g1 else None
            costs.append(step_cost(g1, freq, run.cfg))
            terminal = run.env.is_terminal(actions)
        reward = self.path_reward(actions, costs, terminal)
        run.rec.emit("update", tree.nodes[n], rollout_calls=run.rec.calls - calls0,
                     start_depth=tree.nodes[n].depth, rollout_depth=len(actions), reward=reward)
        return reward

    def best_leaf(self) -> int:
        n = self.tree.root
        while True:
            visited = [c for c in self.tree.nodes[n].children if self.visits[c] > 0]
            if not visited:
                return n
            n = max(visited, key=lambda c: self.visits[c])


def mcts_uct(task, env, proposer, memory: MemoryStore | None, cfg: CostConfig,
             mcts_cfg: MctsConfig | None = None, *, clock=None,
             run_id: str | None = None) -> SearchResult:
    """UCT search; the answer follows the most-visited child from the root.

    Rewards are 1 for a rollout that reaches a verified terminal and
    ``1 - mean step cost`` of the simulated path otherwise. Every rollout
    step is a proposer call, on top of one call per tree expansion.
    """
    mcfg = mcts_cfg or MctsConfig()
    run = Run("mcts", task, env, proposer, g_only(cfg), memory, clock, run_id)
    m = _Mcts(run, mcfg)
    tree = run.tree
    try:
        for _ in range(mcfg.iterations):
            path = m.select()
            leaf = tree.nodes[path[-1]]
            run.rec.emit("select", leaf)
            if leaf.terminal:
                reward = m.rollout(leaf.node_id)
            elif leaf.status == EXPANDED:
                reward = 0.0  # expanded before but produced nothing
            else:
                if run.expanded >= cfg.T:
                    break
                leaf.status = EXPANDED
                try:
                    batch = run.propose(leaf.node_id)
                except EmptyBatch as exc:
                    run.rec.emit("expand", leaf, children=0, error=str(exc))
                    reward = 0.0
                else:
                    run.rec.emit("expand", leaf, children=len(batch.classes),
                                 parse_failures=batch.parse_failures)
                    children = run.add_children(leaf.node_id, batch, imagine=False)
                    path.append(children[0])
                    reward = sum(m.rollout(children[0]) for _ in range(mcfg.rollouts_per_iteration))
                    reward /= mcfg.rollouts_per_iteration
            for n in path:
                m.visits[n] += 1
                m.value[n] += reward
    except ABORTING as exc:
        raise run.abort(exc) from exc

    best = m.best_leaf()
    node = tree.nodes[best]
    if best != tree.root and node.terminal:
        if env.verify(tree.path_to_root(best)):
            node.status = TERMINAL
            return run.finish(SUCCESS, best)
        return run.finish(BUDGET_EXHAUSTED, best, reason="most-visited terminal failed verification")
    return run.finish(BUDGET_EXHAUSTED, None if best == tree.root else best)
