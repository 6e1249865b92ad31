"""Comparison planners: greedy closed loop, level-synchronous beam BFS, DFS with pruning."""
from __future__ import annotations

from ..cost import CostConfig
from ..errors import EmptyBatch
from ..tree import EXPANDED, PRUNED
from .common import ABORTING, BUDGET_EXHAUSTED, DEAD_END, SUCCESS, Run, SearchResult, g_only


def greedy_closed_loop(task, env, proposer, cfg: CostConfig, *, clock=None,
                       run_id: str | None = None) -> SearchResult:
    """Commit to the most frequent proposal at every step; never backtrack."""
    run = Run("greedy", task, env, proposer, g_only(cfg), None, clock, run_id)
    tree = run.tree
    n = tree.root
    try:
        for _ in range(cfg.T):
            node = tree.nodes[n]
            run.rec.emit("select", node)
            node.status = EXPANDED
            try:
                batch = run.propose(n)
            except EmptyBatch as exc:
                run.rec.emit("expand", node, children=0, error=str(exc))
                return run.finish(DEAD_END, n, reason="empty batch")
            action, freq = batch.modal()
            run.rec.emit("expand", node, children=1, parse_failures=batch.parse_failures)
            n = tree.add_child(n, action)
            run.score(n, freq, imagine=False)
            if tree.nodes[n].terminal:
                if run.try_terminal(n):
                    return run.finish(SUCCESS, n)
                return run.finish(DEAD_END, n, reason=f"verify failed: {run.last_verdict.reason}")
    except ABORTING as exc:
        raise run.abort(exc) from exc
    return run.finish(BUDGET_EXHAUSTED, n)


def beam_bfs(task, env, proposer, cfg: CostConfig, beam_width: int = 3, *, clock=None,
             run_id: str | None = None) -> SearchResult:
    """Expand whole levels, keeping the ``beam_width`` lowest-g nodes of each."""
    if beam_width < 1:
        raise ValueError("beam_width must be >= 1")
    run = Run("bfs", task, env, proposer, g_only(cfg), None, clock, run_id)
    tree = run.tree
    key = lambda i: (tree.nodes[i].g_cum, tree.nodes[i].insertion)  # noqa: E731
    beam = [tree.root]
    try:
        while beam:
            level: list[int] = []
            for n in beam:
                node = tree.nodes[n]
                if run.expanded >= cfg.T and not node.terminal:
                    return run.fallback(beam + level, key)
                run.rec.emit("select", node)
                if node.terminal:
                    if run.try_terminal(n):
                        return run.finish(SUCCESS, n)
                    continue
                node.status = EXPANDED
                try:
                    batch = run.propose(n)
                except EmptyBatch as exc:
                    run.rec.emit("expand", node, children=0, error=str(exc))
                    continue
                run.rec.emit("expand", node, children=len(batch.classes), parse_failures=batch.parse_failures)
                level.extend(run.add_children(n, batch, imagine=False))
            level.sort(key=key)
            for n in level[beam_width:]:
                tree.nodes[n].status = PRUNED
            beam = level[:beam_width]
    except ABORTING as exc:
        raise run.abort(exc) from exc
    return run.finish(DEAD_END, None, reason="beam empty")


def dfs_backtrack(task, env, proposer, cfg: CostConfig, prune_threshold: float = 0.9, *,
                  clock=None, run_id: str | None = None) -> SearchResult:
    """Depth-first descent along the cheapest child.

    Children whose step cost exceeds ``prune_threshold`` are never entered;
    exhausted or failed branches are backtracked out of.
    """
    run = Run("dfs", task, env, proposer, g_only(cfg), None, clock, run_id)
    tree = run.tree
    stack = [tree.root]
    try:
        while stack:
            n = stack.pop()
            node = tree.nodes[n]
            if run.expanded >= cfg.T and not node.terminal:
                stack.append(n)
                return run.fallback(stack, key=lambda i: (tree.nodes[i].g_cum, tree.nodes[i].insertion))
            run.rec.emit("select", node)
            if node.terminal:
                if run.try_terminal(n):
                    return run.finish(SUCCESS, n)
                continue
            node.status = EXPANDED
            try:
                batch = run.propose(n)
            except EmptyBatch as exc:
                run.rec.emit("expand", node, children=0, error=str(exc))
                continue
            run.rec.emit("expand", node, children=len(batch.classes), parse_failures=batch.parse_failures)
            kept = []
            for c in run.add_children(n, batch, imagine=False):
                if tree.nodes[c].step_cost > prune_threshold:
                    tree.nodes[c].status = PRUNED
                else:
                    kept.append(c)
            kept.sort(key=lambda i: (tree.nodes[i].step_cost, tree.nodes[i].insertion), reverse=True)
            stack.extend(kept)
    except ABORTING as exc:
        raise run.abort(exc) from exc
    return run.finish(DEAD_END, None, reason="all branches exhausted")
