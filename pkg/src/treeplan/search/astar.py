"""Best-first tree search over proposed actions, ordered by f = g + h."""
from __future__ import annotations

from ..cost import CostConfig
from ..errors import EmptyBatch
from ..memory import MemoryStore
from ..tree import EXPANDED
from .common import ABORTING, DEAD_END, SUCCESS, Run, SearchResult


def toolchain_star(task, env, proposer, memory: MemoryStore | None, cfg: CostConfig,
                   *, clock=None, run_id: str | None = None) -> SearchResult:
    """Run up to ``cfg.T`` select/expand/update iterations.

    Each expansion is one ``propose_next`` call plus one
    ``imagine_completion`` per new child (when the imagination score is
    in use). Terminal children are queued with zero future cost and only
    accepted once selected and verified by ``env``; a failed verification
    prunes the node and the search continues.
    """
    run = Run("toolchain", task, env, proposer, cfg, memory, clock, run_id)
    tree = run.tree
    tree.push(tree.root)
    try:
        for _ in range(cfg.T):
            n = tree.pop()
            if n is None:
                return run.finish(DEAD_END, None, reason="frontier empty")
            node = tree.nodes[n]
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
            for child in run.add_children(n, batch, imagine=True):
                tree.push(child)
    except ABORTING as exc:
        raise run.abort(exc) from exc

    frontier = tree.frontier()
    if not frontier:
        return run.finish(DEAD_END, None, reason="frontier empty")
    return run.fallback(frontier, key=lambda i: tree.nodes[i].order_key())
