from .astar import toolchain_star
from .baselines import beam_bfs, dfs_backtrack, greedy_closed_loop
from .common import (
    BUDGET_EXHAUSTED,
    DEAD_END,
    SUCCESS,
    RealClock,
    SearchResult,
    TraceEvent,
    VirtualClock,
)
from .mcts import MctsConfig, mcts_uct

__all__ = [
    "BUDGET_EXHAUSTED",
    "DEAD_END",
    "SUCCESS",
    "MctsConfig",
    "RealClock",
    "SearchResult",
    "TraceEvent",
    "VirtualClock",
    "beam_bfs",
    "dfs_backtrack",
    "greedy_closed_loop",
    "mcts_uct",
    "toolchain_star",
]
