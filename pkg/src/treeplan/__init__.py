"""Best-first tree search planner for tool-using agents, with search baselines and a scripted harness."""
from .actions import ActionRecord, canonicalize_action
from .cost import CostConfig, cumulative_cost, future_cost, step_cost, total_cost
from .errors import (
    BackendUnavailable, BudgetExceeded, DegenerateInput, DomainError, EmptyBatch, ParseError,
    PlannerError, SearchAborted, UnknownNode, UnscoredNode,
)
from .lcs import BACKEND as LCS_BACKEND, lcs_length
from .memory import MemoryEntry, MemoryStore, lcs_score
from .search import (
    MctsConfig, SearchResult, beam_bfs, dfs_backtrack, greedy_closed_loop, mcts_uct, toolchain_star,
)
from .tree import PlanNode, SearchTree, add_child, path_to_root

__version__ = "0.1.0"
