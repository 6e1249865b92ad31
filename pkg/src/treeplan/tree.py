"""Append-only search tree arena with a cost-ordered frontier."""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Optional

from .actions import ActionRecord
from .errors import UnknownNode

FRONTIER = "frontier"
EXPANDED = "expanded"
TERMINAL = "terminal"
PRUNED = "pruned"


@dataclass
class PlanNode:
    node_id: int
    parent: Optional[int]
    action: Optional[ActionRecord]
    depth: int
    insertion: int
    g1: Optional[float] = None
    g2: float = 0.0
    step_cost: float = 0.0
    g_cum: float = 0.0
    h1: Optional[float] = None
    h2: Optional[float] = None
    h_cost: float = 0.0
    f: float = 0.0
    status: str = FRONTIER
    scored: bool = False
    terminal: bool = False
    children: list[int] = field(default_factory=list)

    def order_key(self) -> tuple[float, int, int]:
        # ties: shallower first, then earlier insertion
        return (self.f, self.depth, self.insertion)


class SearchTree:
    """Nodes live in ``self.nodes`` indexed by id; the root (id 0) has no action."""

    def __init__(self, description: str = ""):
        self.description = description
        self.nodes: list[PlanNode] = []
        self.insertion_counter = 0
        self._heap: list[tuple[float, int, int, int]] = []
        root = self._append(None, None, 0)
        root.scored = True
        self.root = root.node_id

    def _append(self, parent, action, depth) -> PlanNode:
        node = PlanNode(len(self.nodes), parent, action, depth, self.insertion_counter)
        self.insertion_counter += 1
        self.nodes.append(node)
        return node

    def __len__(self):
        return len(self.nodes)

    def __getitem__(self, node_id: int) -> PlanNode:
        return self.node(node_id)

    def node(self, node_id: int) -> PlanNode:
        if not isinstance(node_id, int) or not 0 <= node_id < len(self.nodes):
            raise UnknownNode(node_id)
        return self.nodes[node_id]

    def add_child(self, parent: int, action: ActionRecord) -> int:
        p = self.node(parent)
        child = self._append(parent, action, p.depth + 1)
        p.children.append(child.node_id)
        return child.node_id

    def path_to_root(self, n: int) -> list[ActionRecord]:
        """Actions from the first step down to ``n`` (the root contributes none)."""
        node = self.node(n)
        out = []
        while node.parent is not None:
            out.append(node.action)
            node = self.nodes[node.parent]
        out.reverse()
        return out

    def ancestors(self, n: int) -> list[int]:
        """Node ids from the first non-root ancestor down to ``n`` inclusive."""
        node = self.node(n)
        ids = []
        while node.parent is not None:
            ids.append(node.node_id)
            node = self.nodes[node.parent]
        ids.reverse()
        return ids

    # frontier ---------------------------------------------------------

    def push(self, n: int) -> None:
        node = self.node(n)
        node.status = FRONTIER
        heapq.heappush(self._heap, (*node.order_key(), n))

    def pop(self) -> int | None:
        """Remove and return the frontier node with the smallest (f, depth, insertion)."""
        while self._heap:
            *_, n = heapq.heappop(self._heap)
            if self.nodes[n].status == FRONTIER:
                return n
        return None

    def frontier(self) -> list[int]:
        live = [n for *_, n in self._heap if self.nodes[n].status == FRONTIER]
        return sorted(set(live), key=lambda n: self.nodes[n].order_key())

    def check_invariants(self) -> None:
        for node in self.nodes[1:]:
            assert node.parent is not None and node.parent < node.node_id
            assert node.depth == self.nodes[node.parent].depth + 1
        for n in self.frontier():
            assert not self.nodes[n].children


def add_child(tree: SearchTree, parent: int, action: ActionRecord) -> int:
    return tree.add_child(parent, action)


def path_to_root(tree: SearchTree, n: int) -> list[ActionRecord]:
    return tree.path_to_root(n)
