"""Per-step, cumulative, future and total cost arithmetic.

Scores are unit-interval values where higher is better; costs are their
weighted geometric-mean complements. ``None`` marks an absent score (for
instance a memory heuristic with an empty memory), in which case the other
component decides alone.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DomainError, UnscoredNode

ABLATIONS = frozenset({"g1", "g2", "h1", "h2", "g", "h"})


@dataclass(frozen=True)
class CostConfig:
    alpha: float = 0.5
    beta: float = 0.5
    k: int = 10
    T: int = 20
    ablations: frozenset = field(default_factory=frozenset)
    clamp_h2: bool = True

    def __post_init__(self):
        object.__setattr__(self, "ablations", frozenset(a.removeprefix("drop_") for a in self.ablations))
        unknown = self.ablations - ABLATIONS
        if unknown:
            raise ValueError(f"unknown ablations: {sorted(unknown)}")
        if not (0.0 <= self.alpha <= 1.0 and 0.0 <= self.beta <= 1.0):
            raise ValueError("alpha and beta must lie in [0, 1]")
        if self.k < 1 or self.T < 1:
            raise ValueError("k and T must be positive")
        if "g" in self.ablations and self.ablations & {"g1", "g2"}:
            raise ValueError("drop_g excludes drop_g1/drop_g2")
        if "h" in self.ablations and self.ablations & {"h1", "h2"}:
            raise ValueError("drop_h excludes drop_h1/drop_h2")

    def drops(self, name: str) -> bool:
        return name in self.ablations

    @property
    def uses_g1(self) -> bool:
        return not self.ablations & {"g", "g1"}

    @property
    def uses_h1(self) -> bool:
        return not self.ablations & {"h", "h1"}

    @property
    def uses_h2(self) -> bool:
        return not self.ablations & {"h", "h2"}


def _check(name: str, value: float | None) -> None:
    if value is not None and not 0.0 <= value <= 1.0:
        raise DomainError(f"{name}={value!r} outside [0, 1]")


def _factor(score: float, weight: float) -> float:
    # 0**0 is taken as 1 so a zero-weight term never vetoes the other one
    if weight == 0.0:
        return 1.0
    return (1.0 - score) ** weight


def _geometric(a: float | None, b: float | None, weight: float) -> float:
    if a is None and b is None:
        return 1.0
    if a is None:
        return 1.0 - b
    if b is None:
        return 1.0 - a
    return _factor(a, weight) * _factor(b, 1.0 - weight)


def step_cost(g1: float | None, g2: float | None, cfg: CostConfig) -> float:
    _check("g1", g1)
    _check("g2", g2)
    if cfg.drops("g1"):
        g1 = None
    if cfg.drops("g2"):
        g2 = None
    return _geometric(g1, g2, cfg.alpha)


def future_cost(h1: float | None, h2: float | None, cfg: CostConfig) -> float:
    _check("h1", h1)
    _check("h2", h2)
    if cfg.drops("h"):
        return 0.0
    if cfg.drops("h1"):
        h1 = None
    if cfg.drops("h2"):
        h2 = None
    return _geometric(h1, h2, cfg.beta)


def imagination_score(depth: int, imagined_total: int, cfg: CostConfig | None = None) -> float | None:
    """Share of an imagined full plan already covered by the current path."""
    if imagined_total <= 0:
        return None
    ratio = depth / imagined_total
    if ratio > 1.0:
        if cfg is not None and not cfg.clamp_h2:
            raise DomainError(f"imagination ratio {ratio} exceeds 1")
        ratio = 1.0
    return ratio


def cumulative_cost(tree, n: int, cfg: CostConfig) -> float:
    """Sum of step costs from the first action down to ``n``; caches ``g_cum``."""
    total = 0.0
    for i in tree.ancestors(n):
        node = tree.nodes[i]
        if not node.scored:
            raise UnscoredNode(i)
        total += node.step_cost
    tree.node(n).g_cum = total
    return total


def total_cost(node, cfg: CostConfig) -> float:
    if cfg.drops("g"):
        return node.h_cost
    if cfg.drops("h"):
        return node.g_cum
    return node.g_cum + node.h_cost
