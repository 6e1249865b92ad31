from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Protocol, Sequence

from ..actions import DEFAULT_FINISH_TOKEN, ActionRecord, try_canonicalize
from ..errors import EmptyBatch

log = logging.getLogger(__name__)

DEFAULT_TEMPLATE = (
    "You are an agent that solves tasks by calling tools.\n"
    "Available tools:\n{tool_docs}\n\n"
    "Examples of solved tasks:\n{demonstrations}\n\n"
    "Task: {task}\n"
    "Actions taken so far:\n{history}\n\n"
    "Reply with the single next action, written as Tool(arg=value, ...). "
    "Reply Finish(answer=...) when the task is complete."
)

TEMPLATE_SLOTS = ("{tool_docs}", "{demonstrations}", "{task}", "{history}")


@dataclass(frozen=True)
class ProposerConfig:
    k: int = 10
    temperature: float = 1.0
    prompt_template: str = DEFAULT_TEMPLATE
    finish_token: str = DEFAULT_FINISH_TOKEN
    max_imagined_steps: int = 20

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.max_imagined_steps < 1:
            raise ValueError("max_imagined_steps must be >= 1")
        missing = [s for s in TEMPLATE_SLOTS if s not in self.prompt_template]
        if missing:
            raise ValueError(f"prompt_template lacks slots {missing}")


@dataclass
class ProposalBatch:
    samples: list[str]
    classes: list[tuple[ActionRecord, int]]
    parse_failures: int = 0
    k: int = field(default=0)

    def __post_init__(self):
        if not self.k:
            self.k = len(self.samples)

    def frequencies(self) -> list[tuple[ActionRecord, float]]:
        return [(a, count / self.k) for a, count in self.classes]

    def modal(self) -> tuple[ActionRecord, float]:
        """Highest-frequency class; the earliest-sampled one wins ties."""
        best = max(range(len(self.classes)), key=lambda i: (self.classes[i][1], -i))
        a, count = self.classes[best]
        return a, count / self.k


class EquivalenceOracle(Protocol):
    def equivalent(self, a: ActionRecord, b: ActionRecord) -> bool: ...


class CanonicalKeyOracle:
    """Two actions are the same step iff their canonical keys match."""

    def equivalent(self, a: ActionRecord, b: ActionRecord) -> bool:
        return a.canonical_key == b.canonical_key


def group_equivalent(samples: Sequence[str], oracle: EquivalenceOracle | None = None,
                     k: int | None = None,
                     finish_token: str = DEFAULT_FINISH_TOKEN) -> ProposalBatch:
    """Parse raw samples and group them into equivalence classes.

    Frequencies are always divided by ``k`` (defaults to ``len(samples)``),
    so unparseable samples lower every class's share instead of being
    renormalized away.
    """
    k = k or len(samples)
    classes: list[list] = []
    by_key: dict[str, int] = {}
    failures = 0
    for raw in samples:
        action = try_canonicalize(raw, finish_token)
        if action is None:
            failures += 1
            log.debug("discarding unparseable sample %r", raw)
            continue
        if oracle is None or isinstance(oracle, CanonicalKeyOracle):
            idx = by_key.get(action.canonical_key)
        else:
            idx = next((i for i, c in enumerate(classes) if oracle.equivalent(c[0], action)), None)
        if idx is None:
            by_key[action.canonical_key] = len(classes)
            classes.append([action, 1])
        else:
            classes[idx][1] += 1
    return ProposalBatch(list(samples), [(a, n) for a, n in classes], failures, k)


def batch_or_raise(batch: ProposalBatch) -> ProposalBatch:
    if not batch.classes:
        raise EmptyBatch(f"all {batch.k} samples failed to parse")
    return batch


class Proposer(Protocol):
    """Per-run action source. ``calls`` counts backend calls made so far."""

    calls: int

    def propose_next(self, task: str, history: Sequence[ActionRecord]) -> ProposalBatch: ...

    def imagine_completion(self, task: str, history: Sequence[ActionRecord]) -> list[ActionRecord]: ...
