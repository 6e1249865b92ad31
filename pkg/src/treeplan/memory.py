"""Long-term memory of successful plans and the LCS-based heuristics over it."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, Union

from .actions import DEFAULT_FINISH_TOKEN, ActionRecord, canonicalize_action
from .errors import DegenerateInput
from .lcs import Encoder, best_ratio_index, lcs_length, lcs_str

ActionLike = Union[ActionRecord, str]

SEED = "seed"
LEARNED = "learned"


def _key(a: ActionLike) -> str:
    return a.canonical_key if isinstance(a, ActionRecord) else a


def _keys(seq: Iterable[ActionLike]) -> tuple[str, ...]:
    return tuple(_key(a) for a in seq)


@dataclass(frozen=True)
class MemoryEntry:
    task_hint: str
    plan: tuple[ActionRecord, ...]
    origin: str = SEED
    env: str | None = None

    def __post_init__(self):
        if not self.plan:
            raise ValueError("memory plans must contain at least one action")
        if any(a.is_finish for a in self.plan[:-1]):
            raise ValueError("a finish action may only appear last in a memory plan")

    @property
    def length(self) -> int:
        return len(self.plan)

    @property
    def keys(self) -> tuple[str, ...]:
        return _keys(self.plan)


def lcs_score(s: Sequence[ActionLike], m: MemoryEntry | Sequence[ActionLike]) -> float:
    """LCS of two plans normalized by the shorter plan length."""
    other = m.keys if isinstance(m, MemoryEntry) else _keys(m)
    if len(s) == 0:
        raise DegenerateInput("cannot score an empty plan prefix")
    if len(other) == 0:
        raise DegenerateInput("cannot score against an empty plan")
    return lcs_length(_keys(s), other) / min(len(s), len(other))


class MemoryStore:
    """Ordered, deduplicated set of :class:`MemoryEntry` plans."""

    def __init__(self, entries: Iterable[MemoryEntry] = ()):
        self.entries: list[MemoryEntry] = []
        self._seen: set[tuple[str, ...]] = set()
        self._enc = Encoder()
        self._encoded: list[str] = []
        # key -> [(pos, T_j)] using the first occurrence per entry
        self._positions: dict[str, list[tuple[int, int]]] = {}
        # every distinct stored action key, in (entry, position) order
        self._action_keys: list[str] = []
        self._h1_cache: dict[str, float | None] = {}
        for e in entries:
            self.add(e)

    def __len__(self):
        return len(self.entries)

    def __bool__(self):
        return bool(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def origins(self) -> list[str]:
        return [e.origin for e in self.entries]

    def add(self, entry: MemoryEntry) -> bool:
        keys = entry.keys
        if keys in self._seen:
            return False
        self._seen.add(keys)
        self.entries.append(entry)
        self._encoded.append(self._enc.encode(keys))
        seen_here = set()
        for pos, k in enumerate(keys, start=1):
            if k in seen_here:
                continue
            seen_here.add(k)
            if k not in self._positions:
                self._action_keys.append(k)
            self._positions.setdefault(k, []).append((pos, entry.length))
        self._h1_cache.clear()
        return True

    def copy(self) -> MemoryStore:
        return MemoryStore(self.entries)

    # heuristics -------------------------------------------------------

    def g1(self, s: Sequence[ActionLike]) -> float | None:
        if not self.entries:
            return None
        if len(s) == 0:
            raise DegenerateInput("cannot score an empty plan prefix")
        query = self._enc.encode(_keys(s), grow=False)
        best = 0.0
        for enc in self._encoded:
            score = lcs_str(query, enc) / min(len(query), len(enc))
            if score > best:
                best = score
                if best >= 1.0:
                    break
        return best

    def position_score(self, a: ActionLike) -> float | None:
        hits = self._positions.get(_key(a))
        if not hits:
            return None
        return sum(pos / length for pos, length in hits) / len(hits)

    def closest_action(self, a: ActionLike) -> str | None:
        """Stored action key lexically closest to ``a`` (exact matches win)."""
        key = _key(a)
        if key in self._positions:
            return key
        idx, _ = best_ratio_index(key, self._action_keys)
        return self._action_keys[idx] if idx >= 0 else None

    def h1(self, a: ActionLike) -> float | None:
        key = _key(a)
        if key not in self._h1_cache:
            closest = self.closest_action(key)
            self._h1_cache[key] = None if closest is None else self.position_score(closest)
        return self._h1_cache[key]


def cumulative_heuristic_g1(s: Sequence[ActionLike], store: MemoryStore) -> float | None:
    """Best LCS score of the prefix against any stored plan; None for an empty store."""
    return store.g1(s)


def relative_position_score(a: ActionLike, store: MemoryStore) -> float | None:
    """Mean of first-occurrence ``pos/T_j`` over stored plans containing ``a``."""
    return store.position_score(a)


def future_heuristic_h1(a: ActionLike, store: MemoryStore) -> float | None:
    return store.h1(a)


def record_success(store: MemoryStore, plan: Sequence[ActionRecord], task_hint: str,
                   env: str | None = None) -> bool:
    """Add a verified plan as a learned entry; returns False for duplicates."""
    return store.add(MemoryEntry(task_hint, tuple(plan), LEARNED, env))


def char_lcs_ratio(a: str, b: str) -> float:
    shorter = min(len(a), len(b))
    return lcs_length(a, b) / shorter if shorter else 0.0


# persistence ----------------------------------------------------------

def load_memory(path: str | Path, env: str | None = None,
                finish_token: str = DEFAULT_FINISH_TOKEN) -> MemoryStore:
    """Read a JSONL memory file; lines tagged with another env are skipped."""
    store = MemoryStore()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            row = json.loads(line)
            if env is not None and row.get("env") not in (None, env):
                continue
            plan = tuple(canonicalize_action(t, finish_token) for t in row["plan"])
            store.add(MemoryEntry(row.get("task_hint", ""), plan, row.get("origin", SEED), row.get("env")))
    return store


def memory_rows(store: MemoryStore) -> list[dict]:
    rows = []
    for e in store.entries:
        row = {"task_hint": e.task_hint, "plan": [a.raw_text for a in e.plan], "origin": e.origin}
        if e.env is not None:
            row["env"] = e.env
        rows.append(row)
    return rows


def save_memory(store: MemoryStore, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in memory_rows(store):
            fh.write(json.dumps(row, sort_keys=True) + "\n")
