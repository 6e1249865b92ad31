"""Deterministic scripted proposer driven by per-history candidate tables."""
from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from ..actions import ActionRecord, canonicalize_action, try_canonicalize
from ..errors import EmptyBatch
from .base import ProposalBatch, ProposerConfig, batch_or_raise, group_equivalent

IID = "iid"
QUOTA = "quota"


@dataclass(frozen=True)
class ScriptEntry:
    """Candidate distribution and imagined continuation for histories with a given prefix."""

    prefix: tuple[str, ...]
    candidates: tuple[tuple[str, float], ...]
    imagined: tuple[str, ...] = ()
    sampling: str = IID

    @classmethod
    def from_dict(cls, row: dict, finish_token: str = "Finish") -> ScriptEntry:
        prefix = row.get("history_key_prefix", [])
        if isinstance(prefix, str):
            prefix = [p for p in prefix.split(" | ") if p]
        prefix = tuple(canonicalize_action(p, finish_token).canonical_key for p in prefix)
        cands = tuple((c["action"], float(c["prob"])) for c in row.get("candidates", []))
        if any(p < 0 for _, p in cands):
            raise ValueError("candidate probabilities must be nonnegative")
        sampling = row.get("sampling", IID)
        if sampling not in (IID, QUOTA):
            raise ValueError(f"unknown sampling mode {sampling!r}")
        return cls(prefix, cands, tuple(row.get("imagined_completion", [])), sampling)

    def to_dict(self) -> dict:
        row = {
            "history_key_prefix": list(self.prefix),
            "candidates": [{"action": a, "prob": p} for a, p in self.candidates],
            "imagined_completion": list(self.imagined),
        }
        if self.sampling != IID:
            row["sampling"] = self.sampling
        return row


def load_script(path: str | Path, finish_token: str = "Finish") -> list[ScriptEntry]:
    with open(path, encoding="utf-8") as fh:
        return [ScriptEntry.from_dict(json.loads(line), finish_token) for line in fh if line.strip()]


def quota_counts(probs: Sequence[float], k: int) -> list[int]:
    """Largest-remainder apportionment of ``k`` draws to normalized probabilities."""
    total = sum(probs)
    if total <= 0:
        return [0] * len(probs)
    exact = [p / total * k for p in probs]
    counts = [int(x) for x in exact]
    order = sorted(range(len(probs)), key=lambda i: (-(exact[i] - counts[i]), i))
    for i in order[: k - sum(counts)]:
        counts[i] += 1
    return counts


def _rng(*parts) -> random.Random:
    digest = hashlib.sha256("\x1f".join(map(str, parts)).encode("utf-8")).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


class ScriptedProposer:
    """Replays a script; sampling depends only on (seeds, history keys, draw counter).

    The longest ``history_key_prefix`` that prefixes the current history
    wins; earlier entries win ties. Each instance is one run's state.
    """

    def __init__(self, entries: Sequence[ScriptEntry], cfg: ProposerConfig | None = None,
                 seed: int = 0, global_seed: int = 0):
        self.entries = list(entries)
        self.cfg = cfg or ProposerConfig()
        self.seed = seed
        self.global_seed = global_seed
        self.calls = 0
        self._draws: dict[tuple[str, ...], int] = {}

    def lookup(self, keys: tuple[str, ...]) -> ScriptEntry | None:
        best = None
        for e in self.entries:
            n = len(e.prefix)
            if n <= len(keys) and keys[:n] == e.prefix and (best is None or n > len(best.prefix)):
                best = e
        return best

    def sample(self, keys: tuple[str, ...]) -> list[str]:
        entry = self.lookup(keys)
        counter = self._draws.get(keys, 0)
        self._draws[keys] = counter + 1
        if entry is None or not entry.candidates:
            return []
        rng = _rng(self.global_seed, self.seed, "|".join(keys), counter)
        actions = [a for a, _ in entry.candidates]
        probs = [p for _, p in entry.candidates]
        k = self.cfg.k
        if entry.sampling == QUOTA:
            out = [a for a, n in zip(actions, quota_counts(probs, k)) for _ in range(n)]
            rng.shuffle(out)
            return out
        return rng.choices(actions, weights=probs, k=k)

    def propose_next(self, task: str, history: Sequence[ActionRecord]) -> ProposalBatch:
        self.calls += 1
        keys = tuple(a.canonical_key for a in history)
        samples = self.sample(keys)
        if not samples:
            raise EmptyBatch(f"script has no candidates after {list(keys)}")
        return batch_or_raise(group_equivalent(samples, k=self.cfg.k, finish_token=self.cfg.finish_token))

    def imagine_completion(self, task: str, history: Sequence[ActionRecord]) -> list[ActionRecord]:
        self.calls += 1
        entry = self.lookup(tuple(a.canonical_key for a in history))
        if entry is None:
            return []
        out = []
        for raw in entry.imagined:
            a = try_canonicalize(raw, self.cfg.finish_token)
            if a is None:
                continue
            out.append(a)
            if a.is_finish or len(out) >= self.cfg.max_imagined_steps:
                break
        return out
