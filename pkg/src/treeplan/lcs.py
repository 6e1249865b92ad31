"""LCS entry points.

The compiled kernel (``_lcs_ext``) is used when it was built; otherwise, or
when ``TREEPLAN_PURE_PYTHON=1`` is set, the pure-Python kernel is used.
Sequences of arbitrary hashable items are mapped to code points so one
string kernel serves both action-level and character-level LCS.
"""
from __future__ import annotations

import os
from typing import Hashable, Sequence

from . import _lcs_py

try:
    if os.environ.get("TREEPLAN_PURE_PYTHON"):
        raise ImportError("pure-Python kernel forced")
    from . import _lcs_ext as _kernel
    BACKEND = "cython"
except ImportError:
    _kernel = _lcs_py
    BACKEND = "python"

_CODE_BASE = 0x10000


class Encoder:
    """Stable mapping from hashable symbols to single code points."""

    def __init__(self):
        self._codes: dict[Hashable, str] = {}

    def __len__(self):
        return len(self._codes)

    def encode(self, items: Sequence[Hashable], grow: bool = True) -> str:
        out = []
        spare = len(self._codes)
        for item in items:
            ch = self._codes.get(item)
            if ch is None:
                if grow:
                    ch = self._codes[item] = chr(_CODE_BASE + len(self._codes))
                else:
                    # unseen symbols never match anything in the table
                    ch = chr(_CODE_BASE + spare)
                    spare += 1
            out.append(ch)
        return "".join(out)


def lcs_length(a: Sequence[Hashable], b: Sequence[Hashable], kernel=None) -> int:
    """Length of the longest common subsequence of ``a`` and ``b``."""
    k = kernel or _kernel
    if isinstance(a, str) and isinstance(b, str):
        return k.lcs_str(a, b)
    enc = Encoder()
    return k.lcs_str(enc.encode(a), enc.encode(b))


def lcs_ratio(a: Sequence[Hashable], b: Sequence[Hashable], kernel=None) -> float:
    """``lcs_length / min(len(a), len(b))``; 0.0 if either side is empty."""
    shorter = min(len(a), len(b))
    return lcs_length(a, b, kernel) / shorter if shorter else 0.0


def lcs_str(a: str, b: str) -> int:
    return _kernel.lcs_str(a, b)


def best_ratio_index(query: str, candidates: list[str]) -> tuple[int, float]:
    return _kernel.best_ratio_index(query, candidates)
