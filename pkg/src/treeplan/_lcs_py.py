"""Pure-Python LCS kernel; same API as the compiled ``_lcs_ext``."""
from __future__ import annotations


def lcs_str(a: str, b: str) -> int:
    if len(a) < len(b):
        a, b = b, a
    m = len(b)
    if m == 0:
        return 0
    row = [0] * (m + 1)
    for ai in a:
        prev = 0
        for j in range(1, m + 1):
            tmp = row[j]
            if ai == b[j - 1]:
                row[j] = prev + 1
            elif row[j - 1] > tmp:
                row[j] = row[j - 1]
            prev = tmp
    return row[m]


def best_ratio_index(query: str, candidates: list[str]) -> tuple[int, float]:
    best, best_ratio = -1, -1.0
    for idx, cand in enumerate(candidates):
        shorter = min(len(query), len(cand))
        ratio = lcs_str(query, cand) / shorter if shorter else 0.0
        if ratio > best_ratio:
            best, best_ratio = idx, ratio
    if best < 0:
        return -1, 0.0
    return best, best_ratio
