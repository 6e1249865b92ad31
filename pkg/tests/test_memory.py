import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from treeplan.errors import DegenerateInput
from treeplan.memory import (
    LEARNED, MemoryEntry, MemoryStore, char_lcs_ratio, cumulative_heuristic_g1, future_heuristic_h1,
    lcs_score, load_memory, record_success, relative_position_score, save_memory,
)

from conftest import acts, brute_lcs, store_of

A, B, C, D, E = "A()", "B()", "C()", "D()", "E()"


def brute_score(s, m):
    return brute_lcs(s, m) / min(len(s), len(m))


def test_lcs_score_examples():
    s, m = acts(A, B, C, D), acts(A, C, E, D)
    assert lcs_score(s, m) == brute_score([A, B, C, D], [A, C, E, D]) == 0.75
    assert lcs_score(acts(A, C), m) == 1.0
    assert lcs_score(acts(B), acts(E)) == 0.0
    with pytest.raises(DegenerateInput):
        lcs_score([], m)


def test_g1_examples():
    store = store_of([A, C, E, D])
    assert cumulative_heuristic_g1(acts(A, B, C, D), store) == 0.75
    store.add(MemoryEntry("x", tuple(acts(A, B, C, D))))
    assert cumulative_heuristic_g1(acts(A, B, C, D), store) == 1.0
    assert cumulative_heuristic_g1(acts(A), MemoryStore()) is None


plans = st.lists(st.lists(st.sampled_from([A, B, C, D]), min_size=1, max_size=6), min_size=1, max_size=4)


@given(plans, st.lists(st.sampled_from([A, B, C, D, E]), min_size=1, max_size=6))
def test_g1_is_max_over_entries(stored, prefix):
    store = store_of(*stored)
    expected = max(brute_score(prefix, p) for p in stored)
    assert store.g1(acts(*prefix)) == pytest.approx(expected, abs=0)


def test_position_score_examples():
    store = store_of(["a()", "b()", "c()"], ["b()", "a()"])
    assert relative_position_score("b()", store) == pytest.approx(float(Fraction(7, 12)), abs=1e-15)
    assert relative_position_score("c()", store) == 1.0
    assert relative_position_score("z()", store) is None


def test_position_uses_first_occurrence():
    store = store_of([A, B, A, C])
    assert relative_position_score(A, store) == 0.25


def test_h1_exact_and_lexical_match():
    store = store_of(["set_location", "search"])
    assert future_heuristic_h1("search", store) == 1.0
    # oracle: character LCS ratios against each stored key
    ratios = {k: brute_lcs("set_locations", k) / min(13, len(k)) for k in ["set_location", "search"]}
    assert max(ratios, key=ratios.get) == "set_location"
    assert store.closest_action("set_locations") == "set_location"
    assert future_heuristic_h1("set_locations", store) == relative_position_score("set_location", store) == 0.5
    assert future_heuristic_h1("x", MemoryStore()) is None


def test_char_ratio_matches_oracle():
    for a, b in [("set_location", "set_locations"), ("search", "research"), ("abc", "xyz")]:
        assert char_lcs_ratio(a, b) == brute_lcs(a, b) / min(len(a), len(b))


def test_record_success_dedup():
    store = store_of([A, B])
    assert record_success(store, acts(A, C), "t")
    assert len(store) == 2 and store.origins == ["seed", LEARNED]
    assert not record_success(store, acts(A, C), "t again")
    assert len(store) == 2
    assert record_success(store, acts(A, C, D), "t")
    assert len(store) == 3


def test_h1_cache_invalidated_on_add():
    store = store_of([A, B])
    assert store.h1(B) == 1.0
    store.add(MemoryEntry("x", tuple(acts(B, C, D, E))))
    assert store.h1(B) == pytest.approx((1.0 + 0.25) / 2)


def test_entry_validation():
    with pytest.raises(ValueError):
        MemoryEntry("x", ())
    with pytest.raises(ValueError):
        MemoryEntry("x", tuple(acts("Finish()", A)))


def test_roundtrip(tmp_path):
    store = store_of([A, "f(x = 1)", "Finish()"], env="home")
    record_success(store, acts(B, "Finish()"), "learned", env="home")
    path = tmp_path / "m.jsonl"
    save_memory(store, path)
    rows = [json.loads(line) for line in path.read_text().splitlines()]
    assert [r["origin"] for r in rows] == ["seed", "learned"]
    again = load_memory(path, env="home")
    assert [e.keys for e in again] == [e.keys for e in store]
    assert len(load_memory(path, env="other")) == 0
