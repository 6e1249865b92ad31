import random

import pytest
from hypothesis import given, strategies as st

from treeplan import _lcs_py, lcs
from treeplan.lcs import Encoder, lcs_length, lcs_ratio

from conftest import brute_lcs

KERNELS = [_lcs_py]
try:
    from treeplan import _lcs_ext
    KERNELS.append(_lcs_ext)
except ImportError:  # extension not built
    pass


@pytest.fixture(params=KERNELS, ids=lambda k: k.__name__.rsplit(".", 1)[-1])
def kernel(request):
    return request.param


def test_worked_example(kernel):
    assert brute_lcs("ABCD", "ACED") == 3
    assert lcs_length(["A", "B", "C", "D"], ["A", "C", "E", "D"], kernel) == 3


def test_identity_and_empty(kernel):
    x = ["a", "b", "a", "c"]
    assert lcs_length(x, x, kernel) == 4
    assert lcs_length([], ["A", "B"], kernel) == 0
    assert lcs_ratio([], ["A"], kernel) == 0.0


def test_random_pairs_match_brute_force(kernel):
    rng = random.Random(1)
    for _ in range(300):
        a = [rng.choice("abcd") for _ in range(rng.randint(0, 8))]
        b = [rng.choice("abcd") for _ in range(rng.randint(0, 8))]
        assert lcs_length(a, b, kernel) == brute_lcs(a, b)


@given(st.lists(st.integers(0, 5), max_size=20), st.lists(st.integers(0, 5), max_size=20))
def test_kernels_agree(a, b):
    enc = Encoder()
    sa, sb = enc.encode(a), enc.encode(b)
    results = {k.lcs_str(sa, sb) for k in KERNELS}
    assert len(results) == 1
    (n,) = results
    assert n == lcs_length(b, a) and 0 <= n <= min(len(a), len(b))


@given(st.text(max_size=12), st.lists(st.text(max_size=12), max_size=6))
def test_best_ratio_index_agrees(q, cands):
    results = {k.best_ratio_index(q, cands) for k in KERNELS}
    assert len(results) == 1
    idx, ratio = results.pop()
    if not cands:
        assert idx == -1
        return
    scores = [lcs_ratio(q, c) for c in cands]
    assert ratio == max(scores) and idx == scores.index(max(scores))


def test_encoder_frozen_lookup():
    enc = Encoder()
    stored = enc.encode(["x", "y"])
    q = enc.encode(["z", "x", "w"], grow=False)
    assert len(enc) == 2
    assert lcs.lcs_str(q, stored) == 1
    assert q[0] != q[2]


def test_backend_reported():
    assert lcs.BACKEND in ("cython", "python")


def test_fallback_selected_when_forced():
    import os
    import subprocess
    import sys
    env = {**os.environ, "TREEPLAN_PURE_PYTHON": "1"}
    out = subprocess.run([sys.executable, "-c", "import treeplan.lcs as l; print(l.BACKEND, l.lcs_length('abcd', 'aced'))"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["python", "3"]
