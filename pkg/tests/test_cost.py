import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from treeplan.actions import canonicalize_action
from treeplan.cost import CostConfig, cumulative_cost, future_cost, imagination_score, step_cost, total_cost
from treeplan.errors import DomainError, UnscoredNode
from treeplan.tree import SearchTree

CFG = CostConfig()
GRID = [i / 20 for i in range(21)]


def test_paper_defaults():
    assert (CFG.alpha, CFG.beta, CFG.k, CFG.T) == (0.5, 0.5, 10, 20)


def test_step_cost_examples():
    assert abs(step_cost(0.75, 0.4, CFG) - math.sqrt(0.25 * 0.6)) < 1e-12
    assert abs(step_cost(0.75, 0.4, CFG) - math.sqrt(0.15)) < 1e-12
    assert step_cost(1.0, 1.0, CFG) == 0.0
    assert step_cost(None, 0.4, CFG) == pytest.approx(0.6, abs=1e-15)


def test_future_cost_examples():
    h1 = float(Fraction(7, 12))
    assert abs(future_cost(h1, 0.4, CFG) - 0.5) < 1e-12
    assert future_cost(0.3, 1.0, CostConfig(ablations={"h1"})) == 0.0
    assert future_cost(0.3, 0.2, CostConfig(ablations={"drop_h"})) == 0.0
    assert future_cost(None, None, CFG) == 1.0


def test_weight_extremes():
    # 0**0 taken as 1: a zero-weight score cannot veto the other
    assert step_cost(1.0, 0.4, CostConfig(alpha=0.0)) == pytest.approx(0.6)
    assert step_cost(1.0, 0.4, CostConfig(alpha=1.0)) == 0.0


def test_out_of_range_scores():
    with pytest.raises(DomainError):
        step_cost(1.2, 0.5, CFG)
    with pytest.raises(DomainError):
        future_cost(0.5, -0.1, CFG)


def chain(costs):
    t = SearchTree()
    n = t.root
    for i, c in enumerate(costs):
        n = t.add_child(n, canonicalize_action(f"s{i}()"))
        t[n].step_cost, t[n].scored = c, True
    return t, n


def test_cumulative_examples():
    t, n = chain([math.sqrt(0.15), 0.5])
    assert cumulative_cost(t, n, CFG) == pytest.approx(0.8873, abs=1e-4)
    assert cumulative_cost(t, 0, CFG) == 0.0
    t0, n0 = chain([0.0, 0.0, 0.0])
    assert cumulative_cost(t0, n0, CFG) == 0.0
    t.nodes[1].scored = False
    with pytest.raises(UnscoredNode):
        cumulative_cost(t, n, CFG)


def test_total_cost_examples():
    t, n = chain([math.sqrt(0.15), 0.5])
    node = t[n]
    node.g_cum = cumulative_cost(t, n, CFG)
    node.h_cost = future_cost(float(Fraction(7, 12)), 0.4, CFG)
    assert total_cost(node, CFG) == pytest.approx(1.3873, abs=1e-4)
    assert total_cost(node, CostConfig(ablations={"g"})) == pytest.approx(0.5)
    assert total_cost(node, CostConfig(ablations={"h"})) == node.g_cum
    node.h_cost = 0.0
    assert total_cost(node, CFG) == node.g_cum


def test_imagination_score():
    assert imagination_score(2, 5) == 0.4
    assert imagination_score(4, 3) == 1.0
    assert imagination_score(3, 4) == 3 / 4
    assert imagination_score(1, 0) is None
    with pytest.raises(DomainError):
        imagination_score(4, 3, CostConfig(clamp_h2=False))


@pytest.mark.parametrize("fn", [step_cost, future_cost])
def test_monotone_over_grid(fn):
    vals = [[fn(a, b, CFG) for b in GRID] for a in GRID]
    for i in range(21):
        for j in range(20):
            assert vals[i][j + 1] <= vals[i][j]
            assert vals[j + 1][i] <= vals[j][i]
            assert 0.0 <= vals[i][j] <= 1.0


@given(st.floats(0, 1), st.floats(0, 1))
def test_symmetric_at_half_weight(a, b):
    assert step_cost(a, b, CFG) == pytest.approx(step_cost(b, a, CFG), abs=1e-15)


@given(st.lists(st.tuples(st.floats(0, 1), st.floats(0, 1)), min_size=2, max_size=6),
       st.floats(0.01, 1))
def test_weighted_order_matches_log_space(pairs, alpha):
    cfg = CostConfig(alpha=alpha)
    # oracle: (1-a)^alpha (1-b)^(1-alpha) ordered like alpha*log(1-a) + (1-alpha)*log(1-b)

    def term(score, weight):
        if weight == 0:
            return 0.0
        return -math.inf if score == 1 else weight * math.log(1 - score)

    logs = [term(a, alpha) + term(b, 1 - alpha) for a, b in pairs]
    costs = [step_cost(a, b, cfg) for a, b in pairs]
    for i in range(len(pairs)):
        for j in range(len(pairs)):
            if logs[i] < logs[j] - 1e-9:
                assert costs[i] <= costs[j]


def test_config_validation():
    with pytest.raises(ValueError):
        CostConfig(ablations={"g", "g1"})
    with pytest.raises(ValueError):
        CostConfig(ablations={"zz"})
    with pytest.raises(ValueError):
        CostConfig(alpha=1.5)
    assert CostConfig(ablations={"drop_g1"}).ablations == {"g1"}
