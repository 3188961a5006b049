import json
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _gen import random_graph, random_lambda_hat, random_matching_combo
from hdsched.capacity import FeasiblePoint
from hdsched.flowgraph import WeightedGraph
from hdsched.matchpoly import (
    COUPLING, DEGREE_BOUND, EPS, FLOW_CAP, FLOW_CONSERVATION, NONNEG_LAMBDA, ODD_SET,
    ViolatedConstraint, check_min_odd_cut, double_graph, matching_polytope_separation,
    minimum_odd_tree_cut, odd_set_from_cut, separation_oracle,
)
from hdsched.netmodel import Network, generate_random_network
from hdsched.refcheck import (
    _odd_subsets, brute_force_min_odd_cut, m_polytope_membership_bruteforce,
    p1_feasible_bruteforce, pm_polytope_membership_bruteforce, random_point,
)

HALF_TRIANGLE = WeightedGraph(3, ((0, 1, 0.5), (0, 2, 0.5), (1, 2, 0.5)))


def _rungs(gt):
    w = gt.graph.weight_map()
    return {v: w[(v, gt.mirror(v))] for v in range(gt.n_base)}


def test_double_single_edge():
    gt = double_graph(WeightedGraph(2, ((0, 1, 1.0),)))
    assert gt.graph.edges == ((0, 1, 1.0), (0, 2, 0.0), (1, 3, 0.0), (2, 3, 1.0))
    assert gt.mirror(1) == 3


def test_double_triangle():
    gt = double_graph(HALF_TRIANGLE)
    w = gt.graph.weight_map()
    for u, v in [(0, 1), (0, 2), (1, 2)]:
        assert w[(u, v)] == w[(u + 3, v + 3)] == 0.5
    assert all(w[(v, v + 3)] == 0.0 for v in range(3))


def test_double_path_rungs():
    gt = double_graph(WeightedGraph(3, ((0, 1, 0.3), (1, 2, 0.4))))
    assert _rungs(gt) == pytest.approx({0: 0.7, 1: 0.3, 2: 0.6}, abs=1e-15)
    for v in range(6):
        assert gt.graph.degree(v) == pytest.approx(1.0, abs=1e-15)


def test_double_clamps_and_rejects():
    gt = double_graph(WeightedGraph(2, ((0, 1, 1.0 + 1e-12),)))
    assert _rungs(gt) == {0: 0.0, 1: 0.0}
    with pytest.raises(ValueError):
        double_graph(WeightedGraph(2, ((0, 1, 1.1),)))


def test_check_cut_on_perfect_matching():
    gt = double_graph(WeightedGraph(4, ((0, 1, 0.0), (2, 3, 0.0), (1, 2, 0.0))))
    assert check_min_odd_cut(gt) is None


def test_check_cut_on_triangle():
    gt = double_graph(HALF_TRIANGLE)
    w = check_min_odd_cut(gt)
    assert w is not None and len(w) % 2 == 1
    assert gt.graph.cut_weight(w) < 1 - EPS
    assert odd_set_from_cut(w, 3) == frozenset({0, 1, 2})


@pytest.mark.parametrize("seed", range(30))
def test_check_cut_matches_enumeration(seed):
    rng = np.random.default_rng(seed)
    g = random_lambda_hat(rng, int(rng.integers(2, 7)))
    gt = double_graph(g)
    value, _ = brute_force_min_odd_cut(gt.graph)
    found = check_min_odd_cut(gt)
    assert (found is None) == (value >= 1 - EPS)
    if found is not None:
        assert gt.graph.cut_weight(found) < 1 - EPS


@pytest.mark.parametrize("seed", range(25))
def test_tree_odd_cut_is_global_minimum(seed):
    rng = np.random.default_rng(seed)
    n = 2 * int(rng.integers(1, 7))
    g = random_graph(rng, n, p=float(rng.uniform(0.2, 0.9)))
    alpha, side = minimum_odd_tree_cut(g)
    value, _ = brute_force_min_odd_cut(g)
    assert alpha == value
    assert g.cut_weight(side) == alpha and len(side) % 2 == 1


@pytest.mark.parametrize("seed", range(25))
def test_doubling_equivalence(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 7))
    g = random_lambda_hat(rng, n) if seed % 2 else random_matching_combo(rng, n)
    member, _ = m_polytope_membership_bruteforce(n, g.weight_map())
    assert member == pm_polytope_membership_bruteforce(double_graph(g).graph)
    assert member == (matching_polytope_separation(g) is None)


@pytest.mark.parametrize("seed", range(20))
def test_pm_form_equivalence(seed):
    # on points with exact degree equalities the two odd-set forms agree
    rng = np.random.default_rng(seed)
    g = double_graph(random_lambda_hat(rng, int(rng.integers(2, 5)))).graph
    for s in _odd_subsets(g.n, 1):
        if len(s) == g.n:
            continue
        inner_ok = g.inner_weight(s) <= (len(s) - 1) / 2 + 1e-12
        cut_ok = g.cut_weight(s) >= 1 - 2e-12
        assert inner_ok == cut_ok


def test_convex_combinations_are_members():
    rng = np.random.default_rng(4)
    for _ in range(30):
        g = random_matching_combo(rng, int(rng.integers(2, 8)))
        assert matching_polytope_separation(g) is None


def test_triangle_oracle_counterexample(triangle):
    lam = {(0, 1): 0.5, (1, 2): 0.5, (0, 2): 0.5}
    v = separation_oracle(triangle, FeasiblePoint.from_activations(triangle, lam))
    assert v.kind == ODD_SET and v.index == (0, 1, 2)
    assert abs(v.amount - 0.5) <= 1e-12
    ok, witness = m_polytope_membership_bruteforce(3, dict(zip([(0, 1), (0, 2), (1, 2)], [0.5] * 3)))
    assert not ok and witness.index == (0, 1, 2)


def test_zero_point_feasible():
    for seed in range(5):
        net = generate_random_network(3, 0.8, seed)
        assert separation_oracle(net, FeasiblePoint.zeros(net)) is None


def test_flow_cap_violation(line):
    p = FeasiblePoint({(0, 1): 0.1, (1, 2): 0.0}, {(0, 1): 0.0, (1, 2): 0.0}, {(0, 1): 0.0, (1, 2): 0.0})
    v = separation_oracle(line, p)
    assert v.kind == FLOW_CAP and v.index == (0, 1)
    assert v.amount == pytest.approx(0.1)


def test_check_order(line):
    # nonnegativity of lambda comes before any flow check
    p = FeasiblePoint({(0, 1): 5.0, (1, 2): 0.0}, {(0, 1): -0.1, (1, 2): 0.0}, {(0, 1): -0.1, (1, 2): 0.0})
    assert separation_oracle(line, p).kind == NONNEG_LAMBDA
    p = FeasiblePoint({(0, 1): 0.2, (1, 2): 0.1}, {(0, 1): 0.5, (1, 2): 0.5}, {(0, 1): 0.5, (1, 2): 0.5})
    v = separation_oracle(line, p)
    assert v.kind == FLOW_CONSERVATION and v.index == (1,) and v.sign == -1
    p = FeasiblePoint({(0, 1): 0.0, (1, 2): 0.0}, {(0, 1): 0.5, (1, 2): 0.5}, {(0, 1): 0.4, (1, 2): 0.5})
    assert separation_oracle(line, p).kind == COUPLING
    p = FeasiblePoint.from_activations(line, {(0, 1): 0.6, (1, 2): 0.6})
    v = separation_oracle(line, p)
    assert v.kind == DEGREE_BOUND and v.index == (1,)


def test_dimension_mismatch(line):
    with pytest.raises(ValueError):
        separation_oracle(line, FeasiblePoint({}, {}, {}))


@pytest.mark.parametrize("seed", range(40))
def test_oracle_matches_bruteforce(seed):
    rng = np.random.default_rng(seed)
    net = generate_random_network(int(rng.integers(0, 4)), float(rng.uniform(0.3, 1)), seed)
    p = random_point(net, rng)
    v = separation_oracle(net, p)
    assert (v is None) == p1_feasible_bruteforce(net, p)
    if v is not None:
        assert v.evaluate(net, p) > EPS / 2
        assert v.amount == pytest.approx(v.evaluate(net, p), abs=1e-12)


def test_odd_set_index_validation():
    with pytest.raises(ValueError):
        ViolatedConstraint(ODD_SET, (0, 1), 0.1)
    with pytest.raises(ValueError):
        ViolatedConstraint(ODD_SET, (2,), 0.1)
    assert ViolatedConstraint(ODD_SET, (4, 0, 2), 0.1).index == (0, 2, 4)


def test_json_form():
    d = ViolatedConstraint(ODD_SET, (2, 0, 1), 0.5).to_json()
    assert d == {"kind": "odd_set", "index": [0, 1, 2], "amount": 0.5}
    d = ViolatedConstraint(FLOW_CAP, (2, 1), 0.1).to_json()
    assert d["index"] == [2, 1]
    json.dumps(ViolatedConstraint(COUPLING, (0, 1), 0.1, -1).to_json())


def test_odd_set_from_cut_mirror_branch():
    # W = {0, 1, 1', 2'} maps to a = {0,1}, b = {1,2}; a\b = {0} is odd
    assert odd_set_from_cut({0, 1, 4, 5}, 3) == frozenset({0})
    # W = {0, 1, 2, 3'} (n=4): a\b = {1,2} is even, so use b\a
    assert odd_set_from_cut({0, 1, 2, 7, 4}, 4) == frozenset({3})


def test_every_odd_set_found_is_large():
    rng = np.random.default_rng(11)
    hits = 0
    for _ in range(200):
        g = random_lambda_hat(rng, int(rng.integers(3, 8)), p=0.8)
        v = matching_polytope_separation(g)
        if v is not None and v.kind == ODD_SET:
            hits += 1
            assert len(v.index) >= 3
            assert g.inner_weight(v.index) > (len(v.index) - 1) / 2
    assert hits > 0


@st.composite
def _dyadic_graphs(draw):
    n = draw(st.integers(2, 6))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), min_size=1, unique=True))
    return WeightedGraph(n, tuple((u, v, draw(st.integers(0, 8)) / 16) for u, v in chosen))


@settings(max_examples=150, deadline=None)
@given(_dyadic_graphs())
def test_separation_matches_enumeration_property(g):
    member, _ = m_polytope_membership_bruteforce(g.n, g.weight_map())
    v = matching_polytope_separation(g)
    assert member == (v is None)
    if v is not None and v.kind == ODD_SET:
        assert g.inner_weight(v.index) - (len(v.index) - 1) / 2 == v.amount > 0
