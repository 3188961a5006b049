"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``; the summary lines are
also shown at the end of the terminal report.
"""
import math
import tempfile
import time
from itertools import combinations, product
from pathlib import Path

import numpy as np
import pytest

from _gen import random_graph, random_lambda_hat, random_matching_combo
from _report import record
from hdsched.capacity import FeasiblePoint, solve_p1
from hdsched.cli import build_parser, cmd_schedule, run_schedule
from hdsched.flowgraph import WeightedGraph, gomory_hu_tree, max_flow, min_cut_query
from hdsched.matchpoly import ODD_SET, double_graph, minimum_odd_tree_cut, separation_oracle
from hdsched.netmodel import Network, generate_random_network, permitted_links, serialize_network
from hdsched.refcheck import (
    brute_force_capacity, brute_force_min_odd_cut,
    m_polytope_membership_bruteforce, p1_feasible_bruteforce, pm_polytope_membership_bruteforce,
    random_point,
)
from hdsched.scheduler import caratheodory_decompose, check_state, directionalize, indicator, verify_schedule


def _all_topologies(max_relays=2):
    for n in range(max_relays + 1):
        pairs = permitted_links(n)
        for mask in product((0, 1), repeat=len(pairs)):
            yield n, [p for p, m in zip(pairs, mask) if m]


@pytest.fixture(scope="module")
def capacity_corpus():
    """Networks of criterion 3 with fast and brute-force capacities."""
    rng = np.random.default_rng(2024)
    nets = []
    for n, links in _all_topologies():
        for _ in range(3):
            nets.append(("a", Network(n, {l: float(rng.uniform(0.1, 10)) for l in links})))
    for k in range(100):
        nets.append(("b", generate_random_network(3, float(rng.uniform(0.2, 1)), 3000 + k)))
    for k in range(25):
        nets.append(("c", generate_random_network(4, float(rng.uniform(0.2, 1)), 4000 + k)))
    t0 = time.perf_counter()
    rows = [(part, net, solve_p1(net).capacity, brute_force_capacity(net)[0]) for part, net in nets]
    return rows, time.perf_counter() - t0


def test_criterion_01_triangle_counterexample():
    t0 = time.perf_counter()
    net = Network(1, {(0, 1): 1.0, (1, 2): 1.0, (0, 2): 1.0})
    p = FeasiblePoint.from_activations(net, {(0, 1): 0.5, (1, 2): 0.5, (0, 2): 0.5})
    v = separation_oracle(net, p)
    dt = time.perf_counter() - t0
    ok = (v is not None and v.kind == ODD_SET and v.index == (0, 1, 2)
          and abs(v.amount - 0.5) <= 1e-12 and dt < 1.0)
    record(1, ok, f"violated={v and v.to_json()} time={dt:.3f}s")
    assert ok


def test_criterion_02_oracle_equivalence():
    rng = np.random.default_rng(202)
    t0 = time.perf_counter()
    mismatches, infeasible = [], 0
    for k in range(200):
        net = generate_random_network(int(rng.integers(0, 4)), float(rng.uniform(0.3, 1)), 200 + k)
        p = random_point(net, rng)
        fast = separation_oracle(net, p) is None
        slow = p1_feasible_bruteforce(net, p)
        infeasible += not slow
        if fast != slow:
            mismatches.append(k)
    dt = time.perf_counter() - t0
    ok = not mismatches and dt < 60
    record(2, ok, f"200 pairs, {infeasible} infeasible, mismatches={mismatches} time={dt:.2f}s")
    assert ok


def test_criterion_03_capacity_equivalence(capacity_corpus):
    rows, dt = capacity_corpus
    counts = {part: sum(1 for r in rows if r[0] == part) for part in "abc"}
    worst = max(abs(fast - slow) for _, _, fast, slow in rows)
    bad = [i for i, (_, _, fast, slow) in enumerate(rows) if abs(fast - slow) > 1e-6]
    ok = not bad and dt < 300 and counts == {"a": 138 * 3, "b": 100, "c": 25}
    record(3, ok, f"networks={counts} max|diff|={worst:.2e} failures={len(bad)} time={dt:.2f}s")
    assert ok


def test_criterion_04_gomory_hu():
    rng = np.random.default_rng(404)
    t0 = time.perf_counter()
    failures = 0
    for _ in range(100):
        n = int(rng.integers(2, 13))
        g = random_graph(rng, n, p=float(rng.uniform(0.2, 0.9)), connected=True)
        tree = gomory_hu_tree(g)
        failures += tree.flow_calls != n - 1
        for e in tree.edges:
            failures += g.cut_weight(e.side) != e.alpha
        for u, v in combinations(range(n), 2):
            failures += min_cut_query(tree, u, v)[0] != max_flow(g, u, v)[0]
    dt = time.perf_counter() - t0
    ok = failures == 0 and dt < 60
    record(4, ok, f"100 graphs, exact comparisons, failures={failures} time={dt:.2f}s")
    assert ok


def test_criterion_05_min_odd_cut():
    rng = np.random.default_rng(505)
    worst = 0.0
    for _ in range(100):
        n = 2 * int(rng.integers(1, 7))
        g = random_graph(rng, n, p=float(rng.uniform(0.2, 0.9)), integer=False)
        alpha, _ = minimum_odd_tree_cut(g)
        value, _ = brute_force_min_odd_cut(g)
        worst = max(worst, abs(alpha - value))
    ok = worst <= 1e-10
    record(5, ok, f"100 even-order graphs, max|tree - brute|={worst:.2e}")
    assert ok


def test_criterion_06_doubling_properties():
    rng = np.random.default_rng(606)
    worst, mismatches, members = 0.0, 0, 0
    for k in range(100):
        n = int(rng.integers(2, 7))
        g = random_matching_combo(rng, n) if k % 2 else random_lambda_hat(rng, n)
        for _ in range(5):
            s = [v for v in range(n) if rng.random() < 0.5]
            lhs = sum(g.degree(v) for v in s)
            worst = max(worst, abs(lhs - g.cut_weight(s) - 2 * g.inner_weight(s)))
        m_ok, _ = m_polytope_membership_bruteforce(n, g.weight_map())
        pm_ok = pm_polytope_membership_bruteforce(double_graph(g).graph)
        members += m_ok
        mismatches += m_ok != pm_ok
    ok = worst <= 1e-12 and mismatches == 0
    record(6, ok, f"counting identity max err={worst:.1e}, M/PM mismatches={mismatches} ({members} members)")
    assert ok


def _caratheodory_corpus():
    rng = np.random.default_rng(707)
    out = []
    while len(out) < 100:
        n = int(rng.integers(2, 9))
        g = random_matching_combo(rng, n) if len(out) % 2 else random_lambda_hat(rng, n)
        if m_polytope_membership_bruteforce(n, g.weight_map())[0]:
            out.append(g)
    return out


CORPUS = _caratheodory_corpus()


def test_criterion_07_caratheodory():
    worst, bad = 0.0, 0
    for g in CORPUS:
        nz = [(u, v) for u, v, w in g.edges if w > 1e-12]
        pieces = caratheodory_decompose(g)
        phis = np.array([phi for phi, _ in pieces])
        y = np.array([w for _, _, w in g.edges])
        rec = sum(phi * indicator(m, g.edge_keys) for phi, m in pieces)
        worst = max(worst, float(np.max(np.abs(rec - y))))
        bad += len(pieces) > len(nz) + 1 or phis.min() < 0 or abs(phis.sum() - 1) > 1e-10
    ok = worst <= 1e-8 and bad == 0
    record(7, ok, f"100 points, max reconstruction err={worst:.1e}, bound/convexity failures={bad}")
    assert ok


def _as_network(g, rng):
    """Treat vertex 0 as source and n-1 as destination; split each edge's weight
    between the permitted directions."""
    d = g.n - 1
    caps, lam = {}, {}
    for u, v, w in g.edges:
        if u == 0 or v == d:
            caps[(u, v)] = 1.0
            lam[(u, v)] = w
        else:
            frac = float(rng.choice([0.0, 1.0, rng.random()]))
            caps[(u, v)] = caps[(v, u)] = 1.0
            lam[(u, v)], lam[(v, u)] = w * frac, w * (1 - frac)
    return Network(d - 1, caps), lam


def test_criterion_08_directionalize():
    rng = np.random.default_rng(808)
    violations = 0
    for g in CORPUS:
        net, lam = _as_network(g, rng)
        sched = directionalize(net, caratheodory_decompose(g), lam)
        n_edges = sum(1 for _, _, w in g.edges if w > 1e-12)
        violations += len(sched) > 2 * n_edges + 1
        for state in sched.states:
            try:
                check_state(net, state)
            except ValueError:
                violations += 1
            mat = sched.matrix(sched.states.index(state), net.n_nodes)
            deg = mat.sum(axis=0) + mat.sum(axis=1)
            violations += int(deg.max(initial=0) > 1 or mat[0].any() or mat[:, -1].any())
        totals = sched.link_totals()
        violations += sum(abs(totals.get(l, 0.0) - lam[l]) > 1e-8 for l in net.links)
    ok = violations == 0
    record(8, ok, f"100 decompositions oriented, violations={violations}")
    assert ok


def test_criterion_09_end_to_end(capacity_corpus):
    rows, _ = capacity_corpus
    worst, failures = 0.0, 0
    for _, net, cap, _ in rows:
        sol, _, sched = run_schedule(net)
        _, rate = verify_schedule(net, sched)
        worst = max(worst, abs(rate - sol.capacity))
        failures += abs(rate - cap) > 1e-6
    ok = failures == 0
    record(9, ok, f"{len(rows)} networks, max|rate - capacity|={worst:.2e} failures={failures}")
    assert ok


def test_criterion_10_scaling(capsys):
    sizes = [10, 20, 30, 40, 50]
    times = []
    with tempfile.TemporaryDirectory() as tmp:
        for n in sizes:
            runs = []
            for seed in range(3):
                path = Path(tmp) / f"n{n}_{seed}.json"
                path.write_text(serialize_network(generate_random_network(n, 1.0, seed)))
                args = build_parser().parse_args(["schedule", str(path), "--verify"])
                t0 = time.perf_counter()
                code, _ = cmd_schedule(args)
                runs.append(time.perf_counter() - t0)
                assert code == 0
            times.append(float(np.median(runs)))
    capsys.readouterr()
    slope = float(np.polyfit(np.log(sizes), np.log(times), 1)[0])
    ok = times[2] < 60 and times[4] < 600 and slope <= 5
    detail = " ".join(f"N={n}:{t:.2f}s" for n, t in zip(sizes, times))
    record(10, ok, f"{detail} log-log slope={slope:.2f}")
    assert ok
