"""Exponential-time reference oracles for small instances.

Everything here is plain enumeration, deliberately independent of the fast
paths it certifies. Size guards raise instead of truncating.
"""
from __future__ import annotations

from itertools import combinations
from typing import Mapping, Sequence

import numpy as np

from .flowgraph import WeightedGraph
from .matchpoly import (
    COUPLING, DEGREE_BOUND, EPS, FLOW_CAP, FLOW_CONSERVATION, NONNEG_FLOW, NONNEG_LAMBDA,
    NONNEG_LAMBDA_HAT, ODD_SET, ViolatedConstraint,
)
from .netmodel import Edge, Link, Network
from .simplex import simplex_maximize

NetworkState = frozenset  # frozenset of directed links (i, j), no two sharing a node


class GuardError(ValueError):
    """Instance too large for exhaustive enumeration."""


def _guard(size: int, limit: int, what: str) -> None:
    if size > limit:
        raise GuardError(f"{what}: {size} exceeds enumeration limit {limit}")


def _matchings(edges: Sequence[tuple[int, int]]) -> list[frozenset]:
    out: list[frozenset] = []

    def rec(k: int, used: frozenset, chosen: tuple):
        if k == len(edges):
            out.append(frozenset(chosen))
            return
        rec(k + 1, used, chosen)
        u, v = edges[k]
        if u not in used and v not in used:
            rec(k + 1, used | {u, v}, chosen + (edges[k],))

    rec(0, frozenset(), ())
    return sorted(out, key=lambda m: (len(m), sorted(m)))


def enumerate_states(net: Network) -> list[NetworkState]:
    """All half-duplex states: sets of existing links with no shared node.

    Source and destination roles hold automatically because the network has
    no link into the source or out of the destination.
    """
    _guard(net.n_nodes, 12, "node count")
    return _matchings(net.links)


def enumerate_matchings(n: int, edges: Sequence[Edge]) -> list[frozenset]:
    """All matchings of an undirected graph, the empty one included."""
    _guard(n, 10, "vertex count")
    return _matchings(sorted(edges))


def brute_force_capacity(net: Network) -> tuple[float, dict[NetworkState, float]]:
    """Solve the state-activation LP (one variable per network state).

    Variables are the flows plus one time fraction per state; a link carries
    at most its capacity times the total time of the states activating it.
    """
    states = enumerate_states(net)
    links = net.links
    nl, ns = len(links), len(states)
    if nl == 0:
        return 0.0, {frozenset(): 1.0}
    col = {l: k for k, l in enumerate(links)}
    n = nl + ns
    c = np.zeros(n)
    for (i, j), k in col.items():
        if i == net.source:
            c[k] = 1.0
    A_ub, b_ub = [], []
    for l, k in col.items():
        row = np.zeros(n)
        row[k] = 1.0
        for s_idx, s in enumerate(states):
            if l in s:
                row[nl + s_idx] = -net.capacities[l]
        A_ub.append(row)
        b_ub.append(0.0)
    row = np.zeros(n)
    row[nl:] = 1.0
    A_ub.append(row)
    b_ub.append(1.0)
    A_eq, b_eq = [], []
    for v in range(1, net.destination):
        row = np.zeros(n)
        for (i, j), k in col.items():
            if i == v:
                row[k] += 1.0
            if j == v:
                row[k] -= 1.0
        if row.any():
            A_eq.append(row)
            b_eq.append(0.0)
    res = simplex_maximize(c, np.array(A_ub), np.array(b_ub),
                           np.array(A_eq).reshape(-1, n), np.array(b_eq))
    lam = {s: float(res.x[nl + k]) for k, s in enumerate(states)}
    return res.objective, lam


def brute_force_min_odd_cut(g: WeightedGraph) -> tuple[float, frozenset[int]]:
    """Minimum cut over all proper vertex subsets with an odd side.

    Vertex 0 is fixed on the returned side; the witness is the
    lexicographically smallest minimizer.
    """
    _guard(g.n, 16, "vertex count")
    n = g.n
    best: tuple[float, tuple[int, ...]] | None = None
    others = list(range(1, n))
    for r in range(0, n - 1):
        for rest in combinations(others, r):
            s = (0,) + rest
            if len(s) % 2 == 0 and (n - len(s)) % 2 == 0:
                continue
            val = g.cut_weight(s)
            if best is None or val < best[0] - 1e-15 or (abs(val - best[0]) <= 1e-15 and s < best[1]):
                best = (val, s)
    if best is None:
        raise ValueError("graph has no proper odd cut")
    return best[0], frozenset(best[1])


def _odd_subsets(n: int, min_size: int = 3):
    for r in range(min_size, n + 1, 2):
        yield from combinations(range(n), r)


def m_polytope_membership_bruteforce(
    n: int, weights: Mapping[Edge, float], tol: float = EPS
) -> tuple[bool, ViolatedConstraint | None]:
    """Membership in the matching polytope by listing every constraint."""
    _guard(n, 14, "vertex count")
    for e in sorted(weights):
        if weights[e] < -tol:
            return False, ViolatedConstraint(NONNEG_LAMBDA_HAT, e, -weights[e])
    for v in range(n):
        d = sum(w for e, w in weights.items() if v in e)
        if d > 1 + tol:
            return False, ViolatedConstraint(DEGREE_BOUND, (v,), d - 1)
    for s in _odd_subsets(n):
        ss = set(s)
        inner = sum(w for (a, b), w in weights.items() if a in ss and b in ss)
        if inner > (len(s) - 1) / 2 + tol:
            return False, ViolatedConstraint(ODD_SET, s, inner - (len(s) - 1) / 2)
    return True, None


def pm_polytope_membership_bruteforce(g: WeightedGraph, tol: float = EPS) -> bool:
    """Perfect-matching polytope membership: nonnegativity, degree equalities and
    every odd cut at least one (cut form)."""
    _guard(g.n, 14, "vertex count")
    if any(w < -tol for _, _, w in g.edges):
        return False
    for v in range(g.n):
        if abs(g.degree(v) - 1.0) > tol:
            return False
    for s in _odd_subsets(g.n, 1):
        if len(s) == g.n:
            continue
        if g.cut_weight(s) < 1.0 - tol:
            return False
    return True


def direct_checks(net: Network, point, tol: float = EPS) -> ViolatedConstraint | None:
    """The polynomially many families: nonnegativity, flow bounds, conservation,
    coupling and degree bounds."""
    for l in net.links:
        if point.activation[l] < -tol:
            return ViolatedConstraint(NONNEG_LAMBDA, l, -point.activation[l])
        if point.flow[l] < -tol:
            return ViolatedConstraint(NONNEG_FLOW, l, -point.flow[l])
        excess = point.flow[l] - point.activation[l] * net.capacities[l]
        if excess > tol:
            return ViolatedConstraint(FLOW_CAP, l, excess)
    for e in net.support_edges:
        if point.connection[e] < -tol:
            return ViolatedConstraint(NONNEG_LAMBDA_HAT, e, -point.connection[e])
    for v in range(1, net.destination):
        bal = sum(f for (i, _), f in point.flow.items() if i == v) - sum(
            f for (_, j), f in point.flow.items() if j == v)
        if abs(bal) > tol:
            return ViolatedConstraint(FLOW_CONSERVATION, (v,), abs(bal), 1 if bal > 0 else -1)
    for i, j in net.support_edges:
        diff = point.connection[(i, j)] - point.activation.get((i, j), 0.0) - point.activation.get((j, i), 0.0)
        if abs(diff) > tol:
            return ViolatedConstraint(COUPLING, (i, j), abs(diff), 1 if diff > 0 else -1)
    for v in range(net.n_nodes):
        d = sum(w for e, w in point.connection.items() if v in e)
        if d > 1 + tol:
            return ViolatedConstraint(DEGREE_BOUND, (v,), d - 1)
    return None


def p1_feasible_bruteforce(net: Network, point, tol: float = EPS) -> bool:
    if direct_checks(net, point, tol) is not None:
        return False
    ok, _ = m_polytope_membership_bruteforce(net.n_nodes, dict(point.connection), tol)
    return ok


def state_link_totals(lam: Mapping[NetworkState, float]) -> dict[Link, float]:
    """Per-link activation time induced by state fractions."""
    tot: dict[Link, float] = {}
    for s, x in lam.items():
        for l in s:
            tot[l] = tot.get(l, 0.0) + x
    return tot


def random_point(net: Network, rng: np.random.Generator):
    """Random test point for the capacity LP, mixing feasible and infeasible cases.

    Activations come from a convex combination of network states (feasible),
    a perturbation of one, independent draws rescaled to a random maximum
    degree, or equal weights on the links inside a random odd node set
    (which sits close to that set's odd-set constraint).
    Flows are zero except on a direct source-destination link.
    """
    from .capacity import FeasiblePoint

    links = net.links
    mode = int(rng.integers(4))
    uniform = mode == 3
    if uniform:
        size = 5 if net.n_nodes >= 5 and rng.random() < 0.5 else 3
        odd = set(rng.choice(net.n_nodes, size=min(size, net.n_nodes), replace=False).tolist())
        links = [l for l in net.links if l[0] in odd and l[1] in odd] or links
    if mode in (0, 1) or not links:
        states = enumerate_states(net)
        pick = rng.choice(len(states), size=min(len(states), int(rng.integers(1, 5))), replace=False)
        wts = rng.dirichlet(np.ones(len(pick)))
        lam = state_link_totals({states[k]: float(w) for k, w in zip(pick, wts)})
        if mode == 1 and links:
            l = links[int(rng.integers(len(links)))]
            lam[l] = lam.get(l, 0.0) + float(rng.uniform(-0.05, 0.05))
    else:
        raw = {l: 1.0 if uniform else float(rng.random()) for l in links}
        deg = np.zeros(net.n_nodes)
        for (i, j), x in raw.items():
            deg[i] += x
            deg[j] += x
        scale = float(rng.uniform(0.6, 1.05)) / max(deg.max(), 1e-12)
        lam = {l: x * scale for l, x in raw.items()}
    flow = {}
    direct = (net.source, net.destination)
    if direct in net.capacities and rng.random() < 0.5:
        flow[direct] = max(lam.get(direct, 0.0), 0.0) * net.capacities[direct] * float(rng.uniform(0, 1.02))
    return FeasiblePoint.from_activations(net, lam, flow)
