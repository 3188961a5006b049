"""From optimal connection activations to an explicit network schedule.

Two stages. First the connection activations are written as a convex
combination of undirected matchings by repeated ray shooting inside the
matching polytope (each step pins one more facet). Then every matching is
oriented into directed network states so that each link ``i -> j`` is active
for exactly its optimal activation.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping, Sequence

import networkx as nx
import numpy as np

from .flowgraph import DiGraph, WeightedGraph, max_flow
from .matchpoly import EPS, ViolatedConstraint, matching_polytope_separation, odd_set_separation
from .netmodel import Edge, Link, Network

Matching = frozenset  # frozenset of undirected edges (i, j), i < j

_VERTEX_TOL = 1e-8
_PRECOND_TOL = 1e-8
_SPLIT_TOL = 1e-10
_PRUNE = 1e-12
_DIR_TOL = 1e-12


class DecompositionError(RuntimeError):
    pass


def max_weight_matching(edges: Sequence[Edge], weights: Sequence[float]) -> Matching:
    """Matching maximizing the total weight (the empty matching counts).

    Edges with nonpositive weight can never improve a matching and are
    dropped before running the blossom algorithm.
    """
    g = nx.Graph()
    for (u, v), w in zip(edges, weights):
        if w > 0:
            g.add_edge(u, v, weight=float(w))
    m = nx.max_weight_matching(g, maxcardinality=False)
    return frozenset((min(u, v), max(u, v)) for u, v in m)


def indicator(m: Matching, edges: Sequence[Edge]) -> np.ndarray:
    return np.array([1.0 if e in m else 0.0 for e in edges])


def _as_vertex(y: np.ndarray, edges: Sequence[Edge]) -> Matching | None:
    r = np.round(y)
    if np.max(np.abs(y - r), initial=0.0) > _VERTEX_TOL or np.any((r != 0) & (r != 1)):
        return None
    chosen = [e for e, x in zip(edges, r) if x == 1]
    used = [v for e in chosen for v in e]
    if len(used) != len(set(used)):
        return None
    return frozenset(chosen)


def ray_shoot(n: int, edges: Sequence[Edge], base: np.ndarray, through: np.ndarray,
              tol: float = EPS) -> tuple[float, np.ndarray, ViolatedConstraint]:
    """Push from the vertex ``base`` through ``through`` to the polytope boundary.

    Returns the largest ``t >= 1`` such that ``base + t (through - base)`` stays
    in the matching polytope, the boundary point, and the row that is tight
    there. Nonnegativity and degree rows are intersected directly; odd-set
    rows are found by the separation oracle and intersected one at a time
    until the point is accepted.
    """
    edges = list(edges)
    d = through - base
    if not np.any(np.abs(d) > 0):
        raise ValueError("ray direction is zero")
    t, row = np.inf, None
    # rows tight at both ends have a zero directional change up to rounding
    for k, e in enumerate(edges):
        if d[k] < -_DIR_TOL:
            tk = -base[k] / d[k]
            if tk < t:
                t, row = tk, ViolatedConstraint("nonneg_lambda_hat", e, 0.0)
    for v in range(n):
        inc = [k for k, e in enumerate(edges) if v in e]
        dv = sum(d[k] for k in inc)
        if dv > _DIR_TOL:
            tv = (1.0 - sum(base[k] for k in inc)) / dv
            if tv < t:
                t, row = tv, ViolatedConstraint("degree_bound", (v,), 0.0)
    if row is None:
        raise DecompositionError("ray does not leave the polytope")
    t = max(t, 1.0)
    for _ in range(10 * len(edges) + 10):
        p = base + t * d
        viol = odd_set_separation(WeightedGraph(n, tuple((u, v, w) for (u, v), w in zip(edges, p))), tol)
        if viol is None:
            return t, p, row
        a, b = viol.edge_row(edges)
        ad = float(a @ d)
        if ad <= _DIR_TOL:
            raise DecompositionError(f"oracle inconsistency: odd set {viol.index} violated on the wrong side")
        t_new = max((b - float(a @ base)) / ad, 1.0)
        if t_new >= t:
            raise DecompositionError("oracle inconsistency: intersection does not shrink the ray")
        t, row = t_new, viol
    raise DecompositionError("ray shooting did not settle")


def caratheodory_decompose(g: WeightedGraph, tol: float = EPS) -> list[tuple[float, Matching]]:
    """Write the edge weights of ``g`` as a convex combination of matchings.

    ``g`` carries the connection activations. Zero-weight edges are ignored.
    The first vertex maximizes the all-ones objective; afterwards the
    objective is the sum of all tight rows found so far, so each new vertex
    lies on every face pinned earlier. The result has at most ``|E| + 1``
    terms and the weights sum to one.
    """
    viol = matching_polytope_separation(g, tol)
    if viol is not None:
        raise ValueError(f"point is outside the matching polytope: {viol.to_json()}")
    edges = [(u, v) for u, v, w in g.edges if w > _PRUNE]
    y = np.array([w for _, _, w in g.edges if w > _PRUNE])
    if not edges:
        return [(1.0, frozenset())]

    pieces: list[tuple[float, Matching]] = []
    remaining = 1.0
    c = np.ones(len(edges))
    pinned = np.zeros(len(edges))
    for _ in range(len(edges) + 1):
        vertex = _as_vertex(y, edges)
        if vertex is not None:
            pieces.append((remaining, vertex))
            break
        m = max_weight_matching(edges, c)
        mv = indicator(m, edges)
        t, y_next, row = ray_shoot(g.n, edges, mv, y, tol)
        theta = 1.0 - 1.0 / t
        pieces.append((remaining * theta, m))
        remaining /= t
        y = y_next
        a, _ = row.edge_row(edges)
        pinned = pinned + a
        c = pinned
    else:
        raise DecompositionError(f"no vertex reached within {len(edges) + 1} steps")

    merged: dict[Matching, float] = {}
    for phi, m in pieces:
        if phi > 0:
            merged[m] = merged.get(m, 0.0) + phi
    return [(phi, m) for m, phi in merged.items()]


def matching_to_state_matrix(m: Matching, n_nodes: int) -> np.ndarray:
    """0/1 matrix with entry ``(j, i) = 1`` for each selected edge ``(i, j)``, ``i < j``
    (default orientation ``i -> j``; rows are receivers, columns transmitters)."""
    mat = np.zeros((n_nodes, n_nodes), dtype=int)
    for i, j in m:
        mat[max(i, j), min(i, j)] = 1
    return mat


@dataclass
class Schedule:
    """Directed network states (sets of active links ``i -> j``) with fractions."""

    states: list[frozenset[Link]]
    fractions: list[float]

    def __len__(self):
        return len(self.states)

    def matrix(self, k: int, n_nodes: int) -> np.ndarray:
        mat = np.zeros((n_nodes, n_nodes), dtype=int)
        for i, j in self.states[k]:
            mat[j, i] = 1
        return mat

    def link_totals(self) -> dict[Link, float]:
        tot: dict[Link, float] = {}
        for state, phi in zip(self.states, self.fractions):
            for link in state:
                tot[link] = tot.get(link, 0.0) + phi
        return tot

    def to_json(self) -> list[dict[str, Any]]:
        items = [(phi, sorted(s)) for s, phi in zip(self.states, self.fractions)]
        items.sort(key=lambda x: (-x[0], x[1]))
        return [{"links": [list(l) for l in links], "fraction": phi} for phi, links in items]


def check_state(net: Network, state: frozenset[Link]) -> None:
    """Raise if ``state`` is not a valid half-duplex 1-2-1 state of ``net``."""
    used: set[int] = set()
    for i, j in state:
        if not net.has_link(i, j):
            raise ValueError(f"state activates nonexistent link ({i},{j})")
        if i in used or j in used:
            raise ValueError(f"state uses a node twice: {sorted(state)}")
        used.update((i, j))


def directionalize(net: Network, matchings: Sequence[tuple[float, Matching]],
                   activation: Mapping[Link, float]) -> Schedule:
    """Orient undirected matchings into directed states.

    For each edge ``(i, j)`` the matchings containing it keep the default
    direction ``i -> j`` until their fractions add up to the activation of
    ``i -> j``; the matching that crosses that threshold is split in two and
    the remaining ones are flipped to ``j -> i``.
    """
    total: dict[Edge, float] = {}
    for phi, m in matchings:
        for e in m:
            total[e] = total.get(e, 0.0) + phi
    support = set(net.support_edges)
    for e in total:
        if e not in support:
            raise ValueError(f"matching uses edge {e} that is not in the network")
    for i, j in net.support_edges:
        want = activation.get((i, j), 0.0) + activation.get((j, i), 0.0)
        if abs(total.get((i, j), 0.0) - want) > _PRECOND_TOL:
            raise ValueError(
                f"edge ({i},{j}): matchings give {total.get((i, j), 0.0)!r}, activations sum to {want!r}"
            )

    states: list[set[Link]] = [set(m) for _, m in matchings]  # default orientation i -> j
    phis = [float(phi) for phi, _ in matchings]
    for i, j in sorted(total):
        target = activation.get((i, j), 0.0)
        members = [k for k in range(len(states)) if (i, j) in states[k]]
        omega = 0.0
        for pos, k in enumerate(members):
            if omega + phis[k] < target - _SPLIT_TOL:
                omega += phis[k]
                continue
            if omega + phis[k] > target + _SPLIT_TOL:
                copy = set(states[k])
                copy.discard((i, j))
                copy.add((j, i))
                states.append(copy)
                phis.append(omega + phis[k] - target)
                phis[k] = target - omega
            for k2 in members[pos + 1:]:
                states[k2].discard((i, j))
                states[k2].add((j, i))
            break

    keep = [k for k, phi in enumerate(phis) if phi >= _PRUNE]
    sched = Schedule([frozenset(states[k]) for k in keep], [phis[k] for k in keep])
    for state in sched.states:
        check_state(net, state)
    totals = sched.link_totals()
    for link in net.links:
        if abs(totals.get(link, 0.0) - activation.get(link, 0.0)) > _PRECOND_TOL:
            raise DecompositionError(f"link {link}: schedule gives {totals.get(link, 0.0)!r}, "
                                     f"expected {activation.get(link, 0.0)!r}")
    return sched


def verify_schedule(net: Network, sched: Schedule) -> tuple[dict[Link, float], float]:
    """Per-link activation totals and the min-cut rate they support."""
    for state in sched.states:
        for link in state:
            if not net.has_link(*link):
                raise ValueError(f"state activates nonexistent link {link}")
    totals = sched.link_totals()
    arcs = tuple((i, j, totals.get((i, j), 0.0) * c) for (i, j), c in net.capacities.items())
    rate, _ = max_flow(DiGraph(net.n_nodes, arcs), net.source, net.destination)
    return totals, rate
