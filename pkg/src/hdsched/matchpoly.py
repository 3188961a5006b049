"""Matching-polytope membership via perfect-matching odd cuts.

The odd-set constraints over the connection activations cannot be listed
explicitly. Instead the support graph is doubled (a mirror copy plus one
"rung" per vertex carrying the degree slack), which turns membership in the
matching polytope into membership in the perfect-matching polytope of the
doubled graph. That in turn reduces to checking the minimum odd cut, found
among the cuts of a Gomory-Hu tree.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Any, Iterable

import numpy as np

from .flowgraph import GomoryHuTree, WeightedGraph, gomory_hu_tree
from .netmodel import Network

if TYPE_CHECKING:
    from .capacity import FeasiblePoint

EPS = 1e-9

NONNEG_LAMBDA = "nonneg_lambda"
NONNEG_LAMBDA_HAT = "nonneg_lambda_hat"
NONNEG_FLOW = "nonneg_flow"
FLOW_CAP = "flow_cap"
FLOW_CONSERVATION = "flow_conservation"
COUPLING = "coupling"
DEGREE_BOUND = "degree_bound"
ODD_SET = "odd_set"

KINDS = (NONNEG_LAMBDA, NONNEG_LAMBDA_HAT, NONNEG_FLOW, FLOW_CAP, FLOW_CONSERVATION,
         COUPLING, DEGREE_BOUND, ODD_SET)


@dataclass(frozen=True)
class ViolatedConstraint:
    """One inequality of the capacity LP, violated by ``amount``.

    ``index`` is a link ``(i, j)`` for per-link kinds, an edge ``(i, j)``
    (``i < j``) for per-edge kinds, ``(v,)`` for per-node kinds, and the sorted
    vertex tuple for ``odd_set``. ``sign`` orients the two equality families
    (coupling and conservation) into a ``<=`` row that the point violates.
    """

    kind: str
    index: tuple[int, ...]
    amount: float
    sign: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown constraint kind {self.kind!r}")
        if self.kind == ODD_SET:
            idx = tuple(sorted(self.index))
            if len(idx) % 2 == 0 or len(idx) < 3:
                raise ValueError(f"odd set must have odd size >= 3, got {idx}")
            object.__setattr__(self, "index", idx)

    @property
    def vertices(self) -> tuple[int, ...]:
        return self.index

    def row(self, net: Network) -> tuple[dict[tuple, float], float]:
        """The constraint as ``sum(coef * var) <= rhs`` over variable keys
        ``("F", i, j)``, ``("lam", i, j)`` (link ``i -> j``) and ``("hat", i, j)``."""
        k, idx = self.kind, self.index
        if k == NONNEG_LAMBDA:
            return {("lam", *idx): -1.0}, 0.0
        if k == NONNEG_LAMBDA_HAT:
            return {("hat", *idx): -1.0}, 0.0
        if k == NONNEG_FLOW:
            return {("F", *idx): -1.0}, 0.0
        if k == FLOW_CAP:
            return {("F", *idx): 1.0, ("lam", *idx): -net.capacities[idx]}, 0.0
        if k == FLOW_CONSERVATION:
            (v,) = idx
            coef: dict[tuple, float] = {}
            for a, b in net.links:
                if a == v:
                    coef[("F", a, b)] = coef.get(("F", a, b), 0.0) + self.sign
                if b == v:
                    coef[("F", a, b)] = coef.get(("F", a, b), 0.0) - self.sign
            return coef, 0.0
        if k == COUPLING:
            i, j = idx
            coef = {("hat", i, j): float(self.sign)}
            for link in ((i, j), (j, i)):
                if net.has_link(*link):
                    coef[("lam", *link)] = -float(self.sign)
            return coef, 0.0
        if k == DEGREE_BOUND:
            (v,) = idx
            return {("hat", a, b): 1.0 for a, b in net.support_edges if v in (a, b)}, 1.0
        s = set(idx)
        return ({("hat", a, b): 1.0 for a, b in net.support_edges if a in s and b in s},
                (len(idx) - 1) / 2)

    def evaluate(self, net: Network, point: "FeasiblePoint") -> float:
        """``lhs - rhs`` of :meth:`row` at ``point``; positive means violated."""
        coef, rhs = self.row(net)
        return sum(c * point.value(key) for key, c in coef.items()) - rhs

    def edge_row(self, edges: list[tuple[int, int]]) -> tuple[np.ndarray, float]:
        """Row over a connection-activation vector indexed by ``edges``.

        Only defined for the matching-polytope kinds.
        """
        a = np.zeros(len(edges))
        if self.kind == NONNEG_LAMBDA_HAT:
            a[edges.index(self.index)] = -1.0
            return a, 0.0
        if self.kind == DEGREE_BOUND:
            (v,) = self.index
            for k, (i, j) in enumerate(edges):
                if v in (i, j):
                    a[k] = 1.0
            return a, 1.0
        if self.kind == ODD_SET:
            s = set(self.index)
            for k, (i, j) in enumerate(edges):
                if i in s and j in s:
                    a[k] = 1.0
            return a, (len(s) - 1) / 2
        raise ValueError(f"{self.kind} is not a matching-polytope constraint")

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": self.kind, "index": sorted(self.index), "amount": self.amount}
        if self.kind in (COUPLING, FLOW_CONSERVATION):
            out["sign"] = self.sign
        if self.kind in (NONNEG_LAMBDA, NONNEG_FLOW, FLOW_CAP):
            out["index"] = list(self.index)  # directed: keep (from, to) order
        return out


@dataclass(frozen=True)
class DoubledGraph:
    """Support graph ``G`` plus a mirror copy; vertex ``v``'s mirror is ``v + n``."""

    base: WeightedGraph
    graph: WeightedGraph

    @property
    def n_base(self) -> int:
        return self.base.n

    def mirror(self, v: int) -> int:
        return v + self.base.n


def double_graph(g: WeightedGraph, tol: float = EPS) -> DoubledGraph:
    """Mirror ``g`` and join each vertex to its copy with weight ``1 - deg(v)``."""
    n = g.n
    deg = [0.0] * n
    for u, v, w in g.edges:
        deg[u] += w
        deg[v] += w
    edges = list(g.edges) + [(u + n, v + n, w) for u, v, w in g.edges]
    for v in range(n):
        rung = 1.0 - deg[v]
        if rung < -tol:
            raise ValueError(f"degree bound violated at vertex {v}: {deg[v]}")
        edges.append((v, v + n, max(rung, 0.0)))
    return DoubledGraph(g, WeightedGraph(2 * n, tuple(edges)))


def check_min_odd_cut(gt: DoubledGraph, tol: float = EPS,
                      tree: GomoryHuTree | None = None) -> frozenset[int] | None:
    """First tree-induced odd cut of capacity below ``1 - tol``, or ``None``.

    Tree edges are scanned in construction order.
    """
    g = gt.graph
    if g.n % 2:
        raise ValueError("doubled graph must have an even number of vertices")
    if tree is None:
        tree = gomory_hu_tree(g)
    for e in tree.edges:
        if len(e.side) % 2 == 1 and e.alpha < 1.0 - tol:
            return e.side
    return None


def minimum_odd_tree_cut(g: DoubledGraph | WeightedGraph,
                         tree: GomoryHuTree | None = None) -> tuple[float, frozenset[int]]:
    """Smallest capacity over the odd cuts induced by Gomory-Hu tree edges."""
    graph = g.graph if isinstance(g, DoubledGraph) else g
    if graph.n % 2 or graph.n < 2:
        raise ValueError("need an even number of vertices (>= 2)")
    if tree is None:
        tree = gomory_hu_tree(graph)
    best = min((e for e in tree.edges if len(e.side) % 2 == 1), key=lambda e: e.alpha)
    return best.alpha, best.side


def odd_set_from_cut(w: Iterable[int], n: int) -> frozenset[int]:
    """Map an odd cut of the doubled graph back to an odd vertex set of ``G``."""
    w = set(w)
    in_a = {v for v in w if v < n}
    in_b = {v - n for v in w if v >= n}
    z = in_a - in_b
    if len(z) % 2 == 1:
        return frozenset(z)
    return frozenset(in_b - in_a)


def matching_polytope_separation(g: WeightedGraph, tol: float = EPS) -> ViolatedConstraint | None:
    """Separate ``g``'s edge weights from its matching polytope.

    Checks nonnegativity, then degree bounds, then odd sets (via the doubled
    graph). Returns ``None`` for members.
    """
    for u, v, w in g.edges:
        if w < -tol:
            return ViolatedConstraint(NONNEG_LAMBDA_HAT, (u, v), -w)
    deg = [0.0] * g.n
    for u, v, w in g.edges:
        deg[u] += w
        deg[v] += w
    for v, d in enumerate(deg):
        if d > 1.0 + tol:
            return ViolatedConstraint(DEGREE_BOUND, (v,), d - 1.0)
    return odd_set_separation(g, tol)


def odd_set_separation(g: WeightedGraph, tol: float) -> ViolatedConstraint | None:
    if g.n < 3:
        return None
    # negative noise within tolerance would break the max-flow step
    g = WeightedGraph(g.n, tuple((u, v, max(w, 0.0)) for u, v, w in g.edges))
    gt = double_graph(g, tol)
    cut = check_min_odd_cut(gt, tol)
    if cut is None:
        return None
    z = odd_set_from_cut(cut, g.n)
    if len(z) < 3:
        raise AssertionError(f"odd-cut mapping produced a set of size {len(z)}")
    amount = g.inner_weight(z) - (len(z) - 1) / 2
    return ViolatedConstraint(ODD_SET, tuple(sorted(z)), amount)


def separation_oracle(net: Network, y: "FeasiblePoint", tol: float = EPS) -> ViolatedConstraint | None:
    """Decide whether ``y`` is feasible for the capacity LP.

    Returns ``None`` when feasible, otherwise the first violated constraint in
    the fixed order: activation nonnegativity, connection nonnegativity,
    flow bounds, flow conservation, coupling, degree bounds, odd sets. Within
    each family links/edges/nodes are scanned in increasing order.
    """
    y.check_dimensions(net)
    lam, hat, flow = y.activation, y.connection, y.flow
    for link in net.links:
        if lam[link] < -tol:
            return ViolatedConstraint(NONNEG_LAMBDA, link, -lam[link])
    for e in net.support_edges:
        if hat[e] < -tol:
            return ViolatedConstraint(NONNEG_LAMBDA_HAT, e, -hat[e])
    for link, cap in net.capacities.items():
        f = flow[link]
        if f < -tol:
            return ViolatedConstraint(NONNEG_FLOW, link, -f)
        if f - lam[link] * cap > tol:
            return ViolatedConstraint(FLOW_CAP, link, f - lam[link] * cap)
    out = [0.0] * net.n_nodes
    inn = [0.0] * net.n_nodes
    for (i, j), f in flow.items():
        out[i] += f
        inn[j] += f
    for v in range(1, net.destination):
        diff = out[v] - inn[v]
        if abs(diff) > tol:
            return ViolatedConstraint(FLOW_CONSERVATION, (v,), abs(diff), 1 if diff > 0 else -1)
    for i, j in net.support_edges:
        diff = hat[(i, j)] - lam.get((i, j), 0.0) - lam.get((j, i), 0.0)
        if abs(diff) > tol:
            return ViolatedConstraint(COUPLING, (i, j), abs(diff), 1 if diff > 0 else -1)
    g = net.support(hat)
    deg = [0.0] * net.n_nodes
    for u, v, w in g.edges:
        deg[u] += w
        deg[v] += w
    for v, d in enumerate(deg):
        if d > 1.0 + tol:
            return ViolatedConstraint(DEGREE_BOUND, (v,), d - 1.0)
    return odd_set_separation(g, tol)
