"""Weighted graphs, maximum flow / minimum cut and Gomory-Hu cut trees."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

# Residual capacities at or below this are treated as saturated.
_RESIDUAL_EPS = 1e-13


@dataclass(frozen=True)
class WeightedGraph:
    """Simple undirected graph on vertices ``0..n-1`` with nonnegative edge weights.

    Edges are stored as ``(u, v, w)`` with ``u < v``, sorted by ``(u, v)``.
    """

    n: int
    edges: tuple[tuple[int, int, float], ...]

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("vertex count must be nonnegative")
        seen = set()
        clean = []
        for u, v, w in self.edges:
            u, v, w = int(u), int(v), float(w)
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if u > v:
                u, v = v, u
            if not (0 <= u and v < self.n):
                raise ValueError(f"edge ({u},{v}) out of range for {self.n} vertices")
            if (u, v) in seen:
                raise ValueError(f"duplicate edge ({u},{v})")
            if not (w >= 0.0) or w == float("inf"):
                raise ValueError(f"edge ({u},{v}) has invalid weight {w!r}")
            seen.add((u, v))
            clean.append((u, v, w))
        object.__setattr__(self, "edges", tuple(sorted(clean)))

    @classmethod
    def from_weights(cls, n: int, weights: dict[tuple[int, int], float]) -> "WeightedGraph":
        return cls(n, tuple((u, v, w) for (u, v), w in weights.items()))

    @property
    def edge_keys(self) -> list[tuple[int, int]]:
        return [(u, v) for u, v, _ in self.edges]

    def weight_map(self) -> dict[tuple[int, int], float]:
        return {(u, v): w for u, v, w in self.edges}

    def degree(self, v: int) -> float:
        """Total weight of edges incident to ``v``."""
        return sum(w for a, b, w in self.edges if a == v or b == v)

    def cut_weight(self, side: Iterable[int]) -> float:
        """Weight of the edges with exactly one endpoint in ``side``."""
        s = set(side)
        return sum(w for u, v, w in self.edges if (u in s) != (v in s))

    def inner_weight(self, side: Iterable[int]) -> float:
        """Weight of the edges with both endpoints in ``side``."""
        s = set(side)
        return sum(w for u, v, w in self.edges if u in s and v in s)

    def between_weight(self, a: Iterable[int], b: Iterable[int]) -> float:
        """Weight of edges with one endpoint in ``a`` and the other in ``b``."""
        sa, sb = set(a), set(b)
        return sum(
            w for u, v, w in self.edges
            if (u in sa and v in sb) or (u in sb and v in sa)
        )


@dataclass(frozen=True)
class DiGraph:
    """Directed graph with nonnegative arc capacities; arcs ``(u, v, c)``."""

    n: int
    arcs: tuple[tuple[int, int, float], ...]

    def cut_weight(self, side: Iterable[int]) -> float:
        s = set(side)
        return sum(c for u, v, c in self.arcs if u in s and v not in s)


def _arc_list(g: WeightedGraph | DiGraph) -> list[tuple[int, int, float]]:
    if isinstance(g, WeightedGraph):
        out = []
        for u, v, w in g.edges:
            out.append((u, v, w))
            out.append((v, u, w))
        return out
    return list(g.arcs)


def _dinic(n: int, arcs: Sequence[tuple[int, int, float]], s: int, t: int) -> set[int]:
    """Run Dinic's algorithm and return the set of vertices reachable from ``s``
    in the final residual network."""
    head: list[list[int]] = [[] for _ in range(n)]
    to: list[int] = []
    cap: list[float] = []
    for u, v, c in arcs:
        if c <= 0.0 or u == v:
            continue
        head[u].append(len(to))
        to.append(v)
        cap.append(c)
        head[v].append(len(to))
        to.append(u)
        cap.append(0.0)

    while True:
        level = [-1] * n
        level[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for a in head[u]:
                if cap[a] > _RESIDUAL_EPS and level[to[a]] < 0:
                    level[to[a]] = level[u] + 1
                    queue.append(to[a])
        if level[t] < 0:
            return {v for v in range(n) if level[v] >= 0}

        ptr = [0] * n
        while True:
            # iterative DFS for one blocking-flow augmenting path
            path: list[int] = []
            u = s
            while u != t:
                adj = head[u]
                while ptr[u] < len(adj):
                    a = adj[ptr[u]]
                    if cap[a] > _RESIDUAL_EPS and level[to[a]] == level[u] + 1:
                        break
                    ptr[u] += 1
                if ptr[u] == len(adj):
                    if u == s:
                        break
                    level[u] = -1  # dead end
                    a = path.pop()
                    u = to[a ^ 1]
                    ptr[u] += 1
                    continue
                a = adj[ptr[u]]
                path.append(a)
                u = to[a]
            if u != t:
                break
            push = min(cap[a] for a in path)
            for a in path:
                cap[a] -= push
                cap[a ^ 1] += push


def max_flow(g: WeightedGraph | DiGraph, s: int, t: int) -> tuple[float, frozenset[int]]:
    """Minimum ``s``-``t`` cut value and its canonical source side.

    The returned side is the set of vertices reachable from ``s`` in the final
    residual network (the inclusion-minimal minimum cut). The value is the
    capacity of that cut summed over the input edges in storage order.
    """
    if s == t:
        raise ValueError("source and sink must differ")
    if not (0 <= s < g.n and 0 <= t < g.n):
        raise ValueError("terminal out of range")
    side = frozenset(_dinic(g.n, _arc_list(g), s, t))
    return g.cut_weight(side), side


@dataclass(frozen=True)
class TreeEdge:
    s: int
    t: int
    alpha: float
    side: frozenset[int]  # component of the tree minus this edge containing s


@dataclass(frozen=True)
class GomoryHuTree:
    """Cut tree: every edge stores its capacity and the induced bipartition.

    ``edges`` are listed in construction order (the order in which the
    splitting steps created them).
    """

    n: int
    edges: tuple[TreeEdge, ...]
    flow_calls: int = 0
    _adj: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        adj: dict[int, list[tuple[int, int]]] = {v: [] for v in range(self.n)}
        for k, e in enumerate(self.edges):
            adj[e.s].append((e.t, k))
            adj[e.t].append((e.s, k))
        object.__setattr__(self, "_adj", adj)

    def path_edges(self, u: int, v: int) -> list[int]:
        """Indices of tree edges on the unique ``u``-``v`` path."""
        prev: dict[int, tuple[int, int] | None] = {u: None}
        stack = [u]
        while stack:
            x = stack.pop()
            if x == v:
                break
            for y, k in self._adj[x]:
                if y not in prev:
                    prev[y] = (x, k)
                    stack.append(y)
        out = []
        x = v
        while prev[x] is not None:
            x, k = prev[x]
            out.append(k)
        return out[::-1]

    def dump(self) -> list[tuple[int, int, float]]:
        """Edge list ``(s, t, alpha)`` with ``s < t``, sorted, for debugging."""
        return sorted((min(e.s, e.t), max(e.s, e.t), e.alpha) for e in self.edges)


def gomory_hu_tree(g: WeightedGraph) -> GomoryHuTree:
    """Build a Gomory-Hu cut tree by the original vertex-contraction scheme.

    Exactly ``n - 1`` max-flow computations are performed, each on the graph
    obtained by contracting every component of the current tree minus the
    supernode being split.
    """
    n = g.n
    if n < 2:
        raise ValueError("Gomory-Hu tree needs at least two vertices")
    edges_nz = [(u, v, w) for u, v, w in g.edges if w > 0.0]

    supernodes: list[list[int]] = [list(range(n))]
    # tree edges between supernode ids: id -> [a, b, alpha, order]
    tree: list[list] = []
    flow_calls = 0

    while True:
        x = next((k for k, members in enumerate(supernodes) if len(members) >= 2), None)
        if x is None:
            break
        members = supernodes[x]
        s, t = members[0], members[1]

        # components of tree minus x, one per tree edge incident to x
        incident = [k for k, (a, b, _, _) in enumerate(tree) if a == x or b == x]
        nbr_adj: dict[int, list[int]] = {}
        for a, b, _, _ in tree:
            if a != x and b != x:
                nbr_adj.setdefault(a, []).append(b)
                nbr_adj.setdefault(b, []).append(a)
        label = {v: v for v in members}  # original vertex -> contracted vertex
        comp_vertex: dict[int, int] = {}
        next_id = n
        for k in incident:
            a, b = tree[k][0], tree[k][1]
            root = b if a == x else a
            cid = next_id
            next_id += 1
            comp_vertex[k] = cid
            stack, seen = [root], {root}
            while stack:
                y = stack.pop()
                for v in supernodes[y]:
                    label[v] = cid
                for z in nbr_adj.get(y, ()):
                    if z not in seen:
                        seen.add(z)
                        stack.append(z)

        merged: dict[tuple[int, int], float] = {}
        for u, v, w in edges_nz:
            a, b = label[u], label[v]
            if a == b:
                continue
            key = (a, b) if a < b else (b, a)
            merged[key] = merged.get(key, 0.0) + w
        # remap contracted ids to a compact range for the flow call
        ids = sorted(set(label.values()))
        pos = {c: i for i, c in enumerate(ids)}
        cg = WeightedGraph(len(ids), tuple((pos[a], pos[b], w) for (a, b), w in merged.items()))
        value, side = max_flow(cg, pos[s], pos[t])
        flow_calls += 1

        x_s = [v for v in members if pos[v] in side]
        x_t = [v for v in members if pos[v] not in side]
        supernodes[x] = x_s
        supernodes.append(x_t)
        y = len(supernodes) - 1
        for k in incident:
            if pos[comp_vertex[k]] not in side:
                a, b = tree[k][0], tree[k][1]
                if a == x:
                    tree[k][0] = y
                else:
                    tree[k][1] = y
        tree.append([x, y, value, len(tree)])

    rep = [members[0] for members in supernodes]
    adj: dict[int, list[int]] = {v: [] for v in range(n)}
    pairs = []
    for a, b, alpha, _ in tree:
        u, v = rep[a], rep[b]
        adj[u].append(v)
        adj[v].append(u)
        pairs.append((u, v, alpha))

    out = []
    for u, v, alpha in pairs:
        comp, stack = {u}, [u]
        while stack:
            z = stack.pop()
            for w_ in adj[z]:
                if (z == u and w_ == v) or w_ in comp:
                    continue
                comp.add(w_)
                stack.append(w_)
        out.append(TreeEdge(u, v, alpha, frozenset(comp)))
    return GomoryHuTree(n, tuple(out), flow_calls)


def min_cut_query(tree: GomoryHuTree, u: int, v: int) -> tuple[float, frozenset[int]]:
    """Minimum ``u``-``v`` cut read off the tree: the bottleneck edge on the
    tree path, with its bipartition oriented to contain ``u``."""
    if u == v:
        raise ValueError("query vertices must differ")
    ks = tree.path_edges(u, v)
    k = min(ks, key=lambda k: (tree.edges[k].alpha, k))
    e = tree.edges[k]
    side = e.side if u in e.side else frozenset(range(tree.n)) - e.side
    return e.alpha, side
