"""Approximate capacity via the link-activation LP and lazy odd-set cuts.

Variables per link ``i -> j`` are the flow ``F`` and the activation ``lam``;
per support edge ``(i, j)`` the connection activation ``hat``. Odd-set rows
are never written down up front: the restricted LP is solved, the point is
handed to the separation oracle and the returned odd set is appended, until
the oracle accepts.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .matchpoly import EPS, ODD_SET, ViolatedConstraint, separation_oracle
from .netmodel import Edge, Link, Network
from .simplex import LPError, simplex_maximize

logger = logging.getLogger(__name__)


class SolverError(RuntimeError):
    """The cutting-plane loop failed (numerical trouble or iteration cap)."""


@dataclass(frozen=True)
class FeasiblePoint:
    """A point in the variable space of the capacity LP.

    ``flow[(i, j)]`` and ``activation[(i, j)]`` refer to link ``i -> j``;
    ``connection[(i, j)]`` to the support edge ``i < j``.
    """

    flow: Mapping[Link, float]
    activation: Mapping[Link, float]
    connection: Mapping[Edge, float]

    @classmethod
    def zeros(cls, net: Network) -> "FeasiblePoint":
        return cls({l: 0.0 for l in net.links}, {l: 0.0 for l in net.links},
                   {e: 0.0 for e in net.support_edges})

    @classmethod
    def from_activations(cls, net: Network, activation: Mapping[Link, float],
                         flow: Mapping[Link, float] | None = None) -> "FeasiblePoint":
        """Point whose connection activations are the coupled sums of ``activation``."""
        lam = {l: float(activation.get(l, 0.0)) for l in net.links}
        hat = {(i, j): lam.get((i, j), 0.0) + lam.get((j, i), 0.0) for i, j in net.support_edges}
        f = {l: float((flow or {}).get(l, 0.0)) for l in net.links}
        return cls(f, lam, hat)

    def check_dimensions(self, net: Network) -> None:
        links = set(net.links)
        if set(self.flow) != links or set(self.activation) != links:
            raise ValueError("flow/activation keys do not match the network links")
        if set(self.connection) != set(net.support_edges):
            raise ValueError("connection keys do not match the network support edges")
        for part in (self.flow, self.activation, self.connection):
            if not all(np.isfinite(v) for v in part.values()):
                raise ValueError("point has non-finite entries")

    def value(self, key: tuple) -> float:
        kind, i, j = key
        table = {"F": self.flow, "lam": self.activation, "hat": self.connection}[kind]
        return table.get((i, j), 0.0)

    def throughput(self, net: Network) -> float:
        return sum(f for (i, _), f in self.flow.items() if i == net.source)


@dataclass
class Row:
    coeffs: dict[int, float]
    sense: str  # "<=", "==", ">="
    rhs: float
    tag: str  # "1a".."1g" or "odd_set"
    key: tuple


@dataclass
class LinearProgram:
    """Restricted capacity LP. All columns carry an implicit lower bound of 0,
    so the nonnegativity rows are kept for provenance only."""

    columns: dict[tuple, int]
    objective: np.ndarray
    rows: list[Row] = field(default_factory=list)
    cut_keys: set = field(default_factory=set)

    @property
    def odd_set_rows(self) -> list[Row]:
        return [r for r in self.rows if r.tag == ODD_SET]

    def add_odd_set(self, vertices: Iterable[int], support: list[Edge]) -> Row:
        s = frozenset(vertices)
        key = (ODD_SET, tuple(sorted(s)))
        if key in self.cut_keys:
            raise ValueError(f"odd set {sorted(s)} already present")
        coeffs = {self.columns[("hat", i, j)]: 1.0 for i, j in support if i in s and j in s}
        row = Row(coeffs, "<=", (len(s) - 1) / 2, ODD_SET, key)
        self.rows.append(row)
        self.cut_keys.add(key)
        return row

    def arrays(self):
        """``(c, A_ub, b_ub, A_eq, b_eq)`` for the active rows (objective is maximized)."""
        n = len(self.columns)
        ub, eq = [], []
        for r in self.rows:
            if r.tag in ("1d", "1g"):
                continue
            if r.sense == "==":
                eq.append((r.coeffs, r.rhs))
            elif r.sense == "<=":
                ub.append((r.coeffs, r.rhs))
            else:
                ub.append(({k: -v for k, v in r.coeffs.items()}, -r.rhs))

        def build(rows):
            data, ri, ci = [], [], []
            for k, (coeffs, _) in enumerate(rows):
                for col, v in coeffs.items():
                    ri.append(k)
                    ci.append(col)
                    data.append(v)
            A = sp.csr_matrix((data, (ri, ci)), shape=(len(rows), n))
            return A, np.array([b for _, b in rows], dtype=float)

        A_ub, b_ub = build(ub)
        A_eq, b_eq = build(eq)
        return self.objective, A_ub, b_ub, A_eq, b_eq


def build_base_lp(net: Network) -> LinearProgram:
    """LP with every family except the odd-set rows."""
    links, edges = net.links, net.support_edges
    columns: dict[tuple, int] = {}
    for i, j in links:
        columns[("F", i, j)] = len(columns)
    for i, j in links:
        columns[("lam", i, j)] = len(columns)
    for i, j in edges:
        columns[("hat", i, j)] = len(columns)
    obj = np.zeros(len(columns))
    for i, j in links:
        if i == net.source:
            obj[columns[("F", i, j)]] = 1.0
    lp = LinearProgram(columns, obj)
    rows = lp.rows
    for (i, j), cap in net.capacities.items():
        rows.append(Row({columns[("F", i, j)]: 1.0, columns[("lam", i, j)]: -cap}, "<=", 0.0,
                        "1a", ("1a", i, j)))
    for v in range(1, net.destination):
        coeffs: dict[int, float] = {}
        for i, j in links:
            if i == v:
                coeffs[columns[("F", i, j)]] = 1.0
            elif j == v:
                coeffs[columns[("F", i, j)]] = -1.0
        if coeffs:
            rows.append(Row(coeffs, "==", 0.0, "1b", ("1b", v)))
    for i, j in edges:
        coeffs = {columns[("hat", i, j)]: 1.0}
        for link in ((i, j), (j, i)):
            if net.has_link(*link):
                coeffs[columns[("lam", *link)]] = -1.0
        rows.append(Row(coeffs, "==", 0.0, "1c", ("1c", i, j)))
    for i, j in links:
        rows.append(Row({columns[("lam", i, j)]: 1.0}, ">=", 0.0, "1d", ("1d", i, j)))
    for v in range(net.n_nodes):
        coeffs = {columns[("hat", a, b)]: 1.0 for a, b in edges if v in (a, b)}
        if coeffs:
            rows.append(Row(coeffs, "<=", 1.0, "1e", ("1e", v)))
    for i, j in edges:
        rows.append(Row({columns[("hat", i, j)]: 1.0}, ">=", 0.0, "1g", ("1g", i, j)))
    return lp


def _point_from_vector(net: Network, lp: LinearProgram, x: np.ndarray) -> FeasiblePoint:
    cols = lp.columns
    return FeasiblePoint(
        {l: float(x[cols[("F", *l)]]) for l in net.links},
        {l: float(x[cols[("lam", *l)]]) for l in net.links},
        {e: float(x[cols[("hat", *e)]]) for e in net.support_edges},
    )


def solve_restricted_lp(lp: LinearProgram, method: str = "highs") -> tuple[np.ndarray, float]:
    """Optimal basic solution of the current rows.

    ``method="highs"`` uses the HiGHS dual simplex through scipy;
    ``method="simplex"`` uses the bundled dense tableau simplex.
    """
    c, A_ub, b_ub, A_eq, b_eq = lp.arrays()
    if method == "simplex":
        res = simplex_maximize(c, A_ub.toarray(), b_ub, A_eq.toarray(), b_eq)
        return res.x, res.objective
    if method != "highs":
        raise ValueError(f"unknown LP method {method!r}")
    res = linprog(
        -c,
        A_ub=A_ub if A_ub.shape[0] else None, b_ub=b_ub if A_ub.shape[0] else None,
        A_eq=A_eq if A_eq.shape[0] else None, b_eq=b_eq if A_eq.shape[0] else None,
        bounds=(0, None), method="highs-ds",
        options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10,
                 "presolve": True},
    )
    if res.status != 0:
        raise LPError(f"HiGHS failed: status={res.status} {res.message}")
    x = np.maximum(res.x, 0.0)
    return x, float(c @ x)


@dataclass
class CapacitySolution:
    capacity: float
    point: FeasiblePoint
    generated_cuts: list[tuple[int, ...]]
    iterations: int
    objective_trace: list[float] = field(default_factory=list)

    def to_json(self) -> dict[str, Any]:
        p = self.point
        return {
            "capacity": self.capacity,
            "links": [{"from": i, "to": j, "lambda": p.activation[(i, j)], "flow": p.flow[(i, j)]}
                      for i, j in sorted(p.activation)],
            "edges": [{"i": i, "j": j, "lambda_hat": v} for (i, j), v in sorted(p.connection.items())],
            "cuts": len(self.generated_cuts),
            "odd_sets": [list(s) for s in self.generated_cuts],
            "iterations": self.iterations,
        }


def solve_p1(net: Network, *, method: str = "highs", tol: float = EPS,
             max_iterations: int | None = None) -> CapacitySolution:
    """Solve the capacity LP to optimality by constraint generation."""
    if net.is_degenerate():
        return CapacitySolution(0.0, FeasiblePoint.zeros(net), [], 0, [0.0])
    cap = max_iterations if max_iterations is not None else 10 * net.n_nodes ** 4
    lp = build_base_lp(net)
    edges = net.support_edges
    trace: list[float] = []
    for it in range(1, cap + 1):
        x, obj = solve_restricted_lp(lp, method)
        trace.append(obj)
        point = _point_from_vector(net, lp, x)
        v: ViolatedConstraint | None = separation_oracle(net, point, tol)
        if v is None:
            cuts = [r.key[1] for r in lp.odd_set_rows]
            logger.debug("converged after %d iterations with %d cuts", it, len(cuts))
            return CapacitySolution(point.throughput(net), point, cuts, it, trace)
        if v.kind != ODD_SET:
            raise SolverError(
                f"LP kernel returned a point violating a base row: {v.to_json()}"
            )
        if (ODD_SET, v.index) in lp.cut_keys:
            raise SolverError(f"odd set {list(v.index)} regenerated; numerical cycling")
        lp.add_odd_set(v.index, edges)
    raise SolverError(f"no convergence within {cap} iterations ({len(lp.odd_set_rows)} cuts)")
