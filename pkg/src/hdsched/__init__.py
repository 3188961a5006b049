"""Approximate capacity and optimal schedules for half-duplex 1-2-1 relay networks."""
from .capacity import CapacitySolution, FeasiblePoint, SolverError, build_base_lp, solve_p1
from .flowgraph import GomoryHuTree, WeightedGraph, gomory_hu_tree, max_flow, min_cut_query
from .matchpoly import EPS, ViolatedConstraint, double_graph, separation_oracle
from .netmodel import Network, NetworkFormatError, generate_random_network, parse_network, serialize_network
from .scheduler import Schedule, caratheodory_decompose, directionalize, verify_schedule

__all__ = [
    "CapacitySolution", "EPS", "FeasiblePoint", "GomoryHuTree", "Network", "NetworkFormatError",
    "Schedule", "SolverError", "ViolatedConstraint", "WeightedGraph", "build_base_lp",
    "caratheodory_decompose", "directionalize", "double_graph", "generate_random_network",
    "gomory_hu_tree", "max_flow", "min_cut_query", "parse_network", "separation_oracle",
    "serialize_network", "solve_p1", "verify_schedule",
]
