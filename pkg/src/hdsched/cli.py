"""Command-line front end.

Exit codes: 0 success, 2 bad input, 3 solver failure, 4 schedule
verification failure, 5 self-test mismatch.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .capacity import SolverError, solve_p1
from .matchpoly import EPS, separation_oracle
from .netmodel import NetworkFormatError, generate_random_network, parse_network, serialize_network
from .refcheck import brute_force_capacity, p1_feasible_bruteforce, random_point
from .scheduler import DecompositionError, caratheodory_decompose, directionalize, verify_schedule
from .simplex import LPError

EXIT_OK, EXIT_INPUT, EXIT_SOLVER, EXIT_VERIFY, EXIT_SELFTEST = 0, 2, 3, 4, 5


@dataclass
class RunReport:
    command: str
    input_digest: str | None = None
    capacity: float | None = None
    schedule_summary: dict[str, Any] | None = None
    iterations: int | None = None
    cuts: int | None = None
    wall_time: float = 0.0
    tolerance: float = EPS
    extra: dict[str, Any] = field(default_factory=dict)


def _load(path: str):
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise NetworkFormatError(f"cannot read {path}: {exc}") from None
    return parse_network(data), hashlib.sha256(data).hexdigest()


def run_schedule(net, *, tol: float = EPS, max_iterations: int | None = None):
    """Capacity LP, matching decomposition and orientation in one go."""
    sol = solve_p1(net, tol=tol, max_iterations=max_iterations)
    matchings = caratheodory_decompose(net.support(sol.point.connection), tol)
    sched = directionalize(net, matchings, sol.point.activation)
    return sol, matchings, sched


def cmd_capacity(args) -> tuple[int, RunReport]:
    t0 = time.perf_counter()
    net, digest = _load(args.file)
    sol = solve_p1(net, tol=args.tolerance, max_iterations=args.max_iterations)
    rep = RunReport("capacity", digest, sol.capacity, None, sol.iterations,
                    len(sol.generated_cuts), time.perf_counter() - t0, args.tolerance)
    if args.json:
        print(json.dumps({"report": asdict(rep), "solution": sol.to_json()}, indent=2))
    else:
        print(f"capacity: {sol.capacity:.12g}")
        print(f"iterations: {sol.iterations}  odd-set cuts: {len(sol.generated_cuts)}")
        for (i, j), v in sorted(sol.point.connection.items()):
            if v > 0:
                print(f"  lambda_hat({i},{j}) = {v:.12g}")
    return EXIT_OK, rep


def cmd_schedule(args) -> tuple[int, RunReport]:
    t0 = time.perf_counter()
    net, digest = _load(args.file)
    sol, matchings, sched = run_schedule(net, tol=args.tolerance, max_iterations=args.max_iterations)
    summary = {"states": len(sched), "matchings": len(matchings),
               "total_fraction": float(sum(sched.fractions))}
    code = EXIT_OK
    if args.verify:
        _, rate = verify_schedule(net, sched)
        summary["verified_rate"] = rate
        if abs(rate - sol.capacity) > 1e-6:
            print(f"verification failed: schedule rate {rate!r} vs capacity {sol.capacity!r}",
                  file=sys.stderr)
            code = EXIT_VERIFY
    rep = RunReport("schedule", digest, sol.capacity, summary, sol.iterations,
                    len(sol.generated_cuts), time.perf_counter() - t0, args.tolerance)
    if args.json:
        print(json.dumps({"report": asdict(rep), "solution": sol.to_json(),
                          "schedule": sched.to_json()}, indent=2))
    else:
        print(f"capacity: {sol.capacity:.12g}")
        print(f"{'fraction':>14}  links")
        for item in sched.to_json():
            links = " ".join(f"{i}->{j}" for i, j in item["links"]) or "(idle)"
            print(f"{item['fraction']:14.10f}  {links}")
        if args.verify:
            print(f"verified rate: {summary['verified_rate']:.12g}")
    return code, rep


def cmd_selftest(args) -> tuple[int, RunReport]:
    t0 = time.perf_counter()
    rng = np.random.default_rng(args.seed)
    checked = 0
    for trial in range(args.trials):
        n = int(rng.integers(0, args.n + 1))
        density = float(rng.uniform(0.3, 1.0))
        net = generate_random_network(n, density, int(rng.integers(2**31)))
        fast = solve_p1(net, tol=args.tolerance).capacity
        if args.inject_fault:
            fast += 1e-3
        slow, _ = brute_force_capacity(net)
        point = random_point(net, rng)
        verdict = separation_oracle(net, point, args.tolerance) is None
        truth = p1_feasible_bruteforce(net, point, args.tolerance)
        failure = None
        if abs(fast - slow) > 1e-6:
            failure = f"capacity mismatch: fast {fast!r} vs brute force {slow!r}"
        elif verdict != truth:
            failure = f"oracle says feasible={verdict}, brute force says {truth}"
        else:
            sol, _, sched = run_schedule(net, tol=args.tolerance)
            _, rate = verify_schedule(net, sched)
            if abs(rate - sol.capacity) > 1e-6:
                failure = f"schedule rate {rate!r} vs capacity {sol.capacity!r}"
        if failure:
            print(f"selftest trial {trial}: {failure}", file=sys.stderr)
            print(serialize_network(net), file=sys.stderr)
            print(json.dumps({"flow": _pairs(point.flow), "activation": _pairs(point.activation),
                              "connection": _pairs(point.connection)}), file=sys.stderr)
            rep = RunReport("selftest", None, wall_time=time.perf_counter() - t0,
                            tolerance=args.tolerance, extra={"failed_trial": trial, "checked": checked})
            return EXIT_SELFTEST, rep
        checked += 1
    rep = RunReport("selftest", None, wall_time=time.perf_counter() - t0, tolerance=args.tolerance,
                    extra={"trials": checked, "seed": args.seed, "max_relays": args.n})
    print(json.dumps(asdict(rep)) if args.json else f"selftest passed: {checked} trials")
    return EXIT_OK, rep


def _pairs(d) -> list:
    return [[i, j, v] for (i, j), v in sorted(d.items())]


def cmd_gen(args) -> tuple[int, RunReport]:
    t0 = time.perf_counter()
    net = generate_random_network(args.n, args.density, args.seed)
    text = serialize_network(net)
    Path(args.out).write_text(text)
    rep = RunReport("gen", hashlib.sha256(text.encode()).hexdigest(),
                    wall_time=time.perf_counter() - t0, extra={"links": len(net.links)})
    print(json.dumps(asdict(rep)) if args.json else f"wrote {args.out} ({len(net.links)} links)")
    return EXIT_OK, rep


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tolerance", type=float, default=EPS)
    common.add_argument("--max-iterations", type=int, default=None)
    common.add_argument("--json", action="store_true", help="structured output")

    p = argparse.ArgumentParser(prog="hdsched", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    c = sub.add_parser("capacity", parents=[common], help="approximate capacity of a network file")
    c.add_argument("file")
    c.set_defaults(func=cmd_capacity)
    s = sub.add_parser("schedule", parents=[common], help="optimal schedule of a network file")
    s.add_argument("file")
    s.add_argument("--verify", action="store_true", help="re-check the achieved min-cut rate")
    s.set_defaults(func=cmd_schedule)
    t = sub.add_parser("selftest", parents=[common], help="cross-check against brute force")
    t.add_argument("--n", type=int, default=3, help="max relays")
    t.add_argument("--trials", type=int, default=20)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    t.set_defaults(func=cmd_selftest)
    g = sub.add_parser("gen", parents=[common], help="write a random network file")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--density", type=float, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        code, _ = args.func(args)
    except NetworkFormatError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (SolverError, LPError, DecompositionError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    return code


if __name__ == "__main__":
    sys.exit(main())
