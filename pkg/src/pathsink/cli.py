"""Command-line surface: instance generation, solving, verification,
section tracing, and benchmarking with machine-readable output.

Exit codes: 0 success, 1 invalid input, 2 verification mismatch,
3 resource guard tripped.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from fractions import Fraction
from math import log2

from . import flow, oracle
from .ctree import build_tree
from .ksink import padded_trivial_solution, solve_ksink
from .model import (
    InstanceError,
    PathInstance,
    instance_digest,
    parse_instance,
    serialize_instance,
)
from .onesink import solve_1sink
from .rational import RZERO, Rat, format_rational, rational_to_decimal_string

ALGOS = ("dp", "dp-linear", "onesink", "oracle-exhaustive")


# ---------------------------------------------------------------------------
# gen

def _random_rational(rng, max_value):
    den = rng.randint(1, 4)
    num = rng.randint(1, max(1, max_value * den))
    return Fraction(num, den)


def generate_instance(n, seed, capacity_mode="random", weight_max=10,
                      length_max=10, cap_max=5, k_hint=None) -> dict:
    """Deterministic pseudo-random instance document (k_hint is accepted
    for reproducibility of experiment scripts but does not change the
    distribution)."""
    if n < 1:
        raise InstanceError("n must be at least 1")
    if weight_max < 0 or length_max < 1 or cap_max < 1:
        raise InstanceError("generation bounds must be positive")
    rng = random.Random(seed)
    weights = [rng.randint(0, weight_max) for _ in range(n)]
    lengths = [_random_rational(rng, length_max) for _ in range(n - 1)]
    if capacity_mode == "uniform":
        cap = _random_rational(rng, cap_max)
        caps = [cap] * (n - 1)
    elif capacity_mode == "random":
        caps = [_random_rational(rng, cap_max) for _ in range(n - 1)]
    else:
        raise InstanceError(f"unknown capacity mode {capacity_mode!r}")
    return {
        "tau": "1",
        "vertices": [{"w": str(w)} for w in weights],
        "edges": [{"d": _frac_str(d), "c": _frac_str(c)}
                  for d, c in zip(lengths, caps)],
    }


def _frac_str(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def cmd_gen(args) -> int:
    doc = generate_instance(args.n, args.seed, args.capacity_mode,
                            args.weight_max, args.length_max, args.cap_max,
                            k_hint=args.k_hint)
    print(json.dumps(doc))
    return 0


# ---------------------------------------------------------------------------
# solve

def _solution_document(inst, k, sinks, dividers, cost, algo, elapsed_ms) -> dict:
    return {
        "instance_digest": instance_digest(inst),
        "k": k,
        "sinks": list(sinks),
        "dividers": list(dividers),
        "cost": format_rational(cost),
        "cost_decimal": rational_to_decimal_string(cost),
        "algo": algo,
        "elapsed_ms": int(elapsed_ms),
    }


def _load_instance(path) -> PathInstance:
    with open(path, "rb") as fh:
        return parse_instance(fh.read())


def solve_instance(inst: PathInstance, k: int, algo: str, bound: int = 10**7):
    """Run the selected engine; returns (sinks, dividers, cost)."""
    if algo == "onesink":
        if k != 1:
            raise InstanceError("algo onesink requires k=1")
        sol = solve_1sink(inst)
        return [sol.sink], [], sol.cost
    if algo == "dp":
        sol = solve_ksink(inst, k)
    elif algo == "dp-linear":
        sol = solve_ksink(inst, k, linear=True)
    elif algo == "oracle-exhaustive":
        sol = oracle.exhaustive_ksink(inst, k, bound=bound)
    else:
        raise InstanceError(f"unknown algo {algo!r}")
    return sol.sinks, sol.dividers, sol.cost


def cmd_solve(args) -> int:
    inst = _load_instance(args.instance)
    if args.k < 1:
        raise InstanceError("k must be at least 1")
    started = time.perf_counter()
    sinks, dividers, cost = solve_instance(inst, args.k, args.algo, args.bound)
    elapsed_ms = (time.perf_counter() - started) * 1000
    doc = _solution_document(inst, args.k, sinks, dividers, cost, args.algo, elapsed_ms)
    print(json.dumps(doc))
    return 0


# ---------------------------------------------------------------------------
# verify

def recompute_placement_cost(inst: PathInstance, sinks, dividers):
    """Placement cost from scratch via the naive oracle, one group at a
    time.  Raises InstanceError for structurally invalid placements."""
    n = inst.n
    k = len(sinks)
    if len(dividers) != k - 1:
        raise InstanceError("dividers must have exactly k-1 entries")
    bounds = [0] + list(dividers) + [n]
    total = RZERO
    for g in range(k):
        a, b = bounds[g] + 1, bounds[g + 1]
        if b < bounds[g]:
            raise InstanceError("dividers must be non-decreasing")
        if a > b:
            continue
        s = sinks[g]
        if not (a <= s <= b):
            raise InstanceError(f"sink {s} of group {g + 1} lies outside [{a}, {b}]")
        total += oracle.naive_L(inst, a, s) + oracle.naive_R(inst, s, b)
    return total


def cmd_verify(args) -> int:
    inst = _load_instance(args.instance)
    with open(args.solution, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    digest = instance_digest(inst)
    if doc.get("instance_digest") != digest:
        print(json.dumps({"status": "digest-mismatch",
                          "expected": digest,
                          "reported": doc.get("instance_digest")}))
        return 1
    k = doc["k"]
    sinks, dividers = doc["sinks"], doc["dividers"]
    if len(sinks) != k:
        raise InstanceError("solution must list exactly k sinks")
    recomputed = recompute_placement_cost(inst, sinks, dividers)
    reported = Fraction(doc["cost"])
    if recomputed == reported:
        print(json.dumps({"status": "ok", "cost": format_rational(recomputed)}))
        return 0
    print(json.dumps({"status": "cost-mismatch",
                      "reported": doc["cost"],
                      "recomputed": format_rational(recomputed)}))
    return 2


# ---------------------------------------------------------------------------
# trace

def _sections_json(seq) -> list:
    return [{"start": format_rational(s.start),
             "height": format_rational(s.height),
             "weight": format_rational(s.weight),
             "head": s.head} for s in seq.sections]


def cmd_trace(args) -> int:
    inst = _load_instance(args.instance)
    if args.node:
        try:
            lo, hi = (int(x) for x in args.node.split(":"))
        except ValueError:
            raise InstanceError("--node expects LO:HI") from None
        index = build_tree(inst)
        out = {"node": [lo, hi]}
        try:
            out["beta_R"] = _sections_json(index.right.node_sections(lo, hi))
        except (KeyError, ValueError) as exc:
            out["beta_R"] = None
            out["beta_R_note"] = str(exc)
        try:
            n = inst.n
            rev_seq = index.left.node_sections(n + 1 - hi, n + 1 - lo)
            flipped = flow.SectionSequence(
                [flow.Section(s.start, s.height, s.weight, n + 1 - s.head)
                 for s in rev_seq.sections],
                reference_vertex=hi, direction=flow.FROM_LEFT)
            out["beta_L"] = _sections_json(flipped)
        except (KeyError, ValueError) as exc:
            out["beta_L"] = None
            out["beta_L_note"] = str(exc)
        print(json.dumps(out))
        return 0
    if not (1 <= args.vertex <= inst.n):
        raise InstanceError(f"no vertex {args.vertex}")
    direction = args.direction
    alpha, beta = flow.trace_vertex(inst, args.vertex, direction)
    print(json.dumps({
        "vertex": args.vertex,
        "direction": direction,
        "alpha": _sections_json(alpha),
        "beta": _sections_json(beta),
    }))
    return 0


# ---------------------------------------------------------------------------
# bench

def _bench_cell(n, k, algo, seed, capacity_mode):
    doc = generate_instance(n, seed, capacity_mode)
    inst = parse_instance(json.dumps(doc))
    build_ms = 0.0
    peak = 0
    if algo == "dp":
        t0 = time.perf_counter()
        index = build_tree(inst)
        build_ms = (time.perf_counter() - t0) * 1000
        peak = index.peak_sections
        t0 = time.perf_counter()
        solve_ksink(inst, k, index=index)
        solve_ms = (time.perf_counter() - t0) * 1000
    elif algo == "dp-linear":
        t0 = time.perf_counter()
        solve_ksink(inst, k, linear=True)
        solve_ms = (time.perf_counter() - t0) * 1000
        peak = flow.sweep_peak_sections(inst)
    elif algo == "onesink":
        t0 = time.perf_counter()
        solve_1sink(inst)
        solve_ms = (time.perf_counter() - t0) * 1000
        peak = flow.sweep_peak_sections(inst)
    else:
        raise InstanceError(f"bench does not support algo {algo!r}")
    return build_ms, solve_ms, peak


def _median(values):
    ordered = sorted(values)
    return ordered[len(ordered) // 2]


def cmd_bench(args) -> int:
    sizes = [int(float(s)) for s in args.sizes.split(",")]
    ks = [int(s) for s in args.k.split(",")]
    algos = args.algo.split(",")
    for a in algos:
        if a not in ("dp", "dp-linear", "onesink"):
            raise InstanceError(f"bench does not support algo {a!r}")
    if any(s < 2 for s in sizes):
        raise InstanceError("bench sizes must be at least 2")
    print("n,k,algo,seed,build_ms,solve_ms,peak_section_count")
    results = {}
    for algo in algos:
        for k in ks:
            for n in sizes:
                cells = [_bench_cell(n, k, algo, args.seed + rep, args.capacity_mode)
                         for rep in range(args.reps)]
                build_ms = _median([c[0] for c in cells])
                solve_ms = _median([c[1] for c in cells])
                peak = max(c[2] for c in cells)
                print(f"{n},{k},{algo},{args.seed},{build_ms:.3f},{solve_ms:.3f},{peak}")
                sys.stdout.flush()
                results.setdefault((k, algo), []).append((n, build_ms + solve_ms))
    for (k, algo), rows in results.items():
        slope = fit_loglog_slope(rows)
        if slope is not None:
            print(f"# slope k={k} algo={algo} {slope:.3f}")
    return 0


def fit_loglog_slope(rows):
    """Least-squares slope of log2(total ms) against log2(n)."""
    pts = [(log2(n), log2(ms)) for (n, ms) in rows if ms > 0]
    if len(pts) < 2:
        return None
    mx = sum(x for x, _ in pts) / len(pts)
    my = sum(y for _, y in pts) / len(pts)
    sxx = sum((x - mx) ** 2 for x, _ in pts)
    if sxx == 0:
        return None
    sxy = sum((x - mx) * (y - my) for x, y in pts)
    return sxy / sxx


# ---------------------------------------------------------------------------
# entry point

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pathsink",
        description="Exact minsum k-sink evacuation solver for path networks")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a pseudo-random instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k-hint", type=int, default=None)
    p.add_argument("--capacity-mode", choices=("uniform", "random"), default="random")
    p.add_argument("--weight-max", type=int, default=10)
    p.add_argument("--length-max", type=int, default=10)
    p.add_argument("--cap-max", type=int, default=5)
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("solve", help="solve an instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--algo", choices=ALGOS, default="dp")
    p.add_argument("--bound", type=int, default=10**7,
                   help="enumeration guard for oracle-exhaustive")
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("verify", help="recompute a solution's cost from scratch")
    p.add_argument("--instance", required=True)
    p.add_argument("--solution", required=True)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("trace", help="dump section sequences at a vertex")
    p.add_argument("--instance", required=True)
    p.add_argument("--vertex", type=int, default=1)
    p.add_argument("--direction", choices=(flow.FROM_RIGHT, flow.FROM_LEFT),
                   default=flow.FROM_RIGHT)
    p.add_argument("--node", default=None,
                   help="dump a tree node's stored sequences (LO:HI)")
    p.set_defaults(fn=cmd_trace)

    p = sub.add_parser("bench", help="timing grid with a log-log slope summary")
    p.add_argument("--sizes", required=True, help="comma list, e.g. 1e3,1e4")
    p.add_argument("--k", default="4")
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--algo", default="dp")
    p.add_argument("--capacity-mode", choices=("uniform", "random"), default="random")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except oracle.EnumerationBoundExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (InstanceError, ValueError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
