"""Independent ground-truth implementations.

Three separately-derived answers for the same questions:

* ``naive_R`` / ``naive_L``: a direct event-driven fluid simulation of the
  model rules (every vertex drains at its outgoing edge capacity, arrivals
  queue behind the backlog), vertex by vertex, with plain list manipulation.
  This is the semantic authority.
* ``cut_envelope_R``: the cumulative arrival curve at the sink equals the
  minimum over cut vertices of (weight inside the cut) + (bottleneck rate)
  x (time past the propagation delay); the cost is the tail integral of
  that envelope.
* ``exhaustive_ksink``: brute force over all divider placements and sink
  choices.

Performance is explicitly not a goal here; quadratic behavior is fine.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

from .model import PathInstance
from .rational import RZERO, Rat


class EnumerationBoundExceeded(RuntimeError):
    """Raised when exhaustive enumeration would exceed the configured bound."""


# ---------------------------------------------------------------------------
# naive fluid simulation

def _queue_departures(arrivals, backlog, cap):
    """Push a piecewise-constant arrival flow through a rate-``cap`` server.

    ``arrivals`` is a list of (start, height, weight) triples, disjoint and
    sorted by start; ``backlog`` is weight already waiting at time 0.
    Returns the departure flow in the same representation.  While the queue
    is nonempty the server emits at ``cap``; otherwise arrivals pass at
    their own rate.
    """
    pieces = [(s, s + w / h, h) for (s, h, w) in arrivals]
    out = []  # [t_start, t_end, rate]

    def emit(t0, t1, rate):
        if t1 <= t0 or rate <= 0:
            return
        if out and out[-1][1] == t0 and out[-1][2] == rate:
            out[-1][1] = t1
        else:
            out.append([t0, t1, rate])

    t = RZERO
    q = backlog
    idx = 0
    while True:
        if idx < len(pieces) and t >= pieces[idx][1]:
            idx += 1
            continue
        if idx < len(pieces):
            s, e, h = pieces[idx]
            if t < s:
                a, t_next = RZERO, s
            else:
                a, t_next = h, e
        else:
            a, t_next = RZERO, None

        if q > 0:
            dep = cap
            if a < cap:
                t_empty = t + q / (cap - a)
                t_end = t_empty if t_next is None else min(t_next, t_empty)
            else:
                t_end = t_next
        else:
            dep = a if a < cap else cap
            if t_next is None:
                break
            t_end = t_next

        emit(t, t_end, dep)
        q = q + (a - dep) * (t_end - t)
        t = t_end

    return [(t0, rate, rate * (t1 - t0)) for (t0, t1, rate) in out]


def _shift_sections(sections, delta):
    return [(s + delta, h, w) for (s, h, w) in sections]


def _sections_cost(sections):
    total = RZERO
    for (s, h, w) in sections:
        total += w * s + w * w / (2 * h)
    return total


def _naive_sweep(inst: PathInstance, j: int, i: int):
    """Arrival flow at v_i of everything initially on v_{i+1}..v_j."""
    seq = []
    for m in range(j, i, -1):
        seq = _queue_departures(seq, inst.weights[m], inst.capacities[m - 1])
        seq = _shift_sections(seq, inst.lengths[m - 1] * inst.tau)
    return seq


def naive_R(inst: PathInstance, i: int, j: int):
    """Exact cost of evacuating v_{i+1}..v_j leftward to v_i."""
    if not (1 <= i <= j <= inst.n):
        raise IndexError(f"naive_R: invalid range ({i}, {j})")
    if i == j:
        return RZERO
    return _sections_cost(_naive_sweep(inst, j, i))


def naive_L(inst: PathInstance, i: int, j: int):
    """Exact cost of evacuating v_i..v_{j-1} rightward to v_j."""
    if not (1 <= i <= j <= inst.n):
        raise IndexError(f"naive_L: invalid range ({i}, {j})")
    n = inst.n
    return naive_R(inst.reversed(), n + 1 - j, n + 1 - i)


def naive_phi(inst: PathInstance, direction: str = "R"):
    """Total arrival cost at every vertex from one side, by one naive pass.

    Returns a 1-indexed list (index 0 unused).  direction "R" gives the
    cost contributed by everything right of each vertex, "L" the mirror.
    """
    if direction == "L":
        rev = naive_phi(inst.reversed(), "R")
        return [None] + [rev[inst.n + 1 - i] for i in range(1, inst.n + 1)]
    phi = [None] + [RZERO] * inst.n
    seq = []
    for m in range(inst.n, 1, -1):
        seq = _queue_departures(seq, inst.weights[m], inst.capacities[m - 1])
        seq = _shift_sections(seq, inst.lengths[m - 1] * inst.tau)
        phi[m - 1] = _sections_cost(seq)
    return phi


def naive_arrival_sections(inst: PathInstance, i: int, j: int):
    """The raw arrival flow at v_i (diagnostic hook for differential tests)."""
    return _naive_sweep(inst, j, i)


# ---------------------------------------------------------------------------
# cut-envelope arrival curve

@dataclass
class ArrivalCurve:
    """Piecewise-linear cumulative arrivals at a sink.

    ``breakpoints`` is a list of (time, value, slope) with strictly
    increasing times; each piece is linear until the next breakpoint and the
    last piece is constant (slope 0) at ``total``.
    """

    breakpoints: list
    total: object

    def value_at(self, t):
        pieces = self.breakpoints
        lo, hi = 0, len(pieces) - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if pieces[mid][0] <= t:
                lo = mid
            else:
                hi = mid - 1
        t0, v0, s0 = pieces[lo]
        return v0 + s0 * (t - t0)

    def tail_integral(self):
        """Integral of (total - value) over all time."""
        area = RZERO
        pieces = self.breakpoints
        for k, (t0, v0, s0) in enumerate(pieces):
            if k + 1 < len(pieces):
                t1 = pieces[k + 1][0]
                v1 = v0 + s0 * (t1 - t0)
            else:
                if v0 < self.total:
                    raise AssertionError("arrival curve never reaches its total")
                break
            area += (t1 - t0) * ((self.total - v0) + (self.total - v1)) / 2
        return area


def _pw_min(env_a, env_b):
    """Pointwise min of two piecewise-linear functions on [0, inf).

    Each argument is a list of (t, value, slope) pieces starting at t=0.
    """
    times = sorted({t for (t, _, _) in env_a} | {t for (t, _, _) in env_b})
    out = []

    def value(env, k, t):
        t0, v0, s0 = env[k]
        return v0 + s0 * (t - t0)

    def append(t, v, s):
        if out:
            t0, v0, s0 = out[-1]
            if s0 == s and v0 + s0 * (t - t0) == v:
                return
        out.append((t, v, s))

    ia = ib = 0
    for k, t0 in enumerate(times):
        while ia + 1 < len(env_a) and env_a[ia + 1][0] <= t0:
            ia += 1
        while ib + 1 < len(env_b) and env_b[ib + 1][0] <= t0:
            ib += 1
        t1 = times[k + 1] if k + 1 < len(times) else None
        va, sa = value(env_a, ia, t0), env_a[ia][2]
        vb, sb = value(env_b, ib, t0), env_b[ib][2]
        lo_v, lo_s, hi_v, hi_s = (va, sa, vb, sb) if (va, sa) <= (vb, sb) else (vb, sb, va, sa)
        if t1 is None:
            append(t0, lo_v, lo_s)
            if lo_v < hi_v and hi_s < lo_s:
                tc = t0 + (hi_v - lo_v) / (lo_s - hi_s)
                append(tc, lo_v + lo_s * (tc - t0), hi_s)
            break
        append(t0, lo_v, lo_s)
        if lo_v < hi_v and hi_s < lo_s:
            tc = t0 + (hi_v - lo_v) / (lo_s - hi_s)
            if tc < t1:
                append(tc, lo_v + lo_s * (tc - t0), hi_s)
    return out


def arrival_curve(inst: PathInstance, i: int, j: int) -> ArrivalCurve:
    """Cut-envelope arrival curve at v_i for the population of v_{i+1}..v_j."""
    if not (1 <= i <= j <= inst.n):
        raise IndexError(f"arrival_curve: invalid range ({i}, {j})")
    total = RZERO
    for m in range(i + 1, j + 1):
        total += inst.weights[m]
    if total == 0:
        return ArrivalCurve(breakpoints=[(RZERO, RZERO, RZERO)], total=RZERO)

    env = None
    const = RZERO
    slope = None
    lag = RZERO
    for l in range(i + 1, j + 1):
        lag = lag + inst.lengths[l - 1] * inst.tau
        c = inst.capacities[l - 1]
        slope = c if slope is None or c < slope else slope
        line = [(RZERO, const, RZERO), (lag, const, slope)] if lag > 0 else [(RZERO, const, slope)]
        env = line if env is None else _pw_min(env, line)
        const = const + inst.weights[l]

    # clip at the total weight
    clipped = []
    for k, (t0, v0, s0) in enumerate(env):
        if v0 >= total:
            clipped.append((t0, total, RZERO))
            break
        t1 = env[k + 1][0] if k + 1 < len(env) else None
        clipped.append((t0, v0, s0))
        if s0 > 0:
            tc = t0 + (total - v0) / s0
            if t1 is None or tc < t1:
                clipped.append((tc, total, RZERO))
                break
    return ArrivalCurve(breakpoints=clipped, total=total)


def cut_envelope_R(inst: PathInstance, i: int, j: int):
    """Cost via the cut-envelope identity: integral of (total - A(t))."""
    if i == j:
        return RZERO
    return arrival_curve(inst, i, j).tail_integral()


def cut_envelope_L(inst: PathInstance, i: int, j: int):
    n = inst.n
    if i == j:
        return RZERO
    return cut_envelope_R(inst.reversed(), n + 1 - j, n + 1 - i)


# ---------------------------------------------------------------------------
# exhaustive k-sink

def exhaustive_ksink(inst: PathInstance, k: int, bound: int = 10**7):
    """Brute-force optimum over all divider placements and vertex sinks."""
    from .ksink import KSinkSolution, padded_trivial_solution

    if k < 1:
        raise ValueError("k must be at least 1")
    n = inst.n
    if k >= n:
        return padded_trivial_solution(inst, k)
    if comb(n - 1, k - 1) > bound:
        raise EnumerationBoundExceeded(
            f"C({n - 1},{k - 1}) placements exceed the bound {bound}")

    part_cache = {}

    def part_cost(a, b):
        key = (a, b)
        if key not in part_cache:
            best = None
            best_s = None
            for s in range(a, b + 1):
                c = naive_L(inst, a, s) + naive_R(inst, s, b)
                if best is None or c < best:
                    best, best_s = c, s
            part_cache[key] = (best, best_s)
        return part_cache[key]

    from itertools import combinations

    best_cost = None
    best_dividers = None
    best_sinks = None
    for cuts in combinations(range(1, n), k - 1):
        bounds = [0] + list(cuts) + [n]
        total = RZERO
        sinks = []
        for g in range(k):
            c, s = part_cost(bounds[g] + 1, bounds[g + 1])
            total += c
            sinks.append(s)
        if best_cost is None or total < best_cost:
            best_cost = total
            best_dividers = list(cuts)
            best_sinks = sinks
    return KSinkSolution(k=k, sinks=best_sinks, dividers=best_dividers, cost=best_cost)
