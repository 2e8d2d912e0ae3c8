"""k-sink dynamic program with dominance pruning.

Two cost tables per phase p: G[p][j] is the best cost of p sinks on
v_1..v_j with a sink at v_j; F[p][j] drops the rightmost-sink requirement.
Each table is computed left to right while maintaining the list of
non-dominated candidate split points and their switching points (the first
position at which a younger candidate starts to dominate an older one).
Dominance, once gained, persists as the target moves right, which makes
the candidate list a queue with monotone switching points and lets each
switching point be found by binary search over subpath-cost queries.

Every table entry also compares the front candidate against the fresh
candidate j itself: the switching-point machinery looks strictly beyond a
candidate's own position, so a newly added candidate's advantage at its
own index is invisible to it.  Candidates are registered for every j from
1 (entries left of the phase index are zero-cost but still feed later
minima).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .ctree import PathCostIndex, build_tree, query_R_linear
from .flow import FROM_LEFT, sweep_costs
from .model import PathInstance
from .rational import INFINITE, RZERO


@dataclass(frozen=True)
class KSinkSolution:
    k: int
    sinks: list
    dividers: list      # k-1 positions b; group g is (b[g-1], b[g]]
    cost: object


def padded_trivial_solution(inst: PathInstance, k: int) -> KSinkSolution:
    """k >= n: every vertex is a sink, extra sinks pile on the last vertex."""
    n = inst.n
    sinks = list(range(1, n + 1)) + [n] * (k - n)
    dividers = list(range(1, n)) + [n] * (k - n)
    return KSinkSolution(k=k, sinks=sinks, dividers=dividers, cost=RZERO)


@dataclass
class PhaseState:
    """Candidate list I, switching points X, and the cost accessors of one
    phase sweep.  base[i] is the candidate's own table value; q(i, j) the
    subpath cost of serving (the relevant side of) j from i."""

    n: int
    base: list
    q: object
    I: list = field(default_factory=list)
    X: list = field(default_factory=list)

    def dominates_at(self, i, i2, j):
        """Does the younger candidate i2 serve position j at most as
        expensively as i does?"""
        return self.base[i2] + self.q(i2, j) <= self.base[i] + self.q(i, j)


def switching_point(state: PhaseState, i, i2, floor=None):
    """Leftmost position past i2 where candidate i2 starts dominating i
    (INFINITE if it never does); binary search, valid because dominance
    persists once gained.  ``floor`` is an optional known lower bound."""
    lo, hi = i2 + 1, state.n
    if floor is not None and floor is not INFINITE and floor + 1 > lo:
        lo = floor + 1
    if lo > hi or not state.dominates_at(i, i2, hi):
        return INFINITE
    while lo < hi:
        mid = (lo + hi) // 2
        if state.dominates_at(i, i2, mid):
            hi = mid
        else:
            lo = mid + 1
    return lo


def add_vertex(state: PhaseState, j):
    """Register vertex j as a candidate, evicting the front candidate once
    its successor dominates it and pruning tail candidates that the
    newcomer overtakes no later than they overtake their predecessors."""
    I, X = state.I, state.X
    if len(I) >= 2 and X[0] <= j:
        I.pop(0)
        X.pop(0)
    while len(I) >= 2:
        i = I[-1]
        prev_x = X[-1]
        # x(i, j) <= prev_x iff j already dominates i at prev_x
        if prev_x is INFINITE or state.dominates_at(i, j, prev_x):
            I.pop()
            X.pop()
        else:
            break
    if I:
        # the new switching point is known to lie past the list's last one
        X.append(switching_point(state, I[-1], j, floor=X[-1] if X else None))
    I.append(j)


def _run_phase(n, base, q):
    """One table sweep: out[j] = min over i <= j of base[i] + q(i, j),
    with backpointers.  Ties prefer the fresh candidate j."""
    state = PhaseState(n=n, base=base, q=q)
    out = [None] * (n + 1)
    arg = [0] * (n + 1)
    for j in range(1, n + 1):
        add_vertex(state, j)
        i1 = state.I[0]
        fresh = base[j]
        if i1 != j:
            val = base[i1] + q(i1, j)
            if val < fresh:
                out[j] = val
                arg[j] = i1
                continue
        out[j] = fresh
        arg[j] = j
    return out, arg


class _Memo:
    __slots__ = ("fn", "cache")

    def __init__(self, fn):
        self.fn = fn
        self.cache = {}

    def __call__(self, i, j):
        key = (i, j)
        hit = self.cache.get(key)
        if hit is None:
            hit = self.fn(i, j)
            self.cache[key] = hit
        return hit


def solve_ksink(inst: PathInstance, k: int, *, index: PathCostIndex = None,
                linear: bool = False, force_general: bool = False) -> KSinkSolution:
    """Optimal placement of k sinks minimizing the summed evacuation time.

    ``linear`` answers subpath-cost queries with the plain flow-engine
    merge instead of the preprocessed tree (for differential runs).
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    n = inst.n
    if k >= n:
        return padded_trivial_solution(inst, k)

    if linear:
        rev = inst.reversed()
        q_r = _Memo(lambda i, j: query_R_linear(inst, i, j))

        def q_l_raw(i, j):
            return query_R_linear(rev, n + 1 - j, n + 1 - i)
    else:
        if index is None:
            index = build_tree(inst, force_general=force_general)
        q_r = _Memo(index.query_R)
        q_l_raw = index.query_L

    def left_cost(i, j):
        # cost of serving v_{i+1}..v_{j-1} rightward into a sink at v_j
        return q_l_raw(i + 1, j) if i + 1 <= j else RZERO

    q_l = _Memo(left_cost)

    phi_l = sweep_costs(inst, FROM_LEFT)
    g = [RZERO] + phi_l[1:]
    arg_f = [None] * (k + 1)
    arg_g = [None] * (k + 1)
    f = None
    for p in range(1, k + 1):
        if p > 1:
            g, arg_g[p] = _run_phase(n, f, q_l)
        f, arg_f[p] = _run_phase(n, g, q_r)
    cost = f[n]

    sinks = []
    dividers = []

    def emit_trivial(p, j):
        # p sinks cover v_1..v_j (possibly empty) at zero cost; leading
        # empty groups are encoded with divider 0
        if j == 0:
            sinks.extend([1] * p)
            dividers.extend([0] * (p - 1))
        else:
            sinks.extend(reversed([1] * (p - j) + list(range(1, j + 1))))
            dividers.extend(reversed([0] * (p - j) + list(range(1, j))))

    p, j = k, n
    while True:
        if p >= j:
            emit_trivial(p, j)
            break
        i = arg_f[p][j]
        sinks.append(i)
        if p == 1:
            break
        i2 = arg_g[p][i]
        if i2 >= i:
            i2 = i - 1       # equal-cost slide so the sink stays in its group
        dividers.append(i2)
        p, j = p - 1, i2
    sinks.reverse()
    dividers.reverse()
    return KSinkSolution(k=k, sinks=sinks, dividers=dividers, cost=cost)
