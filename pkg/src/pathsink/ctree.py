"""Preprocessed index for subpath evacuation costs R(i,j) and L(i,j).

A balanced binary tree over the vertices stores, per node, the departure
flow of the node's span in bottleneck-line form: for each populated vertex
l of the span, the cumulative flow that has left the span's near end by
time t is bounded by (weight ahead of l) + (bottleneck rate) x (t - lag).
The inverse view - time at which the V-th unit departs, as a function of
V - is the upper envelope of those lines; it is precomputed per node
together with prefix integrals, and the equivalent section sequence,
cluster list, and cluster merge forest are derived from it.

A query R(i,j) decomposes [v_{i+1}, v_j] into O(log n) canonical nodes and
sweeps their lines left to right, maintaining the upper envelope of all
constraints seen so far (a monotone convex-hull walk: bottleneck rates
only decrease along the sweep, so a constraint overtaken by a newer one
never binds again).  The query cost is the exact integral of the envelope
over the total weight.  Nodes whose stored curve needs no re-ceiling (the
query bottleneck is at least the node's top rate) are spliced in whole
with one crossing search against their precomputed envelope; re-ceiled
nodes stream their lines individually.  The exactness of every path is
enforced by differential tests against the independent oracles.
"""

from __future__ import annotations

import heapq
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field

from .flow import FROM_LEFT, FROM_RIGHT, Section, SectionSequence, _FlowState
from .model import PathInstance, PrefixTables, build_prefix_tables
from .rational import RZERO, Rat


# ---------------------------------------------------------------------------
# per-node data

class _NodeData:
    """Departure-curve data for one tree node (span [lo, hi], moving left,
    leaving the span's left end through its outgoing edge)."""

    __slots__ = ("weight", "act", "rate", "lag", "head", "max_rate",
                 "pv", "pt", "pr", "phead", "cum",
                 "sec_start", "sec_h", "sec_w", "sec_head",
                 "pref_w", "pref_w2", "pref_cost",
                 "clu_first", "clu_start", "clu_w",
                 "vertex_act", "forest")

    def __init__(self):
        self.weight = RZERO
        self.act = []
        self.rate = []
        self.lag = []
        self.head = []
        self.max_rate = None
        self.pv = []       # envelope piece start values
        self.pt = []       # departure time at piece start
        self.pr = []       # piece rate (flow units per time)
        self.phead = []
        self.cum = []      # integral of the envelope from V=0 to pv[k]
        self.sec_start = []
        self.sec_h = []
        self.sec_w = []
        self.sec_head = []
        self.pref_w = [RZERO]
        self.pref_w2 = [RZERO]
        self.pref_cost = [RZERO]
        self.clu_first = []
        self.clu_start = []
        self.clu_w = []
        self.vertex_act = {}
        self.forest = None

    # -- envelope evaluation -------------------------------------------------

    def piece_at(self, v):
        return bisect_right(self.pv, v) - 1

    def time_at(self, v):
        k = self.piece_at(v)
        return self.pt[k] + (v - self.pv[k]) / self.pr[k]

    def integral_to(self, v):
        """Integral of the envelope over [0, v] (v may run past the span's
        weight: the envelope's constraint lines keep applying to flow that
        queues behind this span)."""
        k = self.piece_at(v)
        t0 = self.pt[k]
        dv = v - self.pv[k]
        return self.cum[k] + dv * (2 * t0 + dv / self.pr[k]) / 2


def _build_node_data(inst, tables, lo, hi):
    """Bottleneck lines, envelope, sections, and clusters for span [lo, hi].

    Only valid for lo >= 2 (the curve leaves through edge lo-1)."""
    data = _NodeData()
    act = RZERO
    run_min = None
    for l in range(lo, hi + 1):
        run_min = inst.capacities[lo - 1] if l == lo else (
            run_min if run_min < inst.capacities[l - 1] else inst.capacities[l - 1])
        data.vertex_act[l] = act
        w = inst.weights[l]
        if w > 0:
            data.act.append(act)
            data.rate.append(run_min)
            data.lag.append((tables.cum_dist[l] - tables.cum_dist[lo]) * inst.tau)
            data.head.append(l)
            act += w
    data.weight = act
    if data.act:
        data.max_rate = data.rate[0]
        _build_envelope(data)
        _build_sections(data)
    return data


def _build_envelope(data):
    """Upper envelope (in the value domain) of the node's lines; slopes
    1/rate are non-decreasing, so a single forward pass with a stack works."""
    pv, pt, pr, phead = data.pv, data.pt, data.pr, data.phead
    for k in range(len(data.act)):
        a, r, g = data.act[k], data.rate[k], data.lag[k]
        placed = False
        while pv:
            v0, t0, r0 = pv[-1], pt[-1], pr[-1]
            if v0 >= a:
                # line k is active at the piece start; steeper or equal
                val = g + (v0 - a) / r
                if val >= t0:
                    pv.pop(); pt.pop(); pr.pop(); phead.pop()
                    continue
                if r0 == r:
                    placed = True  # parallel and below: never binds
                    break
                cross = (t0 - g + a / r - v0 / r0) / (1 / r - 1 / r0)
                pv.append(cross)
                pt.append(g + (cross - a) / r)
                pr.append(r)
                phead.append(data.head[k])
                placed = True
                break
            env_at_a = t0 + (a - v0) / r0
            if g >= env_at_a:
                pv.append(a); pt.append(g); pr.append(r); phead.append(data.head[k])
                placed = True
                break
            if r0 == r:
                placed = True  # parallel and below
                break
            cross = (t0 - g + a / r - v0 / r0) / (1 / r - 1 / r0)
            pv.append(cross)
            pt.append(g + (cross - a) / r)
            pr.append(r)
            phead.append(data.head[k])
            placed = True
            break
        if not placed and not pv:
            pv.append(a); pt.append(g); pr.append(r); phead.append(data.head[k])
    cum = data.cum
    total = RZERO
    cum.append(total)
    for k in range(len(pv) - 1):
        dv = pv[k + 1] - pv[k]
        total += dv * (2 * pt[k] + dv / pr[k]) / 2
        cum.append(total)


def _build_sections(data):
    """Section sequence of the node's departing flow, clipped at its
    weight, with prefix sums and cluster boundaries."""
    w_total = data.weight
    starts, hs, ws, heads = [], [], [], []
    for k in range(len(data.pv)):
        v0 = data.pv[k]
        if v0 >= w_total:
            break
        v1 = data.pv[k + 1] if k + 1 < len(data.pv) else w_total
        if v1 > w_total:
            v1 = w_total
        weight = v1 - v0
        if weight <= 0:
            continue
        t0, r = data.pt[k], data.pr[k]
        if starts and hs[-1] == r and starts[-1] + ws[-1] / hs[-1] == t0:
            ws[-1] += weight
        else:
            starts.append(t0); hs.append(r); ws.append(weight)
            heads.append(data.phead[k])
    data.sec_start, data.sec_h, data.sec_w, data.sec_head = starts, hs, ws, heads
    pw, pw2, pc = data.pref_w, data.pref_w2, data.pref_cost
    for k in range(len(ws)):
        pw.append(pw[-1] + ws[k])
        pw2.append(pw2[-1] + ws[k] * ws[k])
        pc.append(pc[-1] + ws[k] * starts[k] + ws[k] * ws[k] / (2 * hs[k]))
    prev_end = None
    for k in range(len(ws)):
        if prev_end is None or starts[k] > prev_end:
            data.clu_first.append(k)
            data.clu_start.append(starts[k])
            data.clu_w.append(ws[k])
        else:
            data.clu_w[-1] += ws[k]
        prev_end = starts[k] + ws[k] / hs[k]


# ---------------------------------------------------------------------------
# cluster forest with deterministic skip pointers

@dataclass
class ForestNode:
    """One cluster of a node's flow: either an original cluster (leaf) or
    the result of merging two neighbors at the recorded critical capacity."""

    index: int
    cap: object              # critical capacity that formed it; None for leaves
    left: int                # child indexes (-1 for leaves)
    right: int
    first_cluster: int       # extent, in original-cluster indexes
    last_cluster: int
    start: object
    weight: object
    sum_sq_weight: object    # sum of squared section weights inside
    cost_rel: object         # stored flow cost relative to the extent start
    parent: int = -1


class ClusterForest:
    """Merge history of one node's clusters under a falling capacity,
    ordered by critical capacity, with power-of-two skip pointers so a
    leaf-to-root walk takes O(log n)."""

    def __init__(self, data: _NodeData, floor_cap, span_lo, span_hi):
        self.span = (span_lo, span_hi)
        self.data = data
        self.nodes = []
        self.leaf_of_cluster = []
        self._build(data, floor_cap)
        self._build_skips()

    def _cluster_aggregates(self, data, first, last):
        sa = data.clu_first[first]
        sb = data.clu_first[last + 1] if last + 1 < len(data.clu_first) else len(data.sec_w)
        start = data.clu_start[first]
        weight = data.pref_w[sb] - data.pref_w[sa]
        sum_sq = data.pref_w2[sb] - data.pref_w2[sa]
        cost = (data.pref_cost[sb] - data.pref_cost[sa]) - start * weight
        return start, weight, sum_sq, cost

    def _build(self, data, floor_cap):
        m = len(data.clu_first)
        nxt = list(range(1, m)) + [-1]
        prv = [-1] + list(range(m - 1))
        alive = []
        heap = []
        serial = 0
        for k in range(m):
            start, weight, sum_sq, cost = self._cluster_aggregates(data, k, k)
            self.nodes.append(ForestNode(k, None, -1, -1, k, k, start, weight,
                                         sum_sq, cost))
            self.leaf_of_cluster.append(k)
            alive.append(True)
        for k in range(m):
            if nxt[k] != -1:
                ratio = self.nodes[k].weight / (self.nodes[nxt[k]].start - self.nodes[k].start)
                if floor_cap is None or ratio >= floor_cap:
                    serial += 1
                    heapq.heappush(heap, (-ratio, self.nodes[k].start, serial, k))
        while heap:
            neg, _, _, fid = heapq.heappop(heap)
            if not alive[fid] or nxt[fid] == -1:
                continue
            rid = nxt[fid]
            cap = -neg
            a, b = self.nodes[fid], self.nodes[rid]
            new_id = len(self.nodes)
            start, weight = a.start, a.weight + b.weight
            _, _, sum_sq, cost = self._cluster_aggregates(
                data, a.first_cluster, b.last_cluster)
            node = ForestNode(new_id, cap, fid, rid, a.first_cluster,
                              b.last_cluster, start, weight, sum_sq, cost)
            self.nodes.append(node)
            a.parent = new_id
            b.parent = new_id
            alive[fid] = alive[rid] = False
            alive.append(True)
            nn, pp = nxt[rid], prv[fid]
            nxt.append(nn)
            prv.append(pp)
            if nn != -1:
                prv[nn] = new_id
            if pp != -1:
                nxt[pp] = new_id
            nxt[fid] = nxt[rid] = -1
            if nn != -1:
                ratio = weight / (self.nodes[nn].start - start)
                if floor_cap is None or ratio >= floor_cap:
                    serial += 1
                    heapq.heappush(heap, (-ratio, start, serial, new_id))
            if pp != -1:
                ratio = self.nodes[pp].weight / (start - self.nodes[pp].start)
                if floor_cap is None or ratio >= floor_cap:
                    serial += 1
                    heapq.heappush(heap, (-ratio, self.nodes[pp].start, serial, pp))

    def _build_skips(self):
        n = len(self.nodes)
        parents = [nd.parent for nd in self.nodes]
        self.skips = [parents]
        level = parents
        while any(p != -1 for p in level):
            nxt_level = [level[p] if p != -1 else -1 for p in level]
            if not any(p != -1 for p in nxt_level):
                break
            self.skips.append(nxt_level)
            level = nxt_level

    def _leaf_for_vertex(self, v_h):
        lo, hi = self.span
        if not (lo <= v_h <= hi):
            raise IndexError(f"vertex {v_h} outside span {self.span}")
        pos = self.data.vertex_act[v_h]
        if pos >= self.data.weight and pos > 0:
            pos = self.data.weight   # clamp trailing zero-weight vertices
        sec = bisect_right(self.data.pref_w, pos) - 1
        if sec >= len(self.data.sec_w):
            sec = len(self.data.sec_w) - 1
        cluster = bisect_right(self.data.clu_first, sec) - 1
        return self.leaf_of_cluster[cluster]

    def lift(self, leaf_id, cap) -> ForestNode:
        """Highest ancestor of a leaf whose recorded critical capacity is
        still >= cap, via the skip pointers."""
        cur = leaf_id
        nodes = self.nodes
        for level in range(len(self.skips) - 1, -1, -1):
            jump = self.skips[level]
            while True:
                p = jump[cur]
                if p != -1 and nodes[p].cap >= cap:
                    cur = p
                else:
                    break
        return nodes[cur]

    def find_cluster(self, cap, v_h) -> ForestNode:
        """Cluster containing v_h's flow once the node's flow is ceiled by
        ``cap``: climb while the recorded critical capacity is >= cap,
        jumping along the skip pointers."""
        return self.lift(self._leaf_for_vertex(v_h), cap)

    def find_cluster_naive(self, cap, v_h) -> ForestNode:
        """Reference walk, one parent at a time."""
        cur = self._leaf_for_vertex(v_h)
        while True:
            p = self.nodes[cur].parent
            if p != -1 and self.nodes[p].cap >= cap:
                cur = p
            else:
                break
        return self.nodes[cur]

    def walk_length(self, cap, v_h) -> int:
        """Nodes visited by the skip-accelerated walk (for bound checks)."""
        cur = self._leaf_for_vertex(v_h)
        visits = 1
        for level in range(len(self.skips) - 1, -1, -1):
            jump = self.skips[level]
            while True:
                p = jump[cur]
                if p != -1 and self.nodes[p].cap >= cap:
                    cur = p
                    visits += 1
                else:
                    break
            visits += 1
        return visits


# ---------------------------------------------------------------------------
# the tree

class _TreeNode:
    __slots__ = ("lo", "hi", "left", "right", "data")

    def __init__(self, lo, hi):
        self.lo = lo
        self.hi = hi
        self.left = None
        self.right = None
        self.data = None


class _DirectionalTree:
    """Balanced tree over the path for one flow direction (leftward)."""

    def __init__(self, inst: PathInstance, tables: PrefixTables,
                 with_forests: bool):
        self.inst = inst
        self.tables = tables
        self.with_forests = with_forests
        self.floor_cap = min(inst.capacities[1:inst.n]) if inst.n > 1 else None
        self.peak_sections = 0
        self.nodes_by_span = {}
        self.root = self._build(1, inst.n)

    def _build(self, lo, hi):
        node = _TreeNode(lo, hi)
        self.nodes_by_span[(lo, hi)] = node
        if lo < hi:
            mid = (lo + hi - 1) // 2
            node.left = self._build(lo, mid)
            node.right = self._build(mid + 1, hi)
        if lo >= 2:
            node.data = _build_node_data(self.inst, self.tables, lo, hi)
            if len(node.data.sec_w) > self.peak_sections:
                self.peak_sections = len(node.data.sec_w)
            if self.with_forests and node.data.act:
                node.data.forest = ClusterForest(node.data, self.floor_cap, lo, hi)
        return node

    def decompose(self, a, b):
        """Canonical nodes covering [a, b], left to right."""
        out = []

        def rec(node):
            if node.hi < a or node.lo > b:
                return
            if a <= node.lo and node.hi <= b:
                out.append(node)
                return
            rec(node.left)
            rec(node.right)

        rec(self.root)
        return out

    # -- the query sweep ------------------------------------------------------

    def query(self, i, j):
        """Cost of evacuating v_{i+1}..v_j to v_i (all indexes in this
        tree's own orientation)."""
        if not (1 <= i <= j <= self.inst.n):
            raise IndexError(f"query: invalid range ({i}, {j})")
        if i == j:
            return RZERO
        caps = self.tables
        tau = self.inst.tau
        dist = caps.cum_dist

        # envelope entries: ('l', Vs, T0, rate) | ('v', Vs, data, B, delta)
        env = []
        head = 0
        cost = RZERO
        v_cur = RZERO

        def entry_value(e, v):
            if e[0] == "l":
                return e[2] + (v - e[1]) / e[3]
            _, _, data, base, delta = e
            return delta + data.time_at(v - base)

        def entry_rate_at(e, v):
            if e[0] == "l":
                return e[3]
            _, _, data, base, delta = e
            return data.pr[data.piece_at(v - base)]

        def entry_integral(e, v1, v2):
            if e[0] == "l":
                d1, d2 = v1 - e[1], v2 - e[1]
                return e[2] * (v2 - v1) + (d2 * d2 - d1 * d1) / (2 * e[3])
            _, _, data, base, delta = e
            return delta * (v2 - v1) + data.integral_to(v2 - base) - data.integral_to(v1 - base)

        def advance(target):
            nonlocal cost, v_cur, head
            while v_cur < target:
                e = env[head]
                seg_end = env[head + 1][1] if head + 1 < len(env) else None
                stop = target if seg_end is None or seg_end > target else seg_end
                cost += entry_integral(e, v_cur, stop)
                v_cur = stop
                if seg_end is not None and v_cur >= seg_end:
                    head += 1

        def cross_line_into_entry(e, vs, g, a, r):
            """Smallest v >= vs where the line g + (v - a)/r reaches entry e
            (the line is at least as steep as everything in e)."""
            if e[0] == "l":
                if e[3] == r:
                    return None     # parallel, caller checked line is below
                num = e[2] - g + a / r - e[1] / e[3]
                den = 1 / r - 1 / e[3]
                v = num / den
                return v if v > vs else vs
            _, _, data, base, delta = e
            lo_k = data.piece_at(vs - base)
            hi_k = len(data.pv) - 1
            # first piece whose start the line already dominates
            lo, hi = lo_k, hi_k + 1
            while lo < hi:
                mid = (lo + hi) // 2
                if mid == lo_k:
                    lo = mid + 1
                    continue
                pv_g = data.pv[mid] + base
                if pv_g <= vs:
                    lo = mid + 1
                    continue
                if g + (pv_g - a) / r >= delta + data.pt[mid]:
                    hi = mid
                else:
                    lo = mid + 1
            k = lo - 1
            if k < lo_k:
                k = lo_k
            # crossing inside piece k (line vs linear piece)
            t0 = delta + data.pt[k]
            v0 = data.pv[k] + base
            rr = data.pr[k]
            if rr == r:
                return None if lo > hi_k else max(vs, data.pv[lo] + base)
            num = t0 - g + a / r - v0 / rr
            den = 1 / r - 1 / rr
            v = num / den
            start_k = max(vs, v0)
            if v < start_k:
                v = start_k
            if lo <= hi_k and v > data.pv[lo] + base:
                v = data.pv[lo] + base
            return v

        def push_line(a, g, r):
            nonlocal head
            while len(env) > head:
                e = env[-1]
                vs = e[1]
                if vs >= a:
                    if g + (vs - a) / r >= entry_value(e, vs):
                        env.pop()
                        continue
                    v = cross_line_into_entry(e, vs, g, a, r)
                    if v is None:
                        return      # parallel and below: never binds
                    env.append(("l", v, g + (v - a) / r, r))
                    return
                if g >= entry_value(e, a):
                    env.append(("l", a, g, r))
                    return
                v = cross_line_into_entry(e, a, g, a, r)
                if v is None:
                    return
                env.append(("l", v, g + (v - a) / r, r))
                return
            env.append(("l", a, g, r))

        def cross_view_into_entry(e, vs, data, base, delta):
            """Smallest v >= vs where the spliced node curve reaches entry
            e; the node curve is at least as steep everywhere."""
            if e[0] == "l":
                # walk the node pieces (monotone difference, single crossing)
                lo_k = data.piece_at(vs - base)
                lo, hi = lo_k, len(data.pv)
                while lo < hi:
                    mid = (lo + hi) // 2
                    if mid == lo_k:
                        lo = mid + 1
                        continue
                    pv_g = data.pv[mid] + base
                    if pv_g <= vs:
                        lo = mid + 1
                        continue
                    if delta + data.pt[mid] >= entry_value(e, pv_g):
                        hi = mid
                    else:
                        lo = mid + 1
                k = lo - 1
                if k < lo_k:
                    k = lo_k
                rr = data.pr[k]
                if rr == e[3]:
                    if lo >= len(data.pv):
                        return None
                    return max(vs, data.pv[lo] + base)
                # line of entry: e.t + (v - e.vs)/e.r ; node piece: delta+pt + (v-base-pv)/rr
                num = e[2] - (delta + data.pt[k]) + (data.pv[k] + base) / rr - e[1] / e[3]
                den = 1 / rr - 1 / e[3]
                v = num / den
                start_k = max(vs, data.pv[k] + base)
                if v < start_k:
                    v = start_k
                if lo < len(data.pv) and v > data.pv[lo] + base:
                    v = data.pv[lo] + base
                return v
            # view vs view: walk the older view's pieces
            _, _, odata, obase, odelta = e
            k = odata.piece_at(vs - obase)
            while True:
                seg_end = odata.pv[k + 1] + obase if k + 1 < len(odata.pv) else None
                v0 = max(vs, odata.pv[k] + obase)
                line = ("l", v0, odelta + odata.time_at(v0 - obase), odata.pr[k])
                v = cross_view_into_entry(line, v0, data, base, delta)
                if v is not None and (seg_end is None or v <= seg_end):
                    return v
                if seg_end is None:
                    return None
                k += 1
                vs = seg_end

        def push_view(data, base, delta):
            nonlocal head
            a = base      # first activation (act[0] == 0)
            while len(env) > head:
                e = env[-1]
                vs = e[1]
                probe = vs if vs >= a else a
                node_val = delta + data.time_at(probe - base)
                if vs >= a and node_val >= entry_value(e, vs):
                    env.pop()
                    continue
                if vs < a and delta + data.pt[0] >= entry_value(e, a):
                    env.append(("v", a, data, base, delta))
                    return
                v = cross_view_into_entry(e, probe, data, base, delta)
                if v is None:
                    return      # node curve never rises above: fully shadowed
                env.append(("v", v, data, base, delta))
                return
            env.append(("v", a, data, base, delta))

        # Envelope edits never touch the region a push leaves behind, so
        # the cost integral is evaluated once at the end.
        base = RZERO
        for node in self.decompose(i + 1, j):
            data = node.data
            if data is None or not data.act:
                continue
            cap = caps.range_capacity(i, node.lo)
            delta = (dist[node.lo] - dist[i]) * tau
            if data.max_rate <= cap:
                push_view(data, base, delta)
            elif data.forest is not None and data.rate[-1] > cap:
                # every line re-ceiled: no partial swallows, so the forest
                # cut at this capacity is one flat line per merged cluster
                forest = data.forest
                leafs = forest.leaf_of_cluster
                clu_first, pref_w = data.clu_first, data.pref_w
                k = 0
                m = len(clu_first)
                while k < m:
                    top = forest.lift(leafs[k], cap)
                    push_line(base + pref_w[clu_first[top.first_cluster]],
                              delta + top.start, cap)
                    k = top.last_cluster + 1
            else:
                act, rates, lags = data.act, data.rate, data.lag
                for k in range(len(act)):
                    r = rates[k]
                    if r > cap:
                        r = cap
                    push_line(base + act[k], delta + lags[k], r)
            base += data.weight
        advance(base)
        return cost

    def query_linear(self, i, j):
        """Same contract, via a plain flow-engine sweep over the subpath."""
        return query_R_linear(self.inst, i, j)

    # -- contract surfaces ----------------------------------------------------

    def node_for_span(self, lo, hi):
        node = self.nodes_by_span.get((lo, hi))
        if node is None:
            raise KeyError(f"no tree node spans [{lo}, {hi}]")
        return node

    def node_sections(self, lo, hi) -> SectionSequence:
        node = self.node_for_span(lo, hi)
        if node.data is None:
            raise ValueError(f"node [{lo}, {hi}] stores no departure sequence "
                             f"(spans the path's first vertex)")
        d = node.data
        secs = [Section(d.sec_start[k], d.sec_h[k], d.sec_w[k], d.sec_head[k])
                for k in range(len(d.sec_w))]
        return SectionSequence(secs, reference_vertex=lo, direction=FROM_RIGHT)

    def forest_for_span(self, lo, hi) -> ClusterForest:
        node = self.node_for_span(lo, hi)
        if node.data is None or node.data.forest is None:
            raise ValueError(f"node [{lo}, {hi}] has no cluster forest")
        return node.data.forest


class PathCostIndex:
    """Two directional trees answering R(i,j) and L(i,j).

    ``force_general`` builds cluster forests even for uniform-capacity
    instances (whose fast path skips them), for differential testing.
    """

    def __init__(self, inst: PathInstance, tables: PrefixTables = None,
                 force_general: bool = False):
        self.inst = inst
        self.tables = tables if tables is not None else build_prefix_tables(inst)
        self.uniform = inst.uniform_capacity()
        with_forests = force_general or not self.uniform
        self.right = _DirectionalTree(inst, self.tables, with_forests)
        rev = inst.reversed()
        self.left = _DirectionalTree(rev, build_prefix_tables(rev), with_forests)
        self.peak_sections = max(self.right.peak_sections, self.left.peak_sections)

    def query_R(self, i, j):
        """Exact cost of evacuating v_{i+1}..v_j leftward to v_i."""
        return self.right.query(i, j)

    def query_L(self, i, j):
        """Exact cost of evacuating v_i..v_{j-1} rightward to v_j."""
        n = self.inst.n
        if not (1 <= i <= j <= n):
            raise IndexError(f"query_L: invalid range ({i}, {j})")
        return self.left.query(n + 1 - j, n + 1 - i)

    def query_R_linear(self, i, j):
        return self.right.query_linear(i, j)

    def query_L_linear(self, i, j):
        n = self.inst.n
        if not (1 <= i <= j <= n):
            raise IndexError(f"query_L_linear: invalid range ({i}, {j})")
        return self.left.query_linear(n + 1 - j, n + 1 - i)


def build_tree(inst: PathInstance, force_general: bool = False) -> PathCostIndex:
    """Build the full query index (both directions, forests included)."""
    return PathCostIndex(inst, force_general=force_general)


def query_R_linear(inst: PathInstance, i, j):
    """Reference implementation of R(i,j): a plain left-moving sweep of
    the raw subpath with the flow-engine primitives, O(length) pieces."""
    if not (1 <= i <= j <= inst.n):
        raise IndexError(f"query_R_linear: invalid range ({i}, {j})")
    if i == j:
        return RZERO
    floor = min(inst.capacities[i:j])
    state = _FlowState(threshold=floor)
    for m in range(j, i, -1):
        if m < j:
            state.advance(inst.lengths[m] * inst.tau)
        cap = inst.capacities[m - 1]
        state.ceil(cap)
        state.inject(inst.weights[m], cap, m)
    state.advance(inst.lengths[i] * inst.tau)
    return state.cost()


def query_L_linear(inst: PathInstance, i, j):
    """Reference implementation of L(i,j) by mirroring."""
    n = inst.n
    if not (1 <= i <= j <= n):
        raise IndexError(f"query_L_linear: invalid range ({i}, {j})")
    return query_R_linear(inst.reversed(), n + 1 - j, n + 1 - i)
