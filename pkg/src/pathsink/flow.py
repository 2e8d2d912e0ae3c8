"""The fluid evacuation engine.

Flow is represented as section sequences: disjoint time intervals of
constant positive rate.  The engine maintains one sequence incrementally
while sweeping a path from one end to the other, applying three operations
per vertex: shift (travel time), ceil (cap the rate at the outgoing edge
capacity, merging clusters whose critical capacity reaches the cap), and
inject (the vertex's own evacuees drain at full rate from time zero,
filling gaps ahead of the incoming flow).

Costs integrate arrival time against arrival rate: a section of weight w,
start t0 and height h contributes w*t0 + w^2/(2h).  All arithmetic is
exact; cluster merges are driven by a lazy max-heap of critical
capacities so a full sweep does amortized O(n log n) work.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from .model import PathInstance
from .rational import INFINITE, RZERO, Rat

FROM_RIGHT = "R"
FROM_LEFT = "L"


@dataclass(frozen=True)
class Section:
    """A maximal run of constant flow rate.

    start: arrival/departure time at the reference vertex
    height: flow rate (> 0)
    weight: total evacuees carried (> 0); duration is weight/height
    head: vertex the section's first evacuee originates from
    """

    start: object
    height: object
    weight: object
    head: int

    @property
    def end(self):
        return self.start + self.weight / self.height


@dataclass
class SectionSequence:
    """An ordered, disjoint list of sections at one vertex."""

    sections: list
    reference_vertex: int = 0
    direction: str = FROM_RIGHT

    def validate(self):
        prev_end = None
        prev_height = None
        for s in self.sections:
            if not (s.weight > 0 and s.height > 0):
                raise ValueError("sections must carry positive weight at positive rate")
            if prev_end is not None:
                if s.start < prev_end:
                    raise ValueError("sections overlap")
                if s.start == prev_end and s.height == prev_height:
                    raise ValueError("zero-gap equal-height sections must be stored merged")
            prev_end = s.end
            prev_height = s.height
        return self

    def total_weight(self):
        total = RZERO
        for s in self.sections:
            total += s.weight
        return total


def section_cost(weight, start, height):
    """Time integral of t x rate over one section: w*t0 + w^2/(2h)."""
    if not height > 0:
        raise ValueError("section height must be positive")
    if weight < 0:
        raise ValueError("section weight must be nonnegative")
    return weight * start + weight * weight / (2 * height)


def sequence_cost(seq):
    sections = seq.sections if isinstance(seq, SectionSequence) else seq
    total = RZERO
    for s in sections:
        total += section_cost(s.weight, s.start, s.height)
    return total


def shift(seq: SectionSequence, delta) -> SectionSequence:
    """Delay every section by delta; cost grows by exactly delta x weight."""
    if delta < 0:
        raise ValueError("shift must be nonnegative")
    return SectionSequence(
        sections=[Section(s.start + delta, s.height, s.weight, s.head) for s in seq.sections],
        reference_vertex=seq.reference_vertex,
        direction=seq.direction,
    )


# ---------------------------------------------------------------------------
# incremental engine

class _Sec:
    __slots__ = ("start", "height", "weight", "head", "prev", "next",
                 "alive", "is_first", "clus", "ufp")

    def __init__(self, start, height, weight, head):
        self.start = start
        self.height = height
        self.weight = weight
        self.head = head
        self.prev = None
        self.next = None
        self.alive = True
        self.is_first = False
        self.clus = None      # cluster record; meaningful on union-find roots
        self.ufp = None       # union-find parent section (None = root)


class _Clu:
    __slots__ = ("start", "weight", "first", "root", "prev", "next", "alive", "ver")

    def __init__(self, start, weight, first):
        self.start = start
        self.weight = weight
        self.first = first
        self.root = first
        self.prev = None
        self.next = None
        self.alive = True
        self.ver = 0


class _FlowState:
    """Mutable departure sequence with amortized ceiling and injection.

    Section start times are stored in a fixed frame; the local time at the
    current vertex is stored + clock, so shifting the whole sequence is a
    single clock update.
    """

    def __init__(self, threshold=None):
        self.first_clu = None
        self.clock = RZERO
        self.threshold = threshold   # skip heap entries that can never fire
        self.merge_heap = []
        self.height_heap = []
        self._serial = 0
        self.total_weight = RZERO
        self._s1 = RZERO             # sum of weight x stored start
        self._s2 = RZERO             # sum of weight^2 / (2 height)
        self.count = 0
        self.peak_sections = 0

    # -- aggregates ---------------------------------------------------------

    def _agg_add(self, sec):
        self.total_weight += sec.weight
        self._s1 += sec.weight * sec.start
        self._s2 += sec.weight * sec.weight / (2 * sec.height)
        self.count += 1
        if self.count > self.peak_sections:
            self.peak_sections = self.count

    def _agg_remove(self, sec):
        self.total_weight -= sec.weight
        self._s1 -= sec.weight * sec.start
        self._s2 -= sec.weight * sec.weight / (2 * sec.height)
        self.count -= 1

    def cost(self):
        """Exact cost of the sequence in current local time."""
        return self._s1 + self.total_weight * self.clock + self._s2

    def advance(self, delta):
        self.clock += delta

    # -- heap plumbing ------------------------------------------------------

    def _push_ratio(self, clu):
        if clu.next is None:
            return
        ratio = clu.weight / (clu.next.start - clu.start)
        if self.threshold is not None and ratio < self.threshold:
            return
        self._serial += 1
        heapq.heappush(self.merge_heap, (-ratio, clu.start, self._serial, clu, clu.ver))

    def _push_height(self, sec):
        if self.threshold is not None and sec.height <= self.threshold:
            return
        self._serial += 1
        heapq.heappush(self.height_heap, (-sec.height, sec.start, self._serial, sec, sec.height))

    # -- structural helpers -------------------------------------------------

    def _unlink(self, sec):
        self._agg_remove(sec)
        sec.alive = False
        if sec.prev is not None:
            sec.prev.next = sec.next
        if sec.next is not None:
            sec.next.prev = sec.prev

    def _insert(self, sec, prev_sec, next_sec):
        sec.prev = prev_sec
        sec.next = next_sec
        if prev_sec is not None:
            prev_sec.next = sec
        if next_sec is not None:
            next_sec.prev = sec
        self._agg_add(sec)

    def _find(self, sec):
        """Union-find root of a section; the root carries the cluster record."""
        root = sec
        while root.ufp is not None:
            root = root.ufp
        while sec.ufp is not None:
            sec.ufp, sec = root, sec.ufp
        return root

    def _drain(self, flat, cap, cc):
        """Extend the busy period of rate-``cap`` section ``flat`` forward,
        absorbing everything it overlaps.  A busy period that reaches the
        next cluster's start unifies the two clusters.  ``cc`` is flat's
        cluster when the caller knows it (looked up lazily otherwise)."""
        merged_any = False
        while True:
            end = flat.start + flat.weight / cap
            s = flat.next
            if s is None:
                break
            if s.is_first:
                if end < s.start:
                    break
                if cc is None:
                    cc = self._find(flat).clus
                k = self._find(s).clus
                s.is_first = False
                cc.weight += k.weight
                cc.next = k.next
                if k.next is not None:
                    k.next.prev = cc
                k.alive = False
                k.root.ufp = cc.root
                k.root.clus = None
                cc.ver += 1
                merged_any = True
            if end > s.start:
                if s.height >= cap:
                    self._agg_remove(flat)
                    flat.weight += s.weight
                    self._agg_add(flat)
                    self._unlink(s)
                    continue
                s_end = s.start + s.weight / s.height
                backlog = flat.weight - cap * (s.start - flat.start)
                t_empty = s.start + backlog / (cap - s.height)
                if t_empty >= s_end:
                    self._agg_remove(flat)
                    flat.weight += s.weight
                    self._agg_add(flat)
                    self._unlink(s)
                    continue
                absorbed = s.height * (t_empty - s.start)
                self._agg_remove(flat)
                flat.weight += absorbed
                self._agg_add(flat)
                self._agg_remove(s)
                s.start = t_empty
                s.weight -= absorbed
                self._agg_add(s)
                break
            if end == s.start and s.height == cap:
                self._agg_remove(flat)
                flat.weight += s.weight
                self._agg_add(flat)
                self._unlink(s)
                continue
            break
        if merged_any:
            self._push_ratio(cc)

    def _lower_and_drain(self, sec, cap, cc):
        """Reduce an over-cap section to ``cap`` and extend its busy period
        forward."""
        self._agg_remove(sec)
        sec.height = cap
        self._agg_add(sec)
        self._push_height(sec)
        prev = sec.prev
        if prev is not None and not sec.is_first and prev.height == cap \
                and prev.start + prev.weight / cap == sec.start:
            self._agg_remove(prev)
            prev.weight += sec.weight
            self._agg_add(prev)
            self._unlink(sec)
            sec = prev
        self._drain(sec, cap, cc)
        return sec

    def _merge_cluster(self, clu, cap):
        """Ceil cluster ``clu`` (critical capacity >= cap); its output is
        then guaranteed to reach the next cluster, so they unify."""
        boundary = clu.next.start
        s = clu.first
        while s is not None and s.start < boundary:
            if s.height > cap:
                s = self._lower_and_drain(s, cap, clu)
            s = s.next
        self._push_ratio(clu)

    # -- the three per-vertex operations -------------------------------------

    def ceil(self, cap):
        """Cap every rate at ``cap``; clusters whose critical capacity
        reaches the cap merge with their successors (largest first)."""
        if cap is INFINITE or self.first_clu is None:
            return
        heap = self.merge_heap
        while heap and -heap[0][0] >= cap:
            _, _, _, clu, ver = heapq.heappop(heap)
            if not clu.alive or clu.ver != ver or clu.next is None:
                continue
            nxt = clu.next
            self._merge_cluster(clu, cap)
            if nxt.alive:
                raise AssertionError("critical-capacity merge made no progress")
        # Remaining over-cap sections restructure strictly inside their
        # clusters; processing them in time order keeps every busy period
        # short of the next cluster (all merges are already done).
        pending = []
        hheap = self.height_heap
        while hheap and -hheap[0][0] > cap:
            _, _, _, sec, h = heapq.heappop(hheap)
            if not sec.alive or sec.height != h:
                continue
            pending.append(sec)
        pending.sort(key=lambda s: s.start)
        for sec in pending:
            if not sec.alive or sec.height <= cap:
                continue
            self._lower_and_drain(sec, cap, None)

    def inject(self, w, cap, head):
        """The current vertex's ``w`` evacuees depart at rate ``cap`` from
        local time zero, ahead of (and merging into) the incoming flow."""
        if w == 0:
            return
        start = -self.clock     # local time zero in the stored frame
        sec = _Sec(start, cap, w, head)
        sec.is_first = True
        fc = self.first_clu
        clu = _Clu(start, w, sec)
        sec.clus = clu
        clu.next = fc
        if fc is not None:
            fc.prev = clu
        self.first_clu = clu
        self._insert(sec, None, fc.first if fc is not None else None)
        if fc is not None and w / cap >= fc.start - start:
            self._drain(sec, cap, clu)
        self._push_ratio(clu)
        self._push_height(sec)

    # -- conversions ----------------------------------------------------------

    def sections(self):
        out = []
        clu = self.first_clu
        s = clu.first if clu is not None else None
        while s is not None:
            out.append(Section(s.start + self.clock, s.height, s.weight, s.head))
            s = s.next
        return out

    @staticmethod
    def from_sections(sections, threshold=None):
        state = _FlowState(threshold=threshold)
        prev_sec = None
        prev_end = None
        clu = None
        for s in sections:
            if not (s.weight > 0 and s.height > 0):
                raise ValueError("sections must carry positive weight at positive rate")
            if prev_end is not None and s.start < prev_end:
                raise ValueError("sections overlap")
            node = _Sec(Rat(s.start), Rat(s.height), Rat(s.weight), s.head)
            state._insert(node, prev_sec, None)
            if prev_end is None or s.start > prev_end:
                new_clu = _Clu(node.start, node.weight, node)
                node.is_first = True
                node.clus = new_clu
                new_clu.prev = clu
                if clu is not None:
                    clu.next = new_clu
                else:
                    state.first_clu = new_clu
                clu = new_clu
            else:
                clu.weight += node.weight
                node.ufp = clu.root
            prev_sec = node
            prev_end = node.start + node.weight / node.height
        c = state.first_clu
        while c is not None:
            state._push_ratio(c)
            c = c.next
        s = state.first_clu.first if state.first_clu is not None else None
        while s is not None:
            state._push_height(s)
            s = s.next
        return state


# ---------------------------------------------------------------------------
# public operations

def ceil_sequence(seq: SectionSequence, cap) -> SectionSequence:
    """Cap the sequence's rate at ``cap``, conserving weight."""
    if cap is not INFINITE and not cap > 0:
        raise ValueError("ceiling capacity must be positive")
    if cap is INFINITE or not seq.sections:
        return SectionSequence(list(seq.sections), seq.reference_vertex, seq.direction)
    state = _FlowState.from_sections(seq.sections, threshold=cap)
    state.ceil(cap)
    return SectionSequence(state.sections(), seq.reference_vertex, seq.direction)


def inject_source(seq: SectionSequence, w, cap_out) -> SectionSequence:
    """Merge ``w`` local evacuees departing at rate ``cap_out`` from time 0
    into an (already ceiled) incoming sequence."""
    if not cap_out > 0:
        raise ValueError("outgoing capacity must be positive")
    if w < 0:
        raise ValueError("injected weight must be nonnegative")
    state = _FlowState.from_sections(seq.sections)
    state.inject(Rat(w), cap_out, seq.reference_vertex)
    return SectionSequence(state.sections(), seq.reference_vertex, seq.direction)


def _min_capacity(inst: PathInstance):
    if inst.n < 2:
        return None
    return min(inst.capacities[1:inst.n])


def _sweep(inst: PathInstance, visit):
    """Run the rightward sweep, calling visit(i, state) at each vertex with
    the arrival sequence (before local processing) in the state."""
    n = inst.n
    state = _FlowState(threshold=_min_capacity(inst))
    for i in range(n, 0, -1):
        if i < n:
            state.advance(inst.lengths[i] * inst.tau)
        visit(i, state)
        if i > 1:
            cap = inst.capacities[i - 1]
            state.ceil(cap)
            state.inject(inst.weights[i], cap, i)
    return state


def sweep_costs(inst: PathInstance, direction: str = FROM_RIGHT):
    """Total arrival cost at every vertex from one side; 1-indexed list."""
    if direction == FROM_LEFT:
        rev = sweep_costs(inst.reversed(), FROM_RIGHT)
        return [None] + [rev[inst.n + 1 - i] for i in range(1, inst.n + 1)]
    phi = [None] + [RZERO] * inst.n

    def visit(i, state):
        phi[i] = state.cost()

    _sweep(inst, visit)
    return phi


def sweep_sequences(inst: PathInstance, direction: str = FROM_RIGHT):
    """Per-vertex (phi, arrival, departure) snapshots.

    Costs O(n x sequence length); intended for tests and tracing, not for
    large sweeps.  Returns three 1-indexed lists.
    """
    if direction == FROM_LEFT:
        phi_r, alpha_r, beta_r = sweep_sequences(inst.reversed(), FROM_RIGHT)
        n = inst.n

        def flip(seqs, i):
            src = seqs[n + 1 - i]
            return SectionSequence(
                [Section(s.start, s.height, s.weight, n + 1 - s.head) for s in src.sections],
                reference_vertex=i, direction=FROM_LEFT)

        phi = [None] + [phi_r[n + 1 - i] for i in range(1, n + 1)]
        alphas = [None] + [flip(alpha_r, i) for i in range(1, n + 1)]
        betas = [None] + [flip(beta_r, i) for i in range(1, n + 1)]
        return phi, alphas, betas

    phi = [None] + [RZERO] * inst.n
    alphas = [None] + [None] * inst.n
    betas = [None] + [None] * inst.n

    def visit(i, state):
        phi[i] = state.cost()
        alphas[i] = SectionSequence(state.sections(), reference_vertex=i,
                                    direction=FROM_RIGHT)

    state = _FlowState(threshold=_min_capacity(inst))
    n = inst.n
    for i in range(n, 0, -1):
        if i < n:
            state.advance(inst.lengths[i] * inst.tau)
        visit(i, state)
        if i > 1:
            cap = inst.capacities[i - 1]
            state.ceil(cap)
            state.inject(inst.weights[i], cap, i)
        betas[i] = SectionSequence(state.sections(), reference_vertex=i,
                                   direction=FROM_RIGHT)
    return phi, alphas, betas


def trace_vertex(inst: PathInstance, vertex: int, direction: str = FROM_RIGHT):
    """(arrival, departure) sequences at one vertex, without snapshotting
    the whole sweep."""
    if not (1 <= vertex <= inst.n):
        raise IndexError(f"trace_vertex: no vertex {vertex}")
    if direction == FROM_LEFT:
        alpha_r, beta_r = trace_vertex(inst.reversed(), inst.n + 1 - vertex, FROM_RIGHT)

        def flip(seq):
            return SectionSequence(
                [Section(s.start, s.height, s.weight, inst.n + 1 - s.head)
                 for s in seq.sections],
                reference_vertex=vertex, direction=FROM_LEFT)

        return flip(alpha_r), flip(beta_r)
    n = inst.n
    state = _FlowState(threshold=_min_capacity(inst))
    for i in range(n, vertex - 1, -1):
        if i < n:
            state.advance(inst.lengths[i] * inst.tau)
        if i == vertex:
            alpha = SectionSequence(state.sections(), reference_vertex=i,
                                    direction=FROM_RIGHT)
        if i > 1:
            cap = inst.capacities[i - 1]
            state.ceil(cap)
            state.inject(inst.weights[i], cap, i)
    if vertex > 1:
        beta = SectionSequence(state.sections(), reference_vertex=vertex,
                               direction=FROM_RIGHT)
    else:
        beta = SectionSequence([], reference_vertex=vertex, direction=FROM_RIGHT)
    return alpha, beta


def sweep_peak_sections(inst: PathInstance, direction: str = FROM_RIGHT) -> int:
    """Largest number of live sections the sweep ever holds."""
    if direction == FROM_LEFT:
        inst = inst.reversed()
    state = _sweep(inst, lambda i, s: None)
    return state.peak_sections


def extra_costs(inst: PathInstance, direction: str = FROM_RIGHT):
    """Congestion-free travel cost at every vertex: the cost every evacuee
    would pay if edges had unlimited capacity.  1-indexed list."""
    n = inst.n
    out = [None] + [RZERO] * n
    if direction == FROM_RIGHT:
        suffix = RZERO
        for i in range(n - 1, 0, -1):
            suffix += inst.weights[i + 1]
            out[i] = out[i + 1] + inst.lengths[i] * suffix * inst.tau
    elif direction == FROM_LEFT:
        prefix = RZERO
        for i in range(2, n + 1):
            prefix += inst.weights[i - 1]
            out[i] = out[i - 1] + inst.lengths[i - 1] * prefix * inst.tau
    else:
        raise ValueError(f"unknown direction {direction!r}")
    return out
