"""Path network data model, instance I/O, and prefix/range aggregates.

Vertices are 1-indexed throughout the public API: the path is
v_1 .. v_n with edge i joining v_i and v_{i+1}.  Instances are immutable
after construction and safe to share across threads.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from .rational import (
    INFINITE,
    Rat,
    RZERO,
    format_rational,
    parse_rational,
)


class InstanceError(ValueError):
    """Raised for malformed or invalid instances."""


def _number(value, where: str):
    if isinstance(value, float):
        raise InstanceError(f"{where}: binary floating point is not accepted; "
                            f"use a decimal or p/q string")
    try:
        return parse_rational(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise InstanceError(f"{where}: not a valid number: {value!r} ({exc})") from None


@dataclass(frozen=True)
class PathInstance:
    """A path network: vertex weights, edge lengths/capacities, time factor.

    weights[i], lengths[i], capacities[i] are 1-indexed (index 0 unused).
    """

    n: int
    tau: object
    weights: tuple            # weights[1..n], >= 0
    lengths: tuple            # lengths[1..n-1], > 0
    capacities: tuple         # capacities[1..n-1], > 0

    def __post_init__(self):
        if self.n < 1:
            raise InstanceError("vertex count must be at least 1")
        if len(self.weights) != self.n + 1:
            raise InstanceError("internal: weight array length mismatch")
        if len(self.lengths) != self.n or len(self.capacities) != self.n:
            raise InstanceError(f"edge count must be exactly {self.n - 1}")
        if not self.tau > 0:
            raise InstanceError("tau must be positive")
        for i in range(1, self.n + 1):
            if self.weights[i] < 0:
                raise InstanceError(f"vertex {i}: weight must be nonnegative")
        for i in range(1, self.n):
            if not self.lengths[i] > 0:
                raise InstanceError(f"edge {i}: length must be positive")
            if not self.capacities[i] > 0:
                raise InstanceError(f"edge {i}: capacity must be positive")

    @staticmethod
    def from_parts(tau, weights, lengths, capacities) -> "PathInstance":
        """Build from 0-indexed python sequences (w: n values, d/c: n-1)."""
        n = len(weights)
        if len(lengths) != max(n - 1, 0) or len(capacities) != max(n - 1, 0):
            raise InstanceError(f"edge count must be exactly {n - 1}")
        return PathInstance(
            n=n,
            tau=Rat(tau),
            weights=(None,) + tuple(Rat(w) for w in weights),
            lengths=(None,) + tuple(Rat(d) for d in lengths),
            capacities=(None,) + tuple(Rat(c) for c in capacities),
        )

    def uniform_capacity(self) -> bool:
        caps = self.capacities[1:self.n]
        return all(c == caps[0] for c in caps) if caps else True

    def reversed(self) -> "PathInstance":
        """The mirrored path; vertex i maps to n+1-i."""
        n = self.n
        return PathInstance(
            n=n,
            tau=self.tau,
            weights=(None,) + tuple(self.weights[n - i] for i in range(n)),
            lengths=(None,) + tuple(self.lengths[n - 1 - i] for i in range(n - 1)),
            capacities=(None,) + tuple(self.capacities[n - 1 - i] for i in range(n - 1)),
        )


def parse_instance(text) -> PathInstance:
    """Parse the JSON instance format into a validated PathInstance.

    Numbers must be decimal strings ("1.5"), fraction strings ("3/2"),
    or integers; floats are rejected so exactness survives the I/O
    boundary.  Unknown fields are rejected.
    """
    if isinstance(text, (bytes, bytearray)):
        text = text.decode("utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"malformed JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise InstanceError("instance document must be a JSON object")
    unknown = set(doc) - {"tau", "vertices", "edges"}
    if unknown:
        raise InstanceError(f"unknown instance fields: {sorted(unknown)}")
    if "tau" not in doc:
        raise InstanceError("missing field: tau")
    if "vertices" not in doc or not isinstance(doc["vertices"], list):
        raise InstanceError("missing or invalid field: vertices")
    edges = doc.get("edges", [])
    if not isinstance(edges, list):
        raise InstanceError("invalid field: edges")

    tau = _number(doc["tau"], "tau")
    if not tau > 0:
        raise InstanceError("tau must be positive")

    n = len(doc["vertices"])
    if n == 0:
        raise InstanceError("instance must have at least one vertex")
    weights = []
    for i, v in enumerate(doc["vertices"], start=1):
        if not isinstance(v, dict) or set(v) != {"w"}:
            raise InstanceError(f"vertex {i}: expected an object with exactly the field 'w'")
        w = _number(v["w"], f"vertex {i} weight")
        if w < 0:
            raise InstanceError(f"vertex {i}: weight must be nonnegative")
        weights.append(w)

    if len(edges) != n - 1:
        raise InstanceError(f"edge count must be exactly {n - 1}, got {len(edges)}")
    lengths, capacities = [], []
    for i, e in enumerate(edges, start=1):
        if not isinstance(e, dict) or set(e) != {"d", "c"}:
            raise InstanceError(f"edge {i}: expected an object with exactly the fields 'd' and 'c'")
        d = _number(e["d"], f"edge {i} length")
        c = _number(e["c"], f"edge {i} capacity")
        if not d > 0:
            raise InstanceError(f"edge {i}: length must be positive")
        if not c > 0:
            raise InstanceError(f"edge {i}: capacity must be positive")
        lengths.append(d)
        capacities.append(c)

    return PathInstance.from_parts(tau, weights, lengths, capacities)


def serialize_instance(inst: PathInstance) -> str:
    """Canonical JSON form; parse(serialize(x)) == x."""
    doc = {
        "tau": format_rational(inst.tau),
        "vertices": [{"w": format_rational(inst.weights[i])} for i in range(1, inst.n + 1)],
        "edges": [
            {"d": format_rational(inst.lengths[i]), "c": format_rational(inst.capacities[i])}
            for i in range(1, inst.n)
        ],
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def instance_digest(inst: PathInstance) -> str:
    return hashlib.sha256(serialize_instance(inst).encode("utf-8")).hexdigest()


@dataclass
class PrefixTables:
    """O(n)-space aggregates: suffix/prefix weights, cumulative distances,
    and an O(1) range-minimum index over edge capacities."""

    inst: PathInstance
    suffix_weight: list = field(repr=False)     # W[i] = sum w_j for j >= i
    prefix_weight: list = field(repr=False)     # Wpre[i] = sum w_j for j <= i
    cum_dist: list = field(repr=False)          # D[i] = distance v_1 -> v_i
    _ranks: list = field(repr=False)
    _sparse: list = field(repr=False)
    _values: list = field(repr=False)

    def range_capacity(self, i: int, j: int):
        """Minimum capacity on the subpath v_i..v_j; INFINITE when i == j."""
        n = self.inst.n
        if not (1 <= i <= j <= n):
            raise IndexError(f"range_capacity: invalid range ({i}, {j}) for n={n}")
        if i == j:
            return INFINITE
        lo, hi = i, j - 1          # edge indexes, inclusive
        k = (hi - lo + 1).bit_length() - 1
        row = self._sparse[k]
        r = min(row[lo], row[hi - (1 << k) + 1])
        return self._values[r]

    def distance(self, i: int, j: int):
        return self.cum_dist[j] - self.cum_dist[i]

    def weight_between(self, i: int, j: int):
        """Sum of weights of v_i..v_j (inclusive); 0 when i > j."""
        if i > j:
            return RZERO
        return self.prefix_weight[j] - self.prefix_weight[i - 1]


def build_prefix_tables(inst: PathInstance) -> PrefixTables:
    n = inst.n
    suffix = [RZERO] * (n + 2)
    for i in range(n, 0, -1):
        suffix[i] = suffix[i + 1] + inst.weights[i]
    prefix = [RZERO] * (n + 1)
    for i in range(1, n + 1):
        prefix[i] = prefix[i - 1] + inst.weights[i]
    dist = [RZERO] * (n + 1)
    for i in range(2, n + 1):
        dist[i] = dist[i - 1] + inst.lengths[i - 1]

    # Capacities are mapped to dense integer ranks so the sparse table
    # works on machine ints rather than rationals.
    caps = [inst.capacities[i] for i in range(1, n)]
    values = sorted(set(caps))
    rank_of = {c: r for r, c in enumerate(values)}
    ranks = [0] + [rank_of[c] for c in caps]    # 1-indexed edges
    sparse = [ranks]
    length = 1
    while 2 * length <= max(1, n - 1):
        prev = sparse[-1]
        row = [0] * len(prev)
        for i in range(1, len(prev) - length):
            a, b = prev[i], prev[i + length]
            row[i] = a if a < b else b
        sparse.append(row)
        length *= 2
    return PrefixTables(inst=inst, suffix_weight=suffix, prefix_weight=prefix,
                        cum_dist=dist, _ranks=ranks, _sparse=sparse, _values=values)
