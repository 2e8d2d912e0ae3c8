"""Single-sink solver: place one sink minimizing total evacuation time.

Runs the two sweeps (costs from the right and from the left at every
vertex) and picks the vertex minimizing their sum, in O(n log n).
An optimal sink always exists at a vertex, so interior edge points are
never considered.
"""

from __future__ import annotations

from dataclasses import dataclass

from .flow import FROM_LEFT, FROM_RIGHT, sweep_costs
from .model import PathInstance


@dataclass(frozen=True)
class OneSinkSolution:
    sink: int
    cost: object


def solve_1sink(inst: PathInstance) -> OneSinkSolution:
    """Vertex minimizing (cost from left) + (cost from right); ties break
    toward the smallest index."""
    phi_r = sweep_costs(inst, FROM_RIGHT)
    phi_l = sweep_costs(inst, FROM_LEFT)
    best_i = 1
    best = phi_l[1] + phi_r[1]
    for i in range(2, inst.n + 1):
        total = phi_l[i] + phi_r[i]
        if total < best:
            best = total
            best_i = i
    return OneSinkSolution(sink=best_i, cost=best)
