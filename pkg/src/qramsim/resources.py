"""Exact per-call resource and entanglement counters for both architectures.

Two different books are kept on purpose: active_node_count tallies trit
writes (n per route), while the interaction counter tallies every qubit
transit, which grows as n^2 per call. "Entangled" is operationalized as
"not identical across all branches"; for branch-labeled basis configurations
a subsystem is in a product state exactly when its value is branch-independent.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

from .bucket import full_query
from .core import Address, MemoryArray, QuerySuperposition, TreeGeometry, make_query, path_of
from .fanout import activated_switch_count


@dataclass(frozen=True)
class ResourceReport:
    """Per-call counters for one query shape."""

    n: int
    num_cells: int
    num_branches: int
    bb_interactions: int
    bb_active_nodes: int
    bb_entangled_nodes: int
    fanout_activations: int
    fanout_entangled_switches: int

    def to_row(self) -> dict:
        return asdict(self)


def bb_interaction_count(geometry: TreeGeometry, count_routing: bool = True) -> int:
    """Instrumented two-body event count of one full bucket-brigade query.

    Runs the simulator on a single-address query; the count is independent
    of branch count and memory contents.
    """
    q = make_query([(1.0, Address.from_int(0, geometry.n))], geometry)
    outcome = full_query(q, MemoryArray.zeros(geometry), count_routing)
    return outcome.interactions


def active_node_count(q: QuerySuperposition) -> int:
    """Nodes touched by any branch's route: n for one branch, at most r*n."""
    nodes = set()
    for _, addr in q.branches:
        nodes.update(node for node, _ in path_of(addr, q.geometry))
    return len(nodes)


def entangled_node_count(q: QuerySuperposition) -> int:
    """Nodes whose carved state varies across branches (0 for a single branch)."""
    r = q.num_branches
    seen: dict[tuple[int, int], tuple[int, set]] = {}
    for _, addr in q.branches:
        for node, direction in path_of(addr, q.geometry):
            count, states = seen.setdefault(node, (0, set()))
            seen[node] = (count + 1, states | {direction})
    entangled = 0
    for count, states in seen.values():
        if count < r or len(states) > 1:
            entangled += 1
    return entangled


def fanout_entangled_switch_count(q: QuerySuperposition) -> int:
    """Switch copies whose value varies across branches: sum of 2^k over levels with differing bits."""
    n = q.geometry.n
    values = [addr.value for _, addr in q.branches]
    total = 0
    for k in range(n):
        bits = {(v >> (n - 1 - k)) & 1 for v in values}
        if len(bits) > 1:
            total += 1 << k
    return total


def build_report(q: QuerySuperposition, count_routing: bool = True) -> ResourceReport:
    g = q.geometry
    return ResourceReport(
        n=g.n,
        num_cells=g.num_cells,
        num_branches=q.num_branches,
        bb_interactions=bb_interaction_count(g, count_routing),
        bb_active_nodes=active_node_count(q),
        bb_entangled_nodes=entangled_node_count(q),
        fanout_activations=activated_switch_count(g),
        fanout_entangled_switches=fanout_entangled_switch_count(q),
    )
