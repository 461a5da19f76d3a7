"""Conventional fanout addressing: each address bit drives a whole tree level.

Address bit k is copied onto the 2^k switches of level k, so a query over
several addresses entangles the register with up to 2^n - 1 switches. Switch
values are derived from the address on demand; only the dense oracle ever
materializes them.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import (
    MemoryArray,
    QuerySuperposition,
    TreeGeometry,
)
from .bucket import QueryOutcome


@dataclass(frozen=True)
class SwitchAssignment:
    """Per-level switch values for one address: levels[k] has 2^k copies of bit k."""

    levels: tuple[tuple[int, ...], ...]

    @classmethod
    def for_address_value(cls, value: int, geometry: TreeGeometry) -> "SwitchAssignment":
        n = geometry.n
        return cls(
            tuple(((value >> (n - 1 - k)) & 1,) * (1 << k) for k in range(n))
        )

    @property
    def num_switches(self) -> int:
        return sum(len(level) for level in self.levels)


@dataclass(frozen=True)
class FanoutState:
    """Superposition of addresses, each correlated with its switch assignment."""

    branches: tuple[tuple[complex, int], ...]  # (amplitude, address value)
    geometry: TreeGeometry

    @property
    def num_branches(self) -> int:
        return len(self.branches)

    def switch_value(self, branch_idx: int, level: int, copy: int) -> int:
        if not 0 <= branch_idx < len(self.branches):
            raise IndexError(f"branch index {branch_idx} out of range")
        self.geometry.check_node((level, copy))
        _, value = self.branches[branch_idx]
        return (value >> (self.geometry.n - 1 - level)) & 1

    def switch_assignment(self, branch_idx: int) -> SwitchAssignment:
        _, value = self.branches[branch_idx]
        return SwitchAssignment.for_address_value(value, self.geometry)


def build_fanout_state(q: QuerySuperposition) -> FanoutState:
    """Correlate every branch of the query with its per-level switch copies."""
    return FanoutState(
        tuple((amp, addr.value) for amp, addr in q.branches), q.geometry
    )


def activated_switch_count(geometry: TreeGeometry) -> int:
    """Switches thrown per memory call: one per node, sum_k 2^k = N - 1."""
    return sum(geometry.level_width(k) for k in range(geometry.n))


def fanout_full_query(q: QuerySuperposition, memory: MemoryArray) -> QueryOutcome:
    """Route a bus through the fanout-configured tree and read the cells.

    Same outcome contract as the bucket-brigade full query: amplitudes
    untouched, data bit equal to the addressed cell. The interaction figure
    reported on the outcome is the per-call switch activation count, N - 1.
    """
    memory.check_geometry(q.geometry)
    state = build_fanout_state(q)
    n = q.geometry.n
    pairs = []
    for b, (_, addr) in enumerate(q.branches):
        index = 0
        for level in range(n):
            direction = state.switch_value(b, level, index)
            index = (index << 1) | direction
        pairs.append((state.branches[b][0], addr, memory[index]))
    return QueryOutcome(tuple(pairs), activated_switch_count(q.geometry))
