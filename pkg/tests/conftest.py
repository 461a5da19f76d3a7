"""Shared fixtures and independent brute-force oracles.

The oracles here recompute everything from first principles (string walks,
nested pair loops, explicit config dictionaries) so the fast implementations
are checked against code that shares none of their shortcuts.
"""

from __future__ import annotations

import numpy as np
import pytest

from qramsim import (
    Address,
    NodeState,
    QuerySuperposition,
    TreeGeometry,
    make_query,
)


def walk_bits(bits: str) -> list[tuple[tuple[int, int], str]]:
    """Path computed by literal string walking: node index is the prefix value."""
    route = []
    prefix = ""
    for level, char in enumerate(bits):
        index = int(prefix, 2) if prefix else 0
        route.append(((level, index), "L" if char == "0" else "R"))
        prefix += char
    return route


def config_of(bits: str) -> dict[tuple[int, int], NodeState]:
    """Full carved tree configuration of one address, WAIT left implicit."""
    config = {}
    for (node, direction) in walk_bits(bits):
        config[node] = NodeState.LEFT if direction == "L" else NodeState.RIGHT
    return config


def brute_bb_fidelity(q: QuerySuperposition, nodes) -> float:
    """Pair sum over branches with explicit per-node state comparison."""
    nodes = list(nodes)
    total = 0.0
    for amp_a, addr_a in q.branches:
        conf_a = config_of(str(addr_a))
        for amp_b, addr_b in q.branches:
            conf_b = config_of(str(addr_b))
            agree = all(
                conf_a.get(node, NodeState.WAIT) == conf_b.get(node, NodeState.WAIT)
                for node in nodes
            )
            if agree:
                total += abs(amp_a) ** 2 * abs(amp_b) ** 2
    return total


def brute_fanout_fidelity(q: QuerySuperposition, switches) -> float:
    """Pair sum over branches comparing the addressed bit of every switch."""
    switches = list(switches)
    total = 0.0
    for amp_a, addr_a in q.branches:
        for amp_b, addr_b in q.branches:
            agree = all(
                addr_a.bits[level] == addr_b.bits[level] for level, _copy in switches
            )
            if agree:
                total += abs(amp_a) ** 2 * abs(amp_b) ** 2
    return total


def brute_config_distance(bits_a: str, bits_b: str) -> int:
    conf_a = config_of(bits_a)
    conf_b = config_of(bits_b)
    nodes = set(conf_a) | set(conf_b)
    return sum(
        1
        for node in nodes
        if conf_a.get(node, NodeState.WAIT) != conf_b.get(node, NodeState.WAIT)
    )


def brute_bb_expected(q: QuerySuperposition, epsilon: float) -> float:
    """O(r^2) pair sum with per-pair distances, no aggregation tricks."""
    total = 0.0
    for amp_a, addr_a in q.branches:
        for amp_b, addr_b in q.branches:
            d = brute_config_distance(str(addr_a), str(addr_b))
            total += abs(amp_a) ** 2 * abs(amp_b) ** 2 * (1 - epsilon) ** d
    return total


def brute_fanout_expected(q: QuerySuperposition, epsilon: float) -> float:
    total = 0.0
    n = q.geometry.n
    for amp_a, addr_a in q.branches:
        for amp_b, addr_b in q.branches:
            copies = sum(
                1 << k for k in range(n) if addr_a.bits[k] != addr_b.bits[k]
            )
            total += abs(amp_a) ** 2 * abs(amp_b) ** 2 * (1 - epsilon) ** copies
    return total


def query_from_values(values, geometry: TreeGeometry, amps=None) -> QuerySuperposition:
    values = list(values)
    if amps is None:
        amps = [1.0 / np.sqrt(len(values))] * len(values)
    return make_query(
        [(a, Address.from_int(v, geometry.n)) for a, v in zip(amps, values)], geometry
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
