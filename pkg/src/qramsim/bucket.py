"""Branch-sparse simulation of the bucket-brigade addressing protocol.

The global state is a superposition of at most r classical configurations,
one per queried address. Each configuration is fully determined by its
address and by how many address bits have been absorbed so far, so node
states are derived on demand instead of materialized: the first
`carved_levels` nodes along the address route hold LEFT/RIGHT, everything
else sits in WAIT.

Interaction counting: every qubit-qutrit encounter (an encode/decode or a
routing deflection) is one two-body event, and the bus-memory CNOT is one.
Events are counted once per protocol time step, not once per branch, since
superposed branches advance through the same physical steps in lockstep.
With routing deflections excluded (count_routing=False) a full query costs
2n + 1 events instead of n(n+1) + 2n + 1.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

from .core import (
    Address,
    Direction,
    MemoryArray,
    Node,
    NodeState,
    ProtocolOrderError,
    QuerySuperposition,
    TreeGeometry,
    cell_index,
)


class BusPhase(Enum):
    NOT_INJECTED = "not-injected"
    AT_LEAF = "at-leaf"
    RETURNED = "returned"


class EncodeAction(Enum):
    STORED = "stored"
    ROUTED_LEFT = "routed-left"
    ROUTED_RIGHT = "routed-right"


def apply_encoding(incoming_bit: int, node: NodeState) -> tuple[NodeState, EncodeAction]:
    """One qubit-qutrit encounter at a node.

    A WAIT node absorbs the incoming bit (0 -> LEFT, 1 -> RIGHT); a node
    already holding a direction only deflects the traffic. Total function.
    """
    if node is NodeState.WAIT:
        return (
            (NodeState.LEFT, EncodeAction.STORED)
            if incoming_bit == 0
            else (NodeState.RIGHT, EncodeAction.STORED)
        )
    if node is NodeState.LEFT:
        return (NodeState.LEFT, EncodeAction.ROUTED_LEFT)
    return (NodeState.RIGHT, EncodeAction.ROUTED_RIGHT)


@dataclass(frozen=True)
class Branch:
    """One term of the superposition: amplitude, address, bus/data bits."""

    amplitude: complex
    address: Address
    bus_bit: int | None = None
    data_bit: int | None = None


@dataclass(frozen=True)
class CarvedState:
    """Mid-protocol state of all branches, advanced in lockstep."""

    branches: tuple[Branch, ...]
    geometry: TreeGeometry
    carved_levels: int
    bus_phase: BusPhase
    interactions: int

    @property
    def num_branches(self) -> int:
        return len(self.branches)


def node_state_for_address(
    address: Address, node: Node, carved_levels: int | None = None
) -> NodeState:
    """Derived state of one node in the configuration carved by `address`."""
    level, index = node
    limit = address.n if carved_levels is None else carved_levels
    if level >= limit:
        return NodeState.WAIT
    prefix = address.value >> (address.n - level)
    if prefix != index:
        return NodeState.WAIT
    return Direction(address.bits[level]).to_node_state()


def node_config(state: CarvedState, branch_idx: int, node: Node) -> NodeState:
    """Node state within one branch of a carved state."""
    if not 0 <= branch_idx < len(state.branches):
        raise IndexError(f"branch index {branch_idx} out of range")
    state.geometry.check_node(node)
    return node_state_for_address(
        state.branches[branch_idx].address, node, state.carved_levels
    )


def carve_routes(q: QuerySuperposition, count_routing: bool = True) -> CarvedState:
    """Send the address bits through the tree, carving one route per branch.

    Bit k is deflected by the k already-carved levels and then stored at a
    WAIT node on level k, so carving costs sum_k (k + 1) = n(n+1)/2 events.
    """
    n = q.geometry.n
    count = 0
    for k in range(n):
        # Walk every branch's bit k down the tree and check it lands where
        # the derived representation says it must.
        for amp, addr in q.branches:
            index = 0
            for level in range(k + 1):
                node = (level, index)
                state = node_state_for_address(addr, node, carved_levels=k)
                new_state, action = apply_encoding(addr.bits[k], state)
                if level < k:
                    assert action in (EncodeAction.ROUTED_LEFT, EncodeAction.ROUTED_RIGHT)
                    index = (index << 1) | (action is EncodeAction.ROUTED_RIGHT)
                else:
                    assert action is EncodeAction.STORED
                    assert new_state is Direction(addr.bits[k]).to_node_state()
        for _level in range(k):
            if count_routing:
                count += 1
        count += 1  # stored at the level-k WAIT node
    branches = tuple(Branch(amp, addr) for amp, addr in q.branches)
    return CarvedState(branches, q.geometry, n, BusPhase.NOT_INJECTED, count)


def bus_round_trip(
    state: CarvedState, memory: MemoryArray, count_routing: bool = True
) -> CarvedState:
    """Inject the bus at the root, read the addressed cell, return to the root.

    The bus starts as bit 0, follows the carved directions to the leaf,
    picks up the cell content through a CNOT, and is deflected back up:
    2n deflections plus one memory interaction.
    """
    n = state.geometry.n
    if state.carved_levels != n or state.bus_phase is not BusPhase.NOT_INJECTED:
        raise ProtocolOrderError("bus requires a fully carved, not-yet-queried state")
    memory.check_geometry(state.geometry)
    count = state.interactions
    routed = []
    for branch in state.branches:
        index = 0
        for level in range(n):
            direction = node_state_for_address(branch.address, (level, index))
            assert direction is not NodeState.WAIT
            index = (index << 1) | (direction is NodeState.RIGHT)
        bus = 0 ^ memory[index]
        routed.append(replace(branch, bus_bit=bus, data_bit=bus))
    if count_routing:
        count += n  # deflections on the way down
    count += 1  # bus-memory CNOT
    if count_routing:
        count += n  # deflections on the way back up
    return CarvedState(
        tuple(routed), state.geometry, n, BusPhase.RETURNED, count
    )


@dataclass(frozen=True)
class QueryOutcome:
    """Final address-correlated readout plus the event count that produced it."""

    pairs: tuple[tuple[complex, Address, int], ...]
    interactions: int


def uncompute(state: CarvedState, count_routing: bool = True) -> QueryOutcome:
    """Run the inverse encoding level by level, re-emitting the address bits.

    A classical control sweeps the levels from the leaves up to the root;
    the bit emitted at level k is deflected by the k levels still carved
    above it, mirroring the carving cost. Afterwards every node is WAIT
    and each branch's address is recovered verbatim.
    """
    n = state.geometry.n
    if state.bus_phase is not BusPhase.RETURNED:
        raise ProtocolOrderError("uncompute requires a returned bus")
    count = state.interactions
    recovered: list[list[int]] = [[0] * n for _ in state.branches]
    for level in range(n - 1, -1, -1):
        for b, branch in enumerate(state.branches):
            index = branch.address.value >> (n - level)
            direction = node_state_for_address(branch.address, (level, index))
            assert direction is not NodeState.WAIT
            recovered[b][level] = int(direction is NodeState.RIGHT)
        count += 1  # inverse encoding at the one non-WAIT node of this level
        for _above in range(level):
            if count_routing:
                count += 1
    pairs = []
    for bits, branch in zip(recovered, state.branches):
        address = Address.from_bits(bits)
        assert address == branch.address
        assert branch.data_bit is not None
        pairs.append((branch.amplitude, address, branch.data_bit))
    return QueryOutcome(tuple(pairs), count)


def full_query(
    q: QuerySuperposition, memory: MemoryArray, count_routing: bool = True
) -> QueryOutcome:
    """carve -> bus round trip -> uncompute.

    Amplitudes pass through untouched and each pair's data bit equals the
    memory cell its address selects; the total event count is
    n(n+1) + 2n + 1 regardless of branch count and memory contents.
    """
    carved = carve_routes(q, count_routing)
    read = bus_round_trip(carved, memory, count_routing)
    return uncompute(read, count_routing)


def expected_data_bits(q: QuerySuperposition, memory: MemoryArray) -> list[int]:
    """Direct memory indexing, bypassing the protocol. Test/CLI convenience."""
    memory.check_geometry(q.geometry)
    return [memory[cell_index(addr)] for _, addr in q.branches]
