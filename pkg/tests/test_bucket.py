"""Bucket-brigade protocol: carving, bus round trip, uncompute, full queries."""

import itertools
import math

import pytest

from qramsim import (
    Address,
    BusPhase,
    DimensionError,
    EncodeAction,
    MemoryArray,
    NodeState,
    ProtocolOrderError,
    TreeGeometry,
    apply_encoding,
    bus_round_trip,
    carve_routes,
    full_query,
    make_query,
    node_config,
    random_query,
    uncompute,
    uniform_query,
)

from conftest import query_from_values


def test_encoding_stores_on_wait():
    assert apply_encoding(0, NodeState.WAIT) == (NodeState.LEFT, EncodeAction.STORED)
    assert apply_encoding(1, NodeState.WAIT) == (NodeState.RIGHT, EncodeAction.STORED)


def test_encoding_routes_on_carved():
    assert apply_encoding(0, NodeState.RIGHT) == (
        NodeState.RIGHT,
        EncodeAction.ROUTED_RIGHT,
    )
    assert apply_encoding(1, NodeState.LEFT) == (
        NodeState.LEFT,
        EncodeAction.ROUTED_LEFT,
    )


def test_encoding_total():
    for bit in (0, 1):
        for state in NodeState:
            new_state, action = apply_encoding(bit, state)
            assert isinstance(new_state, NodeState)
            assert isinstance(action, EncodeAction)


def test_carve_single_branch_010():
    g = TreeGeometry(3)
    q = make_query([(1.0, "010")], g)
    s = carve_routes(q)
    assert s.carved_levels == 3
    assert s.interactions == 6  # 1 + 2 + 3 instrumented steps
    assert node_config(s, 0, (0, 0)) is NodeState.LEFT
    assert node_config(s, 0, (1, 0)) is NodeState.RIGHT
    assert node_config(s, 0, (2, 1)) is NodeState.LEFT
    off_route = [n for n in g.nodes() if n not in {(0, 0), (1, 0), (2, 1)}]
    assert all(node_config(s, 0, n) is NodeState.WAIT for n in off_route)


def test_carve_two_branches():
    g = TreeGeometry(2)
    q = query_from_values([0b00, 0b11], g)
    s = carve_routes(q)
    assert node_config(s, 0, (0, 0)) is NodeState.LEFT
    assert node_config(s, 0, (1, 0)) is NodeState.LEFT
    assert node_config(s, 1, (0, 0)) is NodeState.RIGHT
    assert node_config(s, 1, (1, 1)) is NodeState.RIGHT
    assert node_config(s, 1, (1, 0)) is NodeState.WAIT


def test_carve_one_level():
    g = TreeGeometry(1)
    q = make_query([(1.0, "1")], g)
    s = carve_routes(q)
    assert s.interactions == 1
    assert node_config(s, 0, (0, 0)) is NodeState.RIGHT


def test_carved_nonwait_counts():
    g = TreeGeometry(4)
    q = query_from_values([0b0000, 0b0011, 0b1100], g)
    s = carve_routes(q)
    union = set()
    for b in range(q.num_branches):
        non_wait = [n for n in g.nodes() if node_config(s, b, n) is not NodeState.WAIT]
        assert len(non_wait) == g.n
        union.update(non_wait)
    assert len(union) <= q.num_branches * g.n


def test_node_config_examples_and_errors():
    g = TreeGeometry(3)
    s = carve_routes(make_query([(1.0, "111")], g))
    assert node_config(s, 0, (2, 3)) is NodeState.RIGHT
    with pytest.raises(IndexError):
        node_config(s, 1, (0, 0))
    with pytest.raises(IndexError):
        node_config(s, 0, (3, 0))


def test_bus_reads_third_cell():
    g = TreeGeometry(3)
    q = make_query([(1.0, "010")], g)
    s = bus_round_trip(carve_routes(q), MemoryArray.from_string("00100000"))
    assert s.branches[0].bus_bit == 1
    assert s.branches[0].data_bit == 1
    assert s.bus_phase is BusPhase.RETURNED
    assert s.interactions == 6 + 7  # carving + 2n deflections + memory CNOT


def test_bus_zero_memory():
    g = TreeGeometry(3)
    q = query_from_values([1, 6], g)
    s = bus_round_trip(carve_routes(q), MemoryArray.zeros(g))
    assert all(b.bus_bit == 0 for b in s.branches)


def test_bus_outer_cells():
    g = TreeGeometry(3)
    q = query_from_values([0b000, 0b111], g)
    s = bus_round_trip(carve_routes(q), MemoryArray.from_string("10000001"))
    assert [b.bus_bit for b in s.branches] == [1, 1]


def test_bus_protocol_order_and_dimensions():
    g = TreeGeometry(2)
    q = make_query([(1.0, "01")], g)
    carved = carve_routes(q)
    with pytest.raises(DimensionError):
        bus_round_trip(carved, MemoryArray.from_string("01"))
    once = bus_round_trip(carved, MemoryArray.zeros(g))
    with pytest.raises(ProtocolOrderError):
        bus_round_trip(once, MemoryArray.zeros(g))
    with pytest.raises(ProtocolOrderError):
        uncompute(carved)


def test_uncompute_recovers_addresses():
    g = TreeGeometry(3)
    q = make_query([(1.0, "010")], g)
    outcome = uncompute(bus_round_trip(carve_routes(q), MemoryArray.from_string("00100000")))
    assert outcome.pairs == ((1.0, Address.from_string("010"), 1),)
    assert outcome.pairs[0][0] == 1.0  # amplitude carried through exactly


def test_uncompute_two_branches_verbatim():
    g = TreeGeometry(2)
    amps = [0.6, complex(0, 0.8)]
    q = make_query([(amps[0], "00"), (amps[1], "11")], g)
    outcome = uncompute(bus_round_trip(carve_routes(q), MemoryArray.from_string("1001")))
    assert [a for a, _, _ in outcome.pairs] == amps
    assert [str(addr) for _, addr, _ in outcome.pairs] == ["00", "11"]


def test_full_query_example():
    g = TreeGeometry(2)
    amp = 1 / math.sqrt(2)
    q = make_query([(amp, "00"), (amp, "11")], g)
    outcome = full_query(q, MemoryArray.from_string("1001"))
    assert [(a, str(addr), d) for a, addr, d in outcome.pairs] == [
        (amp, "00", 1),
        (amp, "11", 1),
    ]


def test_full_query_zero_memory_preserves_amplitudes(rng):
    g = TreeGeometry(4)
    q = random_query(g, 5, rng)
    outcome = full_query(q, MemoryArray.zeros(g))
    assert all(d == 0 for _, _, d in outcome.pairs)
    assert [a for a, _, _ in outcome.pairs] == [a for a, _ in q.branches]


@pytest.mark.parametrize("n", range(1, 9))
def test_interaction_count_closed_form(n):
    g = TreeGeometry(n)
    q = make_query([(1.0, Address.from_int(0, n))], g)
    outcome = full_query(q, MemoryArray.zeros(g))
    assert outcome.interactions == n * (n + 1) + 2 * n + 1
    encode_only = full_query(q, MemoryArray.zeros(g), count_routing=False)
    assert encode_only.interactions == 2 * n + 1


def test_interaction_count_n3_is_19(rng):
    g = TreeGeometry(3)
    for r in (1, 3, 8):
        q = random_query(g, r, rng)
        outcome = full_query(q, MemoryArray.random(g, rng))
        assert outcome.interactions == 19


def test_contract_random_queries(rng):
    # Amplitudes bit-exact, data bit = directly indexed cell.
    for n in range(1, 17):
        g = TreeGeometry(n)
        for _ in range(6):
            r = int(rng.integers(1, min(g.num_cells, 64) + 1))
            q = random_query(g, r, rng)
            m = MemoryArray.random(g, rng)
            outcome = full_query(q, m)
            for (amp, addr, data), (amp_in, addr_in) in zip(outcome.pairs, q.branches):
                assert amp == amp_in
                assert addr == addr_in
                assert data == m[int(str(addr), 2)]


def test_contract_exhaustive_memories_n_le_3(rng):
    for n in (1, 2, 3):
        g = TreeGeometry(n)
        queries = [uniform_query(g)] + [random_query(g, g.num_cells // 2 + 1, rng) for _ in range(2)]
        for cells in itertools.product((0, 1), repeat=g.num_cells):
            m = MemoryArray.from_bits(cells)
            for q in queries:
                outcome = full_query(q, m)
                for amp, addr, data in outcome.pairs:
                    assert data == cells[int(str(addr), 2)]
                    assert amp in {a for a, _ in q.branches}
