"""Fanout architecture: switch copies, query equivalence, activation counts."""

import pytest

from qramsim import (
    MemoryArray,
    TreeGeometry,
    activated_switch_count,
    build_fanout_state,
    fanout_full_query,
    full_query,
    make_query,
    random_query,
    uniform_query,
)


def test_switch_copies_single_address():
    g = TreeGeometry(2)
    state = build_fanout_state(make_query([(1.0, "10")], g))
    assignment = state.switch_assignment(0)
    assert assignment.levels == ((1,), (0, 0))
    assert assignment.num_switches == 3


def test_switch_copies_two_branches_n1():
    g = TreeGeometry(1)
    state = build_fanout_state(uniform_query(g))
    assert state.switch_value(0, 0, 0) == 0
    assert state.switch_value(1, 0, 0) == 1


def test_switch_copies_all_ones():
    g = TreeGeometry(3)
    state = build_fanout_state(make_query([(1.0, "111")], g))
    assignment = state.switch_assignment(0)
    assert assignment.num_switches == 7
    assert all(all(v == 1 for v in level) for level in assignment.levels)
    assert [len(level) for level in assignment.levels] == [1, 2, 4]


def test_switch_value_errors():
    g = TreeGeometry(2)
    state = build_fanout_state(make_query([(1.0, "10")], g))
    with pytest.raises(IndexError):
        state.switch_value(1, 0, 0)
    with pytest.raises(IndexError):
        state.switch_value(0, 2, 0)
    with pytest.raises(IndexError):
        state.switch_value(0, 1, 2)


def test_fanout_matches_bucket_brigade(rng):
    for n in (1, 2, 3, 5, 8):
        g = TreeGeometry(n)
        for _ in range(10):
            q = random_query(g, int(rng.integers(1, min(g.num_cells, 16) + 1)), rng)
            m = MemoryArray.random(g, rng)
            assert fanout_full_query(q, m).pairs == full_query(q, m).pairs


def test_fanout_zero_memory(rng):
    g = TreeGeometry(4)
    q = random_query(g, 7, rng)
    outcome = fanout_full_query(q, MemoryArray.zeros(g))
    assert all(d == 0 for _, _, d in outcome.pairs)


def test_fanout_third_cell():
    g = TreeGeometry(3)
    q = make_query([(1.0, "010")], g)
    m = MemoryArray.from_string("00100000")
    outcome = fanout_full_query(q, m)
    assert [(a, str(addr), d) for a, addr, d in outcome.pairs] == [(1.0, "010", 1)]
    assert outcome.interactions == 7  # all N-1 switches thrown per call


@pytest.mark.parametrize(
    "n,expected", [(1, 1), (3, 7), (10, 1023)]
)
def test_activated_switch_count(n, expected):
    assert activated_switch_count(TreeGeometry(n)) == expected


def test_activated_switch_count_formula():
    for n in range(1, 21):
        assert activated_switch_count(TreeGeometry(n)) == 2**n - 1


def test_activation_vs_interaction_growth():
    # Switch activations outgrow the bucket-brigade event count monotonically.
    from qramsim import bb_interaction_count

    ratios = []
    for n in range(2, 21):
        g = TreeGeometry(n)
        ratios.append(activated_switch_count(g) / bb_interaction_count(g))
    assert all(b > a for a, b in zip(ratios, ratios[1:]))
