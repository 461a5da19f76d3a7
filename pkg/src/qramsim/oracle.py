"""Dense brute-force oracle over the explicit Hilbert space, n <= 3.

The full register layout is address qubits (2^n) x tree qutrits (3^(2^n - 1))
x bus qubit (2), with tree digits ordered by (level, index) and digit values
WAIT=0, LEFT=1, RIGHT=2. Every protocol step maps computational basis states
to computational basis states, so steps are realized as index maps built by
walking each basis configuration independently; superposition handling and
disentanglement then emerge rather than being assumed. Nothing here reuses
the sparse simulator's derived-configuration shortcuts.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .bucket import QueryOutcome
from .core import (
    CapacityError,
    DimensionError,
    MemoryArray,
    Node,
    QramError,
    QuerySuperposition,
    TreeGeometry,
)
from .noise import Architecture, DephasedSet

MAX_DENSE_N = 3
MAX_DENSE_FANOUT_N = 2
_SUPPORT_EPS = 1e-300


class OracleError(QramError):
    """A dense protocol step violated unitarity on the populated support."""


@dataclass(frozen=True)
class StateVector:
    """Dense amplitudes over address x tree x bus, with the layout recorded."""

    amplitudes: np.ndarray
    geometry: TreeGeometry

    @property
    def dims(self) -> tuple[int, int, int]:
        return (
            self.geometry.num_cells,
            3**self.geometry.num_nodes,
            2,
        )

    @property
    def dimension(self) -> int:
        a, t, b = self.dims
        return a * t * b


def _check_capacity(n: int) -> None:
    if n > MAX_DENSE_N:
        raise CapacityError(f"dense oracle supports n <= {MAX_DENSE_N}, got {n}")


@lru_cache(maxsize=None)
def _place_values(num_nodes: int) -> np.ndarray:
    """Base-3 place value of each tree node rank (rank 0 = root = most significant)."""
    return np.array([3 ** (num_nodes - 1 - t) for t in range(num_nodes)], dtype=np.int64)


def _digit(codes: np.ndarray, rank: int, places: np.ndarray) -> np.ndarray:
    return (codes // places[rank]) % 3


def _digits_of_rank(n: int, rank: int) -> np.ndarray:
    num_nodes = (1 << n) - 1
    codes = np.arange(3**num_nodes, dtype=np.int64)
    return _digit(codes, rank, _place_values(num_nodes))


def node_rank(node: Node) -> int:
    level, index = node
    return (1 << level) - 1 + index


@lru_cache(maxsize=None)
def _absorb_tables(n: int, fault: Node | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Tree-code transition for a qubit walking in from the root.

    For each tree code and incoming bit, the qubit is deflected by LEFT/RIGHT
    digits until it meets the first WAIT node, where the encoding stores it
    (0 -> LEFT, 1 -> RIGHT; swapped at the `fault` node when given). Codes
    whose walk falls off the leaves map to -1.
    """
    num_nodes = (1 << n) - 1
    places = _place_values(num_nodes)
    codes = np.arange(3**num_nodes, dtype=np.int64)
    new = [np.full(codes.shape, -1, dtype=np.int64) for _ in range(2)]
    pos = np.zeros(codes.shape, dtype=np.int64)
    active = np.ones(codes.shape, dtype=bool)
    for level in range(n):
        rank = (1 << level) - 1 + pos
        digit = (codes // places[rank]) % 3
        absorb = active & (digit == 0)
        for bit in (0, 1):
            stored = np.full(codes.shape, 1 + bit, dtype=np.int64)
            if fault is not None and fault[0] == level:
                stored = np.where(pos == fault[1], 2 - bit, stored)
            new[bit][absorb] = codes[absorb] + stored[absorb] * places[rank[absorb]]
        active &= digit != 0
        pos = (pos << 1) | (digit == 2)
    return new[0], new[1]


@lru_cache(maxsize=None)
def _emit_tables(n: int, level: int) -> tuple[np.ndarray, np.ndarray]:
    """Inverse encoding at one level under classical control.

    Walking the carved directions from the root, the level's node releases
    its direction as a qubit (LEFT -> 0, RIGHT -> 1) and returns to WAIT.
    Returns (emitted bit, new code), with new code -1 where the walk meets
    WAIT too early or the target node holds no direction.
    """
    num_nodes = (1 << n) - 1
    places = _place_values(num_nodes)
    codes = np.arange(3**num_nodes, dtype=np.int64)
    pos = np.zeros(codes.shape, dtype=np.int64)
    ok = np.ones(codes.shape, dtype=bool)
    for upper in range(level):
        rank = (1 << upper) - 1 + pos
        digit = (codes // places[rank]) % 3
        ok &= digit != 0
        pos = (pos << 1) | (digit == 2)
    rank = (1 << level) - 1 + pos
    digit = (codes // places[rank]) % 3
    ok &= digit != 0
    bit = (digit == 2).astype(np.int64)
    new_code = np.where(ok, codes - digit * places[rank], -1)
    return bit, new_code


@lru_cache(maxsize=None)
def _leaf_table(n: int) -> np.ndarray:
    """Leaf index reached by walking the carved directions; -1 if a WAIT blocks."""
    num_nodes = (1 << n) - 1
    places = _place_values(num_nodes)
    codes = np.arange(3**num_nodes, dtype=np.int64)
    pos = np.zeros(codes.shape, dtype=np.int64)
    ok = np.ones(codes.shape, dtype=bool)
    for level in range(n):
        rank = (1 << level) - 1 + pos
        digit = (codes // places[rank]) % 3
        ok &= digit != 0
        pos = (pos << 1) | (digit == 2)
    return np.where(ok, pos, -1)


def _decompose(n: int, index: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    t3 = 3 ** ((1 << n) - 1)
    bus = index & 1
    rest = index >> 1
    return rest // t3, rest % t3, bus


def _compose(n: int, addr: np.ndarray, code: np.ndarray, bus: np.ndarray) -> np.ndarray:
    t3 = 3 ** ((1 << n) - 1)
    return ((addr * t3 + code) << 1) | bus


@lru_cache(maxsize=None)
def _carve_map(n: int, k: int, fault: Node | None = None) -> np.ndarray:
    """Basis map for sending address bit k through the graph."""
    dim = (1 << n) * 3 ** ((1 << n) - 1) * 2
    index = np.arange(dim, dtype=np.int64)
    addr, code, bus = _decompose(n, index)
    bit = (addr >> (n - 1 - k)) & 1
    absorb0, absorb1 = _absorb_tables(n, fault)
    new_code = np.where(bit == 0, absorb0[code], absorb1[code])
    valid = new_code >= 0
    new_addr = np.where(valid, addr & ~(1 << (n - 1 - k)), addr)
    return np.where(valid, _compose(n, new_addr, np.where(valid, new_code, 0), bus), index)


@lru_cache(maxsize=None)
def _uncompute_map(n: int, level: int) -> np.ndarray:
    """Basis map for the inverse encoding sweep over one level."""
    dim = (1 << n) * 3 ** ((1 << n) - 1) * 2
    index = np.arange(dim, dtype=np.int64)
    addr, code, bus = _decompose(n, index)
    bit, new_code = _emit_tables(n, level)
    valid = new_code[code] >= 0
    new_addr = np.where(valid, addr | (bit[code] << (n - 1 - level)), addr)
    return np.where(
        valid, _compose(n, new_addr, np.where(valid, new_code[code], 0), bus), index
    )


def _cnot_map(n: int, memory: MemoryArray) -> np.ndarray:
    """Basis map for the bus round trip: flip the bus by the addressed cell."""
    dim = (1 << n) * 3 ** ((1 << n) - 1) * 2
    index = np.arange(dim, dtype=np.int64)
    _, code, _ = _decompose(n, index)
    leaf = _leaf_table(n)[code]
    cells = np.frombuffer(memory.cells, dtype=np.uint8).astype(np.int64)
    flip = np.where(leaf >= 0, cells[np.clip(leaf, 0, None)], 0)
    return index ^ flip


def _apply_step(vec: np.ndarray, img: np.ndarray, step: str) -> np.ndarray:
    """Move amplitudes along a basis map, checking unitarity on the support."""
    populated = np.nonzero(np.abs(vec) > _SUPPORT_EPS)[0]
    targets = img[populated]
    if len(np.unique(targets)) != len(targets):
        raise OracleError(f"step {step} merged populated basis states")
    new = np.zeros_like(vec)
    new[targets] = vec[populated]
    before = np.linalg.norm(vec)
    after = np.linalg.norm(new)
    if abs(before - after) > 1e-12:
        raise OracleError(f"step {step} drifted norm by {abs(before - after):.3e}")
    return new


def _initial_vector(q: QuerySuperposition) -> np.ndarray:
    n = q.geometry.n
    dim = (1 << n) * 3 ** ((1 << n) - 1) * 2
    vec = np.zeros(dim, dtype=np.complex128)
    t3 = 3 ** ((1 << n) - 1)
    for amp, addr in q.branches:
        vec[(addr.value * t3) << 1] = amp
    return vec


def oracle_full_query(
    q: QuerySuperposition, memory: MemoryArray, fault_node: Node | None = None
) -> StateVector:
    """Step-by-step dense realization of a full memory call.

    Applies the per-bit encodings, the bus CNOT and the level-by-level
    inverse encodings as explicit basis maps. `fault_node` deliberately
    swaps the encoding at one node, for mutation testing of the verifier.
    """
    n = q.geometry.n
    _check_capacity(n)
    memory.check_geometry(q.geometry)
    if fault_node is not None:
        q.geometry.check_node(fault_node)
    vec = _initial_vector(q)
    for k in range(n):
        vec = _apply_step(vec, _carve_map(n, k, fault_node), f"carve bit {k}")
    vec = _apply_step(vec, _cnot_map(n, memory), "bus round trip")
    for level in range(n - 1, -1, -1):
        vec = _apply_step(vec, _uncompute_map(n, level), f"uncompute level {level}")
    return StateVector(vec, q.geometry)


def oracle_carved_tree_vector(
    q: QuerySuperposition, fault_node: Node | None = None
) -> np.ndarray:
    """Tree-register pure state after carving all address bits.

    All address qubits are then in the fiducial state and the bus is not yet
    injected, so the tree factor is read off the addr=0, bus=0 block.
    """
    n = q.geometry.n
    _check_capacity(n)
    vec = _initial_vector(q)
    for k in range(n):
        vec = _apply_step(vec, _carve_map(n, k, fault_node), f"carve bit {k}")
    t3 = 3 ** ((1 << n) - 1)
    tree = vec[0 : 2 * t3 : 2].copy()
    mass = float(np.linalg.norm(tree))
    if abs(mass - 1.0) > 1e-10:
        raise OracleError("carved state leaked outside the fiducial address block")
    return tree


def oracle_compare(outcome: QueryOutcome, sv: StateVector) -> float:
    """Max absolute amplitude deviation between a sparse outcome and the oracle."""
    n = sv.geometry.n
    t3 = 3 ** ((1 << n) - 1)
    expected = np.zeros(sv.dimension, dtype=np.complex128)
    for amp, addr, data in outcome.pairs:
        if addr.n != n:
            raise DimensionError(
                f"outcome address {addr} has {addr.n} bits, oracle ran n={n}"
            )
        expected[((addr.value * t3) << 1) | data] = amp
    if expected.shape != sv.amplitudes.shape:
        raise DimensionError("state dimensions differ")
    return float(np.max(np.abs(expected - sv.amplitudes)))


def tree_all_wait_fidelity(sv: StateVector) -> float:
    """Overlap of the tree register with the all-WAIT state after uncompute."""
    n = sv.geometry.n
    t3 = 3 ** ((1 << n) - 1)
    block = sv.amplitudes.reshape(1 << n, t3, 2)[:, 0, :]
    return float(np.sum(np.abs(block) ** 2))


def _dephase_density_matrix(rho: np.ndarray, digit_values: np.ndarray) -> np.ndarray:
    """Zero all coherences between basis states whose digit differs."""
    return rho * (digit_values[:, None] == digit_values[None, :])


def oracle_dephasing_fidelity(q: QuerySuperposition, d: DephasedSet) -> float:
    """Density-matrix fidelity <psi|rho|psi> after fully dephasing the elements.

    Bucket brigade: the carved tree state, n <= 3. Fanout: the address x
    switch-register state, n <= 2. Must agree with the sparse pair-sum
    formulas to 1e-10.
    """
    n = q.geometry.n
    for element in d.elements:
        q.geometry.check_node(element)
    if d.architecture is Architecture.BUCKET_BRIGADE:
        _check_capacity(n)
        psi = oracle_carved_tree_vector(q)
        rho = np.outer(psi, psi.conj())
        for node in sorted(d.elements):
            rho = _dephase_density_matrix(rho, _digits_of_rank(n, node_rank(node)))
        return float(np.real(np.vdot(psi, rho @ psi)))
    if n > MAX_DENSE_FANOUT_N:
        raise CapacityError(
            f"dense fanout dephasing supports n <= {MAX_DENSE_FANOUT_N}, got {n}"
        )
    num_switches = q.geometry.num_nodes
    dim = (1 << n) * (1 << num_switches)
    psi = np.zeros(dim, dtype=np.complex128)
    for amp, addr in q.branches:
        switch_code = 0
        for level in range(n):
            bit = addr.bits[level]
            for copy in range(1 << level):
                rank = node_rank((level, copy))
                switch_code |= bit << (num_switches - 1 - rank)
        psi[(addr.value << num_switches) | switch_code] = amp
    rho = np.outer(psi, psi.conj())
    indices = np.arange(dim)
    for switch in sorted(d.elements):
        rank = node_rank(switch)
        bits = (indices >> (num_switches - 1 - rank)) & 1
        rho = _dephase_density_matrix(rho, bits)
    return float(np.real(np.vdot(psi, rho @ psi)))
