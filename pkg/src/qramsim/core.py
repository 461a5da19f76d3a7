"""Shared model: tree geometry, addresses, queries, and memory contents.

Bit-order convention used everywhere: an address is written j_0 j_1 ... j_{n-1}
with j_0 consumed at the root level, and the cell index is the big-endian
integer of those bits. Address 010 therefore selects cell 2 (the third cell).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import Iterable, Iterator, Sequence

import numpy as np

INPUT_NORM_TOL = 1e-9
INTERNAL_NORM_TOL = 1e-12


class QramError(Exception):
    """Base class for simulator errors."""


class ValidationError(QramError):
    """Malformed query or memory contents."""


class DimensionError(QramError):
    """Bit-length or register-size mismatch."""


class ProtocolOrderError(QramError):
    """Protocol step applied in the wrong phase."""


class CapacityError(QramError):
    """Problem size exceeds what the dense oracle can represent."""


class NodeState(IntEnum):
    """Three-level routing element: WAIT absorbs, LEFT/RIGHT deflect."""

    WAIT = 0
    LEFT = 1
    RIGHT = 2


class Direction(Enum):
    LEFT = 0
    RIGHT = 1

    @property
    def bit(self) -> int:
        return self.value

    def to_node_state(self) -> NodeState:
        return NodeState.LEFT if self is Direction.LEFT else NodeState.RIGHT


Node = tuple[int, int]  # (level, index within level)


@dataclass(frozen=True)
class TreeGeometry:
    """Binary routing tree with n levels, 2^n leaf cells and 2^n - 1 nodes."""

    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValidationError(f"need at least one address bit, got n={self.n}")

    @property
    def num_cells(self) -> int:
        return 1 << self.n

    @property
    def num_nodes(self) -> int:
        return (1 << self.n) - 1

    def level_width(self, level: int) -> int:
        return 1 << level

    def nodes(self) -> Iterator[Node]:
        """All (level, index) nodes in lexicographic order."""
        for level in range(self.n):
            for index in range(1 << level):
                yield (level, index)

    def check_node(self, node: Node) -> None:
        level, index = node
        if not (0 <= level < self.n and 0 <= index < (1 << level)):
            raise IndexError(f"node {node} outside tree with {self.n} levels")


@dataclass(frozen=True)
class Address:
    """An n-bit address; bits[0] is the root-level (most significant) bit."""

    bits: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.bits:
            raise ValidationError("empty address")
        if any(b not in (0, 1) for b in self.bits):
            raise ValidationError(f"address bits must be 0/1, got {self.bits}")

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "Address":
        return cls(tuple(int(b) for b in bits))

    @classmethod
    def from_string(cls, text: str) -> "Address":
        if not text or any(c not in "01" for c in text):
            raise ValidationError(f"address string must be nonempty 0/1, got {text!r}")
        return cls(tuple(int(c) for c in text))

    @classmethod
    def from_int(cls, value: int, n: int) -> "Address":
        if not 0 <= value < (1 << n):
            raise ValidationError(f"address value {value} out of range for n={n}")
        return cls(tuple((value >> (n - 1 - k)) & 1 for k in range(n)))

    @property
    def n(self) -> int:
        return len(self.bits)

    @property
    def value(self) -> int:
        v = 0
        for b in self.bits:
            v = (v << 1) | b
        return v

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)


def cell_index(address: Address) -> int:
    """Memory cell selected by an address (big-endian bit order)."""
    return address.value


def path_of(address: Address, geometry: TreeGeometry) -> tuple[tuple[Node, Direction], ...]:
    """Root-to-leaf route of an address.

    Entry k is the level-k node reached by following bits j_0..j_{k-1} from
    the root, paired with the direction taken there (LEFT for bit 0). The
    node index at level k equals the integer value of the k-bit prefix.
    """
    if address.n != geometry.n:
        raise DimensionError(
            f"address has {address.n} bits, tree has {geometry.n} levels"
        )
    route = []
    index = 0
    for level, bit in enumerate(address.bits):
        route.append(((level, index), Direction(bit)))
        index = (index << 1) | bit
    return tuple(route)


@dataclass(frozen=True)
class QuerySuperposition:
    """Normalized superposition of distinct addresses with complex amplitudes."""

    branches: tuple[tuple[complex, Address], ...]
    geometry: TreeGeometry

    @property
    def num_branches(self) -> int:
        return len(self.branches)

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([amp for amp, _ in self.branches], dtype=np.complex128)

    @property
    def address_values(self) -> np.ndarray:
        return np.array([addr.value for _, addr in self.branches], dtype=np.int64)

    @property
    def weights(self) -> np.ndarray:
        """Branch probabilities |amplitude|^2."""
        return np.abs(self.amplitudes) ** 2


def make_query(
    pairs: Sequence[tuple[complex, Address | str | Sequence[int]]],
    geometry: TreeGeometry,
    renormalize: bool = False,
) -> QuerySuperposition:
    """Validate (amplitude, address) pairs into a QuerySuperposition.

    Addresses must be pairwise distinct with exactly n bits. Without
    `renormalize` the squared amplitudes must already sum to 1 within
    INPUT_NORM_TOL; with it, amplitudes are divided by the norm.
    """
    if not pairs:
        raise ValidationError("query needs at least one branch")
    branches = []
    for amp, raw in pairs:
        if isinstance(raw, Address):
            addr = raw
        elif isinstance(raw, str):
            addr = Address.from_string(raw)
        else:
            addr = Address.from_bits(raw)
        if addr.n != geometry.n:
            raise DimensionError(
                f"address {addr} has {addr.n} bits, expected {geometry.n}"
            )
        branches.append((complex(amp), addr))
    values = [addr.value for _, addr in branches]
    if len(set(values)) != len(values):
        raise ValidationError("duplicate address in query")
    norm_sq = sum(abs(amp) ** 2 for amp, _ in branches)
    if renormalize:
        if norm_sq <= 0.0:
            raise ValidationError("cannot renormalize a zero-norm query")
        scale = 1.0 / math.sqrt(norm_sq)
        branches = [(amp * scale, addr) for amp, addr in branches]
    elif abs(norm_sq - 1.0) > INPUT_NORM_TOL:
        raise ValidationError(
            f"query norm^2 = {norm_sq!r} is not 1 within {INPUT_NORM_TOL}"
        )
    return QuerySuperposition(tuple(branches), geometry)


def uniform_query(geometry: TreeGeometry) -> QuerySuperposition:
    """Equal-amplitude superposition over all 2^n addresses."""
    n = geometry.n
    amp = 1.0 / math.sqrt(geometry.num_cells)
    pairs = [(amp, Address.from_int(j, n)) for j in range(geometry.num_cells)]
    return make_query(pairs, geometry)


def random_query(
    geometry: TreeGeometry, num_branches: int, rng: np.random.Generator
) -> QuerySuperposition:
    """Random complex-amplitude query over `num_branches` distinct addresses."""
    if not 1 <= num_branches <= geometry.num_cells:
        raise ValidationError(
            f"branch count {num_branches} outside [1, {geometry.num_cells}]"
        )
    values = rng.choice(geometry.num_cells, size=num_branches, replace=False)
    amps = rng.normal(size=num_branches) + 1j * rng.normal(size=num_branches)
    pairs = [
        (amp, Address.from_int(int(v), geometry.n)) for amp, v in zip(amps, values)
    ]
    return make_query(pairs, geometry, renormalize=True)


@dataclass(frozen=True)
class MemoryArray:
    """Classical bit cells D_0 .. D_{N-1}, stored as immutable bytes."""

    cells: bytes

    def __post_init__(self) -> None:
        if any(c not in (0, 1) for c in self.cells):
            raise ValidationError("memory cells must be 0/1")

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "MemoryArray":
        return cls(bytes(int(b) for b in bits))

    @classmethod
    def from_string(cls, text: str) -> "MemoryArray":
        if any(c not in "01" for c in text):
            raise ValidationError(f"memory string must be 0/1, got {text!r}")
        return cls(bytes(int(c) for c in text))

    @classmethod
    def zeros(cls, geometry: TreeGeometry) -> "MemoryArray":
        return cls(bytes(geometry.num_cells))

    @classmethod
    def random(cls, geometry: TreeGeometry, rng: np.random.Generator) -> "MemoryArray":
        return cls(rng.integers(0, 2, size=geometry.num_cells, dtype=np.uint8).tobytes())

    def __len__(self) -> int:
        return len(self.cells)

    def __getitem__(self, j: int) -> int:
        return self.cells[j]

    def __str__(self) -> str:
        return "".join(str(c) for c in self.cells)

    def check_geometry(self, geometry: TreeGeometry) -> None:
        if len(self.cells) != geometry.num_cells:
            raise DimensionError(
                f"memory has {len(self.cells)} cells, tree addresses {geometry.num_cells}"
            )
