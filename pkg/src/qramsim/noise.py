"""Dephasing-noise channels and fidelity computations for both architectures.

Noise model: selected elements (tree nodes for the bucket brigade, switch
copies for the fanout design) suffer full dephasing in their computational
basis. Coherence between two branches survives exactly when their
mid-protocol configurations agree on every dephased element, so the fidelity
of the dephased state against the ideal one is

    F = sum over agreement groups of (sum of branch weights)^2,

with branch weight |amplitude|^2. The bucket-brigade state is evaluated when
fully carved (before bus injection); the fanout state is the switch register.

Expected fidelities under random dephased sets reduce to pair sums weighted
by phi(d), the probability that no dephased element falls among the d
elements distinguishing a branch pair. phi depends on the sampling mode:
(1-eps)^d for independent inclusion, hypergeometric survival for a fixed
count, and 1 - d/M when exactly one element is drawn.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, NamedTuple

import numpy as np

from . import _kernels, rng
from .bucket import node_state_for_address
from .core import (
    CapacityError,
    NodeState,
    QuerySuperposition,
    TreeGeometry,
    ValidationError,
    path_of,
    random_query,
)


class Architecture(Enum):
    FANOUT = "fanout"
    BUCKET_BRIGADE = "bucket-brigade"


class SamplingMode(Enum):
    """How random dephased sets are drawn in Monte Carlo and expectations."""

    INDEPENDENT = "independent"  # each element dephased with probability eps
    FIXED_COUNT = "fixed-count"  # exactly floor(eps * M) elements
    SINGLE_ELEMENT = "single-element"  # exactly one uniformly random element


@dataclass(frozen=True)
class DephasedSet:
    """Elements suffering full dephasing: (level, index) nodes or (level, copy) switches."""

    architecture: Architecture
    elements: frozenset[tuple[int, int]]

    @classmethod
    def of_nodes(cls, nodes) -> "DephasedSet":
        return cls(Architecture.BUCKET_BRIGADE, frozenset(nodes))

    @classmethod
    def of_switches(cls, switches) -> "DephasedSet":
        return cls(Architecture.FANOUT, frozenset(switches))


@dataclass(frozen=True)
class NoiseSpec:
    """Per-element dephasing rate plus a reproducible sampling plan."""

    epsilon: float
    seed: int
    trials: int
    mode: SamplingMode = SamplingMode.INDEPENDENT

    def __post_init__(self) -> None:
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValidationError(f"epsilon {self.epsilon} outside [0, 1]")
        if self.trials < 1:
            raise ValidationError(f"need at least one trial, got {self.trials}")


class MonteCarloResult(NamedTuple):
    mean: float
    stderr: float


def _require_architecture(d: DephasedSet, expected: Architecture) -> None:
    if d.architecture is not expected:
        raise ValidationError(
            f"dephased set targets {d.architecture.value}, expected {expected.value}"
        )


def _check_elements(d: DephasedSet, q: QuerySuperposition) -> None:
    for element in d.elements:
        q.geometry.check_node(element)


def bb_dephasing_fidelity(q: QuerySuperposition, d: DephasedSet) -> float:
    """Fidelity of the fully carved state after dephasing the given nodes.

    Branches agree on a node when it holds the same WAIT/LEFT/RIGHT state in
    both carved configurations; dephasing a node that is WAIT in every branch
    never costs fidelity.
    """
    _require_architecture(d, Architecture.BUCKET_BRIGADE)
    _check_elements(d, q)
    elements = sorted(d.elements)
    groups: dict[tuple[NodeState, ...], float] = {}
    for amp, addr in q.branches:
        signature = tuple(node_state_for_address(addr, el) for el in elements)
        groups[signature] = groups.get(signature, 0.0) + abs(amp) ** 2
    return float(sum(w * w for w in groups.values()))


def fanout_dephasing_fidelity(q: QuerySuperposition, d: DephasedSet) -> float:
    """Fidelity of the fanout switch register after dephasing the given switches.

    Every copy at level k carries address bit k, so branches agree on a
    dephased switch iff their addresses agree at its level; only the set of
    touched levels matters, not which copy was hit.
    """
    _require_architecture(d, Architecture.FANOUT)
    _check_elements(d, q)
    n = q.geometry.n
    mask = 0
    for level, _copy in d.elements:
        mask |= 1 << (n - 1 - level)
    groups: dict[int, float] = {}
    for amp, addr in q.branches:
        key = addr.value & mask
        groups[key] = groups.get(key, 0.0) + abs(amp) ** 2
    return float(sum(w * w for w in groups.values()))


def dephasing_fidelity(q: QuerySuperposition, d: DephasedSet) -> float:
    """Architecture-dispatched exact fidelity for one dephased set."""
    if d.architecture is Architecture.BUCKET_BRIGADE:
        return bb_dephasing_fidelity(q, d)
    return fanout_dephasing_fidelity(q, d)


def config_distance(q: QuerySuperposition, branch_a: int, branch_b: int) -> int:
    """Number of tree nodes whose carved state differs between two branches.

    Zero iff the branches share an address, and at most 2n - 1: the first
    divergence node plus a direction-vs-WAIT pair per deeper level.
    """
    r = q.num_branches
    if not (0 <= branch_a < r and 0 <= branch_b < r):
        raise IndexError(f"branch indices ({branch_a}, {branch_b}) out of range")
    config_a = {node: dirn.to_node_state() for node, dirn in path_of(q.branches[branch_a][1], q.geometry)}
    config_b = {node: dirn.to_node_state() for node, dirn in path_of(q.branches[branch_b][1], q.geometry)}
    distance = 0
    for node in config_a.keys() | config_b.keys():
        if config_a.get(node, NodeState.WAIT) != config_b.get(node, NodeState.WAIT):
            distance += 1
    return distance


def fanout_switch_distance(q: QuerySuperposition, branch_a: int, branch_b: int) -> int:
    """Number of switch copies whose value differs between two branches: sum of 2^k over differing bit levels."""
    r = q.num_branches
    if not (0 <= branch_a < r and 0 <= branch_b < r):
        raise IndexError(f"branch indices ({branch_a}, {branch_b}) out of range")
    n = q.geometry.n
    xor = q.branches[branch_a][1].value ^ q.branches[branch_b][1].value
    return sum(1 << k for k in range(n) if (xor >> (n - 1 - k)) & 1)


def _survival(mode: SamplingMode, epsilon: float, num_elements: int) -> Callable[[np.ndarray], np.ndarray]:
    """phi(d): probability that a random dephased set misses d given elements."""
    if mode is SamplingMode.INDEPENDENT:
        return lambda d: (1.0 - epsilon) ** d
    if mode is SamplingMode.SINGLE_ELEMENT:
        return lambda d: 1.0 - d / num_elements

    count = math.floor(epsilon * num_elements)

    def hypergeometric_miss(d: np.ndarray) -> np.ndarray:
        d = np.asarray(d, dtype=np.float64)
        out = np.ones_like(d)
        for i in range(count):
            out *= np.clip(num_elements - d - i, 0.0, None) / (num_elements - i)
        return out

    return hypergeometric_miss


def _bb_distance_masses(q: QuerySuperposition) -> dict[int, float]:
    """Ordered-pair weight mass per config distance.

    Distinct addresses with first differing bit k sit at distance
    2(n - k) - 1, so masses are aggregated per first-difference level by
    grouping branch weights on (k+1)-bit address prefixes.
    """
    n = q.geometry.n
    values = q.address_values
    w = q.weights
    masses = {0: float(np.sum(w * w))}
    for k in range(n):
        keys = values >> (n - 1 - k)  # k-bit prefix followed by bit k
        unique_keys, inverse = np.unique(keys, return_inverse=True)
        sums = np.bincount(inverse, weights=w)
        by_key = dict(zip(unique_keys.tolist(), sums.tolist()))
        mass = 0.0
        for key, wsum in by_key.items():
            if key & 1 == 0 and (key | 1) in by_key:
                mass += 2.0 * wsum * by_key[key | 1]
        if mass:
            masses[2 * (n - k) - 1] = masses.get(2 * (n - k) - 1, 0.0) + mass
    return masses


def _bb_expected(q: QuerySuperposition, phi: Callable[[np.ndarray], np.ndarray]) -> float:
    masses = _bb_distance_masses(q)
    distances = np.array(sorted(masses), dtype=np.float64)
    mass = np.array([masses[int(d)] for d in distances])
    return float(np.sum(mass * phi(distances)))


_FANOUT_TABLE_LIMIT = 26  # phi is tabulated over all 2^n possible distances


def _fanout_expected(q: QuerySuperposition, phi: Callable[[np.ndarray], np.ndarray]) -> float:
    n = q.geometry.n
    if n > _FANOUT_TABLE_LIMIT:
        raise CapacityError(f"fanout expected fidelity supports n <= {_FANOUT_TABLE_LIMIT}")
    values = q.address_values
    w = q.weights
    table = phi(np.arange(1 << n, dtype=np.float64))
    total = 0.0
    chunk = max(1, (1 << 22) // max(1, len(values)))
    for start in range(0, len(values), chunk):
        xor = values[start : start + chunk, None] ^ values[None, :]
        exponent = np.zeros_like(xor)
        for k in range(n):
            exponent += ((xor >> (n - 1 - k)) & 1) << k
        total += float(
            np.sum(w[start : start + chunk, None] * w[None, :] * table[exponent])
        )
    return total


def bb_expected_fidelity(q: QuerySuperposition, epsilon: float) -> float:
    """Exact expected carved-state fidelity under independent rate-eps node dephasing."""
    if not 0.0 <= epsilon <= 1.0:
        raise ValidationError(f"epsilon {epsilon} outside [0, 1]")
    return _bb_expected(q, _survival(SamplingMode.INDEPENDENT, epsilon, q.geometry.num_nodes))


def fanout_expected_fidelity(q: QuerySuperposition, epsilon: float) -> float:
    """Exact expected switch-register fidelity under independent rate-eps switch dephasing."""
    if not 0.0 <= epsilon <= 1.0:
        raise ValidationError(f"epsilon {epsilon} outside [0, 1]")
    return _fanout_expected(q, _survival(SamplingMode.INDEPENDENT, epsilon, q.geometry.num_nodes))


def expected_fidelity(arch: Architecture, q: QuerySuperposition, spec: NoiseSpec) -> float:
    """Exact mean of the per-trial fidelity under the spec's sampling mode."""
    phi = _survival(spec.mode, spec.epsilon, q.geometry.num_nodes)
    if arch is Architecture.BUCKET_BRIGADE:
        return _bb_expected(q, phi)
    return _fanout_expected(q, phi)


def _element_tables(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Level and index of every tree element in (level, index) lex rank order."""
    num = (1 << n) - 1
    ranks = np.arange(num)
    levels = np.floor(np.log2(ranks + 1)).astype(np.int64)
    indices = ranks + 1 - (1 << levels)
    return levels, indices


def sample_dephased_elements(
    spec: NoiseSpec, num_elements: int, trial: int
) -> np.ndarray:
    """Element ranks dephased in one trial, from the trial's own substream."""
    g = rng.trial_stream(spec.seed, trial)
    if spec.mode is SamplingMode.INDEPENDENT:
        return np.nonzero(g.random(num_elements) < spec.epsilon)[0]
    if spec.mode is SamplingMode.FIXED_COUNT:
        count = math.floor(spec.epsilon * num_elements)
        return np.sort(g.choice(num_elements, size=count, replace=False))
    return np.array([g.integers(num_elements)], dtype=np.int64)


def monte_carlo_fidelity(
    arch: Architecture, q: QuerySuperposition, spec: NoiseSpec
) -> MonteCarloResult:
    """Sample dephased sets and average their exact fidelities.

    Each trial draws its elements from substream (seed, trial index), so the
    result is reproducible and independent of evaluation order. Returns the
    sample mean and the standard error of the mean.
    """
    n = q.geometry.n
    num_elements = q.geometry.num_nodes
    levels, indices = _element_tables(n)
    selections = [
        sample_dephased_elements(spec, num_elements, t) for t in range(spec.trials)
    ]
    addresses = q.address_values
    weights = q.weights
    if arch is Architecture.BUCKET_BRIGADE:
        offsets = np.zeros(spec.trials + 1, dtype=np.int64)
        offsets[1:] = np.cumsum([len(s) for s in selections])
        flat = np.concatenate(selections).astype(np.int64)
        values = _kernels.bb_set_fidelities(
            addresses, weights, n, levels[flat], indices[flat], offsets
        )
    else:
        masks = np.zeros(spec.trials, dtype=np.int64)
        for t, sel in enumerate(selections):
            mask = 0
            for level in np.unique(levels[sel]):
                mask |= 1 << (n - 1 - int(level))
            masks[t] = mask
        values = _kernels.fanout_set_fidelities(addresses, weights, n, masks)
    mean = float(np.mean(values))
    stderr = (
        float(np.std(values, ddof=1) / math.sqrt(spec.trials))
        if spec.trials > 1
        else 0.0
    )
    return MonteCarloResult(mean, stderr)


def random_query_average_fidelity(
    geometry: TreeGeometry,
    d: DephasedSet,
    num_queries: int,
    seed: int,
    num_branches: int | None = None,
) -> MonteCarloResult:
    """Average the fixed-set fidelity over random-amplitude queries.

    Complements the uniform-query constants: input states are drawn from the
    rotation-invariant measure (normalized complex Gaussian amplitudes) over
    `num_branches` random addresses, all N by default. The constants differ;
    e.g. one dephased fanout switch averages to (N+2)/(2N+2), not 1/2.
    """
    if num_queries < 1:
        raise ValidationError(f"need at least one query, got {num_queries}")
    r = geometry.num_cells if num_branches is None else num_branches
    values = np.empty(num_queries)
    for i in range(num_queries):
        stream = rng.substream(seed, rng.STREAM_QUERY, i)
        q = random_query(geometry, r, stream)
        values[i] = dephasing_fidelity(q, d)
    mean = float(np.mean(values))
    stderr = (
        float(np.std(values, ddof=1) / math.sqrt(num_queries))
        if num_queries > 1
        else 0.0
    )
    return MonteCarloResult(mean, stderr)
