"""Quantum-RAM addressing lab: bucket-brigade and fanout simulators,
dephasing-noise fidelity analysis, and per-call resource accounting."""

from .core import (
    Address,
    CapacityError,
    DimensionError,
    Direction,
    MemoryArray,
    NodeState,
    ProtocolOrderError,
    QramError,
    QuerySuperposition,
    TreeGeometry,
    ValidationError,
    cell_index,
    make_query,
    path_of,
    random_query,
    uniform_query,
)
from .bucket import (
    Branch,
    BusPhase,
    CarvedState,
    EncodeAction,
    QueryOutcome,
    apply_encoding,
    bus_round_trip,
    carve_routes,
    full_query,
    node_config,
    uncompute,
)
from .fanout import (
    FanoutState,
    SwitchAssignment,
    activated_switch_count,
    build_fanout_state,
    fanout_full_query,
)
from .noise import (
    Architecture,
    DephasedSet,
    MonteCarloResult,
    NoiseSpec,
    SamplingMode,
    bb_dephasing_fidelity,
    bb_expected_fidelity,
    config_distance,
    dephasing_fidelity,
    expected_fidelity,
    fanout_dephasing_fidelity,
    fanout_expected_fidelity,
    fanout_switch_distance,
    monte_carlo_fidelity,
    random_query_average_fidelity,
)
from .oracle import (
    StateVector,
    oracle_compare,
    oracle_dephasing_fidelity,
    oracle_full_query,
    tree_all_wait_fidelity,
)
from .resources import (
    ResourceReport,
    active_node_count,
    bb_interaction_count,
    build_report,
    entangled_node_count,
    fanout_entangled_switch_count,
)
from ._kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"
