"""Pure-numpy fidelity kernels; the reference the compiled backend must match.

Both kernels evaluate, per dephased-element set, the survival weight
F = sum over groups of (sum of branch weights)^2, where two branches share a
group iff their mid-protocol configuration agrees on every dephased element.
"""

from __future__ import annotations

import numpy as np


def bb_set_fidelities(
    addresses: np.ndarray,
    weights: np.ndarray,
    n: int,
    levels: np.ndarray,
    indices: np.ndarray,
    offsets: np.ndarray,
) -> np.ndarray:
    """Fidelity of the carved bucket-brigade state per dephased node set.

    Trial t dephases the nodes (levels[e], indices[e]) for e in
    [offsets[t], offsets[t+1]). A branch's state at node (k, i) is WAIT
    unless its k-bit address prefix equals i, in which case it holds the
    direction taken by bit k.
    """
    addresses = np.asarray(addresses, dtype=np.int64)
    weights = np.asarray(weights, dtype=np.float64)
    levels = np.asarray(levels, dtype=np.int64)
    indices = np.asarray(indices, dtype=np.int64)
    offsets = np.asarray(offsets, dtype=np.int64)
    trials = len(offsets) - 1
    full = float(weights.sum()) ** 2
    out = np.empty(trials, dtype=np.float64)
    for t in range(trials):
        lev = levels[offsets[t] : offsets[t + 1]]
        idx = indices[offsets[t] : offsets[t + 1]]
        if lev.size == 0:
            out[t] = full
            continue
        prefixes = addresses[:, None] >> (n - lev)[None, :]
        dir_bits = (addresses[:, None] >> (n - 1 - lev)[None, :]) & 1
        states = np.where(prefixes == idx[None, :], 1 + dir_bits, 0).astype(np.int8)
        # Group identical rows; a void view makes np.unique sort whole rows.
        rows = np.ascontiguousarray(states).view(
            np.dtype((np.void, states.shape[1]))
        ).ravel()
        _, inverse = np.unique(rows, return_inverse=True)
        group_weights = np.bincount(inverse.ravel(), weights=weights)
        out[t] = float(np.sum(group_weights**2))
    return out


def fanout_set_fidelities(
    addresses: np.ndarray,
    weights: np.ndarray,
    n: int,
    masks: np.ndarray,
) -> np.ndarray:
    """Fidelity of the fanout switch register per dephased switch set.

    Every copy at one level carries the same address bit, so only the set
    of levels containing a dephased switch matters; masks[t] has bit
    (n-1-k) set iff some level-k switch is dephased in trial t.
    """
    addresses = np.asarray(addresses, dtype=np.int64)
    weights = np.asarray(weights, dtype=np.float64)
    masks = np.asarray(masks, dtype=np.int64)
    out = np.empty(len(masks), dtype=np.float64)
    for t, mask in enumerate(masks):
        _, inverse = np.unique(addresses & mask, return_inverse=True)
        group_weights = np.bincount(inverse, weights=weights)
        out[t] = float(np.sum(group_weights**2))
    return out
