#!/usr/bin/env python3
"""Benchmark the fidelity kernels: compiled extension vs pure-numpy fallback.

Runs identical Monte Carlo dephasing workloads through both backends,
checks they agree to 1e-12, and prints a timing table.

    python3 benchmarks/bench_kernels.py [--trials 2000]
"""

import argparse
import time

import numpy as np

from qramsim import NoiseSpec, TreeGeometry, uniform_query
from qramsim._kernels import _pure
from qramsim.noise import _element_tables, sample_dephased_elements

try:
    from qramsim._kernels import _fast
except ImportError:
    _fast = None


def build_workload(n: int, epsilon: float, trials: int, seed: int = 1):
    q = uniform_query(TreeGeometry(n))
    spec = NoiseSpec(epsilon, seed, trials)
    num_elements = q.geometry.num_nodes
    levels, indices = _element_tables(n)
    selections = [
        sample_dephased_elements(spec, num_elements, t) for t in range(trials)
    ]
    offsets = np.zeros(trials + 1, dtype=np.int64)
    offsets[1:] = np.cumsum([len(s) for s in selections])
    flat = np.concatenate(selections).astype(np.int64)
    masks = np.zeros(trials, dtype=np.int64)
    for t, sel in enumerate(selections):
        for level in np.unique(levels[sel]):
            masks[t] |= 1 << (n - 1 - int(level))
    return q, levels[flat], indices[flat], offsets, masks


def time_backend(fn, *args, repeats=3):
    best = float("inf")
    result = None
    for _ in range(repeats):
        start = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - start)
    return best, result


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=2000)
    args = parser.parse_args()

    if _fast is None:
        print("compiled kernels not built; showing pure backend only")

    print(f"{'workload':<28}{'pure [s]':>10}{'compiled [s]':>14}{'speedup':>9}")
    for n, epsilon in [(6, 0.05), (10, 0.05), (12, 0.01), (12, 0.05)]:
        q, levels, indices, offsets, masks = build_workload(n, epsilon, args.trials)
        addr, w = q.address_values, q.weights

        pure_t, pure_bb = time_backend(
            _pure.bb_set_fidelities, addr, w, n, levels, indices, offsets
        )
        label = f"bb n={n} eps={epsilon} T={args.trials}"
        if _fast is None:
            print(f"{label:<28}{pure_t:>10.3f}{'-':>14}{'-':>9}")
            continue
        fast_t, fast_bb = time_backend(
            _fast.bb_set_fidelities, addr, w, n, levels, indices, offsets
        )
        assert np.max(np.abs(pure_bb - fast_bb)) < 1e-12
        print(f"{label:<28}{pure_t:>10.3f}{fast_t:>14.3f}{pure_t / fast_t:>8.1f}x")

        pure_t, pure_fan = time_backend(
            _pure.fanout_set_fidelities, addr, w, n, masks
        )
        fast_t, fast_fan = time_backend(
            _fast.fanout_set_fidelities, addr, w, n, masks
        )
        assert np.max(np.abs(pure_fan - fast_fan)) < 1e-12
        label = f"fanout n={n} eps={epsilon}"
        print(f"{label:<28}{pure_t:>10.3f}{fast_t:>14.3f}{pure_t / fast_t:>8.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
