"""Command-line front end: deterministic experiment runs emitting CSV/JSON.

Query grammar: comma-separated BITS:RE[:IM] terms, e.g. "010:0.7071,101:0.7071";
an omitted imaginary part is 0 and amplitudes are renormalized unless
--no-renormalize is given. --uniform expands to all N addresses at 1/sqrt(N).
Memory sources: an inline 0/1 string, the word "random" (seeded from --seed),
or a file path holding either one 0/1 line or a JSON list of integers.

Identical argument vectors and seeds produce byte-identical artifacts.
Relative --output paths resolve against $QRAMSIM_OUTDIR when it is set.
Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path
from typing import Sequence

from . import rng
from .bucket import full_query
from .core import (
    Address,
    MemoryArray,
    QramError,
    QuerySuperposition,
    TreeGeometry,
    ValidationError,
    make_query,
    random_query,
    uniform_query,
)
from .fanout import fanout_full_query
from .noise import (
    Architecture,
    DephasedSet,
    NoiseSpec,
    SamplingMode,
    bb_expected_fidelity,
    bb_dephasing_fidelity,
    expected_fidelity,
    fanout_expected_fidelity,
    monte_carlo_fidelity,
)
from .oracle import oracle_full_query, oracle_compare, tree_all_wait_fidelity
from .resources import build_report
from .core import cell_index

ARCH_BY_FLAG = {
    "bucket": Architecture.BUCKET_BRIGADE,
    "fanout": Architecture.FANOUT,
}

VERIFY_TOL = 1e-12
WAIT_TOL = 1e-10


def parse_query_spec(spec: str, geometry: TreeGeometry, renormalize: bool = True) -> QuerySuperposition:
    """Parse comma-separated BITS:RE[:IM] terms into a query."""
    pairs = []
    for term in spec.split(","):
        parts = term.strip().split(":")
        if len(parts) not in (2, 3):
            raise ValidationError(f"bad query term {term!r}, expected BITS:RE[:IM]")
        bits, re_part = parts[0], parts[1]
        im_part = parts[2] if len(parts) == 3 else "0"
        try:
            amp = complex(float(re_part), float(im_part))
        except ValueError as exc:
            raise ValidationError(f"bad amplitude in query term {term!r}") from exc
        pairs.append((amp, bits))
    return make_query(pairs, geometry, renormalize=renormalize)


def render_query_spec(q: QuerySuperposition) -> str:
    """Inverse of parse_query_spec (with --no-renormalize), round-trip exact."""
    terms = []
    for amp, addr in q.branches:
        terms.append(f"{addr}:{amp.real!r}:{amp.imag!r}")
    return ",".join(terms)


def load_memory(source: str, geometry: TreeGeometry, seed: int) -> MemoryArray:
    """Memory from an inline 0/1 string, "random", or a file path."""
    if source == "random":
        memory = MemoryArray.random(geometry, rng.substream(seed, rng.STREAM_MEMORY))
    elif source and all(c in "01" for c in source):
        memory = MemoryArray.from_string(source)
    elif os.path.exists(source):
        text = Path(source).read_text(encoding="utf-8").strip()
        if text.startswith("["):
            memory = MemoryArray.from_bits(json.loads(text))
        else:
            memory = MemoryArray.from_string(text)
    else:
        raise ValidationError(
            f"memory source {source!r} is neither 0/1 bits, 'random', nor an existing file"
        )
    memory.check_geometry(geometry)
    return memory


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def emit_report(
    rows: list[dict], fmt: str, path: str | None, header: list[str] | None = None
) -> None:
    """Write rows as CSV (12-significant-digit floats) or a JSON array.

    The CSV header comes from the first row unless given explicitly; an
    empty row set with an explicit header yields a header-only file.
    """
    if fmt == "csv":
        if header is None:
            header = list(rows[0].keys()) if rows else []
        lines = [",".join(header)]
        lines += [",".join(_fmt(row[key]) for key in header) for row in rows]
        text = "\n".join(lines) + "\n"
    else:
        text = json.dumps(rows, indent=2) + "\n"
    if path is None:
        sys.stdout.write(text)
        return
    target = Path(path)
    if not target.is_absolute():
        base = os.environ.get("QRAMSIM_OUTDIR")
        if base:
            target = Path(base) / target
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(text, encoding="utf-8")


def _build_query(args, geometry: TreeGeometry) -> QuerySuperposition:
    if args.uniform:
        return uniform_query(geometry)
    if not args.query:
        raise ValidationError("provide --query or --uniform")
    return parse_query_spec(args.query, geometry, renormalize=not args.no_renormalize)


def cmd_simulate(args) -> int:
    geometry = TreeGeometry(args.n)
    q = _build_query(args, geometry)
    memory = load_memory(args.memory, geometry, args.seed)
    if ARCH_BY_FLAG[args.arch] is Architecture.BUCKET_BRIGADE:
        outcome = full_query(q, memory)
    else:
        outcome = fanout_full_query(q, memory)
    rows = [
        {
            "arch": args.arch,
            "n": args.n,
            "seed": args.seed,
            "address": str(addr),
            "amplitude_re": amp.real,
            "amplitude_im": amp.imag,
            "data_bit": data,
            "interactions": outcome.interactions,
        }
        for amp, addr, data in outcome.pairs
    ]
    emit_report(rows, args.format, args.output)
    return 0


def _parse_epsilons(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise ValidationError(f"bad epsilon list {text!r}") from exc


def cmd_noise(args) -> int:
    geometry = TreeGeometry(args.n)
    q = _build_query(args, geometry)
    arch = ARCH_BY_FLAG[args.arch]
    mode = SamplingMode.SINGLE_ELEMENT if args.single_switch else SamplingMode(args.mode)
    epsilons = _parse_epsilons(args.epsilon) if args.epsilon else [0.0]
    if mode is not SamplingMode.SINGLE_ELEMENT and not args.epsilon:
        raise ValidationError("provide --epsilon (or use --single-switch)")
    rows = []
    for eps in epsilons:
        spec = NoiseSpec(eps, args.seed, args.trials, mode)
        exact = expected_fidelity(arch, q, spec)
        result = monte_carlo_fidelity(arch, q, spec)
        rows.append(
            {
                "arch": args.arch,
                "n": args.n,
                "r": q.num_branches,
                "epsilon": None if mode is SamplingMode.SINGLE_ELEMENT else eps,
                "trials": args.trials,
                "seed": args.seed,
                "mode": mode.value,
                "generator": rng.GENERATOR_ID,
                "mean": result.mean,
                "stderr": result.stderr,
                "exact": exact,
            }
        )
    emit_report(rows, args.format, args.output)
    return 0


def cmd_resources(args) -> int:
    geometry = TreeGeometry(args.n)
    if args.uniform or args.query:
        q = _build_query(args, geometry)
    else:
        q = make_query([(1.0, Address.from_int(0, args.n))], geometry)
    row = {"seed": args.seed, **build_report(q).to_row()}
    emit_report([row], args.format, args.output)
    return 0


def _family_query(family: str, geometry: TreeGeometry) -> QuerySuperposition:
    n = geometry.n
    if family == "uniform":
        return uniform_query(geometry)
    if family == "single":
        return make_query([(1.0, Address.from_int(0, n))], geometry)
    amp = 1.0 / math.sqrt(2.0)
    return make_query(
        [(amp, Address.from_int(0, n)), (amp, Address.from_int(geometry.num_cells - 1, n))],
        geometry,
    )


def cmd_compare(args) -> int:
    if args.n_min < 1 or args.n_max < args.n_min:
        raise ValidationError(f"bad scan range [{args.n_min}, {args.n_max}]")
    epsilons = _parse_epsilons(args.epsilon) if args.epsilon else [None]
    rows = []
    for n in range(args.n_min, args.n_max + 1):
        geometry = TreeGeometry(n)
        q = _family_query(args.family, geometry)
        report = build_report(q)
        for eps in epsilons:
            row = {"seed": args.seed, "family": args.family, **report.to_row()}
            row["epsilon"] = eps
            row["bb_expected_fidelity"] = (
                None if eps is None else bb_expected_fidelity(q, eps)
            )
            row["fanout_expected_fidelity"] = (
                None if eps is None else fanout_expected_fidelity(q, eps)
            )
            rows.append(row)
    emit_report(rows, args.format, args.output)
    return 0


def _verify_cases(args) -> list[str]:
    """Dense-oracle equivalence suite; returns failure descriptions."""
    failures: list[str] = []
    fault = (0, 0) if args.inject_fault else None

    def check_case(q, memory, label: str) -> None:
        outcome = full_query(q, memory)
        fan = fanout_full_query(q, memory)
        if outcome.pairs != fan.pairs:
            failures.append(f"{label}: fanout and bucket-brigade outcomes differ")
        for (amp, addr, data) in outcome.pairs:
            if data != memory[cell_index(addr)]:
                failures.append(f"{label}: data bit mismatch at {addr}")
        sv = oracle_full_query(q, memory, fault_node=fault)
        deviation = oracle_compare(outcome, sv)
        if deviation > VERIFY_TOL:
            failures.append(f"{label}: oracle deviation {deviation:.3e} > {VERIFY_TOL}")
        wait_fidelity = tree_all_wait_fidelity(sv)
        if wait_fidelity < 1.0 - WAIT_TOL:
            failures.append(f"{label}: residual tree excitation, fidelity {wait_fidelity!r}")

    # One crafted case catching any misrouting at the root outright.
    g1 = TreeGeometry(1)
    check_case(
        make_query([(1.0, Address.from_int(0, 1))], g1),
        MemoryArray.from_string("10"),
        "crafted n=1",
    )
    for n in (1, 2, 3):
        geometry = TreeGeometry(n)
        stream = rng.substream(args.seed, rng.STREAM_VERIFY, n)
        for case in range(args.cases):
            r = int(stream.integers(1, geometry.num_cells + 1))
            q = random_query(geometry, r, stream)
            memory = MemoryArray.random(geometry, stream)
            check_case(q, memory, f"n={n} case={case}")
    # Exact fidelity identity on n=2: pair sum vs exhaustive dephasing sets.
    g2 = TreeGeometry(2)
    q2 = uniform_query(g2)
    nodes = list(g2.nodes())
    for eps in (0.1, 0.37):
        exhaustive = 0.0
        for subset_mask in range(1 << len(nodes)):
            subset = frozenset(
                node for b, node in enumerate(nodes) if (subset_mask >> b) & 1
            )
            probability = (eps ** len(subset)) * ((1 - eps) ** (len(nodes) - len(subset)))
            exhaustive += probability * bb_dephasing_fidelity(q2, DephasedSet.of_nodes(subset))
        analytic = bb_expected_fidelity(q2, eps)
        if abs(exhaustive - analytic) > VERIFY_TOL:
            failures.append(
                f"n=2 eps={eps}: expectation {analytic!r} != enumeration {exhaustive!r}"
            )
    return failures


def cmd_verify(args) -> int:
    failures = _verify_cases(args)
    if failures:
        for line in failures[:20]:
            print(f"FAIL {line}", file=sys.stderr)
        print(f"verify: {len(failures)} failure(s)", file=sys.stderr)
        return 1
    print("verify: all equivalence checks passed")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qramsim",
        description="Bucket-brigade vs fanout quantum-RAM addressing lab",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, query=True):
        p.add_argument("--seed", type=int, default=0, help="base seed, recorded in outputs")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--output", default=None, help="output file (default: stdout)")
        if query:
            p.add_argument("--query", default=None, help="comma-separated BITS:RE[:IM] terms")
            p.add_argument("--uniform", action="store_true", help="uniform query over all N addresses")
            p.add_argument(
                "--no-renormalize",
                action="store_true",
                help="require --query amplitudes to be exactly normalized",
            )

    p_sim = sub.add_parser("simulate", help="run one memory call")
    p_sim.add_argument("--n", type=int, required=True)
    p_sim.add_argument("--memory", required=True, help="0/1 string, 'random', or file path")
    p_sim.add_argument("--arch", choices=tuple(ARCH_BY_FLAG), default="bucket")
    add_common(p_sim)
    p_sim.set_defaults(func=cmd_simulate)

    p_noise = sub.add_parser("noise", help="dephasing fidelity experiment")
    p_noise.add_argument("--n", type=int, required=True)
    p_noise.add_argument("--arch", choices=tuple(ARCH_BY_FLAG), required=True)
    p_noise.add_argument("--epsilon", default=None, help="comma-separated dephasing rates")
    p_noise.add_argument("--trials", type=int, default=1000)
    p_noise.add_argument(
        "--mode",
        choices=tuple(m.value for m in SamplingMode),
        default=SamplingMode.INDEPENDENT.value,
    )
    p_noise.add_argument(
        "--single-switch",
        action="store_true",
        help="dephase exactly one uniformly random element per trial",
    )
    add_common(p_noise)
    p_noise.set_defaults(func=cmd_noise)

    p_res = sub.add_parser("resources", help="per-call resource counters")
    p_res.add_argument("--n", type=int, required=True)
    add_common(p_res)
    p_res.set_defaults(func=cmd_resources)

    p_cmp = sub.add_parser("compare", help="architecture scan over n")
    p_cmp.add_argument("--n-min", type=int, required=True)
    p_cmp.add_argument("--n-max", type=int, required=True)
    p_cmp.add_argument("--epsilon", default=None, help="comma-separated dephasing rates")
    p_cmp.add_argument(
        "--family",
        choices=("corners", "uniform", "single"),
        default="corners",
        help="query family used at each n (corners = first and last address)",
    )
    add_common(p_cmp, query=False)
    p_cmp.set_defaults(func=cmd_compare)

    p_ver = sub.add_parser("verify", help="dense-oracle equivalence suite (n <= 3)")
    p_ver.add_argument("--cases", type=int, default=25, help="random cases per n")
    p_ver.add_argument("--seed", type=int, default=0)
    p_ver.add_argument(
        "--inject-fault",
        action="store_true",
        help="swap the encoding at the root node of the oracle (mutation smoke test)",
    )
    p_ver.set_defaults(func=cmd_verify)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except QramError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
