"""Command-line front end.

Every subcommand reads one network file and prints a JSON document.  Exit
codes: 0 success, 2 input validation, 3 internal numeric mismatch, 4
resource caps.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from .arborescence import DEFAULT_CAP, enumerate_in_trees, tree_polynomial_via_cofactor
from .connectivity import classify_connectivity, condense, minimal_absorbing_sets
from .dominance import certify_transient_invertible
from .errors import MastergraphError
from .evolution import evolve
from .network import FORMATS, initial_distribution, parse_network
from .simulation import SimulationConfig, empirical_distribution
from .steady_state import kernel_dimension, limit_distribution, steady_state_basis


def _floats(values) -> list[float]:
    return [float(v) for v in np.asarray(values, dtype=float)]


def analyze(net, p0=None, cap: int = DEFAULT_CAP) -> dict:
    """Run the structural pipeline and return the report as a dict."""
    timing = {}

    def timed(stage, fn, *args, **kwargs):
        start = time.perf_counter()
        result = fn(*args, **kwargs)
        timing[stage] = (time.perf_counter() - start) * 1e3
        return result

    cond = timed("condense", condense, net)
    connectivity = timed("connectivity", classify_connectivity, net)
    sinks = timed("minimal_absorbing_sets", minimal_absorbing_sets, net, cond)
    dominance = None
    if len(sinks) and sum(map(len, sinks)) < net.n:
        dominance = timed("certify", certify_transient_invertible, net, cond)
    dim = timed("kernel_dimension", kernel_dimension, net, cond)
    basis = timed("basis", steady_state_basis, net, cond, cap)
    limit = None
    if p0 is not None:
        limit = timed("limit", limit_distribution, net, p0, cond, basis)

    if not dim == len(sinks) == len(basis):
        raise AssertionError("kernel dimension, sinks and basis disagree")
    return {
        "network": {"states": net.n, "edges": len(net.edges), "labels": list(net.states)},
        "connectivity": connectivity.value,
        "condensation": cond.to_json(net),
        "minimal_absorbing_sets": [net.labels(s) for s in sinks],
        "relaxing": dim == 1,
        "kernel_dimension": dim,
        "basis": _basis_json(net, basis),
        "dominance": None if dominance is None else dominance.to_json(net.states),
        "limit": None if limit is None else {
            "lambda": _floats(limit.coefficients),
            "p_infinity": _floats(limit.p_infinity),
        },
        "timing_ms": timing,
    }


def _basis_json(net, basis) -> list[dict]:
    return [
        {"support": net.labels(support), "vector": _floats(vec), "method": method}
        for support, vec, method in zip(basis.supports, basis.vectors, basis.methods)
    ]


def steady_report(net, p0=None, cap: int = DEFAULT_CAP) -> dict:
    cond = condense(net)
    dim = kernel_dimension(net, cond)
    basis = steady_state_basis(net, cond, cap)
    doc = {"n": dim, "relaxing": dim == 1, "basis": _basis_json(net, basis)}
    if p0 is not None:
        limit = limit_distribution(net, p0, cond, basis)
        doc["lambda"] = _floats(limit.coefficients)
        doc["p_infinity"] = _floats(limit.p_infinity)
    return doc


def trees_report(net, root=None, cap: int = DEFAULT_CAP) -> list[dict]:
    roots = range(net.n) if root is None else [net.index(root)]
    out = []
    for r in roots:
        trees = enumerate_in_trees(net, r, cap)
        out.append({
            "root": net.states[r],
            "count": len(trees),
            "trees": [t.to_json(net)["edges"] for t in trees],
            "weights": [t.weight for t in trees],
            "cofactor": tree_polynomial_via_cofactor(net, r),
        })
    return out


def _read_network(args):
    path = Path(args.input)
    fmt = args.format or ("json" if path.suffix.lower() == ".json" else "edge_list")
    return parse_network(path.read_text(encoding="utf-8"), fmt)


def _start_spec(net, spec):
    """``--start`` takes a bare state label, ``state:LABEL``, ``uniform`` or a file."""
    if spec in net.states:
        return spec
    if spec.startswith("state:"):
        return spec[len("state:"):]
    return initial_distribution(net, spec)


def _cmd_analyze(args, net):
    p0 = initial_distribution(net, args.p0) if args.p0 else None
    return analyze(net, p0, args.cap)


def _cmd_steady(args, net):
    p0 = initial_distribution(net, args.p0) if args.p0 else None
    return steady_report(net, p0, args.cap)


def _cmd_trees(args, net):
    return trees_report(net, args.root, args.cap)


def _cmd_evolve(args, net):
    return _floats(evolve(net, initial_distribution(net, args.p0), args.t))


def _cmd_simulate(args, net):
    config = SimulationConfig(args.T, args.n, args.seed, _start_spec(net, args.start))
    estimate, stderr = empirical_distribution(net, config)
    return {
        "states": list(net.states),
        "T": args.T,
        "n": args.n,
        "seed": args.seed,
        "estimate": _floats(estimate),
        "stderr": _floats(stderr),
    }


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", help="network file (edge list or JSON)")
    common.add_argument("--format", choices=FORMATS,
                        help="input format (default: json for *.json, else edge_list)")
    common.add_argument("--output", "-o", help="write JSON here instead of stdout")
    common.add_argument("--cap", type=int, default=DEFAULT_CAP,
                        help="largest network for in-tree enumeration (default %(default)s)")

    parser = argparse.ArgumentParser(
        prog="mastergraph",
        description="Stationary states and long-time limits of finite Master equations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="full structural report")
    p.add_argument("--p0", help="initial condition: uniform, state:LABEL or a JSON file")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("steady", parents=[common], help="steady-state basis and limit")
    p.add_argument("--p0", help="initial condition: uniform, state:LABEL or a JSON file")
    p.set_defaults(func=_cmd_steady)

    p = sub.add_parser("trees", parents=[common], help="spanning in-trees")
    p.add_argument("--root", help="root state label (default: every state)")
    p.set_defaults(func=_cmd_trees)

    p = sub.add_parser("evolve", parents=[common], help="distribution at time t")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--p0", required=True, help="uniform, state:LABEL or a JSON file")
    p.set_defaults(func=_cmd_evolve)

    p = sub.add_parser("simulate", parents=[common], help="Gillespie estimate at time T")
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--n", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--start", required=True,
                   help="state label, state:LABEL, uniform or a JSON file")
    p.set_defaults(func=_cmd_simulate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        net = _read_network(args)
        doc = args.func(args, net)
    except MastergraphError as exc:
        print(f"mastergraph: error [{exc.code}]: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"mastergraph: error [io]: {exc}", file=sys.stderr)
        return 2
    # repr-based float output round-trips every double exactly
    text = json.dumps(doc, indent=2)
    if args.output:
        Path(args.output).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
