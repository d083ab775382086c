"""Command-line front end.

Commands:
  solve-topology FILE   locally minimal tree for the document's topology
  exact FILE            globally minimum tree by exhaustive search
  check FILE            re-run certificates on a previously emitted result
  render FILE -o OUT    draw a result document as SVG
  bounds FILE           lower/upper bounds for the document's strategy

Exit codes: 0 success, 1 certificate failure, 2 input error, 3 guard refusal.
"""

from __future__ import annotations

import argparse
import math
import random
import sys

from . import analysis, documents, exact_search
from .algebraic_solver import solve_topology as algebraic_solve
from .errors import DocumentError, FqstError, GuardLimitError
from .geo_solver import solve_full_topology, supports as geo_supports
from .render import render_svg
from .strategies import DegreeBound, ExplicitBound, NodeWeighted, max_steiner_count
from .topology import compute_flows, validate_topology

EXIT_OK = 0
EXIT_CERTIFICATE = 1
EXIT_INPUT = 2
EXIT_GUARD = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fqst",
        description="Flow-dependent quadratic Steiner trees: solve, search, check, draw.",
    )
    parser.add_argument("--tolerance", type=float, default=1e-9,
                        help="certificate tolerance (default 1e-9)")
    parser.add_argument("--guard-n", type=int, default=exact_search.DEFAULT_GUARD,
                        help="largest source count exact search accepts")
    parser.add_argument("--seed", type=int, default=None,
                        help="seed for any randomized utilities (reproducibility)")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve-topology", help="solve the document's fixed topology")
    solve.add_argument("file")
    solve.add_argument("-o", "--output", default=None, help="write the result here instead of stdout")

    exact = sub.add_parser("exact", help="exhaustive search for the global optimum")
    exact.add_argument("file")
    exact.add_argument("-o", "--output", default=None)

    check = sub.add_parser("check", help="re-run certificates on a result document")
    check.add_argument("file")

    render = sub.add_parser("render", help="draw a result document as SVG")
    render.add_argument("file")
    render.add_argument("-o", "--output", required=True)

    bounds = sub.add_parser("bounds", help="report bounds for the document's strategy")
    bounds.add_argument("file")
    bounds.add_argument("-o", "--output", default=None)
    return parser


def _read_document(path: str):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return documents.loads(handle.read())
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc}") from exc


def _write_output(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8") as handle:
            handle.write(text)


def _cmd_solve_topology(args) -> int:
    parsed = documents.parse_instance_document(_read_document(args.file))
    if parsed.topology is None:
        raise DocumentError("solve-topology needs a document with a 'topology'")
    instance, topology = parsed.instance, parsed.topology
    structural = topology.structural_violations()
    if structural:
        raise DocumentError("; ".join(structural))
    use_geo = geo_supports(instance, topology)
    tree = solve_full_topology(instance, topology) if use_geo else algebraic_solve(instance, topology)
    objective = tree.cost
    if isinstance(parsed.strategy, NodeWeighted):
        objective = analysis.cost_node_weighted(tree, parsed.strategy.c)
    doc = documents.result_document(
        tree,
        parsed.strategy,
        tolerance=args.tolerance,
        objective=objective,
        extra={"solver": "geometric" if use_geo else "algebraic"},
    )
    _write_output(documents.dumps(doc), args.output)
    return EXIT_OK


def _cmd_exact(args) -> int:
    parsed = documents.parse_instance_document(_read_document(args.file))
    report = exact_search.solve_exact(parsed.instance, parsed.strategy, guard_n=args.guard_n)
    extra = {
        "search": {
            "topologies_examined": report.topologies_examined,
            "topologies_pruned": report.topologies_pruned,
            "lower_bound": report.lower_bound,
        }
    }
    if report.upper_bound is not None:
        extra["search"]["upper_bound"] = report.upper_bound
    if report.steiner_bound is not None:
        extra["search"]["steiner_bound"] = report.steiner_bound
    doc = documents.result_document(
        report.best,
        parsed.strategy,
        tolerance=args.tolerance,
        objective=report.objective,
        claims_global_optimum=True,
        extra=extra,
    )
    _write_output(documents.dumps(doc), args.output)
    return EXIT_OK


def _cmd_check(args) -> int:
    parsed = documents.parse_result_document(_read_document(args.file))
    tree, strategy = parsed.tree, parsed.strategy
    tol = args.tolerance
    failures: list[str] = []
    notes: list[str] = []

    recomputed = analysis.cost(tree)
    if abs(recomputed - tree.cost) > tol * (1.0 + abs(recomputed)):
        failures.append(f"cost mismatch: stored {tree.cost}, recomputed {recomputed}")

    expected_flows = compute_flows(tree.topology, tree.instance.supplies)
    worst_flow = max(
        (abs(a - b) for a, b in zip(expected_flows, tree.flows)), default=0.0
    )
    if worst_flow > tol:
        failures.append(f"flow conservation violated by {worst_flow:.3e}")

    structural = validate_topology(tree.topology, strategy)
    failures.extend(f"structure: {v}" for v in structural)

    certificate = analysis.check_centroid_certificate(tree, tol)
    bad = sorted(slot for slot, ok in certificate.items() if not ok)
    if bad:
        failures.append(f"centroid certificate fails at Steiner slots {bad}")

    if isinstance(strategy, DegreeBound):
        optimality = [
            f"{v.kind} at node {v.node}: {v.detail}"
            for v in analysis.check_degree_window(tree, strategy.phi, tol)
        ]
    else:
        optimality = [
            f"angle {v.angle:.6f} rad between in-edge from {v.in_neighbour} "
            f"and out-edge at node {v.node}"
            for v in analysis.check_angles(tree, tol)
        ]
    overlaps = analysis.check_overlapping_edges(tree, strategy=strategy)
    optimality += [
        f"overlapping edges at node {v.node} (neighbours {v.first_neighbour}, {v.second_neighbour})"
        for v in overlaps
        if not v.degree_phi_caveat
    ]
    notes.extend(
        f"overlapping edges at degree-phi Steiner node {v.node} (not disqualifying)"
        for v in overlaps
        if v.degree_phi_caveat
    )
    if parsed.claims_global_optimum:
        failures.extend(f"optimality: {line}" for line in optimality)
    else:
        notes.extend(optimality)

    for line in failures:
        print(f"FAIL {line}")
    for line in notes:
        print(f"note {line}")
    if not failures:
        print("all checks passed")
        return EXIT_OK
    return EXIT_CERTIFICATE


def _cmd_render(args) -> int:
    parsed = documents.parse_result_document(_read_document(args.file))
    _write_output(render_svg(parsed.tree), args.output)
    return EXIT_OK


def _cmd_bounds(args) -> int:
    parsed = documents.parse_instance_document(_read_document(args.file))
    instance, strategy = parsed.instance, parsed.strategy
    if isinstance(strategy, DegreeBound):
        k = max_steiner_count(instance.n_sources, strategy.phi)
    elif isinstance(strategy, ExplicitBound):
        k = strategy.k
    else:
        k = analysis.steiner_count_bound(instance, strategy.c)
    doc = {
        "schema": documents.SCHEMA_VERSION,
        "strategy": documents.strategy_document(strategy),
        "steiner_budget": k,
        "lower_bound_path": analysis.lower_bound_path(instance, k),
    }
    if isinstance(strategy, NodeWeighted):
        bst = analysis.beaded_spanning_tree(instance, strategy.c)
        doc["beaded_spanning_tree_cost"] = analysis.cost_node_weighted(bst, strategy.c)
    _write_output(documents.dumps(doc), args.output)
    return EXIT_OK


_COMMANDS = {
    "solve-topology": _cmd_solve_topology,
    "exact": _cmd_exact,
    "check": _cmd_check,
    "render": _cmd_render,
    "bounds": _cmd_bounds,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.seed is not None:
        random.seed(args.seed)
    if not (args.tolerance > 0.0 and math.isfinite(args.tolerance)):
        print("error: --tolerance must be positive and finite", file=sys.stderr)
        return EXIT_INPUT
    try:
        return _COMMANDS[args.command](args)
    except GuardLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (DocumentError, FqstError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def entrypoint() -> None:
    raise SystemExit(main())
