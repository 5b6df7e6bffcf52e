"""Command-line front end.

Every command reads JSON from a file path (or stdin via ``-``), writes JSON
or DOT to stdout (or ``--out``), and exits 0 on success, 1 when a requested
check fails, 2 on bad input or usage.  Outputs are deterministic: JSON is
pretty-printed with sorted keys, and random generation is seed-driven.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .game import (
    Game,
    GameShape,
    Tolerance,
    game_from_dict,
    game_to_dict,
    is_non_strategic,
    is_normalized,
    normalize,
)
from .graphs import (
    graph_from_dict,
    graph_to_dict,
    is_graphical,
    minimal_graph,
    splitting_from_dict,
    splitting_extension,
    symmetric_closure,
    to_dot,
    triangle_extension,
)
from .hodge import (
    SolverError,
    decompose,
    decomposition_to_dict,
    exact_potential,
    is_harmonic,
    is_zero_sum,
)
from .generators import RANDOM_KINDS, coordination_game, generate, matching_pennies
from .separability import (
    edge_utilities_from_dict,
    edge_utilities_to_dict,
    example_8node_graph,
    fit_separable,
    public_good_majority_game,
    verify_pairwise_decomposition,
    verify_separable_decomposition,
    verify_triangle_decomposition,
)

EXAMPLE_NAMES = ("public-good-8node", "matching-pennies", "coordination")


class InputError(Exception):
    """Bad file, JSON, or schema; maps to exit code 2."""


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _load_json(path: str) -> dict:
    text = _read_text(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(
            f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc


def _load_game(path: str) -> Game:
    try:
        return game_from_dict(_load_json(path))
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _load_graph(path: str):
    try:
        return graph_from_dict(_load_json(path))
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _load_splitting(path: str):
    try:
        return splitting_from_dict(_load_json(path))
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _emit_json(data: dict, out: str | None) -> None:
    _emit(json.dumps(data, indent=2, sort_keys=True), out)


def _tolerance(args) -> Tolerance:
    return Tolerance(abs_tol=args.tol)


# ---------------------------------------------------------------------------
# Command handlers
# ---------------------------------------------------------------------------


def _cmd_minimal_graph(args) -> int:
    game = _load_game(args.game)
    if args.normalized:
        game = normalize(game)
    graph = minimal_graph(game, _tolerance(args))
    if args.dot:
        _emit(to_dot(graph), args.out)
    else:
        _emit_json(graph_to_dict(graph), args.out)
    return 0


def _cmd_normalize(args) -> int:
    game = _load_game(args.game)
    _emit_json(game_to_dict(normalize(game)), args.out)
    return 0


def _cmd_decompose(args) -> int:
    game = _load_game(args.game)
    d = decompose(game, _tolerance(args))
    _emit_json(decomposition_to_dict(d), args.out)
    return 0


def _cmd_check(args) -> int:
    game = _load_game(args.game)
    tol = _tolerance(args)
    checks: dict[str, bool] = {}
    if args.normalized:
        checks["normalized"] = is_normalized(game, tol)
    if args.non_strategic:
        checks["non_strategic"] = is_non_strategic(game, tol)
    if args.harmonic:
        checks["harmonic"] = is_harmonic(game, tol)
    if args.zero_sum:
        checks["zero_sum"] = is_zero_sum(game, tol)
    if args.potential:
        checks["potential"] = exact_potential(game, tol) is not None
    if args.graphical:
        graph = _load_graph(args.graph) if args.graph else None
        if graph is None:
            raise InputError("--graphical needs --graph")
        checks["graphical"] = is_graphical(game, graph, tol)
    if not checks:
        raise InputError(
            "nothing to check: pass at least one of --normalized, "
            "--non-strategic, --harmonic, --zero-sum, --potential, --graphical"
        )
    passed = all(checks.values())
    _emit_json({"checks": checks, "passed": passed}, args.out)
    return 0 if passed else 1


def _cmd_extend_graph(args) -> int:
    graph = _load_graph(args.graph)
    modes = [bool(args.closure), bool(args.triangle), args.splitting is not None]
    if sum(modes) != 1:
        raise InputError("pick exactly one of --closure, --triangle, --splitting")
    if args.closure:
        result = symmetric_closure(graph)
    elif args.triangle:
        result = triangle_extension(graph)
    else:
        splitting = _load_splitting(args.splitting)
        try:
            result = splitting_extension(graph, splitting)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
    if args.dot:
        _emit(to_dot(result), args.out)
    else:
        _emit_json(graph_to_dict(result), args.out)
    return 0


def _cmd_separable(args) -> int:
    game = _load_game(args.game)
    graph = _load_graph(args.graph)
    splitting = _load_splitting(args.splitting)
    tol = _tolerance(args)
    try:
        fit = fit_separable(game, splitting, graph)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    separable = fit.scaled_residual <= tol.abs_tol
    report = {
        "separable": separable,
        "max_abs_error": fit.residual,
        "scaled_residual": fit.scaled_residual,
        "players": [
            {
                "player": p.player,
                "base_coords": list(p.base_coords),
                "group_coords": [list(c) for c in p.group_coords],
            }
            for p in fit.players
        ],
    }
    _emit_json(report, args.out)
    return 0 if separable else 1


def _cmd_verify(args) -> int:
    tol = _tolerance(args)
    try:
        if args.claim == "separable":
            if not args.splitting:
                raise InputError("verify separable needs --splitting")
            game = _load_game(args.input)
            splitting = _load_splitting(args.splitting)
            report = verify_separable_decomposition(game, splitting, tol)
        elif args.claim == "triangle":
            report = verify_triangle_decomposition(_load_game(args.input), tol)
        else:
            data = _load_json(args.input)
            try:
                edges = edge_utilities_from_dict(data)
            except ValueError as exc:
                raise InputError(f"{args.input}: {exc}") from exc
            report = verify_pairwise_decomposition(edges, tol)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    _emit_json(report.to_dict(), args.out)
    return 0 if report.passed else 1


def _cmd_example(args) -> int:
    if args.name == "public-good-8node":
        game = public_good_majority_game(example_8node_graph(), cost=args.cost)
    elif args.name == "matching-pennies":
        game = matching_pennies()
    else:
        game = coordination_game()
    _emit_json(game_to_dict(game), args.out)
    return 0


def _cmd_random(args) -> int:
    try:
        counts = tuple(int(c) for c in args.actions.split(","))
    except ValueError as exc:
        raise InputError(f"--actions must be comma-separated integers: {exc}") from exc
    try:
        shape = GameShape(counts)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    graph = _load_graph(args.graph) if args.graph else None
    if args.tables:
        if args.kind != "pairwise":
            raise InputError("--tables only makes sense with --kind pairwise")
        if graph is None:
            raise InputError("kind 'pairwise' needs --graph")
        from .generators import random_edge_utilities

        edges = random_edge_utilities(shape, graph, np.random.default_rng(args.seed))
        _emit_json(edge_utilities_to_dict(edges), args.out)
        return 0
    try:
        game = generate(args.kind, shape, graph, args.seed)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    _emit_json(game_to_dict(game), args.out)
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _add_common(sub, game_input: bool = True) -> None:
    if game_input:
        sub.add_argument(
            "game", nargs="?", default="-", help="game JSON path, or - for stdin"
        )
    sub.add_argument("--tol", type=float, default=1e-9, help="tolerance (default 1e-9)")
    sub.add_argument("--out", default=None, help="write output to a file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gamedec",
        description=(
            "Minimal interaction graphs, strategic-equivalence normal forms, "
            "and the non-strategic/potential/harmonic decomposition of finite games."
        ),
    )
    parser.add_argument("--version", action="version", version=f"gamedec {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("minimal-graph", help="minimal interaction graph of a game")
    _add_common(p)
    p.add_argument("--normalized", action="store_true", help="use the normalized version")
    p.add_argument("--dot", action="store_true", help="emit DOT instead of JSON")
    p.set_defaults(func=_cmd_minimal_graph)

    p = sub.add_parser("normalize", help="strategic-equivalence normal form")
    _add_common(p)
    p.set_defaults(func=_cmd_normalize)

    p = sub.add_parser(
        "decompose", help="non-strategic + potential + harmonic decomposition"
    )
    _add_common(p)
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("check", help="test game properties (exit 1 on failure)")
    _add_common(p)
    p.add_argument("--normalized", action="store_true")
    p.add_argument("--non-strategic", dest="non_strategic", action="store_true")
    p.add_argument("--harmonic", action="store_true")
    p.add_argument("--zero-sum", dest="zero_sum", action="store_true")
    p.add_argument("--potential", action="store_true")
    p.add_argument("--graphical", action="store_true")
    p.add_argument("--graph", default=None, help="graph JSON for --graphical")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("extend-graph", help="symmetric closure / triangle / splitting extension")
    p.add_argument("graph", nargs="?", default="-", help="graph JSON path, or - for stdin")
    p.add_argument("--tol", type=float, default=1e-9, help=argparse.SUPPRESS)
    p.add_argument("--out", default=None)
    p.add_argument("--closure", action="store_true", help="make all links undirected")
    p.add_argument("--triangle", action="store_true", help="also link all co-neighbours")
    p.add_argument("--splitting", default=None, help="splitting JSON for the group extension")
    p.add_argument("--dot", action="store_true")
    p.set_defaults(func=_cmd_extend_graph)

    p = sub.add_parser("separable", help="test separability for a splitting (exit 1 if not)")
    _add_common(p)
    p.add_argument("--graph", required=True, help="graph JSON the splitting covers")
    p.add_argument("--splitting", required=True, help="splitting JSON")
    p.set_defaults(func=_cmd_separable)

    p = sub.add_parser("verify", help="check decomposition structure theorems on an instance")
    p.add_argument("claim", choices=("separable", "triangle", "pairwise"))
    p.add_argument("input", nargs="?", default="-", help="game JSON (edge-utilities JSON for 'pairwise')")
    p.add_argument("--splitting", default=None, help="splitting JSON (claim 'separable')")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("example", help="emit a named example game")
    p.add_argument("name", choices=EXAMPLE_NAMES)
    p.add_argument("--cost", type=float, default=0.5, help="public-good cost (default 0.5)")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_example)

    p = sub.add_parser("random", help="seeded random game generator")
    p.add_argument("--kind", choices=RANDOM_KINDS, required=True)
    p.add_argument("--actions", required=True, help="comma-separated action counts, e.g. 2,2,3")
    p.add_argument("--graph", default=None, help="graph JSON (kinds graphical/pairwise)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tables", action="store_true", help="emit edge-utilities JSON (kind pairwise)")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_random)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"gamedec: error: {exc}", file=sys.stderr)
        return 2
    except SolverError as exc:
        print(f"gamedec: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"gamedec: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
