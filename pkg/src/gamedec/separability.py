"""Separable games: pairwise edge games, group-structured utilities, and
executable checks that the potential/harmonic decomposition respects them.

A game is separable for a splitting when every utility is a sum of a term
depending only on the player's out-neighbours plus one term per group, each
depending only on the player's own action and that group's members.
Separability is decided constructively, by projecting each utility onto the
sum of those subspaces and thresholding the residual.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from .game import (
    DEFAULT_TOLERANCE,
    Game,
    GameShape,
    Tolerance,
    normalize,
)
from .graphs import (
    Graph,
    Splitting,
    class_minimal_graph,
    graph_from_dict,
    graph_to_dict,
    graphicality_defect,
    induced_splitting,
    is_graphical,
    is_subgraph,
    minimal_graph,
    singleton_splitting,
    splitting_extension,
    symmetric_closure,
    to_dot,
    triangle_extension,
)
from .hodge import (
    Decomposition,
    decompose,
    harmonic_defect,
    potential_defect,
    subset_indicator_matrix,
    table_profile_values,
)
from .game import own_action_defect


# ---------------------------------------------------------------------------
# Pairwise games
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EdgeUtilities:
    """One two-player table per directed edge; absent reverse edges pay zero.

    ``tables[(i, j)]`` has shape ``(|A_i|, |A_j|)`` with the row indexed by
    the tail player's own action.
    """

    shape: GameShape
    graph: Graph
    tables: dict[tuple[int, int], np.ndarray]

    def __post_init__(self):
        if self.graph.num_nodes != self.shape.num_players:
            raise ValueError("graph node count != player count")
        clean = {}
        keys = {(int(i), int(j)) for i, j in self.tables}
        if keys != set(self.graph.edges):
            missing = sorted(set(self.graph.edges) - keys)
            extra = sorted(keys - set(self.graph.edges))
            raise ValueError(
                f"tables must cover the edge set exactly "
                f"(missing {missing}, extra {extra})"
            )
        for (i, j), table in self.tables.items():
            arr = np.asarray(table, dtype=np.float64)
            want = (self.shape.action_counts[i], self.shape.action_counts[j])
            if arr.shape != want:
                raise ValueError(f"table for edge ({i}, {j}) must have shape {want}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"table for edge ({i}, {j}) has non-finite entries")
            arr.setflags(write=False)
            clean[(int(i), int(j))] = arr
        object.__setattr__(self, "tables", clean)


def build_pairwise_game(e: EdgeUtilities) -> Game:
    """Aggregate each player's outgoing edge tables into a game.

    ``u_i(x) = sum over out-neighbours j of tables[(i, j)][x_i, x_j]``; the
    result is graphical on ``e.graph``.
    """
    shape = e.shape
    digits = shape.digits
    rows = np.zeros((shape.num_players, shape.profile_count))
    for (i, j), table in e.tables.items():
        rows[i] += table[digits[i], digits[j]]
    return Game(shape, rows)


def edge_utilities_to_dict(e: EdgeUtilities) -> dict:
    return {
        "graph": graph_to_dict(e.graph),
        "action_counts": list(e.shape.action_counts),
        "tables": {
            f"{i},{j}": [[float(x) for x in row] for row in table]
            for (i, j), table in sorted(e.tables.items())
        },
    }


def edge_utilities_from_dict(data: dict) -> EdgeUtilities:
    if not isinstance(data, dict):
        raise ValueError("edge-utilities JSON must be an object")
    try:
        graph = graph_from_dict(data["graph"])
        raw_tables = data["tables"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"edge-utilities JSON missing field: {exc}") from exc
    tables = {}
    for key, rows in raw_tables.items():
        parts = key.split(",")
        if len(parts) != 2:
            raise ValueError(f"table key {key!r} must look like 'i,j'")
        tables[(int(parts[0]), int(parts[1]))] = np.asarray(rows, dtype=np.float64)
    if "action_counts" in data:
        counts = tuple(int(c) for c in data["action_counts"])
    else:
        inferred: dict[int, int] = {}
        for (i, j), table in tables.items():
            for node, size in ((i, table.shape[0]), (j, table.shape[1])):
                if inferred.setdefault(node, size) != size:
                    raise ValueError(f"inconsistent action counts for player {node}")
        if set(inferred) != set(range(graph.num_nodes)):
            raise ValueError(
                "action_counts required: some players touch no edge table"
            )
        counts = tuple(inferred[i] for i in range(graph.num_nodes))
    return EdgeUtilities(GameShape(counts), graph, tables)


def edge_utilities_from_json(text: str) -> EdgeUtilities:
    return edge_utilities_from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# Splitting separability
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PlayerSeparation:
    """Fitted terms of one utility row: a base table over the player's
    out-neighbours plus one table per group over (player, group members)."""

    player: int
    base_coords: tuple[int, ...]
    base_table: np.ndarray
    group_coords: tuple[tuple[int, ...], ...]
    group_tables: tuple[np.ndarray, ...]

    def reconstruct(self, shape: GameShape) -> np.ndarray:
        out = table_profile_values(self.base_table, self.base_coords, shape)
        for coords, table in zip(self.group_coords, self.group_tables):
            out = out + table_profile_values(table, coords, shape)
        return out


@dataclass(frozen=True)
class SeparableDecomposition:
    """Per-player separable fit of a game.

    ``residual`` is the worst per-profile reconstruction error over all
    players; ``scaled_residual`` is the worst per-player 2-norm residual
    relative to ``1 + ||u_i||``, which is what the separability verdict
    thresholds.
    """

    players: tuple[PlayerSeparation, ...]
    residual: float
    scaled_residual: float

    def reconstruct(self, shape: GameShape) -> np.ndarray:
        return np.stack([p.reconstruct(shape) for p in self.players])


def fit_separable(game: Game, s: Splitting, g: Graph) -> SeparableDecomposition:
    """Least-squares projection of each utility onto its separable subspace.

    Requires the splitting to cover ``g`` and the game to be graphical on
    ``g``.  Group tables are re-gauged to zero mean with the constants
    absorbed into the base table, pinning one representative.
    """
    s.validate_for(g)
    if g.num_nodes != game.num_players:
        raise ValueError("graph node count != player count")
    if not is_graphical(game, g):
        raise ValueError("game is not graphical on the supplied graph")
    shape = game.shape
    fits = []
    worst_abs = 0.0
    worst_scaled = 0.0
    for i in range(game.num_players):
        base_coords = tuple(sorted(g.out_neighbors(i)))
        group_coords = tuple(
            tuple(sorted(grp | {i})) for grp in s.groups[i]
        )
        blocks = [subset_indicator_matrix(base_coords, shape)]
        blocks += [subset_indicator_matrix(c, shape) for c in group_coords]
        design = np.hstack(blocks)
        target = game.utilities[i]
        coeffs, *_ = np.linalg.lstsq(design, target, rcond=None)
        fitted = design @ coeffs

        sizes = [b.shape[1] for b in blocks]
        offset = sizes[0]
        base = coeffs[: sizes[0]].reshape(
            tuple(shape.action_counts[k] for k in base_coords), order="F"
        )
        tables = []
        for coords, size in zip(group_coords, sizes[1:]):
            t = coeffs[offset : offset + size].reshape(
                tuple(shape.action_counts[k] for k in coords), order="F"
            )
            offset += size
            base = base + t.mean()
            tables.append(t - t.mean())
        fits.append(
            PlayerSeparation(i, base_coords, base, group_coords, tuple(tables))
        )
        err = target - fitted
        worst_abs = max(worst_abs, float(np.max(np.abs(err))) if err.size else 0.0)
        scale = 1.0 + float(np.linalg.norm(target))
        worst_scaled = max(worst_scaled, float(np.linalg.norm(err)) / scale)
    return SeparableDecomposition(tuple(fits), worst_abs, worst_scaled)


def is_separable(
    game: Game, s: Splitting, g: Graph, tol: Tolerance = DEFAULT_TOLERANCE
) -> SeparableDecomposition | None:
    """The separable decomposition of the game, or ``None`` when the
    projection residual of some player exceeds ``tol * (1 + ||u_i||)``."""
    fit = fit_separable(game, s, g)
    if fit.scaled_residual > tol.abs_tol:
        return None
    return fit


# ---------------------------------------------------------------------------
# Verification reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClauseResult:
    passed: bool
    residual: float | None = None
    detail: str = ""


@dataclass(frozen=True)
class VerificationReport:
    name: str
    clauses: dict[str, ClauseResult]
    graphs: dict[str, Graph] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.clauses.values())

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "clauses": {
                key: {
                    "passed": c.passed,
                    "residual": None if c.residual is None else float(c.residual),
                    "detail": c.detail,
                }
                for key, c in self.clauses.items()
            },
            "component_minimal_graphs": {
                key: to_dot(g) for key, g in sorted(self.graphs.items())
            },
        }


def _graphical_clause(component: Game, g: Graph, tol: Tolerance) -> ClauseResult:
    defect = graphicality_defect(component, g)
    return ClauseResult(defect <= tol.resolve(component), defect)


def _separable_clause(
    component: Game, s: Splitting, g: Graph, tol: Tolerance
) -> ClauseResult:
    try:
        fit = fit_separable(component, s, g)
    except ValueError as exc:
        return ClauseResult(False, None, f"fit unavailable: {exc}")
    return ClauseResult(fit.scaled_residual <= tol.abs_tol, fit.scaled_residual)


def _component_graphs(game: Game, d: Decomposition, tol: Tolerance) -> dict[str, Graph]:
    return {
        "input": minimal_graph(game, tol),
        "non_strategic": minimal_graph(d.non_strategic, tol),
        "potential_part": minimal_graph(d.potential_part, tol),
        "harmonic_part": minimal_graph(d.harmonic_part, tol),
    }


def verify_separable_decomposition(
    game: Game, s: Splitting, tol: Tolerance = DEFAULT_TOLERANCE
) -> VerificationReport:
    """Decompose a separable game and check that the structure survives.

    The splitting must cover the class-minimal graph and the game's
    normalized version must be separable for it (error otherwise); that is
    separability up to strategic equivalence, the strongest statement the
    decomposition can respect, and it holds in particular whenever the game
    itself is separable.  Clauses: the non-strategic part is non-strategic
    and graphical on the input's minimal graph; the potential and harmonic
    parts are graphical on the splitting extension of the class-minimal
    graph and separable for the induced splitting; the harmonic part is
    harmonic.
    """
    g_class = class_minimal_graph(game, tol)
    s.validate_for(g_class)
    if is_separable(normalize(game), s, g_class, tol) is None:
        raise ValueError(
            "the game's normalized version is not separable for the given splitting"
        )
    extended = splitting_extension(g_class, s)
    induced = induced_splitting(s, g_class)
    d = decompose(game, tol)
    g_min = minimal_graph(game, tol)

    ns_defect = own_action_defect(d.non_strategic)
    pot_defect = potential_defect(d.potential_part)[0]
    clauses = {
        "non_strategic_is_non_strategic": ClauseResult(
            ns_defect <= tol.resolve(d.non_strategic), ns_defect
        ),
        "non_strategic_graphical_on_minimal": _graphical_clause(
            d.non_strategic, g_min, tol
        ),
        "potential_graphical_on_extension": _graphical_clause(
            d.potential_part, extended, tol
        ),
        "potential_separable": _separable_clause(
            d.potential_part, induced, extended, tol
        ),
        "potential_has_exact_potential": ClauseResult(
            pot_defect <= tol.resolve(d.potential_part), pot_defect
        ),
        "harmonic_graphical_on_extension": _graphical_clause(
            d.harmonic_part, extended, tol
        ),
        "harmonic_separable": _separable_clause(
            d.harmonic_part, induced, extended, tol
        ),
        "harmonic_is_harmonic": ClauseResult(
            harmonic_defect(d.harmonic_part) <= tol.resolve(d.harmonic_part),
            harmonic_defect(d.harmonic_part),
        ),
    }
    return VerificationReport(
        "separable_decomposition", clauses, _component_graphs(game, d, tol)
    )


def verify_triangle_decomposition(
    game: Game, tol: Tolerance = DEFAULT_TOLERANCE
) -> VerificationReport:
    """Check that the decomposition of an arbitrary game stays within the
    triangle extension of its class-minimal graph."""
    d = decompose(game, tol)
    g_min = minimal_graph(game, tol)
    triangle = triangle_extension(class_minimal_graph(game, tol))
    ns_defect = own_action_defect(d.non_strategic)
    clauses = {
        "non_strategic_is_non_strategic": ClauseResult(
            ns_defect <= tol.resolve(d.non_strategic), ns_defect
        ),
        "non_strategic_graphical_on_minimal": _graphical_clause(
            d.non_strategic, g_min, tol
        ),
        "potential_graphical_on_triangle": _graphical_clause(
            d.potential_part, triangle, tol
        ),
        "harmonic_graphical_on_triangle": _graphical_clause(
            d.harmonic_part, triangle, tol
        ),
        "harmonic_is_harmonic": ClauseResult(
            harmonic_defect(d.harmonic_part) <= tol.resolve(d.harmonic_part),
            harmonic_defect(d.harmonic_part),
        ),
    }
    return VerificationReport(
        "triangle_decomposition", clauses, _component_graphs(game, d, tol)
    )


def verify_pairwise_decomposition(
    e: EdgeUtilities, tol: Tolerance = DEFAULT_TOLERANCE
) -> VerificationReport:
    """Check that decomposing a pairwise game only symmetrizes its graph:
    both strategic components stay graphical on the symmetric closure and
    remain pairwise-separable there."""
    game = build_pairwise_game(e)
    closure = symmetric_closure(e.graph)
    singles = singleton_splitting(closure)
    d = decompose(game, tol)
    g_min = minimal_graph(game, tol)
    ns_defect = own_action_defect(d.non_strategic)
    clauses = {
        "non_strategic_is_non_strategic": ClauseResult(
            ns_defect <= tol.resolve(d.non_strategic), ns_defect
        ),
        "non_strategic_graphical_on_minimal": _graphical_clause(
            d.non_strategic, g_min, tol
        ),
        "potential_graphical_on_closure": _graphical_clause(
            d.potential_part, closure, tol
        ),
        "potential_pairwise_separable": _separable_clause(
            d.potential_part, singles, closure, tol
        ),
        "harmonic_graphical_on_closure": _graphical_clause(
            d.harmonic_part, closure, tol
        ),
        "harmonic_pairwise_separable": _separable_clause(
            d.harmonic_part, singles, closure, tol
        ),
        "harmonic_is_harmonic": ClauseResult(
            harmonic_defect(d.harmonic_part) <= tol.resolve(d.harmonic_part),
            harmonic_defect(d.harmonic_part),
        ),
    }
    return VerificationReport(
        "pairwise_decomposition", clauses, _component_graphs(game, d, tol)
    )


# ---------------------------------------------------------------------------
# Named example: one public-good player among majority players
# ---------------------------------------------------------------------------


def public_good_majority_game(graph: Graph, cost: float = 0.5) -> Game:
    """Binary-action game on a graph: player 0 wants the good as cheaply as
    possible, everyone else imitates their neighbours.

    Player 0 gets ``1 - cost`` for buying the good (action 1), ``1`` for
    borrowing it when some out-neighbour bought, and ``0`` otherwise.  Every
    other player's utility is the number of out-neighbours matching her own
    action.  The interpretation needs ``0 < cost < 1``; values outside only
    trigger a warning.
    """
    if not 0.0 < cost < 1.0:
        warnings.warn(
            f"cost {cost} outside (0, 1): the game is still constructed, but "
            "the borrow-versus-buy story no longer holds",
            stacklevel=2,
        )
    n = graph.num_nodes
    if n < 1:
        raise ValueError("need at least one player")
    shape = GameShape((2,) * n)
    digits = shape.digits
    rows = np.zeros((n, shape.profile_count))

    hub_nbrs = sorted(graph.out_neighbors(0))
    if hub_nbrs:
        any_owner = np.zeros(shape.profile_count, dtype=bool)
        for j in hub_nbrs:
            any_owner |= digits[j] == 1
    else:
        any_owner = np.zeros(shape.profile_count, dtype=bool)
    rows[0] = np.where(
        digits[0] == 1, 1.0 - cost, np.where(any_owner, 1.0, 0.0)
    )
    for i in range(1, n):
        for j in sorted(graph.out_neighbors(i)):
            rows[i] += (digits[j] == digits[i]).astype(np.float64)
    return Game(shape, rows)


def example_8node_graph() -> Graph:
    """The fixed 8-player topology shipped with the CLI example: a hub
    (player 0) with three mutually non-adjacent neighbours and a periphery
    connecting them."""
    return Graph.undirected(
        8,
        [(0, 1), (0, 2), (0, 3), (1, 4), (2, 5), (3, 6), (4, 5), (5, 6), (4, 7)],
    )
