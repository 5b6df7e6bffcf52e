"""Deterministic random instance builders for tests and the CLI."""

from __future__ import annotations

import numpy as np

from .game import Game, GameShape
from .graphs import Graph, Splitting
from .hodge import Potential, decompose, table_profile_values
from .separability import EdgeUtilities, build_pairwise_game

RANDOM_KINDS = (
    "dense",
    "graphical",
    "pairwise",
    "potential",
    "harmonic",
    "nonstrategic",
)


def matching_pennies() -> Game:
    """Two binary players; the first wants to match, the second to mismatch."""
    shape = GameShape((2, 2))
    u0 = np.array([1.0, -1.0, -1.0, 1.0])
    return Game(shape, np.stack([u0, -u0]))


def coordination_game() -> Game:
    """Two binary players, both paid 1 for matching actions."""
    shape = GameShape((2, 2))
    u = np.array([1.0, 0.0, 0.0, 1.0])
    return Game(shape, np.stack([u, u]))


def _random_table_values(
    coords: tuple[int, ...], shape: GameShape, rng: np.random.Generator
) -> np.ndarray:
    dims = tuple(shape.action_counts[k] for k in coords)
    table = rng.uniform(-1.0, 1.0, size=dims)
    return table_profile_values(table, coords, shape)


def random_game(shape: GameShape, rng: np.random.Generator) -> Game:
    return Game(
        shape, rng.uniform(-1.0, 1.0, size=(shape.num_players, shape.profile_count))
    )


def random_nonstrategic_game(shape: GameShape, rng: np.random.Generator) -> Game:
    rows = np.empty((shape.num_players, shape.profile_count))
    for i in range(shape.num_players):
        coords = tuple(k for k in range(shape.num_players) if k != i)
        rows[i] = _random_table_values(coords, shape, rng)
    return Game(shape, rows)


def random_graphical_game(
    shape: GameShape, graph: Graph, rng: np.random.Generator
) -> Game:
    """Utilities depending only on each player's closed out-neighbourhood."""
    if graph.num_nodes != shape.num_players:
        raise ValueError("graph node count != player count")
    rows = np.empty((shape.num_players, shape.profile_count))
    for i in range(shape.num_players):
        coords = tuple(sorted(graph.closed_out_neighbors(i)))
        rows[i] = _random_table_values(coords, shape, rng)
    return Game(shape, rows)


def random_edge_utilities(
    shape: GameShape, graph: Graph, rng: np.random.Generator
) -> EdgeUtilities:
    if graph.num_nodes != shape.num_players:
        raise ValueError("graph node count != player count")
    tables = {
        (i, j): rng.uniform(
            -1.0, 1.0, size=(shape.action_counts[i], shape.action_counts[j])
        )
        for i, j in graph.sorted_edges()
    }
    return EdgeUtilities(shape, graph, tables)


def random_pairwise_game(
    shape: GameShape, graph: Graph, rng: np.random.Generator
) -> Game:
    return build_pairwise_game(random_edge_utilities(shape, graph, rng))


def random_potential_game(shape: GameShape, rng: np.random.Generator) -> Game:
    """Normalized potential game: the potential component of a dense draw."""
    return decompose(random_game(shape, rng)).potential_part


def random_harmonic_game(shape: GameShape, rng: np.random.Generator) -> Game:
    """Normalized harmonic game: the harmonic component of a dense draw."""
    return decompose(random_game(shape, rng)).harmonic_part


def random_digraph(
    num_nodes: int, rng: np.random.Generator, edge_prob: float = 0.4
) -> Graph:
    edges = {
        (i, j)
        for i in range(num_nodes)
        for j in range(num_nodes)
        if i != j and rng.random() < edge_prob
    }
    return Graph(num_nodes, frozenset(edges))


def random_undirected_graph(
    num_nodes: int, rng: np.random.Generator, edge_prob: float = 0.4
) -> Graph:
    pairs = [
        (i, j)
        for i in range(num_nodes)
        for j in range(i + 1, num_nodes)
        if rng.random() < edge_prob
    ]
    return Graph.undirected(num_nodes, pairs)


def random_splitting(graph: Graph, rng: np.random.Generator) -> Splitting:
    """A covering of each out-neighbourhood by at most two groups."""
    per_player = []
    for i in range(graph.num_nodes):
        nbrs = sorted(graph.out_neighbors(i))
        if not nbrs:
            per_player.append((frozenset(),))
        elif len(nbrs) == 1:
            per_player.append((frozenset(nbrs),))
        else:
            first = {nbrs[0]}
            second = {nbrs[1]}
            for j in nbrs[2:]:
                draw = rng.integers(3)
                if draw == 0:
                    first.add(j)
                elif draw == 1:
                    second.add(j)
                else:
                    first.add(j)
                    second.add(j)
            per_player.append((frozenset(first), frozenset(second)))
    return Splitting(tuple(per_player))


def random_separable_game(
    shape: GameShape,
    graph: Graph,
    splitting: Splitting,
    rng: np.random.Generator,
    include_base: bool = True,
) -> Game:
    """Sum of one random table per (player, group) block, plus an optional
    base term over each player's out-neighbours; separable by construction."""
    splitting.validate_for(graph)
    if graph.num_nodes != shape.num_players:
        raise ValueError("graph node count != player count")
    rows = np.zeros((shape.num_players, shape.profile_count))
    for i in range(shape.num_players):
        if include_base:
            coords = tuple(sorted(graph.out_neighbors(i)))
            rows[i] += _random_table_values(coords, shape, rng)
        for grp in splitting.groups[i]:
            coords = tuple(sorted(grp | {i}))
            rows[i] += _random_table_values(coords, shape, rng)
    return Game(shape, rows)


def random_clique_local_potential(
    shape: GameShape, graph: Graph, rng: np.random.Generator
) -> Potential:
    """Zero-mean potential built as a sum of random per-maximal-clique tables."""
    from .graphs import maximal_cliques

    values = np.zeros(shape.profile_count)
    for clique in maximal_cliques(graph):
        values += _random_table_values(tuple(clique), shape, rng)
    return Potential(shape, values - values.mean())


def generate(
    kind: str, shape: GameShape, graph: Graph | None = None, seed: int = 0
) -> Game:
    """Seeded dispatcher used by the CLI ``random`` command."""
    rng = np.random.default_rng(seed)
    if kind == "dense":
        return random_game(shape, rng)
    if kind == "nonstrategic":
        return random_nonstrategic_game(shape, rng)
    if kind == "potential":
        return random_potential_game(shape, rng)
    if kind == "harmonic":
        return random_harmonic_game(shape, rng)
    if kind == "graphical":
        if graph is None:
            raise ValueError("kind 'graphical' needs a graph")
        return random_graphical_game(shape, graph, rng)
    if kind == "pairwise":
        if graph is None:
            raise ValueError("kind 'pairwise' needs a graph")
        return random_pairwise_game(shape, graph, rng)
    raise ValueError(f"unknown kind {kind!r}; choose one of {RANDOM_KINDS}")
