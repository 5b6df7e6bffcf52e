"""Directed graphs on the player set and the interaction graphs of games.

Graphs are simple (no self-loops) sets of ordered pairs; an undirected graph
is one whose edge set is symmetric.  The minimal graph of a game has an edge
``(i, j)`` exactly when player ``i``'s utility genuinely depends on player
``j``'s action; dependence on one's own action never creates an edge.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .game import DEFAULT_TOLERANCE, Game, Tolerance, normalize

CLIQUE_NODE_LIMIT = 64  # node sets are bitmasks


@dataclass(frozen=True)
class Graph:
    num_nodes: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        if self.num_nodes < 0:
            raise ValueError("num_nodes must be nonnegative")
        clean = frozenset((int(i), int(j)) for i, j in self.edges)
        for i, j in clean:
            if i == j:
                raise ValueError(f"self-loop ({i}, {i}) not allowed")
            if not (0 <= i < self.num_nodes and 0 <= j < self.num_nodes):
                raise ValueError(f"edge ({i}, {j}) outside node range [0, {self.num_nodes})")
        object.__setattr__(self, "edges", clean)

    @classmethod
    def from_edges(cls, num_nodes: int, edges: Iterable[Sequence[int]]) -> "Graph":
        return cls(num_nodes, frozenset((int(i), int(j)) for i, j in edges))

    @classmethod
    def empty(cls, num_nodes: int) -> "Graph":
        return cls(num_nodes, frozenset())

    @classmethod
    def complete(cls, num_nodes: int) -> "Graph":
        return cls(
            num_nodes,
            frozenset(
                (i, j)
                for i in range(num_nodes)
                for j in range(num_nodes)
                if i != j
            ),
        )

    @classmethod
    def undirected(cls, num_nodes: int, pairs: Iterable[Sequence[int]]) -> "Graph":
        """Build a symmetric graph from unordered node pairs."""
        edges = set()
        for i, j in pairs:
            edges.add((int(i), int(j)))
            edges.add((int(j), int(i)))
        return cls(num_nodes, frozenset(edges))

    @cached_property
    def _adjacency(self) -> tuple[frozenset[int], ...]:
        out: list[set[int]] = [set() for _ in range(self.num_nodes)]
        for i, j in self.edges:
            out[i].add(j)
        return tuple(frozenset(s) for s in out)

    def out_neighbors(self, i: int) -> frozenset[int]:
        """Open out-neighbourhood of ``i``."""
        return self._adjacency[i]

    def closed_out_neighbors(self, i: int) -> frozenset[int]:
        return self._adjacency[i] | {i}

    @cached_property
    def is_symmetric(self) -> bool:
        return all((j, i) in self.edges for i, j in self.edges)

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def __contains__(self, edge: tuple[int, int]) -> bool:
        return tuple(edge) in self.edges


def is_subgraph(a: Graph, b: Graph) -> bool:
    if a.num_nodes != b.num_nodes:
        raise ValueError("graphs have different node counts")
    return a.edges <= b.edges


def intersection(a: Graph, b: Graph) -> Graph:
    if a.num_nodes != b.num_nodes:
        raise ValueError("graphs have different node counts")
    return Graph(a.num_nodes, a.edges & b.edges)


def union(a: Graph, b: Graph) -> Graph:
    if a.num_nodes != b.num_nodes:
        raise ValueError("graphs have different node counts")
    return Graph(a.num_nodes, a.edges | b.edges)


def symmetric_closure(g: Graph) -> Graph:
    """Make every link undirected."""
    return Graph(g.num_nodes, g.edges | frozenset((j, i) for i, j in g.edges))


def triangle_extension(g: Graph) -> Graph:
    """Symmetric closure plus links between all pairs of out-neighbours of
    every node."""
    edges = set(symmetric_closure(g).edges)
    for i in range(g.num_nodes):
        nbrs = sorted(g.out_neighbors(i))
        for a in range(len(nbrs)):
            for b in range(a + 1, len(nbrs)):
                edges.add((nbrs[a], nbrs[b]))
                edges.add((nbrs[b], nbrs[a]))
    return Graph(g.num_nodes, frozenset(edges))


@dataclass(frozen=True)
class Splitting:
    """Per-player covering of the open out-neighbourhood by groups.

    Groups may overlap (it is a covering, not a partition) and a player with
    no out-neighbours may carry a single empty group.
    """

    groups: tuple[tuple[frozenset[int], ...], ...]

    def __post_init__(self):
        clean = tuple(
            tuple(frozenset(int(m) for m in grp) for grp in player_groups)
            for player_groups in self.groups
        )
        object.__setattr__(self, "groups", clean)

    @property
    def num_players(self) -> int:
        return len(self.groups)

    def validate_for(self, g: Graph) -> None:
        """Raise unless this is a covering of ``g``'s open out-neighbourhoods."""
        if self.num_players != g.num_nodes:
            raise ValueError(
                f"splitting covers {self.num_players} players, graph has {g.num_nodes}"
            )
        for i, player_groups in enumerate(self.groups):
            covered: set[int] = set()
            for grp in player_groups:
                if i in grp:
                    raise ValueError(f"group of player {i} contains the player itself")
                covered |= grp
            if covered != set(g.out_neighbors(i)):
                raise ValueError(
                    f"groups of player {i} cover {sorted(covered)}, expected the "
                    f"out-neighbourhood {sorted(g.out_neighbors(i))}"
                )

    def blocks(self) -> list[tuple[int, frozenset[int]]]:
        """All (player, {player} | group) coordinate blocks, in player order."""
        out = []
        for i, player_groups in enumerate(self.groups):
            for grp in player_groups:
                out.append((i, grp | {i}))
        return out


def singleton_splitting(g: Graph) -> Splitting:
    """One group per out-neighbour (players with no neighbours get no group)."""
    return Splitting(
        tuple(
            tuple(frozenset((j,)) for j in sorted(g.out_neighbors(i)))
            for i in range(g.num_nodes)
        )
    )


def full_neighborhood_splitting(g: Graph) -> Splitting:
    """A single group per player holding the whole out-neighbourhood."""
    return Splitting(
        tuple((frozenset(g.out_neighbors(i)),) for i in range(g.num_nodes))
    )


def splitting_extension(g: Graph, s: Splitting) -> Graph:
    """Symmetric closure plus links between all distinct members of each group.

    Reduces to the symmetric closure for all-singleton groups and to the
    triangle extension when each player has the single group equal to her
    whole out-neighbourhood.
    """
    s.validate_for(g)
    edges = set(symmetric_closure(g).edges)
    for _, block_groups in enumerate(s.groups):
        for grp in block_groups:
            members = sorted(grp)
            for a in range(len(members)):
                for b in range(a + 1, len(members)):
                    edges.add((members[a], members[b]))
                    edges.add((members[b], members[a]))
    return Graph(g.num_nodes, frozenset(edges))


def induced_splitting(s: Splitting, g: Graph) -> Splitting:
    """Splitting of ``splitting_extension(g, s)`` whose groups are the
    coordinate blocks ``{i} | group`` of ``s`` with the owning player removed.

    Every player ``j`` gets one group per block containing ``j``; their union
    is exactly ``j``'s out-neighbourhood in the extended graph.  This is the
    separability structure that the potential/harmonic components of a
    separable game inherit (singleton groups induce singleton groups on the
    symmetric closure).
    """
    s.validate_for(g)
    per_player: list[set[frozenset[int]]] = [set() for _ in range(g.num_nodes)]
    for _, block in [(i, blk) for i, blk in s.blocks()]:
        for j in block:
            per_player[j].add(block - {j})
    out = []
    for j in range(g.num_nodes):
        groups = sorted(per_player[j], key=lambda grp: sorted(grp))
        if not groups:
            groups = [frozenset()]
        out.append(tuple(groups))
    return Splitting(tuple(out))


# ---------------------------------------------------------------------------
# Interaction graphs of games
# ---------------------------------------------------------------------------


def dependence_matrix(game: Game) -> np.ndarray:
    """``dep[i, j]``: the largest change in ``u_i`` caused by changing only
    ``j``'s action.  The diagonal (own-action dependence) is reported too but
    never contributes an edge."""
    n = game.num_players
    dep = np.zeros((n, n))
    for i in range(n):
        t = game.player_tensor(i)
        for j in range(n):
            if game.shape.action_counts[j] < 2:
                continue
            dep[i, j] = float(np.max(np.ptp(t, axis=j)))
    return dep


def minimal_graph(game: Game, tol: Tolerance = DEFAULT_TOLERANCE) -> Graph:
    """Smallest graph the game is graphical on.

    Edge ``(i, j)`` is present iff some unilateral change of ``j``'s action
    moves ``u_i`` by strictly more than the tolerance; differences within
    tolerance count as no dependence.
    """
    dep = dependence_matrix(game)
    cut = tol.resolve(game)
    n = game.num_players
    edges = frozenset(
        (i, j) for i in range(n) for j in range(n) if i != j and dep[i, j] > cut
    )
    return Graph(n, edges)


def class_minimal_graph(game: Game, tol: Tolerance = DEFAULT_TOLERANCE) -> Graph:
    """Minimal graph of the normalized version: the smallest graph any game
    strategically equivalent to this one can be graphical on."""
    return minimal_graph(normalize(game), tol)


def graphicality_defect(game: Game, g: Graph) -> float:
    """Largest dependence of any ``u_i`` on a player outside ``i``'s
    out-neighbourhood in ``g``; 0 iff the game is graphical on ``g``."""
    if g.num_nodes != game.num_players:
        raise ValueError("graph node count != player count")
    dep = dependence_matrix(game)
    worst = 0.0
    for i in range(game.num_players):
        for j in range(game.num_players):
            if i != j and (i, j) not in g.edges:
                worst = max(worst, float(dep[i, j]))
    return worst


def is_graphical(game: Game, g: Graph, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    return graphicality_defect(game, g) <= tol.resolve(game)


# ---------------------------------------------------------------------------
# Maximal cliques (pivoting branch and bound on bitmasks)
# ---------------------------------------------------------------------------


def _iter_bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def maximal_cliques(g: Graph) -> list[tuple[int, ...]]:
    """All inclusion-maximal cliques of a symmetric graph.

    Isolated nodes come back as singleton cliques.  Each clique is a sorted
    tuple and the list is sorted lexicographically.
    """
    if not g.is_symmetric:
        raise ValueError("maximal_cliques needs a symmetric graph")
    n = g.num_nodes
    if n > CLIQUE_NODE_LIMIT:
        raise ValueError(f"clique enumeration limited to {CLIQUE_NODE_LIMIT} nodes")
    adj = [0] * n
    for i, j in g.edges:
        adj[i] |= 1 << j
    found: list[int] = []

    def expand(r: int, p: int, x: int) -> None:
        if p == 0 and x == 0:
            found.append(r)
            return
        pivot = max(_iter_bits(p | x), key=lambda v: bin(p & adj[v]).count("1"))
        for v in _iter_bits(p & ~adj[pivot]):
            bit = 1 << v
            expand(r | bit, p & adj[v], x & adj[v])
            p &= ~bit
            x |= bit

    if n:
        expand(0, (1 << n) - 1, 0)
    return sorted(tuple(_iter_bits(mask)) for mask in found)


# ---------------------------------------------------------------------------
# JSON and DOT
#
# Graph JSON:     {"num_nodes": int, "edges": [[i, j], ...]}      (0-indexed)
# Splitting JSON: {"groups": [[[j, ...], ...], ...]}              (per player)
# ---------------------------------------------------------------------------


def graph_to_dict(g: Graph) -> dict:
    return {"num_nodes": g.num_nodes, "edges": [list(e) for e in g.sorted_edges()]}


def graph_from_dict(data: dict) -> Graph:
    if not isinstance(data, dict):
        raise ValueError("graph JSON must be an object")
    try:
        n = int(data["num_nodes"])
        edges = data["edges"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"graph JSON missing or invalid field: {exc}") from exc
    if not isinstance(edges, list):
        raise ValueError("field 'edges' must be a list of [i, j] pairs")
    pairs = []
    for k, e in enumerate(edges):
        if not isinstance(e, list) or len(e) != 2:
            raise ValueError(f"edges[{k}] must be a pair [i, j]")
        pairs.append((int(e[0]), int(e[1])))
    return Graph.from_edges(n, pairs)


def graph_to_json(g: Graph, indent: int | None = 2) -> str:
    return json.dumps(graph_to_dict(g), indent=indent, sort_keys=True)


def graph_from_json(text: str) -> Graph:
    return graph_from_dict(json.loads(text))


def splitting_to_dict(s: Splitting) -> dict:
    return {
        "groups": [
            [sorted(grp) for grp in player_groups] for player_groups in s.groups
        ]
    }


def splitting_from_dict(data: dict) -> Splitting:
    if not isinstance(data, dict) or "groups" not in data:
        raise ValueError("splitting JSON must be an object with a 'groups' field")
    groups = data["groups"]
    if not isinstance(groups, list):
        raise ValueError("field 'groups' must be a per-player list")
    return Splitting(
        tuple(
            tuple(frozenset(int(j) for j in grp) for grp in player_groups)
            for player_groups in groups
        )
    )


def splitting_from_json(text: str) -> Splitting:
    return splitting_from_dict(json.loads(text))


def to_dot(g: Graph, name: str = "G") -> str:
    """DOT text: a ``graph`` with one line per unordered pair when the edge
    set is symmetric, else a ``digraph`` with one line per ordered pair."""
    lines = []
    if g.is_symmetric:
        lines.append(f"graph {name} {{")
        arrow = "--"
        edges = sorted({tuple(sorted(e)) for e in g.edges})
    else:
        lines.append(f"digraph {name} {{")
        arrow = "->"
        edges = g.sorted_edges()
    for v in range(g.num_nodes):
        lines.append(f"  {v};")
    for i, j in edges:
        lines.append(f"  {i} {arrow} {j};")
    lines.append("}")
    return "\n".join(lines) + "\n"
