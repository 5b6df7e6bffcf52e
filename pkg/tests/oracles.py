"""Brute-force reference implementations for the test suite.

Everything here is deliberately loop-based and independent of the library's
vectorized code paths; the only shared assumption is the documented storage
convention (flat utilities in mixed-radix order, player 0 fastest).
"""

import itertools


def enumerate_profiles(counts):
    """All profiles in storage order: player 0 is the fastest-varying digit."""
    out = []
    for combo in itertools.product(*(range(c) for c in reversed(counts))):
        out.append(tuple(reversed(combo)))
    return out


def profile_position(profile, counts):
    """Position of a profile in the enumeration; oracle for profile_index."""
    return enumerate_profiles(counts).index(tuple(profile))


def comparable_profiles(profile, player, counts):
    base = list(profile)
    out = []
    for a in range(counts[player]):
        base[player] = a
        out.append(tuple(base))
    return out


def utility_by_profile(game, player):
    """Map profile tuple -> utility, built from the flat storage order."""
    counts = game.shape.action_counts
    return {
        p: float(game.utilities[player][k])
        for k, p in enumerate(enumerate_profiles(counts))
    }


def normalized_defect(game):
    """Largest |sum of u_i over the player's own actions|, by explicit loops."""
    counts = game.shape.action_counts
    worst = 0.0
    for i in range(game.shape.num_players):
        table = utility_by_profile(game, i)
        for x in enumerate_profiles(counts):
            total = sum(table[y] for y in comparable_profiles(x, i, counts))
            worst = max(worst, abs(total))
    return worst


def own_action_defect(game):
    counts = game.shape.action_counts
    worst = 0.0
    for i in range(game.shape.num_players):
        table = utility_by_profile(game, i)
        for x in enumerate_profiles(counts):
            for y in comparable_profiles(x, i, counts):
                worst = max(worst, abs(table[x] - table[y]))
    return worst


def normalize_values(game):
    """Per-player normalized utilities in storage order (list of lists)."""
    counts = game.shape.action_counts
    rows = []
    for i in range(game.shape.num_players):
        table = utility_by_profile(game, i)
        row = []
        for x in enumerate_profiles(counts):
            comp = comparable_profiles(x, i, counts)
            row.append(table[x] - sum(table[y] for y in comp) / len(comp))
        rows.append(row)
    return rows


def minimal_graph_edges(game, cut=0.0):
    """Edges (i, j) where u_i moves by more than ``cut`` under changes of j."""
    counts = game.shape.action_counts
    n = game.shape.num_players
    edges = set()
    for i in range(n):
        table = utility_by_profile(game, i)
        for j in range(n):
            if j == i:
                continue
            for x in enumerate_profiles(counts):
                for y in comparable_profiles(x, j, counts):
                    if abs(table[x] - table[y]) > cut:
                        edges.add((i, j))
                        break
                else:
                    continue
                break
    return edges


def harmonic_defect(game):
    """Largest per-profile total unilateral gain, by explicit loops."""
    counts = game.shape.action_counts
    tables = [utility_by_profile(game, i) for i in range(game.shape.num_players)]
    worst = 0.0
    for x in enumerate_profiles(counts):
        total = 0.0
        for i in range(game.shape.num_players):
            for y in comparable_profiles(x, i, counts):
                total += tables[i][x] - tables[i][y]
        worst = max(worst, abs(total))
    return worst


def worst_four_cycle_flow(game):
    """Largest |flow sum| around any elementary four-cycle of the response
    graph; 0 exactly when the game is an exact potential game."""
    counts = game.shape.action_counts
    n = game.shape.num_players
    tables = [utility_by_profile(game, i) for i in range(n)]
    worst = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            others = [k for k in range(n) if k != i and k != j]
            for rest in itertools.product(*(range(counts[k]) for k in others)):
                def prof(ai, aj):
                    p = [0] * n
                    for k, v in zip(others, rest):
                        p[k] = v
                    p[i] = ai
                    p[j] = aj
                    return tuple(p)

                for a0, a1 in itertools.combinations(range(counts[i]), 2):
                    for b0, b1 in itertools.combinations(range(counts[j]), 2):
                        total = (
                            tables[i][prof(a1, b0)] - tables[i][prof(a0, b0)]
                            + tables[j][prof(a1, b1)] - tables[j][prof(a1, b0)]
                            + tables[i][prof(a0, b1)] - tables[i][prof(a1, b1)]
                            + tables[j][prof(a0, b0)] - tables[j][prof(a0, b1)]
                        )
                        worst = max(worst, abs(total))
    return worst


def is_potential_by_cycles(game, tol):
    return worst_four_cycle_flow(game) <= tol


def maximal_cliques_by_subsets(num_nodes, edges):
    """All maximal cliques by checking every subset; edges must be symmetric."""
    nodes = range(num_nodes)
    cliques = []
    for r in range(1, num_nodes + 1):
        for sub in itertools.combinations(nodes, r):
            if all((a, b) in edges for a, b in itertools.combinations(sub, 2)):
                cliques.append(set(sub))
    maximal = [
        tuple(sorted(c))
        for c in cliques
        if not any(c < other for other in cliques)
    ]
    return sorted(set(maximal))
