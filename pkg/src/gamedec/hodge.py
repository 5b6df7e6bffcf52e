"""Flows on the profile space: potential and harmonic structure of games.

The response graph has one node per strategy profile and one edge per
unordered pair of profiles that differ in exactly one player's action; the
differing player labels the edge.  Edges are oriented from the lower
mixed-radix profile index to the higher one.  With that orientation:

* ``game_flow(u)[e] = u_i(head) - u_i(tail)`` for an edge labeled ``i``;
* ``gradient(phi)[e] = phi(head) - phi(tail)``;
* ``divergence(flow)[x]`` sums incident edge values into ``x`` minus out of
  ``x``, so ``divergence(game_flow(u))[x]`` equals the total unilateral gain
  ``sum_i sum_{y ~_i x} (u_i(x) - u_i(y))`` at the profile ``x``.

A game is an exact potential game when its flow is a gradient, and harmonic
when its flow has zero divergence everywhere.  Every game splits uniquely
into a non-strategic part, a normalized potential part, and a normalized
harmonic part; ``decompose`` computes the split and certifies each
membership with residuals, which makes the result solver-independent.

Potentials are determined only up to an additive constant; everything here
reports them in the zero-mean gauge.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .game import (
    DEFAULT_TOLERANCE,
    Game,
    GameShape,
    Tolerance,
    game_to_dict,
    game_from_dict,
    is_normalized,
    nonstrategic_part,
    normalize,
    profile_index,
)
from .graphs import Graph, maximal_cliques

CG_RESIDUAL_FACTOR = 1e-12  # converged when ||r||_2 <= factor * (1 + ||flow||_2)
CG_MAX_ITER_FACTOR = 10  # iteration cap is factor * profile_count


class SolverError(RuntimeError):
    """Conjugate-gradient failure; carries the final residual norm."""

    def __init__(self, residual: float, iterations: int):
        super().__init__(
            f"potential fit did not converge after {iterations} iterations "
            f"(residual 2-norm {residual:.3e})"
        )
        self.residual = residual
        self.iterations = iterations


@dataclass(frozen=True)
class ResponseGraph:
    """Edge arrays of the profile-comparability graph for one shape.

    Edges are enumerated deterministically: players in ascending order, then
    action pairs ``(a, b)`` with ``a < b`` lexicographically, then base
    profiles by ascending index.
    """

    shape: GameShape
    tails: np.ndarray
    heads: np.ndarray
    players: np.ndarray

    @classmethod
    def build(cls, shape: GameShape) -> "ResponseGraph":
        tails: list[np.ndarray] = []
        heads: list[np.ndarray] = []
        players: list[np.ndarray] = []
        idx = np.arange(shape.profile_count)
        for i, (count, stride) in enumerate(
            zip(shape.action_counts, shape.strides)
        ):
            if count < 2:
                continue
            base = idx[(idx // stride) % count == 0]
            for a in range(count):
                for b in range(a + 1, count):
                    tails.append(base + a * stride)
                    heads.append(base + b * stride)
                    players.append(np.full(base.size, i, dtype=np.int64))
        if tails:
            t = np.concatenate(tails)
            h = np.concatenate(heads)
            p = np.concatenate(players)
        else:
            t = h = p = np.zeros(0, dtype=np.int64)
        for arr in (t, h, p):
            arr.setflags(write=False)
        return cls(shape, t, h, p)

    @property
    def num_edges(self) -> int:
        return int(self.tails.size)


def expected_edge_count(shape: GameShape) -> int:
    return sum(
        (shape.profile_count // c) * (c * (c - 1) // 2) for c in shape.action_counts
    )


@dataclass(frozen=True)
class Potential:
    """Scalar function on the profile space, flat in mixed-radix order."""

    shape: GameShape
    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64).reshape(-1)
        if arr.shape != (self.shape.profile_count,):
            raise ValueError(
                f"potential needs {self.shape.profile_count} values, got {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise ValueError("potential values must be finite")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def tensor(self) -> np.ndarray:
        return self.values.reshape(self.shape.action_counts, order="F")

    def zero_mean(self) -> "Potential":
        return Potential(self.shape, self.values - self.values.mean())

    def mean(self) -> float:
        return float(self.values.mean())


def game_flow(game: Game, rg: ResponseGraph | None = None) -> np.ndarray:
    """Utility difference of the deviating player along every oriented edge."""
    rg = rg or ResponseGraph.build(game.shape)
    if rg.shape != game.shape:
        raise ValueError("response graph shape != game shape")
    return game.utilities[rg.players, rg.heads] - game.utilities[rg.players, rg.tails]


def gradient(phi: Potential, rg: ResponseGraph | None = None) -> np.ndarray:
    """Potential difference head minus tail along every oriented edge."""
    rg = rg or ResponseGraph.build(phi.shape)
    if rg.shape != phi.shape:
        raise ValueError("response graph shape != potential shape")
    return phi.values[rg.heads] - phi.values[rg.tails]


def divergence(flow: np.ndarray, rg: ResponseGraph) -> np.ndarray:
    """Per-profile net flow: incident edge values into the profile minus out."""
    flow = np.asarray(flow, dtype=np.float64)
    if flow.shape != (rg.num_edges,):
        raise ValueError(f"flow needs {rg.num_edges} entries, got {flow.shape}")
    out = np.zeros(rg.shape.profile_count)
    np.add.at(out, rg.heads, flow)
    np.subtract.at(out, rg.tails, flow)
    return out


def laplacian_apply(values: np.ndarray, shape: GameShape) -> np.ndarray:
    """Response-graph Laplacian (divergence of gradient), applied matrix-free.

    Per player ``i`` the edges form disjoint complete graphs over the lines
    of constant opponents, so the operator is
    ``sum_i (|A_i| * v - line_sum_i(v))``.
    """
    t = np.asarray(values, dtype=np.float64).reshape(shape.action_counts, order="F")
    out = np.zeros_like(t)
    for i, count in enumerate(shape.action_counts):
        out += count * t - t.sum(axis=i, keepdims=True)
    return out.ravel(order="F")


# ---------------------------------------------------------------------------
# Harmonic / zero-sum predicates
# ---------------------------------------------------------------------------


def harmonic_defect(game: Game) -> float:
    """Largest per-profile total unilateral gain magnitude; 0 iff harmonic."""
    total = np.zeros(game.shape.profile_count)
    for i, count in enumerate(game.shape.action_counts):
        t = game.player_tensor(i)
        total += (count * t - t.sum(axis=i, keepdims=True)).ravel(order="F")
    return float(np.max(np.abs(total))) if total.size else 0.0


def is_harmonic(game: Game, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    return harmonic_defect(game) <= tol.resolve(game)


def harmonic_normalized_defect(game: Game) -> float:
    """Largest magnitude of ``sum_i |A_i| u_i(x)``: for normalized games this
    vanishes exactly when the game is harmonic."""
    counts = np.array(game.shape.action_counts, dtype=np.float64)
    weighted = counts @ game.utilities
    return float(np.max(np.abs(weighted)))


def harmonic_normalized_check(game: Game, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    if not is_normalized(game, tol):
        raise ValueError("harmonic_normalized_check needs a normalized game")
    return harmonic_normalized_defect(game) <= tol.resolve(game)


def zero_sum_defect(game: Game) -> float:
    sums = game.utilities.sum(axis=0)
    return float(np.max(np.abs(sums)))


def is_zero_sum(game: Game, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    return zero_sum_defect(game) <= tol.resolve(game)


# ---------------------------------------------------------------------------
# Exact potentials
# ---------------------------------------------------------------------------


def _integrated_candidate(game: Game) -> np.ndarray:
    """Integrate the flow along the canonical spanning tree.

    The tree walks from the all-zero profile to ``x`` by raising one
    coordinate at a time in player order, so the candidate accumulates, per
    player ``i``, the utility change of ``i`` on the step that sets ``x_i``
    (with all later coordinates still at zero).  For a potential game this
    reproduces the potential anchored at profile 0.
    """
    shape = game.shape
    n = shape.num_players
    phi = np.zeros(shape.action_counts)
    for i in range(n):
        t = game.player_tensor(i)
        lead = t[(slice(None),) * (i + 1) + (0,) * (n - 1 - i)]
        base = np.take(lead, [0], axis=i)
        term = lead - base
        phi = phi + term.reshape(term.shape + (1,) * (n - 1 - i))
    return phi


def potential_defect(game: Game) -> tuple[float, tuple[int, int, int] | None]:
    """Worst violation of the potential condition by the integrated candidate.

    Returns ``(violation, (player, tail_index, head_index))`` for the most
    violated edge, or ``(0.0, None)`` when the game is an exact potential
    game up to rounding.
    """
    shape = game.shape
    phi = _integrated_candidate(game)
    worst = 0.0
    worst_edge: tuple[int, int, int] | None = None
    for i, count in enumerate(shape.action_counts):
        if count < 2:
            continue
        diff = game.player_tensor(i) - phi
        lines = np.moveaxis(diff, i, 0).reshape(count, -1, order="F")
        spread = lines.max(axis=0) - lines.min(axis=0)
        line = int(np.argmax(spread))
        if float(spread[line]) > worst:
            worst = float(spread[line])
            a = int(np.argmin(lines[:, line]))
            b = int(np.argmax(lines[:, line]))
            rest_counts = shape.action_counts[:i] + shape.action_counts[i + 1 :]
            rest = (
                np.unravel_index(line, rest_counts, order="F") if rest_counts else ()
            )
            digitsa = list(rest[:i]) + [a] + list(rest[i:])
            digitsb = list(rest[:i]) + [b] + list(rest[i:])
            pa, pb = profile_index(digitsa, shape), profile_index(digitsb, shape)
            worst_edge = (i, min(pa, pb), max(pa, pb))
    return worst, worst_edge


def exact_potential(
    game: Game, tol: Tolerance = DEFAULT_TOLERANCE
) -> Potential | None:
    """The potential of an exact potential game, in zero-mean gauge.

    Integrates the flow along a spanning tree of the response graph anchored
    at profile 0, then verifies the potential condition on every edge.
    Returns ``None`` when some edge violates it beyond tolerance.
    """
    violation, _ = potential_defect(game)
    if violation > tol.resolve(game):
        return None
    phi = _integrated_candidate(game).ravel(order="F")
    return Potential(game.shape, phi - phi.mean())


def fit_potential(
    game: Game,
    tol: Tolerance = DEFAULT_TOLERANCE,
    rg: ResponseGraph | None = None,
) -> Potential:
    """Least-squares potential of a normalized game.

    Minimizes the squared mismatch between the potential's gradient and the
    game flow over all zero-mean potentials; the first-order condition makes
    the residual flow divergence-free, i.e. the unmatched part of the game is
    harmonic.  Solved by conjugate gradients on the response-graph Laplacian
    with iterates projected to the zero-mean subspace.
    """
    if not is_normalized(game, tol):
        raise ValueError("fit_potential needs a normalized game")
    rg = rg or ResponseGraph.build(game.shape)
    flow = game_flow(game, rg)
    b = divergence(flow, rg)
    b -= b.mean()
    threshold = CG_RESIDUAL_FACTOR * (1.0 + float(np.linalg.norm(flow)))
    max_iter = CG_MAX_ITER_FACTOR * game.shape.profile_count

    x = np.zeros_like(b)
    r = b.copy()
    p = r.copy()
    rs = float(r @ r)
    iterations = 0
    while np.sqrt(rs) > threshold:
        if iterations >= max_iter:
            raise SolverError(float(np.sqrt(rs)), iterations)
        ap = laplacian_apply(p, game.shape)
        denom = float(p @ ap)
        if denom <= 0.0:
            # p fell into the constant nullspace; nothing left to resolve
            raise SolverError(float(np.sqrt(rs)), iterations)
        alpha = rs / denom
        x += alpha * p
        r -= alpha * ap
        x -= x.mean()
        r -= r.mean()
        rs_new = float(r @ r)
        p = r + (rs_new / rs) * p
        rs = rs_new
        iterations += 1
    return Potential(game.shape, x - x.mean())


def potential_component(phi: Potential, shape: GameShape | None = None) -> Game:
    """The unique normalized game whose unilateral changes all equal the
    corresponding potential differences: ``u_i = phi - own-action mean of phi``."""
    shape = shape or phi.shape
    if shape != phi.shape:
        raise ValueError("shape mismatch with the potential")
    t = phi.tensor()
    rows = np.empty((shape.num_players, shape.profile_count))
    for i in range(shape.num_players):
        rows[i] = (t - t.mean(axis=i, keepdims=True)).ravel(order="F")
    return Game(shape, rows)


# ---------------------------------------------------------------------------
# The full decomposition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Decomposition:
    """Split of a game into non-strategic + normalized potential + normalized
    harmonic parts, with the residuals certifying each membership.

    ``residuals`` keys: ``sum_check`` (max reconstruction error),
    ``potential_check`` (worst mismatch between the potential part's flow and
    the potential's gradient), ``harmonic_check`` (worst per-profile total
    unilateral gain of the harmonic part).
    """

    non_strategic: Game
    potential_part: Game
    harmonic_part: Game
    potential: Potential
    residuals: dict[str, float]

    def max_residual(self) -> float:
        return max(self.residuals.values())


def decompose(game: Game, tol: Tolerance = DEFAULT_TOLERANCE) -> Decomposition:
    """Unique decomposition ``game = non_strategic + potential_part +
    harmonic_part``.

    The direct-sum structure of the three classes makes any triple passing
    the membership checks *the* decomposition, so the recorded residuals
    certify correctness independently of the solver.
    """
    rg = ResponseGraph.build(game.shape)
    u_ns = nonstrategic_part(game)
    u_norm = normalize(game)
    phi = fit_potential(u_norm, tol, rg)
    u_pot = potential_component(phi)
    u_pot = Game(
        game.shape, u_pot.utilities, game.player_names, game.action_names
    )
    u_harm = u_norm - u_pot

    recon = u_ns.utilities + u_pot.utilities + u_harm.utilities
    sum_check = float(np.max(np.abs(game.utilities - recon)))
    pot_flow = game_flow(u_pot, rg)
    grad = gradient(phi, rg)
    potential_check = (
        float(np.max(np.abs(pot_flow - grad))) if rg.num_edges else 0.0
    )
    harmonic_check = harmonic_defect(u_harm)
    return Decomposition(
        non_strategic=u_ns,
        potential_part=u_pot,
        harmonic_part=u_harm,
        potential=phi,
        residuals={
            "sum_check": sum_check,
            "potential_check": potential_check,
            "harmonic_check": harmonic_check,
        },
    )


# ---------------------------------------------------------------------------
# Clique-local potentials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CliquePotentialFit:
    """Least-squares split of a potential into per-clique local tables.

    ``tables[k]`` depends only on the coordinates of ``cliques[k]`` (axes in
    ascending player order).  All tables are zero-mean except the first,
    which absorbs the global constant.  ``residual`` is the 2-norm of the
    unfitted part; ``max_abs_error`` the worst per-profile mismatch.
    """

    cliques: tuple[tuple[int, ...], ...]
    tables: tuple[np.ndarray, ...]
    residual: float
    max_abs_error: float

    def reconstruct(self, shape: GameShape) -> np.ndarray:
        out = np.zeros(shape.profile_count)
        for clique, table in zip(self.cliques, self.tables):
            out += table_profile_values(table, clique, shape)
        return out


def table_profile_values(
    table: np.ndarray, coords: Sequence[int], shape: GameShape
) -> np.ndarray:
    """Evaluate a table over the coordinate subset ``coords`` at every profile."""
    coords = tuple(coords)
    if not coords:
        return np.full(shape.profile_count, float(np.asarray(table).reshape(())))
    digits = shape.digits
    return np.asarray(table)[tuple(digits[k] for k in coords)]


def subset_cell_index(coords: Sequence[int], shape: GameShape) -> np.ndarray:
    """Mixed-radix cell index of each profile restricted to ``coords``."""
    coords = tuple(coords)
    cell = np.zeros(shape.profile_count, dtype=np.int64)
    stride = 1
    for k in coords:
        cell += shape.digits[k] * stride
        stride *= shape.action_counts[k]
    return cell


def subset_indicator_matrix(coords: Sequence[int], shape: GameShape) -> np.ndarray:
    """(profile_count, table_size) one-hot matrix for functions of ``coords``."""
    coords = tuple(coords)
    size = 1
    for k in coords:
        size *= shape.action_counts[k]
    mat = np.zeros((shape.profile_count, size))
    mat[np.arange(shape.profile_count), subset_cell_index(coords, shape)] = 1.0
    return mat


def fit_clique_potentials(phi: Potential, g: Graph) -> CliquePotentialFit:
    """Project a potential onto sums of functions of each maximal clique."""
    if g.num_nodes != phi.shape.num_players:
        raise ValueError("graph node count != player count")
    cliques = tuple(maximal_cliques(g))
    shape = phi.shape
    blocks = [np.ones((shape.profile_count, 1))]
    sizes = []
    for clique in cliques:
        mat = subset_indicator_matrix(clique, shape)
        blocks.append(mat)
        sizes.append(mat.shape[1])
    design = np.hstack(blocks)
    coeffs, *_ = np.linalg.lstsq(design, phi.values, rcond=None)
    fitted = design @ coeffs
    residual = float(np.linalg.norm(phi.values - fitted))
    max_abs = float(np.max(np.abs(phi.values - fitted)))

    constant = float(coeffs[0])
    tables = []
    offset = 1
    for clique, size in zip(cliques, sizes):
        dims = tuple(shape.action_counts[k] for k in clique)
        table = coeffs[offset : offset + size].reshape(dims, order="F")
        offset += size
        constant += float(table.mean())
        tables.append(table - table.mean())
    if tables:
        tables[0] = tables[0] + constant
    return CliquePotentialFit(cliques, tuple(tables), residual, max_abs)


def clique_potential_decomposition(
    phi: Potential, g: Graph, tol: Tolerance = DEFAULT_TOLERANCE
) -> list[tuple[tuple[int, ...], np.ndarray]] | None:
    """Local tables over the maximal cliques of ``g`` summing to ``phi``, or
    ``None`` when ``phi`` does not lie in the clique span.

    Feasibility is guaranteed when ``phi`` is the potential of a game whose
    class-minimal graph is ``g``.  Infeasible means the fit residual exceeds
    ``tol * (1 + ||phi||)``.
    """
    fit = fit_clique_potentials(phi, g)
    if fit.residual > tol.abs_tol * (1.0 + float(np.linalg.norm(phi.values))):
        return None
    return list(zip(fit.cliques, fit.tables))


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def decomposition_to_dict(d: Decomposition) -> dict:
    return {
        "non_strategic": game_to_dict(d.non_strategic),
        "potential_part": game_to_dict(d.potential_part),
        "harmonic_part": game_to_dict(d.harmonic_part),
        "potential": [float(v) for v in d.potential.values],
        "residuals": {k: float(v) for k, v in sorted(d.residuals.items())},
    }


def decomposition_from_dict(data: dict) -> Decomposition:
    if not isinstance(data, dict):
        raise ValueError("decomposition JSON must be an object")
    try:
        u_ns = game_from_dict(data["non_strategic"])
        u_pot = game_from_dict(data["potential_part"])
        u_harm = game_from_dict(data["harmonic_part"])
        phi = Potential(u_pot.shape, np.asarray(data["potential"], dtype=np.float64))
        residuals = {k: float(v) for k, v in data["residuals"].items()}
    except (KeyError, TypeError) as exc:
        raise ValueError(f"decomposition JSON missing field: {exc}") from exc
    return Decomposition(u_ns, u_pot, u_harm, phi, residuals)
