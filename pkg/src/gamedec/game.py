"""Finite strategic-form games as flat utility arrays.

A game is a finite player set, one finite action set per player, and one
utility value per (player, strategy profile) pair.  Profiles are stored in
mixed-radix order with player 0 as the fastest-varying digit, so the flat
index of a profile ``x`` is ``sum_i x[i] * prod_{k<i} counts[k]``.  Every
operation in this package relies on that single layout; reshaping a flat
utility array with ``order="F"`` yields a tensor whose axis ``i`` is player
``i``'s action.

All values are immutable after construction and every function here is pure,
so games can be shared freely across threads.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Sequence

import numpy as np

DEFAULT_MAX_PROFILES = 1 << 24
MAX_PROFILES_ENV = "GAMEDEC_MAX_PROFILES"


def max_profile_limit() -> int:
    """Profile-count cap for newly built shapes; overridable via env var."""
    raw = os.environ.get(MAX_PROFILES_ENV)
    if raw is None:
        return DEFAULT_MAX_PROFILES
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"{MAX_PROFILES_ENV} must be an integer, got {raw!r}") from exc
    if value < 1:
        raise ValueError(f"{MAX_PROFILES_ENV} must be positive, got {value}")
    return value


@dataclass(frozen=True)
class GameShape:
    """Number of actions per player; fixes the profile space and its indexing."""

    action_counts: tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(c) for c in self.action_counts)
        object.__setattr__(self, "action_counts", counts)
        if len(counts) < 1:
            raise ValueError("a game needs at least one player")
        if any(c < 1 for c in counts):
            raise ValueError(f"every player needs at least one action, got {counts}")
        limit = max_profile_limit()
        if math.prod(counts) > limit:
            raise ValueError(
                f"profile count {math.prod(counts)} exceeds the limit {limit} "
                f"(override with {MAX_PROFILES_ENV})"
            )

    @property
    def num_players(self) -> int:
        return len(self.action_counts)

    @cached_property
    def profile_count(self) -> int:
        return math.prod(self.action_counts)

    @cached_property
    def strides(self) -> tuple[int, ...]:
        """Mixed-radix place value of each player's digit (player 0 -> 1)."""
        out = []
        acc = 1
        for c in self.action_counts:
            out.append(acc)
            acc *= c
        return tuple(out)

    @cached_property
    def digits(self) -> np.ndarray:
        """(num_players, profile_count) matrix: digits[i, x] = action of i at profile x."""
        idx = np.arange(self.profile_count)
        rows = [
            (idx // stride) % count
            for stride, count in zip(self.strides, self.action_counts)
        ]
        mat = np.stack(rows)
        mat.setflags(write=False)
        return mat


def profile_index(actions: Sequence[int], shape: GameShape) -> int:
    """Flat mixed-radix index of a profile (player 0 fastest digit)."""
    if len(actions) != shape.num_players:
        raise ValueError(
            f"profile has {len(actions)} entries for {shape.num_players} players"
        )
    idx = 0
    for i, (a, count, stride) in enumerate(
        zip(actions, shape.action_counts, shape.strides)
    ):
        a = int(a)
        if not 0 <= a < count:
            raise ValueError(f"action {a} of player {i} outside [0, {count})")
        idx += a * stride
    return idx


def profile_decode(idx: int, shape: GameShape) -> tuple[int, ...]:
    """Inverse of :func:`profile_index`."""
    idx = int(idx)
    if not 0 <= idx < shape.profile_count:
        raise ValueError(f"profile index {idx} outside [0, {shape.profile_count})")
    out = []
    for count in shape.action_counts:
        out.append(idx % count)
        idx //= count
    return tuple(out)


def i_comparable_profiles(
    actions: Sequence[int], player: int, shape: GameShape
) -> list[tuple[int, ...]]:
    """All profiles equal to ``actions`` except possibly at ``player``.

    Includes the input profile itself; the result has exactly
    ``action_counts[player]`` entries, ordered by the deviating action.
    """
    if not 0 <= player < shape.num_players:
        raise ValueError(f"no player {player} in a {shape.num_players}-player game")
    base = list(actions)
    profile_index(base, shape)  # validate
    out = []
    for a in range(shape.action_counts[player]):
        base[player] = a
        out.append(tuple(base))
    return out


@dataclass(frozen=True)
class Tolerance:
    """Comparison tolerance for floating-point games.

    With ``rel_scale`` set (the default), :meth:`resolve` multiplies
    ``abs_tol`` by the largest utility magnitude among the supplied games, so
    predicates are scale-invariant.  Operations whose acceptance formula
    already embeds a scale (the least-squares fits) use ``abs_tol`` directly.
    """

    abs_tol: float = 1e-9
    rel_scale: bool = True

    def __post_init__(self):
        if self.abs_tol < 0:
            raise ValueError(f"abs_tol must be nonnegative, got {self.abs_tol}")

    def resolve(self, *games: "Game") -> float:
        if not self.rel_scale:
            return self.abs_tol
        scale = max((g.max_abs() for g in games), default=1.0)
        return self.abs_tol * scale


DEFAULT_TOLERANCE = Tolerance()


@dataclass(frozen=True)
class Game:
    """A finite game: shape plus one flat utility row per player.

    ``utilities`` has shape (num_players, profile_count); row ``i`` holds
    ``u_i`` over all profiles in mixed-radix order.  Optional display labels
    ride along untouched through every operation.
    """

    shape: GameShape
    utilities: np.ndarray
    player_names: tuple[str, ...] | None = None
    action_names: tuple[tuple[str, ...], ...] | None = None

    def __post_init__(self):
        arr = np.asarray(self.utilities, dtype=np.float64)
        expected = (self.shape.num_players, self.shape.profile_count)
        if arr.shape != expected:
            raise ValueError(f"utilities shape {arr.shape} != expected {expected}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("utilities must be finite (no NaN or Inf)")
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "utilities", arr)
        if self.player_names is not None:
            names = tuple(str(s) for s in self.player_names)
            if len(names) != self.shape.num_players:
                raise ValueError("one player name per player required")
            object.__setattr__(self, "player_names", names)
        if self.action_names is not None:
            rows = tuple(tuple(str(s) for s in row) for row in self.action_names)
            if tuple(len(r) for r in rows) != self.shape.action_counts:
                raise ValueError("action name lists must match the action counts")
            object.__setattr__(self, "action_names", rows)

    @property
    def num_players(self) -> int:
        return self.shape.num_players

    def player_tensor(self, i: int) -> np.ndarray:
        """Utility of player ``i`` as a tensor whose axis ``k`` is player ``k``."""
        return self.utilities[i].reshape(self.shape.action_counts, order="F")

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.utilities))) if self.utilities.size else 0.0

    def with_utilities(self, utilities: np.ndarray) -> "Game":
        return replace(self, utilities=utilities)

    def __add__(self, other: "Game") -> "Game":
        return game_linear_combo([1.0, 1.0], [self, other])

    def __sub__(self, other: "Game") -> "Game":
        return game_linear_combo([1.0, -1.0], [self, other])

    def __neg__(self) -> "Game":
        return self.with_utilities(-self.utilities)

    def __rmul__(self, scalar: float) -> "Game":
        return self.with_utilities(float(scalar) * self.utilities)


def zero_game(shape: GameShape) -> Game:
    return Game(shape, np.zeros((shape.num_players, shape.profile_count)))


def game_linear_combo(coeffs: Sequence[float], games: Sequence[Game]) -> Game:
    """Entrywise linear combination of same-shape games."""
    if len(games) == 0:
        raise ValueError("need at least one game")
    if len(coeffs) != len(games):
        raise ValueError(f"{len(coeffs)} coefficients for {len(games)} games")
    shape = games[0].shape
    for g in games[1:]:
        if g.shape != shape:
            raise ValueError("all games must share one shape")
    acc = np.zeros_like(games[0].utilities)
    for c, g in zip(coeffs, games):
        acc += float(c) * g.utilities
    return replace(games[0], utilities=acc)


def max_abs_diff(u: Game, v: Game) -> float:
    if u.shape != v.shape:
        raise ValueError("games have different shapes")
    return float(np.max(np.abs(u.utilities - v.utilities)))


def normalize(game: Game) -> Game:
    """Normalized version: subtract from each ``u_i`` its mean over player
    ``i``'s own actions, holding everyone else fixed.

    The result has zero own-action sums everywhere, is strategically
    equivalent to the input, and is the unique such game in the input's
    equivalence class.  Idempotent.
    """
    out = np.empty_like(game.utilities)
    for i in range(game.num_players):
        t = game.player_tensor(i)
        out[i] = (t - t.mean(axis=i, keepdims=True)).ravel(order="F")
    return game.with_utilities(out)


def nonstrategic_part(game: Game) -> Game:
    """Own-action mean of each utility row: the complement of :func:`normalize`.

    ``game == nonstrategic_part(game) + normalize(game)`` up to rounding, and
    the result never depends on the owner's action.
    """
    out = np.empty_like(game.utilities)
    for i in range(game.num_players):
        t = game.player_tensor(i)
        out[i] = np.broadcast_to(
            t.mean(axis=i, keepdims=True), t.shape
        ).ravel(order="F")
    return game.with_utilities(out)


def normalization_defect(game: Game) -> float:
    """Largest own-action sum magnitude, over all players and profiles."""
    worst = 0.0
    for i in range(game.num_players):
        t = game.player_tensor(i)
        sums = t.sum(axis=i)
        if sums.size:
            worst = max(worst, float(np.max(np.abs(sums))))
    return worst


def is_normalized(game: Game, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    return normalization_defect(game) <= tol.resolve(game)


def own_action_defect(game: Game) -> float:
    """Largest utility swing a player can cause for herself; 0 iff non-strategic."""
    worst = 0.0
    for i in range(game.num_players):
        t = game.player_tensor(i)
        spread = np.ptp(t, axis=i) if t.shape[i] > 1 else np.zeros(())
        if spread.size:
            worst = max(worst, float(np.max(spread)))
    return worst


def is_non_strategic(game: Game, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    return own_action_defect(game) <= tol.resolve(game)


def strategically_equivalent(
    u: Game, v: Game, tol: Tolerance = DEFAULT_TOLERANCE
) -> bool:
    """True iff ``u - v`` is non-strategic.

    The tolerance is resolved against the scale of the operands (not of their
    difference), so two games that agree up to rounding noise compare equal.
    """
    if u.shape != v.shape:
        raise ValueError("games have different shapes")
    return own_action_defect(u - v) <= tol.resolve(u, v)


# ---------------------------------------------------------------------------
# JSON representation
#
# {"players": [{"name": str, "actions": [str, ...]}, ...],
#  "utilities": [[float, ...], ...]}
#
# utilities[i] is u_i flattened in mixed-radix order (player 0 fastest).
# ---------------------------------------------------------------------------


def default_player_names(shape: GameShape) -> tuple[str, ...]:
    return tuple(f"p{i}" for i in range(shape.num_players))


def default_action_names(shape: GameShape) -> tuple[tuple[str, ...], ...]:
    return tuple(tuple(f"a{a}" for a in range(c)) for c in shape.action_counts)


def game_to_dict(game: Game) -> dict:
    players = game.player_names or default_player_names(game.shape)
    actions = game.action_names or default_action_names(game.shape)
    return {
        "players": [
            {"name": name, "actions": list(acts)}
            for name, acts in zip(players, actions)
        ],
        "utilities": [[float(x) for x in row] for row in game.utilities],
    }


def game_from_dict(data: dict) -> Game:
    if not isinstance(data, dict):
        raise ValueError("game JSON must be an object")
    try:
        players = data["players"]
        utilities = data["utilities"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"game JSON missing field: {exc}") from exc
    if not isinstance(players, list) or not players:
        raise ValueError("field 'players' must be a non-empty list")
    names = []
    action_names = []
    for k, entry in enumerate(players):
        if not isinstance(entry, dict) or "actions" not in entry:
            raise ValueError(f"players[{k}] must be an object with an 'actions' list")
        acts = entry["actions"]
        if not isinstance(acts, list) or not acts:
            raise ValueError(f"players[{k}].actions must be a non-empty list")
        names.append(str(entry.get("name", f"p{k}")))
        action_names.append(tuple(str(a) for a in acts))
    shape = GameShape(tuple(len(a) for a in action_names))
    if not isinstance(utilities, list) or len(utilities) != shape.num_players:
        raise ValueError(
            f"field 'utilities' must list one array per player "
            f"({shape.num_players}), got {len(utilities) if isinstance(utilities, list) else type(utilities).__name__}"
        )
    rows = []
    for i, row in enumerate(utilities):
        arr = np.asarray(row, dtype=np.float64)
        if arr.ndim != 1 or arr.shape[0] != shape.profile_count:
            raise ValueError(
                f"utilities[{i}] must have length {shape.profile_count}, got {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise ValueError(f"utilities[{i}] contains non-finite entries")
        rows.append(arr)
    return Game(shape, np.stack(rows), tuple(names), tuple(action_names))


def game_to_json(game: Game, indent: int | None = 2) -> str:
    return json.dumps(game_to_dict(game), indent=indent, sort_keys=True)


def game_from_json(text: str) -> Game:
    return game_from_dict(json.loads(text))
