"""Finite strategic-form games: minimal interaction graphs, strategic
equivalence, and the exact split into non-strategic, normalized-potential,
and normalized-harmonic parts."""

from .game import (
    DEFAULT_TOLERANCE,
    Game,
    GameShape,
    Tolerance,
    game_from_dict,
    game_from_json,
    game_linear_combo,
    game_to_dict,
    game_to_json,
    i_comparable_profiles,
    is_non_strategic,
    is_normalized,
    max_abs_diff,
    nonstrategic_part,
    normalize,
    profile_decode,
    profile_index,
    strategically_equivalent,
    zero_game,
)
from .graphs import (
    Graph,
    Splitting,
    class_minimal_graph,
    full_neighborhood_splitting,
    graph_from_dict,
    graph_from_json,
    graph_to_dict,
    graph_to_json,
    induced_splitting,
    intersection,
    is_graphical,
    is_subgraph,
    maximal_cliques,
    minimal_graph,
    singleton_splitting,
    splitting_extension,
    splitting_from_dict,
    splitting_from_json,
    splitting_to_dict,
    symmetric_closure,
    to_dot,
    triangle_extension,
    union,
)
from .hodge import (
    Decomposition,
    Potential,
    ResponseGraph,
    SolverError,
    clique_potential_decomposition,
    decompose,
    decomposition_from_dict,
    decomposition_to_dict,
    divergence,
    exact_potential,
    fit_clique_potentials,
    fit_potential,
    game_flow,
    gradient,
    harmonic_normalized_check,
    is_harmonic,
    is_zero_sum,
    potential_component,
)
from .separability import (
    EdgeUtilities,
    SeparableDecomposition,
    VerificationReport,
    build_pairwise_game,
    edge_utilities_from_dict,
    edge_utilities_from_json,
    edge_utilities_to_dict,
    example_8node_graph,
    fit_separable,
    is_separable,
    public_good_majority_game,
    verify_pairwise_decomposition,
    verify_separable_decomposition,
    verify_triangle_decomposition,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
