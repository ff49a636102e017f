"""Reachability, controllability and input placement for linear networks
driven by sign-constrained (unilateral) inputs."""

__version__ = "0.1.0"

from .cone import (ReachableCone, analyze, cone_membership, controllable_membership, gamma_set,
                   in_lineality, q_set, reachable_cone)
from .estimators import GreedyInputPlacement, UnilateralReachability
from .exceptions import AnalysisError, BudgetError, LPError, OracleOverflowError, SpectralError
from .greedy import PlacementResult, delta, exhaustive_placement, place_inputs, select_column
from .matching import hopcroft_karp, subset_from_lineality
from .oracle import reach_feasible, subset_agreement, sweep_agreement
from .spectral import JordanBlock, SpectralDecomposition, compute_spectrum, orthogonal_count, select_left_chains
from .subset import is_subset_controllable, max_controllable_subset, positive_span_is_full, ray_pair_node_test
from .system import InputMatrix

__all__ = [
    "AnalysisError", "BudgetError", "GreedyInputPlacement", "InputMatrix", "JordanBlock", "LPError",
    "OracleOverflowError", "PlacementResult", "ReachableCone", "SpectralDecomposition", "SpectralError",
    "UnilateralReachability", "analyze", "compute_spectrum", "cone_membership", "controllable_membership",
    "delta", "exhaustive_placement", "gamma_set", "hopcroft_karp", "in_lineality", "is_subset_controllable",
    "max_controllable_subset", "orthogonal_count", "place_inputs", "positive_span_is_full", "q_set",
    "ray_pair_node_test", "reach_feasible", "reachable_cone", "select_column", "select_left_chains",
    "subset_agreement", "subset_from_lineality", "sweep_agreement",
]
