"""Quantitative security analytics for networked systems modeled as
vulnerability graphs: steady-state compromise probabilities, bounds,
topology ordering, defense-strategy ranking, threshold conditions, and a
seeded event-driven simulator with an exact small-graph oracle."""

from .analytic import (
    FixedPointResult,
    Parameters,
    Strategy,
    StrategyComparison,
    ThresholdVerdict,
    TriState,
    expected_compromised,
    mean_compromised_neighbors,
    normal_quantile,
    secure_odds,
    solve_steady_state,
    steady_state_bounds,
    strategy_apply,
    strategy_condition,
    threshold_check,
)
from .distributions import (
    DegreeDistribution,
    OrderVerdict,
    Relation,
    order_cross_family,
    order_same_family,
    power_law_exponent_for_mean,
    read_distribution_file,
    stochastic_order,
    write_distribution_file,
)
from .errors import ComparisonError, ConstructionError, DomainError, VulngraphError
from .experiments import (
    ExperimentSpec,
    SurfaceGrid,
    ThresholdExceedance,
    run_experiment,
    search_powerlaw_graphs,
    threshold_exceedance,
)
from .graphs import (
    VulnerabilityGraph,
    empirical_distribution,
    gen_powerlaw,
    gen_random,
    gen_regular,
    read_graph_file,
    write_graph_file,
)
from .simulate import (
    EnsembleResult,
    ExactStationary,
    SimConfig,
    SteadyStateEstimate,
    Trajectory,
    estimate_steady_state,
    exact_stationary,
    joint_state_occupancy,
    run_ensemble,
    simulate,
)

__version__ = "0.1.0"

__all__ = [
    "ComparisonError",
    "ConstructionError",
    "DegreeDistribution",
    "DomainError",
    "EnsembleResult",
    "ExactStationary",
    "ExperimentSpec",
    "FixedPointResult",
    "OrderVerdict",
    "Parameters",
    "Relation",
    "SimConfig",
    "SteadyStateEstimate",
    "Strategy",
    "StrategyComparison",
    "SurfaceGrid",
    "ThresholdExceedance",
    "ThresholdVerdict",
    "Trajectory",
    "TriState",
    "VulnerabilityGraph",
    "VulngraphError",
    "empirical_distribution",
    "estimate_steady_state",
    "exact_stationary",
    "expected_compromised",
    "gen_powerlaw",
    "gen_random",
    "gen_regular",
    "joint_state_occupancy",
    "mean_compromised_neighbors",
    "normal_quantile",
    "order_cross_family",
    "order_same_family",
    "power_law_exponent_for_mean",
    "read_graph_file",
    "run_ensemble",
    "run_experiment",
    "search_powerlaw_graphs",
    "secure_odds",
    "simulate",
    "solve_steady_state",
    "steady_state_bounds",
    "stochastic_order",
    "strategy_apply",
    "strategy_condition",
    "read_distribution_file",
    "threshold_check",
    "threshold_exceedance",
    "write_distribution_file",
    "write_graph_file",
]
