"""Deterministic market simulator with a weighted liquid rank reputation system."""

from liquidrank._core import (
    AgentEconomics,
    AgentSpec,
    ConfigError,
    EquityDirection,
    IoError,
    MarketConfig,
    MetricsReport,
    RatedTransaction,
    ReputationParams,
    SignificanceResult,
    SimulationResult,
    Strategy,
    blend_ranks,
    compute_differential_ranks,
    compute_metrics,
    equity_weights,
    inequity,
    loss_to_scam,
    plot_reputation_vs_quality,
    preset_market,
    preset_names,
    rating_weight,
    run_simulation,
    significance_test,
    student_t_two_sided_p,
    update_ranks,
    update_ranks_rows,
    utility,
    weighted_covariance,
    weighted_pearson,
)

__all__ = [
    "AgentEconomics",
    "AgentSpec",
    "ConfigError",
    "EquityDirection",
    "IoError",
    "MarketConfig",
    "MetricsReport",
    "RatedTransaction",
    "ReputationParams",
    "SignificanceResult",
    "SimulationResult",
    "Strategy",
    "blend_ranks",
    "compute_differential_ranks",
    "compute_metrics",
    "equity_weights",
    "inequity",
    "loss_to_scam",
    "plot_reputation_vs_quality",
    "preset_market",
    "preset_names",
    "rating_weight",
    "run_simulation",
    "significance_test",
    "student_t_two_sided_p",
    "update_ranks",
    "update_ranks_rows",
    "utility",
    "weighted_covariance",
    "weighted_pearson",
]
