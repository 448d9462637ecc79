"""Numerical error exponents for source-channel pairs with decoder side
information: channel coding exponents, source coding exponents with side
information, their joint bounds and matching diagnostics, and an exact
small-blocklength simulator, all driven by a deterministic scenario CLI.
"""
from .channel_exponents import (
    ChannelExponentResult,
    CriticalRateResult,
    bec,
    bsc,
    capacity,
    critical_rate,
    dual_exponent_curves,
    gallager_e0,
    input_optimized_curves,
    is_gallager_symmetric,
    optimize_input,
    primal_exponent_curves,
    random_coding_exponent,
    sphere_packing_exponent,
    uniform_input_is_optimal_premise,
)
from .errors import BudgetError, ConfigError, PremiseViolationError, SiexpError
from .exact_sim import (
    Codebook,
    SimulationResult,
    build_codebook,
    exact_error_probability,
    map_decode,
    mmi_si_decode,
    monte_carlo_error_probability,
)
from .joint_bounds import (
    GameReport,
    JointBoundResult,
    MatchingDiagnostics,
    SeparateCodingResult,
    SeparationReport,
    best_input_for_marginal,
    both_si_bounds,
    game_solve,
    matching_check,
    separate_exponent,
    separate_vs_joint,
    symmetric_flat_bounds,
    theorem1_bounds,
)
from .probkit import (
    ConditionalDistribution,
    Distribution,
    JointDistribution,
    compose,
    conditional_entropy,
    conditional_kl,
    entropy,
    kl_divergence,
    mutual_information,
)
from .scenario import (
    GridSpec,
    Scenario,
    SimSpec,
    Tolerances,
    emit_config,
    emit_curves,
    load_scenario,
    parse_config,
    parse_curve_table,
    report,
    reproduce_fig1,
    reproduce_fig2,
    simulate_table,
    worked_example,
)
from .source_si_exponents import (
    DualityReport,
    SourceExponentResult,
    duality_check,
    e_lower,
    e_upper,
    e_upper_dual,
    e_upper_fixed_marginal,
    fixed_marginal_dual_curve,
    independent_si_exponent,
    source_dual_curves,
    source_gallager_function,
    source_primal_curves,
)

__version__ = "0.1.0"

__all__ = [
    "BudgetError",
    "ChannelExponentResult",
    "Codebook",
    "ConditionalDistribution",
    "ConfigError",
    "CriticalRateResult",
    "Distribution",
    "DualityReport",
    "GameReport",
    "GridSpec",
    "JointBoundResult",
    "JointDistribution",
    "MatchingDiagnostics",
    "PremiseViolationError",
    "Scenario",
    "SeparateCodingResult",
    "SeparationReport",
    "SiexpError",
    "SimSpec",
    "SimulationResult",
    "SourceExponentResult",
    "Tolerances",
    "bec",
    "best_input_for_marginal",
    "both_si_bounds",
    "bsc",
    "build_codebook",
    "capacity",
    "compose",
    "conditional_entropy",
    "conditional_kl",
    "critical_rate",
    "dual_exponent_curves",
    "duality_check",
    "e_lower",
    "e_upper",
    "e_upper_dual",
    "e_upper_fixed_marginal",
    "emit_config",
    "emit_curves",
    "entropy",
    "exact_error_probability",
    "fixed_marginal_dual_curve",
    "gallager_e0",
    "game_solve",
    "independent_si_exponent",
    "input_optimized_curves",
    "is_gallager_symmetric",
    "kl_divergence",
    "load_scenario",
    "map_decode",
    "matching_check",
    "mmi_si_decode",
    "monte_carlo_error_probability",
    "mutual_information",
    "optimize_input",
    "parse_config",
    "parse_curve_table",
    "primal_exponent_curves",
    "random_coding_exponent",
    "report",
    "reproduce_fig1",
    "reproduce_fig2",
    "separate_exponent",
    "separate_vs_joint",
    "simulate_table",
    "source_dual_curves",
    "source_gallager_function",
    "source_primal_curves",
    "sphere_packing_exponent",
    "symmetric_flat_bounds",
    "theorem1_bounds",
    "uniform_input_is_optimal_premise",
    "worked_example",
]
